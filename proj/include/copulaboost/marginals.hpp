#pragma once

#include <string>

namespace cpb {

// Marginal response families.  Each has a location-type parameter mu and a
// scale/shape parameter sigma, modelled through the link functions applied in
// margin_params_from_eta.
enum class Margin { Gaussian, LogNormal, LogLogistic, Gamma };

Margin margin_from_string(const std::string& name);
std::string margin_name(Margin f);

// Natural-scale parameter pair.
struct MarginParams {
  double mu;
  double sigma;
};

// Link application, per family:
//   gaussian     mu identity, sigma log
//   lognormal    mu identity (mean of log Y), sigma log (sd of log Y)
//   loglogistic  mu log (scale/median), sigma log (shape)
//   gamma        mu log (mean), sigma log (Var = sigma^2 mu^2)
MarginParams margin_params_from_eta(Margin f, double eta_mu, double eta_sigma);

double margin_log_pdf(Margin f, double y, const MarginParams& p);
double margin_pdf(Margin f, double y, const MarginParams& p);
double margin_cdf(Margin f, double y, const MarginParams& p);
double margin_quantile(Margin f, double u, const MarginParams& p);

// d log f / d eta, the score on the predictor scale
struct MarginScore {
  double d_eta_mu;
  double d_eta_sigma;
};
MarginScore margin_score(Margin f, double y, double eta_mu, double eta_sigma);

// d F / d eta, the CDF sensitivity on the predictor scale
struct MarginCdfScore {
  double d_eta_mu;
  double d_eta_sigma;
};
MarginCdfScore margin_cdf_score(Margin f, double y, double eta_mu, double eta_sigma);

}  // namespace cpb
