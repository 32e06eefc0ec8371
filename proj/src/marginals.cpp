#include "copulaboost/marginals.hpp"

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <stdexcept>

#include "mathutil.hpp"

namespace cpb {

namespace {

// predictor clamp so exp(eta) stays finite
constexpr double kEtaClamp = 350.0;

double safe_exp(double eta) { return std::exp(std::clamp(eta, -kEtaClamp, kEtaClamp)); }

void check_positive_y(double y, const char* fam) {
  if (!(y > 0.0)) throw std::domain_error(std::string(fam) + ": y must be positive");
}

void check_params(const MarginParams& p, bool mu_positive, const char* fam) {
  if (!(p.sigma > 0.0) || !std::isfinite(p.sigma))
    throw std::domain_error(std::string(fam) + ": sigma must be positive and finite");
  if (mu_positive && !(p.mu > 0.0))
    throw std::domain_error(std::string(fam) + ": mu must be positive");
  if (!std::isfinite(p.mu))
    throw std::domain_error(std::string(fam) + ": mu must be finite");
}

// Stable logistic 1/(1+e^{-x}).
double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// d/d alpha of the regularized lower incomplete gamma P(alpha, x).
// Series branch for x <= alpha+1 (term-wise differentiated Kummer series),
// complement branch with a tail integral otherwise.
double gamma_p_dalpha(double alpha, double x) {
  if (x <= 0.0) return 0.0;
  const double lx = std::log(x);
  if (x <= alpha + 1.0) {
    // P = e^{-x + a*lx - lgamma(a+1)} * sum c_n with c_0 = 1, c_n = c_{n-1} x/(a+n);
    // dc_n/da = -c_n s_n where s_n = sum_{j=1..n} 1/(a+j)
    double c = 1.0, s = 0.0, sum = 1.0, dsum = 0.0;
    for (int n = 1; n < 100000; ++n) {
      c *= x / (alpha + n);
      s += 1.0 / (alpha + n);
      sum += c;
      dsum += c * s;
      if (c < sum * 1e-17) break;
    }
    const double pref = std::exp(-x + alpha * lx - std::lgamma(alpha + 1.0));
    const double P = pref * sum;
    return P * (lx - boost::math::digamma(alpha + 1.0)) - pref * dsum;
  }
  // dP/da = -dQ/da,  dQ/da = [dGamma(a,x)/da]/Gamma(a) - Q psi(a),
  // dGamma(a,x)/da = e^{-x} x^{a-1} int_0^inf e^{-s} (1+s/x)^{a-1} log(x+s) ds
  boost::math::quadrature::exp_sinh<double> integrator;
  const double am1 = alpha - 1.0;
  auto integrand = [&](double s) {
    return std::exp(-s + am1 * std::log1p(s / x)) * std::log(x + s);
  };
  const double tail = integrator.integrate(integrand, 1e-12);
  const double scale = std::exp(-x + am1 * lx - std::lgamma(alpha));
  const double q = boost::math::gamma_q(alpha, x);
  const double dq = scale * tail - q * boost::math::digamma(alpha);
  return -dq;
}

}  // namespace

Margin margin_from_string(const std::string& name) {
  if (name == "gaussian") return Margin::Gaussian;
  if (name == "lognormal") return Margin::LogNormal;
  if (name == "loglogistic") return Margin::LogLogistic;
  if (name == "gamma") return Margin::Gamma;
  throw std::invalid_argument("unknown marginal family: '" + name + "'");
}

std::string margin_name(Margin f) {
  switch (f) {
    case Margin::Gaussian: return "gaussian";
    case Margin::LogNormal: return "lognormal";
    case Margin::LogLogistic: return "loglogistic";
    case Margin::Gamma: return "gamma";
  }
  throw std::logic_error("margin_name: bad enum");
}

MarginParams margin_params_from_eta(Margin f, double eta_mu, double eta_sigma) {
  switch (f) {
    case Margin::Gaussian:
    case Margin::LogNormal:
      return {eta_mu, safe_exp(eta_sigma)};
    case Margin::LogLogistic:
    case Margin::Gamma:
      return {safe_exp(eta_mu), safe_exp(eta_sigma)};
  }
  throw std::logic_error("margin_params_from_eta: bad enum");
}

double margin_log_pdf(Margin f, double y, const MarginParams& p) {
  switch (f) {
    case Margin::Gaussian: {
      check_params(p, false, "gaussian");
      const double z = (y - p.mu) / p.sigma;
      return -detail::kLogSqrt2Pi - std::log(p.sigma) - 0.5 * z * z;
    }
    case Margin::LogNormal: {
      check_params(p, false, "lognormal");
      check_positive_y(y, "lognormal");
      const double ly = std::log(y);
      const double z = (ly - p.mu) / p.sigma;
      return -ly - std::log(p.sigma) - detail::kLogSqrt2Pi - 0.5 * z * z;
    }
    case Margin::LogLogistic: {
      check_params(p, true, "loglogistic");
      check_positive_y(y, "loglogistic");
      const double st = p.sigma * std::log(y / p.mu);
      return std::log(p.sigma) - std::log(y) + st - 2.0 * detail::softplus(st);
    }
    case Margin::Gamma: {
      check_params(p, true, "gamma");
      check_positive_y(y, "gamma");
      const double a = 1.0 / (p.sigma * p.sigma);
      const double b = a / p.mu;
      return a * std::log(b) - std::lgamma(a) + (a - 1.0) * std::log(y) - b * y;
    }
  }
  throw std::logic_error("margin_log_pdf: bad enum");
}

double margin_pdf(Margin f, double y, const MarginParams& p) {
  return std::exp(margin_log_pdf(f, y, p));
}

double margin_cdf(Margin f, double y, const MarginParams& p) {
  switch (f) {
    case Margin::Gaussian:
      check_params(p, false, "gaussian");
      return detail::normal_cdf((y - p.mu) / p.sigma);
    case Margin::LogNormal:
      check_params(p, false, "lognormal");
      check_positive_y(y, "lognormal");
      return detail::normal_cdf((std::log(y) - p.mu) / p.sigma);
    case Margin::LogLogistic: {
      check_params(p, true, "loglogistic");
      check_positive_y(y, "loglogistic");
      return logistic(p.sigma * std::log(y / p.mu));
    }
    case Margin::Gamma: {
      check_params(p, true, "gamma");
      check_positive_y(y, "gamma");
      const double a = 1.0 / (p.sigma * p.sigma);
      return boost::math::gamma_p(a, a * y / p.mu);
    }
  }
  throw std::logic_error("margin_cdf: bad enum");
}

double margin_quantile(Margin f, double u, const MarginParams& p) {
  if (!(u > 0.0 && u < 1.0))
    throw std::domain_error("margin_quantile: u must lie in (0,1)");
  switch (f) {
    case Margin::Gaussian:
      check_params(p, false, "gaussian");
      return p.mu + p.sigma * detail::normal_quantile(u);
    case Margin::LogNormal:
      check_params(p, false, "lognormal");
      return std::exp(p.mu + p.sigma * detail::normal_quantile(u));
    case Margin::LogLogistic:
      check_params(p, true, "loglogistic");
      return p.mu * std::exp(std::log(u / (1.0 - u)) / p.sigma);
    case Margin::Gamma: {
      check_params(p, true, "gamma");
      const double a = 1.0 / (p.sigma * p.sigma);
      return boost::math::gamma_p_inv(a, u) * p.mu / a;
    }
  }
  throw std::logic_error("margin_quantile: bad enum");
}

MarginScore margin_score(Margin f, double y, double eta_mu, double eta_sigma) {
  const MarginParams p = margin_params_from_eta(f, eta_mu, eta_sigma);
  switch (f) {
    case Margin::Gaussian: {
      const double z = (y - p.mu) / p.sigma;
      return {z / p.sigma, z * z - 1.0};
    }
    case Margin::LogNormal: {
      check_positive_y(y, "lognormal");
      const double z = (std::log(y) - p.mu) / p.sigma;
      return {z / p.sigma, z * z - 1.0};
    }
    case Margin::LogLogistic: {
      check_positive_y(y, "loglogistic");
      const double t = std::log(y / p.mu);
      const double F = logistic(p.sigma * t);
      return {p.sigma * (2.0 * F - 1.0), 1.0 + p.sigma * t * (1.0 - 2.0 * F)};
    }
    case Margin::Gamma: {
      check_positive_y(y, "gamma");
      const double a = 1.0 / (p.sigma * p.sigma);
      const double d_mu = (y - p.mu) / (p.sigma * p.sigma * p.mu);
      const double d_sigma =
          2.0 * a *
          (y / p.mu - std::log(y) + std::log(p.mu) - std::log(a) - 1.0 + boost::math::digamma(a));
      return {d_mu, d_sigma};
    }
  }
  throw std::logic_error("margin_score: bad enum");
}

MarginCdfScore margin_cdf_score(Margin f, double y, double eta_mu, double eta_sigma) {
  const MarginParams p = margin_params_from_eta(f, eta_mu, eta_sigma);
  switch (f) {
    case Margin::Gaussian: {
      const double z = (y - p.mu) / p.sigma;
      const double phi = detail::normal_pdf(z);
      return {-phi / p.sigma, -phi * z};
    }
    case Margin::LogNormal: {
      check_positive_y(y, "lognormal");
      const double z = (std::log(y) - p.mu) / p.sigma;
      const double phi = detail::normal_pdf(z);
      return {-phi / p.sigma, -phi * z};
    }
    case Margin::LogLogistic: {
      check_positive_y(y, "loglogistic");
      const double t = std::log(y / p.mu);
      const double F = logistic(p.sigma * t);
      const double w = F * (1.0 - F);
      return {-p.sigma * w, p.sigma * t * w};
    }
    case Margin::Gamma: {
      check_positive_y(y, "gamma");
      const double a = 1.0 / (p.sigma * p.sigma);
      const double x = a * y / p.mu;
      const double dpdx = boost::math::gamma_p_derivative(a, x);
      const double d_mu = -x * dpdx;
      const double d_sigma = -2.0 * a * gamma_p_dalpha(a, x) - 2.0 * x * dpdx;
      return {d_mu, d_sigma};
    }
  }
  throw std::logic_error("margin_cdf_score: bad enum");
}

}  // namespace cpb
