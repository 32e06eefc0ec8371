#pragma once

#include <string>
#include <vector>

#include "copulaboost/rng.hpp"

namespace cpb {

// Bivariate copula families.  The dependence parameter theta is modelled
// through a link keeping it inside the family's domain:
//   gaussian  rho   = eta / sqrt(1 + eta^2)      in (-1, 1)
//   clayton   theta = exp(eta)                   in (0, inf)
//   gumbel    theta = 1 + exp(eta)               in (1, inf)
enum class Copula { Gaussian, Clayton, Gumbel };

Copula copula_from_string(const std::string& name);
std::string copula_name(Copula c);

double copula_theta_from_eta(Copula c, double eta);
double copula_eta_from_theta(Copula c, double theta);
double copula_dtheta_deta(Copula c, double eta);

// C(u, v | theta); u, v in (0,1), theta in the family domain
double copula_cdf(Copula c, double u, double v, double theta);

// log copula density at clamped (u, v), parameter given on the link scale
double copula_log_density(Copula c, double u, double v, double eta);

// partial derivatives of the log density: d/du, d/dv, d/d eta
struct CopulaScore {
  double d_u;
  double d_v;
  double d_eta;
};
CopulaScore copula_score(Copula c, double u, double v, double eta);

// population Kendall's tau at theta (closed forms)
double copula_kendall_tau(Copula c, double theta);

// one exact draw (inversion / frailty construction, no rejection step on the
// copula itself)
void copula_sample(Copula c, double theta, RngStream& rng, double& u, double& v);

// bivariate standard-normal CDF P(Z1 <= a, Z2 <= b) at correlation r
double bvn_cdf(double a, double b, double r);

// sample Kendall tau, O(n log n), no-ties formula
double empirical_kendall_tau(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace cpb
