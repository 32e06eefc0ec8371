#include "copulaboost/copulas.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mathutil.hpp"

namespace cpb {

namespace {

using detail::clamp_log_term;
using detail::clamp_unit;

// predictor clamp keeping exp(eta) finite
constexpr double kEtaClamp = 350.0;

void check_interior(double u, double v) {
  if (!(u > 0.0 && u < 1.0) || !(v > 0.0 && v < 1.0))
    throw std::domain_error("copula_cdf: u, v must lie in (0,1)");
}

// log(a^theta + b^theta) from la = log a, lb = log b, overflow-free
double log_pow_sum(double theta, double la, double lb) {
  const double x = theta * la, y = theta * lb;
  const double m = std::max(x, y);
  return m + std::log1p(std::exp(std::min(x, y) - m));
}

struct ClaytonParts {
  double lu, lv;   // log u, log v
  double s;        // u^-theta + v^-theta - 1
  double log_s;
};

// stable assembly of S = u^-theta + v^-theta - 1 (also exact for tiny theta)
ClaytonParts clayton_parts(double theta, double u, double v) {
  ClaytonParts p;
  p.lu = std::log(u);
  p.lv = std::log(v);
  const double ea = std::expm1(-theta * p.lu);
  const double eb = std::expm1(-theta * p.lv);
  p.s = 1.0 + ea + eb;
  p.log_s = std::log1p(ea + eb);
  return p;
}

}  // namespace

Copula copula_from_string(const std::string& name) {
  if (name == "gaussian") return Copula::Gaussian;
  if (name == "clayton") return Copula::Clayton;
  if (name == "gumbel") return Copula::Gumbel;
  throw std::invalid_argument("unknown copula family: '" + name + "'");
}

std::string copula_name(Copula c) {
  switch (c) {
    case Copula::Gaussian: return "gaussian";
    case Copula::Clayton: return "clayton";
    case Copula::Gumbel: return "gumbel";
  }
  throw std::logic_error("copula_name: bad enum");
}

double copula_theta_from_eta(Copula c, double eta) {
  switch (c) {
    case Copula::Gaussian: {
      // keep rho strictly inside (-1,1) even when eta is astronomically large
      const double r = eta / std::hypot(1.0, eta);
      return std::clamp(r, -(1.0 - 1e-10), 1.0 - 1e-10);
    }
    case Copula::Clayton: return std::exp(std::clamp(eta, -kEtaClamp, kEtaClamp));
    case Copula::Gumbel: return 1.0 + std::exp(std::clamp(eta, -kEtaClamp, kEtaClamp));
  }
  throw std::logic_error("copula_theta_from_eta: bad enum");
}

double copula_eta_from_theta(Copula c, double theta) {
  switch (c) {
    case Copula::Gaussian:
      if (!(theta > -1.0 && theta < 1.0))
        throw std::domain_error("gaussian copula: rho must lie in (-1,1)");
      return theta / std::sqrt((1.0 - theta) * (1.0 + theta));
    case Copula::Clayton:
      if (!(theta > 0.0)) throw std::domain_error("clayton copula: theta must be positive");
      return std::log(theta);
    case Copula::Gumbel:
      if (!(theta > 1.0)) throw std::domain_error("gumbel copula: theta must exceed 1");
      return std::log(theta - 1.0);
  }
  throw std::logic_error("copula_eta_from_theta: bad enum");
}

double copula_dtheta_deta(Copula c, double eta) {
  switch (c) {
    case Copula::Gaussian: {
      const double rho = copula_theta_from_eta(c, eta);
      const double om = (1.0 - rho) * (1.0 + rho);
      return om * std::sqrt(om);
    }
    case Copula::Clayton: return copula_theta_from_eta(c, eta);
    case Copula::Gumbel: return copula_theta_from_eta(c, eta) - 1.0;
  }
  throw std::logic_error("copula_dtheta_deta: bad enum");
}

double bvn_cdf(double a, double b, double r) {
  if (!(r > -1.0 && r < 1.0)) throw std::domain_error("bvn_cdf: correlation must lie in (-1,1)");
  if (r == 0.0) return detail::normal_cdf(a) * detail::normal_cdf(b);
  const double s = std::sqrt((1.0 - r) * (1.0 + r));
  const double hi = std::min(a, 40.0);
  if (hi <= -40.0) return 0.0;
  auto f = [&](double x) { return detail::normal_pdf(x) * detail::normal_cdf((b - r * x) / s); };
  double err = 0.0;
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, -40.0, hi, 15, 1e-14, &err);
  return std::clamp(integral, 0.0, 1.0);
}

double copula_cdf(Copula c, double u, double v, double theta) {
  check_interior(u, v);
  switch (c) {
    case Copula::Gaussian: {
      if (!(theta > -1.0 && theta < 1.0))
        throw std::domain_error("gaussian copula: rho must lie in (-1,1)");
      return bvn_cdf(detail::normal_quantile(u), detail::normal_quantile(v), theta);
    }
    case Copula::Clayton: {
      if (!(theta > 0.0)) throw std::domain_error("clayton copula: theta must be positive");
      const ClaytonParts p = clayton_parts(theta, u, v);
      return std::exp(-p.log_s / theta);
    }
    case Copula::Gumbel: {
      if (!(theta >= 1.0)) throw std::domain_error("gumbel copula: theta must be >= 1");
      const double la = std::log(-std::log(u));
      const double lb = std::log(-std::log(v));
      const double log_A = log_pow_sum(theta, la, lb);
      return std::exp(-std::exp(log_A / theta));
    }
  }
  throw std::logic_error("copula_cdf: bad enum");
}

double copula_log_density(Copula c, double u, double v, double eta) {
  u = clamp_unit(u);
  v = clamp_unit(v);
  const double theta = copula_theta_from_eta(c, eta);
  switch (c) {
    case Copula::Gaussian: {
      const double rho = theta;
      const double z1 = detail::normal_quantile(u);
      const double z2 = detail::normal_quantile(v);
      const double om = (1.0 - rho) * (1.0 + rho);
      const double num = 2.0 * rho * z1 * z2 - rho * rho * (z1 * z1 + z2 * z2);
      return clamp_log_term(-0.5 * std::log(om) + num / (2.0 * om));
    }
    case Copula::Clayton: {
      const ClaytonParts p = clayton_parts(theta, u, v);
      const double lc = std::log1p(theta) - (1.0 + theta) * (p.lu + p.lv) -
                        (2.0 + 1.0 / theta) * p.log_s;
      return clamp_log_term(lc);
    }
    case Copula::Gumbel: {
      const double a = -std::log(u), b = -std::log(v);
      const double la = std::log(a), lb = std::log(b);
      const double log_A = log_pow_sum(theta, la, lb);
      const double w = std::exp(log_A / theta);
      const double lc = -w + a + b + (theta - 1.0) * (la + lb) +
                        (1.0 / theta - 2.0) * log_A + std::log(w + theta - 1.0);
      return clamp_log_term(lc);
    }
  }
  throw std::logic_error("copula_log_density: bad enum");
}

CopulaScore copula_score(Copula c, double u, double v, double eta) {
  u = clamp_unit(u);
  v = clamp_unit(v);
  const double theta = copula_theta_from_eta(c, eta);
  const double dtheta = copula_dtheta_deta(c, eta);
  switch (c) {
    case Copula::Gaussian: {
      const double rho = theta;
      const double z1 = detail::normal_quantile(u);
      const double z2 = detail::normal_quantile(v);
      const double om = (1.0 - rho) * (1.0 + rho);
      const double d_u = rho * (z2 - rho * z1) / (om * detail::normal_pdf(z1));
      const double d_v = rho * (z1 - rho * z2) / (om * detail::normal_pdf(z2));
      const double d_rho =
          rho / om + ((1.0 + rho * rho) * z1 * z2 - rho * (z1 * z1 + z2 * z2)) / (om * om);
      return {d_u, d_v, d_rho * dtheta};
    }
    case Copula::Clayton: {
      const ClaytonParts p = clayton_parts(theta, u, v);
      const double upt = std::exp(-(theta + 1.0) * p.lu);  // u^-(theta+1)
      const double vpt = std::exp(-(theta + 1.0) * p.lv);
      const double d_u = -(1.0 + theta) / u + (2.0 * theta + 1.0) * upt / p.s;
      const double d_v = -(1.0 + theta) / v + (2.0 * theta + 1.0) * vpt / p.s;
      // dS/dtheta = -(u^-theta log u + v^-theta log v)
      const double s_theta =
          -(std::exp(-theta * p.lu) * p.lu + std::exp(-theta * p.lv) * p.lv);
      const double d_theta = 1.0 / (1.0 + theta) - (p.lu + p.lv) +
                             p.log_s / (theta * theta) -
                             (2.0 + 1.0 / theta) * s_theta / p.s;
      return {d_u, d_v, d_theta * dtheta};
    }
    case Copula::Gumbel: {
      const double a = -std::log(u), b = -std::log(v);
      const double la = std::log(a), lb = std::log(b);
      const double log_A = log_pow_sum(theta, la, lb);
      const double log_w = log_A / theta;
      const double w = std::exp(log_w);
      const double tail = w + theta - 1.0;
      // dW/da = exp((theta-1)(la - log W)), a^{theta-1}/A = exp((theta-1)la - log A)
      const double w_a = std::exp((theta - 1.0) * (la - log_w));
      const double w_b = std::exp((theta - 1.0) * (lb - log_w));
      const double pow_a = std::exp((theta - 1.0) * la - log_A);
      const double pow_b = std::exp((theta - 1.0) * lb - log_A);
      const double dlc_da = -w_a + 1.0 + (theta - 1.0) / a +
                            (1.0 / theta - 2.0) * theta * pow_a + w_a / tail;
      const double dlc_db = -w_b + 1.0 + (theta - 1.0) / b +
                            (1.0 / theta - 2.0) * theta * pow_b + w_b / tail;
      // dA/dtheta = a^theta la + b^theta lb
      const double da_dtheta = std::exp(theta * la) * la + std::exp(theta * lb) * lb;
      const double dw_dtheta =
          w * (-log_A / (theta * theta) + da_dtheta / (theta * std::exp(log_A)));
      const double d_theta = -dw_dtheta + (la + lb) - log_A / (theta * theta) +
                             (1.0 / theta - 2.0) * da_dtheta / std::exp(log_A) +
                             (dw_dtheta + 1.0) / tail;
      return {dlc_da * (-1.0 / u), dlc_db * (-1.0 / v), d_theta * dtheta};
    }
  }
  throw std::logic_error("copula_score: bad enum");
}

double copula_kendall_tau(Copula c, double theta) {
  switch (c) {
    case Copula::Gaussian:
      if (!(theta > -1.0 && theta < 1.0))
        throw std::domain_error("gaussian copula: rho must lie in (-1,1)");
      return 2.0 * std::asin(theta) / std::numbers::pi;
    case Copula::Clayton:
      if (!(theta > 0.0)) throw std::domain_error("clayton copula: theta must be positive");
      return theta / (theta + 2.0);
    case Copula::Gumbel:
      if (!(theta >= 1.0)) throw std::domain_error("gumbel copula: theta must be >= 1");
      return 1.0 - 1.0 / theta;
  }
  throw std::logic_error("copula_kendall_tau: bad enum");
}

void copula_sample(Copula c, double theta, RngStream& rng, double& u, double& v) {
  switch (c) {
    case Copula::Gaussian: {
      if (!(theta > -1.0 && theta < 1.0))
        throw std::domain_error("gaussian copula: rho must lie in (-1,1)");
      const double z1 = rng.normal();
      const double z2 = theta * z1 + std::sqrt((1.0 - theta) * (1.0 + theta)) * rng.normal();
      u = detail::normal_cdf(z1);
      v = detail::normal_cdf(z2);
      return;
    }
    case Copula::Clayton: {
      if (!(theta > 0.0)) throw std::domain_error("clayton copula: theta must be positive");
      // Marshall-Olkin gamma frailty
      const double m = rng.gamma(1.0 / theta);
      const double e1 = rng.exponential();
      const double e2 = rng.exponential();
      u = std::exp(-std::log1p(e1 / m) / theta);
      v = std::exp(-std::log1p(e2 / m) / theta);
      return;
    }
    case Copula::Gumbel: {
      if (!(theta >= 1.0)) throw std::domain_error("gumbel copula: theta must be >= 1");
      if (theta == 1.0) {  // independence
        u = std::exp(-rng.exponential());
        v = std::exp(-rng.exponential());
        return;
      }
      // positive-stable frailty via Kanter's representation
      const double alpha = 1.0 / theta;
      const double t = std::numbers::pi * rng.uniform();
      const double wexp = rng.exponential();
      const double log_a = (alpha * std::log(std::sin(alpha * t)) +
                            (1.0 - alpha) * std::log(std::sin((1.0 - alpha) * t)) -
                            std::log(std::sin(t))) /
                           (1.0 - alpha);
      const double frailty = std::exp(((1.0 - alpha) / alpha) * (log_a - std::log(wexp)));
      const double e1 = rng.exponential();
      const double e2 = rng.exponential();
      u = std::exp(-std::pow(e1 / frailty, alpha));
      v = std::exp(-std::pow(e2 / frailty, alpha));
      return;
    }
  }
  throw std::logic_error("copula_sample: bad enum");
}

double empirical_kendall_tau(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (y.size() != n || n < 2)
    throw std::invalid_argument("empirical_kendall_tau: need two equal-length series, n >= 2");
  std::vector<int> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    if (x[i] != x[j]) return x[i] < x[j];
    return y[i] < y[j];
  });
  std::vector<double> seq(n), tmp(n);
  for (std::size_t i = 0; i < n; ++i) seq[i] = y[order[i]];
  // merge sort, counting inversions
  std::uint64_t inversions = 0;
  for (std::size_t width = 1; width < n; width *= 2) {
    for (std::size_t lo = 0; lo < n; lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, n);
      const std::size_t hi = std::min(lo + 2 * width, n);
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (seq[i] <= seq[j]) {
          tmp[k++] = seq[i++];
        } else {
          inversions += mid - i;
          tmp[k++] = seq[j++];
        }
      }
      while (i < mid) tmp[k++] = seq[i++];
      while (j < hi) tmp[k++] = seq[j++];
    }
    std::swap(seq, tmp);
  }
  const double nn = static_cast<double>(n) * (static_cast<double>(n) - 1.0);
  return 1.0 - 4.0 * static_cast<double>(inversions) / nn;
}

}  // namespace cpb
