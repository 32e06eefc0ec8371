#include "copulaboost/scoring.hpp"

#include <cmath>
#include <stdexcept>

#include "copulaboost/rng.hpp"

namespace cpb {

double neg_log_lik(const BoostFit& fit, const Dataset& d, int m) {
  return empirical_risk(d, fit.spec, predict_eta(fit, d.X, m));
}

PredictiveDraws sample_predictive(const BoostFit& fit, const Eigen::MatrixXd& X, int m,
                                  int s, std::uint64_t seed) {
  if (s < 1) throw std::invalid_argument("need at least one draw per row");
  const Eigen::MatrixXd params = predict_params(fit, X, m);
  const int n = static_cast<int>(X.rows());
  PredictiveDraws out;
  out.y1.resize(n, s);
  out.y2.resize(n, s);
  const RngStream root(seed);
  for (int i = 0; i < n; ++i) {
    // a derived stream per row: adding draws or rows never reshuffles others
    RngStream rng = root.derive(static_cast<std::uint64_t>(i));
    const MarginParams p1{params(i, 0), params(i, 1)};
    const MarginParams p2{params(i, 2), params(i, 3)};
    for (int k = 0; k < s; ++k) {
      double u, v;
      copula_sample(fit.spec.copula, params(i, 4), rng, u, v);
      out.y1(i, k) = margin_quantile(fit.spec.margin1, u, p1);
      out.y2(i, k) = margin_quantile(fit.spec.margin2, v, p2);
    }
  }
  return out;
}

double energy_score(const PredictiveDraws& draws, const Eigen::VectorXd& y1,
                    const Eigen::VectorXd& y2) {
  const int n = static_cast<int>(y1.size());
  const int s = static_cast<int>(draws.y1.cols());
  if (draws.y1.rows() != n || draws.y2.rows() != n || y2.size() != n)
    throw std::invalid_argument("draws and observations disagree in size");
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    double to_obs = 0.0;
    for (int k = 0; k < s; ++k)
      to_obs += std::hypot(draws.y1(i, k) - y1[i], draws.y2(i, k) - y2[i]);
    double spread = 0.0;
    for (int k = 0; k < s; ++k)
      for (int l = 0; l < s; ++l)
        spread += std::hypot(draws.y1(i, k) - draws.y1(i, l),
                             draws.y2(i, k) - draws.y2(i, l));
    total += to_obs / s - spread / (2.0 * static_cast<double>(s) * s);
  }
  return total / n;
}

}  // namespace cpb
