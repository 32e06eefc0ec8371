#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "copulaboost/boosting.hpp"

namespace cpb {

// Joint negative log-likelihood of the fitted model on a dataset, truncated
// at iteration m (sum over observations).
double neg_log_lik(const BoostFit& fit, const Dataset& d, int m);

// s joint predictive draws per row of X: copula sample at the fitted
// dependence parameter pushed through the fitted marginal quantiles.
struct PredictiveDraws {
  Eigen::MatrixXd y1;  // n x s
  Eigen::MatrixXd y2;  // n x s
};
PredictiveDraws sample_predictive(const BoostFit& fit, const Eigen::MatrixXd& X, int m, int s,
                                  std::uint64_t seed);

// Energy score against observed pairs, averaged over observations; the
// standard biased sample estimator
//   ES_i = (1/s) sum_k ||x_k - y_i|| - 1/(2 s^2) sum_k sum_l ||x_k - x_l||
// with the Euclidean norm on the raw response scale.
double energy_score(const PredictiveDraws& draws, const Eigen::VectorXd& y1,
                    const Eigen::VectorXd& y2);

}  // namespace cpb
