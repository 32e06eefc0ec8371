#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "copulaboost/dataset.hpp"
#include "copulaboost/model.hpp"

namespace cpb {

// n x 5 matrix of link-scale predictors, one column per distribution parameter
using EtaMatrix = Eigen::Matrix<double, Eigen::Dynamic, kNumParams>;

// Joint negative log-likelihood (sum over observations) of the copula model.
// Per-term log contributions are clamped to +-1e10; returns +inf if any term
// is non-finite after clamping.
double empirical_risk(const Dataset& d, const ModelSpec& spec, const EtaMatrix& eta);

// Negative risk gradients per predictor column (equivalently the score of the
// joint log-likelihood), n x 5.  Non-finite components are zeroed;
// *n_zeroed, if given, receives their count.  MAD stabilization divides each
// column by its median absolute deviation when requested in the spec.
Eigen::MatrixXd negative_gradients(const Dataset& d, const ModelSpec& spec,
                                   const EtaMatrix& eta, int* n_zeroed = nullptr);

// Constant predictor starts: joint-likelihood maximizer over the five
// constant predictors (cyclic Newton with halving), falling back to
// moment-based starts if the optimization does not improve on them.
std::array<double, kNumParams> moment_offsets(const Dataset& d, const ModelSpec& spec);
std::array<double, kNumParams> compute_offsets(const Dataset& d, const ModelSpec& spec);

// One committed boosting update.
struct SelectionEvent {
  int iteration = 0;  // 1-based
  int param = 0;      // ParamIndex
  int learner = 0;    // menu index (0 = intercept)
  double risk = 0.0;  // r[m] after the commit
  Eigen::VectorXd delta;  // committed coefficient increment (step length applied)
};

// Early-exit rules for specialized fits.
struct StopRule {
  enum class Kind { None, ProbeCommit, DistinctCount };
  Kind kind = Kind::None;
  int distinct_target = 0;  // DistinctCount: distinct non-intercept learners
};

struct BoostFit {
  ModelSpec spec;
  std::array<double, kNumParams> offsets{};
  // engine menus: entry 0 is the implicit intercept learner
  std::array<std::vector<LearnerDesign>, kNumParams> menu;
  // accumulated coefficients, aligned with menu
  std::array<std::vector<Eigen::VectorXd>, kNumParams> coef;
  std::vector<SelectionEvent> events;
  double risk_start = 0.0;          // r[0], offsets-only risk
  std::vector<double> risk_path;    // r[1..M] on the training sample
  std::optional<int> m_stop;        // tuned stopping iteration, when chosen
  bool aborted = false;             // stopped by a numerical failure
  std::string abort_reason;
  int gradient_components_zeroed = 0;

  int iterations() const { return static_cast<int>(events.size()); }
  double risk_at(int m) const;  // r[m], m in [0, iterations()]
  // distinct covariates with a non-intercept, non-probe commit by iteration m
  std::array<std::set<int>, kNumParams> selected_covariates(int m) const;
  // count of distinct (parameter, learner) pairs, intercepts excluded
  int distinct_learners(int m) const;
};

BoostFit fit_boost(const Dataset& train, const ModelSpec& spec, const StopRule& stop = {},
                   const std::optional<std::array<double, kNumParams>>& offsets = std::nullopt);

// Link-scale predictors / natural-scale parameters at iteration m.
// predict_params columns: mu1, sigma1, mu2, sigma2, theta.
EtaMatrix predict_eta(const BoostFit& fit, const Eigen::MatrixXd& X, int m);
Eigen::MatrixXd predict_params(const BoostFit& fit, const Eigen::MatrixXd& X, int m);

// Stopping-iteration search.
struct StoppingMode {
  enum class Kind { Validation, KFold };
  Kind kind = Kind::Validation;
  const Dataset* validation = nullptr;  // Validation: held-out sample
  int folds = 5;                        // KFold controls
  std::uint64_t seed = 0;
};
struct MstopResult {
  int m_stop = 0;
  std::vector<double> risk;  // holdout risk at m = 0..M (mean curve for k-fold)
};
MstopResult select_mstop(const BoostFit& fit, const Dataset& train, const StoppingMode& mode);

}  // namespace cpb
