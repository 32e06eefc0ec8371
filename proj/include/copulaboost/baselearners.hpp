#pragma once

#include <Eigen/Dense>
#include <string>

namespace cpb {

enum class LearnerKind { Intercept, Linear, PSpline };

// Candidate base-learner description, independent of any data.
struct LearnerSpec {
  LearnerKind kind = LearnerKind::Intercept;
  int covariate = -1;  // column index into the covariate matrix; -1 = intercept
  // P-spline controls: cubic B-splines on equidistant knots with a
  // difference penalty, ridge weight chosen to hit the target df
  int inner_knots = 20;
  int degree = 3;
  int penalty_order = 2;
  double df = 4.0;
};

// Frozen design information needed to evaluate a fitted learner away from the
// training sample; serialized with the fit.
struct LearnerDesign {
  LearnerSpec spec;
  std::string name;  // display name, e.g. "x3"
  bool is_probe = false;
  double center = 0.0;                     // linear: training mean
  double knot_lo = 0.0, knot_step = 0.0;   // pspline: leftmost knot, spacing
  double lambda = 0.0;                     // pspline: penalty weight for df
  int n_basis = 1;
};

// Design matrix of the learner evaluated at x (size n x n_basis).
Eigen::MatrixXd learner_design_matrix(const LearnerDesign& d, const Eigen::VectorXd& x);

// Difference penalty K = D'D for q basis functions (order-th differences).
Eigen::MatrixXd difference_penalty(int q, int order);

// lambda such that trace[B (B'B + lambda K)^{-1} B'] = df, by bisection on
// log10 lambda in [-12, 12].
double lambda_for_df(const Eigen::MatrixXd& BtB, const Eigen::MatrixXd& K, double df);

// A base-learner bound to its training column: cached design products and
// factorization, ready for repeated penalized least-squares fits against
// gradient vectors.  Throws std::invalid_argument for degenerate (constant)
// covariate columns.
class BoundLearner {
 public:
  BoundLearner(const LearnerSpec& spec, const Eigen::VectorXd& x, std::string name,
               bool is_probe);
  explicit BoundLearner(const LearnerDesign& frozen);  // rebuild from a saved design

  const LearnerDesign& design() const { return d_; }
  int n_basis() const { return d_.n_basis; }
  const Eigen::MatrixXd& B() const { return B_; }
  const Eigen::MatrixXd& BtB() const { return BtB_; }

  // penalized LS coefficients against gradient g
  Eigen::VectorXd fit(const Eigen::VectorXd& g) const;
  Eigen::VectorXd solve(const Eigen::VectorXd& Btg) const;  // from precomputed B'g
  // residual sum of squares of the fit, given g'g
  double rss(const Eigen::VectorXd& beta, const Eigen::VectorXd& Btg, double gtg) const;

  Eigen::VectorXd predict(const Eigen::VectorXd& beta, const Eigen::VectorXd& x) const;
  double hat_trace() const;

 private:
  void finalize(const Eigen::VectorXd& x);  // build B_, BtB_, factorization

  LearnerDesign d_;
  Eigen::MatrixXd B_, BtB_;
  Eigen::LDLT<Eigen::MatrixXd> solver_;
};

}  // namespace cpb
