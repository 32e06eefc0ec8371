#include "copulaboost/baselearners.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace cpb {

namespace {

// Cubic B-spline design on equidistant knots.  The full knot vector is
// t_j = knot_lo + j * knot_step with enough exterior knots that
// inner_knots + degree + 1 basis functions live on the data range; outside
// the range the polynomial piece of the boundary interval extends, so
// prediction degrades gracefully just beyond the training span.
void bspline_row(const LearnerDesign& d, double x, int* first, double* vals) {
  const int degree = d.spec.degree;
  const int intervals = d.spec.inner_knots + 1;
  // span index into the full knot vector; U[m] = knot_lo + m * knot_step,
  // data range covers spans degree .. degree + intervals - 1
  int k = degree + static_cast<int>(std::floor((x - (d.knot_lo + degree * d.knot_step)) /
                                               d.knot_step));
  k = std::max(degree, std::min(k, degree + intervals - 1));

  double left[8], right[8], n[8];
  n[0] = 1.0;
  auto knot = [&](int m) { return d.knot_lo + m * d.knot_step; };
  for (int j = 1; j <= degree; ++j) {
    left[j] = x - knot(k + 1 - j);
    right[j] = knot(k + j) - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = n[r] / (right[r + 1] + left[j - r]);
      n[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    n[j] = saved;
  }
  *first = k - degree;
  for (int i = 0; i <= degree; ++i) vals[i] = n[i];
}

}  // namespace

Eigen::MatrixXd learner_design_matrix(const LearnerDesign& d, const Eigen::VectorXd& x) {
  const int n = static_cast<int>(x.size());
  switch (d.spec.kind) {
    case LearnerKind::Intercept:
      return Eigen::MatrixXd::Ones(n, 1);
    case LearnerKind::Linear: {
      Eigen::MatrixXd B(n, 1);
      B.col(0) = x.array() - d.center;
      return B;
    }
    case LearnerKind::PSpline: {
      Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, d.n_basis);
      int first = 0;
      double vals[8];
      for (int i = 0; i < n; ++i) {
        bspline_row(d, x[i], &first, vals);
        for (int j = 0; j <= d.spec.degree; ++j) B(i, first + j) = vals[j];
      }
      return B;
    }
  }
  throw std::logic_error("learner_design_matrix: bad kind");
}

Eigen::MatrixXd difference_penalty(int q, int order) {
  if (order < 1 || order >= q)
    throw std::invalid_argument("difference_penalty: need 1 <= order < q");
  Eigen::MatrixXd D = Eigen::MatrixXd::Identity(q, q);
  for (int o = 0; o < order; ++o) {
    const int rows = static_cast<int>(D.rows());
    Eigen::MatrixXd Dn(rows - 1, q);
    for (int i = 0; i + 1 < rows; ++i) Dn.row(i) = D.row(i + 1) - D.row(i);
    D = std::move(Dn);
  }
  return D.transpose() * D;
}

double lambda_for_df(const Eigen::MatrixXd& BtB, const Eigen::MatrixXd& K, double df) {
  const int q = static_cast<int>(BtB.rows());
  // eigenvalues mu of L^-1 K L^-T (BtB = L L'); then
  // trace[(BtB + lambda K)^-1 BtB] = sum_i 1/(1 + lambda mu_i)
  Eigen::LLT<Eigen::MatrixXd> llt(BtB);
  bool fast = llt.info() == Eigen::Success;
  Eigen::VectorXd mu;
  if (fast) {
    const Eigen::MatrixXd A = llt.matrixL().solve(K);
    const Eigen::MatrixXd M = llt.matrixL().solve(A.transpose()).transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()));
    mu = es.eigenvalues().cwiseMax(0.0);
    if (!mu.allFinite()) fast = false;
  }
  auto trace_at = [&](double lambda) {
    if (fast) {
      double t = 0.0;
      for (int i = 0; i < q; ++i) t += 1.0 / (1.0 + lambda * mu[i]);
      return t;
    }
    return (BtB + lambda * K).ldlt().solve(BtB).trace();
  };

  double lo = -12.0, hi = 12.0;  // log10 lambda
  if (trace_at(std::pow(10.0, lo)) <= df) return std::pow(10.0, lo);
  if (trace_at(std::pow(10.0, hi)) >= df) return std::pow(10.0, hi);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double t = trace_at(std::pow(10.0, mid));
    if (std::abs(t - df) < 1e-6) return std::pow(10.0, mid);
    // trace decreases in lambda
    if (t > df)
      lo = mid;
    else
      hi = mid;
  }
  return std::pow(10.0, 0.5 * (lo + hi));
}

BoundLearner::BoundLearner(const LearnerSpec& spec, const Eigen::VectorXd& x, std::string name,
                           bool is_probe) {
  d_.spec = spec;
  d_.name = std::move(name);
  d_.is_probe = is_probe;
  switch (spec.kind) {
    case LearnerKind::Intercept:
      d_.n_basis = 1;
      break;
    case LearnerKind::Linear: {
      d_.center = x.mean();
      d_.n_basis = 1;
      const double sq = (x.array() - d_.center).square().sum();
      if (sq < 1e-12 * x.size())
        throw std::invalid_argument("base-learner '" + d_.name + "': covariate column is constant");
      break;
    }
    case LearnerKind::PSpline: {
      const double a = x.minCoeff(), b = x.maxCoeff();
      if (!(b - a > 1e-12))
        throw std::invalid_argument("base-learner '" + d_.name + "': covariate column is constant");
      const int intervals = spec.inner_knots + 1;
      d_.knot_step = (b - a) / intervals;
      d_.knot_lo = a - spec.degree * d_.knot_step;  // U[0]; data range starts at U[degree]
      d_.n_basis = spec.inner_knots + spec.degree + 1;
      break;
    }
  }
  finalize(x);
}

BoundLearner::BoundLearner(const LearnerDesign& frozen) : d_(frozen) {}

void BoundLearner::finalize(const Eigen::VectorXd& x) {
  B_ = learner_design_matrix(d_, x);
  BtB_ = B_.transpose() * B_;
  Eigen::MatrixXd penalized = BtB_;
  if (d_.spec.kind == LearnerKind::PSpline) {
    const Eigen::MatrixXd K = difference_penalty(d_.n_basis, d_.spec.penalty_order);
    d_.lambda = lambda_for_df(BtB_, K, d_.spec.df);
    penalized += d_.lambda * K;
  }
  solver_.compute(penalized);
  if (solver_.info() != Eigen::Success)
    throw std::runtime_error("base-learner '" + d_.name + "': design factorization failed");
}

Eigen::VectorXd BoundLearner::fit(const Eigen::VectorXd& g) const {
  if (B_.rows() == 0) throw std::logic_error("BoundLearner: fit() needs a data-bound learner");
  return solver_.solve(B_.transpose() * g);
}

Eigen::VectorXd BoundLearner::solve(const Eigen::VectorXd& Btg) const {
  if (B_.rows() == 0) throw std::logic_error("BoundLearner: solve() needs a data-bound learner");
  return solver_.solve(Btg);
}

double BoundLearner::rss(const Eigen::VectorXd& beta, const Eigen::VectorXd& Btg,
                         double gtg) const {
  return gtg - 2.0 * beta.dot(Btg) + beta.dot(BtB_ * beta);
}

Eigen::VectorXd BoundLearner::predict(const Eigen::VectorXd& beta,
                                      const Eigen::VectorXd& x) const {
  return learner_design_matrix(d_, x) * beta;
}

double BoundLearner::hat_trace() const {
  if (B_.rows() == 0) throw std::logic_error("BoundLearner: hat_trace() needs a data-bound learner");
  return solver_.solve(BtB_).trace();
}

}  // namespace cpb
