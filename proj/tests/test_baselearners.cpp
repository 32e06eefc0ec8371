#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/QR>
#include <cmath>

#include "copulaboost/baselearners.hpp"
#include "copulaboost/rng.hpp"

using namespace cpb;

namespace {

Eigen::VectorXd random_uniform(RngStream& rng, int n, double lo, double hi) {
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = lo + (hi - lo) * rng.uniform();
  return x;
}

LearnerSpec pspline_spec(int covariate = 0) {
  LearnerSpec s;
  s.kind = LearnerKind::PSpline;
  s.covariate = covariate;
  return s;
}

}  // namespace

TEST_CASE("p-spline basis: dimension, locality, partition of unity") {
  RngStream rng(5);
  const Eigen::VectorXd x = random_uniform(rng, 400, -1.0, 1.0);
  BoundLearner bl(pspline_spec(), x, "x0", false);
  CHECK(bl.n_basis() == 24);  // 20 inner knots + degree 3 + 1
  const Eigen::MatrixXd& B = bl.B();
  for (int i = 0; i < B.rows(); ++i) {
    CHECK(B.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
    int nonzero = 0;
    for (int j = 0; j < B.cols(); ++j)
      if (B(i, j) != 0.0) ++nonzero;
    CHECK(nonzero <= 4);
    for (int j = 0; j < B.cols(); ++j) CHECK(B(i, j) >= -1e-12);
  }
}

TEST_CASE("difference penalty matches a direct construction and annihilates linears") {
  // order-2 penalty on q=5 basis functions, explicit D
  Eigen::MatrixXd D(3, 5);
  D << 1, -2, 1, 0, 0, 0, 1, -2, 1, 0, 0, 0, 1, -2, 1;
  const Eigen::MatrixXd K = difference_penalty(5, 2);
  CHECK((K - D.transpose() * D).cwiseAbs().maxCoeff() < 1e-14);

  const Eigen::MatrixXd K24 = difference_penalty(24, 2);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(24);
  Eigen::VectorXd lin(24);
  for (int i = 0; i < 24; ++i) lin[i] = i;
  CHECK((K24 * ones).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((K24 * lin).cwiseAbs().maxCoeff() < 1e-12);
  // null space is exactly two-dimensional: quadratic is not annihilated
  Eigen::VectorXd quad(24);
  for (int i = 0; i < 24; ++i) quad[i] = i * i;
  CHECK((K24 * quad).cwiseAbs().maxCoeff() > 1.0);
}

TEST_CASE("lambda_for_df hits the requested effective dimension") {
  RngStream rng(17);
  const Eigen::VectorXd x = random_uniform(rng, 500, -1.0, 1.0);
  LearnerDesign d;
  d.spec = pspline_spec();
  d.n_basis = 24;
  const int intervals = d.spec.inner_knots + 1;
  d.knot_step = (x.maxCoeff() - x.minCoeff()) / intervals;
  d.knot_lo = x.minCoeff() - d.spec.degree * d.knot_step;
  const Eigen::MatrixXd B = learner_design_matrix(d, x);
  const Eigen::MatrixXd BtB = B.transpose() * B;
  const Eigen::MatrixXd K = difference_penalty(24, 2);

  for (double df : {3.0, 4.0, 8.0}) {
    const double lambda = lambda_for_df(BtB, K, df);
    // independent trace oracle: direct dense solve
    const double trace = (BtB + lambda * K).ldlt().solve(BtB).trace();
    CHECK(trace == doctest::Approx(df).epsilon(1e-6));
  }
  // df equal to the basis size forces lambda to the lower boundary
  const double l0 = lambda_for_df(BtB, K, 24.0);
  CHECK(l0 <= 1e-11);
  // effective dimension decreases in lambda down to the penalty null space (2)
  double prev = 1e9;
  for (double lambda : {1e-4, 1e-2, 1.0, 1e2, 1e9}) {
    const double trace = (BtB + lambda * K).ldlt().solve(BtB).trace();
    CHECK(trace < prev);
    prev = trace;
  }
  CHECK(prev == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("the bound p-spline uses the df-calibrated penalty") {
  RngStream rng(19);
  const Eigen::VectorXd x = random_uniform(rng, 500, -1.0, 1.0);
  BoundLearner bl(pspline_spec(), x, "x0", false);
  CHECK(bl.hat_trace() == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(bl.design().lambda > 0.0);
}

TEST_CASE("intercept and linear learners perform exact least squares") {
  RngStream rng(29);
  const int n = 200;
  const Eigen::VectorXd x = random_uniform(rng, n, -1.0, 1.0);

  LearnerSpec ispec;  // intercept
  BoundLearner intercept(ispec, x, "intercept", false);
  Eigen::VectorXd g(n);
  for (int i = 0; i < n; ++i) g[i] = rng.normal();
  const Eigen::VectorXd bi = intercept.fit(g);
  CHECK(bi.size() == 1);
  CHECK(bi[0] == doctest::Approx(g.mean()).epsilon(1e-12));

  LearnerSpec lspec;
  lspec.kind = LearnerKind::Linear;
  lspec.covariate = 0;
  BoundLearner linear(lspec, x, "x0", false);
  // exact linear target through the centered column is recovered with rss 0
  const Eigen::VectorXd target = 2.5 * (x.array() - x.mean()).matrix();
  const Eigen::VectorXd bl = linear.fit(target);
  CHECK(bl[0] == doctest::Approx(2.5).epsilon(1e-12));
  const Eigen::VectorXd fitted = linear.predict(bl, x);
  CHECK((fitted - target).cwiseAbs().maxCoeff() < 1e-10);
  // prediction at the training mean is zero
  Eigen::VectorXd at_mean(1);
  at_mean[0] = x.mean();
  CHECK(linear.predict(bl, at_mean)[0] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("penalized p-spline fit against an augmented-QR oracle") {
  RngStream rng(31);
  const int n = 500;
  const Eigen::VectorXd x = random_uniform(rng, n, -1.0, 1.0);
  BoundLearner bl(pspline_spec(), x, "x0", false);
  Eigen::VectorXd g(n);
  for (int i = 0; i < n; ++i) g[i] = std::sin(3.0 * x[i]) + 0.3 * rng.normal();

  const Eigen::VectorXd beta = bl.fit(g);

  // oracle: augmented least squares [B; sqrt(lambda) D] beta = [g; 0] via QR
  const int q = bl.n_basis();
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(q - 2, q);
  for (int i = 0; i < q - 2; ++i) {
    D(i, i) = 1.0;
    D(i, i + 1) = -2.0;
    D(i, i + 2) = 1.0;
  }
  Eigen::MatrixXd aug(n + q - 2, q);
  aug.topRows(n) = bl.B();
  aug.bottomRows(q - 2) = std::sqrt(bl.design().lambda) * D;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + q - 2);
  rhs.head(n) = g;
  const Eigen::VectorXd oracle = aug.colPivHouseholderQr().solve(rhs);
  CHECK((beta - oracle).cwiseAbs().maxCoeff() < 1e-8);

  // rss from the cached quadratic form equals the direct residual norm
  const double gtg = g.squaredNorm();
  const double rss = bl.rss(beta, bl.B().transpose() * g, gtg);
  CHECK(rss == doctest::Approx((g - bl.B() * beta).squaredNorm()).epsilon(1e-9));
  // and the fit never beats the raw gradient norm
  CHECK(rss <= gtg);
}

TEST_CASE("p-spline reproduces constants exactly") {
  RngStream rng(41);
  const Eigen::VectorXd x = random_uniform(rng, 300, -1.0, 1.0);
  BoundLearner bl(pspline_spec(), x, "x0", false);
  const Eigen::VectorXd g = Eigen::VectorXd::Constant(300, 1.7);
  const Eigen::VectorXd beta = bl.fit(g);
  CHECK((bl.B() * beta - g).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("prediction is continuous across and slightly beyond the knot range") {
  RngStream rng(43);
  const Eigen::VectorXd x = random_uniform(rng, 300, -1.0, 1.0);
  BoundLearner bl(pspline_spec(), x, "x0", false);
  Eigen::VectorXd g(300);
  for (int i = 0; i < 300; ++i) g[i] = std::cos(2.0 * x[i]);
  const Eigen::VectorXd beta = bl.fit(g);

  const double b = x.maxCoeff();
  Eigen::VectorXd probe(3);
  probe << b - 1e-9, b, b + 1e-9;
  const Eigen::VectorXd vals = bl.predict(beta, probe);
  CHECK(vals[0] == doctest::Approx(vals[1]).epsilon(1e-6));
  CHECK(vals[2] == doctest::Approx(vals[1]).epsilon(1e-6));
  // in-sample prediction re-evaluates to the cached design product
  const Eigen::VectorXd fitted = bl.predict(beta, x);
  CHECK((fitted - bl.B() * beta).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("degenerate covariate columns are rejected") {
  const Eigen::VectorXd constant = Eigen::VectorXd::Constant(100, 0.3);
  LearnerSpec lspec;
  lspec.kind = LearnerKind::Linear;
  CHECK_THROWS_AS(BoundLearner(lspec, constant, "x0", false), std::invalid_argument);
  CHECK_THROWS_AS(BoundLearner(pspline_spec(), constant, "x0", false), std::invalid_argument);
}

TEST_CASE("identical inputs give bit-identical fits") {
  RngStream rng(47);
  const Eigen::VectorXd x = random_uniform(rng, 400, -1.0, 1.0);
  Eigen::VectorXd g(400);
  for (int i = 0; i < 400; ++i) g[i] = rng.normal();
  BoundLearner a(pspline_spec(), x, "x0", false);
  BoundLearner b(pspline_spec(), x, "x0", false);
  CHECK(a.design().lambda == b.design().lambda);
  const Eigen::VectorXd ba = a.fit(g), bb = b.fit(g);
  for (int i = 0; i < ba.size(); ++i) CHECK(ba[i] == bb[i]);
}
