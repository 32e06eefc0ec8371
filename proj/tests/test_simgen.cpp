#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "copulaboost/copulas.hpp"
#include "copulaboost/marginals.hpp"
#include "copulaboost/simgen.hpp"
#include "doctest.h"

using namespace cpb;

TEST_CASE("scenario names round-trip and bad names are rejected") {
  for (const Scenario s : {Scenario::Toy, Scenario::A, Scenario::B, Scenario::C})
    CHECK(scenario_from_string(scenario_name(s)) == s);
  CHECK_THROWS_AS((void)scenario_from_string("D"), std::invalid_argument);
  CHECK_THROWS_AS((void)scenario_from_string(""), std::invalid_argument);
}

TEST_CASE("predictor formulas at hand-computed points") {
  Eigen::RowVectorXd x = Eigen::RowVectorXd::Zero(20);

  auto toy = scenario_eta(Scenario::Toy, x);
  CHECK(toy[kMu1] == 0.0);
  CHECK(toy[kSigma1] == -0.7);
  CHECK(toy[kMu2] == -0.5);
  CHECK(toy[kSigma2] == 2.0);
  CHECK(toy[kRho] == 1.0);

  x[0] = 0.5;
  x[1] = -0.4;
  x[2] = 0.25;
  x[3] = 1.0;
  toy = scenario_eta(Scenario::Toy, x);
  CHECK(toy[kMu1] == doctest::Approx(-0.5 + 0.125).epsilon(1e-14));
  CHECK(toy[kSigma1] == doctest::Approx(-0.7 - 0.175).epsilon(1e-14));
  CHECK(toy[kMu2] == doctest::Approx(-0.5 - 0.35 + 0.12).epsilon(1e-14));
  CHECK(toy[kSigma2] == doctest::Approx(2.0 - 0.2).epsilon(1e-14));
  CHECK(toy[kRho] == 2.0);

  const auto a = scenario_eta(Scenario::A, x);
  const double pi = std::numbers::pi;
  CHECK(a[kMu1] ==
        doctest::Approx(-0.375 + 0.5 * std::cos(pi * 0.25)).epsilon(1e-14));
  CHECK(a[kSigma1] ==
        doctest::Approx(-0.7 + 0.5 * std::sin(pi * 0.25)).epsilon(1e-14));
  CHECK(a[kMu2] ==
        doctest::Approx(0.5 - 0.35 - 0.02 * std::exp(1.2)).epsilon(1e-14));
  CHECK(a[kSigma2] == doctest::Approx(1.8).epsilon(1e-14));
  CHECK(a[kRho] == doctest::Approx(-0.8 + 1.5 * std::log(4.5)).epsilon(1e-14));

  // unit vectors read off the block coefficients one at a time
  Eigen::RowVectorXd e = Eigen::RowVectorXd::Zero(50);
  const double expected[5][10] = {
      {0.5, 1.0, -0.5, -1.0, 1.0, 0.5, -0.5, 1.0, 0.5, 1.0},
      {0.5, 0.25, 0.25, 0.25, 0.5, 0.25, -0.25, 0.5, -0.25, 0.5},
      {-1.0, 0.5, 0.5, -1.0, -0.5, -0.5, -1.0, -0.5, 0.5, -1.0},
      {-0.25, 0.25, 0.25, 0.25, -0.5, -0.25, 0.25, 0.25, -0.5, -0.5},
      {-0.5, -1.0, 0.5, 0.5, -0.5, -1.0, 0.5, 0.5, 1.0, -1.0}};
  for (int k = 0; k < kNumParams; ++k)
    for (int j = 0; j < 10; ++j) {
      e.setZero();
      e[10 * k + j] = 1.0;
      const auto c = scenario_eta(Scenario::C, e);
      for (int kk = 0; kk < kNumParams; ++kk)
        CHECK(c[kk] == (kk == k ? expected[k][j] : 0.0));
    }
}

TEST_CASE("the constant-scale variant differs from its parent only in sigma1") {
  RngStream rng(5);
  for (int rep = 0; rep < 200; ++rep) {
    Eigen::RowVectorXd x(20);
    for (int j = 0; j < 20; ++j) x[j] = 2.0 * rng.uniform() - 1.0;
    const auto a = scenario_eta(Scenario::A, x);
    const auto b = scenario_eta(Scenario::B, x);
    CHECK(b[kSigma1] == -0.7);
    for (const int k : {kMu1, kMu2, kSigma2, kRho}) CHECK(a[k] == b[k]);
  }
}

TEST_CASE("truth tables match which covariates move each predictor") {
  RngStream rng(11);
  for (const Scenario s : {Scenario::Toy, Scenario::A, Scenario::B, Scenario::C}) {
    const int p = scenario_default_p(s);
    const auto truth = scenario_truth(s);
    Eigen::RowVectorXd x(p);
    for (int j = 0; j < p; ++j) x[j] = 2.0 * rng.uniform() - 1.0;
    const auto base = scenario_eta(s, x);
    for (int j = 0; j < p; ++j) {
      Eigen::RowVectorXd xp = x;
      xp[j] += 0.3;
      const auto moved = scenario_eta(s, xp);
      for (int k = 0; k < kNumParams; ++k) {
        const bool informative =
            std::find(truth[k].begin(), truth[k].end(), j) != truth[k].end();
        CHECK((std::abs(moved[k] - base[k]) > 1e-12) == informative);
      }
    }
  }
}

TEST_CASE("scenario defaults") {
  CHECK(scenario_default_p(Scenario::Toy) == 20);
  CHECK(scenario_default_p(Scenario::A) == 20);
  CHECK(scenario_default_p(Scenario::B) == 20);
  CHECK(scenario_default_p(Scenario::C) == 50);
  CHECK(scenario_margin1(Scenario::A) == Margin::LogNormal);
  CHECK(scenario_margin2(Scenario::A) == Margin::LogLogistic);
  CHECK(scenario_margin1(Scenario::C) == Margin::Gaussian);
  CHECK(scenario_margin2(Scenario::C) == Margin::Gaussian);
  CHECK(scenario_learner_kind(Scenario::Toy) == LearnerKind::Linear);
  CHECK(scenario_learner_kind(Scenario::A) == LearnerKind::PSpline);
  CHECK(scenario_learner_kind(Scenario::B) == LearnerKind::PSpline);
  CHECK(scenario_learner_kind(Scenario::C) == LearnerKind::Linear);
  CHECK(scenario_truth(Scenario::B)[kSigma1].empty());
  CHECK(scenario_truth(Scenario::C)[kRho] ==
        std::vector<int>{40, 41, 42, 43, 44, 45, 46, 47, 48, 49});
}

TEST_CASE("generated splits have the right shape and are reproducible") {
  ScenarioSpec s;
  s.tag = Scenario::Toy;
  s.copula = Copula::Clayton;
  s.n_train = 60;
  s.n_val = 40;
  s.n_test = 30;
  s.seed = 123;
  const ScenarioData d = gen_scenario(s);
  CHECK(d.train.n() == 60);
  CHECK(d.val.n() == 40);
  CHECK(d.test.n() == 30);
  CHECK(d.train.p() == 20);
  CHECK(d.train.names.front() == "x1");
  CHECK(d.train.names.back() == "x20");
  CHECK(d.truth == scenario_truth(Scenario::Toy));
  CHECK(d.train.X.minCoeff() > -1.0);
  CHECK(d.train.X.maxCoeff() < 1.0);
  CHECK(d.train.y1.minCoeff() > 0.0);  // log-normal outcome
  CHECK(d.train.y2.minCoeff() > 0.0);  // log-logistic outcome

  const ScenarioData same = gen_scenario(s);
  CHECK((same.train.X - d.train.X).cwiseAbs().maxCoeff() == 0.0);
  CHECK((same.val.y1 - d.val.y1).cwiseAbs().maxCoeff() == 0.0);
  CHECK((same.test.y2 - d.test.y2).cwiseAbs().maxCoeff() == 0.0);

  s.seed = 124;
  const ScenarioData other = gen_scenario(s);
  CHECK((other.train.X - d.train.X).cwiseAbs().maxCoeff() > 0.0);
  // the three splits come from distinct streams
  CHECK(d.train.X.topRows(30) != d.test.X);

  s.p = 25;
  CHECK(gen_scenario(s).train.p() == 25);
  s.p = 3;
  CHECK_THROWS_AS((void)gen_scenario(s), std::invalid_argument);
  s.p = -1;
  s.n_train = 0;
  CHECK_THROWS_AS((void)gen_scenario(s), std::invalid_argument);
}

TEST_CASE("responses follow the generating distributions") {
  ScenarioSpec s;
  s.tag = Scenario::Toy;
  s.copula = Copula::Gaussian;
  s.n_train = 20000;
  s.n_val = 1;
  s.n_test = 1;
  s.seed = 99;
  const ScenarioData d = gen_scenario(s);
  const int n = d.train.n();
  const Margin m1 = scenario_margin1(s.tag);
  const Margin m2 = scenario_margin2(s.tag);

  // probability transforms at the generating parameters are uniform
  double su = 0.0, sv = 0.0, squ = 0.0, sqv = 0.0;
  std::vector<double> us(n), vs(n);
  for (int i = 0; i < n; ++i) {
    const auto eta = scenario_eta(s.tag, d.train.X.row(i));
    us[i] = margin_cdf(m1, d.train.y1[i],
                       margin_params_from_eta(m1, eta[kMu1], eta[kSigma1]));
    vs[i] = margin_cdf(m2, d.train.y2[i],
                       margin_params_from_eta(m2, eta[kMu2], eta[kSigma2]));
    su += us[i];
    sv += vs[i];
    squ += us[i] * us[i];
    sqv += vs[i] * vs[i];
  }
  su /= n;
  sv /= n;
  CHECK(std::abs(su - 0.5) < 3.0 / std::sqrt(12.0 * n));
  CHECK(std::abs(sv - 0.5) < 3.0 / std::sqrt(12.0 * n));
  CHECK(std::abs(squ / n - su * su - 1.0 / 12.0) < 0.003);
  CHECK(std::abs(sqv / n - sv * sv - 1.0 / 12.0) < 0.003);

  // dependence strength on a thin slice of the driving covariate
  std::vector<double> bu, bv;
  for (int i = 0; i < n; ++i)
    if (std::abs(d.train.X(i, 3)) < 0.05) {
      bu.push_back(us[i]);
      bv.push_back(vs[i]);
    }
  REQUIRE(bu.size() > 200);
  const double tau_true =
      copula_kendall_tau(s.copula, copula_theta_from_eta(s.copula, 1.0));
  CHECK(std::abs(empirical_kendall_tau(bu, bv) - tau_true) < 0.08);

  // covariate moments
  CHECK(std::abs(d.train.X.mean()) < 0.01);
  CHECK(std::abs(d.train.X.array().square().mean() - 1.0 / 3.0) < 0.01);
}

TEST_CASE("candidate menus match the scenario") {
  ScenarioSpec s;
  s.tag = Scenario::A;
  s.copula = Copula::Gumbel;
  const ModelSpec spec = scenario_model(s, 0.01, 2500);
  CHECK(spec.margin1 == Margin::LogNormal);
  CHECK(spec.margin2 == Margin::LogLogistic);
  CHECK(spec.copula == Copula::Gumbel);
  CHECK(spec.nu == 0.01);
  CHECK(spec.m_max == 2500);
  for (int k = 0; k < kNumParams; ++k) {
    REQUIRE(spec.menus[k].size() == 20);
    for (const auto& ls : spec.menus[k]) CHECK(ls.kind == LearnerKind::PSpline);
    CHECK(spec.menus[k][7].covariate == 7);
  }
  s.tag = Scenario::C;
  const ModelSpec mc = scenario_model(s, 0.01, 2500);
  CHECK(mc.menus[0].size() == 50);
  CHECK(mc.menus[0][0].kind == LearnerKind::Linear);
}

TEST_CASE("true and false positive bookkeeping") {
  std::array<std::set<int>, kNumParams> sel;
  sel[kMu1] = {0, 2, 5};
  sel[kSigma1] = {2};
  sel[kMu2] = {};
  sel[kSigma2] = {1, 7, 9};
  sel[kRho] = {3, 4};
  const auto truth = scenario_truth(Scenario::Toy);
  const TpFp c = tp_fp_counts(sel, truth);
  CHECK(c.tp[kMu1] == 2);
  CHECK(c.fp[kMu1] == 1);
  CHECK(c.tp[kSigma1] == 1);
  CHECK(c.fp[kSigma1] == 0);
  CHECK(c.tp[kMu2] == 0);
  CHECK(c.fp[kMu2] == 0);
  CHECK(c.tp[kSigma2] == 1);
  CHECK(c.fp[kSigma2] == 2);
  CHECK(c.tp[kRho] == 1);
  CHECK(c.fp[kRho] == 1);
  CHECK(c.total_tp() == 5);
  CHECK(c.total_fp() == 4);
}
