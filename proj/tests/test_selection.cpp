#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "copulaboost/boosting.hpp"
#include "copulaboost/rng.hpp"
#include "copulaboost/selection.hpp"
#include "doctest.h"

using namespace cpb;

namespace {

Eigen::RowVectorXd truth_eta(const Eigen::RowVectorXd& x) {
  Eigen::RowVectorXd eta(kNumParams);
  eta[kMu1] = 0.3 - 0.8 * x[0];
  eta[kSigma1] = -0.5 + 0.4 * x[1];
  eta[kMu2] = 0.2 + 0.6 * x[0];
  eta[kSigma2] = -0.3 - 0.5 * x[2];
  eta[kRho] = 0.4 + 0.9 * x[3];
  return eta;
}

Dataset gen_data(int n, int p, Margin m1, Margin m2, Copula cop, std::uint64_t seed) {
  RngStream rng(seed);
  Dataset d;
  d.X.resize(n, p);
  d.y1.resize(n);
  d.y2.resize(n);
  for (int j = 0; j < p; ++j) d.names.push_back("x" + std::to_string(j + 1));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) d.X(i, j) = 2.0 * rng.uniform() - 1.0;
    const Eigen::RowVectorXd eta = truth_eta(d.X.row(i));
    double u, v;
    copula_sample(cop, copula_theta_from_eta(cop, eta[kRho]), rng, u, v);
    d.y1[i] = margin_quantile(m1, u, margin_params_from_eta(m1, eta[kMu1], eta[kSigma1]));
    d.y2[i] = margin_quantile(m2, v, margin_params_from_eta(m2, eta[kMu2], eta[kSigma2]));
  }
  return d;
}

Dataset gen_noise(int n, int p, std::uint64_t seed) {
  RngStream rng(seed);
  Dataset d;
  d.X.resize(n, p);
  d.y1.resize(n);
  d.y2.resize(n);
  for (int j = 0; j < p; ++j) d.names.push_back("x" + std::to_string(j + 1));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) d.X(i, j) = 2.0 * rng.uniform() - 1.0;
    d.y1[i] = rng.normal();
    d.y2[i] = rng.normal();
  }
  return d;
}

ModelSpec make_spec(Margin m1, Margin m2, Copula cop, int p, double nu, int m_max) {
  ModelSpec spec;
  spec.margin1 = m1;
  spec.margin2 = m2;
  spec.copula = cop;
  spec.nu = nu;
  spec.m_max = m_max;
  set_all_menus(spec, covariate_menu(LearnerKind::Linear, p));
  return spec;
}

}  // namespace

TEST_CASE("the error bound links its two knobs exactly") {
  const PferResult a = pfer_solve(20, 100, std::nullopt, 5.0);
  CHECK(a.pi_thr == 0.9);
  CHECK(a.pfer == 5.0);
  const PferResult b = pfer_solve(20, 100, 0.9, std::nullopt);
  CHECK(b.pfer == 5.0);
  // generic roundtrip
  for (const double pi : {0.6, 0.75, 0.92, 1.0}) {
    const PferResult f = pfer_solve(7, 60, pi, std::nullopt);
    const PferResult g = pfer_solve(7, 60, std::nullopt, f.pfer);
    CHECK(std::abs(g.pi_thr - pi) < 1e-14);
  }
  CHECK_THROWS_AS((void)pfer_solve(20, 100, 0.9, 5.0), std::invalid_argument);
  CHECK_THROWS_AS((void)pfer_solve(20, 100, std::nullopt, std::nullopt),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)pfer_solve(20, 100, 0.5, std::nullopt), std::invalid_argument);
  CHECK_THROWS_AS((void)pfer_solve(20, 100, std::nullopt, 1.0),
                  std::invalid_argument);  // needs pfer >= q^2/p = 4
  CHECK_THROWS_AS((void)pfer_solve(101, 100, 0.9, std::nullopt), std::invalid_argument);
  CHECK_THROWS_AS((void)pfer_solve(0, 100, 0.9, std::nullopt), std::invalid_argument);
  // boundary: the tightest reachable pfer maps to pi_thr = 1
  const PferResult edge = pfer_solve(10, 50, std::nullopt, 2.0);
  CHECK(edge.pi_thr == 1.0);
}

TEST_CASE("probing appends permuted shadows and never keeps one") {
  const int n = 400, p = 4;
  const Dataset d = gen_data(n, p, Margin::LogNormal, Margin::LogLogistic,
                             Copula::Gaussian, 7);
  ModelSpec spec = make_spec(Margin::LogNormal, Margin::LogLogistic, Copula::Gaussian, p,
                             0.1, 500);
  const ProbingResult res = probing_fit(d, spec, 99);

  REQUIRE(res.augmented.p() == 2 * p);
  for (int j = 0; j < p; ++j) {
    CHECK(res.augmented.names[p + j] == d.names[j] + "__probe");
    // a permutation preserves the multiset of values but breaks the pairing
    Eigen::VectorXd orig = d.X.col(j);
    Eigen::VectorXd shadow = res.augmented.X.col(p + j);
    std::sort(orig.data(), orig.data() + n);
    std::sort(shadow.data(), shadow.data() + n);
    CHECK((orig - shadow).cwiseAbs().maxCoeff() == 0.0);
    CHECK((res.augmented.X.col(p + j) - d.X.col(j)).cwiseAbs().maxCoeff() > 0.0);
  }
  // all probe coefficients are exactly zero and no probe shows up as selected
  const auto sel = res.fit.selected_covariates(res.fit.iterations());
  for (int k = 0; k < kNumParams; ++k) {
    REQUIRE(res.fit.menu[k].size() == 2 * p + 1);
    for (std::size_t j = 1; j < res.fit.menu[k].size(); ++j) {
      if (!res.fit.menu[k][j].is_probe) continue;
      CHECK(res.fit.coef[k][j].cwiseAbs().maxCoeff() == 0.0);
    }
    for (int cov : sel[k]) CHECK(cov < p);
  }
  // informative signal keeps fitting going for a while before a probe wins
  REQUIRE(res.probe_iteration.has_value());
  CHECK(*res.probe_iteration == res.fit.iterations() + 1);
  CHECK(res.fit.iterations() > 10);

  // identical seeds reproduce the run; different seeds permute differently
  const ProbingResult again = probing_fit(d, spec, 99);
  CHECK(again.fit.iterations() == res.fit.iterations());
  CHECK(again.fit.risk_path == res.fit.risk_path);
  const ProbingResult other = probing_fit(d, spec, 100);
  CHECK((other.augmented.X.col(p) - res.augmented.X.col(p)).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("probing on pure noise stops almost immediately") {
  std::vector<int> sizes;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Dataset d = gen_noise(200, 6, seed * 17);
    ModelSpec spec = make_spec(Margin::Gaussian, Margin::Gaussian, Copula::Gaussian, 6,
                               0.1, 400);
    const ProbingResult res = probing_fit(d, spec, seed);
    int selected = 0;
    const auto sel = res.fit.selected_covariates(res.fit.iterations());
    for (const auto& s : sel) selected += static_cast<int>(s.size());
    sizes.push_back(selected);
    CHECK(res.fit.iterations() < 400);  // a probe won before the cap
  }
  std::sort(sizes.begin(), sizes.end());
  CHECK(sizes[2] <= 2);  // median across seeds stays tiny
}

TEST_CASE("stability selection finds the strong effects and respects its threshold") {
  const int n = 300, p = 6;
  const Dataset d = gen_data(n, p, Margin::LogNormal, Margin::LogLogistic,
                             Copula::Gaussian, 55);
  ModelSpec spec = make_spec(Margin::LogNormal, Margin::LogLogistic, Copula::Gaussian, p,
                             0.1, 300);
  StabselParams par;
  par.q = 4;
  par.pi_thr = 0.8;
  par.B = 20;
  par.seed = 5;
  Dataset val = gen_data(500, p, Margin::LogNormal, Margin::LogLogistic,
                         Copula::Gaussian, 56);
  StoppingMode mode;
  mode.validation = &val;
  const StabselResult res = stability_select(d, spec, par, mode);

  CHECK(res.total_learners == kNumParams * p);
  CHECK(res.pi_thr == 0.8);
  CHECK(res.pfer == doctest::Approx(16.0 / (0.6 * 30)).epsilon(1e-12));
  for (int k = 0; k < kNumParams; ++k) {
    REQUIRE(res.frequency[k].size() == p + 1);
    CHECK(res.frequency[k][0] == 0.0);
    for (std::size_t j = 1; j <= p; ++j) {
      CHECK(res.frequency[k][j] >= 0.0);
      CHECK(res.frequency[k][j] <= 1.0);
      CHECK(static_cast<bool>(res.stable[k][j]) == (res.frequency[k][j] >= 0.8));
    }
  }
  // the dominant mean effect is found essentially always
  CHECK(res.frequency[kMu1][1] >= 0.8);
  // the final fit only ever commits stable covariates
  const auto sel = res.final_fit.selected_covariates(res.final_fit.iterations());
  for (int k = 0; k < kNumParams; ++k)
    for (int cov : sel[k]) CHECK(res.stable[k][cov + 1] == 1);
  CHECK(res.m_stop >= 0);
  CHECK(res.m_stop <= 2 * spec.m_max);
  CHECK(res.final_fit.m_stop.has_value());

  // deterministic, and indifferent to the worker count
  StabselParams par2 = par;
  par2.threads = 3;
  const StabselResult other = stability_select(d, spec, par2, mode);
  for (int k = 0; k < kNumParams; ++k) CHECK(other.frequency[k] == res.frequency[k]);
  CHECK(other.m_stop == res.m_stop);
}

TEST_CASE("risk attribution telescopes to the total improvement") {
  const Dataset d = gen_data(250, 5, Margin::LogNormal, Margin::Gamma, Copula::Clayton,
                             71);
  ModelSpec spec = make_spec(Margin::LogNormal, Margin::Gamma, Copula::Clayton, 5, 0.1,
                             200);
  const BoostFit fit = fit_boost(d, spec);
  REQUIRE(fit.iterations() == 200);
  for (const int m : {200, 117, 1, 0}) {
    const auto attr = risk_attribution(fit, m);
    double sum = 0.0;
    for (const auto& a : attr)
      for (double r : a) sum += r;
    CHECK(std::abs(sum - (fit.risk_at(0) - fit.risk_at(m))) <= 1e-10);
  }
  // a single event's reduction lands on its own learner
  const auto a1 = risk_attribution(fit, 1);
  const SelectionEvent& e0 = fit.events[0];
  CHECK(a1[e0.param][e0.learner] ==
        doctest::Approx(fit.risk_start - e0.risk).epsilon(1e-14));
  CHECK_THROWS_AS((void)risk_attribution(fit, 201), std::out_of_range);
}

TEST_CASE("deselection at tau zero replays the original path") {
  const Dataset d = gen_data(250, 5, Margin::LogNormal, Margin::LogLogistic,
                             Copula::Gumbel, 81);
  ModelSpec spec = make_spec(Margin::LogNormal, Margin::LogLogistic, Copula::Gumbel, 5,
                             0.1, 150);
  const BoostFit fit = fit_boost(d, spec);
  const int m_stop = 120;
  const DeselectResult res = deselect_refit(fit, d, 0.0, m_stop);
  for (int k = 0; k < kNumParams; ++k)
    for (char kept : res.kept[k]) CHECK(kept == 1);
  REQUIRE(res.fit.iterations() == m_stop);
  for (int m = 0; m < m_stop; ++m) {
    CHECK(res.fit.events[m].param == fit.events[m].param);
    CHECK(res.fit.events[m].learner == fit.events[m].learner);
    CHECK(res.fit.events[m].risk == fit.events[m].risk);
  }
  CHECK(res.fit.offsets == fit.offsets);
}

TEST_CASE("deselection drops exactly the lightweight learners") {
  const Dataset d = gen_data(300, 6, Margin::LogNormal, Margin::LogLogistic,
                             Copula::Gaussian, 93);
  ModelSpec spec = make_spec(Margin::LogNormal, Margin::LogLogistic, Copula::Gaussian, 6,
                             0.1, 400);
  const BoostFit fit = fit_boost(d, spec);
  const int m_stop = fit.iterations();
  const double tau = 0.01;
  const DeselectResult res = deselect_refit(fit, d, tau, m_stop);
  CHECK(res.total_reduction == fit.risk_at(0) - fit.risk_at(m_stop));
  CHECK(res.total_reduction > 0.0);
  for (int k = 0; k < kNumParams; ++k) {
    CHECK(res.kept[k][0] == 1);
    for (std::size_t j = 1; j < res.kept[k].size(); ++j) {
      const bool keep = res.attribution[k][j] >= tau * res.total_reduction;
      CHECK(static_cast<bool>(res.kept[k][j]) == keep);
    }
  }
  // the refit can only use surviving learners
  const auto sel = res.fit.selected_covariates(res.fit.iterations());
  for (int k = 0; k < kNumParams; ++k)
    for (int cov : sel[k]) {
      bool surviving = false;
      for (std::size_t j = 1; j < fit.menu[k].size(); ++j)
        if (fit.menu[k][j].spec.covariate == cov && res.kept[k][j]) surviving = true;
      CHECK(surviving);
    }
  // unhelpful noise learners carry tiny attributions and are gone
  int dropped = 0;
  for (int k = 0; k < kNumParams; ++k)
    for (std::size_t j = 1; j < res.kept[k].size(); ++j) dropped += !res.kept[k][j];
  CHECK(dropped > 0);
}

TEST_CASE("survivor sets shrink as tau grows") {
  const Dataset d = gen_data(250, 5, Margin::LogNormal, Margin::LogLogistic,
                             Copula::Gaussian, 101);
  ModelSpec spec = make_spec(Margin::LogNormal, Margin::LogLogistic, Copula::Gaussian, 5,
                             0.1, 300);
  const BoostFit fit = fit_boost(d, spec);
  const int m_stop = fit.iterations();
  std::vector<std::set<std::pair<int, int>>> survivors;
  for (const double tau : {0.0, 0.001, 0.01, 0.05, 0.1}) {
    const DeselectResult res = deselect_refit(fit, d, tau, m_stop);
    std::set<std::pair<int, int>> s;
    for (int k = 0; k < kNumParams; ++k)
      for (std::size_t j = 1; j < res.kept[k].size(); ++j)
        if (res.kept[k][j]) s.insert({k, static_cast<int>(j)});
    survivors.push_back(std::move(s));
  }
  for (std::size_t t = 1; t < survivors.size(); ++t)
    CHECK(std::includes(survivors[t - 1].begin(), survivors[t - 1].end(),
                        survivors[t].begin(), survivors[t].end()));
}

TEST_CASE("deselecting everything leaves an intercept-only refit") {
  const Dataset d = gen_data(200, 4, Margin::Gaussian, Margin::Gaussian,
                             Copula::Gaussian, 111);
  ModelSpec spec = make_spec(Margin::Gaussian, Margin::Gaussian, Copula::Gaussian, 4,
                             0.1, 100);
  const BoostFit fit = fit_boost(d, spec);
  const DeselectResult res = deselect_refit(fit, d, 2.0, fit.iterations());
  for (int k = 0; k < kNumParams; ++k)
    for (std::size_t j = 1; j < res.kept[k].size(); ++j) CHECK(res.kept[k][j] == 0);
  for (const SelectionEvent& e : res.fit.events) CHECK(e.learner == 0);
  CHECK_THROWS_AS((void)deselect_refit(fit, d, -0.1, 10), std::invalid_argument);
}
