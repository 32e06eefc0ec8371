#include "copulaboost/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "copulaboost/copulas.hpp"
#include "copulaboost/marginals.hpp"
#include "copulaboost/rng.hpp"

namespace cpb {

namespace {

constexpr double kPi = std::numbers::pi;

// ten informative coefficients per parameter for the block-structured design
constexpr std::array<std::array<double, 10>, kNumParams> kBlockCoef = {{
    {0.5, 1.0, -0.5, -1.0, 1.0, 0.5, -0.5, 1.0, 0.5, 1.0},          // mu1, x1..x10
    {0.5, 0.25, 0.25, 0.25, 0.5, 0.25, -0.25, 0.5, -0.25, 0.5},     // sigma1, x11..x20
    {-1.0, 0.5, 0.5, -1.0, -0.5, -0.5, -1.0, -0.5, 0.5, -1.0},      // mu2, x21..x30
    {-0.25, 0.25, 0.25, 0.25, -0.5, -0.25, 0.25, 0.25, -0.5, -0.5}, // sigma2, x31..x40
    {-0.5, -1.0, 0.5, 0.5, -0.5, -1.0, 0.5, 0.5, 1.0, -1.0},        // rho, x41..x50
}};

int resolve_p(const ScenarioSpec& s) {
  const int p = s.p < 0 ? scenario_default_p(s.tag) : s.p;
  const int need = s.tag == Scenario::C ? 50 : 4;
  if (p < need)
    throw std::invalid_argument("gen_scenario: p must cover the informative covariates");
  return p;
}

Dataset gen_split(const ScenarioSpec& s, int n, int p, RngStream rng) {
  if (n < 1) throw std::invalid_argument("gen_scenario: sample sizes must be positive");
  const Margin m1 = scenario_margin1(s.tag);
  const Margin m2 = scenario_margin2(s.tag);
  Dataset d;
  d.X.resize(n, p);
  d.y1.resize(n);
  d.y2.resize(n);
  d.names.reserve(p);
  for (int j = 0; j < p; ++j) d.names.push_back("x" + std::to_string(j + 1));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) d.X(i, j) = 2.0 * rng.uniform() - 1.0;
    const std::array<double, kNumParams> eta = scenario_eta(s.tag, d.X.row(i));
    double u, v;
    copula_sample(s.copula, copula_theta_from_eta(s.copula, eta[kRho]), rng, u, v);
    d.y1[i] = margin_quantile(m1, u, margin_params_from_eta(m1, eta[kMu1], eta[kSigma1]));
    d.y2[i] = margin_quantile(m2, v, margin_params_from_eta(m2, eta[kMu2], eta[kSigma2]));
  }
  return d;
}

}  // namespace

Scenario scenario_from_string(const std::string& name) {
  if (name == "toy") return Scenario::Toy;
  if (name == "A") return Scenario::A;
  if (name == "B") return Scenario::B;
  if (name == "C") return Scenario::C;
  throw std::invalid_argument("unknown scenario: " + name);
}

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::Toy: return "toy";
    case Scenario::A: return "A";
    case Scenario::B: return "B";
    case Scenario::C: return "C";
  }
  throw std::logic_error("scenario_name: bad enum");
}

Margin scenario_margin1(Scenario s) {
  return s == Scenario::C ? Margin::Gaussian : Margin::LogNormal;
}

Margin scenario_margin2(Scenario s) {
  return s == Scenario::C ? Margin::Gaussian : Margin::LogLogistic;
}

LearnerKind scenario_learner_kind(Scenario s) {
  return s == Scenario::A || s == Scenario::B ? LearnerKind::PSpline
                                              : LearnerKind::Linear;
}

int scenario_default_p(Scenario s) { return s == Scenario::C ? 50 : 20; }

std::array<std::vector<int>, kNumParams> scenario_truth(Scenario s) {
  std::array<std::vector<int>, kNumParams> t;
  switch (s) {
    case Scenario::Toy:
    case Scenario::A:
      t[kMu1] = {0, 2};
      t[kSigma1] = {2};
      t[kMu2] = {0, 1};
      t[kSigma2] = {1};
      t[kRho] = {3};
      return t;
    case Scenario::B:
      t[kMu1] = {0, 2};
      t[kMu2] = {0, 1};
      t[kSigma2] = {1};
      t[kRho] = {3};
      return t;
    case Scenario::C:
      for (int k = 0; k < kNumParams; ++k)
        for (int j = 0; j < 10; ++j) t[k].push_back(10 * k + j);
      return t;
  }
  throw std::logic_error("scenario_truth: bad enum");
}

std::array<double, kNumParams> scenario_eta(Scenario s, const Eigen::RowVectorXd& x) {
  std::array<double, kNumParams> eta{};
  switch (s) {
    case Scenario::Toy:
      eta[kMu1] = -x[0] + 0.5 * x[2];
      eta[kSigma1] = -0.7 - 0.7 * x[2];
      eta[kMu2] = -0.5 - 0.7 * x[0] - 0.3 * x[1];
      eta[kSigma2] = 2.0 + 0.5 * x[1];
      eta[kRho] = 1.0 + x[3];
      return eta;
    case Scenario::A:
    case Scenario::B:
      eta[kMu1] = -0.75 * x[0] + 0.5 * std::cos(kPi * x[2]);
      eta[kSigma1] =
          s == Scenario::B ? -0.7 : -0.7 + 0.5 * std::sin(kPi * x[2]);
      eta[kMu2] = 0.5 - 0.7 * x[0] - 0.02 * std::exp(2.0 * (x[1] + 1.0));
      eta[kSigma2] = 2.0 + 0.5 * x[1];
      eta[kRho] = -0.8 + 1.5 * std::log(4.5 - 1.7 * std::sin(kPi * x[3]));
      return eta;
    case Scenario::C:
      for (int k = 0; k < kNumParams; ++k) {
        double acc = 0.0;
        for (int j = 0; j < 10; ++j) acc += kBlockCoef[k][j] * x[10 * k + j];
        eta[k] = acc;
      }
      return eta;
  }
  throw std::logic_error("scenario_eta: bad enum");
}

ScenarioData gen_scenario(const ScenarioSpec& s) {
  const int p = resolve_p(s);
  const RngStream root(s.seed);
  ScenarioData out;
  out.train = gen_split(s, s.n_train, p, root.derive(1));
  out.val = gen_split(s, s.n_val, p, root.derive(2));
  out.test = gen_split(s, s.n_test, p, root.derive(3));
  out.truth = scenario_truth(s.tag);
  return out;
}

ModelSpec scenario_model(const ScenarioSpec& s, double nu, int m_max) {
  const int p = resolve_p(s);
  ModelSpec spec;
  spec.margin1 = scenario_margin1(s.tag);
  spec.margin2 = scenario_margin2(s.tag);
  spec.copula = s.copula;
  spec.nu = nu;
  spec.m_max = m_max;
  set_all_menus(spec, covariate_menu(scenario_learner_kind(s.tag), p));
  return spec;
}

int TpFp::total_tp() const {
  int t = 0;
  for (const int v : tp) t += v;
  return t;
}

int TpFp::total_fp() const {
  int t = 0;
  for (const int v : fp) t += v;
  return t;
}

TpFp tp_fp_counts(const std::array<std::set<int>, kNumParams>& selected,
                  const std::array<std::vector<int>, kNumParams>& truth) {
  TpFp c;
  for (int k = 0; k < kNumParams; ++k) {
    for (const int j : selected[k]) {
      const bool info =
          std::find(truth[k].begin(), truth[k].end(), j) != truth[k].end();
      (info ? c.tp[k] : c.fp[k]) += 1;
    }
  }
  return c;
}

}  // namespace cpb
