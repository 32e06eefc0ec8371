#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "copulaboost/dataset.hpp"
#include "copulaboost/model.hpp"

namespace cpb {

// Synthetic study designs.  Covariates are iid U(-1,1); the predictor
// formulas below are applied on the link scale and pushed through the same
// links the fitting code uses.
//   toy  n=1000, p=20, linear effects, linear base-learners
//   A    nonlinear effects in all five parameters, P-spline base-learners
//   B    scenario A with a constant sigma1 predictor
//   C    p=50, ten informative covariates per parameter, linear learners,
//        Gaussian margins
enum class Scenario { Toy, A, B, C };

Scenario scenario_from_string(const std::string& name);
std::string scenario_name(Scenario s);

struct ScenarioSpec {
  Scenario tag = Scenario::A;
  Copula copula = Copula::Gaussian;
  int n_train = 1000;
  int n_val = 1500;
  int n_test = 1000;
  int p = -1;  // -1: scenario default (toy/A/B: 20, C: 50)
  std::uint64_t seed = 0;
};

struct ScenarioData {
  Dataset train, val, test;
  // informative covariate indices per distribution parameter
  std::array<std::vector<int>, kNumParams> truth;
};

Margin scenario_margin1(Scenario s);
Margin scenario_margin2(Scenario s);
LearnerKind scenario_learner_kind(Scenario s);
int scenario_default_p(Scenario s);
std::array<std::vector<int>, kNumParams> scenario_truth(Scenario s);

// link-scale predictor values for one covariate row
std::array<double, kNumParams> scenario_eta(Scenario s, const Eigen::RowVectorXd& x);

ScenarioData gen_scenario(const ScenarioSpec& s);

// candidate menus matching the scenario's base-learner type
ModelSpec scenario_model(const ScenarioSpec& s, double nu, int m_max);

// true/false positive counts of a selected-covariate set per parameter
struct TpFp {
  std::array<int, kNumParams> tp{};
  std::array<int, kNumParams> fp{};
  int total_tp() const;
  int total_fp() const;
};
TpFp tp_fp_counts(const std::array<std::set<int>, kNumParams>& selected,
                  const std::array<std::vector<int>, kNumParams>& truth);

}  // namespace cpb
