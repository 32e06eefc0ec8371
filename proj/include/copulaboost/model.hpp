#pragma once

#include <array>
#include <string>
#include <vector>

#include "copulaboost/baselearners.hpp"
#include "copulaboost/copulas.hpp"
#include "copulaboost/marginals.hpp"

namespace cpb {

// The five distribution parameters of the bivariate model, in update order.
inline constexpr int kNumParams = 5;
enum ParamIndex { kMu1 = 0, kSigma1 = 1, kMu2 = 2, kSigma2 = 3, kRho = 4 };
inline constexpr const char* kParamNames[kNumParams] = {"mu1", "sigma1", "mu2", "sigma2",
                                                        "rho"};

enum class GradientStabilization { None, Mad };
GradientStabilization stabilization_from_string(const std::string& s);
std::string stabilization_name(GradientStabilization s);

// Full model description: marginal families, copula family, candidate
// base-learner menus per distribution parameter, and boosting controls.
// An intercept learner is always prepended to every menu by the engine.
struct ModelSpec {
  Margin margin1 = Margin::Gaussian;
  Margin margin2 = Margin::Gaussian;
  Copula copula = Copula::Gaussian;
  double nu = 0.1;
  int m_max = 1000;
  GradientStabilization stabilization = GradientStabilization::None;
  std::array<std::vector<LearnerSpec>, kNumParams> menus;
};

// one learner of the given kind per covariate column
std::vector<LearnerSpec> covariate_menu(LearnerKind kind, int p);
// the same menu for all five distribution parameters
void set_all_menus(ModelSpec& spec, const std::vector<LearnerSpec>& menu);

// Covariates whose column name carries this suffix are permuted shadow
// copies ("probes"); the engine flags their learners so stop rules and
// selection summaries can tell them apart from real covariates.
inline constexpr const char* kProbeSuffix = "__probe";
bool is_probe_name(const std::string& name);

}  // namespace cpb
