#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "copulaboost/boosting.hpp"

namespace cpb {

// ---------------------------------------------------------------- probing
// Add one row-permuted shadow copy of every covariate (shared across all
// parameter menus), boost until the first probe would be committed, and
// return the model from just before that commit.
struct ProbingResult {
  BoostFit fit;                        // contains zero probe coefficients
  std::optional<int> probe_iteration;  // iteration a probe would have won
  Dataset augmented;                   // data with the probe columns appended
};
ProbingResult probing_fit(const Dataset& train, const ModelSpec& spec, std::uint64_t seed);

// ------------------------------------------------------- stability selection
// PFER bound E(V) <= q^2 / ((2 pi_thr - 1) p): given q, p, and exactly one of
// pi_thr / pfer, solve for the other.
struct PferResult {
  double pi_thr;
  double pfer;
};
PferResult pfer_solve(int q, int p, std::optional<double> pi_thr, std::optional<double> pfer);

struct StabselParams {
  int q = 10;
  std::optional<double> pi_thr;  // give exactly one of pi_thr / pfer
  std::optional<double> pfer;
  int B = 100;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct StabselResult {
  // per parameter, aligned with the engine menu (index 0 = intercept slot)
  std::array<std::vector<double>, kNumParams> frequency;
  std::array<std::vector<char>, kNumParams> stable;
  double pi_thr = 0.0;
  double pfer = 0.0;
  int total_learners = 0;  // p in the PFER bound
  BoostFit final_fit;      // restricted full-data refit, m_stop tuned
  int m_stop = 0;
};
StabselResult stability_select(const Dataset& train, const ModelSpec& spec,
                               const StabselParams& par, const StoppingMode& mode);

// ---------------------------------------------------------------- deselection
// Risk attribution per (parameter, learner): total risk reduction achieved by
// that learner's commits up to m_stop.
std::array<std::vector<double>, kNumParams> risk_attribution(const BoostFit& fit, int m_stop);

struct DeselectResult {
  BoostFit fit;  // re-boosted on the surviving menu for exactly m_stop iterations
  std::array<std::vector<double>, kNumParams> attribution;
  std::array<std::vector<char>, kNumParams> kept;  // menu survivorship flags
  double total_reduction = 0.0;                    // r[0] - r[m_stop]
};
// Drop non-intercept learners with attribution < tau * total_reduction, then
// boost the surviving menu again for exactly m_stop iterations.
DeselectResult deselect_refit(const BoostFit& fit, const Dataset& train, double tau,
                              int m_stop);

}  // namespace cpb
