#pragma once

#include <string>
#include <vector>

#include "copulaboost/selection.hpp"
#include "copulaboost/simgen.hpp"

namespace cpb {

// Simulation-study harness: per run, generate scenario data, fit the
// requested method variants, and collect selection and predictive metrics.
enum class Method { Classic, Probing, Stabsel, Deselect };
Method method_from_string(const std::string& name);
std::string method_name(Method m);

struct StudyConfig {
  ScenarioSpec scenario;
  std::vector<Method> methods = {Method::Classic, Method::Probing, Method::Stabsel,
                                 Method::Deselect};
  int runs = 20;
  double nu = 0.01;
  int m_max = 2500;
  double tau = 0.01;      // deselection threshold
  StabselParams stabsel;  // q / pi_thr / pfer / B
  int energy_draws = 100;
  int threads = 1;
  std::string out_dir;  // when non-empty, write runs/summary CSVs there
};

struct StudyRunRow {
  int run = 0;
  Method method = Method::Classic;
  TpFp counts;
  double negloglik = 0.0;  // on the test sample
  double energy = 0.0;
  int m_stop = 0;
  double seconds = 0.0;
};

struct StudySummaryRow {
  Method method;
  std::array<double, kNumParams> tp_mean{}, tp_sd{}, fp_mean{}, fp_sd{};
  double negloglik_mean = 0.0, negloglik_sd = 0.0;
  double energy_mean = 0.0, energy_sd = 0.0;
  double mstop_mean = 0.0, mstop_sd = 0.0;
};

struct StudyResult {
  std::vector<StudyRunRow> rows;
  std::vector<StudySummaryRow> summary;
};

StudyResult run_study(const StudyConfig& cfg);

void write_study_csv(const StudyResult& r, const StudyConfig& cfg, const std::string& dir);

}  // namespace cpb
