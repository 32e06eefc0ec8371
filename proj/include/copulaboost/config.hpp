#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cpb {

// Run configuration shared by the CLI commands.  Every field mirrors a CLI
// flag; values from a JSON config file fill unset fields, and flags given on
// the command line win over the file.
struct RunConfig {
  // data files
  std::optional<std::string> data;
  std::optional<std::string> val_data;
  std::optional<std::string> test_data;
  std::optional<std::string> fit_file;

  // model
  std::optional<std::string> copula;
  std::optional<std::vector<std::string>> marginals;  // exactly two names
  std::optional<double> nu;
  std::optional<int> mstop;
  std::optional<std::string> learners;       // "linear" | "pspline"
  std::optional<std::string> stabilization;  // "none" | "mad"
  std::optional<int> knots;
  std::optional<int> degree;
  std::optional<int> penalty_order;
  std::optional<double> df;

  // tuning
  std::optional<int> cv_folds;

  // stability selection
  std::optional<int> q;
  std::optional<double> pi_thr;
  std::optional<double> pfer;
  std::optional<int> B;

  // deselection
  std::optional<double> tau;

  // simulation study
  std::optional<std::string> scenario;
  std::optional<int> runs;
  std::optional<std::vector<std::string>> methods;
  std::optional<int> n_train, n_val, n_test, p;
  std::optional<int> energy_draws;

  // misc
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out;
};

// Strict JSON parse: unknown keys or wrongly typed values raise
// std::invalid_argument.
RunConfig load_run_config(const std::string& path);

// Fill unset fields of `flags` from `file` (flags win).
RunConfig merge_config(const RunConfig& flags, const RunConfig& file);

// JSON object holding every set field, parseable by load_run_config.
std::string run_config_json(const RunConfig& c);

}  // namespace cpb
