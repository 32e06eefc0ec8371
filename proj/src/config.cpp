#include "copulaboost/config.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace cpb {

namespace {

using nlohmann::json;

void want(bool ok, const std::string& key, const char* kind) {
  if (!ok) throw std::invalid_argument("config key \"" + key + "\" must be " + kind);
}

void read_str(const json& j, const char* key, std::optional<std::string>& out) {
  if (!j.contains(key)) return;
  want(j[key].is_string(), key, "a string");
  out = j[key].get<std::string>();
}

void read_int(const json& j, const char* key, std::optional<int>& out) {
  if (!j.contains(key)) return;
  want(j[key].is_number_integer(), key, "an integer");
  out = j[key].get<int>();
}

void read_num(const json& j, const char* key, std::optional<double>& out) {
  if (!j.contains(key)) return;
  want(j[key].is_number(), key, "a number");
  out = j[key].get<double>();
}

void read_seed(const json& j, const char* key, std::optional<std::uint64_t>& out) {
  if (!j.contains(key)) return;
  want(j[key].is_number_integer() && !j[key].is_number_float(), key,
       "a nonnegative integer");
  if (j[key].is_number_integer() && !j[key].is_number_unsigned())
    want(j[key].get<std::int64_t>() >= 0, key, "a nonnegative integer");
  out = j[key].get<std::uint64_t>();
}

void read_strs(const json& j, const char* key,
               std::optional<std::vector<std::string>>& out) {
  if (!j.contains(key)) return;
  want(j[key].is_array(), key, "an array of strings");
  std::vector<std::string> v;
  for (const json& e : j[key]) {
    want(e.is_string(), key, "an array of strings");
    v.push_back(e.get<std::string>());
  }
  out = std::move(v);
}

constexpr const char* kKnownKeys[] = {
    "data",    "val_data",  "test_data", "fit",     "copula",       "marginals",
    "nu",      "mstop",     "learners",  "stabilization", "knots",  "degree",
    "penalty_order", "df",  "cv_folds",  "q",       "pi_thr",       "pfer",
    "B",       "tau",       "scenario",  "runs",    "methods",      "n_train",
    "n_val",   "n_test",    "p",         "energy_draws", "seed",    "threads",
    "out"};

}  // namespace

RunConfig load_run_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open config file: " + path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config parse error in " + path + ": " + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config root must be an object");
  for (const auto& [key, val] : j.items()) {
    bool known = false;
    for (const char* k : kKnownKeys) known = known || key == k;
    if (!known) throw std::invalid_argument("unknown config key \"" + key + "\"");
  }

  RunConfig c;
  read_str(j, "data", c.data);
  read_str(j, "val_data", c.val_data);
  read_str(j, "test_data", c.test_data);
  read_str(j, "fit", c.fit_file);
  read_str(j, "copula", c.copula);
  read_strs(j, "marginals", c.marginals);
  if (c.marginals && c.marginals->size() != 2)
    throw std::invalid_argument("config key \"marginals\" must list exactly two names");
  read_num(j, "nu", c.nu);
  read_int(j, "mstop", c.mstop);
  read_str(j, "learners", c.learners);
  read_str(j, "stabilization", c.stabilization);
  read_int(j, "knots", c.knots);
  read_int(j, "degree", c.degree);
  read_int(j, "penalty_order", c.penalty_order);
  read_num(j, "df", c.df);
  read_int(j, "cv_folds", c.cv_folds);
  read_int(j, "q", c.q);
  read_num(j, "pi_thr", c.pi_thr);
  read_num(j, "pfer", c.pfer);
  read_int(j, "B", c.B);
  read_num(j, "tau", c.tau);
  read_str(j, "scenario", c.scenario);
  read_int(j, "runs", c.runs);
  read_strs(j, "methods", c.methods);
  read_int(j, "n_train", c.n_train);
  read_int(j, "n_val", c.n_val);
  read_int(j, "n_test", c.n_test);
  read_int(j, "p", c.p);
  read_int(j, "energy_draws", c.energy_draws);
  read_seed(j, "seed", c.seed);
  read_int(j, "threads", c.threads);
  read_str(j, "out", c.out);
  return c;
}

RunConfig merge_config(const RunConfig& flags, const RunConfig& file) {
  RunConfig m = flags;
  const auto fill = [](auto& dst, const auto& src) {
    if (!dst) dst = src;
  };
  fill(m.data, file.data);
  fill(m.val_data, file.val_data);
  fill(m.test_data, file.test_data);
  fill(m.fit_file, file.fit_file);
  fill(m.copula, file.copula);
  fill(m.marginals, file.marginals);
  fill(m.nu, file.nu);
  fill(m.mstop, file.mstop);
  fill(m.learners, file.learners);
  fill(m.stabilization, file.stabilization);
  fill(m.knots, file.knots);
  fill(m.degree, file.degree);
  fill(m.penalty_order, file.penalty_order);
  fill(m.df, file.df);
  fill(m.cv_folds, file.cv_folds);
  fill(m.q, file.q);
  fill(m.pi_thr, file.pi_thr);
  fill(m.pfer, file.pfer);
  fill(m.B, file.B);
  fill(m.tau, file.tau);
  fill(m.scenario, file.scenario);
  fill(m.runs, file.runs);
  fill(m.methods, file.methods);
  fill(m.n_train, file.n_train);
  fill(m.n_val, file.n_val);
  fill(m.n_test, file.n_test);
  fill(m.p, file.p);
  fill(m.energy_draws, file.energy_draws);
  fill(m.seed, file.seed);
  fill(m.threads, file.threads);
  fill(m.out, file.out);
  return m;
}

std::string run_config_json(const RunConfig& c) {
  json j = json::object();
  const auto put = [&j](const char* key, const auto& opt) {
    if (opt) j[key] = *opt;
  };
  put("data", c.data);
  put("val_data", c.val_data);
  put("test_data", c.test_data);
  put("fit", c.fit_file);
  put("copula", c.copula);
  put("marginals", c.marginals);
  put("nu", c.nu);
  put("mstop", c.mstop);
  put("learners", c.learners);
  put("stabilization", c.stabilization);
  put("knots", c.knots);
  put("degree", c.degree);
  put("penalty_order", c.penalty_order);
  put("df", c.df);
  put("cv_folds", c.cv_folds);
  put("q", c.q);
  put("pi_thr", c.pi_thr);
  put("pfer", c.pfer);
  put("B", c.B);
  put("tau", c.tau);
  put("scenario", c.scenario);
  put("runs", c.runs);
  put("methods", c.methods);
  put("n_train", c.n_train);
  put("n_val", c.n_val);
  put("n_test", c.n_test);
  put("p", c.p);
  put("energy_draws", c.energy_draws);
  put("seed", c.seed);
  put("threads", c.threads);
  put("out", c.out);
  return j.dump(2);
}

}  // namespace cpb
