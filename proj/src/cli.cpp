#include "copulaboost/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "copulaboost/config.hpp"
#include "copulaboost/scoring.hpp"
#include "copulaboost/serialize.hpp"
#include "copulaboost/study.hpp"
#include "copulaboost/version.hpp"
#include "json.hpp"

namespace cpb {

namespace {

namespace fs = std::filesystem;

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// ------------------------------------------------------------- flag plumbing

struct Flags {
  std::string config, data, val_data, test_data, fit_file, copula, learners,
      stabilization, scenario, out;
  std::vector<std::string> marginals, methods;
  double nu = 0.0, df = 0.0, pi_thr = 0.0, pfer = 0.0, tau = 0.0;
  int mstop = 0, knots = 0, degree = 0, penalty_order = 0, cv_folds = 0, q = 0, B = 0,
      runs = 0, n_train = 0, n_val = 0, n_test = 0, p = 0, energy_draws = 0,
      threads = 0;
  std::uint64_t seed = 0;
};

void add_flags(CLI::App* c, Flags& f) {
  c->add_option("--config", f.config, "JSON config file; explicit flags win");
  c->add_option("--data", f.data, "training CSV (y1,y2,covariates...)");
  c->add_option("--val-data", f.val_data, "validation CSV for tuning m_stop");
  c->add_option("--test-data", f.test_data, "test CSV for scoring");
  c->add_option("--fit", f.fit_file, "saved fit JSON to operate on");
  c->add_option("--copula", f.copula, "gaussian | clayton | gumbel");
  c->add_option("--marginals", f.marginals, "two of gaussian lognormal loglogistic gamma")
      ->expected(2);
  c->add_option("--nu", f.nu, "boosting step length");
  c->add_option("--mstop", f.mstop, "iteration budget (fit) or evaluation iteration");
  c->add_option("--learners", f.learners, "linear | pspline");
  c->add_option("--stabilization", f.stabilization, "gradient scaling: none | mad");
  c->add_option("--knots", f.knots, "p-spline inner knots");
  c->add_option("--degree", f.degree, "p-spline degree");
  c->add_option("--penalty-order", f.penalty_order, "difference penalty order");
  c->add_option("--df", f.df, "p-spline degrees of freedom");
  c->add_option("--cv-folds", f.cv_folds, "folds for k-fold tuning");
  c->add_option("--q", f.q, "stability selection: learners per subsample fit");
  c->add_option("--pi-thr", f.pi_thr, "stability selection threshold");
  c->add_option("--pfer", f.pfer, "stability selection per-family error bound");
  c->add_option("--B", f.B, "stability selection subsamples");
  c->add_option("--tau", f.tau, "deselection threshold on attributed risk");
  c->add_option("--scenario", f.scenario, "toy | A | B | C");
  c->add_option("--runs", f.runs, "simulation repetitions");
  c->add_option("--methods", f.methods,
                "subset of classic probing stabsel deselect");
  c->add_option("--n-train", f.n_train, "scenario training rows");
  c->add_option("--n-val", f.n_val, "scenario validation rows");
  c->add_option("--n-test", f.n_test, "scenario test rows");
  c->add_option("--p", f.p, "scenario covariate count");
  c->add_option("--energy-draws", f.energy_draws, "samples per row for the energy score");
  c->add_option("--seed", f.seed, "random seed");
  c->add_option("--threads", f.threads, "worker threads for subsample fits");
  c->add_option("--out", f.out, "output directory (default .)");
}

RunConfig collect(const CLI::App* c, const Flags& f) {
  RunConfig r;
  const auto got = [c](const char* name) { return c->count(name) > 0; };
  if (got("--data")) r.data = f.data;
  if (got("--val-data")) r.val_data = f.val_data;
  if (got("--test-data")) r.test_data = f.test_data;
  if (got("--fit")) r.fit_file = f.fit_file;
  if (got("--copula")) r.copula = f.copula;
  if (got("--marginals")) r.marginals = f.marginals;
  if (got("--nu")) r.nu = f.nu;
  if (got("--mstop")) r.mstop = f.mstop;
  if (got("--learners")) r.learners = f.learners;
  if (got("--stabilization")) r.stabilization = f.stabilization;
  if (got("--knots")) r.knots = f.knots;
  if (got("--degree")) r.degree = f.degree;
  if (got("--penalty-order")) r.penalty_order = f.penalty_order;
  if (got("--df")) r.df = f.df;
  if (got("--cv-folds")) r.cv_folds = f.cv_folds;
  if (got("--q")) r.q = f.q;
  if (got("--pi-thr")) r.pi_thr = f.pi_thr;
  if (got("--pfer")) r.pfer = f.pfer;
  if (got("--B")) r.B = f.B;
  if (got("--tau")) r.tau = f.tau;
  if (got("--scenario")) r.scenario = f.scenario;
  if (got("--runs")) r.runs = f.runs;
  if (got("--methods")) r.methods = f.methods;
  if (got("--n-train")) r.n_train = f.n_train;
  if (got("--n-val")) r.n_val = f.n_val;
  if (got("--n-test")) r.n_test = f.n_test;
  if (got("--p")) r.p = f.p;
  if (got("--energy-draws")) r.energy_draws = f.energy_draws;
  if (got("--seed")) r.seed = f.seed;
  if (got("--threads")) r.threads = f.threads;
  if (got("--out")) r.out = f.out;
  return r;
}

// ------------------------------------------------------------- shared pieces

const std::string& require(const std::optional<std::string>& v, const char* what) {
  if (!v) throw std::invalid_argument(std::string("missing required option ") + what);
  return *v;
}

ModelSpec model_from(const RunConfig& cfg, int p) {
  ModelSpec spec;
  if (cfg.marginals) {
    spec.margin1 = margin_from_string((*cfg.marginals)[0]);
    spec.margin2 = margin_from_string((*cfg.marginals)[1]);
  }
  if (cfg.copula) spec.copula = copula_from_string(*cfg.copula);
  if (cfg.nu) spec.nu = *cfg.nu;
  if (cfg.mstop) spec.m_max = *cfg.mstop;
  if (cfg.stabilization)
    spec.stabilization = stabilization_from_string(*cfg.stabilization);
  LearnerKind kind = LearnerKind::Linear;
  if (cfg.learners) {
    if (*cfg.learners == "linear")
      kind = LearnerKind::Linear;
    else if (*cfg.learners == "pspline")
      kind = LearnerKind::PSpline;
    else
      throw std::invalid_argument("unknown --learners value: " + *cfg.learners);
  }
  std::vector<LearnerSpec> menu = covariate_menu(kind, p);
  for (LearnerSpec& ls : menu) {
    if (cfg.knots) ls.inner_knots = *cfg.knots;
    if (cfg.degree) ls.degree = *cfg.degree;
    if (cfg.penalty_order) ls.penalty_order = *cfg.penalty_order;
    if (cfg.df) ls.df = *cfg.df;
  }
  set_all_menus(spec, menu);
  return spec;
}

StoppingMode tuning_mode(const RunConfig& cfg, const std::optional<Dataset>& val) {
  StoppingMode mode;
  if (val) {
    mode.kind = StoppingMode::Kind::Validation;
    mode.validation = &*val;
  } else {
    mode.kind = StoppingMode::Kind::KFold;
    mode.folds = cfg.cv_folds.value_or(5);
    mode.seed = cfg.seed.value_or(0);
  }
  return mode;
}

// evaluation iteration: explicit --mstop, else the tuned one, else the full path
int eval_iteration(const RunConfig& cfg, const BoostFit& fit) {
  const int m = cfg.mstop ? *cfg.mstop : fit.m_stop.value_or(fit.iterations());
  if (m < 0 || m > fit.iterations())
    throw std::invalid_argument("--mstop " + std::to_string(m) +
                                " outside the fitted path [0, " +
                                std::to_string(fit.iterations()) + "]");
  return m;
}

// loaded covariates must line up with the columns the fit was trained on
void check_columns(const BoostFit& fit, const std::vector<std::string>& names) {
  for (int k = 0; k < kNumParams; ++k)
    for (const LearnerDesign& d : fit.menu[k]) {
      if (d.spec.kind == LearnerKind::Intercept || d.is_probe) continue;
      const int j = d.spec.covariate;
      if (j >= static_cast<int>(names.size()))
        throw std::invalid_argument("data has no column " + std::to_string(j + 1) +
                                    " for learner " + d.name);
      if (names[j] != d.name)
        throw std::invalid_argument("column " + std::to_string(j + 1) + " is \"" +
                                    names[j] + "\" but the fit was trained on \"" +
                                    d.name + "\"");
    }
}

// covariate matrix for prediction: a training-format CSV (y1,y2 dropped) or a
// covariates-only CSV
std::pair<Eigen::MatrixXd, std::vector<std::string>> load_covariates(
    const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  bool has_y = false;
  for (const std::string& h : header) has_y = has_y || h == "y1" || h == "y2";
  if (has_y) {
    const Dataset d = load_dataset(path);
    return {d.X, d.names};
  }
  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const char* s = cell.c_str();
      char* end = nullptr;
      const double x = std::strtod(s, &end);
      if (end == s || *end != '\0')
        throw std::runtime_error(path + ": row " + std::to_string(lineno) +
                                 ", column " + std::to_string(row.size() + 1) +
                                 ": not a number: \"" + cell + "\"");
      row.push_back(x);
    }
    if (row.size() != header.size())
      throw std::runtime_error(path + ": row " + std::to_string(lineno) + " has " +
                               std::to_string(row.size()) + " fields, expected " +
                               std::to_string(header.size()));
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd X(static_cast<int>(rows.size()), static_cast<int>(header.size()));
  for (int i = 0; i < X.rows(); ++i)
    for (int j = 0; j < X.cols(); ++j) X(i, j) = rows[i][j];
  return {X, header};
}

// ---------------------------------------------------------------- artifacts

fs::path out_dir(const RunConfig& cfg) {
  const fs::path dir = cfg.out ? fs::path(*cfg.out) : fs::path(".");
  fs::create_directories(dir);
  return dir;
}

std::ofstream open_out(const fs::path& file) {
  std::ofstream f(file);
  if (!f) throw std::runtime_error("cannot write " + file.string());
  return f;
}

void write_manifest(const fs::path& dir, const std::string& command,
                    const RunConfig& cfg) {
  nlohmann::json j;
  j["artifact"] = "manifest";
  j["tool"] = "copulaboost";
  j["version"] = kVersion;
  j["command"] = command;
  j["config"] = nlohmann::json::parse(run_config_json(cfg));
  std::ofstream f = open_out(dir / "manifest.json");
  f << j.dump(2) << '\n';
}

void write_coefficient_paths(const fs::path& dir, const BoostFit& fit) {
  std::ofstream f = open_out(dir / "coefficient_paths.csv");
  f << "iteration,parameter,learner,coef_norm\n";
  std::array<std::vector<Eigen::VectorXd>, kNumParams> acc;
  for (int k = 0; k < kNumParams; ++k) {
    acc[k].reserve(fit.menu[k].size());
    for (const LearnerDesign& d : fit.menu[k])
      acc[k].push_back(Eigen::VectorXd::Zero(d.n_basis));
  }
  for (const SelectionEvent& e : fit.events) {
    acc[e.param][e.learner] += e.delta;
    f << e.iteration << ',' << kParamNames[e.param] << ','
      << fit.menu[e.param][e.learner].name << ','
      << fmt17(acc[e.param][e.learner].norm()) << '\n';
  }
}

void write_selection_report(const fs::path& dir, const BoostFit& fit, int m) {
  std::ofstream f = open_out(dir / "selection_report.csv");
  f << "parameter,learner,covariate,first_iteration,times_selected,coef_norm\n";
  for (int k = 0; k < kNumParams; ++k)
    for (std::size_t j = 0; j < fit.menu[k].size(); ++j) {
      int first = 0, times = 0;
      Eigen::VectorXd beta = Eigen::VectorXd::Zero(fit.menu[k][j].n_basis);
      for (const SelectionEvent& e : fit.events) {
        if (e.iteration > m) break;
        if (e.param != k || e.learner != static_cast<int>(j)) continue;
        if (times == 0) first = e.iteration;
        ++times;
        beta += e.delta;
      }
      if (times == 0) continue;
      f << kParamNames[k] << ',' << j << ',' << fit.menu[k][j].name << ',' << first
        << ',' << times << ',' << fmt17(beta.norm()) << '\n';
    }
}

void save_fit_artifact(const fs::path& dir, const BoostFit& fit) {
  save_fit(fit, (dir / "fit.json").string());
}

void print_fit_summary(const BoostFit& fit, int m) {
  std::cout << "iterations: " << fit.iterations() << "  risk[0]: "
            << fit.risk_at(0) << "  risk[" << m << "]: " << fit.risk_at(m) << '\n';
  if (fit.aborted) std::cout << "aborted: " << fit.abort_reason << '\n';
  const auto sel = fit.selected_covariates(m);
  for (int k = 0; k < kNumParams; ++k) {
    std::cout << kParamNames[k] << " selected:";
    for (const int j : sel[k]) {
      std::string nm = "x" + std::to_string(j + 1);
      for (const LearnerDesign& d : fit.menu[k])
        if (!d.is_probe && d.spec.covariate == j) nm = d.name;
      std::cout << ' ' << nm;
    }
    std::cout << '\n';
  }
}

// ----------------------------------------------------------------- commands

int cmd_fit(const RunConfig& cfg, bool kfold) {
  const Dataset train = load_dataset(require(cfg.data, "--data"));
  const ModelSpec spec = model_from(cfg, train.p());
  BoostFit fit = fit_boost(train, spec);
  std::optional<Dataset> val;
  if (cfg.val_data) val = load_dataset(*cfg.val_data);
  std::optional<MstopResult> tuned;
  if (kfold || val) {
    if (kfold && val)
      throw std::invalid_argument("cv tunes by k-fold; drop --val-data or use fit");
    const MstopResult ms = select_mstop(fit, train, tuning_mode(cfg, val));
    fit.m_stop = ms.m_stop;
    tuned = ms;
  }
  const int m = fit.m_stop.value_or(fit.iterations());
  const fs::path dir = out_dir(cfg);
  save_fit_artifact(dir, fit);
  write_coefficient_paths(dir, fit);
  write_selection_report(dir, fit, m);
  if (tuned && kfold) {
    std::ofstream f = open_out(dir / "cv_curve.csv");
    f << "iteration,mean_holdout_risk\n";
    for (std::size_t i = 0; i < tuned->risk.size(); ++i)
      f << i << ',' << fmt17(tuned->risk[i]) << '\n';
  }
  write_manifest(dir, kfold ? "cv" : "fit", cfg);
  if (tuned) std::cout << "m_stop: " << *fit.m_stop << '\n';
  print_fit_summary(fit, m);
  return 0;
}

int cmd_probing(const RunConfig& cfg) {
  const Dataset train = load_dataset(require(cfg.data, "--data"));
  const ModelSpec spec = model_from(cfg, train.p());
  const ProbingResult pr = probing_fit(train, spec, cfg.seed.value_or(0));
  const int m = pr.fit.iterations();
  const fs::path dir = out_dir(cfg);
  save_fit_artifact(dir, pr.fit);
  write_coefficient_paths(dir, pr.fit);
  write_selection_report(dir, pr.fit, m);
  write_manifest(dir, "probing", cfg);
  if (pr.probe_iteration)
    std::cout << "first probe would enter at iteration " << *pr.probe_iteration << '\n';
  else
    std::cout << "no probe entered within the iteration budget\n";
  print_fit_summary(pr.fit, m);
  return 0;
}

int cmd_stabsel(const RunConfig& cfg) {
  const Dataset train = load_dataset(require(cfg.data, "--data"));
  const ModelSpec spec = model_from(cfg, train.p());
  StabselParams par;
  if (cfg.q) par.q = *cfg.q;
  par.pi_thr = cfg.pi_thr;
  par.pfer = cfg.pfer;
  if (!par.pi_thr && !par.pfer) par.pi_thr = 0.9;
  if (cfg.B) par.B = *cfg.B;
  par.seed = cfg.seed.value_or(0);
  par.threads = cfg.threads.value_or(1);
  std::optional<Dataset> val;
  if (cfg.val_data) val = load_dataset(*cfg.val_data);
  const StabselResult sr = stability_select(train, spec, par, tuning_mode(cfg, val));

  const fs::path dir = out_dir(cfg);
  save_fit_artifact(dir, sr.final_fit);
  write_coefficient_paths(dir, sr.final_fit);
  {
    std::ofstream f = open_out(dir / "selection_report.csv");
    f << "parameter,learner,covariate,frequency,stable\n";
    for (int k = 0; k < kNumParams; ++k)
      for (std::size_t j = 0; j < sr.frequency[k].size(); ++j) {
        const std::string nm =
            j == 0 ? "(intercept)" : train.names[spec.menus[k][j - 1].covariate];
        f << kParamNames[k] << ',' << j << ',' << nm << ','
          << fmt17(sr.frequency[k][j]) << ',' << int(sr.stable[k][j]) << '\n';
      }
  }
  write_manifest(dir, "stabsel", cfg);
  std::cout << "pi_thr: " << fmt17(sr.pi_thr) << "  pfer: " << fmt17(sr.pfer)
            << "  m_stop: " << sr.m_stop << '\n';
  print_fit_summary(sr.final_fit, sr.m_stop);
  return 0;
}

int cmd_deselect(const RunConfig& cfg) {
  const BoostFit fit = load_fit(require(cfg.fit_file, "--fit"));
  const Dataset train = load_dataset(require(cfg.data, "--data"));
  check_columns(fit, train.names);
  const int m = eval_iteration(cfg, fit);
  const double tau = cfg.tau.value_or(0.01);
  const DeselectResult dr = deselect_refit(fit, train, tau, m);

  const fs::path dir = out_dir(cfg);
  BoostFit refit = dr.fit;
  refit.m_stop = m;
  save_fit_artifact(dir, refit);
  write_coefficient_paths(dir, refit);
  {
    std::ofstream f = open_out(dir / "selection_report.csv");
    f << "parameter,learner,covariate,attribution,kept\n";
    for (int k = 0; k < kNumParams; ++k)
      for (std::size_t j = 0; j < dr.attribution[k].size(); ++j)
        f << kParamNames[k] << ',' << j << ',' << fit.menu[k][j].name << ','
          << fmt17(dr.attribution[k][j]) << ',' << int(dr.kept[k][j]) << '\n';
  }
  write_manifest(dir, "deselect", cfg);
  int dropped = 0;
  for (int k = 0; k < kNumParams; ++k)
    for (std::size_t j = 1; j < dr.kept[k].size(); ++j) dropped += !dr.kept[k][j];
  std::cout << "tau: " << fmt17(tau) << "  dropped learners: " << dropped
            << "  total risk reduction: " << fmt17(dr.total_reduction) << '\n';
  print_fit_summary(refit, m);
  return 0;
}

int cmd_simulate(const RunConfig& cfg) {
  StudyConfig sc;
  sc.scenario.tag = scenario_from_string(require(cfg.scenario, "--scenario"));
  if (cfg.copula) sc.scenario.copula = copula_from_string(*cfg.copula);
  if (cfg.n_train) sc.scenario.n_train = *cfg.n_train;
  if (cfg.n_val) sc.scenario.n_val = *cfg.n_val;
  if (cfg.n_test) sc.scenario.n_test = *cfg.n_test;
  if (cfg.p) sc.scenario.p = *cfg.p;
  sc.scenario.seed = cfg.seed.value_or(0);
  if (cfg.methods) {
    sc.methods.clear();
    for (const std::string& m : *cfg.methods) sc.methods.push_back(method_from_string(m));
  }
  if (cfg.runs) sc.runs = *cfg.runs;
  if (cfg.nu) sc.nu = *cfg.nu;
  if (cfg.mstop) sc.m_max = *cfg.mstop;
  if (cfg.tau) sc.tau = *cfg.tau;
  if (cfg.q) sc.stabsel.q = *cfg.q;
  sc.stabsel.pi_thr = cfg.pi_thr;
  sc.stabsel.pfer = cfg.pfer;
  if (!sc.stabsel.pi_thr && !sc.stabsel.pfer) sc.stabsel.pi_thr = 0.9;
  if (cfg.B) sc.stabsel.B = *cfg.B;
  if (cfg.energy_draws) sc.energy_draws = *cfg.energy_draws;
  sc.threads = cfg.threads.value_or(1);
  const fs::path dir = out_dir(cfg);
  sc.out_dir = dir.string();

  const StudyResult res = run_study(sc);
  write_manifest(dir, "simulate", cfg);
  std::cout << "scenario " << scenario_name(sc.scenario.tag) << ", "
            << copula_name(sc.scenario.copula) << " copula, " << sc.runs << " runs\n";
  for (const StudySummaryRow& s : res.summary) {
    std::cout << method_name(s.method) << ": tp";
    for (int k = 0; k < kNumParams; ++k) std::cout << ' ' << s.tp_mean[k];
    std::cout << "  fp";
    for (int k = 0; k < kNumParams; ++k) std::cout << ' ' << s.fp_mean[k];
    std::cout << "  negloglik " << s.negloglik_mean << "  energy " << s.energy_mean
              << '\n';
  }
  return 0;
}

int cmd_score(const RunConfig& cfg) {
  const BoostFit fit = load_fit(require(cfg.fit_file, "--fit"));
  const Dataset test = load_dataset(require(cfg.test_data, "--test-data"));
  check_columns(fit, test.names);
  const int m = eval_iteration(cfg, fit);
  const int draws = cfg.energy_draws.value_or(100);
  const std::uint64_t seed = cfg.seed.value_or(0);
  const double nll = neg_log_lik(fit, test, m);
  const double es =
      energy_score(sample_predictive(fit, test.X, m, draws, seed), test.y1, test.y2);

  const fs::path dir = out_dir(cfg);
  nlohmann::json j;
  j["artifact"] = "score";
  j["negloglik"] = nll;
  j["energy_score"] = es;
  j["m"] = m;
  j["n"] = test.n();
  j["energy_draws"] = draws;
  j["seed"] = seed;
  std::ofstream f = open_out(dir / "score.json");
  f << j.dump(2) << '\n';
  write_manifest(dir, "score", cfg);
  std::cout << "negloglik: " << fmt17(nll) << "  energy_score: " << fmt17(es)
            << "  (m = " << m << ", n = " << test.n() << ")\n";
  return 0;
}

int cmd_predict(const RunConfig& cfg) {
  const BoostFit fit = load_fit(require(cfg.fit_file, "--fit"));
  const auto [X, names] = load_covariates(require(cfg.data, "--data"));
  check_columns(fit, names);
  const int m = eval_iteration(cfg, fit);
  const Eigen::MatrixXd params = predict_params(fit, X, m);

  const fs::path dir = out_dir(cfg);
  {
    std::ofstream f = open_out(dir / "predictions.csv");
    f << "mu1,sigma1,mu2,sigma2,theta\n";
    for (int i = 0; i < params.rows(); ++i) {
      for (int k = 0; k < kNumParams; ++k)
        f << (k ? "," : "") << fmt17(params(i, k));
      f << '\n';
    }
  }
  write_manifest(dir, "predict", cfg);
  std::cout << "wrote " << params.rows() << " rows (m = " << m << ")\n";
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"boosted bivariate copula regression with enhanced variable selection"};
  app.require_subcommand(1);
  Flags f;
  CLI::App* fit = app.add_subcommand("fit", "boost the full path, optionally tune on --val-data");
  CLI::App* cv = app.add_subcommand("cv", "boost the full path, tune m_stop by k-fold");
  CLI::App* probing = app.add_subcommand("probing", "boost against shadow covariates, stop at the first probe");
  CLI::App* stabsel = app.add_subcommand("stabsel", "stability selection with PFER control");
  CLI::App* deselect = app.add_subcommand("deselect", "drop low-attribution learners from a saved fit and re-boost");
  CLI::App* simulate = app.add_subcommand("simulate", "run a scenario study and summarize selection/prediction");
  CLI::App* score = app.add_subcommand("score", "negative log-likelihood and energy score on test data");
  CLI::App* predict = app.add_subcommand("predict", "distribution parameters for new covariates");
  for (CLI::App* c : {fit, cv, probing, stabsel, deselect, simulate, score, predict})
    add_flags(c, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const CLI::App* active = app.get_subcommands().front();
    RunConfig cfg = collect(active, f);
    if (active->count("--config") > 0)
      cfg = merge_config(cfg, load_run_config(f.config));

    if (active == fit) return cmd_fit(cfg, false);
    if (active == cv) return cmd_fit(cfg, true);
    if (active == probing) return cmd_probing(cfg);
    if (active == stabsel) return cmd_stabsel(cfg);
    if (active == deselect) return cmd_deselect(cfg);
    if (active == simulate) return cmd_simulate(cfg);
    if (active == score) return cmd_score(cfg);
    return cmd_predict(cfg);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace cpb
