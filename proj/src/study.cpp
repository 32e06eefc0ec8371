#include "copulaboost/study.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "copulaboost/rng.hpp"
#include "copulaboost/scoring.hpp"

namespace cpb {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (const double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double s = 0.0;
  for (const double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct Scored {
  TpFp counts;
  double negloglik;
  double energy;
};

Scored score_fit(const BoostFit& fit, int m, const Dataset& test,
                 const std::array<std::vector<int>, kNumParams>& truth, int draws,
                 std::uint64_t seed) {
  Scored s;
  s.counts = tp_fp_counts(fit.selected_covariates(m), truth);
  s.negloglik = neg_log_lik(fit, test, m);
  s.energy = energy_score(sample_predictive(fit, test.X, m, draws, seed), test.y1,
                          test.y2);
  return s;
}

}  // namespace

Method method_from_string(const std::string& name) {
  if (name == "classic") return Method::Classic;
  if (name == "probing") return Method::Probing;
  if (name == "stabsel") return Method::Stabsel;
  if (name == "deselect") return Method::Deselect;
  throw std::invalid_argument("unknown method: " + name);
}

std::string method_name(Method m) {
  switch (m) {
    case Method::Classic: return "classic";
    case Method::Probing: return "probing";
    case Method::Stabsel: return "stabsel";
    case Method::Deselect: return "deselect";
  }
  throw std::logic_error("method_name: bad enum");
}

StudyResult run_study(const StudyConfig& cfg) {
  if (cfg.runs < 1) throw std::invalid_argument("run_study: runs must be positive");
  if (cfg.methods.empty()) throw std::invalid_argument("run_study: no methods given");
  if (cfg.energy_draws < 1)
    throw std::invalid_argument("run_study: energy_draws must be positive");

  const bool wants_classic =
      std::find(cfg.methods.begin(), cfg.methods.end(), Method::Classic) !=
      cfg.methods.end();
  const bool wants_deselect =
      std::find(cfg.methods.begin(), cfg.methods.end(), Method::Deselect) !=
      cfg.methods.end();

  StudyResult res;
  for (int run = 0; run < cfg.runs; ++run) {
    ScenarioSpec sspec = cfg.scenario;
    sspec.seed = cfg.scenario.seed + static_cast<std::uint64_t>(run);
    const ScenarioData data = gen_scenario(sspec);
    const ModelSpec model = scenario_model(sspec, cfg.nu, cfg.m_max);
    const StoppingMode tune{StoppingMode::Kind::Validation, &data.val, 5, 0};
    const std::uint64_t draw_seed = RngStream(sspec.seed).derive(4).seed();

    // the deselection pipeline starts from the tuned classical fit
    BoostFit classic;
    MstopResult classic_m;
    double classic_seconds = 0.0;
    if (wants_classic || wants_deselect) {
      const auto t0 = std::chrono::steady_clock::now();
      classic = fit_boost(data.train, model);
      classic_m = select_mstop(classic, data.train, tune);
      classic_seconds = seconds_since(t0);
    }

    for (const Method method : cfg.methods) {
      StudyRunRow row;
      row.run = run;
      row.method = method;
      switch (method) {
        case Method::Classic: {
          const Scored s = score_fit(classic, classic_m.m_stop, data.test, data.truth,
                                     cfg.energy_draws, draw_seed);
          row.counts = s.counts;
          row.negloglik = s.negloglik;
          row.energy = s.energy;
          row.m_stop = classic_m.m_stop;
          row.seconds = classic_seconds;
          break;
        }
        case Method::Probing: {
          const auto t0 = std::chrono::steady_clock::now();
          const ProbingResult pr = probing_fit(data.train, model, sspec.seed);
          const int m = pr.fit.iterations();
          const Scored s =
              score_fit(pr.fit, m, data.test, data.truth, cfg.energy_draws, draw_seed);
          row.counts = s.counts;
          row.negloglik = s.negloglik;
          row.energy = s.energy;
          row.m_stop = m;
          row.seconds = seconds_since(t0);
          break;
        }
        case Method::Stabsel: {
          const auto t0 = std::chrono::steady_clock::now();
          StabselParams par = cfg.stabsel;
          par.seed = sspec.seed;
          par.threads = cfg.threads;
          const StabselResult sr = stability_select(data.train, model, par, tune);
          const Scored s = score_fit(sr.final_fit, sr.m_stop, data.test, data.truth,
                                     cfg.energy_draws, draw_seed);
          row.counts = s.counts;
          row.negloglik = s.negloglik;
          row.energy = s.energy;
          row.m_stop = sr.m_stop;
          row.seconds = seconds_since(t0);
          break;
        }
        case Method::Deselect: {
          const auto t0 = std::chrono::steady_clock::now();
          const DeselectResult dr =
              deselect_refit(classic, data.train, cfg.tau, classic_m.m_stop);
          const Scored s = score_fit(dr.fit, classic_m.m_stop, data.test, data.truth,
                                     cfg.energy_draws, draw_seed);
          row.counts = s.counts;
          row.negloglik = s.negloglik;
          row.energy = s.energy;
          row.m_stop = classic_m.m_stop;
          row.seconds = classic_seconds + seconds_since(t0);
          break;
        }
      }
      res.rows.push_back(row);
    }
  }

  for (const Method method : cfg.methods) {
    StudySummaryRow s;
    s.method = method;
    std::vector<double> nll, en, ms;
    std::array<std::vector<double>, kNumParams> tps, fps;
    for (const StudyRunRow& row : res.rows) {
      if (row.method != method) continue;
      nll.push_back(row.negloglik);
      en.push_back(row.energy);
      ms.push_back(row.m_stop);
      for (int k = 0; k < kNumParams; ++k) {
        tps[k].push_back(row.counts.tp[k]);
        fps[k].push_back(row.counts.fp[k]);
      }
    }
    for (int k = 0; k < kNumParams; ++k) {
      s.tp_mean[k] = mean_of(tps[k]);
      s.tp_sd[k] = sd_of(tps[k], s.tp_mean[k]);
      s.fp_mean[k] = mean_of(fps[k]);
      s.fp_sd[k] = sd_of(fps[k], s.fp_mean[k]);
    }
    s.negloglik_mean = mean_of(nll);
    s.negloglik_sd = sd_of(nll, s.negloglik_mean);
    s.energy_mean = mean_of(en);
    s.energy_sd = sd_of(en, s.energy_mean);
    s.mstop_mean = mean_of(ms);
    s.mstop_sd = sd_of(ms, s.mstop_mean);
    res.summary.push_back(s);
  }

  if (!cfg.out_dir.empty()) write_study_csv(res, cfg, cfg.out_dir);
  return res;
}

void write_study_csv(const StudyResult& r, const StudyConfig& cfg,
                     const std::string& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(std::filesystem::path(dir) / "study_runs.csv");
    if (!f) throw std::runtime_error("cannot write study_runs.csv in " + dir);
    f << "scenario,copula,run,method";
    for (const char* p : kParamNames) f << ",tp_" << p;
    for (const char* p : kParamNames) f << ",fp_" << p;
    f << ",negloglik,energy,m_stop,seconds\n";
    for (const StudyRunRow& row : r.rows) {
      f << scenario_name(cfg.scenario.tag) << ',' << copula_name(cfg.scenario.copula)
        << ',' << row.run << ',' << method_name(row.method);
      for (int k = 0; k < kNumParams; ++k) f << ',' << row.counts.tp[k];
      for (int k = 0; k < kNumParams; ++k) f << ',' << row.counts.fp[k];
      f << ',' << fmt(row.negloglik) << ',' << fmt(row.energy) << ',' << row.m_stop
        << ',' << fmt(row.seconds) << '\n';
    }
  }
  {
    std::ofstream f(std::filesystem::path(dir) / "study_summary.csv");
    if (!f) throw std::runtime_error("cannot write study_summary.csv in " + dir);
    f << "scenario,copula,method";
    for (const char* p : kParamNames) f << ",tp_mean_" << p << ",tp_sd_" << p;
    for (const char* p : kParamNames) f << ",fp_mean_" << p << ",fp_sd_" << p;
    f << ",negloglik_mean,negloglik_sd,energy_mean,energy_sd,mstop_mean,mstop_sd\n";
    for (const StudySummaryRow& s : r.summary) {
      f << scenario_name(cfg.scenario.tag) << ',' << copula_name(cfg.scenario.copula)
        << ',' << method_name(s.method);
      for (int k = 0; k < kNumParams; ++k)
        f << ',' << fmt(s.tp_mean[k]) << ',' << fmt(s.tp_sd[k]);
      for (int k = 0; k < kNumParams; ++k)
        f << ',' << fmt(s.fp_mean[k]) << ',' << fmt(s.fp_sd[k]);
      f << ',' << fmt(s.negloglik_mean) << ',' << fmt(s.negloglik_sd) << ','
        << fmt(s.energy_mean) << ',' << fmt(s.energy_sd) << ',' << fmt(s.mstop_mean)
        << ',' << fmt(s.mstop_sd) << '\n';
    }
  }
}

}  // namespace cpb
