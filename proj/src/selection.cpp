#include "copulaboost/selection.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <set>
#include <stdexcept>
#include <thread>
#include <utility>

#include "copulaboost/rng.hpp"

namespace cpb {

// ---------------------------------------------------------------- probing

ProbingResult probing_fit(const Dataset& train, const ModelSpec& spec,
                          std::uint64_t seed) {
  const int n = train.n();
  const int p = train.p();
  ProbingResult res;

  // one shared row permutation builds every shadow column, so the probes keep
  // the covariates' joint distribution while losing any tie to the responses
  RngStream rng(seed);
  const std::vector<int> perm = rng.permutation(n);
  Dataset& aug = res.augmented;
  aug.y1 = train.y1;
  aug.y2 = train.y2;
  aug.X.resize(n, 2 * p);
  aug.X.leftCols(p) = train.X;
  aug.names = train.names;
  for (int j = 0; j < p; ++j) {
    for (int i = 0; i < n; ++i) aug.X(i, p + j) = train.X(perm[i], j);
    aug.names.push_back(train.names[j] + kProbeSuffix);
  }

  ModelSpec aug_spec = spec;
  for (int k = 0; k < kNumParams; ++k) {
    const std::vector<LearnerSpec> base = spec.menus[k];
    for (LearnerSpec s : base) {
      if (s.covariate < 0 || s.covariate >= p)
        throw std::invalid_argument("probing: menu covariate out of range");
      s.covariate += p;
      aug_spec.menus[k].push_back(s);
    }
  }

  StopRule stop;
  stop.kind = StopRule::Kind::ProbeCommit;
  res.fit = fit_boost(aug, aug_spec, stop);
  if (!res.fit.aborted && res.fit.iterations() < aug_spec.m_max)
    res.probe_iteration = res.fit.iterations() + 1;
  return res;
}

// ------------------------------------------------------- stability selection

PferResult pfer_solve(int q, int p, std::optional<double> pi_thr,
                      std::optional<double> pfer) {
  if (q < 1) throw std::invalid_argument("q must be at least 1");
  if (p < 1) throw std::invalid_argument("the learner count must be at least 1");
  if (q > p) throw std::invalid_argument("q cannot exceed the learner count");
  if (pi_thr.has_value() == pfer.has_value())
    throw std::invalid_argument("give exactly one of pi_thr and pfer");
  PferResult res;
  const double qq = static_cast<double>(q) * q;
  if (pi_thr) {
    if (!(*pi_thr > 0.5) || !(*pi_thr <= 1.0))
      throw std::invalid_argument("pi_thr must lie in (0.5, 1]");
    res.pi_thr = *pi_thr;
    res.pfer = qq / ((2.0 * *pi_thr - 1.0) * p);
    return res;
  }
  if (!(*pfer > 0.0)) throw std::invalid_argument("pfer must be positive");
  const double pi = (qq / (p * *pfer) + 1.0) / 2.0;
  if (pi > 1.0)
    throw std::invalid_argument(
        "pfer " + std::to_string(*pfer) + " is unreachable with q=" +
        std::to_string(q) + ", p=" + std::to_string(p) +
        "; the bound needs pfer >= " + std::to_string(qq / p));
  res.pi_thr = pi;
  res.pfer = *pfer;
  return res;
}

StabselResult stability_select(const Dataset& train, const ModelSpec& spec,
                               const StabselParams& par, const StoppingMode& mode) {
  const int n = train.n();
  int total = 0;
  for (const auto& m : spec.menus) total += static_cast<int>(m.size());
  if (par.B < 1) throw std::invalid_argument("B must be at least 1");

  StabselResult res;
  res.total_learners = total;
  const PferResult pr = pfer_solve(par.q, total, par.pi_thr, par.pfer);
  res.pi_thr = pr.pi_thr;
  res.pfer = pr.pfer;

  // each subsample refit selects up to q distinct learners
  StopRule stop;
  stop.kind = StopRule::Kind::DistinctCount;
  stop.distinct_target = par.q;

  const RngStream root(par.seed);
  const int half = n / 2;
  std::vector<std::set<std::pair<int, int>>> picked(par.B);
  const auto run_range = [&](int lo, int hi) {
    for (int b = lo; b < hi; ++b) {
      RngStream rb = root.derive(static_cast<std::uint64_t>(b) + 1);
      const Dataset sub = train.rows(rb.subsample(n, half));
      const BoostFit f = fit_boost(sub, spec, stop);
      for (const SelectionEvent& e : f.events)
        if (e.learner > 0) picked[b].insert({e.param, e.learner});
    }
  };
  const int threads = std::max(1, par.threads);
  if (threads == 1) {
    run_range(0, par.B);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(threads);
    for (int t = 0; t < threads; ++t) {
      const int lo = static_cast<int>(static_cast<long long>(par.B) * t / threads);
      const int hi = static_cast<int>(static_cast<long long>(par.B) * (t + 1) / threads);
      pool.emplace_back([&, t, lo, hi] {
        try {
          run_range(lo, hi);
        } catch (...) {
          errs[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errs)
      if (e) std::rethrow_exception(e);
  }

  for (int k = 0; k < kNumParams; ++k) {
    res.frequency[k].assign(spec.menus[k].size() + 1, 0.0);
    res.stable[k].assign(spec.menus[k].size() + 1, 0);
  }
  for (const auto& sel : picked)
    for (const auto& [k, j] : sel) res.frequency[k][j] += 1.0;
  for (int k = 0; k < kNumParams; ++k)
    for (std::size_t j = 1; j < res.frequency[k].size(); ++j) {
      res.frequency[k][j] /= par.B;
      res.stable[k][j] = res.frequency[k][j] >= res.pi_thr ? 1 : 0;
    }

  // restricted full-data refit on the stable set, with room to converge
  ModelSpec restricted = spec;
  for (int k = 0; k < kNumParams; ++k) {
    restricted.menus[k].clear();
    for (std::size_t j = 1; j < res.stable[k].size(); ++j)
      if (res.stable[k][j]) restricted.menus[k].push_back(spec.menus[k][j - 1]);
  }
  restricted.m_max = 2 * spec.m_max;
  res.final_fit = fit_boost(train, restricted);
  const MstopResult ms = select_mstop(res.final_fit, train, mode);
  res.m_stop = ms.m_stop;
  res.final_fit.m_stop = ms.m_stop;
  return res;
}

// ---------------------------------------------------------------- deselection

std::array<std::vector<double>, kNumParams> risk_attribution(const BoostFit& fit,
                                                             int m_stop) {
  if (m_stop < 0 || m_stop > fit.iterations())
    throw std::out_of_range("risk_attribution: m_stop out of range");
  std::array<std::vector<double>, kNumParams> attr;
  for (int k = 0; k < kNumParams; ++k) attr[k].assign(fit.menu[k].size(), 0.0);
  for (const SelectionEvent& e : fit.events) {
    if (e.iteration > m_stop) break;
    attr[e.param][e.learner] += fit.risk_at(e.iteration - 1) - fit.risk_at(e.iteration);
  }
  return attr;
}

DeselectResult deselect_refit(const BoostFit& fit, const Dataset& train, double tau,
                              int m_stop) {
  if (tau < 0.0) throw std::invalid_argument("tau must be nonnegative");
  DeselectResult res;
  res.attribution = risk_attribution(fit, m_stop);
  res.total_reduction = fit.risk_at(0) - fit.risk_at(m_stop);

  const double cut = tau * res.total_reduction;
  ModelSpec restricted = fit.spec;
  for (int k = 0; k < kNumParams; ++k) {
    res.kept[k].assign(fit.menu[k].size(), 0);
    res.kept[k][0] = 1;  // intercepts always stay
    restricted.menus[k].clear();
    for (std::size_t j = 1; j < fit.menu[k].size(); ++j) {
      if (res.attribution[k][j] >= cut) {
        res.kept[k][j] = 1;
        restricted.menus[k].push_back(fit.spec.menus[k][j - 1]);
      }
    }
  }
  restricted.m_max = m_stop;
  res.fit = fit_boost(train, restricted, StopRule{}, fit.offsets);
  res.fit.m_stop = m_stop;
  return res;
}

}  // namespace cpb
