#include "copulaboost/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <stdexcept>
#include <tuple>
#include <utility>

#include "copulaboost/rng.hpp"
#include "mathutil.hpp"

namespace cpb {

using detail::clamp_log_term;
using detail::clamp_unit;
using detail::kUMax;
using detail::kUMin;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------------------
// model.hpp helpers

GradientStabilization stabilization_from_string(const std::string& s) {
  if (s == "none") return GradientStabilization::None;
  if (s == "mad") return GradientStabilization::Mad;
  throw std::invalid_argument("unknown gradient stabilization: " + s);
}

std::string stabilization_name(GradientStabilization s) {
  return s == GradientStabilization::Mad ? "mad" : "none";
}

std::vector<LearnerSpec> covariate_menu(LearnerKind kind, int p) {
  if (kind == LearnerKind::Intercept)
    throw std::invalid_argument("covariate_menu: intercepts are implicit");
  std::vector<LearnerSpec> menu(p);
  for (int j = 0; j < p; ++j) {
    menu[j].kind = kind;
    menu[j].covariate = j;
  }
  return menu;
}

void set_all_menus(ModelSpec& spec, const std::vector<LearnerSpec>& menu) {
  for (auto& m : spec.menus) m = menu;
}

bool is_probe_name(const std::string& name) {
  const std::string suf = kProbeSuffix;
  return name.size() >= suf.size() &&
         name.compare(name.size() - suf.size(), suf.size(), suf) == 0;
}

// ---------------------------------------------------------------------------
// joint likelihood machinery

double empirical_risk(const Dataset& d, const ModelSpec& spec, const EtaMatrix& eta) {
  const int n = d.n();
  double s1 = 0.0, s2 = 0.0, sc = 0.0;
  for (int i = 0; i < n; ++i) {
    const MarginParams p1 =
        margin_params_from_eta(spec.margin1, eta(i, kMu1), eta(i, kSigma1));
    const MarginParams p2 =
        margin_params_from_eta(spec.margin2, eta(i, kMu2), eta(i, kSigma2));
    s1 += clamp_log_term(margin_log_pdf(spec.margin1, d.y1[i], p1));
    s2 += clamp_log_term(margin_log_pdf(spec.margin2, d.y2[i], p2));
    const double u = clamp_unit(margin_cdf(spec.margin1, d.y1[i], p1));
    const double v = clamp_unit(margin_cdf(spec.margin2, d.y2[i], p2));
    sc += copula_log_density(spec.copula, u, v, eta(i, kRho));
  }
  if (!std::isfinite(s1) || !std::isfinite(s2) || !std::isfinite(sc)) return kInf;
  return -(s1 + s2 + sc);
}

namespace {

double median_of(std::vector<double>& v) {
  const std::size_t n = v.size();
  auto mid = v.begin() + n / 2;
  std::nth_element(v.begin(), mid, v.end());
  double hi = *mid;
  if (n % 2 == 1) return hi;
  double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

}  // namespace

Eigen::MatrixXd negative_gradients(const Dataset& d, const ModelSpec& spec,
                                   const EtaMatrix& eta, int* n_zeroed) {
  const int n = d.n();
  Eigen::MatrixXd g(n, kNumParams);
  int zeroed = 0;
  for (int i = 0; i < n; ++i) {
    const MarginParams p1 =
        margin_params_from_eta(spec.margin1, eta(i, kMu1), eta(i, kSigma1));
    const MarginParams p2 =
        margin_params_from_eta(spec.margin2, eta(i, kMu2), eta(i, kSigma2));
    const double u_raw = margin_cdf(spec.margin1, d.y1[i], p1);
    const double v_raw = margin_cdf(spec.margin2, d.y2[i], p2);
    // where the copula input sits on its clamp boundary the chain term is a
    // constant, so its contribution to the gradient is dropped
    const bool u_edge = !(u_raw > kUMin && u_raw < kUMax);
    const bool v_edge = !(v_raw > kUMin && v_raw < kUMax);
    const CopulaScore cs =
        copula_score(spec.copula, clamp_unit(u_raw), clamp_unit(v_raw), eta(i, kRho));
    const MarginScore s1 = margin_score(spec.margin1, d.y1[i], eta(i, kMu1), eta(i, kSigma1));
    const MarginScore s2 = margin_score(spec.margin2, d.y2[i], eta(i, kMu2), eta(i, kSigma2));
    const MarginCdfScore c1 =
        margin_cdf_score(spec.margin1, d.y1[i], eta(i, kMu1), eta(i, kSigma1));
    const MarginCdfScore c2 =
        margin_cdf_score(spec.margin2, d.y2[i], eta(i, kMu2), eta(i, kSigma2));
    g(i, kMu1) = s1.d_eta_mu + (u_edge ? 0.0 : cs.d_u * c1.d_eta_mu);
    g(i, kSigma1) = s1.d_eta_sigma + (u_edge ? 0.0 : cs.d_u * c1.d_eta_sigma);
    g(i, kMu2) = s2.d_eta_mu + (v_edge ? 0.0 : cs.d_v * c2.d_eta_mu);
    g(i, kSigma2) = s2.d_eta_sigma + (v_edge ? 0.0 : cs.d_v * c2.d_eta_sigma);
    g(i, kRho) = cs.d_eta;
    for (int k = 0; k < kNumParams; ++k) {
      if (!std::isfinite(g(i, k))) {
        g(i, k) = 0.0;
        ++zeroed;
      }
    }
  }
  if (n_zeroed) *n_zeroed = zeroed;
  if (spec.stabilization == GradientStabilization::Mad) {
    std::vector<double> work(n);
    for (int k = 0; k < kNumParams; ++k) {
      for (int i = 0; i < n; ++i) work[i] = g(i, k);
      const double med = median_of(work);
      for (int i = 0; i < n; ++i) work[i] = std::abs(g(i, k) - med);
      const double mad = median_of(work);
      if (mad > 1e-10) g.col(k) /= mad;
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// constant starts

std::array<double, kNumParams> moment_offsets(const Dataset& d, const ModelSpec& spec) {
  std::array<double, kNumParams> off{};
  const auto side = [&](const Eigen::VectorXd& y, Margin m, double& eta_mu,
                        double& eta_sigma) {
    const int n = static_cast<int>(y.size());
    switch (m) {
      case Margin::Gaussian: {
        const double mean = y.mean();
        const double sd = std::max(std::sqrt((y.array() - mean).square().sum() / (n - 1)),
                                   1e-8);
        eta_mu = mean;
        eta_sigma = std::log(sd);
        break;
      }
      case Margin::LogNormal: {
        const Eigen::ArrayXd ly = y.array().log();
        const double mean = ly.mean();
        const double sd = std::max(std::sqrt((ly - mean).square().sum() / (n - 1)), 1e-8);
        eta_mu = mean;
        eta_sigma = std::log(sd);
        break;
      }
      case Margin::LogLogistic: {
        // log Y is logistic(log scale, 1/shape); match the median and the sd
        std::vector<double> ly(y.data(), y.data() + n);
        for (double& t : ly) t = std::log(t);
        std::vector<double> med_work = ly;
        const double med = median_of(med_work);
        double mean = 0.0;
        for (double t : ly) mean += t;
        mean /= n;
        double ss = 0.0;
        for (double t : ly) ss += (t - mean) * (t - mean);
        const double sd = std::max(std::sqrt(ss / (n - 1)), 1e-8);
        eta_mu = med;
        eta_sigma = std::log(std::numbers::pi / (std::sqrt(3.0) * sd));
        break;
      }
      case Margin::Gamma: {
        const double mean = y.mean();
        const double sd = std::max(std::sqrt((y.array() - mean).square().sum() / (n - 1)),
                                   1e-8);
        eta_mu = std::log(mean);
        eta_sigma = std::log(std::max(sd / mean, 1e-8));
        break;
      }
    }
  };
  side(d.y1, spec.margin1, off[kMu1], off[kSigma1]);
  side(d.y2, spec.margin2, off[kMu2], off[kSigma2]);
  off[kRho] = 0.0;
  return off;
}

std::array<double, kNumParams> compute_offsets(const Dataset& d, const ModelSpec& spec) {
  std::array<double, kNumParams> off = moment_offsets(d, spec);
  const int n = d.n();
  EtaMatrix eta(n, kNumParams);
  const auto risk_at = [&](const std::array<double, kNumParams>& o) {
    for (int k = 0; k < kNumParams; ++k) eta.col(k).setConstant(o[k]);
    return empirical_risk(d, spec, eta);
  };
  double r0 = risk_at(off);
  const std::array<double, kNumParams> moment = off;
  const double moment_risk = r0;
  if (!std::isfinite(r0)) return off;

  const double h = 1e-4;
  for (int sweep = 0; sweep < 50; ++sweep) {
    const double sweep_start = r0;
    for (int k = 0; k < kNumParams; ++k) {
      std::array<double, kNumParams> o = off;
      o[k] = off[k] + h;
      const double rp = risk_at(o);
      o[k] = off[k] - h;
      const double rm = risk_at(o);
      if (!std::isfinite(rp) || !std::isfinite(rm)) continue;
      const double d1 = (rp - rm) / (2.0 * h);
      const double d2 = (rp - 2.0 * r0 + rm) / (h * h);
      if (d1 == 0.0) continue;
      double step = (d2 > 0.0 && std::isfinite(d2)) ? -d1 / d2
                                                    : (d1 > 0.0 ? -0.1 : 0.1);
      for (int half = 0; half < 30; ++half) {
        o = off;
        o[k] = off[k] + step;
        const double r_new = risk_at(o);
        if (r_new < r0) {
          off = o;
          r0 = r_new;
          break;
        }
        step *= 0.5;
      }
    }
    if (sweep_start - r0 < 1e-8) break;
  }
  if (r0 > moment_risk) return moment;
  return off;
}

// ---------------------------------------------------------------------------
// fit state: per-observation likelihood caches with single-column updates

namespace {

// proposed replacement values for one likelihood block
struct Scratch {
  Eigen::VectorXd logf, u, logc;
  double sf = 0.0, sc = 0.0;
  void resize(int n) {
    logf.resize(n);
    u.resize(n);
    logc.resize(n);
  }
};

class LikState {
 public:
  void init(const Dataset& d, const ModelSpec& spec, const EtaMatrix& eta) {
    d_ = &d;
    spec_ = &spec;
    const int n = d.n();
    logf1_.resize(n);
    logf2_.resize(n);
    logc_.resize(n);
    u_.resize(n);
    v_.resize(n);
    s1_ = s2_ = sc_ = 0.0;
    for (int i = 0; i < n; ++i) {
      const MarginParams p1 =
          margin_params_from_eta(spec.margin1, eta(i, kMu1), eta(i, kSigma1));
      const MarginParams p2 =
          margin_params_from_eta(spec.margin2, eta(i, kMu2), eta(i, kSigma2));
      logf1_[i] = clamp_log_term(margin_log_pdf(spec.margin1, d.y1[i], p1));
      logf2_[i] = clamp_log_term(margin_log_pdf(spec.margin2, d.y2[i], p2));
      u_[i] = clamp_unit(margin_cdf(spec.margin1, d.y1[i], p1));
      v_[i] = clamp_unit(margin_cdf(spec.margin2, d.y2[i], p2));
      logc_[i] = copula_log_density(spec.copula, u_[i], v_[i], eta(i, kRho));
      s1_ += logf1_[i];
      s2_ += logf2_[i];
      sc_ += logc_[i];
    }
  }

  double risk() const {
    if (!std::isfinite(s1_) || !std::isfinite(s2_) || !std::isfinite(sc_)) return kInf;
    return -(s1_ + s2_ + sc_);
  }

  // risk if column k of eta were replaced by col_new; fills s for a later commit
  double trial(int k, const EtaMatrix& eta, const Eigen::VectorXd& col_new,
               Scratch& s) const {
    const int n = d_->n();
    double sf = 0.0, sc = 0.0;
    if (k == kMu1 || k == kSigma1 || k == kMu2 || k == kSigma2) {
      const bool side1 = (k == kMu1 || k == kSigma1);
      const Margin m = side1 ? spec_->margin1 : spec_->margin2;
      const Eigen::VectorXd& y = side1 ? d_->y1 : d_->y2;
      const int mu_col = side1 ? kMu1 : kMu2;
      const bool mu_moves = (k == mu_col);
      for (int i = 0; i < n; ++i) {
        const double emu = mu_moves ? col_new[i] : eta(i, mu_col);
        const double esg = mu_moves ? eta(i, mu_col + 1) : col_new[i];
        const MarginParams p = margin_params_from_eta(m, emu, esg);
        const double lf = clamp_log_term(margin_log_pdf(m, y[i], p));
        const double uu = clamp_unit(margin_cdf(m, y[i], p));
        const double lc = side1
                              ? copula_log_density(spec_->copula, uu, v_[i], eta(i, kRho))
                              : copula_log_density(spec_->copula, u_[i], uu, eta(i, kRho));
        s.logf[i] = lf;
        s.u[i] = uu;
        s.logc[i] = lc;
        sf += lf;
        sc += lc;
      }
      s.sf = sf;
      s.sc = sc;
      if (!std::isfinite(sf) || !std::isfinite(sc)) return kInf;
      const double other = side1 ? s2_ : s1_;
      if (!std::isfinite(other)) return kInf;
      return side1 ? -(sf + s2_ + sc) : -(s1_ + sf + sc);
    }
    // copula column: margins untouched
    for (int i = 0; i < n; ++i) {
      const double lc = copula_log_density(spec_->copula, u_[i], v_[i], col_new[i]);
      s.logc[i] = lc;
      sc += lc;
    }
    s.sc = sc;
    if (!std::isfinite(s1_) || !std::isfinite(s2_) || !std::isfinite(sc)) return kInf;
    return -(s1_ + s2_ + sc);
  }

  void commit(int k, Scratch& s) {
    if (k == kMu1 || k == kSigma1) {
      logf1_.swap(s.logf);
      u_.swap(s.u);
      s1_ = s.sf;
    } else if (k == kMu2 || k == kSigma2) {
      logf2_.swap(s.logf);
      v_.swap(s.u);
      s2_ = s.sf;
    }
    logc_.swap(s.logc);
    sc_ = s.sc;
  }

 private:
  const Dataset* d_ = nullptr;
  const ModelSpec* spec_ = nullptr;
  Eigen::VectorXd logf1_, logf2_, logc_, u_, v_;
  double s1_ = 0.0, s2_ = 0.0, sc_ = 0.0;
};

// unique bound learners shared across the five parameter menus
struct Engine {
  std::vector<BoundLearner> designs;
  std::array<std::vector<int>, kNumParams> menu;  // design index per entry

  using Key = std::tuple<int, int, int, int, int, double>;
  static Key key_of(const LearnerSpec& s) {
    if (s.kind == LearnerKind::PSpline)
      return {static_cast<int>(s.kind), s.covariate, s.inner_knots, s.degree,
              s.penalty_order, s.df};
    return {static_cast<int>(s.kind), s.covariate, 0, 0, 0, 0.0};
  }

  Engine(const Dataset& d, const ModelSpec& spec) {
    std::map<Key, int> index;
    const Eigen::VectorXd dummy_x = Eigen::VectorXd::Zero(d.n());
    const auto bind = [&](const LearnerSpec& s) {
      const auto key = key_of(s);
      if (auto it = index.find(key); it != index.end()) return it->second;
      std::string name = "(intercept)";
      Eigen::VectorXd x = dummy_x;
      bool probe = false;
      if (s.kind != LearnerKind::Intercept) {
        if (s.covariate < 0 || s.covariate >= d.p())
          throw std::invalid_argument("learner covariate index out of range: " +
                                      std::to_string(s.covariate));
        name = d.names[s.covariate];
        x = d.X.col(s.covariate);
        probe = is_probe_name(name);
      }
      designs.emplace_back(s, x, std::move(name), probe);
      const int id = static_cast<int>(designs.size()) - 1;
      index.emplace(key, id);
      return id;
    };
    LearnerSpec icpt;  // kind Intercept, covariate -1
    for (int k = 0; k < kNumParams; ++k) {
      menu[k].push_back(bind(icpt));
      for (const LearnerSpec& s : spec.menus[k]) {
        if (s.kind == LearnerKind::Intercept)
          throw std::invalid_argument("menus must not list intercepts explicitly");
        menu[k].push_back(bind(s));
      }
    }
  }
};

void check_domains(const Dataset& d, const ModelSpec& spec) {
  const auto positive = [](Margin m) { return m != Margin::Gaussian; };
  if (positive(spec.margin1) && d.y1.minCoeff() <= 0.0)
    throw std::invalid_argument(margin_name(spec.margin1) +
                                " margin requires positive y1");
  if (positive(spec.margin2) && d.y2.minCoeff() <= 0.0)
    throw std::invalid_argument(margin_name(spec.margin2) +
                                " margin requires positive y2");
}

}  // namespace

// ---------------------------------------------------------------------------
// fitting

BoostFit fit_boost(const Dataset& train, const ModelSpec& spec, const StopRule& stop,
                   const std::optional<std::array<double, kNumParams>>& offsets) {
  if (train.n() < 2) throw std::invalid_argument("need at least two observations");
  if (!(spec.nu > 0.0) || spec.nu > 1.0)
    throw std::invalid_argument("step length nu must be in (0, 1]");
  if (spec.m_max < 0) throw std::invalid_argument("m_max must be nonnegative");
  if (stop.kind == StopRule::Kind::DistinctCount && stop.distinct_target <= 0)
    throw std::invalid_argument("distinct_target must be positive");
  check_domains(train, spec);

  Engine eng(train, spec);
  const int n = train.n();

  BoostFit fit;
  fit.spec = spec;
  fit.offsets = offsets ? *offsets : compute_offsets(train, spec);
  for (int k = 0; k < kNumParams; ++k) {
    const int q = static_cast<int>(eng.menu[k].size());
    fit.menu[k].reserve(q);
    fit.coef[k].reserve(q);
    for (int j = 0; j < q; ++j) {
      const BoundLearner& bl = eng.designs[eng.menu[k][j]];
      fit.menu[k].push_back(bl.design());
      fit.coef[k].push_back(Eigen::VectorXd::Zero(bl.n_basis()));
    }
  }

  EtaMatrix eta(n, kNumParams);
  for (int k = 0; k < kNumParams; ++k) eta.col(k).setConstant(fit.offsets[k]);

  LikState state;
  state.init(train, spec, eta);
  fit.risk_start = state.risk();
  if (!std::isfinite(fit.risk_start)) {
    fit.aborted = true;
    fit.abort_reason = "offset risk is not finite";
    return fit;
  }

  const int n_designs = static_cast<int>(eng.designs.size());
  std::vector<Eigen::MatrixXd> ptg(n_designs);
  for (int s = 0; s < n_designs; ++s)
    ptg[s].resize(eng.designs[s].n_basis(), kNumParams);
  std::array<Scratch, kNumParams> scratch;
  for (auto& s : scratch) s.resize(n);
  std::array<Eigen::VectorXd, kNumParams> col_new;
  for (auto& c : col_new) c.resize(n);

  std::set<std::pair<int, int>> distinct;
  fit.risk_path.reserve(spec.m_max);

  for (int m = 1; m <= spec.m_max; ++m) {
    int zeroed = 0;
    const Eigen::MatrixXd g = negative_gradients(train, spec, eta, &zeroed);
    fit.gradient_components_zeroed += zeroed;

    for (int s = 0; s < n_designs; ++s)
      ptg[s].noalias() = eng.designs[s].B().transpose() * g;

    // inner winner per parameter: best penalized LS fit to its gradient
    struct Cand {
      int j = -1;
      Eigen::VectorXd beta;
      double rss = kInf;
    };
    std::array<Cand, kNumParams> cand;
    for (int k = 0; k < kNumParams; ++k) {
      const double gtg = g.col(k).squaredNorm();
      for (int j = 0; j < static_cast<int>(eng.menu[k].size()); ++j) {
        const BoundLearner& bl = eng.designs[eng.menu[k][j]];
        Eigen::VectorXd beta = bl.solve(ptg[eng.menu[k][j]].col(k));
        const double rss = bl.rss(beta, ptg[eng.menu[k][j]].col(k), gtg);
        if (rss < cand[k].rss) {
          cand[k].j = j;
          cand[k].beta = std::move(beta);
          cand[k].rss = rss;
        }
      }
    }

    // outer winner: the update with the lowest candidate risk
    int best_k = -1;
    double best_risk = kInf;
    for (int k = 0; k < kNumParams; ++k) {
      if (cand[k].j < 0) continue;
      const BoundLearner& bl = eng.designs[eng.menu[k][cand[k].j]];
      cand[k].beta *= spec.nu;
      col_new[k].noalias() = bl.B() * cand[k].beta;
      col_new[k] += eta.col(k);
      const double r = state.trial(k, eta, col_new[k], scratch[k]);
      if (r < best_risk) {
        best_risk = r;
        best_k = k;
      }
    }
    if (best_k < 0) {
      fit.aborted = true;
      fit.abort_reason = "no finite candidate risk at iteration " + std::to_string(m);
      break;
    }

    const int best_j = cand[best_k].j;
    if (stop.kind == StopRule::Kind::ProbeCommit &&
        eng.designs[eng.menu[best_k][best_j]].design().is_probe)
      break;  // a shadow covariate won: stop without committing it

    state.commit(best_k, scratch[best_k]);
    eta.col(best_k) = col_new[best_k];
    fit.coef[best_k][best_j] += cand[best_k].beta;
    SelectionEvent ev;
    ev.iteration = m;
    ev.param = best_k;
    ev.learner = best_j;
    ev.risk = best_risk;
    ev.delta = std::move(cand[best_k].beta);
    fit.events.push_back(std::move(ev));
    fit.risk_path.push_back(best_risk);

    if (stop.kind == StopRule::Kind::DistinctCount && best_j > 0) {
      distinct.insert({best_k, best_j});
      if (static_cast<int>(distinct.size()) >= stop.distinct_target) break;
    }
  }
  return fit;
}

// ---------------------------------------------------------------------------
// BoostFit queries

double BoostFit::risk_at(int m) const {
  if (m < 0 || m > iterations())
    throw std::out_of_range("risk_at: iteration out of range");
  return m == 0 ? risk_start : risk_path[m - 1];
}

std::array<std::set<int>, kNumParams> BoostFit::selected_covariates(int m) const {
  std::array<std::set<int>, kNumParams> sel;
  for (const SelectionEvent& e : events) {
    if (e.iteration > m) break;
    if (e.learner == 0) continue;
    const LearnerDesign& d = menu[e.param][e.learner];
    if (d.is_probe) continue;
    sel[e.param].insert(d.spec.covariate);
  }
  return sel;
}

int BoostFit::distinct_learners(int m) const {
  std::set<std::pair<int, int>> pairs;
  for (const SelectionEvent& e : events) {
    if (e.iteration > m) break;
    if (e.learner > 0) pairs.insert({e.param, e.learner});
  }
  return static_cast<int>(pairs.size());
}

// ---------------------------------------------------------------------------
// prediction

namespace {

// basis matrices for the learners a replay touches, built once per call
class BasisCache {
 public:
  BasisCache(const BoostFit& fit, const Eigen::MatrixXd& X) : fit_(fit), X_(X) {}

  const Eigen::MatrixXd& get(int k, int j) {
    auto it = cache_.find({k, j});
    if (it != cache_.end()) return it->second;
    const LearnerDesign& d = fit_.menu[k][j];
    Eigen::VectorXd x;
    if (d.spec.kind == LearnerKind::Intercept) {
      x = Eigen::VectorXd::Zero(X_.rows());
    } else {
      if (d.spec.covariate >= X_.cols())
        throw std::invalid_argument("prediction matrix lacks covariate column " +
                                    std::to_string(d.spec.covariate));
      x = X_.col(d.spec.covariate);
    }
    return cache_.emplace(std::make_pair(k, j), learner_design_matrix(d, x))
        .first->second;
  }

 private:
  const BoostFit& fit_;
  const Eigen::MatrixXd& X_;
  std::map<std::pair<int, int>, Eigen::MatrixXd> cache_;
};

}  // namespace

EtaMatrix predict_eta(const BoostFit& fit, const Eigen::MatrixXd& X, int m) {
  if (m < 0 || m > fit.iterations())
    throw std::out_of_range("predict_eta: iteration out of range");
  const int n = static_cast<int>(X.rows());
  EtaMatrix eta(n, kNumParams);
  for (int k = 0; k < kNumParams; ++k) eta.col(k).setConstant(fit.offsets[k]);
  BasisCache basis(fit, X);
  Eigen::VectorXd upd(n);
  for (const SelectionEvent& e : fit.events) {
    if (e.iteration > m) break;
    // materialize the product before adding so the replayed additions are
    // the exact operations the fit performed
    upd.noalias() = basis.get(e.param, e.learner) * e.delta;
    eta.col(e.param) += upd;
  }
  return eta;
}

Eigen::MatrixXd predict_params(const BoostFit& fit, const Eigen::MatrixXd& X, int m) {
  const EtaMatrix eta = predict_eta(fit, X, m);
  Eigen::MatrixXd out(eta.rows(), kNumParams);
  for (int i = 0; i < eta.rows(); ++i) {
    const MarginParams p1 =
        margin_params_from_eta(fit.spec.margin1, eta(i, kMu1), eta(i, kSigma1));
    const MarginParams p2 =
        margin_params_from_eta(fit.spec.margin2, eta(i, kMu2), eta(i, kSigma2));
    out(i, 0) = p1.mu;
    out(i, 1) = p1.sigma;
    out(i, 2) = p2.mu;
    out(i, 3) = p2.sigma;
    out(i, 4) = copula_theta_from_eta(fit.spec.copula, eta(i, kRho));
  }
  return out;
}

// ---------------------------------------------------------------------------
// stopping-iteration search

namespace {

// holdout risk after each committed update, replayed on an untouched sample
std::vector<double> holdout_risk_path(const BoostFit& fit, const Dataset& holdout) {
  const int n = holdout.n();
  EtaMatrix eta(n, kNumParams);
  for (int k = 0; k < kNumParams; ++k) eta.col(k).setConstant(fit.offsets[k]);
  LikState state;
  state.init(holdout, fit.spec, eta);
  std::vector<double> risks;
  risks.reserve(fit.iterations() + 1);
  risks.push_back(state.risk());
  BasisCache basis(fit, holdout.X);
  Scratch scratch;
  scratch.resize(n);
  Eigen::VectorXd col(n);
  for (const SelectionEvent& e : fit.events) {
    col.noalias() = basis.get(e.param, e.learner) * e.delta;
    col += eta.col(e.param);
    risks.push_back(state.trial(e.param, eta, col, scratch));
    state.commit(e.param, scratch);
    eta.col(e.param) = col;
  }
  return risks;
}

int first_argmin(const std::vector<double>& r) {
  int best = 0;
  for (int m = 1; m < static_cast<int>(r.size()); ++m)
    if (r[m] < r[best]) best = m;
  return best;
}

}  // namespace

MstopResult select_mstop(const BoostFit& fit, const Dataset& train,
                         const StoppingMode& mode) {
  MstopResult res;
  if (mode.kind == StoppingMode::Kind::Validation) {
    if (!mode.validation) throw std::invalid_argument("validation sample missing");
    res.risk = holdout_risk_path(fit, *mode.validation);
    res.m_stop = first_argmin(res.risk);
    return res;
  }
  // k-fold: refit on each complement, average the holdout curves
  const int folds = mode.folds;
  const int n = train.n();
  if (folds < 2 || folds > n) throw std::invalid_argument("folds must be in [2, n]");
  RngStream rng(mode.seed);
  const std::vector<int> perm = rng.permutation(n);
  std::vector<int> fold_of(n);
  for (int pos = 0; pos < n; ++pos) fold_of[perm[pos]] = pos % folds;

  const int m_max = fit.spec.m_max;
  std::vector<double> mean(m_max + 1, 0.0);
  for (int f = 0; f < folds; ++f) {
    std::vector<int> tr, ho;
    for (int i = 0; i < n; ++i) (fold_of[i] == f ? ho : tr).push_back(i);
    const Dataset d_tr = train.rows(tr);
    const Dataset d_ho = train.rows(ho);
    const BoostFit ft = fit_boost(d_tr, fit.spec, StopRule{});
    std::vector<double> r = holdout_risk_path(ft, d_ho);
    r.resize(m_max + 1, r.back());  // aborted fits keep their last value
    for (int m = 0; m <= m_max; ++m) mean[m] += r[m];
  }
  for (double& v : mean) v /= folds;
  res.risk = std::move(mean);
  res.m_stop = first_argmin(res.risk);
  return res;
}

}  // namespace cpb
