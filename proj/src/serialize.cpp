#include "copulaboost/serialize.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "copulaboost/version.hpp"
#include "json.hpp"

namespace cpb {

namespace {

using nlohmann::json;

json vec_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd vec_from_json(const json& a) {
  Eigen::VectorXd v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<int>(i)] = a[i].get<double>();
  return v;
}

const char* kind_name(LearnerKind k) {
  switch (k) {
    case LearnerKind::Intercept: return "intercept";
    case LearnerKind::Linear: return "linear";
    case LearnerKind::PSpline: return "pspline";
  }
  throw std::logic_error("unreachable");
}

LearnerKind kind_from(const std::string& s) {
  if (s == "intercept") return LearnerKind::Intercept;
  if (s == "linear") return LearnerKind::Linear;
  if (s == "pspline") return LearnerKind::PSpline;
  throw std::runtime_error("unknown learner kind: " + s);
}

json design_to_json(const LearnerDesign& d) {
  json j;
  j["kind"] = kind_name(d.spec.kind);
  j["covariate"] = d.spec.covariate;
  j["name"] = d.name;
  j["is_probe"] = d.is_probe;
  if (d.spec.kind == LearnerKind::PSpline) {
    j["inner_knots"] = d.spec.inner_knots;
    j["degree"] = d.spec.degree;
    j["penalty_order"] = d.spec.penalty_order;
    j["df"] = d.spec.df;
    j["knot_lo"] = d.knot_lo;
    j["knot_step"] = d.knot_step;
    j["lambda"] = d.lambda;
  }
  if (d.spec.kind == LearnerKind::Linear) j["center"] = d.center;
  j["n_basis"] = d.n_basis;
  return j;
}

LearnerDesign design_from_json(const json& j) {
  LearnerDesign d;
  d.spec.kind = kind_from(j.at("kind").get<std::string>());
  d.spec.covariate = j.at("covariate").get<int>();
  d.name = j.at("name").get<std::string>();
  d.is_probe = j.at("is_probe").get<bool>();
  if (d.spec.kind == LearnerKind::PSpline) {
    d.spec.inner_knots = j.at("inner_knots").get<int>();
    d.spec.degree = j.at("degree").get<int>();
    d.spec.penalty_order = j.at("penalty_order").get<int>();
    d.spec.df = j.at("df").get<double>();
    d.knot_lo = j.at("knot_lo").get<double>();
    d.knot_step = j.at("knot_step").get<double>();
    d.lambda = j.at("lambda").get<double>();
  }
  if (d.spec.kind == LearnerKind::Linear) d.center = j.at("center").get<double>();
  d.n_basis = j.at("n_basis").get<int>();
  return d;
}

json spec_to_json(const ModelSpec& s) {
  json j;
  j["margin1"] = margin_name(s.margin1);
  j["margin2"] = margin_name(s.margin2);
  j["copula"] = copula_name(s.copula);
  j["nu"] = s.nu;
  j["m_max"] = s.m_max;
  j["stabilization"] = stabilization_name(s.stabilization);
  json menus = json::array();
  for (const auto& menu : s.menus) {
    json m = json::array();
    for (const LearnerSpec& ls : menu) {
      json e;
      e["kind"] = kind_name(ls.kind);
      e["covariate"] = ls.covariate;
      if (ls.kind == LearnerKind::PSpline) {
        e["inner_knots"] = ls.inner_knots;
        e["degree"] = ls.degree;
        e["penalty_order"] = ls.penalty_order;
        e["df"] = ls.df;
      }
      m.push_back(std::move(e));
    }
    menus.push_back(std::move(m));
  }
  j["menus"] = std::move(menus);
  return j;
}

ModelSpec spec_from_json(const json& j) {
  ModelSpec s;
  s.margin1 = margin_from_string(j.at("margin1").get<std::string>());
  s.margin2 = margin_from_string(j.at("margin2").get<std::string>());
  s.copula = copula_from_string(j.at("copula").get<std::string>());
  s.nu = j.at("nu").get<double>();
  s.m_max = j.at("m_max").get<int>();
  s.stabilization = stabilization_from_string(j.at("stabilization").get<std::string>());
  const json& menus = j.at("menus");
  if (menus.size() != kNumParams) throw std::runtime_error("bad menu count");
  for (int k = 0; k < kNumParams; ++k) {
    for (const json& e : menus[k]) {
      LearnerSpec ls;
      ls.kind = kind_from(e.at("kind").get<std::string>());
      ls.covariate = e.at("covariate").get<int>();
      if (ls.kind == LearnerKind::PSpline) {
        ls.inner_knots = e.at("inner_knots").get<int>();
        ls.degree = e.at("degree").get<int>();
        ls.penalty_order = e.at("penalty_order").get<int>();
        ls.df = e.at("df").get<double>();
      }
      s.menus[k].push_back(ls);
    }
  }
  return s;
}

// risk values can be +inf on aborted fits; JSON numbers cannot carry that
json risk_to_json(double r) {
  if (std::isfinite(r)) return r;
  return std::string(r > 0 ? "inf" : "-inf");
}

double risk_from_json(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw std::runtime_error("bad risk value: " + s);
  }
  return j.get<double>();
}

}  // namespace

std::string fit_to_json(const BoostFit& fit) {
  json j;
  j["format"] = "copulaboost-fit";
  j["format_version"] = kFitFormatVersion;
  j["library_version"] = kVersion;
  j["spec"] = spec_to_json(fit.spec);
  j["offsets"] = fit.offsets;
  json menus = json::array();
  json coefs = json::array();
  for (int k = 0; k < kNumParams; ++k) {
    json m = json::array();
    for (const LearnerDesign& d : fit.menu[k]) m.push_back(design_to_json(d));
    menus.push_back(std::move(m));
    json c = json::array();
    for (const Eigen::VectorXd& v : fit.coef[k]) c.push_back(vec_to_json(v));
    coefs.push_back(std::move(c));
  }
  j["menu"] = std::move(menus);
  j["coef"] = std::move(coefs);
  json events = json::array();
  for (const SelectionEvent& e : fit.events) {
    json je;
    je["iteration"] = e.iteration;
    je["param"] = e.param;
    je["learner"] = e.learner;
    je["risk"] = risk_to_json(e.risk);
    je["delta"] = vec_to_json(e.delta);
    events.push_back(std::move(je));
  }
  j["events"] = std::move(events);
  j["risk_start"] = risk_to_json(fit.risk_start);
  json rp = json::array();
  for (double r : fit.risk_path) rp.push_back(risk_to_json(r));
  j["risk_path"] = std::move(rp);
  if (fit.m_stop) j["m_stop"] = *fit.m_stop;
  j["aborted"] = fit.aborted;
  j["abort_reason"] = fit.abort_reason;
  j["gradient_components_zeroed"] = fit.gradient_components_zeroed;
  return j.dump(2);
}

BoostFit fit_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("fit artifact is not valid JSON: ") + e.what());
  }
  if (j.value("format", "") != "copulaboost-fit")
    throw std::runtime_error("not a fit artifact");
  const int ver = j.at("format_version").get<int>();
  if (ver != kFitFormatVersion)
    throw std::runtime_error("unsupported fit format version " + std::to_string(ver));
  BoostFit fit;
  fit.spec = spec_from_json(j.at("spec"));
  const auto& off = j.at("offsets");
  if (off.size() != kNumParams) throw std::runtime_error("bad offsets length");
  for (int k = 0; k < kNumParams; ++k) fit.offsets[k] = off[k].get<double>();
  const json& menus = j.at("menu");
  const json& coefs = j.at("coef");
  if (menus.size() != kNumParams || coefs.size() != kNumParams)
    throw std::runtime_error("bad menu layout");
  for (int k = 0; k < kNumParams; ++k) {
    for (const json& e : menus[k]) fit.menu[k].push_back(design_from_json(e));
    for (const json& e : coefs[k]) fit.coef[k].push_back(vec_from_json(e));
    if (fit.menu[k].size() != fit.coef[k].size())
      throw std::runtime_error("menu and coefficient lengths disagree");
  }
  for (const json& je : j.at("events")) {
    SelectionEvent e;
    e.iteration = je.at("iteration").get<int>();
    e.param = je.at("param").get<int>();
    e.learner = je.at("learner").get<int>();
    e.risk = risk_from_json(je.at("risk"));
    e.delta = vec_from_json(je.at("delta"));
    if (e.param < 0 || e.param >= kNumParams ||
        e.learner < 0 || e.learner >= static_cast<int>(fit.menu[e.param].size()))
      throw std::runtime_error("event references an unknown learner");
    fit.events.push_back(std::move(e));
  }
  fit.risk_start = risk_from_json(j.at("risk_start"));
  for (const json& r : j.at("risk_path")) fit.risk_path.push_back(risk_from_json(r));
  if (fit.risk_path.size() != fit.events.size())
    throw std::runtime_error("risk path and event counts disagree");
  if (j.contains("m_stop")) fit.m_stop = j.at("m_stop").get<int>();
  fit.aborted = j.at("aborted").get<bool>();
  fit.abort_reason = j.at("abort_reason").get<std::string>();
  fit.gradient_components_zeroed = j.at("gradient_components_zeroed").get<int>();
  return fit;
}

void save_fit(const BoostFit& fit, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << fit_to_json(fit) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

BoostFit load_fit(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return fit_from_json(ss.str());
}

}  // namespace cpb
