#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <vector>

#include "copulaboost/config.hpp"
#include "copulaboost/scoring.hpp"
#include "copulaboost/serialize.hpp"
#include "copulaboost/study.hpp"
#include "copulaboost/version.hpp"

namespace py = pybind11;
using namespace cpb;

namespace {

std::array<std::vector<bool>, kNumParams> to_bools(
    const std::array<std::vector<char>, kNumParams>& flags) {
  std::array<std::vector<bool>, kNumParams> out;
  for (int k = 0; k < kNumParams; ++k)
    out[k].assign(flags[k].begin(), flags[k].end());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "boosted bivariate copula regression";
  m.attr("__version__") = kVersion;
  m.attr("PARAM_NAMES") =
      std::vector<std::string>(kParamNames, kParamNames + kNumParams);

  // ------------------------------------------------------------------ enums
  py::enum_<Margin>(m, "Margin")
      .value("gaussian", Margin::Gaussian)
      .value("lognormal", Margin::LogNormal)
      .value("loglogistic", Margin::LogLogistic)
      .value("gamma", Margin::Gamma);
  py::enum_<Copula>(m, "Copula")
      .value("gaussian", Copula::Gaussian)
      .value("clayton", Copula::Clayton)
      .value("gumbel", Copula::Gumbel);
  py::enum_<LearnerKind>(m, "LearnerKind")
      .value("intercept", LearnerKind::Intercept)
      .value("linear", LearnerKind::Linear)
      .value("pspline", LearnerKind::PSpline);
  py::enum_<GradientStabilization>(m, "GradientStabilization")
      .value("none", GradientStabilization::None)
      .value("mad", GradientStabilization::Mad);
  py::enum_<Scenario>(m, "Scenario")
      .value("toy", Scenario::Toy)
      .value("A", Scenario::A)
      .value("B", Scenario::B)
      .value("C", Scenario::C);
  py::enum_<Method>(m, "Method")
      .value("classic", Method::Classic)
      .value("probing", Method::Probing)
      .value("stabsel", Method::Stabsel)
      .value("deselect", Method::Deselect);

  m.def("margin_from_string", &margin_from_string, py::arg("name"));
  m.def("copula_from_string", &copula_from_string, py::arg("name"));
  m.def("scenario_from_string", &scenario_from_string, py::arg("name"));

  // ------------------------------------------------------------------- data
  py::class_<Dataset>(m, "Dataset")
      .def(py::init([](Eigen::VectorXd y1, Eigen::VectorXd y2, Eigen::MatrixXd X,
                       std::vector<std::string> names) {
             Dataset d;
             d.y1 = std::move(y1);
             d.y2 = std::move(y2);
             d.X = std::move(X);
             if (names.empty())
               for (int j = 0; j < d.X.cols(); ++j)
                 names.push_back("x" + std::to_string(j + 1));
             d.names = std::move(names);
             return d;
           }),
           py::arg("y1"), py::arg("y2"), py::arg("X"),
           py::arg("names") = std::vector<std::string>{})
      .def_readwrite("y1", &Dataset::y1)
      .def_readwrite("y2", &Dataset::y2)
      .def_readwrite("X", &Dataset::X)
      .def_readwrite("names", &Dataset::names)
      .def_property_readonly("n", &Dataset::n)
      .def_property_readonly("p", &Dataset::p)
      .def("rows", &Dataset::rows, py::arg("idx"));
  m.def("load_dataset", &load_dataset, py::arg("path"));
  m.def("save_dataset", &save_dataset, py::arg("dataset"), py::arg("path"));

  // ------------------------------------------------------------------ model
  py::class_<LearnerSpec>(m, "LearnerSpec")
      .def(py::init<>())
      .def_readwrite("kind", &LearnerSpec::kind)
      .def_readwrite("covariate", &LearnerSpec::covariate)
      .def_readwrite("inner_knots", &LearnerSpec::inner_knots)
      .def_readwrite("degree", &LearnerSpec::degree)
      .def_readwrite("penalty_order", &LearnerSpec::penalty_order)
      .def_readwrite("df", &LearnerSpec::df);
  m.def("covariate_menu", &covariate_menu, py::arg("kind"), py::arg("p"));

  py::class_<ModelSpec>(m, "ModelSpec")
      .def(py::init([](Margin margin1, Margin margin2, Copula copula, double nu,
                       int m_max, GradientStabilization stabilization) {
             ModelSpec s;
             s.margin1 = margin1;
             s.margin2 = margin2;
             s.copula = copula;
             s.nu = nu;
             s.m_max = m_max;
             s.stabilization = stabilization;
             return s;
           }),
           py::arg("margin1") = Margin::Gaussian,
           py::arg("margin2") = Margin::Gaussian,
           py::arg("copula") = Copula::Gaussian, py::arg("nu") = 0.1,
           py::arg("m_max") = 1000,
           py::arg("stabilization") = GradientStabilization::None)
      .def_readwrite("margin1", &ModelSpec::margin1)
      .def_readwrite("margin2", &ModelSpec::margin2)
      .def_readwrite("copula", &ModelSpec::copula)
      .def_readwrite("nu", &ModelSpec::nu)
      .def_readwrite("m_max", &ModelSpec::m_max)
      .def_readwrite("stabilization", &ModelSpec::stabilization)
      .def_readwrite("menus", &ModelSpec::menus)
      .def("set_all_menus",
           [](ModelSpec& s, const std::vector<LearnerSpec>& menu) {
             set_all_menus(s, menu);
           },
           py::arg("menu"));

  // -------------------------------------------------------------------- fit
  py::class_<LearnerDesign>(m, "LearnerDesign")
      .def_readonly("spec", &LearnerDesign::spec)
      .def_readonly("name", &LearnerDesign::name)
      .def_readonly("is_probe", &LearnerDesign::is_probe);
  py::class_<SelectionEvent>(m, "SelectionEvent")
      .def_readonly("iteration", &SelectionEvent::iteration)
      .def_readonly("param", &SelectionEvent::param)
      .def_readonly("learner", &SelectionEvent::learner)
      .def_readonly("risk", &SelectionEvent::risk)
      .def_readonly("delta", &SelectionEvent::delta);
  py::class_<BoostFit>(m, "BoostFit")
      .def_readonly("spec", &BoostFit::spec)
      .def_readonly("offsets", &BoostFit::offsets)
      .def_readonly("menu", &BoostFit::menu)
      .def_readonly("coef", &BoostFit::coef)
      .def_readonly("events", &BoostFit::events)
      .def_readonly("risk_start", &BoostFit::risk_start)
      .def_readonly("risk_path", &BoostFit::risk_path)
      .def_readonly("m_stop", &BoostFit::m_stop)
      .def_readonly("aborted", &BoostFit::aborted)
      .def_readonly("abort_reason", &BoostFit::abort_reason)
      .def_property_readonly("iterations", &BoostFit::iterations)
      .def("risk_at", &BoostFit::risk_at, py::arg("m"))
      .def("selected_covariates", &BoostFit::selected_covariates, py::arg("m"))
      .def("distinct_learners", &BoostFit::distinct_learners, py::arg("m"));
  m.def("fit_boost",
        [](const Dataset& train, const ModelSpec& spec) {
          return fit_boost(train, spec);
        },
        py::arg("train"), py::arg("spec"),
        py::call_guard<py::gil_scoped_release>());
  m.def("predict_eta", &predict_eta, py::arg("fit"), py::arg("X"), py::arg("m"));
  m.def("predict_params", &predict_params, py::arg("fit"), py::arg("X"), py::arg("m"));
  m.def("save_fit", &save_fit, py::arg("fit"), py::arg("path"));
  m.def("load_fit", &load_fit, py::arg("path"));
  m.def("empirical_risk", &empirical_risk, py::arg("data"), py::arg("spec"),
        py::arg("eta"));

  py::class_<MstopResult>(m, "MstopResult")
      .def_readonly("m_stop", &MstopResult::m_stop)
      .def_readonly("risk", &MstopResult::risk);
  m.def("select_mstop_validation",
        [](const BoostFit& fit, const Dataset& train, const Dataset& val) {
          StoppingMode mode;
          mode.kind = StoppingMode::Kind::Validation;
          mode.validation = &val;
          return select_mstop(fit, train, mode);
        },
        py::arg("fit"), py::arg("train"), py::arg("validation"),
        py::call_guard<py::gil_scoped_release>());
  m.def("select_mstop_kfold",
        [](const BoostFit& fit, const Dataset& train, int folds, std::uint64_t seed) {
          StoppingMode mode;
          mode.kind = StoppingMode::Kind::KFold;
          mode.folds = folds;
          mode.seed = seed;
          return select_mstop(fit, train, mode);
        },
        py::arg("fit"), py::arg("train"), py::arg("folds") = 5, py::arg("seed") = 0,
        py::call_guard<py::gil_scoped_release>());

  // -------------------------------------------------------------- selection
  py::class_<ProbingResult>(m, "ProbingResult")
      .def_readonly("fit", &ProbingResult::fit)
      .def_readonly("probe_iteration", &ProbingResult::probe_iteration)
      .def_readonly("augmented", &ProbingResult::augmented);
  m.def("probing_fit", &probing_fit, py::arg("train"), py::arg("spec"),
        py::arg("seed") = 0, py::call_guard<py::gil_scoped_release>());

  py::class_<PferResult>(m, "PferResult")
      .def_readonly("pi_thr", &PferResult::pi_thr)
      .def_readonly("pfer", &PferResult::pfer);
  m.def("pfer_solve",
        [](int q, int p, std::optional<double> pi_thr, std::optional<double> pfer) {
          return pfer_solve(q, p, pi_thr, pfer);
        },
        py::arg("q"), py::arg("p"), py::arg("pi_thr") = std::nullopt,
        py::arg("pfer") = std::nullopt);

  py::class_<StabselResult>(m, "StabselResult")
      .def_readonly("frequency", &StabselResult::frequency)
      .def_property_readonly(
          "stable", [](const StabselResult& r) { return to_bools(r.stable); })
      .def_readonly("pi_thr", &StabselResult::pi_thr)
      .def_readonly("pfer", &StabselResult::pfer)
      .def_readonly("total_learners", &StabselResult::total_learners)
      .def_readonly("final_fit", &StabselResult::final_fit)
      .def_readonly("m_stop", &StabselResult::m_stop);
  m.def("stability_select",
        [](const Dataset& train, const ModelSpec& spec, int q,
           std::optional<double> pi_thr, std::optional<double> pfer, int B,
           std::uint64_t seed, int threads, const Dataset* validation, int folds) {
          StabselParams par;
          par.q = q;
          par.pi_thr = pi_thr;
          par.pfer = pfer;
          par.B = B;
          par.seed = seed;
          par.threads = threads;
          StoppingMode mode;
          if (validation) {
            mode.kind = StoppingMode::Kind::Validation;
            mode.validation = validation;
          } else {
            mode.kind = StoppingMode::Kind::KFold;
            mode.folds = folds;
            mode.seed = seed;
          }
          return stability_select(train, spec, par, mode);
        },
        py::arg("train"), py::arg("spec"), py::arg("q") = 10,
        py::arg("pi_thr") = std::nullopt, py::arg("pfer") = std::nullopt,
        py::arg("B") = 100, py::arg("seed") = 0, py::arg("threads") = 1,
        py::arg("validation") = nullptr, py::arg("folds") = 5,
        py::call_guard<py::gil_scoped_release>());

  m.def("risk_attribution", &risk_attribution, py::arg("fit"), py::arg("m_stop"));
  py::class_<DeselectResult>(m, "DeselectResult")
      .def_readonly("fit", &DeselectResult::fit)
      .def_readonly("attribution", &DeselectResult::attribution)
      .def_property_readonly("kept",
                             [](const DeselectResult& r) { return to_bools(r.kept); })
      .def_readonly("total_reduction", &DeselectResult::total_reduction);
  m.def("deselect_refit", &deselect_refit, py::arg("fit"), py::arg("train"),
        py::arg("tau"), py::arg("m_stop"), py::call_guard<py::gil_scoped_release>());

  // ---------------------------------------------------------------- scoring
  py::class_<PredictiveDraws>(m, "PredictiveDraws")
      .def(py::init([](Eigen::MatrixXd y1, Eigen::MatrixXd y2) {
             return PredictiveDraws{std::move(y1), std::move(y2)};
           }),
           py::arg("y1"), py::arg("y2"))
      .def_readonly("y1", &PredictiveDraws::y1)
      .def_readonly("y2", &PredictiveDraws::y2);
  m.def("neg_log_lik", &neg_log_lik, py::arg("fit"), py::arg("data"), py::arg("m"));
  m.def("sample_predictive", &sample_predictive, py::arg("fit"), py::arg("X"),
        py::arg("m"), py::arg("draws"), py::arg("seed") = 0,
        py::call_guard<py::gil_scoped_release>());
  m.def("energy_score", &energy_score, py::arg("draws"), py::arg("y1"), py::arg("y2"));

  // -------------------------------------------------------------- scenarios
  py::class_<ScenarioSpec>(m, "ScenarioSpec")
      .def(py::init([](Scenario tag, Copula copula, int n_train, int n_val, int n_test,
                       int p, std::uint64_t seed) {
             ScenarioSpec s;
             s.tag = tag;
             s.copula = copula;
             s.n_train = n_train;
             s.n_val = n_val;
             s.n_test = n_test;
             s.p = p;
             s.seed = seed;
             return s;
           }),
           py::arg("tag") = Scenario::A, py::arg("copula") = Copula::Gaussian,
           py::arg("n_train") = 1000, py::arg("n_val") = 1500,
           py::arg("n_test") = 1000, py::arg("p") = -1, py::arg("seed") = 0)
      .def_readwrite("tag", &ScenarioSpec::tag)
      .def_readwrite("copula", &ScenarioSpec::copula)
      .def_readwrite("n_train", &ScenarioSpec::n_train)
      .def_readwrite("n_val", &ScenarioSpec::n_val)
      .def_readwrite("n_test", &ScenarioSpec::n_test)
      .def_readwrite("p", &ScenarioSpec::p)
      .def_readwrite("seed", &ScenarioSpec::seed);
  py::class_<ScenarioData>(m, "ScenarioData")
      .def_readonly("train", &ScenarioData::train)
      .def_readonly("val", &ScenarioData::val)
      .def_readonly("test", &ScenarioData::test)
      .def_readonly("truth", &ScenarioData::truth);
  m.def("gen_scenario", &gen_scenario, py::arg("spec"));
  m.def("scenario_model", &scenario_model, py::arg("spec"), py::arg("nu"),
        py::arg("m_max"));
  m.def("scenario_truth", &scenario_truth, py::arg("scenario"));

  py::class_<TpFp>(m, "TpFp")
      .def_readonly("tp", &TpFp::tp)
      .def_readonly("fp", &TpFp::fp)
      .def_property_readonly("total_tp", &TpFp::total_tp)
      .def_property_readonly("total_fp", &TpFp::total_fp);
  m.def("tp_fp_counts", &tp_fp_counts, py::arg("selected"), py::arg("truth"));

  // ------------------------------------------------------------------ study
  py::class_<StabselParams>(m, "StabselParams")
      .def(py::init<>())
      .def_readwrite("q", &StabselParams::q)
      .def_readwrite("pi_thr", &StabselParams::pi_thr)
      .def_readwrite("pfer", &StabselParams::pfer)
      .def_readwrite("B", &StabselParams::B)
      .def_readwrite("seed", &StabselParams::seed)
      .def_readwrite("threads", &StabselParams::threads);
  py::class_<StudyConfig>(m, "StudyConfig")
      .def(py::init<>())
      .def_readwrite("scenario", &StudyConfig::scenario)
      .def_readwrite("methods", &StudyConfig::methods)
      .def_readwrite("runs", &StudyConfig::runs)
      .def_readwrite("nu", &StudyConfig::nu)
      .def_readwrite("m_max", &StudyConfig::m_max)
      .def_readwrite("tau", &StudyConfig::tau)
      .def_readwrite("stabsel", &StudyConfig::stabsel)
      .def_readwrite("energy_draws", &StudyConfig::energy_draws)
      .def_readwrite("threads", &StudyConfig::threads)
      .def_readwrite("out_dir", &StudyConfig::out_dir);
  py::class_<StudyRunRow>(m, "StudyRunRow")
      .def_readonly("run", &StudyRunRow::run)
      .def_readonly("method", &StudyRunRow::method)
      .def_readonly("counts", &StudyRunRow::counts)
      .def_readonly("negloglik", &StudyRunRow::negloglik)
      .def_readonly("energy", &StudyRunRow::energy)
      .def_readonly("m_stop", &StudyRunRow::m_stop)
      .def_readonly("seconds", &StudyRunRow::seconds);
  py::class_<StudySummaryRow>(m, "StudySummaryRow")
      .def_readonly("method", &StudySummaryRow::method)
      .def_readonly("tp_mean", &StudySummaryRow::tp_mean)
      .def_readonly("tp_sd", &StudySummaryRow::tp_sd)
      .def_readonly("fp_mean", &StudySummaryRow::fp_mean)
      .def_readonly("fp_sd", &StudySummaryRow::fp_sd)
      .def_readonly("negloglik_mean", &StudySummaryRow::negloglik_mean)
      .def_readonly("negloglik_sd", &StudySummaryRow::negloglik_sd)
      .def_readonly("energy_mean", &StudySummaryRow::energy_mean)
      .def_readonly("energy_sd", &StudySummaryRow::energy_sd)
      .def_readonly("mstop_mean", &StudySummaryRow::mstop_mean)
      .def_readonly("mstop_sd", &StudySummaryRow::mstop_sd);
  py::class_<StudyResult>(m, "StudyResult")
      .def_readonly("rows", &StudyResult::rows)
      .def_readonly("summary", &StudyResult::summary);
  m.def("run_study", &run_study, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
}
