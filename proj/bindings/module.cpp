#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tpmtl/evaluation.hpp"
#include "tpmtl/io.hpp"
#include "tpmtl/synthgen.hpp"

namespace py = pybind11;
using namespace tpmtl;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Temporal interval pattern mining and adaptive multi-task "
            "learning for complex activity recognition";

  py::register_exception<ValidationError>(m, "ValidationError",
                                          PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  // ---- intervals ----
  py::enum_<AllenRelation>(m, "AllenRelation")
      .value("before", AllenRelation::kBefore)
      .value("meets", AllenRelation::kMeets)
      .value("overlaps", AllenRelation::kOverlaps)
      .value("starts", AllenRelation::kStarts)
      .value("during", AllenRelation::kDuring)
      .value("finishes", AllenRelation::kFinishes)
      .value("equals", AllenRelation::kEquals)
      .value("after", AllenRelation::kAfter)
      .value("met_by", AllenRelation::kMetBy)
      .value("overlapped_by", AllenRelation::kOverlappedBy)
      .value("started_by", AllenRelation::kStartedBy)
      .value("contains", AllenRelation::kContains)
      .value("finished_by", AllenRelation::kFinishedBy);

  py::class_<Action>(m, "Action")
      .def(py::init([](ActionId id, Timestamp start, Timestamp end) {
             return Action{id, start, end};
           }),
           py::arg("id"), py::arg("start"), py::arg("end"))
      .def_readwrite("id", &Action::id)
      .def_readwrite("start", &Action::start)
      .def_readwrite("end", &Action::end)
      .def("__repr__", [](const Action& a) {
        return "Action(" + std::to_string(a.id) + ", " +
               std::to_string(a.start) + ", " + std::to_string(a.end) + ")";
      });

  py::class_<Activity>(m, "Activity")
      .def_readonly("activity_id", &Activity::activity_id)
      .def_readonly("label", &Activity::label)
      .def_readonly("actions", &Activity::actions)
      .def_property_readonly("span", &Activity::span);

  m.def("allen_relation", &allen_relation, py::arg("a"), py::arg("b"),
        "The unique Allen relation between two actions.");
  m.def("allen_inverse", &allen_inverse);
  m.def("normalize_activity", &normalize_activity, py::arg("actions"),
        py::arg("activity_id") = std::string(), py::arg("label") = kNoLabel,
        "Sort by (start, end, id) and shift so min start = 0.");

  // ---- patterns & mining ----
  py::class_<TemporalPattern>(m, "TemporalPattern")
      .def(py::init([](std::vector<ActionId> ids,
                       std::vector<AllenRelation> rels) {
             TemporalPattern p;
             p.action_ids = std::move(ids);
             p.relations = std::move(rels);
             if (p.relations.size() != p.dim() * (p.dim() - 1) / 2) {
               throw ValidationError("relation count does not match dim");
             }
             return p;
           }),
           py::arg("action_ids"),
           py::arg("relations") = std::vector<AllenRelation>{})
      .def_readonly("action_ids", &TemporalPattern::action_ids)
      .def_readonly("relations", &TemporalPattern::relations)
      .def_property_readonly("dim", &TemporalPattern::dim)
      .def("relation", &TemporalPattern::relation)
      .def("__eq__", [](const TemporalPattern& a,
                        const TemporalPattern& b) { return a == b; })
      .def("__repr__", [](const TemporalPattern& p) {
        std::string s = "TemporalPattern([";
        for (std::size_t i = 0; i < p.action_ids.size(); ++i) {
          if (i) s += ",";
          s += std::to_string(p.action_ids[i]);
        }
        s += "], [";
        for (std::size_t i = 0; i < p.relations.size(); ++i) {
          if (i) s += ",";
          s += allen_name(p.relations[i]);
        }
        return s + "])";
      });

  py::class_<PatternInstance>(m, "PatternInstance")
      .def_readonly("action_indices", &PatternInstance::action_indices);

  m.def("find_instances", &find_instances, py::arg("pattern"),
        py::arg("activity"));
  m.def("is_subpattern", &is_subpattern, py::arg("q"), py::arg("p"));
  m.def("pattern_support", &pattern_support, py::arg("pattern"),
        py::arg("activity"), py::arg("window"),
        "Sliding-window support L_P / (window + activity span).");

  py::enum_<SupportAggregation>(m, "SupportAggregation")
      .value("max", SupportAggregation::kMax)
      .value("mean", SupportAggregation::kMean);

  py::class_<MiningConfig>(m, "MiningConfig")
      .def(py::init<>())
      .def_readwrite("minsup", &MiningConfig::minsup)
      .def_readwrite("window", &MiningConfig::window)
      .def_readwrite("max_dim", &MiningConfig::max_dim)
      .def_readwrite("aggregation", &MiningConfig::aggregation);

  py::class_<FeatureSpace>(m, "FeatureSpace")
      .def_property_readonly("patterns", &FeatureSpace::patterns)
      .def("__len__", &FeatureSpace::size)
      .def("column_of", &FeatureSpace::column_of);

  m.def(
      "mine",
      [](const std::vector<Activity>& acts, const MiningConfig& cfg) {
        return mine(acts, cfg);
      },
      py::arg("activities"), py::arg("config"));
  m.def("featurize", &featurize, py::arg("activity"), py::arg("feature_space"),
        py::arg("window"));

  // ---- optimizer ----
  py::class_<Hyperparams>(m, "Hyperparams")
      .def(py::init([](double lambda, double gamma, double theta) {
             return Hyperparams{lambda, gamma, theta};
           }),
           py::arg("lambda_") = 0.05, py::arg("gamma") = 0.001,
           py::arg("theta") = 0.01)
      .def_readwrite("lambda_", &Hyperparams::lambda)
      .def_readwrite("gamma", &Hyperparams::gamma)
      .def_readwrite("theta", &Hyperparams::theta);

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("fista_max_iter", &SolverConfig::fista_max_iter)
      .def_readwrite("fista_tol", &SolverConfig::fista_tol)
      .def_readwrite("outer_max_iter", &SolverConfig::outer_max_iter)
      .def_readwrite("outer_tol", &SolverConfig::outer_tol)
      .def_readwrite("eig_floor", &SolverConfig::eig_floor)
      .def_readwrite("backtracking_eta", &SolverConfig::backtracking_eta);

  py::class_<TaskCovariance>(m, "TaskCovariance")
      .def_readonly("omega", &TaskCovariance::omega)
      .def_readonly("degenerate", &TaskCovariance::degenerate);

  py::class_<FitResult>(m, "FitResult")
      .def_readonly("W", &FitResult::W)
      .def_readonly("covariance", &FitResult::covariance)
      .def_readonly("objective_trace", &FitResult::objective_trace)
      .def_readonly("outer_iterations", &FitResult::outer_iterations);

  m.def("objective", &objective, py::arg("X"), py::arg("Y"), py::arg("W"),
        py::arg("omega"), py::arg("hp"),
        py::arg("eig_floor") = SolverConfig{}.eig_floor);
  m.def("smooth_gradient", &smooth_gradient, py::arg("X"), py::arg("Y"),
        py::arg("W"), py::arg("omega"), py::arg("hp"),
        py::arg("eig_floor") = SolverConfig{}.eig_floor);
  m.def("prox_l21", &prox_l21, py::arg("V"), py::arg("tau"));
  m.def("prox_l1", &prox_l1, py::arg("V"), py::arg("tau"));
  m.def(
      "solve_w",
      [](const Matrix& X, const Matrix& Y, const Matrix& omega,
         const Hyperparams& hp, const SolverConfig& cfg, const Matrix& W_init) {
        return solve_w(X, Y, omega, hp, cfg, W_init);
      },
      py::arg("X"), py::arg("Y"), py::arg("omega"), py::arg("hp"),
      py::arg("config") = SolverConfig{},
      py::arg("W_init") = Matrix());
  m.def("solve_omega", &solve_omega, py::arg("W"));
  m.def(
      "fit_alternating",
      [](const Matrix& X, const Matrix& Y, const Hyperparams& hp,
         const SolverConfig& cfg) { return fit_alternating(X, Y, hp, cfg); },
      py::arg("X"), py::arg("Y"), py::arg("hp"),
      py::arg("config") = SolverConfig{});

  // ---- model ----
  py::enum_<ModelMode>(m, "ModelMode")
      .value("amtl", ModelMode::kAmtl)
      .value("mtl", ModelMode::kMtl)
      .value("gl", ModelMode::kGroupLasso)
      .value("lasso", ModelMode::kLasso);

  py::enum_<WindowMode>(m, "WindowMode")
      .value("avg2", WindowMode::kAvgTimesTwo)
      .value("max", WindowMode::kMax)
      .value("fixed", WindowMode::kFixed);

  py::class_<LabeledCorpus>(m, "LabeledCorpus")
      .def(py::init<>())
      .def_readwrite("activities", &LabeledCorpus::activities)
      .def_readwrite("label_names", &LabeledCorpus::label_names);

  py::class_<TrainOptions>(m, "TrainOptions")
      .def(py::init<>())
      .def_readwrite("mining", &TrainOptions::mining)
      .def_readwrite("window_mode", &TrainOptions::window_mode)
      .def_readwrite("window_ticks", &TrainOptions::window_ticks)
      .def_readwrite("hp", &TrainOptions::hp)
      .def_readwrite("mode", &TrainOptions::mode)
      .def_readwrite("solver", &TrainOptions::solver)
      .def_readwrite("standardize", &TrainOptions::standardize);

  py::class_<TrainSummary>(m, "TrainSummary")
      .def_readonly("final_objective", &TrainSummary::final_objective)
      .def_readonly("outer_iterations", &TrainSummary::outer_iterations)
      .def_readonly("nonzero_rows", &TrainSummary::nonzero_rows)
      .def_readonly("training_accuracy", &TrainSummary::training_accuracy)
      .def_readonly("objective_trace", &TrainSummary::objective_trace);

  py::class_<TrainedModel>(m, "TrainedModel")
      .def_readonly("feature_space", &TrainedModel::feature_space)
      .def_readonly("window", &TrainedModel::window)
      .def_readonly("W", &TrainedModel::W)
      .def_readonly("label_names", &TrainedModel::label_names)
      .def_readonly("mode", &TrainedModel::mode)
      .def_property_readonly("omega",
                             [](const TrainedModel& model) -> py::object {
                               if (!model.omega.has_value()) return py::none();
                               return py::cast(*model.omega);
                             });

  m.def(
      "train",
      [](const LabeledCorpus& corpus, const TrainOptions& options) {
        TrainSummary summary;
        TrainedModel model = train(corpus, options, &summary);
        return py::make_tuple(std::move(model), std::move(summary));
      },
      py::arg("corpus"), py::arg("options") = TrainOptions{},
      "Mine + featurize + fit; returns (model, summary).");

  py::class_<Prediction>(m, "Prediction")
      .def_readonly("class_index", &Prediction::class_index)
      .def_readonly("scores", &Prediction::scores);

  m.def("predict", &predict, py::arg("model"), py::arg("activity"));

  m.def("save_model",
        [](const TrainedModel& model, const std::string& path) {
          save_model(model, path);
        },
        py::arg("model"), py::arg("path"));
  m.def("load_model",
        [](const std::string& path) { return load_model(path); },
        py::arg("path"));

  // ---- evaluation ----
  py::class_<CVResult>(m, "CVResult")
      .def_readonly("fold_accuracies", &CVResult::fold_accuracies)
      .def_readonly("mean_accuracy", &CVResult::mean_accuracy)
      .def_readonly("confusion", &CVResult::confusion)
      .def_readonly("seed", &CVResult::seed)
      .def_readonly("k", &CVResult::k);

  m.def("kfold_cv", &kfold_cv, py::arg("corpus"), py::arg("k"),
        py::arg("options"), py::arg("seed"), py::arg("jobs") = 1);
  m.def("paired_t_test", &paired_t_test, py::arg("a"), py::arg("b"));

  py::class_<RelatednessReport>(m, "RelatednessReport")
      .def_readonly("off_diagonal", &RelatednessReport::off_diagonal)
      .def_readonly("label_names", &RelatednessReport::label_names);

  m.def("relatedness_report", &relatedness_report, py::arg("model"));

  // ---- synthetic data ----
  py::class_<ClassTemplate>(m, "ClassTemplate")
      .def(py::init<>())
      .def_readwrite("class_index", &ClassTemplate::class_index)
      .def_readwrite("planted_patterns", &ClassTemplate::planted_patterns)
      .def_readwrite("noise_rate", &ClassTemplate::noise_rate)
      .def_readwrite("distractor_ids", &ClassTemplate::distractor_ids)
      .def_readwrite("duration_ranges", &ClassTemplate::duration_ranges)
      .def_readwrite("default_duration", &ClassTemplate::default_duration);

  m.def("generate", &generate, py::arg("templates"), py::arg("n_per_class"),
        py::arg("seed"));
  m.def("benchmark_templates", &benchmark_templates, py::arg("n_classes"),
        py::arg("noise_rate"),
        py::arg("shared_groups") = std::vector<std::vector<int>>{});

  // ---- files ----
  m.def("read_activity_file",
        [](const std::string& path) { return read_activity_file(path); },
        py::arg("path"));
  m.def("write_activity_file",
        [](const LabeledCorpus& corpus, const std::string& path) {
          write_activity_file(corpus, path);
        },
        py::arg("corpus"), py::arg("path"));
}
