#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tpmtl/mining.hpp"
#include "tpmtl/optimizer.hpp"

namespace tpmtl {

// Activities plus the label-name table (index = class index, first-seen
// order at ingestion).
struct LabeledCorpus {
  std::vector<Activity> activities;
  std::vector<std::string> label_names;
};

enum class ModelMode { kAmtl, kMtl, kGroupLasso, kLasso };

const std::string& mode_name(ModelMode mode);
std::optional<ModelMode> mode_from_name(const std::string& name);

// Everything train binds together: mining setup, window policy, objective
// weights, mode and solver knobs.
struct TrainOptions {
  MiningConfig mining;                   // window filled from window_mode
  WindowMode window_mode = WindowMode::kAvgTimesTwo;
  Duration window_ticks = 0;             // used when window_mode == kFixed
  Hyperparams hp;
  ModelMode mode = ModelMode::kAmtl;
  SolverConfig solver;
  bool standardize = false;
};

struct TrainSummary {
  double final_objective = 0.0;
  std::size_t outer_iterations = 0;
  std::size_t nonzero_rows = 0;
  double training_accuracy = 0.0;
  std::vector<double> objective_trace;
  std::vector<FistaTraceRow> fista_trace;
  MiningStats mining;
};

struct TrainedModel {
  FeatureSpace feature_space;
  Duration window = 0;
  Matrix W;  // D x M
  std::optional<Matrix> omega;  // absent for GroupLasso / Lasso
  bool omega_degenerate = false;
  std::vector<std::string> label_names;
  ModelMode mode = ModelMode::kAmtl;
  Hyperparams hp;
  // Optional per-feature z-scoring, applied identically at predict time.
  bool standardized = false;
  Vector feature_means;
  Vector feature_stds;

  std::size_t n_classes() const { return label_names.size(); }
};

// Mines the feature space from the training activities only, featurizes,
// builds one-hot labels and dispatches on mode:
//   AMTL       alternating FISTA + closed-form omega
//   MTL        same with theta = 0
//   GroupLasso single FISTA solve with lambda = 0
//   Lasso      FISTA with the element-wise l1 prox
// Throws SingleClass / EmptyTrainingSet.
TrainedModel train(const LabeledCorpus& corpus, const TrainOptions& options,
                   TrainSummary* summary = nullptr);

struct Prediction {
  int class_index = 0;
  std::vector<double> scores;
};

// scores = W^T featurize(act); argmax with ties to the lowest class index.
Prediction predict(const TrainedModel& model, const Activity& act);

// The model-file mode-specific composite objective at (X, Y, W, omega).
double mode_objective(ModelMode mode, const Matrix& X, const Matrix& Y,
                      const Matrix& W, const Matrix& omega,
                      const Hyperparams& hp, double eig_floor);

// Featurize a whole corpus into a design matrix (row per activity).
Matrix design_matrix(const std::vector<Activity>& activities,
                     const FeatureSpace& fs, Duration window);

Matrix one_hot_labels(const std::vector<Activity>& activities,
                      std::size_t n_classes);

}  // namespace tpmtl
