#include "tpmtl/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

namespace tpmtl {

namespace {
const std::array<std::string, 4> kModeNames = {"amtl", "mtl", "gl", "lasso"};
}

const std::string& mode_name(ModelMode mode) {
  return kModeNames[static_cast<std::size_t>(mode)];
}

std::optional<ModelMode> mode_from_name(const std::string& name) {
  for (std::size_t i = 0; i < kModeNames.size(); ++i) {
    if (kModeNames[i] == name) return static_cast<ModelMode>(i);
  }
  return std::nullopt;
}

Matrix design_matrix(const std::vector<Activity>& activities,
                     const FeatureSpace& fs, Duration window) {
  Matrix x(static_cast<Eigen::Index>(activities.size()),
           static_cast<Eigen::Index>(fs.size()));
  for (std::size_t i = 0; i < activities.size(); ++i) {
    const auto row = featurize(activities[i], fs, window);
    for (std::size_t j = 0; j < row.size(); ++j) {
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
    }
  }
  return x;
}

Matrix one_hot_labels(const std::vector<Activity>& activities,
                      std::size_t n_classes) {
  Matrix y = Matrix::Zero(static_cast<Eigen::Index>(activities.size()),
                          static_cast<Eigen::Index>(n_classes));
  for (std::size_t i = 0; i < activities.size(); ++i) {
    const int label = activities[i].label;
    if (label < 0 || static_cast<std::size_t>(label) >= n_classes) {
      throw ValidationError("activity '" + activities[i].activity_id +
                            "' has no valid label");
    }
    y(static_cast<Eigen::Index>(i), label) = 1.0;
  }
  return y;
}

double mode_objective(ModelMode mode, const Matrix& X, const Matrix& Y,
                      const Matrix& W, const Matrix& omega,
                      const Hyperparams& hp, double eig_floor) {
  Hyperparams eff = hp;
  PenaltyKind penalty = PenaltyKind::kRowL2;
  switch (mode) {
    case ModelMode::kAmtl:
      break;
    case ModelMode::kMtl:
      eff.theta = 0.0;
      break;
    case ModelMode::kGroupLasso:
      eff.lambda = 0.0;
      break;
    case ModelMode::kLasso:
      eff.lambda = 0.0;
      penalty = PenaltyKind::kElementwiseL1;
      break;
  }
  return composite_objective(X, Y, W, omega, eff, penalty, eig_floor);
}

namespace {

std::size_t count_nonzero_rows(const Matrix& w) {
  std::size_t n = 0;
  for (Eigen::Index r = 0; r < w.rows(); ++r) {
    if (w.row(r).norm() > 0.0) ++n;
  }
  return n;
}

}  // namespace

TrainedModel train(const LabeledCorpus& corpus, const TrainOptions& options,
                   TrainSummary* summary) {
  const auto& acts = corpus.activities;
  if (acts.empty()) throw EmptyTrainingSet();
  std::set<int> present;
  for (const auto& act : acts) {
    if (act.label < 0 ||
        static_cast<std::size_t>(act.label) >= corpus.label_names.size()) {
      throw ValidationError("activity '" + act.activity_id +
                            "' has no valid label");
    }
    present.insert(act.label);
  }
  if (present.size() < 2) throw SingleClass();
  validate(options.hp);
  validate(options.solver);

  TrainedModel model;
  model.mode = options.mode;
  model.hp = options.hp;
  model.label_names = corpus.label_names;
  model.window =
      resolve_window(acts, options.window_mode, options.window_ticks);

  MiningConfig mining = options.mining;
  mining.window = model.window;
  MiningStats mining_stats;
  model.feature_space = mine(acts, mining, &mining_stats);

  Matrix x = design_matrix(acts, model.feature_space, model.window);
  if (options.standardize) {
    model.standardized = true;
    model.feature_means = x.colwise().mean();
    model.feature_stds = Vector::Ones(x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const double sd = std::sqrt(
          (x.col(j).array() - model.feature_means[j]).square().mean());
      model.feature_stds[j] = sd > 0 ? sd : 1.0;
      x.col(j) = (x.col(j).array() - model.feature_means[j]) /
                 model.feature_stds[j];
    }
  }
  const Matrix y = one_hot_labels(acts, corpus.label_names.size());

  Hyperparams eff = options.hp;
  FitResult fit;
  switch (options.mode) {
    case ModelMode::kAmtl:
      fit = fit_alternating(x, y, eff, options.solver);
      model.omega = fit.covariance.omega;
      model.omega_degenerate = fit.covariance.degenerate;
      break;
    case ModelMode::kMtl:
      eff.theta = 0.0;
      fit = fit_alternating(x, y, eff, options.solver);
      model.omega = fit.covariance.omega;
      model.omega_degenerate = fit.covariance.degenerate;
      break;
    case ModelMode::kGroupLasso:
    case ModelMode::kLasso: {
      eff.lambda = 0.0;
      const PenaltyKind penalty = options.mode == ModelMode::kLasso
                                      ? PenaltyKind::kElementwiseL1
                                      : PenaltyKind::kRowL2;
      const Eigen::Index m = y.cols();
      const Matrix unused_omega =
          Matrix::Identity(m, m) / static_cast<double>(m);
      fit.W = solve_w(x, y, unused_omega, eff, options.solver,
                      Matrix::Zero(x.cols(), m), penalty, &fit.fista_trace);
      fit.objective_trace.push_back(composite_objective(
          x, y, fit.W, unused_omega, eff, penalty, options.solver.eig_floor));
      fit.outer_iterations = 1;
      break;
    }
  }
  model.W = fit.W;

  if (summary != nullptr) {
    summary->final_objective = fit.objective_trace.back();
    summary->outer_iterations = fit.outer_iterations;
    summary->nonzero_rows = count_nonzero_rows(model.W);
    summary->objective_trace = fit.objective_trace;
    summary->fista_trace = std::move(fit.fista_trace);
    summary->mining = mining_stats;
    std::size_t correct = 0;
    for (const auto& act : acts) {
      if (predict(model, act).class_index == act.label) ++correct;
    }
    summary->training_accuracy =
        static_cast<double>(correct) / static_cast<double>(acts.size());
  }
  return model;
}

Prediction predict(const TrainedModel& model, const Activity& act) {
  const auto features = featurize(act, model.feature_space, model.window);
  Vector x(static_cast<Eigen::Index>(features.size()));
  for (std::size_t j = 0; j < features.size(); ++j) {
    x[static_cast<Eigen::Index>(j)] = features[j];
  }
  if (model.standardized) {
    x = (x - model.feature_means).cwiseQuotient(model.feature_stds);
  }
  const Vector scores = model.W.transpose() * x;
  Prediction pred;
  pred.scores.assign(scores.data(), scores.data() + scores.size());
  pred.class_index = 0;
  for (int m = 1; m < scores.size(); ++m) {
    if (scores[m] > scores[pred.class_index]) pred.class_index = m;
  }
  return pred;
}

}  // namespace tpmtl
