#include <doctest.h>

#include <sstream>

#include "oracles.hpp"
#include "tpmtl/io.hpp"
#include "tpmtl/model.hpp"

using namespace tpmtl;

namespace {

// Two classes with disjoint planted 2-patterns; linearly separable by
// construction. Interval jitter keeps activities distinct.
LabeledCorpus separable_corpus(std::size_t per_class) {
  LabeledCorpus corpus;
  corpus.label_names = {"alpha", "beta"};
  SplitMix64 rng(101);
  for (std::size_t i = 0; i < per_class; ++i) {
    const Timestamp j = static_cast<Timestamp>(rng.next_below(5));
    corpus.activities.push_back(normalize_activity(
        {Action{1, 0, 40 + j}, Action{2, 20, 60 + j}},
        "a" + std::to_string(i), 0));
    corpus.activities.push_back(normalize_activity(
        {Action{3, 0, 15 + j}, Action{4, 30, 50 + j}},
        "b" + std::to_string(i), 1));
  }
  return corpus;
}

TrainOptions default_options(ModelMode mode) {
  TrainOptions opt;
  opt.mode = mode;
  opt.mining.minsup = 0.05;
  opt.hp = Hyperparams{0.05, 0.001, 0.01};
  return opt;
}

}  // namespace

TEST_CASE("train reaches accuracy 1.0 on a separable corpus, all modes") {
  const LabeledCorpus corpus = separable_corpus(6);
  for (const ModelMode mode : {ModelMode::kAmtl, ModelMode::kMtl,
                               ModelMode::kGroupLasso, ModelMode::kLasso}) {
    TrainSummary summary;
    const TrainedModel model = train(corpus, default_options(mode), &summary);
    CHECK(summary.training_accuracy == 1.0);
    CHECK(summary.outer_iterations <= SolverConfig{}.outer_max_iter);
    // A training exemplar predicts its own label.
    CHECK(predict(model, corpus.activities[0]).class_index == 0);
    CHECK(predict(model, corpus.activities[1]).class_index == 1);
  }
}

TEST_CASE("train validates its preconditions") {
  CHECK_THROWS_AS(train(LabeledCorpus{}, TrainOptions{}), EmptyTrainingSet);

  LabeledCorpus single;
  single.label_names = {"only"};
  single.activities.push_back(
      normalize_activity({Action{1, 0, 5}}, "x", 0));
  CHECK_THROWS_AS(train(single, TrainOptions{}), SingleClass);
}

TEST_CASE("mode ablation identities") {
  const LabeledCorpus corpus = separable_corpus(5);

  // AMTL with theta = 0 is MTL, exactly: same dispatch, same W.
  TrainOptions amtl0 = default_options(ModelMode::kAmtl);
  amtl0.hp.theta = 0.0;
  TrainOptions mtl = default_options(ModelMode::kMtl);
  mtl.hp.theta = 0.7;  // mode overrides theta; value must not matter
  const TrainedModel m_amtl0 = train(corpus, amtl0);
  const TrainedModel m_mtl = train(corpus, mtl);
  CHECK((m_amtl0.W - m_mtl.W).norm() <= 1e-8);

  // Objectives coincide definitionally under the reductions.
  SplitMix64 rng(107);
  const Matrix x = oracle::random_matrix(rng, 8, 5);
  const Matrix y = oracle::random_one_hot(rng, 8, 3);
  const Matrix w = oracle::random_matrix(rng, 5, 3);
  const Matrix omega = oracle::random_feasible_omega(rng, 3);
  const Hyperparams hp{0.4, 0.02, 0.6};
  Hyperparams theta0 = hp;
  theta0.theta = 0.0;
  CHECK(mode_objective(ModelMode::kMtl, x, y, w, omega, hp, 1e-8) ==
        objective(x, y, w, omega, theta0));
  Hyperparams lambda0 = hp;
  lambda0.lambda = 0.0;
  CHECK(mode_objective(ModelMode::kGroupLasso, x, y, w, omega, hp, 1e-8) ==
        objective(x, y, w, omega, lambda0));

  // AMTL with lambda = 0 solves the GL problem: solutions agree to 1e-6.
  TrainOptions amtl_l0 = default_options(ModelMode::kAmtl);
  amtl_l0.hp.lambda = 0.0;
  amtl_l0.solver.fista_tol = 1e-12;
  TrainOptions gl = default_options(ModelMode::kGroupLasso);
  gl.solver.fista_tol = 1e-12;
  const TrainedModel m_amtl_l0 = train(corpus, amtl_l0);
  const TrainedModel m_gl = train(corpus, gl);
  CHECK((m_amtl_l0.W - m_gl.W).norm() < 1e-6);
  CHECK(!m_gl.omega.has_value());
}

TEST_CASE("predict: tie rule, purity, scale invariance") {
  const LabeledCorpus corpus = separable_corpus(4);
  TrainedModel model = train(corpus, default_options(ModelMode::kAmtl));

  // W = 0 scores everything zero and ties break to class 0.
  TrainedModel zeroed = model;
  zeroed.W.setZero();
  const Prediction zero_pred = predict(zeroed, corpus.activities[1]);
  CHECK(zero_pred.class_index == 0);
  for (const double s : zero_pred.scores) CHECK(s == 0.0);

  const Prediction once = predict(model, corpus.activities[2]);
  const Prediction again = predict(model, corpus.activities[2]);
  CHECK(once.class_index == again.class_index);
  CHECK(once.scores == again.scores);

  // argmax is invariant to positive scaling of W (hence of all scores).
  TrainedModel scaled = model;
  scaled.W *= 7.5;
  for (const auto& act : corpus.activities) {
    CHECK(predict(scaled, act).class_index ==
          predict(model, act).class_index);
  }
}

TEST_CASE("feature space is mined from the training fold only") {
  const LabeledCorpus corpus = separable_corpus(6);
  LabeledCorpus subset;
  subset.label_names = corpus.label_names;
  for (std::size_t i = 0; i < 8; ++i) {
    subset.activities.push_back(corpus.activities[i]);
  }
  // Mining the subset gives the same space whether or not other activities
  // exist elsewhere; train only ever sees the fold it is given.
  MiningConfig cfg;
  cfg.minsup = 0.05;
  cfg.window = resolve_window(subset.activities, WindowMode::kAvgTimesTwo, 0);
  const FeatureSpace direct = mine(subset.activities, cfg);
  const TrainedModel model = train(subset, default_options(ModelMode::kAmtl));
  CHECK(model.feature_space == direct);
}

TEST_CASE("model serialization round-trips bit-exactly") {
  const LabeledCorpus corpus = separable_corpus(5);
  TrainOptions opt = default_options(ModelMode::kAmtl);
  TrainedModel model = train(corpus, opt);

  std::ostringstream first;
  save_model(model, first);
  std::istringstream reread(first.str());
  const TrainedModel loaded = load_model(reread);

  CHECK(loaded.window == model.window);
  CHECK(loaded.label_names == model.label_names);
  CHECK(loaded.mode == model.mode);
  CHECK(loaded.feature_space == model.feature_space);
  REQUIRE(loaded.W.rows() == model.W.rows());
  CHECK((loaded.W - model.W).norm() == 0.0);  // exact, not approximate
  REQUIRE(loaded.omega.has_value());
  CHECK((*loaded.omega - *model.omega).norm() == 0.0);

  for (const auto& act : corpus.activities) {
    const Prediction a = predict(model, act);
    const Prediction b = predict(loaded, act);
    CHECK(a.class_index == b.class_index);
    CHECK(a.scores == b.scores);  // bit-exact
  }

  std::ostringstream second;
  save_model(loaded, second);
  CHECK(first.str() == second.str());

  // Standardized models carry their transform through the round-trip.
  opt.standardize = true;
  const TrainedModel zmodel = train(corpus, opt);
  std::ostringstream zout;
  save_model(zmodel, zout);
  std::istringstream zin(zout.str());
  const TrainedModel zloaded = load_model(zin);
  CHECK(zloaded.standardized);
  for (const auto& act : corpus.activities) {
    CHECK(predict(zmodel, act).scores == predict(zloaded, act).scores);
  }
}
