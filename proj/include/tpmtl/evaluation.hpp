#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tpmtl/model.hpp"

namespace tpmtl {

struct CVResult {
  std::vector<double> fold_accuracies;
  double mean_accuracy = 0.0;
  // confusion(i, j) = count of true class i predicted as class j, summed
  // over the held-out folds.
  std::vector<std::vector<std::int64_t>> confusion;
  std::vector<std::uint64_t> per_fold_seeds;
  std::uint64_t seed = 0;
  std::size_t k = 0;
};

// Stratified fold assignment: per class, indices are shuffled by the seeded
// generator and dealt round-robin, so fold sizes per class differ by at most
// one. Returns fold index per activity.
std::vector<std::size_t> stratified_folds(const std::vector<Activity>& acts,
                                          std::size_t k, std::uint64_t seed);

// k-fold cross-validation: per fold, mine + train on the other k-1 folds
// (mining is fold-local) and score the held-out fold. `jobs` > 1 runs folds
// concurrently; results are reduced in fold order either way.
// Throws TooFewSamples when any class has fewer than k samples.
CVResult kfold_cv(const LabeledCorpus& corpus, std::size_t k,
                  const TrainOptions& options, std::uint64_t seed,
                  std::size_t jobs = 1);

// Two-sided paired t-test on per-fold differences. All-zero differences
// give p = 1; zero variance with nonzero mean gives p = 0.
double paired_t_test(const std::vector<double>& a,
                     const std::vector<double>& b);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

// Two-sided p-value for Student's t with df degrees of freedom.
double t_two_sided_p(double t, double df);

struct RelatednessReport {
  // Learned omega with the self-relatedness diagonal zeroed out.
  Matrix off_diagonal;
  std::vector<std::string> label_names;
};

// Throws NoOmega for modes without a task-relatedness matrix.
RelatednessReport relatedness_report(const TrainedModel& model);

}  // namespace tpmtl
