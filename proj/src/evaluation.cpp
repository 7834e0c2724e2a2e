#include "tpmtl/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <map>

#include "tpmtl/rng.hpp"

namespace tpmtl {

std::vector<std::size_t> stratified_folds(const std::vector<Activity>& acts,
                                          std::size_t k, std::uint64_t seed) {
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < acts.size(); ++i) {
    by_class[acts[i].label].push_back(i);
  }
  std::vector<std::size_t> fold_of(acts.size(), 0);
  for (auto& [label, members] : by_class) {
    SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(label)));
    // Fisher-Yates with the fixed generator.
    for (std::size_t i = members.size(); i > 1; --i) {
      const std::size_t j = rng.next_below(i);
      std::swap(members[i - 1], members[j]);
    }
    for (std::size_t pos = 0; pos < members.size(); ++pos) {
      fold_of[members[pos]] = pos % k;
    }
  }
  return fold_of;
}

namespace {

struct FoldOutcome {
  double accuracy = 0.0;
  std::vector<std::vector<std::int64_t>> confusion;
};

FoldOutcome run_fold(const LabeledCorpus& corpus,
                     const std::vector<std::size_t>& fold_of,
                     std::size_t fold, const TrainOptions& options) {
  LabeledCorpus training;
  training.label_names = corpus.label_names;
  std::vector<const Activity*> held_out;
  for (std::size_t i = 0; i < corpus.activities.size(); ++i) {
    if (fold_of[i] == fold) {
      held_out.push_back(&corpus.activities[i]);
    } else {
      training.activities.push_back(corpus.activities[i]);
    }
  }
  const TrainedModel model = train(training, options);

  const std::size_t m = corpus.label_names.size();
  FoldOutcome out;
  out.confusion.assign(m, std::vector<std::int64_t>(m, 0));
  std::size_t correct = 0;
  for (const Activity* act : held_out) {
    const int predicted = predict(model, *act).class_index;
    out.confusion[static_cast<std::size_t>(act->label)]
                 [static_cast<std::size_t>(predicted)]++;
    if (predicted == act->label) ++correct;
  }
  out.accuracy =
      static_cast<double>(correct) / static_cast<double>(held_out.size());
  return out;
}

}  // namespace

CVResult kfold_cv(const LabeledCorpus& corpus, std::size_t k,
                  const TrainOptions& options, std::uint64_t seed,
                  std::size_t jobs) {
  if (k < 2) throw ValidationError("k must be >= 2");
  std::map<int, std::size_t> class_counts;
  for (const auto& act : corpus.activities) class_counts[act.label]++;
  if (class_counts.empty()) throw EmptyTrainingSet();
  for (const auto& [label, count] : class_counts) {
    if (count < k) {
      throw TooFewSamples("class " + std::to_string(label) + " has " +
                          std::to_string(count) + " samples, fewer than k=" +
                          std::to_string(k));
    }
  }

  const auto fold_of = stratified_folds(corpus.activities, k, seed);

  std::vector<FoldOutcome> outcomes(k);
  if (jobs <= 1) {
    for (std::size_t fold = 0; fold < k; ++fold) {
      outcomes[fold] = run_fold(corpus, fold_of, fold, options);
    }
  } else {
    std::vector<std::future<FoldOutcome>> futures;
    futures.reserve(k);
    for (std::size_t fold = 0; fold < k; ++fold) {
      futures.push_back(std::async(std::launch::async, run_fold,
                                   std::cref(corpus), std::cref(fold_of),
                                   fold, std::cref(options)));
    }
    for (std::size_t fold = 0; fold < k; ++fold) {
      outcomes[fold] = futures[fold].get();
    }
  }

  const std::size_t m = corpus.label_names.size();
  CVResult result;
  result.k = k;
  result.seed = seed;
  result.confusion.assign(m, std::vector<std::int64_t>(m, 0));
  for (std::size_t fold = 0; fold < k; ++fold) {
    result.fold_accuracies.push_back(outcomes[fold].accuracy);
    result.per_fold_seeds.push_back(derive_seed(seed, 1000 + fold));
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        result.confusion[i][j] += outcomes[fold].confusion[i][j];
      }
    }
  }
  double sum = 0.0;
  for (double acc : result.fold_accuracies) sum += acc;
  result.mean_accuracy = sum / static_cast<double>(k);
  return result;
}

// Continued fraction for the incomplete beta (Lentz's algorithm).
namespace {

double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) -
                          std::lgamma(b) + a * std::log(x) +
                          b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * betacf(a, b, x) / a;
  }
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double t_two_sided_p(double t, double df) {
  if (!std::isfinite(t)) return 0.0;
  return regularized_incomplete_beta(0.5 * df, 0.5,
                                     df / (df + t * t));
}

double paired_t_test(const std::vector<double>& a,
                     const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw LengthMismatch("fold accuracy lists have different lengths");
  }
  const std::size_t n = a.size();
  if (n < 2) throw LengthMismatch("paired t-test needs k >= 2 folds");

  std::vector<double> d(n);
  bool all_zero = true;
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = a[i] - b[i];
    if (d[i] != 0.0) all_zero = false;
  }
  if (all_zero) return 1.0;

  double mean = 0.0;
  for (double v : d) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : d) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (sd == 0.0) return 0.0;  // nonzero mean, zero variance: infinite t
  const double t = mean / (sd / std::sqrt(static_cast<double>(n)));
  return t_two_sided_p(t, static_cast<double>(n - 1));
}

RelatednessReport relatedness_report(const TrainedModel& model) {
  if (!model.omega.has_value()) throw NoOmega();
  RelatednessReport report;
  report.off_diagonal = *model.omega;
  report.off_diagonal.diagonal().setZero();
  report.label_names = model.label_names;
  return report;
}

}  // namespace tpmtl
