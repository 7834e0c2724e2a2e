#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "tpmtl/pattern.hpp"

namespace tpmtl {

// How per-activity supports aggregate into the corpus-level frequency test.
// Max keeps class-conditional patterns that a mean would dilute.
enum class SupportAggregation { kMax, kMean };

struct MiningConfig {
  double minsup = 0.01;          // in (0, 1]
  Duration window = 1;           // sliding-window width t_win, ticks, > 0
  std::size_t max_dim = 3;       // largest pattern dimension to mine
  SupportAggregation aggregation = SupportAggregation::kMax;
};

// Throws ValidationError when a field is out of range.
void validate(const MiningConfig& cfg);

// The joint pattern feature space: all frequent patterns in a fixed order
// (by dim, then action ids, then relations). Column order is frozen at
// mining time; training and testing share it.
class FeatureSpace {
 public:
  FeatureSpace() = default;
  explicit FeatureSpace(std::vector<TemporalPattern> patterns);

  const std::vector<TemporalPattern>& patterns() const { return patterns_; }
  std::size_t size() const { return patterns_.size(); }
  bool empty() const { return patterns_.empty(); }

  // Column of a pattern, or -1 when absent.
  std::ptrdiff_t column_of(const TemporalPattern& p) const;

  bool operator==(const FeatureSpace& other) const {
    return patterns_ == other.patterns_;
  }

 private:
  std::vector<TemporalPattern> patterns_;
  std::map<TemporalPattern, std::size_t> index_;
};

struct MiningStats {
  // patterns_per_dim[k] = number of frequent patterns of dimension k+1.
  std::vector<std::size_t> patterns_per_dim;
  std::size_t candidates_evaluated = 0;
};

// Level-wise frequent pattern discovery with Apriori pruning. Candidates are
// grown by extending observed instances of frequent patterns with one
// later-ordered action, so only realizable patterns are ever generated.
// A pattern is frequent when its aggregated support reaches cfg.minsup.
FeatureSpace mine(const std::vector<Activity>& training,
                  const MiningConfig& cfg, MiningStats* stats = nullptr);

// Support of every feature-space pattern in one activity; entries in [0,1].
std::vector<double> featurize(const Activity& act, const FeatureSpace& fs,
                              Duration window);

// Window-width policies (resolved against the training set before mining).
enum class WindowMode { kAvgTimesTwo, kMax, kFixed };

// Mean action-interval length over the corpus times two (round half even,
// at least 1 tick), the maximum action length, or the fixed width.
Duration resolve_window(const std::vector<Activity>& training, WindowMode mode,
                        Duration fixed_ticks);

}  // namespace tpmtl
