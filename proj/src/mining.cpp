#include "tpmtl/mining.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "tpmtl/errors.hpp"

namespace tpmtl {

void validate(const MiningConfig& cfg) {
  if (!(cfg.minsup > 0.0) || cfg.minsup > 1.0) {
    throw ValidationError("minsup must be in (0, 1]");
  }
  if (cfg.window <= 0) throw ValidationError("window must be > 0 ticks");
  if (cfg.max_dim < 1) throw ValidationError("max_dim must be >= 1");
}

FeatureSpace::FeatureSpace(std::vector<TemporalPattern> patterns)
    : patterns_(std::move(patterns)) {
  for (std::size_t i = 0; i < patterns_.size(); ++i) {
    index_.emplace(patterns_[i], i);
  }
}

std::ptrdiff_t FeatureSpace::column_of(const TemporalPattern& p) const {
  auto it = index_.find(p);
  return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

namespace {

// Per-activity instance bookkeeping: (max start, min end) summaries are all
// the support computation needs, plus the raw indices for extension.
struct InstanceSet {
  std::vector<std::vector<std::size_t>> index_tuples;
  std::vector<std::pair<Timestamp, Timestamp>> summaries;
};

using LevelInstances = std::map<TemporalPattern, std::vector<InstanceSet>>;

double aggregate(const std::vector<double>& per_activity,
                 SupportAggregation agg) {
  if (agg == SupportAggregation::kMax) {
    double m = 0.0;
    for (double v : per_activity) m = std::max(m, v);
    return m;
  }
  double s = 0.0;
  for (double v : per_activity) s += v;
  return s / static_cast<double>(per_activity.size());
}

double aggregated_support(const std::vector<Activity>& acts,
                          const std::vector<InstanceSet>& sets,
                          const MiningConfig& cfg) {
  std::vector<double> per_activity(acts.size(), 0.0);
  for (std::size_t a = 0; a < acts.size(); ++a) {
    if (sets[a].summaries.empty()) continue;
    const std::int64_t ticks = visibility_union_ticks(
        sets[a].summaries, acts[a].min_start(), acts[a].max_end(), cfg.window);
    per_activity[a] = static_cast<double>(ticks) /
                      static_cast<double>(cfg.window + acts[a].span());
  }
  return aggregate(per_activity, cfg.aggregation);
}

std::pair<Timestamp, Timestamp> extend_summary(
    std::pair<Timestamp, Timestamp> summary, const Action& added) {
  summary.first = std::max(summary.first, added.start);
  summary.second = std::min(summary.second, added.end);
  return summary;
}

}  // namespace

FeatureSpace mine(const std::vector<Activity>& training,
                  const MiningConfig& cfg, MiningStats* stats) {
  validate(cfg);
  if (training.empty()) throw EmptyTrainingSet();
  for (const auto& act : training) {
    if (!is_normalized(act)) {
      throw ValidationError("activity '" + act.activity_id +
                            "' is not normalized");
    }
  }

  const std::size_t n_act = training.size();
  MiningStats local_stats;

  // Level 1: every observed action id.
  LevelInstances level;
  for (std::size_t a = 0; a < n_act; ++a) {
    const auto& actions = training[a].actions;
    for (std::size_t i = 0; i < actions.size(); ++i) {
      TemporalPattern p;
      p.action_ids.push_back(actions[i].id);
      auto& sets = level[p];
      if (sets.empty()) sets.resize(n_act);
      sets[a].index_tuples.push_back({i});
      sets[a].summaries.emplace_back(actions[i].start, actions[i].end);
    }
  }

  std::vector<TemporalPattern> result;
  std::set<ActionId> frequent_ids;
  {
    LevelInstances frequent;
    for (auto& [pat, sets] : level) {
      local_stats.candidates_evaluated++;
      if (aggregated_support(training, sets, cfg) >= cfg.minsup) {
        frequent_ids.insert(pat.action_ids.front());
        frequent.emplace(pat, std::move(sets));
      }
    }
    level = std::move(frequent);
  }
  local_stats.patterns_per_dim.push_back(level.size());
  for (const auto& [pat, sets] : level) result.push_back(pat);

  for (std::size_t k = 1; k < cfg.max_dim && !level.empty(); ++k) {
    // Grow candidates by extending each instance with one later action
    // whose id survived level 1.
    LevelInstances candidates;
    for (const auto& [pat, sets] : level) {
      for (std::size_t a = 0; a < n_act; ++a) {
        const auto& actions = training[a].actions;
        const auto& tuples = sets[a].index_tuples;
        for (std::size_t t = 0; t < tuples.size(); ++t) {
          const auto& tuple = tuples[t];
          for (std::size_t j = tuple.back() + 1; j < actions.size(); ++j) {
            if (!frequent_ids.contains(actions[j].id)) continue;
            std::vector<std::size_t> extended = tuple;
            extended.push_back(j);
            TemporalPattern cand = pattern_from_indices(training[a], extended);
            auto& csets = candidates[cand];
            if (csets.empty()) csets.resize(n_act);
            csets[a].index_tuples.push_back(std::move(extended));
            csets[a].summaries.push_back(
                extend_summary(sets[a].summaries[t], actions[j]));
          }
        }
      }
    }

    LevelInstances next;
    for (auto& [cand, csets] : candidates) {
      // Apriori: every k-subpattern must itself be frequent. Dropping the
      // last position recovers the parent the instance was grown from, so
      // only the remaining positions need checking.
      bool all_frequent = true;
      for (std::size_t pos = 0; pos + 1 < cand.dim() && all_frequent; ++pos) {
        all_frequent = level.contains(drop_position(cand, pos));
      }
      if (!all_frequent) continue;
      local_stats.candidates_evaluated++;
      if (aggregated_support(training, csets, cfg) >= cfg.minsup) {
        next.emplace(cand, std::move(csets));
      }
    }
    if (next.empty()) break;
    local_stats.patterns_per_dim.push_back(next.size());
    for (const auto& [pat, sets] : next) result.push_back(pat);
    level = std::move(next);
  }

  // Levels were appended in order and std::map iterates sorted, so the
  // result is already ordered by (dim, ids, relations).
  if (stats != nullptr) *stats = std::move(local_stats);
  return FeatureSpace(std::move(result));
}

std::vector<double> featurize(const Activity& act, const FeatureSpace& fs,
                              Duration window) {
  std::vector<double> x(fs.size());
  for (std::size_t j = 0; j < fs.size(); ++j) {
    x[j] = pattern_support(fs.patterns()[j], act, window);
  }
  return x;
}

Duration resolve_window(const std::vector<Activity>& training, WindowMode mode,
                        Duration fixed_ticks) {
  if (mode == WindowMode::kFixed) {
    if (fixed_ticks <= 0) throw ValidationError("fixed window must be > 0");
    return fixed_ticks;
  }
  if (training.empty()) throw EmptyTrainingSet();
  std::int64_t total = 0;
  std::int64_t count = 0;
  Duration longest = 0;
  for (const auto& act : training) {
    for (const auto& a : act.actions) {
      total += a.end - a.start;
      longest = std::max(longest, a.end - a.start);
      ++count;
    }
  }
  if (mode == WindowMode::kMax) return std::max<Duration>(longest, 1);
  // avg*2, round half to even on the exact rational 2*total/count.
  const std::int64_t num = 2 * total;
  std::int64_t q = num / count;
  const std::int64_t r = num % count;
  if (2 * r > count || (2 * r == count && q % 2 == 1)) ++q;
  return std::max<Duration>(q, 1);
}

}  // namespace tpmtl
