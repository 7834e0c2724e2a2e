#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "tpmtl/model.hpp"
#include "tpmtl/pattern.hpp"
#include "tpmtl/rng.hpp"

namespace tpmtl {

// Blueprint for one synthetic activity class. Planted patterns are realized
// in every generated sample with relation-preserving random endpoints;
// distractor actions are interleaved at noise_rate.
struct ClassTemplate {
  int class_index = 0;
  std::vector<TemporalPattern> planted_patterns;
  double noise_rate = 0.0;  // in [0, 1)
  std::vector<ActionId> distractor_ids;
  // Inclusive duration bounds per action id; ids not listed use
  // default_duration.
  std::map<ActionId, std::pair<Duration, Duration>> duration_ranges;
  std::pair<Duration, Duration> default_duration{20, 600};
};

// A single pattern realization: integer endpoints reproducing every planted
// relation exactly. Endpoint orderings come from constraint propagation over
// the relation layout; durations are re-drawn up to a bounded number of
// attempts when ranges are tight. Throws UnrealizableTemplate for cyclic
// layouts or duration ranges that keep failing.
std::vector<Action> realize_pattern(const TemporalPattern& pattern,
                                    const ClassTemplate& tmpl,
                                    SplitMix64& rng);

// Deterministic corpus: n_per_class samples per template, label names
// "class<i>". Sub-seeds per sample derive from (seed, class, sample), so the
// corpus is a pure function of its arguments.
LabeledCorpus generate(const std::vector<ClassTemplate>& templates,
                       std::size_t n_per_class, std::uint64_t seed);

// Desk-scale benchmark templates: each class plants two 2-patterns over its
// own id block; classes listed together in shared_groups reuse the first
// member's patterns (identically distributed classes). Distractors draw from
// every class's ids plus a small common pool.
std::vector<ClassTemplate> benchmark_templates(
    std::size_t n_classes, double noise_rate,
    const std::vector<std::vector<int>>& shared_groups = {});

}  // namespace tpmtl
