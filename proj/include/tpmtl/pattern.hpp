#pragma once

#include <compare>
#include <cstddef>
#include <vector>

#include "tpmtl/intervals.hpp"

namespace tpmtl {

// A k-pattern: action ids in canonical instance order plus the
// upper-triangular Allen relations for pairs (i,j), i<j, listed as
// (0,1),(0,2),...,(1,2),... For k=1 the relation list is empty.
//
// Identity is the pair (action_ids, relations). Patterns are only ever
// created from observed instances, so the relation set is realizable by
// construction.
struct TemporalPattern {
  std::vector<ActionId> action_ids;
  std::vector<AllenRelation> relations;

  std::size_t dim() const { return action_ids.size(); }

  // Index of pair (i,j), i<j, in the upper-triangular list.
  std::size_t pair_index(std::size_t i, std::size_t j) const {
    const std::size_t k = dim();
    return i * k - i * (i + 1) / 2 + (j - i - 1);
  }

  // Full-matrix lookup; handles i>j via the inverse and i==j as equals.
  AllenRelation relation(std::size_t i, std::size_t j) const {
    if (i == j) return AllenRelation::kEquals;
    if (i < j) return relations[pair_index(i, j)];
    return allen_inverse(relations[pair_index(j, i)]);
  }

  auto operator<=>(const TemporalPattern&) const = default;
};

// One realized occurrence of a pattern inside an activity. Indices are
// strictly increasing in the activity's canonical order.
struct PatternInstance {
  std::vector<std::size_t> action_indices;
};

// Builds the canonical pattern realized by the given strictly-increasing
// action indices of a normalized activity.
TemporalPattern pattern_from_indices(const Activity& act,
                                     const std::vector<std::size_t>& indices);

// The (k-1)-subpattern obtained by dropping one position.
TemporalPattern drop_position(const TemporalPattern& p, std::size_t pos);

// True iff dim(q) < dim(p) and there is an injective mapping of q's
// positions into p's preserving action ids and pairwise relations.
bool is_subpattern(const TemporalPattern& q, const TemporalPattern& p);

// All instances of p in act, in lexicographic index order.
std::vector<PatternInstance> find_instances(const TemporalPattern& p,
                                            const Activity& act);

// Sliding-window support sup(P) = L_P / (t_win + t_activity).
//
// A window position t (window [t, t+t_win]) sees an instance with intervals
// {[s_i,e_i]} iff it intersects every interval: t in (max s_i - t_win,
// min e_i). Those visibility ranges, clamped to the admissible position
// range [min start - t_win, max end], are unioned over all instances; L_P
// is the union's length in ticks. Returns 0 when p has no instance.
double pattern_support(const TemporalPattern& p, const Activity& act,
                       Duration window);

// Same computation with the exact integer numerator exposed:
// support = ticks / (window + span). Used where exact comparisons matter.
std::int64_t pattern_support_ticks(const TemporalPattern& p,
                                   const Activity& act, Duration window);

// Support from instances that are already known (the miner's fast path).
// `summaries` holds (max start, min end) per instance.
std::int64_t visibility_union_ticks(
    const std::vector<std::pair<Timestamp, Timestamp>>& summaries,
    Timestamp act_min_start, Timestamp act_max_end, Duration window);

}  // namespace tpmtl
