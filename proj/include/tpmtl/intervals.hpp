#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tpmtl/errors.hpp"

namespace tpmtl {

// Time is integer ticks (milliseconds). Allen relations hinge on exact
// endpoint equality (meets vs. overlaps), so no floating point here;
// ingestion converts decimal seconds to ticks with round-half-even.
using Timestamp = std::int64_t;
using Duration = std::int64_t;

using ActionId = std::int32_t;

// A labeled proper interval: start < end.
struct Action {
  ActionId id = 0;
  Timestamp start = 0;
  Timestamp end = 0;

  auto operator<=>(const Action&) const = default;
};

// Canonical ordering used everywhere: (start, end, id).
inline bool canonical_less(const Action& a, const Action& b) {
  if (a.start != b.start) return a.start < b.start;
  if (a.end != b.end) return a.end < b.end;
  return a.id < b.id;
}

constexpr int kNoLabel = -1;

// A start-time-ordered, origin-normalized action sequence with an optional
// class label. Immutable after construction by convention.
struct Activity {
  std::string activity_id;
  int label = kNoLabel;  // class index, kNoLabel when unlabeled
  std::vector<Action> actions;

  bool empty() const { return actions.empty(); }
  Timestamp min_start() const { return actions.front().start; }
  Timestamp max_end() const;
  // Total activity time: max end - min start.
  Duration span() const { return max_end() - min_start(); }
};

enum class AllenRelation : std::uint8_t {
  kBefore = 0,
  kMeets,
  kOverlaps,
  kStarts,
  kDuring,
  kFinishes,
  kEquals,
  kAfter,
  kMetBy,
  kOverlappedBy,
  kStartedBy,
  kContains,
  kFinishedBy,
};

constexpr int kNumAllenRelations = 13;

AllenRelation allen_inverse(AllenRelation r);

// Fixed lowercase vocabulary used by the pattern file format.
const std::string& allen_name(AllenRelation r);
std::optional<AllenRelation> allen_from_name(const std::string& name);

// The unique Allen relation between two proper intervals, by exact integer
// endpoint comparison. Total on valid actions.
AllenRelation allen_relation(const Action& a, const Action& b);

// Sorts by (start, end, id) and shifts timestamps so min start = 0.
// Throws EmptyActivity / InvalidInterval. Idempotent.
Activity normalize_activity(std::vector<Action> raw,
                            std::string activity_id = {},
                            int label = kNoLabel);

// True when actions are canonically sorted and min start is 0.
bool is_normalized(const Activity& act);

}  // namespace tpmtl
