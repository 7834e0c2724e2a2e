#include "tpmtl/intervals.hpp"

#include <algorithm>
#include <array>

namespace tpmtl {

Timestamp Activity::max_end() const {
  Timestamp m = actions.front().end;
  for (const auto& a : actions) m = std::max(m, a.end);
  return m;
}

AllenRelation allen_inverse(AllenRelation r) {
  switch (r) {
    case AllenRelation::kBefore: return AllenRelation::kAfter;
    case AllenRelation::kMeets: return AllenRelation::kMetBy;
    case AllenRelation::kOverlaps: return AllenRelation::kOverlappedBy;
    case AllenRelation::kStarts: return AllenRelation::kStartedBy;
    case AllenRelation::kDuring: return AllenRelation::kContains;
    case AllenRelation::kFinishes: return AllenRelation::kFinishedBy;
    case AllenRelation::kEquals: return AllenRelation::kEquals;
    case AllenRelation::kAfter: return AllenRelation::kBefore;
    case AllenRelation::kMetBy: return AllenRelation::kMeets;
    case AllenRelation::kOverlappedBy: return AllenRelation::kOverlaps;
    case AllenRelation::kStartedBy: return AllenRelation::kStarts;
    case AllenRelation::kContains: return AllenRelation::kDuring;
    case AllenRelation::kFinishedBy: return AllenRelation::kFinishes;
  }
  return AllenRelation::kEquals;  // unreachable
}

namespace {
const std::array<std::string, kNumAllenRelations> kRelationNames = {
    "before",     "meets",         "overlaps",   "starts",   "during",
    "finishes",   "equals",        "after",      "met-by",   "overlapped-by",
    "started-by", "contains",      "finished-by"};
}  // namespace

const std::string& allen_name(AllenRelation r) {
  return kRelationNames[static_cast<std::size_t>(r)];
}

std::optional<AllenRelation> allen_from_name(const std::string& name) {
  for (std::size_t i = 0; i < kRelationNames.size(); ++i) {
    if (kRelationNames[i] == name) return static_cast<AllenRelation>(i);
  }
  return std::nullopt;
}

AllenRelation allen_relation(const Action& a, const Action& b) {
  if (a.end < b.start) return AllenRelation::kBefore;
  if (b.end < a.start) return AllenRelation::kAfter;
  if (a.end == b.start) return AllenRelation::kMeets;
  if (b.end == a.start) return AllenRelation::kMetBy;
  // Intervals properly overlap from here on.
  if (a.start == b.start) {
    if (a.end == b.end) return AllenRelation::kEquals;
    return a.end < b.end ? AllenRelation::kStarts : AllenRelation::kStartedBy;
  }
  if (a.end == b.end) {
    return a.start > b.start ? AllenRelation::kFinishes
                             : AllenRelation::kFinishedBy;
  }
  if (a.start < b.start) {
    return a.end < b.end ? AllenRelation::kOverlaps : AllenRelation::kContains;
  }
  return a.end < b.end ? AllenRelation::kDuring : AllenRelation::kOverlappedBy;
}

Activity normalize_activity(std::vector<Action> raw, std::string activity_id,
                            int label) {
  if (raw.empty()) throw EmptyActivity();
  for (const auto& a : raw) {
    if (a.start >= a.end) {
      throw InvalidInterval("action " + std::to_string(a.id) +
                            " has start >= end (" + std::to_string(a.start) +
                            " >= " + std::to_string(a.end) + ")");
    }
  }
  std::sort(raw.begin(), raw.end(), canonical_less);
  const Timestamp origin = raw.front().start;
  for (auto& a : raw) {
    a.start -= origin;
    a.end -= origin;
  }
  return Activity{std::move(activity_id), label, std::move(raw)};
}

bool is_normalized(const Activity& act) {
  if (act.empty()) return false;
  if (act.actions.front().start != 0) return false;
  for (std::size_t i = 0; i < act.actions.size(); ++i) {
    if (act.actions[i].start >= act.actions[i].end) return false;
    if (i > 0 && canonical_less(act.actions[i], act.actions[i - 1])) return false;
  }
  return true;
}

}  // namespace tpmtl
