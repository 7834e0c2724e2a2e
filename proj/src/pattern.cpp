#include "tpmtl/pattern.hpp"

#include <algorithm>
#include <utility>

namespace tpmtl {

TemporalPattern pattern_from_indices(const Activity& act,
                                     const std::vector<std::size_t>& indices) {
  TemporalPattern p;
  const std::size_t k = indices.size();
  p.action_ids.reserve(k);
  for (std::size_t idx : indices) p.action_ids.push_back(act.actions[idx].id);
  p.relations.reserve(k * (k - 1) / 2);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      p.relations.push_back(
          allen_relation(act.actions[indices[i]], act.actions[indices[j]]));
    }
  }
  return p;
}

TemporalPattern drop_position(const TemporalPattern& p, std::size_t pos) {
  TemporalPattern q;
  const std::size_t k = p.dim();
  q.action_ids.reserve(k - 1);
  for (std::size_t i = 0; i < k; ++i) {
    if (i != pos) q.action_ids.push_back(p.action_ids[i]);
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (i == pos) continue;
    for (std::size_t j = i + 1; j < k; ++j) {
      if (j == pos) continue;
      q.relations.push_back(p.relations[p.pair_index(i, j)]);
    }
  }
  return q;
}

namespace {

// Backtracking search for an injective, id- and relation-preserving mapping
// of q's positions into p's positions.
bool embed_from(const TemporalPattern& q, const TemporalPattern& p,
                std::vector<std::size_t>& image, std::vector<bool>& used,
                std::size_t depth) {
  if (depth == q.dim()) return true;
  for (std::size_t cand = 0; cand < p.dim(); ++cand) {
    if (used[cand]) continue;
    if (p.action_ids[cand] != q.action_ids[depth]) continue;
    bool ok = true;
    for (std::size_t prev = 0; prev < depth; ++prev) {
      if (p.relation(image[prev], cand) != q.relation(prev, depth)) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    image[depth] = cand;
    used[cand] = true;
    if (embed_from(q, p, image, used, depth + 1)) return true;
    used[cand] = false;
  }
  return false;
}

}  // namespace

bool is_subpattern(const TemporalPattern& q, const TemporalPattern& p) {
  if (q.dim() >= p.dim()) return false;
  std::vector<std::size_t> image(q.dim());
  std::vector<bool> used(p.dim(), false);
  return embed_from(q, p, image, used, 0);
}

namespace {

void match_from(const TemporalPattern& p, const Activity& act,
                std::vector<std::size_t>& picked, std::size_t depth,
                std::vector<PatternInstance>& out) {
  if (depth == p.dim()) {
    out.push_back(PatternInstance{picked});
    return;
  }
  const std::size_t first = depth == 0 ? 0 : picked[depth - 1] + 1;
  for (std::size_t i = first; i < act.actions.size(); ++i) {
    if (act.actions[i].id != p.action_ids[depth]) continue;
    bool ok = true;
    for (std::size_t prev = 0; prev < depth; ++prev) {
      if (allen_relation(act.actions[picked[prev]], act.actions[i]) !=
          p.relation(prev, depth)) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    picked.push_back(i);
    match_from(p, act, picked, depth + 1, out);
    picked.pop_back();
  }
}

}  // namespace

std::vector<PatternInstance> find_instances(const TemporalPattern& p,
                                            const Activity& act) {
  std::vector<PatternInstance> out;
  if (p.dim() == 0) return out;
  std::vector<std::size_t> picked;
  picked.reserve(p.dim());
  match_from(p, act, picked, 0, out);
  return out;
}

std::int64_t visibility_union_ticks(
    const std::vector<std::pair<Timestamp, Timestamp>>& summaries,
    Timestamp act_min_start, Timestamp act_max_end, Duration window) {
  // Each summary (max start, min end) yields the open visibility range
  // (max_start - window, min_end), clamped to [min_start - window, max_end].
  std::vector<std::pair<Timestamp, Timestamp>> ranges;
  ranges.reserve(summaries.size());
  const Timestamp lo_clamp = act_min_start - window;
  const Timestamp hi_clamp = act_max_end;
  for (const auto& [max_s, min_e] : summaries) {
    const Timestamp lo = std::max(max_s - window, lo_clamp);
    const Timestamp hi = std::min(min_e, hi_clamp);
    if (hi > lo) ranges.emplace_back(lo, hi);
  }
  if (ranges.empty()) return 0;
  std::sort(ranges.begin(), ranges.end());
  std::int64_t total = 0;
  Timestamp cur_lo = ranges.front().first;
  Timestamp cur_hi = ranges.front().second;
  for (std::size_t i = 1; i < ranges.size(); ++i) {
    if (ranges[i].first <= cur_hi) {
      cur_hi = std::max(cur_hi, ranges[i].second);
    } else {
      total += cur_hi - cur_lo;
      cur_lo = ranges[i].first;
      cur_hi = ranges[i].second;
    }
  }
  total += cur_hi - cur_lo;
  return total;
}

namespace {

std::pair<Timestamp, Timestamp> instance_summary(
    const Activity& act, const PatternInstance& inst) {
  Timestamp max_s = act.actions[inst.action_indices.front()].start;
  Timestamp min_e = act.actions[inst.action_indices.front()].end;
  for (std::size_t idx : inst.action_indices) {
    max_s = std::max(max_s, act.actions[idx].start);
    min_e = std::min(min_e, act.actions[idx].end);
  }
  return {max_s, min_e};
}

}  // namespace

std::int64_t pattern_support_ticks(const TemporalPattern& p,
                                   const Activity& act, Duration window) {
  const auto instances = find_instances(p, act);
  if (instances.empty()) return 0;
  std::vector<std::pair<Timestamp, Timestamp>> summaries;
  summaries.reserve(instances.size());
  for (const auto& inst : instances) {
    summaries.push_back(instance_summary(act, inst));
  }
  return visibility_union_ticks(summaries, act.min_start(), act.max_end(),
                                window);
}

double pattern_support(const TemporalPattern& p, const Activity& act,
                       Duration window) {
  const std::int64_t ticks = pattern_support_ticks(p, act, window);
  const std::int64_t denom = window + act.span();
  return static_cast<double>(ticks) / static_cast<double>(denom);
}

}  // namespace tpmtl
