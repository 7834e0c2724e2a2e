#include "tpmtl/synthgen.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>

namespace tpmtl {

namespace {

// Endpoint nodes: 2i is start of interval i, 2i+1 its end.
struct EndpointOrder {
  std::vector<std::size_t> parent;       // union-find over endpoint nodes
  std::vector<std::set<std::size_t>> succ;  // strict-order edges between reps
  std::vector<std::size_t> topo;         // representatives, topological

  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }

  void merge(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

// Each Allen relation pins the complete order of the four endpoints.
void add_relation_constraints(AllenRelation r, std::size_t sa, std::size_t ea,
                              std::size_t sb, std::size_t eb,
                              std::vector<std::pair<std::size_t, std::size_t>>& less,
                              std::vector<std::pair<std::size_t, std::size_t>>& equal) {
  switch (r) {
    case AllenRelation::kBefore: less.push_back({ea, sb}); break;
    case AllenRelation::kAfter: less.push_back({eb, sa}); break;
    case AllenRelation::kMeets: equal.push_back({ea, sb}); break;
    case AllenRelation::kMetBy: equal.push_back({eb, sa}); break;
    case AllenRelation::kOverlaps:
      less.push_back({sa, sb});
      less.push_back({sb, ea});
      less.push_back({ea, eb});
      break;
    case AllenRelation::kOverlappedBy:
      less.push_back({sb, sa});
      less.push_back({sa, eb});
      less.push_back({eb, ea});
      break;
    case AllenRelation::kStarts:
      equal.push_back({sa, sb});
      less.push_back({ea, eb});
      break;
    case AllenRelation::kStartedBy:
      equal.push_back({sa, sb});
      less.push_back({eb, ea});
      break;
    case AllenRelation::kDuring:
      less.push_back({sb, sa});
      less.push_back({ea, eb});
      break;
    case AllenRelation::kContains:
      less.push_back({sa, sb});
      less.push_back({eb, ea});
      break;
    case AllenRelation::kFinishes:
      equal.push_back({ea, eb});
      less.push_back({sb, sa});
      break;
    case AllenRelation::kFinishedBy:
      equal.push_back({ea, eb});
      less.push_back({sa, sb});
      break;
    case AllenRelation::kEquals:
      equal.push_back({sa, sb});
      equal.push_back({ea, eb});
      break;
  }
}

// Builds the endpoint order for a pattern, or throws UnrealizableTemplate
// when the layout is cyclic.
EndpointOrder endpoint_order(const TemporalPattern& pattern) {
  const std::size_t k = pattern.dim();
  const std::size_t n = 2 * k;
  std::vector<std::pair<std::size_t, std::size_t>> less;
  std::vector<std::pair<std::size_t, std::size_t>> equal;
  for (std::size_t i = 0; i < k; ++i) less.push_back({2 * i, 2 * i + 1});
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      add_relation_constraints(pattern.relation(i, j), 2 * i, 2 * i + 1,
                               2 * j, 2 * j + 1, less, equal);
    }
  }

  EndpointOrder order;
  order.parent.resize(n);
  std::iota(order.parent.begin(), order.parent.end(), 0);
  for (const auto& [a, b] : equal) order.merge(a, b);

  order.succ.resize(n);
  std::vector<std::size_t> indegree(n, 0);
  for (const auto& [a, b] : less) {
    const std::size_t ra = order.find(a);
    const std::size_t rb = order.find(b);
    if (ra == rb) {
      throw UnrealizableTemplate("relation layout forces x < x");
    }
    if (order.succ[ra].insert(rb).second) ++indegree[rb];
  }

  std::set<std::size_t> ready;
  for (std::size_t v = 0; v < n; ++v) {
    if (order.find(v) == v && indegree[v] == 0) ready.insert(v);
  }
  while (!ready.empty()) {
    const std::size_t v = *ready.begin();
    ready.erase(ready.begin());
    order.topo.push_back(v);
    for (std::size_t w : order.succ[v]) {
      if (--indegree[w] == 0) ready.insert(w);
    }
  }
  std::size_t rep_count = 0;
  for (std::size_t v = 0; v < n; ++v) {
    if (order.find(v) == v) ++rep_count;
  }
  if (order.topo.size() != rep_count) {
    throw UnrealizableTemplate("relation layout is cyclic");
  }
  return order;
}

std::pair<Duration, Duration> duration_range(const ClassTemplate& tmpl,
                                             ActionId id) {
  auto it = tmpl.duration_ranges.find(id);
  return it == tmpl.duration_ranges.end() ? tmpl.default_duration : it->second;
}

}  // namespace

std::vector<Action> realize_pattern(const TemporalPattern& pattern,
                                    const ClassTemplate& tmpl,
                                    SplitMix64& rng) {
  EndpointOrder order = endpoint_order(pattern);
  const std::size_t k = pattern.dim();
  const std::size_t n = 2 * k;

  // Predecessors of each representative, for the value assignment.
  std::vector<std::vector<std::size_t>> pred(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (order.find(v) != v) continue;
    for (std::size_t w : order.succ[v]) pred[w].push_back(v);
  }

  constexpr int kMaxAttempts = 200;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::vector<Timestamp> value(n, 0);
    for (std::size_t rep : order.topo) {
      Timestamp base = 0;
      bool has_pred = false;
      for (std::size_t p : pred[rep]) {
        base = std::max(base, value[p]);
        has_pred = true;
      }
      value[rep] = has_pred ? base + rng.next_in(20, 100) : 0;
    }
    std::vector<Action> actions(k);
    bool ok = true;
    for (std::size_t i = 0; i < k && ok; ++i) {
      const Timestamp s = value[order.find(2 * i)];
      const Timestamp e = value[order.find(2 * i + 1)];
      const auto [dmin, dmax] = duration_range(tmpl, pattern.action_ids[i]);
      if (e - s < dmin || e - s > dmax) {
        ok = false;
        break;
      }
      actions[i] = Action{pattern.action_ids[i], s, e};
    }
    if (ok) return actions;
  }
  throw UnrealizableTemplate(
      "no integer realization found within duration ranges");
}

LabeledCorpus generate(const std::vector<ClassTemplate>& templates,
                       std::size_t n_per_class, std::uint64_t seed) {
  if (templates.empty()) throw ValidationError("no class templates");
  if (n_per_class < 1) throw ValidationError("n_per_class must be >= 1");
  for (std::size_t c = 0; c < templates.size(); ++c) {
    const auto& t = templates[c];
    if (t.class_index != static_cast<int>(c)) {
      throw ValidationError("class_index fields must be 0..C-1 in order");
    }
    if (t.noise_rate < 0.0 || t.noise_rate >= 1.0) {
      throw ValidationError("noise_rate must be in [0, 1)");
    }
    if (t.planted_patterns.empty() && t.distractor_ids.empty()) {
      throw ValidationError("template would generate empty activities");
    }
  }

  LabeledCorpus corpus;
  for (std::size_t c = 0; c < templates.size(); ++c) {
    corpus.label_names.push_back("class" + std::to_string(c));
  }

  for (std::size_t c = 0; c < templates.size(); ++c) {
    const ClassTemplate& tmpl = templates[c];
    for (std::size_t s = 0; s < n_per_class; ++s) {
      SplitMix64 rng(
          derive_seed(seed, (static_cast<std::uint64_t>(c) << 20) | s));
      std::vector<Action> actions;
      Timestamp cursor = 0;
      for (const auto& pattern : tmpl.planted_patterns) {
        const Timestamp offset = cursor + rng.next_in(20, 100);
        Timestamp pattern_end = offset;
        for (Action a : realize_pattern(pattern, tmpl, rng)) {
          a.start += offset;
          a.end += offset;
          pattern_end = std::max(pattern_end, a.end);
          actions.push_back(a);
        }
        cursor = pattern_end;
      }
      const std::size_t planted_count = actions.size();
      if (!tmpl.distractor_ids.empty()) {
        std::size_t n_noise = 0;
        for (std::size_t i = 0; i < std::max<std::size_t>(planted_count, 1);
             ++i) {
          if (rng.next_bernoulli(tmpl.noise_rate)) ++n_noise;
        }
        if (actions.empty() && n_noise == 0) n_noise = 1;
        for (std::size_t i = 0; i < n_noise; ++i) {
          const ActionId id =
              tmpl.distractor_ids[rng.next_below(tmpl.distractor_ids.size())];
          const auto [dmin, dmax] = duration_range(tmpl, id);
          const Duration dur = rng.next_in(dmin, dmax);
          const Timestamp start = rng.next_in(0, std::max<Timestamp>(cursor, 1));
          actions.push_back(Action{id, start, start + dur});
        }
      }
      corpus.activities.push_back(normalize_activity(
          std::move(actions),
          "c" + std::to_string(c) + "_s" + std::to_string(s),
          static_cast<int>(c)));
    }
  }
  return corpus;
}

std::vector<ClassTemplate> benchmark_templates(
    std::size_t n_classes, double noise_rate,
    const std::vector<std::vector<int>>& shared_groups) {
  if (n_classes < 2) throw ValidationError("need at least two classes");

  std::vector<ActionId> pool;
  for (std::size_t c = 0; c < n_classes; ++c) {
    for (int j = 0; j < 4; ++j) pool.push_back(static_cast<ActionId>(4 * c + j));
  }
  for (int j = 0; j < 4; ++j) {
    pool.push_back(static_cast<ActionId>(4 * n_classes + j));
  }

  std::vector<ClassTemplate> templates;
  for (std::size_t c = 0; c < n_classes; ++c) {
    const ActionId base = static_cast<ActionId>(4 * c);
    ClassTemplate t;
    t.class_index = static_cast<int>(c);
    t.noise_rate = noise_rate;
    t.distractor_ids = pool;
    TemporalPattern single;
    single.action_ids = {base};
    TemporalPattern pair_overlap;
    pair_overlap.action_ids = {base, static_cast<ActionId>(base + 1)};
    pair_overlap.relations = {AllenRelation::kOverlaps};
    TemporalPattern pair_before;
    pair_before.action_ids = {static_cast<ActionId>(base + 2),
                              static_cast<ActionId>(base + 3)};
    pair_before.relations = {AllenRelation::kBefore};
    t.planted_patterns = {single, pair_overlap, pair_before};
    templates.push_back(std::move(t));
  }

  for (const auto& group : shared_groups) {
    if (group.empty()) continue;
    const int lead = group.front();
    for (int member : group) {
      if (lead < 0 || member < 0 ||
          static_cast<std::size_t>(member) >= templates.size() ||
          static_cast<std::size_t>(lead) >= templates.size()) {
        throw ValidationError("shared group index out of range");
      }
      templates[static_cast<std::size_t>(member)].planted_patterns =
          templates[static_cast<std::size_t>(lead)].planted_patterns;
    }
  }
  return templates;
}

}  // namespace tpmtl
