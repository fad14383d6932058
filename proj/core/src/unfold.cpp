#include "zsm/unfold.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace zsm {

namespace {

struct Bitset {
  std::vector<std::uint64_t> words;
  explicit Bitset(std::size_t bits = 0) : words((bits + 63) / 64, 0) {}
  void set(std::size_t i) { words[i >> 6] |= std::uint64_t{1} << (i & 63); }
  bool test(std::size_t i) const { return (words[i >> 6] >> (i & 63)) & 1; }
  void or_with(const Bitset& o) {
    for (std::size_t k = 0; k < o.words.size(); ++k) words[k] |= o.words[k];
  }
};

}  // namespace

/// Precomputed causality and conflict over one occurrence net. Self-contained
/// (copies what it needs), so it stays valid independently of the net object
/// it was built from.
class OccurrenceNetAnalysis {
 public:
  explicit OccurrenceNetAnalysis(const OccurrenceNet& on) {
    std::size_t n = on.conditions.size() + on.events.size();
    if (n > 20000) throw Error("occurrence net too large for relation analysis");
    cond_stamp_.resize(on.conditions.size());
    event_stamp_.resize(on.events.size());
    for (std::size_t c = 0; c < on.conditions.size(); ++c) cond_stamp_[c] = on.conditions[c].stamp;
    for (std::size_t e = 0; e < on.events.size(); ++e) event_stamp_[e] = on.events[e].stamp;

    std::vector<std::vector<std::uint32_t>> parents(n);
    for (std::size_t c = 0; c < on.conditions.size(); ++c)
      if (on.conditions[c].producer >= 0)
        parents[cond_stamp_[c]].push_back(event_stamp_[static_cast<std::size_t>(on.conditions[c].producer)]);
    for (std::size_t e = 0; e < on.events.size(); ++e)
      for (std::uint32_t b : on.events[e].preset) parents[event_stamp_[e]].push_back(cond_stamp_[b]);

    ancestors_.assign(n, Bitset(n));
    for (std::size_t s = 0; s < n; ++s) {
      for (std::uint32_t p : parents[s]) {
        ancestors_[s].or_with(ancestors_[p]);
        ancestors_[s].set(p);
      }
    }

    std::vector<std::vector<std::uint32_t>> consumers(on.conditions.size());
    for (std::size_t e = 0; e < on.events.size(); ++e)
      for (std::uint32_t b : on.events[e].preset) consumers[b].push_back(static_cast<std::uint32_t>(e));
    for (const auto& list : consumers)
      for (std::size_t a = 0; a < list.size(); ++a)
        for (std::size_t b = a + 1; b < list.size(); ++b)
          immediate_conflicts_.push_back({event_stamp_[list[a]], event_stamp_[list[b]]});
  }

  std::uint32_t stamp(NodeId x) const {
    return x.is_event ? event_stamp_.at(x.idx) : cond_stamp_.at(x.idx);
  }

  bool strictly_before(NodeId x, NodeId y) const { return ancestors_[stamp(y)].test(stamp(x)); }

  bool in_conflict(NodeId x, NodeId y) const {
    std::uint32_t sx = stamp(x), sy = stamp(y);
    auto weakly_above = [this](std::uint32_t node, std::uint32_t anc) {
      return node == anc || ancestors_[node].test(anc);
    };
    for (const auto& [a, b] : immediate_conflicts_) {
      if (weakly_above(sx, a) && weakly_above(sy, b)) return true;
      if (weakly_above(sx, b) && weakly_above(sy, a)) return true;
    }
    return false;
  }

  bool concurrent(NodeId x, NodeId y) const {
    if (stamp(x) == stamp(y)) return false;
    return !strictly_before(x, y) && !strictly_before(y, x) && !in_conflict(x, y);
  }

 private:
  std::vector<std::uint32_t> cond_stamp_;
  std::vector<std::uint32_t> event_stamp_;
  std::vector<Bitset> ancestors_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> immediate_conflicts_;
};

namespace {

const OccurrenceNetAnalysis& analysis(const OccurrenceNet& on) {
  if (!on.analysis_cache) on.analysis_cache = std::make_shared<OccurrenceNetAnalysis>(on);
  return *on.analysis_cache;
}

/// Shared creation helpers; events are added atomically with their produced
/// conditions, and identity is the pair (sorted preset, transition).
struct Builder {
  const ZSNet& net;
  OccurrenceNet on;
  std::uint32_t next_stamp = 0;
  std::map<std::pair<std::vector<std::uint32_t>, TransitionIdx>, std::uint32_t> event_ids;

  explicit Builder(const ZSNet& n) : net(n) {
    for (PlaceIdx s = 0; s < net.places.size(); ++s) {
      long long tokens = net.initial.count(s);
      for (long long copy = 0; copy < tokens; ++copy) {
        on.initial_conditions.push_back(
            add_condition(-1, s, static_cast<std::uint32_t>(copy), 0));
      }
    }
  }

  std::uint32_t add_condition(std::int32_t producer, PlaceIdx place, std::uint32_t copy,
                              std::uint32_t layer) {
    OccurrenceNet::Condition c;
    c.producer = producer;
    c.place = place;
    c.copy = copy;
    c.zero = net.places[place].zero;
    c.layer = layer;
    c.stamp = next_stamp++;
    on.conditions.push_back(c);
    return static_cast<std::uint32_t>(on.conditions.size() - 1);
  }

  // Returns the event id and whether it was newly created.
  std::pair<std::uint32_t, bool> add_event(std::vector<std::uint32_t> preset, TransitionIdx t,
                                           std::uint32_t layer) {
    std::sort(preset.begin(), preset.end());
    auto key = std::make_pair(preset, t);
    auto it = event_ids.find(key);
    if (it != event_ids.end()) return {it->second, false};
    OccurrenceNet::Event e;
    e.preset = std::move(preset);
    e.transition = t;
    e.layer = layer;
    e.stamp = next_stamp++;
    std::uint32_t id = static_cast<std::uint32_t>(on.events.size());
    on.events.push_back(std::move(e));
    event_ids.emplace(std::move(key), id);
    for (const auto& [s, w] : net.transitions[t].post)
      for (long long copy = 0; copy < w; ++copy)
        on.events[id].postset.push_back(
            add_condition(static_cast<std::int32_t>(id), s, static_cast<std::uint32_t>(copy), layer));
    return {id, true};
  }
};

void k_subsets(const std::vector<std::uint32_t>& pool, std::size_t k, std::size_t from,
               std::vector<std::uint32_t>& current,
               std::vector<std::vector<std::uint32_t>>& out) {
  if (current.size() == k) {
    out.push_back(current);
    return;
  }
  for (std::size_t idx = from; idx + (k - current.size()) <= pool.size(); ++idx) {
    current.push_back(pool[idx]);
    k_subsets(pool, k, idx + 1, current, out);
    current.pop_back();
  }
}

/// Enumerates, in lexicographic order, every way to pick disjoint presets of
/// individual tokens for a multiset of transition instances.
struct AssignmentEnum {
  const ZSNet& net;
  const OccurrenceNet& on;
  const std::vector<std::uint32_t>& slice;
  std::vector<TransitionIdx> instances;  // ascending
  std::vector<bool> used;                // parallel to slice
  std::vector<std::vector<std::uint32_t>> chosen;
  std::function<bool(const std::vector<TransitionIdx>&,
                     const std::vector<std::vector<std::uint32_t>>&)>
      sink;  // returns false to abort the whole enumeration

  bool run() {
    used.assign(slice.size(), false);
    chosen.clear();
    return pick_instance(0);
  }

 private:
  bool pick_instance(std::size_t k) {
    if (k == instances.size()) return sink(instances, chosen);
    // instances of the same transition are unordered: enforce nondecreasing
    // presets so each set of instance assignments appears once
    bool has_floor = k > 0 && instances[k] == instances[k - 1];
    std::vector<std::uint32_t> floor = has_floor ? chosen[k - 1] : std::vector<std::uint32_t>{};

    std::vector<std::vector<std::uint32_t>> options = preset_options(instances[k]);
    for (auto& preset : options) {
      if (has_floor && preset < floor) continue;
      chosen.push_back(preset);
      mark(preset, true);
      bool keep_going = pick_instance(k + 1);
      mark(preset, false);
      chosen.pop_back();
      if (!keep_going) return false;
    }
    return true;
  }

  void mark(const std::vector<std::uint32_t>& preset, bool value) {
    for (std::uint32_t b : preset) {
      auto it = std::lower_bound(slice.begin(), slice.end(), b);
      used[static_cast<std::size_t>(it - slice.begin())] = value;
    }
  }

  std::vector<std::vector<std::uint32_t>> preset_options(TransitionIdx t) {
    std::vector<std::vector<std::uint32_t>> partial{{}};
    for (const auto& [s, w] : net.transitions[t].pre) {
      std::vector<std::uint32_t> pool;
      for (std::size_t k = 0; k < slice.size(); ++k)
        if (!used[k] && on.conditions[slice[k]].place == s) pool.push_back(slice[k]);
      std::vector<std::vector<std::uint32_t>> combos;
      std::vector<std::uint32_t> current;
      k_subsets(pool, static_cast<std::size_t>(w), 0, current, combos);
      if (combos.empty()) return {};
      std::vector<std::vector<std::uint32_t>> extended;
      for (const auto& head : partial)
        for (const auto& tail : combos) {
          std::vector<std::uint32_t> preset = head;
          preset.insert(preset.end(), tail.begin(), tail.end());
          extended.push_back(std::move(preset));
        }
      partial = std::move(extended);
    }
    for (auto& preset : partial) std::sort(preset.begin(), preset.end());
    std::sort(partial.begin(), partial.end());
    return partial;
  }
};

}  // namespace

UnfoldResult unfold(const ZSNet& net, const UnfoldOptions& options) {
  MembraneShape shape = membrane_shape(net);
  if (!shape.ok)
    throw ShapeViolationError("layer-bounded unfolding needs a membrane-shaped net: " +
                              shape.violation);
  Builder builder(net);
  builder.on.layers_requested = options.layers;

  std::map<std::vector<std::uint32_t>, std::uint32_t> slice_layer;
  std::vector<std::uint32_t> initial_slice = builder.on.initial_conditions;
  std::sort(initial_slice.begin(), initial_slice.end());
  slice_layer[initial_slice] = 0;

  bool hit_budget = false;
  std::size_t assignments = 0;  // guards enumeration even when events deduplicate
  std::uint32_t layer = 0;
  for (layer = 1; layer <= options.layers && !hit_budget; ++layer) {
    std::vector<std::vector<std::uint32_t>> frontier;
    for (const auto& [slice, seen_at] : slice_layer)
      if (seen_at == layer - 1) frontier.push_back(slice);
    if (frontier.empty()) break;

    for (const auto& slice : frontier) {
      Marking folded = fold_marking(builder.on, slice);
      for (const Transaction& tx : enumerate_stable_transactions(net, folded)) {
        std::vector<TransitionIdx> instances;
        for (const auto& [t, c] : tx.rule_part)
          for (long long k = 0; k < c; ++k) instances.push_back(t);

        AssignmentEnum assign{net, builder.on, slice, instances, {}, {}, {}};
        assign.sink = [&](const std::vector<TransitionIdx>& ts,
                          const std::vector<std::vector<std::uint32_t>>& presets) {
          if (builder.on.events.size() >= options.event_budget ||
              ++assignments > 4 * options.event_budget) {
            hit_budget = true;
            return false;
          }
          std::vector<std::uint32_t> consumed;
          std::vector<std::uint32_t> heated;
          for (std::size_t k = 0; k < ts.size(); ++k) {
            auto [event, created] = builder.add_event(presets[k], ts[k], layer);
            consumed.insert(consumed.end(), presets[k].begin(), presets[k].end());
            for (std::uint32_t z : builder.on.events[event].postset) {
              TransitionIdx drain = *shape.drain_of_zero_place[builder.on.conditions[z].place];
              auto [heat, heat_created] = builder.add_event({z}, drain, layer);
              for (std::uint32_t b : builder.on.events[heat].postset) heated.push_back(b);
            }
          }
          std::sort(consumed.begin(), consumed.end());
          std::vector<std::uint32_t> next_slice;
          std::set_difference(slice.begin(), slice.end(), consumed.begin(), consumed.end(),
                              std::back_inserter(next_slice));
          next_slice.insert(next_slice.end(), heated.begin(), heated.end());
          std::sort(next_slice.begin(), next_slice.end());
          slice_layer.try_emplace(next_slice, layer);
          return true;
        };
        if (!assign.run()) break;
      }
      if (hit_budget) break;
    }
    if (!hit_budget) builder.on.layers_complete = layer;
  }
  builder.on.truncated = hit_budget;
  if (!hit_budget) builder.on.layers_complete = options.layers;

  UnfoldResult result;
  result.on = std::move(builder.on);
  result.fold.net = &net;
  return result;
}

UnfoldResult unfold_saturate(const ZSNet& net, std::size_t event_budget) {
  Builder builder(net);
  bool hit_budget = false;

  while (!hit_budget) {
    std::size_t condition_snapshot = builder.on.conditions.size();
    std::size_t events_before = builder.on.events.size();
    OccurrenceNetAnalysis relations(builder.on);

    for (TransitionIdx t = 0; t < net.transitions.size() && !hit_budget; ++t) {
      std::vector<std::vector<std::uint32_t>> partial{{}};
      for (const auto& [s, w] : net.transitions[t].pre) {
        std::vector<std::uint32_t> pool;
        for (std::uint32_t c = 0; c < condition_snapshot; ++c)
          if (builder.on.conditions[c].place == s) pool.push_back(c);
        std::vector<std::vector<std::uint32_t>> extended;
        std::vector<std::uint32_t> current;
        std::vector<std::vector<std::uint32_t>> combos;
        k_subsets(pool, static_cast<std::size_t>(w), 0, current, combos);
        for (const auto& head : partial)
          for (const auto& tail : combos) {
            std::vector<std::uint32_t> preset = head;
            preset.insert(preset.end(), tail.begin(), tail.end());
            extended.push_back(std::move(preset));
          }
        partial = std::move(extended);
        if (partial.empty()) break;
      }
      for (auto& preset : partial) {
        std::sort(preset.begin(), preset.end());
        if (builder.event_ids.count({preset, t})) continue;
        bool co = true;
        for (std::size_t a = 0; a < preset.size() && co; ++a)
          for (std::size_t b = a + 1; b < preset.size() && co; ++b)
            co = relations.concurrent(NodeId::condition(preset[a]), NodeId::condition(preset[b]));
        if (!co) continue;
        if (builder.on.events.size() >= event_budget) {
          hit_budget = true;
          break;
        }
        std::uint32_t layer = 0;
        for (std::uint32_t b : preset) layer = std::max(layer, builder.on.conditions[b].layer);
        auto [event, created] = builder.add_event(preset, t, layer + 1);
        for (std::uint32_t b : builder.on.events[event].postset)
          builder.on.conditions[b].layer = layer + 1;
      }
    }
    if (builder.on.events.size() == events_before) break;
  }
  builder.on.truncated = hit_budget;
  builder.on.layers_complete = 0;

  UnfoldResult result;
  result.on = std::move(builder.on);
  result.fold.net = &net;
  return result;
}

bool causally_before(const OccurrenceNet& on, NodeId x, NodeId y) {
  return analysis(on).strictly_before(x, y);
}

bool in_conflict(const OccurrenceNet& on, NodeId x, NodeId y) {
  return analysis(on).in_conflict(x, y);
}

bool concurrent(const OccurrenceNet& on, NodeId x, NodeId y) {
  return analysis(on).concurrent(x, y);
}

bool co_set(const OccurrenceNet& on, std::span<const std::uint32_t> conditions) {
  const auto& rel = analysis(on);
  for (std::size_t a = 0; a < conditions.size(); ++a)
    for (std::size_t b = a + 1; b < conditions.size(); ++b)
      if (!rel.concurrent(NodeId::condition(conditions[a]), NodeId::condition(conditions[b])))
        return false;
  return true;
}

Marking fold_marking(const OccurrenceNet& on, std::span<const std::uint32_t> conditions) {
  Marking m;
  for (std::uint32_t b : conditions) m.add(on.conditions.at(b).place, 1);
  return m;
}

Step fold_step(const OccurrenceNet& on, const std::vector<std::uint32_t>& events) {
  Step u;
  for (std::uint32_t e : events) u.add(on.events.at(e).transition, 1);
  return u;
}

bool is_reachable_marking(const OccurrenceNet& on, std::span<const std::uint32_t> conditions) {
  std::set<std::uint32_t> target(conditions.begin(), conditions.end());
  if (target.size() != conditions.size()) return false;

  // The causal past of the target must fire; collect it by walking producers.
  std::set<std::uint32_t> past;  // event ids
  std::deque<std::uint32_t> work;
  auto need_event = [&](std::uint32_t e) {
    if (past.insert(e).second) work.push_back(e);
  };
  for (std::uint32_t b : target) {
    std::int32_t p = on.conditions.at(b).producer;
    if (p >= 0) need_event(static_cast<std::uint32_t>(p));
  }
  while (!work.empty()) {
    std::uint32_t e = work.front();
    work.pop_front();
    for (std::uint32_t b : on.events[e].preset) {
      std::int32_t p = on.conditions[b].producer;
      if (p >= 0) need_event(static_cast<std::uint32_t>(p));
    }
  }

  std::set<std::uint32_t> marking(on.initial_conditions.begin(), on.initial_conditions.end());
  std::set<std::uint32_t> consumed;
  for (std::uint32_t e : past) {
    for (std::uint32_t b : on.events[e].postset) marking.insert(b);
  }
  for (std::uint32_t e : past) {
    for (std::uint32_t b : on.events[e].preset) {
      if (!consumed.insert(b).second) return false;  // the past is self-conflicting
      marking.erase(b);
    }
  }
  if (marking == target) return true;

  // The only events that leave no trace in a marking are those with an empty
  // postset; a surplus can sometimes be consumed by firing such events.
  std::set<std::uint32_t> surplus;
  for (std::uint32_t b : marking)
    if (!target.count(b)) surplus.insert(b);
  for (std::uint32_t b : target)
    if (!marking.count(b)) return false;
  std::vector<std::uint32_t> sinks;
  for (std::uint32_t e = 0; e < on.events.size(); ++e) {
    if (past.count(e) || !on.events[e].postset.empty()) continue;
    bool fits = true;
    for (std::uint32_t b : on.events[e].preset) fits = fits && surplus.count(b) > 0;
    if (fits) sinks.push_back(e);
  }
  std::function<bool(std::set<std::uint32_t>&, std::size_t)> cover =
      [&](std::set<std::uint32_t>& remaining, std::size_t from) {
        if (remaining.empty()) return true;
        for (std::size_t k = from; k < sinks.size(); ++k) {
          const auto& pre = on.events[sinks[k]].preset;
          bool fits = true;
          for (std::uint32_t b : pre) fits = fits && remaining.count(b) > 0;
          if (!fits) continue;
          for (std::uint32_t b : pre) remaining.erase(b);
          if (cover(remaining, k + 1)) return true;
          for (std::uint32_t b : pre) remaining.insert(b);
        }
        return false;
      };
  return cover(surplus, 0);
}

ZSNet occurrence_as_zsnet(const OccurrenceNet& on, const ZSNet& folded) {
  ZSNet net;
  for (std::uint32_t c = 0; c < on.conditions.size(); ++c) {
    const auto& cond = on.conditions[c];
    net.places.push_back(
        {"c" + std::to_string(c) + ":" + folded.places[cond.place].name, cond.zero});
  }
  for (std::uint32_t e = 0; e < on.events.size(); ++e) {
    const auto& ev = on.events[e];
    ZSNet::Transition t;
    t.name = "e" + std::to_string(e) + ":" + folded.transitions[ev.transition].name;
    net.transitions.push_back(std::move(t));
    for (std::uint32_t b : ev.preset) net.add_arc_in(e, b, 1);
    for (std::uint32_t b : ev.postset) net.add_arc_out(e, b, 1);
  }
  for (std::uint32_t b : on.initial_conditions) net.initial.add(b, 1);
  return net;
}

CoverageReport states_cover_markings(const ZSNet& net, const OccurrenceNet& on,
                                     std::size_t max_firings, std::size_t budget) {
  CoverageReport report;

  // Folded images of every reachable marking of the unfolding.
  std::set<Marking> images;
  std::set<std::set<std::uint32_t>> seen;
  std::deque<std::set<std::uint32_t>> work;
  std::set<std::uint32_t> start(on.initial_conditions.begin(), on.initial_conditions.end());
  seen.insert(start);
  work.push_back(start);
  while (!work.empty()) {
    std::set<std::uint32_t> m = work.front();
    work.pop_front();
    std::vector<std::uint32_t> as_vector(m.begin(), m.end());
    images.insert(fold_marking(on, as_vector));
    for (std::uint32_t e = 0; e < on.events.size(); ++e) {
      bool ready = true;
      for (std::uint32_t b : on.events[e].preset) ready = ready && m.count(b) > 0;
      if (!ready) continue;
      std::set<std::uint32_t> next = m;
      for (std::uint32_t b : on.events[e].preset) next.erase(b);
      for (std::uint32_t b : on.events[e].postset) next.insert(b);
      if (seen.insert(next).second) {
        if (seen.size() > budget)
          throw BudgetExceededError("unfolding marking closure exceeded its budget");
        work.push_back(next);
      }
    }
  }
  report.unfolding_markings = seen.size();

  std::set<Marking> net_seen{net.initial};
  std::deque<std::pair<Marking, std::size_t>> frontier{{net.initial, 0}};
  while (!frontier.empty()) {
    auto [m, dist] = frontier.front();
    frontier.pop_front();
    ++report.net_markings;
    if (!images.count(m)) {
      report.ok = false;
      if (report.witness.empty()) report.witness = marking_text(net, m);
    }
    if (dist == max_firings) continue;
    for (TransitionIdx t = 0; t < net.transitions.size(); ++t) {
      Step single{{t, 1}};
      if (!enabled(net, m, single)) continue;
      Marking next = fire(net, m, single);
      if (net_seen.insert(next).second) {
        if (net_seen.size() > budget)
          throw BudgetExceededError("net marking closure exceeded its budget");
        frontier.push_back({next, dist + 1});
      }
    }
  }
  return report;
}

std::string unfolding_to_dot(const OccurrenceNet& on, const ZSNet& net) {
  std::ostringstream out;
  out << "digraph unfolding {\n  rankdir=LR;\n";
  std::set<std::uint32_t> initial(on.initial_conditions.begin(), on.initial_conditions.end());
  for (std::uint32_t c = 0; c < on.conditions.size(); ++c) {
    const auto& cond = on.conditions[c];
    out << "  c" << c << " [label=\"" << net.places[cond.place].name << "\", shape="
        << (cond.zero ? "doublecircle, width=0.3, fontsize=9" : "circle");
    if (initial.count(c)) out << ", penwidth=2.5";
    out << "];\n";
  }
  for (std::uint32_t e = 0; e < on.events.size(); ++e) {
    out << "  e" << e << " [label=\"" << net.transitions[on.events[e].transition].name
        << "\", shape=box];\n";
    for (std::uint32_t b : on.events[e].preset) out << "  c" << b << " -> e" << e << ";\n";
    for (std::uint32_t b : on.events[e].postset) out << "  e" << e << " -> c" << b << ";\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace zsm
