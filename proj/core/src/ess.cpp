#include "zsm/ess.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace zsm {

Pes pes_of(const OccurrenceNet& on) {
  Pes pes;
  pes.size = on.events.size();
  pes.le.assign(pes.size, std::vector<bool>(pes.size, false));
  pes.conflict.assign(pes.size, std::vector<bool>(pes.size, false));
  for (std::uint32_t a = 0; a < pes.size; ++a) {
    pes.le[a][a] = true;
    for (std::uint32_t b = 0; b < pes.size; ++b) {
      if (a == b) continue;
      if (causally_before(on, NodeId::event(a), NodeId::event(b))) pes.le[a][b] = true;
      if (a < b && in_conflict(on, NodeId::event(a), NodeId::event(b))) {
        pes.conflict[a][b] = true;
        pes.conflict[b][a] = true;
      }
    }
  }
  return pes;
}

namespace {

Marking slice_marking(const std::vector<std::uint32_t>& slice) {
  Marking m;
  for (std::uint32_t b : slice) m.add(b, 1);
  return m;
}

std::vector<std::uint32_t> marking_support(const Marking& m) {
  std::vector<std::uint32_t> out;
  for (const auto& [place, count] : m)
    for (long long k = 0; k < count; ++k) out.push_back(place);
  return out;
}

}  // namespace

SimFamily sim_classes(const OccurrenceNet& on, const ZSNet& folded) {
  SimFamily family;
  family.truncated = on.truncated;
  if (on.layers_complete == 0 || on.events.empty()) return family;

  ZSNet view = occurrence_as_zsnet(on, folded);
  std::map<std::vector<std::uint32_t>, std::uint32_t> slice_round;
  std::vector<std::uint32_t> initial_slice = on.initial_conditions;
  std::sort(initial_slice.begin(), initial_slice.end());
  slice_round[initial_slice] = 0;

  std::set<std::vector<std::uint32_t>> seen_classes;
  for (std::uint32_t round = 1; round <= on.layers_complete; ++round) {
    std::vector<std::vector<std::uint32_t>> frontier;
    for (const auto& [slice, at] : slice_round)
      if (at == round - 1) frontier.push_back(slice);
    for (const auto& slice : frontier) {
      for (const Transaction& tx : enumerate_stable_transactions(view, slice_marking(slice))) {
        std::vector<std::uint32_t> members;
        for (const auto& [event, count] : tx.rule_part) members.push_back(event);
        std::sort(members.begin(), members.end());
        std::vector<std::uint32_t> next = marking_support(tx.final_marking);
        slice_round.try_emplace(next, round);
        if (seen_classes.insert(members).second) {
          SimClass cls;
          cls.events = members;
          cls.layer = round;
          cls.slice = slice;
          cls.folded_step = fold_step(on, members);
          family.classes.push_back(std::move(cls));
        }
      }
    }
  }
  return family;
}

SliceClass classify_slice(const OccurrenceNet& on, const ZSNet& folded,
                          std::span<const std::uint32_t> conditions) {
  for (std::uint32_t b : conditions)
    if (b >= on.conditions.size()) throw Error("unknown condition id " + std::to_string(b));
  if (!co_set(on, conditions) || !is_reachable_marking(on, conditions))
    return SliceClass::NotASlice;

  std::vector<std::uint32_t> zero_part;
  for (std::uint32_t b : conditions)
    if (on.conditions[b].zero) zero_part.push_back(b);
  if (zero_part.empty()) return SliceClass::Stable;

  ZSNet view = occurrence_as_zsnet(on, folded);

  // Producers of the zero conditions and the drains emptying them.
  std::set<std::uint32_t> producers;
  std::set<std::uint32_t> drain_events;
  for (std::uint32_t z : zero_part) {
    if (on.conditions[z].producer < 0) return SliceClass::Unstable;  // malformed net
    producers.insert(static_cast<std::uint32_t>(on.conditions[z].producer));
  }
  for (std::uint32_t e = 0; e < on.events.size(); ++e)
    for (std::uint32_t b : on.events[e].preset)
      for (std::uint32_t z : zero_part)
        if (b == z) drain_events.insert(e);
  Step drains;
  for (std::uint32_t e : drain_events) drains.add(e, 1);

  // The stable slice beneath: strip the zero conditions, put back what their
  // producers consumed.
  std::set<std::uint32_t> beneath(conditions.begin(), conditions.end());
  for (std::uint32_t z : zero_part) beneath.erase(z);
  for (std::uint32_t e : producers)
    for (std::uint32_t b : on.events[e].preset) beneath.insert(b);
  std::vector<std::uint32_t> stable_slice(beneath.begin(), beneath.end());

  Step producer_step;
  for (std::uint32_t e : producers) producer_step.add(e, 1);
  std::vector<Step> seq{producer_step};
  if (!drains.empty()) seq.push_back(drains);

  bool maximal = false;
  try {
    maximal = check_stable_transaction(view, slice_marking(stable_slice), seq);
  } catch (const InvalidSequenceError&) {
    maximal = false;
  }
  if (!maximal) return SliceClass::Unstable;

  // Transaction reachability of the stable slice beneath.
  std::set<std::vector<std::uint32_t>> reachable;
  std::vector<std::vector<std::uint32_t>> work;
  std::vector<std::uint32_t> initial_slice = on.initial_conditions;
  std::sort(initial_slice.begin(), initial_slice.end());
  reachable.insert(initial_slice);
  work.push_back(initial_slice);
  while (!work.empty()) {
    std::vector<std::uint32_t> slice = work.back();
    work.pop_back();
    for (const Transaction& tx : enumerate_stable_transactions(view, slice_marking(slice))) {
      std::vector<std::uint32_t> next = marking_support(tx.final_marking);
      if (reachable.insert(next).second) work.push_back(next);
    }
  }
  return reachable.count(stable_slice) ? SliceClass::MaximallySimultaneous
                                       : SliceClass::MaximalUnstable;
}

Ess ess_of(const OccurrenceNet& on, const ZSNet& folded) {
  MembraneShape shape = membrane_shape(folded);
  if (!shape.ok) throw ShapeViolationError(shape.violation);
  std::set<TransitionIdx> producers(shape.producers.begin(), shape.producers.end());

  Ess ess;
  std::map<std::uint32_t, std::uint32_t> to_ess;
  for (std::uint32_t e = 0; e < on.events.size(); ++e) {
    if (!producers.count(on.events[e].transition)) continue;
    to_ess[e] = static_cast<std::uint32_t>(ess.unfolding_event.size());
    ess.unfolding_event.push_back(e);
    ess.label.push_back(on.events[e].transition);
  }

  std::size_t n = ess.unfolding_event.size();
  ess.pes.size = n;
  ess.pes.le.assign(n, std::vector<bool>(n, false));
  ess.pes.conflict.assign(n, std::vector<bool>(n, false));
  for (std::uint32_t a = 0; a < n; ++a) {
    ess.pes.le[a][a] = true;
    for (std::uint32_t b = 0; b < n; ++b) {
      if (a == b) continue;
      NodeId na = NodeId::event(ess.unfolding_event[a]);
      NodeId nb = NodeId::event(ess.unfolding_event[b]);
      if (causally_before(on, na, nb)) ess.pes.le[a][b] = true;
      if (a < b && in_conflict(on, na, nb)) {
        ess.pes.conflict[a][b] = true;
        ess.pes.conflict[b][a] = true;
      }
    }
  }

  ess.sim = sim_classes(on, folded);
  for (SimClass& cls : ess.sim.classes) {
    for (std::uint32_t& e : cls.events) e = to_ess.at(e);
    std::sort(cls.events.begin(), cls.events.end());
  }
  return ess;
}

EssValidation validate_ess(const Ess& ess) {
  EssValidation v;
  auto note = [&v](bool& flag, const std::string& text) {
    flag = false;
    if (v.violations.size() < 16) v.violations.push_back(text);
  };

  std::vector<bool> covered(ess.pes.size, false);
  for (const SimClass& cls : ess.sim.classes) {
    if (cls.events.empty()) note(v.nonempty_classes, "empty simultaneity class");
    for (std::uint32_t e : cls.events) covered.at(e) = true;
    for (std::size_t a = 0; a < cls.events.size(); ++a)
      for (std::size_t b = a + 1; b < cls.events.size(); ++b)
        if (!ess.pes.concurrent(cls.events[a], cls.events[b]))
          note(v.classes_concurrent, "class events " + std::to_string(cls.events[a]) + "," +
                                         std::to_string(cls.events[b]) + " are not concurrent");
  }
  for (std::uint32_t e = 0; e < covered.size(); ++e)
    if (!covered[e])
      note(v.classes_cover_events, "event " + std::to_string(e) + " lies in no class");

  for (std::size_t i = 0; i < ess.sim.classes.size(); ++i) {
    for (std::size_t j = i + 1; j < ess.sim.classes.size(); ++j) {
      const auto& s = ess.sim.classes[i].events;
      const auto& t = ess.sim.classes[j].events;
      std::vector<std::uint32_t> common, only_s, only_t;
      std::set_intersection(s.begin(), s.end(), t.begin(), t.end(), std::back_inserter(common));
      if (common.empty()) continue;
      std::set_difference(s.begin(), s.end(), t.begin(), t.end(), std::back_inserter(only_s));
      std::set_difference(t.begin(), t.end(), s.begin(), s.end(), std::back_inserter(only_t));
      if (only_s.empty() || only_t.empty()) {
        std::ostringstream text;
        text << "containment between overlapping classes {";
        for (std::uint32_t e : s) text << e << ' ';
        text << "} and {";
        for (std::uint32_t e : t) text << e << ' ';
        text << "}";
        note(v.no_containment, text.str());
      }
      for (std::uint32_t a : only_s)
        for (std::uint32_t b : only_t)
          if (!ess.pes.conflict[a][b])
            note(v.overlap_conflict, "events " + std::to_string(a) + "," + std::to_string(b) +
                                         " of overlapping classes are not in conflict");
    }
  }

  for (std::uint32_t a = 0; a < ess.pes.size; ++a)
    for (std::uint32_t b = 0; b < ess.pes.size; ++b)
      if (ess.pes.conflict[a][b])
        for (std::uint32_t c = 0; c < ess.pes.size; ++c)
          if (b != c && ess.pes.le[b][c] && !ess.pes.conflict[a][c])
            note(v.conflict_hereditary, "conflict of " + std::to_string(a) + "," +
                                            std::to_string(b) + " not inherited to " +
                                            std::to_string(c));
  return v;
}

namespace {

bool downward_closed(const Pes& pes, const std::vector<bool>& selected) {
  for (std::uint32_t e = 0; e < pes.size; ++e) {
    if (!selected[e]) continue;
    for (std::uint32_t d = 0; d < pes.size; ++d)
      if (d != e && pes.le[d][e] && !selected[d]) return false;
  }
  return true;
}

std::vector<std::uint32_t> selected_to_vector(const std::vector<bool>& selected) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t e = 0; e < selected.size(); ++e)
    if (selected[e]) out.push_back(e);
  return out;
}

void enumerate_covers(const Ess& ess, std::size_t k, std::vector<bool>& selected,
                      std::set<std::vector<std::uint32_t>>& results, std::size_t max_results,
                      std::size_t& visited) {
  if (++visited > 64 * (max_results + 1))
    throw BudgetExceededError("configuration enumeration exceeded its budget");
  if (k == ess.sim.classes.size()) {
    if (downward_closed(ess.pes, selected)) {
      results.insert(selected_to_vector(selected));
      if (results.size() > max_results)
        throw BudgetExceededError("configuration enumeration exceeded its budget");
    }
    return;
  }
  enumerate_covers(ess, k + 1, selected, results, max_results, visited);
  const auto& cls = ess.sim.classes[k].events;
  for (std::uint32_t e : cls)
    if (selected[e]) return;  // classes of one configuration stay disjoint
  for (std::uint32_t e : cls)
    for (std::uint32_t f = 0; f < ess.pes.size; ++f)
      if (selected[f] && ess.pes.conflict[e][f]) return;
  for (std::uint32_t e : cls) selected[e] = true;
  enumerate_covers(ess, k + 1, selected, results, max_results, visited);
  for (std::uint32_t e : cls) selected[e] = false;
}

}  // namespace

std::vector<std::vector<std::uint32_t>> ess_configurations(const Ess& ess,
                                                           std::size_t max_results) {
  std::set<std::vector<std::uint32_t>> results;
  std::vector<bool> selected(ess.pes.size, false);
  std::size_t visited = 0;
  enumerate_covers(ess, 0, selected, results, max_results, visited);
  return {results.begin(), results.end()};
}

std::vector<std::vector<std::uint32_t>> pes_configurations(const Pes& pes,
                                                           std::size_t max_results) {
  // Events are processed in a topological order of <=, so downward closure
  // can be enforced during construction.
  std::vector<std::uint32_t> order(pes.size);
  for (std::uint32_t e = 0; e < pes.size; ++e) order[e] = e;
  std::stable_sort(order.begin(), order.end(), [&pes](std::uint32_t a, std::uint32_t b) {
    std::size_t below_a = 0, below_b = 0;
    for (std::uint32_t d = 0; d < pes.size; ++d) {
      below_a += pes.le[d][a] ? 1 : 0;
      below_b += pes.le[d][b] ? 1 : 0;
    }
    return below_a < below_b;
  });

  std::set<std::vector<std::uint32_t>> results;
  std::vector<bool> selected(pes.size, false);
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == order.size()) {
      results.insert(selected_to_vector(selected));
      if (results.size() > max_results)
        throw BudgetExceededError("configuration enumeration exceeded its budget");
      return;
    }
    rec(k + 1);
    std::uint32_t e = order[k];
    bool allowed = true;
    for (std::uint32_t d = 0; d < pes.size && allowed; ++d) {
      if (d == e) continue;
      if (pes.le[d][e] && !selected[d]) allowed = false;
      if (selected[d] && pes.conflict[d][e]) allowed = false;
    }
    if (allowed) {
      selected[e] = true;
      rec(k + 1);
      selected[e] = false;
    }
  };
  rec(0);
  return {results.begin(), results.end()};
}

Pes ess_to_pes(const Ess& ess) { return ess.pes; }

Ess pes_to_ess(const Pes& pes) {
  Ess ess;
  ess.pes = pes;
  for (std::uint32_t e = 0; e < pes.size; ++e) {
    ess.unfolding_event.push_back(e);
    ess.label.push_back(e);
    SimClass cls;
    cls.events = {e};
    ess.sim.classes.push_back(std::move(cls));
  }
  return ess;
}

namespace {

struct PartitionSearch {
  const Ess& ess;
  std::vector<std::size_t> usable_classes;  // classes fully inside X
  std::vector<bool> target;                 // membership of X
  std::size_t remaining = 0;
  std::vector<std::size_t> chosen;
  std::vector<std::vector<std::size_t>> partitions;

  void run(std::size_t from) {
    if (remaining == 0) {
      partitions.push_back(chosen);
      return;
    }
    if (partitions.size() >= 64) return;  // plenty for the replay preference
    for (std::size_t k = from; k < usable_classes.size(); ++k) {
      const auto& events = ess.sim.classes[usable_classes[k]].events;
      bool fits = true;
      for (std::uint32_t e : events) fits = fits && target[e];
      if (!fits) continue;
      for (std::uint32_t e : events) target[e] = false;
      remaining -= events.size();
      chosen.push_back(usable_classes[k]);
      run(k + 1);
      chosen.pop_back();
      remaining += events.size();
      for (std::uint32_t e : events) target[e] = true;
    }
  }
};

std::vector<VectorMultiRule> rules_of_partition(const Ess& ess, const CompiledNet& cn,
                                                const std::vector<std::size_t>& partition,
                                                bool* acyclic) {
  std::size_t n = partition.size();
  std::vector<std::vector<bool>> precedes(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      for (std::uint32_t e : ess.sim.classes[partition[i]].events)
        for (std::uint32_t f : ess.sim.classes[partition[j]].events)
          if (e != f && ess.pes.le[e][f]) precedes[i][j] = true;
    }

  std::vector<std::size_t> order;
  std::vector<bool> placed(n, false);
  for (std::size_t round = 0; round < n; ++round) {
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (placed[i]) continue;
      bool ready = true;
      for (std::size_t j = 0; j < n; ++j)
        if (!placed[j] && j != i && precedes[j][i]) ready = false;
      if (!ready) continue;
      // canonical tie-break: the class with the smallest first event
      if (best == n || ess.sim.classes[partition[i]].events < ess.sim.classes[partition[best]].events)
        best = i;
    }
    if (best == n) {
      *acyclic = false;
      return {};
    }
    placed[best] = true;
    order.push_back(best);
  }
  *acyclic = true;

  std::vector<VectorMultiRule> sequence;
  for (std::size_t i : order) {
    VectorMultiRule vmr;
    vmr.per_membrane.resize(cn.system.membrane_count());
    for (std::uint32_t e : ess.sim.classes[partition[i]].events) {
      const TransitionRef& ref = cn.transition_refs.at(ess.label[e]);
      vmr.per_membrane[ref.membrane - 1].add(ref.rule_idx, 1);
    }
    sequence.push_back(std::move(vmr));
  }
  return sequence;
}

bool replays(const CompiledNet& cn, const std::vector<VectorMultiRule>& sequence) {
  Configuration c = heated(initial(cn.system));
  for (const VectorMultiRule& vmr : sequence) {
    bool stepped = false;
    for (const auto& [candidate, successor] : macro_steps(cn.system, c)) {
      if (candidate == vmr) {
        c = successor;
        stepped = true;
        break;
      }
    }
    if (!stepped) return false;
  }
  return true;
}

}  // namespace

std::vector<VectorMultiRule> configuration_to_rules(const Ess& ess, const CompiledNet& cn,
                                                    std::span<const std::uint32_t> events) {
  std::vector<bool> target(ess.pes.size, false);
  for (std::uint32_t e : events) {
    if (e >= ess.pes.size) throw Error("unknown event index " + std::to_string(e));
    target[e] = true;
  }
  for (std::uint32_t e : events) {
    for (std::uint32_t d = 0; d < ess.pes.size; ++d) {
      if (target[d] && d != e && ess.pes.conflict[d][e])
        throw Error("not a configuration: events in conflict");
      if (d != e && ess.pes.le[d][e] && !target[d])
        throw Error("not a configuration: not downward closed");
    }
  }

  PartitionSearch search{ess, {}, target, events.size(), {}, {}};
  for (std::size_t k = 0; k < ess.sim.classes.size(); ++k) {
    bool inside = true;
    for (std::uint32_t e : ess.sim.classes[k].events) inside = inside && target[e];
    if (inside) search.usable_classes.push_back(k);
  }
  search.run(0);
  if (search.partitions.empty())
    throw Error("not a configuration: no disjoint cover by simultaneity classes");

  std::vector<VectorMultiRule> fallback;
  bool have_fallback = false;
  for (const auto& partition : search.partitions) {
    bool acyclic = false;
    std::vector<VectorMultiRule> sequence = rules_of_partition(ess, cn, partition, &acyclic);
    if (!acyclic) continue;
    if (replays(cn, sequence)) return sequence;
    if (!have_fallback) {
      fallback = std::move(sequence);
      have_fallback = true;
    }
  }
  if (!have_fallback) throw Error("not a configuration: no acyclic decomposition");
  return fallback;
}

std::string ess_to_dot(const Ess& ess, const CompiledNet& cn) {
  std::ostringstream out;
  out << "digraph ess {\n  rankdir=TB;\n  node [shape=box];\n";
  for (std::uint32_t e = 0; e < ess.pes.size; ++e)
    out << "  e" << e << " [label=\"" << cn.net.transitions[ess.label[e]].name << "\"];\n";

  // causality, transitively reduced
  for (std::uint32_t a = 0; a < ess.pes.size; ++a)
    for (std::uint32_t b = 0; b < ess.pes.size; ++b) {
      if (a == b || !ess.pes.le[a][b]) continue;
      bool direct = true;
      for (std::uint32_t c = 0; c < ess.pes.size && direct; ++c)
        if (c != a && c != b && ess.pes.le[a][c] && ess.pes.le[c][b]) direct = false;
      if (direct) out << "  e" << a << " -> e" << b << ";\n";
    }

  // immediate conflicts, dashed
  for (std::uint32_t a = 0; a < ess.pes.size; ++a)
    for (std::uint32_t b = a + 1; b < ess.pes.size; ++b) {
      if (!ess.pes.conflict[a][b]) continue;
      bool inherited = false;
      for (std::uint32_t c = 0; c < ess.pes.size && !inherited; ++c) {
        if (c != a && ess.pes.le[c][a] && ess.pes.conflict[c][b]) inherited = true;
        if (c != b && ess.pes.le[c][b] && ess.pes.conflict[a][c]) inherited = true;
      }
      if (!inherited) out << "  e" << a << " -> e" << b << " [dir=none, style=dashed];\n";
    }

  bool disjoint = true;
  std::vector<bool> member(ess.pes.size, false);
  for (const SimClass& cls : ess.sim.classes)
    for (std::uint32_t e : cls.events) {
      if (member[e]) disjoint = false;
      member[e] = true;
    }
  if (disjoint) {
    for (std::size_t k = 0; k < ess.sim.classes.size(); ++k) {
      out << "  subgraph cluster_sim" << k << " {\n    style=dotted;\n    label=\"sim " << k
          << "\";\n";
      for (std::uint32_t e : ess.sim.classes[k].events) out << "    e" << e << ";\n";
      out << "  }\n";
    }
  } else {
    // overlapping classes cannot be drawn as enclosures; use dotted hubs
    for (std::size_t k = 0; k < ess.sim.classes.size(); ++k) {
      out << "  sim" << k << " [label=\"sim " << k
          << "\", shape=ellipse, style=dotted, fontsize=9];\n";
      for (std::uint32_t e : ess.sim.classes[k].events)
        out << "  sim" << k << " -> e" << e << " [style=dotted, dir=none];\n";
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace zsm
