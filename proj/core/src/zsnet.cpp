#include "zsm/zsnet.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>

namespace zsm {

namespace {

long long lookup(const std::vector<std::pair<PlaceIdx, long long>>& arcs, PlaceIdx s) {
  auto it = std::lower_bound(arcs.begin(), arcs.end(), s,
                             [](const auto& e, PlaceIdx p) { return e.first < p; });
  return (it != arcs.end() && it->first == s) ? it->second : 0;
}

void insert_arc(std::vector<std::pair<PlaceIdx, long long>>& arcs, PlaceIdx s, long long w) {
  if (w == 0) return;
  if (w < 0) throw Error("negative arc weight");
  auto it = std::lower_bound(arcs.begin(), arcs.end(), s,
                             [](const auto& e, PlaceIdx p) { return e.first < p; });
  if (it != arcs.end() && it->first == s)
    it->second = checked_add(it->second, w);
  else
    arcs.insert(it, {s, w});
}

}  // namespace

long long ZSNet::flow_in(PlaceIdx s, TransitionIdx t) const {
  check_transition(t);
  return lookup(transitions[t].pre, s);
}

long long ZSNet::flow_out(TransitionIdx t, PlaceIdx s) const {
  check_transition(t);
  return lookup(transitions[t].post, s);
}

void ZSNet::add_arc_in(TransitionIdx t, PlaceIdx s, long long w) {
  check_transition(t);
  insert_arc(transitions[t].pre, s, w);
}

void ZSNet::add_arc_out(TransitionIdx t, PlaceIdx s, long long w) {
  check_transition(t);
  insert_arc(transitions[t].post, s, w);
}

void ZSNet::check_transition(TransitionIdx t) const {
  if (t >= transitions.size())
    throw Error("transition index " + std::to_string(t) + " out of range");
}

bool enabled(const ZSNet& net, const Marking& m, const Step& u) {
  Marking demand;
  for (const auto& [t, times] : u) {
    net.check_transition(t);
    for (const auto& [s, w] : net.transitions[t].pre) demand.add(s, checked_mul(times, w));
  }
  return demand.leq(m);
}

Marking fire(const ZSNet& net, const Marking& m, const Step& u) {
  if (!enabled(net, m, u)) throw NotEnabledError("step " + step_text(net, u) + " not enabled");
  Marking consumed, produced;
  for (const auto& [t, times] : u) {
    for (const auto& [s, w] : net.transitions[t].pre) consumed.add(s, checked_mul(times, w));
    for (const auto& [s, w] : net.transitions[t].post) produced.add(s, checked_mul(times, w));
  }
  return m.minus(consumed).plus(produced);
}

bool is_stable(const ZSNet& net, const Marking& m) {
  for (const auto& [s, c] : m)
    if (net.places[s].zero && c > 0) return false;
  return true;
}

namespace {

struct FiredSequence {
  std::vector<Marking> markings;  // m_0 .. m_k
  Step summed;
};

FiredSequence replay(const ZSNet& net, const Marking& m, const std::vector<Step>& seq) {
  FiredSequence out;
  out.markings.push_back(m);
  for (const Step& u : seq) {
    if (!enabled(net, out.markings.back(), u))
      throw InvalidSequenceError("step " + step_text(net, u) + " not enabled at " +
                                 marking_text(net, out.markings.back()));
    out.markings.push_back(fire(net, out.markings.back(), u));
    out.summed = out.summed.plus(u);
  }
  return out;
}

// Combined demand of the summed step on stable places only.
Marking stable_demand(const ZSNet& net, const Step& summed) {
  Marking demand;
  for (const auto& [t, times] : summed)
    for (const auto& [s, w] : net.transitions[t].pre)
      if (!net.places[s].zero) demand.add(s, checked_mul(times, w));
  return demand;
}

bool stable_residual_enables_nothing(const ZSNet& net, const Marking& m, const Step& summed,
                                     std::string* witness = nullptr) {
  Marking residual = m.minus(stable_demand(net, summed));
  for (TransitionIdx t = 0; t < net.transitions.size(); ++t) {
    bool reads_stable = false;
    bool fits = true;
    for (const auto& [s, w] : net.transitions[t].pre) {
      if (net.places[s].zero) continue;
      reads_stable = true;
      if (w > residual.count(s)) {
        fits = false;
        break;
      }
    }
    if (reads_stable && fits) {
      if (witness) *witness = net.transitions[t].name;
      return false;
    }
  }
  return true;
}

}  // namespace

bool check_stable_step(const ZSNet& net, const Marking& m, const std::vector<Step>& seq) {
  FiredSequence fired = replay(net, m, seq);
  if (!stable_demand(net, fired.summed).leq(m)) return false;
  return is_stable(net, m) && is_stable(net, fired.markings.back());
}

bool check_stable_transaction(const ZSNet& net, const Marking& m, const std::vector<Step>& seq) {
  FiredSequence fired = replay(net, m, seq);
  if (fired.summed.empty()) return false;
  if (!stable_demand(net, fired.summed).leq(m)) return false;
  if (!is_stable(net, m) || !is_stable(net, fired.markings.back())) return false;
  for (std::size_t k = 1; k + 1 < fired.markings.size(); ++k)
    if (is_stable(net, fired.markings[k])) return false;
  return stable_residual_enables_nothing(net, m, fired.summed);
}

MembraneShape membrane_shape(const ZSNet& net) {
  MembraneShape shape;
  shape.drain_of_zero_place.assign(net.places.size(), std::nullopt);
  for (TransitionIdx t = 0; t < net.transitions.size(); ++t) {
    const auto& tr = net.transitions[t];
    long long stable_pre = 0, zero_pre = 0, stable_post = 0, zero_post = 0;
    PlaceIdx zero_source = 0;
    for (const auto& [s, w] : tr.pre) {
      if (net.places[s].zero) {
        zero_pre += w;
        zero_source = s;
      } else {
        stable_pre += w;
      }
    }
    for (const auto& [s, w] : tr.post) {
      (net.places[s].zero ? zero_post : stable_post) += w;
    }
    if (zero_pre == 0 && stable_pre > 0 && stable_post == 0) {
      shape.producers.push_back(t);  // rule-like: stable demand, zero output
    } else if (zero_pre == 1 && tr.pre.size() == 1 && stable_pre == 0 && zero_post == 0) {
      if (shape.drain_of_zero_place[zero_source]) {
        shape.violation = "zero place " + net.places[zero_source].name + " has several drains";
        return shape;
      }
      shape.drain_of_zero_place[zero_source] = t;
    } else {
      shape.violation = "transition " + tr.name + " is neither a zero producer nor a unit drain";
      return shape;
    }
  }
  for (PlaceIdx s = 0; s < net.places.size(); ++s) {
    if (net.places[s].zero && !shape.drain_of_zero_place[s]) {
      shape.violation = "zero place " + net.places[s].name + " has no drain";
      return shape;
    }
  }
  shape.ok = true;
  return shape;
}

namespace {

void enumerate_maximal_steps(const ZSNet& net, const std::vector<TransitionIdx>& producers,
                             std::size_t k, Marking residual, Step& current,
                             std::vector<std::pair<Step, Marking>>& out) {
  if (k == producers.size()) {
    for (TransitionIdx t : producers) {
      bool fits = true;
      for (const auto& [s, w] : net.transitions[t].pre)
        if (w > residual.count(s)) {
          fits = false;
          break;
        }
      if (fits) return;  // another instance would still fit: not maximal
    }
    out.push_back({current, residual});
    return;
  }
  TransitionIdx t = producers[k];
  Marking rest = residual;
  long long count = 0;
  while (true) {
    if (count > 0) current.add(t, 1);
    enumerate_maximal_steps(net, producers, k + 1, rest, current, out);
    Marking demand;
    for (const auto& [s, w] : net.transitions[t].pre) demand.add(s, w);
    if (!demand.leq(rest)) break;
    rest = rest.minus(demand);
    ++count;
  }
  if (count > 0) current = current.minus({{t, count}});
}

}  // namespace

std::vector<Transaction> enumerate_stable_transactions(const ZSNet& net, const Marking& m) {
  if (!is_stable(net, m))
    throw Error("transactions are enumerated from stable markings only");
  MembraneShape shape = membrane_shape(net);
  if (!shape.ok) throw ShapeViolationError(shape.violation);

  std::vector<std::pair<Step, Marking>> rule_steps;
  Step current;
  enumerate_maximal_steps(net, shape.producers, 0, m, current, rule_steps);

  std::vector<Transaction> out;
  for (auto& [rules, residual] : rule_steps) {
    if (rules.empty()) continue;  // a transaction performs at least one rule
    Marking after_rules = fire(net, m, rules);
    Step heats;
    for (const auto& [s, c] : after_rules)
      if (net.places[s].zero) heats.add(*shape.drain_of_zero_place[s], c);
    Marking final_marking = heats.empty() ? after_rules : fire(net, after_rules, heats);
    Transaction tx;
    tx.rule_part = rules;
    tx.heat_part = heats;
    tx.summed = rules.plus(heats);
    tx.final_marking = final_marking;
    out.push_back(std::move(tx));
  }
  std::sort(out.begin(), out.end(),
            [](const Transaction& a, const Transaction& b) { return a.summed < b.summed; });
  return out;
}

std::optional<Marking> state_marking(const ZSNet& net, const Step& x, std::size_t budget) {
  std::map<PlaceIdx, long long> displaced;
  for (const auto& [s, c] : net.initial) displaced[s] = c;
  for (const auto& [t, times] : x) {
    net.check_transition(t);
    for (const auto& [s, w] : net.transitions[t].post)
      displaced[s] = checked_add(displaced[s], checked_mul(times, w));
    for (const auto& [s, w] : net.transitions[t].pre)
      displaced[s] = checked_add(displaced[s], -checked_mul(times, w));
  }
  Marking target;
  for (const auto& [s, c] : displaced) {
    if (c < 0) return std::nullopt;  // not realizable as a marking at all
    target.add(s, c);
  }

  // Reachability check. Step-firing reachability coincides with firing
  // transitions one at a time, so a plain breadth-first closure suffices.
  std::set<Marking> seen{net.initial};
  std::deque<Marking> frontier{net.initial};
  while (!frontier.empty()) {
    Marking m = frontier.front();
    frontier.pop_front();
    if (m == target) return target;
    for (TransitionIdx t = 0; t < net.transitions.size(); ++t) {
      Step single{{t, 1}};
      if (!enabled(net, m, single)) continue;
      Marking next = fire(net, m, single);
      if (seen.insert(next).second) {
        if (seen.size() > budget)
          throw BudgetExceededError("state search exceeded its budget of " +
                                    std::to_string(budget) + " markings");
        frontier.push_back(next);
      }
    }
  }
  return std::nullopt;
}

std::string marking_text(const ZSNet& net, const Marking& m) {
  std::ostringstream out;
  out << '{';
  bool first = true;
  for (const auto& [s, c] : m) {
    if (!first) out << ", ";
    first = false;
    out << net.places[s].name << ':' << c;
  }
  out << '}';
  return out.str();
}

std::string step_text(const ZSNet& net, const Step& u) {
  std::ostringstream out;
  out << '{';
  bool first = true;
  for (const auto& [t, c] : u) {
    if (!first) out << ", ";
    first = false;
    out << net.transitions[t].name;
    if (c != 1) out << ':' << c;
  }
  out << '}';
  return out.str();
}

std::string net_to_dot(const ZSNet& net) {
  std::ostringstream out;
  out << "digraph zsnet {\n  rankdir=LR;\n";
  for (PlaceIdx s = 0; s < net.places.size(); ++s) {
    const auto& p = net.places[s];
    out << "  p" << s << " [label=\"" << p.name;
    long long tokens = net.initial.count(s);
    if (tokens > 0) out << "\\n" << std::string(static_cast<std::size_t>(std::min<long long>(tokens, 5)), '*')
                        << (tokens > 5 ? std::to_string(tokens) : "");
    out << "\", shape=" << (p.zero ? "doublecircle, width=0.35, fontsize=9" : "circle") << "];\n";
  }
  for (TransitionIdx t = 0; t < net.transitions.size(); ++t) {
    out << "  t" << t << " [label=\"" << net.transitions[t].name << "\", shape=box];\n";
    for (const auto& [s, w] : net.transitions[t].pre) {
      out << "  p" << s << " -> t" << t;
      if (w != 1) out << " [label=\"" << w << "\"]";
      out << ";\n";
    }
    for (const auto& [s, w] : net.transitions[t].post) {
      out << "  t" << t << " -> p" << s;
      if (w != 1) out << " [label=\"" << w << "\"]";
      out << ";\n";
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace zsm
