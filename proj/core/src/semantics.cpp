#include "zsm/semantics.hpp"

#include <deque>
#include <map>
#include <sstream>

namespace zsm {

PartialConfiguration initial(const MembraneSystem& sys) {
  PartialConfiguration g;
  g.usable = sys.init;
  g.produced.assign(sys.membrane_count(), SymbolMultiset{});
  return g;
}

PartialConfiguration partial_of(const Configuration& c) {
  PartialConfiguration g;
  g.usable = c;
  g.produced.assign(c.size(), SymbolMultiset{});
  return g;
}

std::optional<PartialConfiguration> micro_step_at(const MembraneSystem& sys,
                                                  const PartialConfiguration& gamma,
                                                  std::uint32_t i, std::uint32_t rule_idx,
                                                  SymbolMultiset* skin_out_tally) {
  sys.check_membrane_index(i);
  const auto& list = sys.rules[i - 1];
  if (rule_idx >= list.size())
    throw Error("rule index " + std::to_string(rule_idx) + " out of range in membrane " +
                std::to_string(i));
  const Rule& r = list[rule_idx];
  if (!r.lhs.leq(gamma.usable[i - 1])) return std::nullopt;

  PartialConfiguration next = gamma;
  next.usable[i - 1] = next.usable[i - 1].minus(r.lhs);
  next.produced[i - 1] = next.produced[i - 1].plus(r.rhs_here);
  if (!r.rhs_out.empty()) {
    if (i != 1) {
      std::uint32_t father = sys.parent_of[i - 1];
      next.produced[father - 1] = next.produced[father - 1].plus(r.rhs_out);
    } else if (skin_out_tally) {
      *skin_out_tally = skin_out_tally->plus(r.rhs_out);
    }
  }
  for (const auto& [child, m] : r.rhs_in) next.produced[child - 1] = next.produced[child - 1].plus(m);
  return next;
}

std::optional<PartialConfiguration> micro_step(const MembraneSystem& sys,
                                               const PartialConfiguration& gamma, std::uint32_t i,
                                               const std::string& rule_name,
                                               SymbolMultiset* skin_out_tally) {
  sys.check_membrane_index(i);
  auto idx = sys.rule_index(i, rule_name);
  if (!idx) throw Error("unknown rule '" + rule_name + "' in membrane " + std::to_string(i));
  return micro_step_at(sys, gamma, i, *idx, skin_out_tally);
}

bool is_quiescent(const MembraneSystem& sys, const PartialConfiguration& gamma) {
  for (std::uint32_t i = 1; i <= sys.membrane_count(); ++i)
    for (const Rule& r : sys.rules[i - 1])
      if (r.lhs.leq(gamma.usable[i - 1])) return false;
  return true;
}

Configuration heated(const PartialConfiguration& gamma) {
  Configuration c;
  c.reserve(gamma.usable.size());
  for (std::size_t k = 0; k < gamma.usable.size(); ++k)
    c.push_back(gamma.usable[k].plus(gamma.produced[k]));
  return c;
}

namespace {

// All maximal rule multisets of one membrane: every multiset whose combined
// left-hand sides fit w and whose residual enables no rule of the membrane.
void enumerate_maximal(const std::vector<Rule>& rules, std::size_t k, const SymbolMultiset& residual,
                       Multiset<std::uint32_t>& current,
                       std::vector<std::pair<Multiset<std::uint32_t>, SymbolMultiset>>& out) {
  if (k == rules.size()) {
    for (const Rule& r : rules)
      if (r.lhs.leq(residual)) return;
    out.push_back({current, residual});
    return;
  }
  SymbolMultiset rest = residual;
  long long count = 0;
  while (true) {
    if (count > 0) current.add(static_cast<std::uint32_t>(k), 1);
    enumerate_maximal(rules, k + 1, rest, current, out);
    if (!rules[k].lhs.leq(rest)) break;
    rest = rest.minus(rules[k].lhs);
    ++count;
  }
  if (count > 0) current = current.minus({{static_cast<std::uint32_t>(k), count}});
}

}  // namespace

std::vector<std::pair<VectorMultiRule, Configuration>> macro_steps(const MembraneSystem& sys,
                                                                   const Configuration& c,
                                                                   SymbolMultiset* skin_out_tally) {
  std::uint32_t n = sys.membrane_count();
  if (c.size() != n) throw Error("configuration has wrong number of membranes");

  // Membranes choose independently: rule applicability only reads the
  // consumable part of the owning membrane, never the produced parts.
  std::vector<std::vector<std::pair<Multiset<std::uint32_t>, SymbolMultiset>>> choices(n);
  bool any_rule_applies = false;
  for (std::uint32_t i = 1; i <= n; ++i) {
    Multiset<std::uint32_t> current;
    enumerate_maximal(sys.rules[i - 1], 0, c[i - 1], current, choices[i - 1]);
    for (const auto& [multi, residual] : choices[i - 1])
      if (!multi.empty()) any_rule_applies = true;
  }
  std::vector<std::pair<VectorMultiRule, Configuration>> result;
  if (!any_rule_applies) return result;  // halting configuration

  std::vector<std::size_t> pick(n, 0);
  while (true) {
    VectorMultiRule vmr;
    vmr.per_membrane.resize(n);
    Configuration next(n);
    for (std::uint32_t i = 1; i <= n; ++i) {
      vmr.per_membrane[i - 1] = choices[i - 1][pick[i - 1]].first;
      next[i - 1] = choices[i - 1][pick[i - 1]].second;
    }
    for (std::uint32_t i = 1; i <= n; ++i) {
      for (const auto& [rule_idx, times] : vmr.per_membrane[i - 1]) {
        const Rule& r = sys.rules[i - 1][rule_idx];
        next[i - 1] = next[i - 1].plus(r.rhs_here.scaled(times));
        if (!r.rhs_out.empty()) {
          if (i != 1) {
            std::uint32_t father = sys.parent_of[i - 1];
            next[father - 1] = next[father - 1].plus(r.rhs_out.scaled(times));
          } else if (skin_out_tally) {
            *skin_out_tally = skin_out_tally->plus(r.rhs_out.scaled(times));
          }
        }
        for (const auto& [child, m] : r.rhs_in) next[child - 1] = next[child - 1].plus(m.scaled(times));
      }
    }
    result.push_back({std::move(vmr), std::move(next)});

    std::size_t pos = 0;
    while (pos < n && ++pick[pos] == choices[pos].size()) pick[pos++] = 0;
    if (pos == n) break;
  }
  return result;
}

ReachabilityGraph reachability_graph(const MembraneSystem& sys, int depth, std::size_t state_cap) {
  ReachabilityGraph g;
  g.depth_bound = depth;
  std::map<Configuration, std::size_t> seen;

  Configuration start = heated(initial(sys));
  seen[start] = 0;
  g.nodes.push_back({start, 0, false});
  std::deque<std::size_t> frontier{0};

  for (int layer = 0; layer < depth && !frontier.empty(); ++layer) {
    std::deque<std::size_t> next_frontier;
    for (std::size_t id : frontier) {
      Configuration c = g.nodes[id].config;
      auto steps = macro_steps(sys, c, &g.skin_out_discarded);
      if (steps.empty()) {
        g.nodes[id].halting = true;
        continue;
      }
      for (auto& [vmr, succ] : steps) {
        auto [it, inserted] = seen.try_emplace(succ, g.nodes.size());
        if (inserted) {
          if (g.nodes.size() >= state_cap)
            throw BudgetExceededError("reachability graph exceeded the state cap of " +
                                      std::to_string(state_cap));
          g.nodes.push_back({succ, layer + 1, false});
          next_frontier.push_back(it->second);
        }
        g.edges.push_back({id, it->second, vmr});
      }
    }
    frontier = std::move(next_frontier);
  }
  // Nodes on the last layer still get their halting flag.
  for (std::size_t id : frontier)
    if (macro_steps(sys, g.nodes[id].config).empty()) g.nodes[id].halting = true;
  return g;
}

std::string configuration_text(const MembraneSystem& sys, const Configuration& c) {
  std::ostringstream out;
  out << '[';
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (k) out << ", ";
    out << multiset_text(sys, c[k]);
  }
  out << ']';
  return out.str();
}

std::string partial_configuration_text(const MembraneSystem& sys, const PartialConfiguration& g) {
  std::ostringstream out;
  out << '[';
  for (std::size_t k = 0; k < g.usable.size(); ++k) {
    if (k) out << ", ";
    out << '(' << multiset_text(sys, g.usable[k]) << ", " << multiset_text(sys, g.produced[k])
        << ')';
  }
  out << ']';
  return out.str();
}

std::string vector_multi_rule_text(const MembraneSystem& sys, const VectorMultiRule& vmr) {
  std::ostringstream out;
  out << '{';
  bool first = true;
  for (std::size_t k = 0; k < vmr.per_membrane.size(); ++k) {
    if (vmr.per_membrane[k].empty()) continue;
    if (!first) out << ", ";
    first = false;
    out << (k + 1) << ": {";
    bool inner_first = true;
    for (const auto& [rule_idx, times] : vmr.per_membrane[k]) {
      if (!inner_first) out << ", ";
      inner_first = false;
      out << sys.rules[k][rule_idx].name << ':' << times;
    }
    out << '}';
  }
  out << '}';
  return out.str();
}

std::string reachability_to_dot(const MembraneSystem& sys, const ReachabilityGraph& g) {
  std::ostringstream out;
  out << "digraph reachability {\n  rankdir=LR;\n  node [shape=box, fontname=\"monospace\"];\n";
  for (std::size_t k = 0; k < g.nodes.size(); ++k) {
    out << "  n" << k << " [label=\"" << configuration_text(sys, g.nodes[k].config) << "\"";
    if (g.nodes[k].halting) out << ", peripheries=2";
    out << "];\n";
  }
  for (const auto& e : g.edges) {
    out << "  n" << e.from << " -> n" << e.to << " [label=\""
        << vector_multi_rule_text(sys, e.rules) << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace zsm
