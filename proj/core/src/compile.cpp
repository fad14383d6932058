#include "zsm/compile.hpp"

#include <map>
#include <set>
#include <sstream>

namespace zsm {

PlaceIdx CompiledNet::place(SymbolId object, std::uint32_t membrane, bool zero) const {
  std::uint32_t n = system.membrane_count();
  return (object * n + (membrane - 1)) * 2 + (zero ? 1 : 0);
}

TransitionIdx CompiledNet::rule_transition(std::uint32_t membrane, std::uint32_t rule_idx) const {
  std::uint32_t offset = 0;
  for (std::uint32_t i = 1; i < membrane; ++i)
    offset += static_cast<std::uint32_t>(system.rules[i - 1].size());
  return offset + rule_idx;
}

TransitionIdx CompiledNet::heat_transition(SymbolId object, std::uint32_t membrane) const {
  std::uint32_t rule_count = 0;
  for (const auto& list : system.rules) rule_count += static_cast<std::uint32_t>(list.size());
  return rule_count + object * system.membrane_count() + (membrane - 1);
}

Step CompiledNet::heating_step(const PartialConfiguration& gamma) const {
  Step heats;
  for (std::uint32_t i = 1; i <= system.membrane_count(); ++i)
    for (const auto& [object, c] : gamma.produced[i - 1]) heats.add(heat_transition(object, i), c);
  return heats;
}

Step CompiledNet::rule_step(const VectorMultiRule& vmr) const {
  Step u;
  for (std::uint32_t i = 1; i <= system.membrane_count(); ++i)
    if (i <= vmr.per_membrane.size())
      for (const auto& [rule_idx, times] : vmr.per_membrane[i - 1])
        u.add(rule_transition(i, rule_idx), times);
  return u;
}

VectorMultiRule CompiledNet::vector_multi_rule_of(const Step& rule_part) const {
  VectorMultiRule vmr;
  vmr.per_membrane.resize(system.membrane_count());
  for (const auto& [t, times] : rule_part) {
    const TransitionRef& ref = transition_refs.at(t);
    if (ref.kind != TransitionRef::Kind::Rule)
      throw Error("step contains the heating transition " + net.transitions[t].name);
    vmr.per_membrane[ref.membrane - 1].add(ref.rule_idx, times);
  }
  return vmr;
}

CompiledNet compile(const MembraneSystem& sys) {
  CompiledNet cn;
  cn.system = sys;
  std::uint32_t n = sys.membrane_count();

  for (SymbolId object = 0; object < sys.alphabet.size(); ++object) {
    for (std::uint32_t i = 1; i <= n; ++i) {
      cn.net.places.push_back({"(" + sys.symbol_name(object) + "," + std::to_string(i) + ",nz)", false});
      cn.place_refs.push_back({object, i, false});
      cn.net.places.push_back({"(" + sys.symbol_name(object) + "," + std::to_string(i) + ",z)", true});
      cn.place_refs.push_back({object, i, true});
    }
  }

  for (std::uint32_t i = 1; i <= n; ++i) {
    for (std::uint32_t k = 0; k < sys.rules[i - 1].size(); ++k) {
      const Rule& r = sys.rules[i - 1][k];
      ZSNet::Transition t;
      t.name = "t_" + std::to_string(i) + "^" + r.name;
      cn.net.transitions.push_back(std::move(t));
      cn.transition_refs.push_back({TransitionRef::Kind::Rule, i, k, 0});
      TransitionIdx idx = static_cast<TransitionIdx>(cn.net.transitions.size() - 1);
      for (const auto& [object, c] : r.lhs) cn.net.add_arc_in(idx, cn.place(object, i, false), c);
      for (const auto& [object, c] : r.rhs_here) cn.net.add_arc_out(idx, cn.place(object, i, true), c);
      if (!r.rhs_out.empty() && i != 1) {
        std::uint32_t father = sys.parent_of[i - 1];
        for (const auto& [object, c] : r.rhs_out)
          cn.net.add_arc_out(idx, cn.place(object, father, true), c);
      }
      for (const auto& [child, m] : r.rhs_in)
        for (const auto& [object, c] : m) cn.net.add_arc_out(idx, cn.place(object, child, true), c);
    }
  }
  for (SymbolId object = 0; object < sys.alphabet.size(); ++object) {
    for (std::uint32_t i = 1; i <= n; ++i) {
      ZSNet::Transition t;
      t.name = "t^h_(" + sys.symbol_name(object) + "," + std::to_string(i) + ")";
      cn.net.transitions.push_back(std::move(t));
      cn.transition_refs.push_back({TransitionRef::Kind::Heat, i, 0, object});
      TransitionIdx idx = static_cast<TransitionIdx>(cn.net.transitions.size() - 1);
      cn.net.add_arc_in(idx, cn.place(object, i, true), 1);
      cn.net.add_arc_out(idx, cn.place(object, i, false), 1);
    }
  }

  for (std::uint32_t i = 1; i <= n; ++i)
    for (const auto& [object, c] : sys.init[i - 1]) cn.net.initial.add(cn.place(object, i, false), c);
  return cn;
}

Marking nu(const CompiledNet& cn, const PartialConfiguration& gamma) {
  Marking m;
  for (std::uint32_t i = 1; i <= cn.system.membrane_count(); ++i) {
    for (const auto& [object, c] : gamma.usable[i - 1]) m.add(cn.place(object, i, false), c);
    for (const auto& [object, c] : gamma.produced[i - 1]) m.add(cn.place(object, i, true), c);
  }
  return m;
}

Marking nu(const CompiledNet& cn, const Configuration& c) { return nu(cn, partial_of(c)); }

namespace {

struct Checker {
  const CompiledNet& cn;
  std::size_t budget;
  CheckReport report;
  CheckReport::Item micro{
      "effects", "micro steps match single rule-transition firings"};
  CheckReport::Item heating{
      "heating", "draining buffered objects realizes the heating map"};
  CheckReport::Item forward{
      "step-to-transaction", "every evolution step is a stable transaction between its markings"};
  CheckReport::Item converse{
      "transaction-to-step", "stable transactions at reachable markings are exactly the evolution steps"};
  CheckReport::Item partition{
      "zero-partition", "zero producers and zero drains partition the transitions"};

  std::set<PartialConfiguration> visited;

  void fail(CheckReport::Item& item, const std::string& witness) {
    if (item.pass) {
      item.pass = false;
      item.witness = witness;
    }
  }

  void explore_micro(const PartialConfiguration& gamma) {
    if (!visited.insert(gamma).second) return;
    if (visited.size() > budget)
      throw BudgetExceededError("correspondence check exceeded its partial-configuration budget");
    Marking here = nu(cn, gamma);

    // Heating is checked at every partial configuration along the way.
    Step heats = cn.heating_step(gamma);
    ++heating.instances;
    bool heat_ok = enabled(cn.net, here, heats) &&
                   fire(cn.net, here, heats) == nu(cn, heated(gamma));
    if (!heat_ok)
      fail(heating, "heating mismatch at " + partial_configuration_text(cn.system, gamma));

    for (std::uint32_t i = 1; i <= cn.system.membrane_count(); ++i) {
      for (std::uint32_t k = 0; k < cn.system.rules[i - 1].size(); ++k) {
        auto next = micro_step_at(cn.system, gamma, i, k);
        if (!next) continue;
        ++micro.instances;
        Step single{{cn.rule_transition(i, k), 1}};
        bool ok = enabled(cn.net, here, single) && fire(cn.net, here, single) == nu(cn, *next);
        if (!ok)
          fail(micro, "rule " + cn.system.rules[i - 1][k].name + " in membrane " +
                          std::to_string(i) + " at " +
                          partial_configuration_text(cn.system, gamma));
        explore_micro(*next);
      }
    }
  }

  // Canonical full replay of one vector multi-rule from a configuration.
  PartialConfiguration replay_to_quiescence(const Configuration& c, const VectorMultiRule& vmr) {
    PartialConfiguration gamma = partial_of(c);
    for (std::uint32_t i = 1; i <= cn.system.membrane_count(); ++i) {
      for (const auto& [rule_idx, times] : vmr.per_membrane[i - 1]) {
        for (long long k = 0; k < times; ++k) {
          auto next = micro_step_at(cn.system, gamma, i, rule_idx);
          if (!next) throw Error("evolution step failed to replay");
          gamma = *next;
        }
      }
    }
    return gamma;
  }

  void run(int depth, std::size_t state_cap) {
    ReachabilityGraph graph = reachability_graph(cn.system, depth, state_cap);
    report.configurations = graph.nodes.size();

    for (const auto& node : graph.nodes) {
      explore_micro(partial_of(node.config));

      Marking from = nu(cn, node.config);
      auto steps = macro_steps(cn.system, node.config);

      std::set<std::pair<Step, Marking>> from_system;
      for (const auto& [vmr, succ] : steps) {
        PartialConfiguration quiescent = replay_to_quiescence(node.config, vmr);
        Step rules = cn.rule_step(vmr);
        Step heats = cn.heating_step(quiescent);
        std::vector<Step> seq{rules};
        if (!heats.empty()) seq.push_back(heats);
        ++forward.instances;
        bool ok = false;
        std::string detail;
        try {
          ok = check_stable_transaction(cn.net, from, seq);
        } catch (const InvalidSequenceError& e) {
          detail = e.what();
        }
        Marking landed;
        if (ok) {
          landed = from;
          for (const Step& u : seq) landed = fire(cn.net, landed, u);
          ok = landed == nu(cn, succ);
          if (!ok) detail = "transaction lands on " + marking_text(cn.net, landed);
        }
        if (!ok)
          fail(forward, "step " + vector_multi_rule_text(cn.system, vmr) + " from " +
                            configuration_text(cn.system, node.config) +
                            (detail.empty() ? "" : ": " + detail));
        from_system.insert({rules.plus(heats), nu(cn, succ)});
      }

      ++converse.instances;
      std::set<std::pair<Step, Marking>> from_net;
      try {
        for (const Transaction& tx : enumerate_stable_transactions(cn.net, from))
          from_net.insert({tx.summed, tx.final_marking});
      } catch (const ShapeViolationError& e) {
        fail(converse, e.what());
        continue;
      }
      if (from_net != from_system) {
        std::ostringstream witness;
        witness << "at " << configuration_text(cn.system, node.config) << ": ";
        for (const auto& entry : from_net)
          if (!from_system.count(entry))
            witness << "net-only transaction " << step_text(cn.net, entry.first) << "; ";
        for (const auto& entry : from_system)
          if (!from_net.count(entry))
            witness << "system-only step " << step_text(cn.net, entry.first) << "; ";
        fail(converse, witness.str());
      }
    }
    report.partial_configurations = visited.size();

    ++partition.instances;
    for (TransitionIdx t = 0; t < cn.net.transitions.size(); ++t) {
      bool consumes_zero = false, produces_zero = false;
      for (const auto& [s, w] : cn.net.transitions[t].pre)
        if (cn.net.places[s].zero) consumes_zero = true;
      for (const auto& [s, w] : cn.net.transitions[t].post)
        if (cn.net.places[s].zero) produces_zero = true;
      if (consumes_zero == produces_zero)
        fail(partition, "transition " + cn.net.transitions[t].name +
                            (consumes_zero ? " both consumes and produces zero tokens"
                                           : " touches no zero place"));
    }

    report.items = {micro, heating, forward, converse, partition};
  }
};

}  // namespace

CheckReport check_correspondence(const CompiledNet& cn, int depth, std::size_t state_cap) {
  Checker checker{cn, state_cap};
  checker.run(depth, state_cap);
  return checker.report;
}

std::string report_text(const CheckReport& report) {
  std::ostringstream out;
  int passed = 0;
  for (const auto& item : report.items) passed += item.pass ? 1 : 0;
  out << passed << "/" << report.items.size() << " propositions verified ("
      << report.configurations << " configurations, " << report.partial_configurations
      << " partial configurations)\n";
  for (const auto& item : report.items) {
    out << "  [" << (item.pass ? "pass" : "FAIL") << "] " << item.id << ": " << item.title << " ("
        << item.instances << " checks)";
    if (!item.pass) out << "\n         witness: " << item.witness;
    out << "\n";
  }
  return out.str();
}

}  // namespace zsm
