#pragma once

#include <optional>
#include <string>
#include <vector>

#include "zsm/psystem.hpp"

namespace zsm {

/// One multiset of objects per membrane (index i stored at slot i-1).
using Configuration = std::vector<SymbolMultiset>;

/// Per-membrane split into a consumable part and the objects produced while
/// the current evolution step is still running.
struct PartialConfiguration {
  std::vector<SymbolMultiset> usable;    // w_i
  std::vector<SymbolMultiset> produced;  // the part built up during the step

  bool operator==(const PartialConfiguration& o) const {
    return usable == o.usable && produced == o.produced;
  }
  bool operator<(const PartialConfiguration& o) const {
    if (usable != o.usable) return usable < o.usable;
    return produced < o.produced;
  }
};

/// One multiset of rule instances per membrane; keys are rule indices within
/// that membrane's declaration list.
struct VectorMultiRule {
  std::vector<Multiset<std::uint32_t>> per_membrane;

  bool empty() const {
    for (const auto& m : per_membrane)
      if (!m.empty()) return false;
    return true;
  }
  bool operator==(const VectorMultiRule& o) const { return per_membrane == o.per_membrane; }
  bool operator<(const VectorMultiRule& o) const { return per_membrane < o.per_membrane; }
};

PartialConfiguration initial(const MembraneSystem& sys);

PartialConfiguration partial_of(const Configuration& c);

/// Applies one instance of the named rule in membrane i (1-based). Returns
/// nothing when the left-hand side does not fit the consumable part. Unknown
/// rules or membranes throw. Objects a skin rule sends out vanish and are
/// added to *skin_out_tally when provided.
std::optional<PartialConfiguration> micro_step(const MembraneSystem& sys,
                                               const PartialConfiguration& gamma, std::uint32_t i,
                                               const std::string& rule_name,
                                               SymbolMultiset* skin_out_tally = nullptr);

std::optional<PartialConfiguration> micro_step_at(const MembraneSystem& sys,
                                                  const PartialConfiguration& gamma,
                                                  std::uint32_t i, std::uint32_t rule_idx,
                                                  SymbolMultiset* skin_out_tally = nullptr);

/// True when no rule instance is applicable anywhere.
bool is_quiescent(const MembraneSystem& sys, const PartialConfiguration& gamma);

/// Merges the produced parts back into the consumable ones.
Configuration heated(const PartialConfiguration& gamma);

/// All maximally parallel evolution steps from C: pairs of the applied rule
/// multiset and the successor configuration. Empty exactly when C is halting.
/// Enumerated deterministically (membrane order, rule declaration order,
/// ascending instance counts).
std::vector<std::pair<VectorMultiRule, Configuration>> macro_steps(
    const MembraneSystem& sys, const Configuration& c, SymbolMultiset* skin_out_tally = nullptr);

struct ReachabilityGraph {
  struct Node {
    Configuration config;
    int depth = 0;
    bool halting = false;
  };
  struct Edge {
    std::size_t from = 0;
    std::size_t to = 0;
    VectorMultiRule rules;
  };
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  int depth_bound = 0;
  SymbolMultiset skin_out_discarded;
};

/// Breadth-first closure of macro steps from the initial configuration, up to
/// `depth` evolution layers, deduplicating configurations. Throws
/// BudgetExceededError when more than `state_cap` configurations appear.
ReachabilityGraph reachability_graph(const MembraneSystem& sys, int depth,
                                     std::size_t state_cap = 100000);

std::string configuration_text(const MembraneSystem& sys, const Configuration& c);
std::string partial_configuration_text(const MembraneSystem& sys, const PartialConfiguration& g);
std::string vector_multi_rule_text(const MembraneSystem& sys, const VectorMultiRule& vmr);

std::string reachability_to_dot(const MembraneSystem& sys, const ReachabilityGraph& g);

}  // namespace zsm
