#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zsm/compile.hpp"
#include "zsm/unfold.hpp"

namespace zsm {

/// Prime event structure: events with a causal partial order and an
/// irreflexive symmetric conflict relation closed under the order.
struct Pes {
  std::size_t size = 0;
  std::vector<std::vector<bool>> le;        // le[a][b]: a is below or equal to b
  std::vector<std::vector<bool>> conflict;  // symmetric, irreflexive

  bool concurrent(std::uint32_t a, std::uint32_t b) const {
    return a != b && !conflict[a][b] && !le[a][b] && !le[b][a];
  }
};

/// PES over all events of an occurrence net (flow order, inherited conflict).
Pes pes_of(const OccurrenceNet& on);

struct SimClass {
  std::vector<std::uint32_t> events;       // ESS event indices, sorted
  std::uint32_t layer = 0;                 // round of stable transactions
  std::vector<std::uint32_t> slice;        // the stable slice it was enabled at (condition ids)
  Step folded_step;                        // image in the folded net, rule part only
};

struct SimFamily {
  std::vector<SimClass> classes;  // deduplicated by event set, deterministic order
  bool truncated = false;
};

/// PES of the rule events of a membrane unfolding plus the simultaneity
/// family and labels (the transitions the events are occurrences of).
struct Ess {
  std::vector<std::uint32_t> unfolding_event;  // ESS index -> event id in the unfolding
  std::vector<TransitionIdx> label;            // ESS index -> folded transition
  Pes pes;
  SimFamily sim;
};

enum class SliceClass {
  NotASlice,
  Stable,
  Unstable,
  MaximalUnstable,
  MaximallySimultaneous,
};

/// Classifies a set of conditions: a slice is a pairwise-concurrent reachable
/// marking of the unfolding; unstable when it holds zero conditions; maximal
/// when firing the producers and drains of its zero conditions is a stable
/// transaction from the stable slice beneath it; maximally simultaneous when
/// that stable slice is moreover reachable through stable transactions alone.
SliceClass classify_slice(const OccurrenceNet& on, const ZSNet& folded,
                          std::span<const std::uint32_t> conditions);

/// Simultaneity classes of a layer-built membrane unfolding, computed by
/// replaying every stable transaction of the unfolding itself (every choice of
/// individual tokens included) from every transaction-reachable stable slice.
/// Only fully built rounds are replayed; `truncated` marks a cut.
SimFamily sim_classes(const OccurrenceNet& on, const ZSNet& folded);

Ess ess_of(const OccurrenceNet& on, const ZSNet& folded);

struct EssValidation {
  bool nonempty_classes = true;        // no empty class
  bool classes_cover_events = true;    // every event lies in some class
  bool classes_concurrent = true;      // classes are pairwise-concurrent sets
  bool no_containment = true;          // overlapping classes: neither inside the other
  bool overlap_conflict = true;        // overlapping classes: outsiders are in conflict
  bool conflict_hereditary = true;
  std::vector<std::string> violations;

  bool ok() const {
    return nonempty_classes && classes_cover_events && classes_concurrent && no_containment &&
           overlap_conflict && conflict_hereditary;
  }
};

EssValidation validate_ess(const Ess& ess);

/// All event sets that are conflict-free, downward closed, and a disjoint
/// union of simultaneity classes. Throws BudgetExceededError beyond
/// `max_results` results.
std::vector<std::vector<std::uint32_t>> ess_configurations(const Ess& ess,
                                                           std::size_t max_results = 100000);

/// Configurations of a plain PES (conflict-free, downward closed).
std::vector<std::vector<std::uint32_t>> pes_configurations(const Pes& pes,
                                                           std::size_t max_results = 100000);

Pes ess_to_pes(const Ess& ess);

/// Embeds a PES as an ESS whose classes are the singletons.
Ess pes_to_ess(const Pes& pes);

/// Splits a configuration into its simultaneity classes ordered by causal
/// depth and maps each class to a vector multi-rule. Among several valid
/// partitions the first (in canonical order) whose rule sequence replays as
/// evolution steps is preferred. Throws when X is not a configuration.
std::vector<VectorMultiRule> configuration_to_rules(const Ess& ess, const CompiledNet& cn,
                                                    std::span<const std::uint32_t> events);

std::string ess_to_dot(const Ess& ess, const CompiledNet& cn);

}  // namespace zsm
