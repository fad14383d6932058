#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "zsm/zsnet.hpp"

namespace zsm {

/// Occurrence-net prefix of the behavior of a zero-safe net, with individual
/// tokens: a condition is one token occurrence (initial, or one copy produced
/// by one event), an event is one firing of a transition on a concrete set of
/// token occurrences. All arcs have weight one and every condition has at
/// most one producer.
struct OccurrenceNet {
  struct Condition {
    std::int32_t producer = -1;  // event id, -1 for initial conditions
    PlaceIdx place = 0;
    std::uint32_t copy = 0;      // copy index within the producing arc / initial marking
    bool zero = false;
    std::uint32_t layer = 0;
    std::uint32_t stamp = 0;     // global creation order across conditions and events
  };
  struct Event {
    std::vector<std::uint32_t> preset;   // condition ids, sorted
    TransitionIdx transition = 0;
    std::vector<std::uint32_t> postset;  // condition ids, sorted
    std::uint32_t layer = 0;
    std::uint32_t stamp = 0;
  };

  std::vector<Condition> conditions;
  std::vector<Event> events;
  std::vector<std::uint32_t> initial_conditions;
  std::uint32_t layers_requested = 0;
  std::uint32_t layers_complete = 0;  // rounds fully explored before any truncation
  bool truncated = false;

  // lazily built relation cache; the net is immutable once constructed
  mutable std::shared_ptr<const class OccurrenceNetAnalysis> analysis_cache;
};

/// Maps the unfolding back onto the net it was built from: conditions to
/// places and events to transitions, preserving the initial marking and all
/// pre/postsets.
struct FoldingMorphism {
  const ZSNet* net = nullptr;

  PlaceIdx beta(const OccurrenceNet& on, std::uint32_t condition) const {
    return on.conditions.at(condition).place;
  }
  TransitionIdx eta(const OccurrenceNet& on, std::uint32_t event) const {
    return on.events.at(event).transition;
  }
};

struct UnfoldResult {
  OccurrenceNet on;
  FoldingMorphism fold;
};

struct UnfoldOptions {
  std::uint32_t layers = 1;          // rounds of stable transactions (membrane-shaped nets)
  std::size_t event_budget = 20000;  // hard cap on events
};

/// Layer-bounded unfolding of a membrane-shaped net: starting from the
/// initial token set, replays every stable transaction with every choice of
/// individual tokens, round by round, up to `layers` rounds. Events realized
/// by several branches coincide (identity is the pair preset/transition).
/// When the event budget cuts a round, the result carries a truncation marker
/// and `layers_complete` reports the last fully explored round.
UnfoldResult unfold(const ZSNet& net, const UnfoldOptions& options);

/// Generic bounded unfolding for arbitrary zero-safe nets: saturates events
/// in causal-depth order, admitting every pairwise-concurrent preset whose
/// image is the preset of a transition, until no event is missing or the
/// budget is hit.
UnfoldResult unfold_saturate(const ZSNet& net, std::size_t event_budget = 20000);

/// A node of the occurrence net: either a condition or an event.
struct NodeId {
  bool is_event = false;
  std::uint32_t idx = 0;

  static NodeId condition(std::uint32_t c) { return {false, c}; }
  static NodeId event(std::uint32_t e) { return {true, e}; }
};

bool causally_before(const OccurrenceNet& on, NodeId x, NodeId y);  // strict, via the flow
bool in_conflict(const OccurrenceNet& on, NodeId x, NodeId y);
bool concurrent(const OccurrenceNet& on, NodeId x, NodeId y);

/// Pairwise concurrency of a set of conditions (their combined causal past is
/// finite by construction here).
bool co_set(const OccurrenceNet& on, std::span<const std::uint32_t> conditions);

/// Image of a set of conditions as a marking of the folded net.
Marking fold_marking(const OccurrenceNet& on, std::span<const std::uint32_t> conditions);

Step fold_step(const OccurrenceNet& on, const std::vector<std::uint32_t>& events);

/// The marking reached by firing exactly the causal past of A, when that
/// yields A itself; empty when A is not a reachable marking of the unfolding.
bool is_reachable_marking(const OccurrenceNet& on, std::span<const std::uint32_t> conditions);

/// Views the occurrence net itself as a zero-safe net (places are conditions,
/// transitions are events, all weights one), so the token game and the
/// transaction machinery apply to it directly.
ZSNet occurrence_as_zsnet(const OccurrenceNet& on, const ZSNet& folded);

struct CoverageReport {
  bool ok = true;
  std::size_t net_markings = 0;
  std::size_t unfolding_markings = 0;
  std::string witness;  // first net marking with no counterpart
};

/// Checks that every marking of `net` reachable within `max_firings` single
/// firings is the folded image of some reachable marking of the unfolding.
CoverageReport states_cover_markings(const ZSNet& net, const OccurrenceNet& on,
                                     std::size_t max_firings, std::size_t budget = 100000);

std::string unfolding_to_dot(const OccurrenceNet& on, const ZSNet& net);

}  // namespace zsm
