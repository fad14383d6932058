#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "zsm/multiset.hpp"

namespace zsm {

using PlaceIdx = std::uint32_t;
using TransitionIdx = std::uint32_t;
using Marking = Multiset<PlaceIdx>;
using Step = Multiset<TransitionIdx>;

/// A Petri net with a distinguished set of zero places. Zero places must be
/// empty in the initial marking and in every observable (stable) marking;
/// while they carry tokens the net is mid-transaction. Flow weights of zero
/// are simply absent from the pre/post lists.
struct ZSNet {
  struct Place {
    std::string name;
    bool zero = false;
  };
  struct Transition {
    std::string name;
    std::vector<std::pair<PlaceIdx, long long>> pre;   // sorted by place
    std::vector<std::pair<PlaceIdx, long long>> post;  // sorted by place
  };

  std::vector<Place> places;
  std::vector<Transition> transitions;
  Marking initial;

  long long flow_in(PlaceIdx s, TransitionIdx t) const;   // F(s,t)
  long long flow_out(TransitionIdx t, PlaceIdx s) const;  // F(t,s)
  void add_arc_in(TransitionIdx t, PlaceIdx s, long long w);
  void add_arc_out(TransitionIdx t, PlaceIdx s, long long w);
  void check_transition(TransitionIdx t) const;
};

/// True when every place holds enough tokens for the combined demand of the
/// step (a finite multiset of transitions fired together).
bool enabled(const ZSNet& net, const Marking& m, const Step& u);

/// Token game for one step. Throws NotEnabledError when `u` is not enabled.
Marking fire(const ZSNet& net, const Marking& m, const Step& u);

/// A marking is stable when all zero places are empty.
bool is_stable(const ZSNet& net, const Marking& m);

/// Validates that `seq` is a firing sequence from m and checks the stable-step
/// conditions: the summed step draws no more from any stable place than m
/// offers, and both endpoints are stable. Throws InvalidSequenceError when the
/// sequence cannot be fired at all.
bool check_stable_step(const ZSNet& net, const Marking& m, const std::vector<Step>& seq);

/// A stable step whose intermediate markings are all unstable and whose
/// residual stable tokens (what m keeps after the summed consumption) enable
/// no transition that reads any stable place. The empty step never qualifies.
bool check_stable_transaction(const ZSNet& net, const Marking& m, const std::vector<Step>& seq);

struct Transaction {
  Step summed;
  Step rule_part;   // transitions producing into zero places
  Step heat_part;   // transitions draining zero places
  Marking final_marking;
};

/// Classification of a net into the shape produced by the membrane
/// translation: every transition either consumes stable tokens and produces
/// only zero tokens, or drains exactly one zero token and produces only stable
/// tokens, and each zero place has exactly one drain.
struct MembraneShape {
  bool ok = false;
  std::string violation;
  std::vector<TransitionIdx> producers;                          // zero-producing transitions
  std::vector<std::optional<TransitionIdx>> drain_of_zero_place; // indexed by place
};

MembraneShape membrane_shape(const ZSNet& net);

/// All stable transactions leaving the stable marking m, for membrane-shaped
/// nets: maximal multisets of zero-producing transitions whose stable demand
/// fits m, each completed by the drains that empty exactly the zero tokens it
/// produces. Deterministic order; throws ShapeViolationError on other nets.
std::vector<Transaction> enumerate_stable_transactions(const ZSNet& net, const Marking& m);

/// Marking displacement of a transition multiset from the initial marking,
/// returned only when it is non-negative everywhere and reachable (bounded
/// breadth-first search over single firings; throws BudgetExceededError when
/// the search budget runs out before an answer is known).
std::optional<Marking> state_marking(const ZSNet& net, const Step& x, std::size_t budget = 100000);

std::string marking_text(const ZSNet& net, const Marking& m);
std::string step_text(const ZSNet& net, const Step& u);
std::string net_to_dot(const ZSNet& net);

}  // namespace zsm
