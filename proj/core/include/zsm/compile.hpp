#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zsm/semantics.hpp"
#include "zsm/zsnet.hpp"

namespace zsm {

/// Identity of a compiled place: one (object, membrane) pair in either the
/// observable slot or the zero slot that buffers freshly produced objects.
struct PlaceRef {
  SymbolId object = 0;
  std::uint32_t membrane = 1;
  bool zero = false;
};

/// Identity of a compiled transition: either one rule of one membrane, or the
/// heating transition that moves one buffered object into the observable slot.
struct TransitionRef {
  enum class Kind { Rule, Heat };
  Kind kind = Kind::Rule;
  std::uint32_t membrane = 1;
  std::uint32_t rule_idx = 0;  // Kind::Rule
  SymbolId object = 0;         // Kind::Heat
};

/// The zero-safe net of a membrane system together with the index maps tying
/// net places and transitions back to objects, membranes and rules.
struct CompiledNet {
  MembraneSystem system;
  ZSNet net;
  std::vector<PlaceRef> place_refs;
  std::vector<TransitionRef> transition_refs;

  PlaceIdx place(SymbolId object, std::uint32_t membrane, bool zero) const;
  TransitionIdx rule_transition(std::uint32_t membrane, std::uint32_t rule_idx) const;
  TransitionIdx heat_transition(SymbolId object, std::uint32_t membrane) const;

  /// Heating step that drains every buffered object of the partial
  /// configuration, one heating per token.
  Step heating_step(const PartialConfiguration& gamma) const;

  /// Step firing one transition per rule instance of the vector multi-rule.
  Step rule_step(const VectorMultiRule& vmr) const;

  /// Inverse of rule_step on steps that touch rule transitions only.
  VectorMultiRule vector_multi_rule_of(const Step& rule_part) const;
};

/// Builds the zero-safe net of a validated membrane system: one observable
/// and one zero place per (object, membrane); per rule a transition consuming
/// from the observable places of its membrane and producing into the zero
/// places selected by the target of each product; per (object, membrane) a
/// heating transition moving one token from the zero to the observable place.
CompiledNet compile(const MembraneSystem& sys);

/// Marking of a partial configuration: observable places carry the consumable
/// part, zero places the produced-during-step part.
Marking nu(const CompiledNet& cn, const PartialConfiguration& gamma);

/// Marking of a plain configuration (all zero places empty).
Marking nu(const CompiledNet& cn, const Configuration& c);

struct CheckReport {
  struct Item {
    std::string id;
    std::string title;
    bool pass = true;
    long long instances = 0;  // individual assertions checked
    std::string witness;      // first counterexample, empty when pass
  };
  std::vector<Item> items;
  std::size_t configurations = 0;
  std::size_t partial_configurations = 0;
  bool all_pass() const {
    for (const auto& i : items)
      if (!i.pass) return false;
    return true;
  }
};

/// Verifies, over the bounded reachability graph of the system, that the
/// interpreter and the compiled net simulate each other:
///   1. each micro step matches the firing of its rule transition,
///   2. draining the buffered objects realizes heating,
///   3. every evolution step yields a stable transaction between the
///      corresponding markings,
///   4. every stable transaction at a reachable marking is an evolution step
///      (set equality of both sides), and
///   5. zero producers and zero drains partition the transitions.
/// Failures carry a counterexample witness.
CheckReport check_correspondence(const CompiledNet& cn, int depth, std::size_t state_cap = 100000);

std::string report_text(const CheckReport& report);

}  // namespace zsm
