#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zsm/multiset.hpp"

namespace zsm {

using SymbolId = std::uint32_t;
using SymbolMultiset = Multiset<SymbolId>;

/// Destination of a produced object: the membrane itself, its father, or a
/// direct child (identified by the child's membrane index, 1-based).
struct Target {
  enum class Kind { Here, Out, In };
  Kind kind = Kind::Here;
  std::uint32_t membrane = 0;  // meaningful only for Kind::In

  static Target here() { return {Kind::Here, 0}; }
  static Target out() { return {Kind::Out, 0}; }
  static Target in(std::uint32_t child) { return {Kind::In, child}; }
};

/// Evolution rule u -> v. The right-hand side is stored by target projection,
/// so each projection is directly available to the interpreter and compiler.
struct Rule {
  std::string name;
  SymbolMultiset lhs;                             // u, never empty on validated systems
  SymbolMultiset rhs_here;                        // projection of v on `here`
  SymbolMultiset rhs_out;                         // projection of v on `out`
  std::map<std::uint32_t, SymbolMultiset> rhs_in; // child membrane -> projection on in_child

  /// Total number of produced objects, |v|.
  long long rhs_cardinality() const;
};

/// A membrane system: alphabet (in declaration order, which fixes the
/// canonical symbol order), a rooted membrane tree with 1-based indices where
/// parent(j) < j and membrane 1 is the skin, initial contents, and per-membrane
/// rule lists. Immutable after construction; queries are pure.
struct MembraneSystem {
  std::vector<std::string> alphabet;
  std::vector<std::uint32_t> parent_of;          // [i-1] = father of membrane i; 0 for the skin
  std::vector<SymbolMultiset> init;              // [i-1] = initial multiset of membrane i
  std::vector<std::vector<Rule>> rules;          // [i-1] = rules of membrane i, declaration order
  bool allow_skin_out = false;

  std::uint32_t membrane_count() const { return static_cast<std::uint32_t>(parent_of.size()); }

  /// Father of membrane i; empty exactly for the skin membrane (i = 1).
  /// Throws on an index outside 1..n.
  std::optional<std::uint32_t> father(std::uint32_t i) const;

  /// Direct children of membrane i, ascending. Throws on an index outside 1..n.
  std::vector<std::uint32_t> children(std::uint32_t i) const;

  /// Number of membranes of the subtree rooted at i, via the structural
  /// recurrence (a single membrane counts 1).
  std::uint32_t mem(std::uint32_t i = 1) const;

  /// Maximal number of nested membranes below and including i.
  std::uint32_t depth(std::uint32_t i = 1) const;

  std::optional<SymbolId> symbol_id(const std::string& name) const;
  const std::string& symbol_name(SymbolId id) const { return alphabet.at(id); }

  /// Index of the named rule within membrane i's list, if present.
  std::optional<std::uint32_t> rule_index(std::uint32_t i, const std::string& name) const;

  void check_membrane_index(std::uint32_t i) const;
};

/// Canonical text for a multiset over the system alphabet: `{a:2, b:1}` with
/// symbols in declaration order, `{}` when empty.
std::string multiset_text(const MembraneSystem& sys, const SymbolMultiset& m);

/// Canonical DSL rendering; parsing it back yields an equal system.
std::string pretty_print(const MembraneSystem& sys);

}  // namespace zsm
