#include "zsm/psystem.hpp"

#include <sstream>

namespace zsm {

long long Rule::rhs_cardinality() const {
  long long total = checked_add(rhs_here.cardinality(), rhs_out.cardinality());
  for (const auto& [child, m] : rhs_in) total = checked_add(total, m.cardinality());
  return total;
}

void MembraneSystem::check_membrane_index(std::uint32_t i) const {
  if (i < 1 || i > membrane_count()) {
    throw Error("membrane index " + std::to_string(i) + " out of range 1.." +
                std::to_string(membrane_count()));
  }
}

std::optional<std::uint32_t> MembraneSystem::father(std::uint32_t i) const {
  check_membrane_index(i);
  if (i == 1) return std::nullopt;
  return parent_of[i - 1];
}

std::vector<std::uint32_t> MembraneSystem::children(std::uint32_t i) const {
  check_membrane_index(i);
  std::vector<std::uint32_t> out;
  for (std::uint32_t j = 2; j <= membrane_count(); ++j)
    if (parent_of[j - 1] == i) out.push_back(j);
  return out;
}

std::uint32_t MembraneSystem::mem(std::uint32_t i) const {
  std::uint32_t total = 1;
  for (std::uint32_t child : children(i)) total += mem(child);
  return total;
}

std::uint32_t MembraneSystem::depth(std::uint32_t i) const {
  std::uint32_t deepest = 0;
  for (std::uint32_t child : children(i)) deepest = std::max(deepest, depth(child));
  return deepest + 1;
}

std::optional<SymbolId> MembraneSystem::symbol_id(const std::string& name) const {
  for (std::size_t k = 0; k < alphabet.size(); ++k)
    if (alphabet[k] == name) return static_cast<SymbolId>(k);
  return std::nullopt;
}

std::optional<std::uint32_t> MembraneSystem::rule_index(std::uint32_t i,
                                                        const std::string& name) const {
  check_membrane_index(i);
  const auto& list = rules[i - 1];
  for (std::size_t k = 0; k < list.size(); ++k)
    if (list[k].name == name) return static_cast<std::uint32_t>(k);
  return std::nullopt;
}

std::string multiset_text(const MembraneSystem& sys, const SymbolMultiset& m) {
  std::ostringstream out;
  out << '{';
  bool first = true;
  for (const auto& [id, c] : m) {
    if (!first) out << ", ";
    first = false;
    out << sys.symbol_name(id) << ':' << c;
  }
  out << '}';
  return out.str();
}

namespace {

void print_symbol_run(std::ostringstream& out, const MembraneSystem& sys,
                      const SymbolMultiset& m) {
  bool first = true;
  for (const auto& [id, c] : m) {
    for (long long k = 0; k < c; ++k) {
      if (!first) out << ' ';
      first = false;
      out << sys.symbol_name(id);
    }
  }
}

void print_rule(std::ostringstream& out, const MembraneSystem& sys, const Rule& r,
                const std::string& indent) {
  out << indent << "rule " << r.name << ": ";
  print_symbol_run(out, sys, r.lhs);
  out << " ->";
  bool first = true;
  auto product = [&](const std::string& sym, const std::string& target) {
    out << (first ? " " : ", ") << '(' << sym << ',' << target << ')';
    first = false;
  };
  for (const auto& [id, c] : r.rhs_here)
    for (long long k = 0; k < c; ++k) product(sys.symbol_name(id), "here");
  for (const auto& [id, c] : r.rhs_out)
    for (long long k = 0; k < c; ++k) product(sys.symbol_name(id), "out");
  for (const auto& [child, m] : r.rhs_in)
    for (const auto& [id, c] : m)
      for (long long k = 0; k < c; ++k)
        product(sys.symbol_name(id), "in(" + std::to_string(child) + ")");
  out << ";\n";
}

void print_membrane(std::ostringstream& out, const MembraneSystem& sys, std::uint32_t i,
                    int level) {
  std::string indent(static_cast<std::size_t>(level) * 2, ' ');
  std::string inner(static_cast<std::size_t>(level + 1) * 2, ' ');
  out << indent << "membrane " << i << " {\n";
  out << inner << "init:";
  if (!sys.init[i - 1].empty()) {
    out << ' ';
    print_symbol_run(out, sys, sys.init[i - 1]);
  }
  out << ";\n";
  for (const Rule& r : sys.rules[i - 1]) print_rule(out, sys, r, inner);
  for (std::uint32_t child : sys.children(i)) print_membrane(out, sys, child, level + 1);
  out << indent << "}\n";
}

}  // namespace

std::string pretty_print(const MembraneSystem& sys) {
  std::ostringstream out;
  out << "psystem {\n  objects:";
  for (const auto& name : sys.alphabet) out << ' ' << name;
  out << ";\n";
  print_membrane(out, sys, 1, 1);
  out << "}\n";
  return out.str();
}

}  // namespace zsm
