#pragma once

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "zsm/compile.hpp"
#include "zsm/parse.hpp"
#include "zsm/semantics.hpp"

namespace zsmtest {

inline std::string fixture_path(const std::string& name) {
  return std::string(ZSM_FIXTURE_DIR) + "/" + name;
}

inline zsm::MembraneSystem fixture(const std::string& name) {
  return zsm::parse_file_or_throw(fixture_path(name));
}

inline zsm::SymbolMultiset ms(const zsm::MembraneSystem& sys, const std::string& run) {
  zsm::SymbolMultiset out;
  std::istringstream in(run);
  std::string word;
  while (in >> word) out.add(*sys.symbol_id(word), 1);
  return out;
}

// Exhaustive interleaving of micro steps down to quiescence, built purely on
// the micro-step relation; serves as the independent oracle for the maximal
// evolution steps.
using OracleStep = std::pair<zsm::VectorMultiRule, zsm::Configuration>;

inline void oracle_explore(const zsm::MembraneSystem& sys, const zsm::PartialConfiguration& gamma,
                           const zsm::VectorMultiRule& applied,
                           std::set<std::pair<zsm::PartialConfiguration, zsm::VectorMultiRule>>& seen,
                           std::set<OracleStep>& out) {
  bool any = false;
  for (std::uint32_t i = 1; i <= sys.membrane_count(); ++i) {
    for (std::uint32_t k = 0; k < sys.rules[i - 1].size(); ++k) {
      auto next = zsm::micro_step_at(sys, gamma, i, k);
      if (!next) continue;
      any = true;
      zsm::VectorMultiRule extended = applied;
      extended.per_membrane[i - 1].add(k, 1);
      if (seen.insert({*next, extended}).second) oracle_explore(sys, *next, extended, seen, out);
    }
  }
  if (!any && !applied.empty()) out.insert({applied, zsm::heated(gamma)});
}

inline std::set<OracleStep> oracle_macro_steps(const zsm::MembraneSystem& sys,
                                               const zsm::Configuration& c) {
  zsm::VectorMultiRule none;
  none.per_membrane.resize(sys.membrane_count());
  std::set<std::pair<zsm::PartialConfiguration, zsm::VectorMultiRule>> seen;
  std::set<OracleStep> out;
  oracle_explore(sys, zsm::partial_of(c), none, seen, out);
  return out;
}

inline std::set<zsm::Configuration> oracle_reachable(const zsm::MembraneSystem& sys, int depth) {
  std::set<zsm::Configuration> seen;
  std::vector<zsm::Configuration> frontier{zsm::heated(zsm::initial(sys))};
  seen.insert(frontier[0]);
  for (int layer = 0; layer < depth; ++layer) {
    std::vector<zsm::Configuration> next;
    for (const auto& c : frontier)
      for (const auto& [vmr, succ] : oracle_macro_steps(sys, c))
        if (seen.insert(succ).second) next.push_back(succ);
    frontier = std::move(next);
  }
  return seen;
}

// Seeded generator of small valid systems (products always nonempty, targets
// valid by construction, no skin-out rules).
inline zsm::MembraneSystem random_system(std::uint32_t seed) {
  std::mt19937 gen(seed);
  auto pick = [&gen](std::uint32_t bound) { return static_cast<std::uint32_t>(gen() % bound); };

  zsm::MembraneSystem sys;
  std::uint32_t objects = 2 + pick(3);  // 2..4
  const char* names[] = {"a", "b", "c", "d"};
  for (std::uint32_t k = 0; k < objects; ++k) sys.alphabet.push_back(names[k]);

  std::uint32_t membranes = 1 + pick(3);  // 1..3
  sys.parent_of.assign(membranes, 0);
  for (std::uint32_t j = 2; j <= membranes; ++j) sys.parent_of[j - 1] = 1 + pick(j - 1);
  sys.init.assign(membranes, {});
  sys.rules.assign(membranes, {});

  std::uint32_t tokens = 2 + pick(2);  // 2..3 objects in total
  for (std::uint32_t k = 0; k < tokens; ++k) sys.init[pick(membranes)].add(pick(objects), 1);

  std::uint32_t rule_count = 1 + pick(5);  // 1..5
  for (std::uint32_t k = 0; k < rule_count; ++k) {
    std::uint32_t i = 1 + pick(membranes);
    zsm::Rule r;
    r.name = "r" + std::to_string(k + 1);
    std::uint32_t lhs_size = 1 + pick(2);
    std::vector<zsm::SymbolId> present = sys.init[i - 1].support();
    for (std::uint32_t q = 0; q < lhs_size; ++q) {
      // lean towards objects the membrane actually starts with
      if (!present.empty() && pick(3) != 0)
        r.lhs.add(present[pick(static_cast<std::uint32_t>(present.size()))], 1);
      else
        r.lhs.add(pick(objects), 1);
    }
    std::vector<std::uint32_t> children;
    for (std::uint32_t j = 2; j <= membranes; ++j)
      if (sys.parent_of[j - 1] == i) children.push_back(j);
    std::uint32_t rhs_size = pick(4) == 0 ? 2 : 1;  // occasional growth
    for (std::uint32_t q = 0; q < rhs_size; ++q) {
      std::uint32_t object = pick(objects);
      std::uint32_t choice = pick(4);
      if (choice == 1 && i != 1) {
        r.rhs_out.add(object, 1);
      } else if (choice == 2 && !children.empty()) {
        r.rhs_in[children[pick(static_cast<std::uint32_t>(children.size()))]].add(object, 1);
      } else {
        r.rhs_here.add(object, 1);
      }
    }
    sys.rules[i - 1].push_back(std::move(r));
  }
  return sys;
}

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr combined
};

inline CliResult run_shell(const std::string& command) {
  CliResult result;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return result;
  char buffer[4096];
  while (std::size_t n = fread(buffer, 1, sizeof buffer, pipe)) result.output.append(buffer, n);
  int status = pclose(pipe);
  if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  return result;
}

inline CliResult run_cli(const std::string& args) {
  return run_shell(std::string(ZSM_CLI_PATH) + " " + args + " 2>&1");
}

}  // namespace zsmtest
