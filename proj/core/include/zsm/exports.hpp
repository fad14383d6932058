#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "zsm/compile.hpp"
#include "zsm/ess.hpp"
#include "zsm/parse.hpp"
#include "zsm/semantics.hpp"
#include "zsm/unfold.hpp"

namespace zsm {

using ordered_json = nlohmann::ordered_json;

/// Invocation record embedded verbatim in every JSON export.
struct RunManifest {
  std::string input;
  std::string command;
  std::optional<int> depth;
  std::optional<std::uint32_t> layers;
  std::optional<std::size_t> events;
  std::size_t state_cap = 100000;
  std::string format = "json";
  bool deterministic = true;  // outputs are a pure function of input and flags
};

ordered_json manifest_json(const RunManifest& m);

ordered_json system_json(const MembraneSystem& sys);
ordered_json reachability_json(const RunManifest& m, const MembraneSystem& sys,
                               const ReachabilityGraph& g);
ordered_json net_json(const RunManifest& m, const CompiledNet& cn);
ordered_json unfolding_json(const RunManifest& m, const CompiledNet& cn, const OccurrenceNet& on);
ordered_json ess_json(const RunManifest& m, const CompiledNet& cn, const OccurrenceNet& on,
                      const Ess& ess);
ordered_json check_json(const RunManifest& m, const CheckReport& report);

}  // namespace zsm
