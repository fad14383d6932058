#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "zsm/exports.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitCheckFailed = 3;
constexpr int kExitBudget = 4;

std::size_t state_cap_from_env() {
  if (const char* value = std::getenv("ZSM_STATE_CAP")) {
    char* end = nullptr;
    unsigned long long parsed = std::strtoull(value, &end, 10);
    if (end && *end == '\0' && parsed > 0) return static_cast<std::size_t>(parsed);
    std::cerr << "warning: ignoring malformed ZSM_STATE_CAP='" << value << "'\n";
  }
  return 100000;
}

void write_output(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path);
  if (!out) throw zsm::Error("cannot write to " + path);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw zsm::Error("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct CommonArgs {
  std::string file;
  bool allow_skin_out = false;
  std::string dot_path;
  std::string json_path;
};

zsm::MembraneSystem load(const CommonArgs& args, bool* failed) {
  zsm::ParseOptions options;
  options.allow_skin_out = args.allow_skin_out;
  zsm::ParseResult result = zsm::parse(read_file(args.file), options);
  if (!result.ok()) {
    for (const auto& d : result.diagnostics)
      std::cerr << args.file << ":" << d.to_string() << "\n";
    *failed = true;
    return {};
  }
  *failed = false;
  return std::move(*result.system);
}

void list_traces(const zsm::MembraneSystem& sys, const zsm::Configuration& c, int remaining,
                 const std::string& prefix, std::size_t& count, std::size_t cap) {
  if (count >= cap)
    throw zsm::BudgetExceededError("trace listing exceeded the state cap");
  std::string trace = prefix + zsm::configuration_text(sys, c);
  auto steps = remaining > 0 ? zsm::macro_steps(sys, c)
                             : std::vector<std::pair<zsm::VectorMultiRule, zsm::Configuration>>{};
  if (steps.empty()) {  // depth exhausted or halting: emit the full trace
    std::cout << trace << "\n";
    ++count;
    return;
  }
  for (const auto& [vmr, succ] : steps)
    list_traces(sys, succ, remaining - 1,
                trace + " =" + zsm::vector_multi_rule_text(sys, vmr) + "=> ", count, cap);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zsm: maximally parallel membrane systems, their zero-safe nets, "
               "unfoldings and event structures with simultaneity"};
  app.require_subcommand(1);
  std::size_t state_cap = state_cap_from_env();

  CommonArgs validate_args;
  auto* cmd_validate = app.add_subcommand("validate", "parse and validate a system");
  cmd_validate->add_option("file", validate_args.file, "system source file")->required();
  cmd_validate->add_flag("--allow-skin-out", validate_args.allow_skin_out,
                         "accept rules sending objects out of the skin membrane");

  CommonArgs run_args;
  int run_depth = 0;
  bool all_traces = false;
  auto* cmd_run = app.add_subcommand("run", "explore the reachable configurations");
  cmd_run->add_option("file", run_args.file)->required();
  cmd_run->add_option("--depth", run_depth, "number of evolution layers")->required();
  cmd_run->add_flag("--all-traces", all_traces, "list every bounded computation");
  cmd_run->add_flag("--allow-skin-out", run_args.allow_skin_out);
  cmd_run->add_option("--dot", run_args.dot_path, "write the graph in DOT ('-' for stdout)");
  cmd_run->add_option("--json", run_args.json_path, "write the graph as JSON ('-' for stdout)");

  CommonArgs compile_args;
  auto* cmd_compile = app.add_subcommand("compile", "translate the system to its zero-safe net");
  cmd_compile->add_option("file", compile_args.file)->required();
  cmd_compile->add_flag("--allow-skin-out", compile_args.allow_skin_out);
  cmd_compile->add_option("--dot", compile_args.dot_path);
  cmd_compile->add_option("--json", compile_args.json_path);

  CommonArgs unfold_args;
  std::uint32_t unfold_layers = 1;
  std::size_t unfold_events = 20000;
  auto* cmd_unfold = app.add_subcommand("unfold", "unfold the compiled net");
  cmd_unfold->add_option("file", unfold_args.file)->required();
  cmd_unfold->add_option("--layers", unfold_layers, "rounds of stable transactions")->required();
  cmd_unfold->add_option("--events", unfold_events, "event budget");
  cmd_unfold->add_flag("--allow-skin-out", unfold_args.allow_skin_out);
  cmd_unfold->add_option("--dot", unfold_args.dot_path);
  cmd_unfold->add_option("--json", unfold_args.json_path);

  CommonArgs ess_args;
  std::uint32_t ess_layers = 1;
  std::size_t ess_events = 20000;
  auto* cmd_ess = app.add_subcommand("ess", "extract the event structure with simultaneity");
  cmd_ess->add_option("file", ess_args.file)->required();
  cmd_ess->add_option("--layers", ess_layers, "rounds of stable transactions")->required();
  cmd_ess->add_option("--events", ess_events, "event budget");
  cmd_ess->add_flag("--allow-skin-out", ess_args.allow_skin_out);
  cmd_ess->add_option("--dot", ess_args.dot_path);
  cmd_ess->add_option("--json", ess_args.json_path);

  CommonArgs check_args;
  int check_depth = 0;
  auto* cmd_check = app.add_subcommand(
      "check", "verify that the interpreter and the compiled net simulate each other");
  cmd_check->add_option("file", check_args.file)->required();
  cmd_check->add_option("--depth", check_depth, "number of evolution layers")->required();
  cmd_check->add_flag("--allow-skin-out", check_args.allow_skin_out);
  cmd_check->add_option("--json", check_args.json_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*cmd_validate) {
      bool failed = false;
      zsm::MembraneSystem sys = load(validate_args, &failed);
      if (failed) return kExitValidation;
      std::size_t rule_count = 0;
      for (const auto& list : sys.rules) rule_count += list.size();
      std::cout << "ok: " << sys.membrane_count() << " membranes, " << sys.alphabet.size()
                << " objects, " << rule_count << " rules, depth " << sys.depth() << "\n";
      return kExitOk;
    }

    if (*cmd_run) {
      bool failed = false;
      zsm::MembraneSystem sys = load(run_args, &failed);
      if (failed) return kExitValidation;
      zsm::ReachabilityGraph graph = zsm::reachability_graph(sys, run_depth, state_cap);
      std::size_t halting = 0;
      for (const auto& node : graph.nodes) halting += node.halting ? 1 : 0;
      std::cout << graph.nodes.size() << " configurations, " << graph.edges.size()
                << " steps, " << halting << " halting (depth " << run_depth << ")\n";
      for (const auto& node : graph.nodes)
        std::cout << "  " << zsm::configuration_text(sys, node.config)
                  << (node.halting ? "  [halting]" : "") << "\n";
      if (all_traces) {
        std::size_t count = 0;
        list_traces(sys, graph.nodes[0].config, run_depth, "", count, state_cap);
      }
      zsm::RunManifest manifest{run_args.file, "run", run_depth, std::nullopt, std::nullopt,
                                state_cap};
      if (!run_args.json_path.empty())
        write_output(run_args.json_path,
                     zsm::reachability_json(manifest, sys, graph).dump(2) + "\n");
      if (!run_args.dot_path.empty())
        write_output(run_args.dot_path, zsm::reachability_to_dot(sys, graph));
      return kExitOk;
    }

    if (*cmd_compile) {
      bool failed = false;
      zsm::MembraneSystem sys = load(compile_args, &failed);
      if (failed) return kExitValidation;
      zsm::CompiledNet cn = zsm::compile(sys);
      std::cout << cn.net.places.size() << " places, " << cn.net.transitions.size()
                << " transitions, initial marking " << zsm::marking_text(cn.net, cn.net.initial)
                << "\n";
      zsm::RunManifest manifest{compile_args.file, "compile", std::nullopt, std::nullopt,
                                std::nullopt, state_cap};
      if (!compile_args.json_path.empty())
        write_output(compile_args.json_path, zsm::net_json(manifest, cn).dump(2) + "\n");
      if (!compile_args.dot_path.empty())
        write_output(compile_args.dot_path, zsm::net_to_dot(cn.net));
      return kExitOk;
    }

    if (*cmd_unfold) {
      bool failed = false;
      zsm::MembraneSystem sys = load(unfold_args, &failed);
      if (failed) return kExitValidation;
      zsm::CompiledNet cn = zsm::compile(sys);
      zsm::UnfoldResult result = zsm::unfold(cn.net, {unfold_layers, unfold_events});
      std::cout << result.on.conditions.size() << " conditions, " << result.on.events.size()
                << " events, " << result.on.layers_complete << " layers complete"
                << (result.on.truncated ? " (truncated)" : "") << "\n";
      zsm::RunManifest manifest{unfold_args.file, "unfold", std::nullopt, unfold_layers,
                                unfold_events, state_cap};
      if (!unfold_args.json_path.empty())
        write_output(unfold_args.json_path,
                     zsm::unfolding_json(manifest, cn, result.on).dump(2) + "\n");
      if (!unfold_args.dot_path.empty())
        write_output(unfold_args.dot_path, zsm::unfolding_to_dot(result.on, cn.net));
      return result.on.truncated ? kExitBudget : kExitOk;
    }

    if (*cmd_ess) {
      bool failed = false;
      zsm::MembraneSystem sys = load(ess_args, &failed);
      if (failed) return kExitValidation;
      zsm::CompiledNet cn = zsm::compile(sys);
      zsm::UnfoldResult result = zsm::unfold(cn.net, {ess_layers, ess_events});
      zsm::Ess ess = zsm::ess_of(result.on, cn.net);
      std::cout << ess.pes.size << " events, " << ess.sim.classes.size()
                << " simultaneity classes"
                << (ess.sim.truncated ? " (truncated)" : "") << "\n";
      for (const zsm::SimClass& cls : ess.sim.classes) {
        std::cout << "  layer " << cls.layer << ": {";
        for (std::size_t k = 0; k < cls.events.size(); ++k)
          std::cout << (k ? ", " : "") << cn.net.transitions[ess.label[cls.events[k]]].name;
        std::cout << "}\n";
      }
      zsm::RunManifest manifest{ess_args.file, "ess", std::nullopt, ess_layers, ess_events,
                                state_cap};
      if (!ess_args.json_path.empty())
        write_output(ess_args.json_path,
                     zsm::ess_json(manifest, cn, result.on, ess).dump(2) + "\n");
      if (!ess_args.dot_path.empty()) write_output(ess_args.dot_path, zsm::ess_to_dot(ess, cn));
      return result.on.truncated ? kExitBudget : kExitOk;
    }

    if (*cmd_check) {
      bool failed = false;
      zsm::MembraneSystem sys = load(check_args, &failed);
      if (failed) return kExitValidation;
      zsm::CompiledNet cn = zsm::compile(sys);
      zsm::CheckReport report = zsm::check_correspondence(cn, check_depth, state_cap);
      std::cout << zsm::report_text(report);
      zsm::RunManifest manifest{check_args.file, "check", check_depth, std::nullopt, std::nullopt,
                                state_cap};
      if (!check_args.json_path.empty())
        write_output(check_args.json_path, zsm::check_json(manifest, report).dump(2) + "\n");
      return report.all_pass() ? kExitOk : kExitCheckFailed;
    }
  } catch (const zsm::BudgetExceededError& e) {
    std::cerr << "budget exhausted: " << e.what() << "\n";
    return kExitBudget;
  } catch (const zsm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitUsage;
}
