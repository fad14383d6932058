#include <benchmark/benchmark.h>

#include <sstream>

#include "zsm/parse.hpp"
#include "zsm/semantics.hpp"

namespace {

// The one-membrane cycle system with k copies of each starting object; the
// number of maximal steps grows quickly with k.
zsm::MembraneSystem scaled_system(int k) {
  std::ostringstream text;
  text << "psystem { objects: a b c; membrane 1 { init:";
  for (int i = 0; i < k; ++i) text << " a b";
  text << ";\n"
          "rule r1: a -> (b,here);\n"
          "rule r2: b -> (c,here);\n"
          "rule r3: b -> (a,here);\n"
          "} }";
  return zsm::parse_or_throw(text.str());
}

void BM_macro_steps(benchmark::State& state) {
  zsm::MembraneSystem sys = scaled_system(static_cast<int>(state.range(0)));
  zsm::Configuration c = zsm::heated(zsm::initial(sys));
  for (auto _ : state) benchmark::DoNotOptimize(zsm::macro_steps(sys, c));
}

void BM_reachability(benchmark::State& state) {
  zsm::MembraneSystem sys = scaled_system(2);
  int depth = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(zsm::reachability_graph(sys, depth));
}

}  // namespace

BENCHMARK(BM_macro_steps)->Arg(2)->Arg(4)->Arg(8);
BENCHMARK(BM_reachability)->Arg(2)->Arg(4)->Arg(6);
