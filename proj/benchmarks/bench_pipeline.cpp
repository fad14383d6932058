#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "zsm/ess.hpp"
#include "zsm/parse.hpp"

namespace {

zsm::MembraneSystem fixture(const std::string& name) {
  return zsm::parse_file_or_throw(std::string(ZSM_FIXTURE_DIR) + "/" + name);
}

void BM_compile(benchmark::State& state) {
  zsm::MembraneSystem sys = fixture("intro1.psys");
  for (auto _ : state) benchmark::DoNotOptimize(zsm::compile(sys));
}

void BM_unfold(benchmark::State& state) {
  zsm::CompiledNet cn = zsm::compile(fixture("pi1.psys"));
  std::uint32_t layers = static_cast<std::uint32_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(zsm::unfold(cn.net, {layers, 200000}));
}

void BM_ess(benchmark::State& state) {
  zsm::CompiledNet cn = zsm::compile(fixture("intro2.psys"));
  std::uint32_t layers = static_cast<std::uint32_t>(state.range(0));
  for (auto _ : state) {
    zsm::UnfoldResult r = zsm::unfold(cn.net, {layers, 200000});
    benchmark::DoNotOptimize(zsm::ess_of(r.on, cn.net));
  }
}

void BM_check(benchmark::State& state) {
  zsm::CompiledNet cn = zsm::compile(fixture("pi1.psys"));
  int depth = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(zsm::check_correspondence(cn, depth));
}

}  // namespace

BENCHMARK(BM_compile);
BENCHMARK(BM_unfold)->Arg(2)->Arg(4)->Arg(6);
BENCHMARK(BM_ess)->Arg(1)->Arg(2);
BENCHMARK(BM_check)->Arg(2)->Arg(4);

BENCHMARK_MAIN();
