#include <doctest.h>

#include <algorithm>
#include <random>

#include "support/helpers.hpp"
#include "zsm/semantics.hpp"

using namespace zsm;

namespace {

std::set<zsmtest::OracleStep> as_set(
    const std::vector<std::pair<VectorMultiRule, Configuration>>& steps) {
  return {steps.begin(), steps.end()};
}

VectorMultiRule vmr1(const MembraneSystem& sys, std::initializer_list<std::uint32_t> rule_idx) {
  VectorMultiRule vmr;
  vmr.per_membrane.resize(sys.membrane_count());
  for (std::uint32_t k : rule_idx) vmr.per_membrane[0].add(k, 1);
  return vmr;
}

}  // namespace

TEST_CASE("initial partial configurations") {
  MembraneSystem pi1 = zsmtest::fixture("pi1.psys");
  PartialConfiguration g = initial(pi1);
  CHECK(g.usable[0] == zsmtest::ms(pi1, "a b"));
  CHECK(g.produced[0].empty());

  MembraneSystem intro = zsmtest::fixture("intro1.psys");
  PartialConfiguration h = initial(intro);
  CHECK(h.usable[0] == zsmtest::ms(intro, "c"));
  CHECK(h.usable[1] == zsmtest::ms(intro, "a a b"));
  CHECK(h.produced[0].empty());

  MembraneSystem empty = parse_or_throw("psystem { objects: a; membrane 1 { init:; } }");
  CHECK(initial(empty).usable[0].empty());
}

TEST_CASE("micro step consumes from the usable part and produces aside") {
  MembraneSystem pi1 = zsmtest::fixture("pi1.psys");
  auto g = micro_step(pi1, initial(pi1), 1, "r1");
  REQUIRE(g.has_value());
  CHECK(g->usable[0] == zsmtest::ms(pi1, "b"));
  CHECK(g->produced[0] == zsmtest::ms(pi1, "b"));

  // second application of r1 has no a left
  CHECK_FALSE(micro_step(pi1, *g, 1, "r1").has_value());
  CHECK_THROWS_AS(micro_step(pi1, *g, 1, "nope"), Error);
  CHECK_THROWS_AS(micro_step(pi1, *g, 4, "r1"), Error);

  MembraneSystem intro = zsmtest::fixture("intro1.psys");
  auto h = micro_step(intro, initial(intro), 2, "r2");
  REQUIRE(h.has_value());
  CHECK(h->usable[0] == zsmtest::ms(intro, "c"));
  CHECK(h->produced[0] == zsmtest::ms(intro, "b"));  // sent outward
  CHECK(h->usable[1] == zsmtest::ms(intro, "a b"));
  CHECK(h->produced[1].empty());
}

TEST_CASE("quiescence") {
  MembraneSystem pi1 = zsmtest::fixture("pi1.psys");
  PartialConfiguration all_produced;
  all_produced.usable = {zsmtest::ms(pi1, "")};
  all_produced.produced = {zsmtest::ms(pi1, "a b")};
  CHECK(is_quiescent(pi1, all_produced));
  CHECK_FALSE(is_quiescent(pi1, initial(pi1)));

  MembraneSystem none = parse_or_throw("psystem { objects: a; membrane 1 { init: a; } }");
  CHECK(is_quiescent(none, initial(none)));
}

TEST_CASE("heating merges the produced part") {
  MembraneSystem pi1 = zsmtest::fixture("pi1.psys");
  PartialConfiguration g;
  g.usable = {zsmtest::ms(pi1, "")};
  g.produced = {zsmtest::ms(pi1, "b c")};
  CHECK(heated(g) == Configuration{zsmtest::ms(pi1, "b c")});
  CHECK(heated(initial(pi1)) == Configuration{zsmtest::ms(pi1, "a b")});

  MembraneSystem intro = zsmtest::fixture("intro1.psys");
  PartialConfiguration h;
  h.usable = {zsmtest::ms(intro, "a"), zsmtest::ms(intro, "")};
  h.produced = {zsmtest::ms(intro, "b"), zsmtest::ms(intro, "c")};
  CHECK(heated(h) == Configuration{zsmtest::ms(intro, "a b"), zsmtest::ms(intro, "c")});
}

TEST_CASE("maximal evolution steps of the single-membrane fixture") {
  MembraneSystem pi1 = zsmtest::fixture("pi1.psys");
  Configuration ab{zsmtest::ms(pi1, "a b")};

  auto steps = macro_steps(pi1, ab);
  std::set<zsmtest::OracleStep> expected{
      {vmr1(pi1, {0, 2}), {zsmtest::ms(pi1, "a b")}},  // r1 with r3 reproduces ab
      {vmr1(pi1, {0, 1}), {zsmtest::ms(pi1, "b c")}},  // r1 with r2 reaches bc
  };
  CHECK(as_set(steps) == expected);
  CHECK(as_set(steps) == zsmtest::oracle_macro_steps(pi1, ab));

  Configuration halting{zsmtest::ms(pi1, "c c")};
  CHECK(macro_steps(pi1, halting).empty());
  CHECK(zsmtest::oracle_macro_steps(pi1, halting).empty());
}

TEST_CASE("the two-membrane fixture has a unique first step") {
  MembraneSystem intro = zsmtest::fixture("intro1.psys");
  Configuration c0 = heated(initial(intro));
  auto steps = macro_steps(intro, c0);
  REQUIRE(steps.size() == 1);
  const auto& [vmr, succ] = steps[0];
  CHECK(vmr.per_membrane[0].empty());
  CHECK(vmr.per_membrane[1] == Multiset<std::uint32_t>{{0, 2}, {1, 1}});  // r2 twice, r3 once
  CHECK(succ == Configuration{zsmtest::ms(intro, "b b c"), zsmtest::ms(intro, "c")});
  CHECK(as_set(steps) == zsmtest::oracle_macro_steps(intro, c0));
}

TEST_CASE("reachability graphs") {
  MembraneSystem pi1 = zsmtest::fixture("pi1.psys");
  ReachabilityGraph g = reachability_graph(pi1, 3);
  std::set<Configuration> nodes;
  for (const auto& node : g.nodes) nodes.insert(node.config);
  std::set<Configuration> expected{
      {zsmtest::ms(pi1, "a b")}, {zsmtest::ms(pi1, "b c")},
      {zsmtest::ms(pi1, "a c")}, {zsmtest::ms(pi1, "c c")}};
  CHECK(nodes == expected);
  for (const auto& node : g.nodes)
    CHECK(node.halting == (node.config == Configuration{zsmtest::ms(pi1, "c c")}));

  ReachabilityGraph g0 = reachability_graph(pi1, 0);
  CHECK(g0.nodes.size() == 1);
  CHECK(g0.nodes[0].config == Configuration{zsmtest::ms(pi1, "a b")});

  MembraneSystem intro = zsmtest::fixture("intro1.psys");
  ReachabilityGraph gi = reachability_graph(intro, 2);
  std::set<Configuration> got;
  for (const auto& node : gi.nodes) got.insert(node.config);
  CHECK(got == zsmtest::oracle_reachable(intro, 2));
}

TEST_CASE("micro-step order does not matter") {
  std::mt19937 gen(23);
  for (const char* name : {"pi1.psys", "intro1.psys", "intro2.psys"}) {
    MembraneSystem sys = zsmtest::fixture(name);
    Configuration c = heated(initial(sys));
    for (const auto& [vmr, succ] : macro_steps(sys, c)) {
      // flatten the instances, then replay shuffled
      std::vector<std::pair<std::uint32_t, std::uint32_t>> instances;
      for (std::uint32_t i = 1; i <= sys.membrane_count(); ++i)
        for (const auto& [rule_idx, times] : vmr.per_membrane[i - 1])
          for (long long k = 0; k < times; ++k) instances.push_back({i, rule_idx});
      for (int round = 0; round < 8; ++round) {
        std::shuffle(instances.begin(), instances.end(), gen);
        PartialConfiguration g = partial_of(c);
        for (const auto& [membrane, rule_idx] : instances) {
          auto next = micro_step_at(sys, g, membrane, rule_idx);
          REQUIRE(next.has_value());
          g = *next;
        }
        CHECK(is_quiescent(sys, g));
        CHECK(heated(g) == succ);
      }
    }
  }
}

TEST_CASE("conservation per micro step") {
  MembraneSystem intro = zsmtest::fixture("intro1.psys");
  PartialConfiguration g = initial(intro);
  auto total = [](const PartialConfiguration& pc) {
    long long sum = 0;
    for (const auto& m : pc.usable) sum += m.cardinality();
    for (const auto& m : pc.produced) sum += m.cardinality();
    return sum;
  };
  for (std::uint32_t i = 1; i <= intro.membrane_count(); ++i)
    for (std::uint32_t k = 0; k < intro.rules[i - 1].size(); ++k) {
      auto next = micro_step_at(intro, g, i, k);
      if (!next) continue;
      const Rule& r = intro.rules[i - 1][k];
      CHECK(total(*next) - total(g) == r.rhs_cardinality() - r.lhs.cardinality());
    }
}

TEST_CASE("steps are maximal: no rule instance can be added") {
  for (std::uint32_t seed = 1; seed <= 20; ++seed) {
    MembraneSystem sys = zsmtest::random_system(seed);
    Configuration c = heated(initial(sys));
    for (const auto& [vmr, succ] : macro_steps(sys, c)) {
      for (std::uint32_t i = 1; i <= sys.membrane_count(); ++i) {
        SymbolMultiset consumed;
        for (const auto& [rule_idx, times] : vmr.per_membrane[i - 1])
          consumed = consumed.plus(sys.rules[i - 1][rule_idx].lhs.scaled(times));
        SymbolMultiset residual = c[i - 1].minus(consumed);
        CHECK(consumed.leq(c[i - 1]));
        for (const Rule& r : sys.rules[i - 1]) CHECK_FALSE(r.lhs.leq(residual));
      }
    }
  }
}

TEST_CASE("heating preserves the object count and halting matches quiescence") {
  for (std::uint32_t seed = 1; seed <= 20; ++seed) {
    MembraneSystem sys = zsmtest::random_system(seed);
    Configuration c = heated(initial(sys));
    bool halted = macro_steps(sys, c).empty();
    CHECK(halted == is_quiescent(sys, partial_of(c)));
    PartialConfiguration g = partial_of(c);
    long long before = 0, after = 0;
    for (const auto& m : g.usable) before += m.cardinality();
    for (const auto& m : heated(g)) after += m.cardinality();
    CHECK(before == after);
  }
}

TEST_CASE("the state cap stops runaway exploration") {
  MembraneSystem growth = parse_or_throw(
      "psystem { objects: a; membrane 1 { init: a; rule grow: a -> (a,here), (a,here); } }");
  CHECK_THROWS_AS(reachability_graph(growth, 10, 3), BudgetExceededError);
}

TEST_CASE("objects sent out of the skin vanish into the tally") {
  ParseOptions opts;
  opts.allow_skin_out = true;
  MembraneSystem sys = parse_or_throw(
      "psystem { objects: a b; membrane 1 { init: a; rule r: a -> (b,out); } }", opts);
  ReachabilityGraph g = reachability_graph(sys, 2);
  std::set<Configuration> nodes;
  for (const auto& node : g.nodes) nodes.insert(node.config);
  CHECK(nodes == std::set<Configuration>{{zsmtest::ms(sys, "a")}, {zsmtest::ms(sys, "")}});
  CHECK(g.skin_out_discarded == zsmtest::ms(sys, "b"));
}
