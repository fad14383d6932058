#include <doctest.h>

#include <chrono>
#include <iostream>
#include <map>
#include <random>

#include "support/helpers.hpp"
#include "zsm/ess.hpp"

using namespace zsm;

namespace {

// One acceptance criterion: collects violations, prints a single PASS/FAIL
// line, and enforces its runtime limit.
struct Criterion {
  int id;
  std::string title;
  double limit_seconds;
  std::vector<std::string> violations;
  std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

  void expect(bool condition, const std::string& what) {
    if (!condition) violations.push_back(what);
  }

  ~Criterion() {
    double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    bool in_time = seconds < limit_seconds;
    std::cout << "[acceptance] criterion " << id << " (" << title << "): "
              << (violations.empty() && in_time ? "PASS" : "FAIL") << "  [" << seconds << "s / "
              << limit_seconds << "s]\n";
    for (std::size_t k = 0; k < violations.size() && k < 3; ++k)
      std::cout << "             - " << violations[k] << "\n";
    if (violations.size() > 3)
      std::cout << "             - (" << violations.size() - 3 << " more)\n";
    std::string summary = "criterion " + std::to_string(id) + ": " + title;
    CHECK_MESSAGE(violations.empty(), summary);
    std::string timing = summary + " (runtime limit)";
    CHECK_MESSAGE(in_time, timing);
  }
};

std::vector<MembraneSystem> random_suite() {
  std::vector<MembraneSystem> out;
  for (std::uint32_t seed = 1; seed <= 50; ++seed) out.push_back(zsmtest::random_system(seed));
  return out;
}

struct Pipeline {
  MembraneSystem sys;
  CompiledNet cn;
  UnfoldResult unfolded;
  Ess ess;

  Pipeline(MembraneSystem system, std::uint32_t layers)
      : sys(std::move(system)),
        cn(compile(sys)),
        unfolded(unfold(cn.net, {layers, 20000})),
        ess(ess_of(unfolded.on, cn.net)) {}
};

std::string label_of(const Pipeline& p, std::uint32_t e) {
  return p.cn.net.transitions[p.ess.label[e]].name;
}

// Every bounded computation replayed on the unfolding with individual tokens:
// cumulative rule-event sets plus the rule multiset of each round.
struct ReplayChains {
  std::set<std::vector<std::uint32_t>> event_sets;                          // ESS indices
  std::map<std::vector<std::uint32_t>, std::set<std::vector<VectorMultiRule>>> sequences;
};

void collect_chains(const Pipeline& p, const ZSNet& view,
                    std::map<std::uint32_t, std::uint32_t>& to_ess,
                    const std::vector<std::uint32_t>& slice, int remaining,
                    std::vector<std::uint32_t> events, std::vector<VectorMultiRule> sequence,
                    ReplayChains& out) {
  std::vector<std::uint32_t> sorted = events;
  std::sort(sorted.begin(), sorted.end());
  out.event_sets.insert(sorted);
  out.sequences[sorted].insert(sequence);
  if (remaining == 0) return;
  Marking m;
  for (std::uint32_t b : slice) m.add(b, 1);
  for (const Transaction& tx : enumerate_stable_transactions(view, m)) {
    std::vector<std::uint32_t> next_events = events;
    std::vector<std::uint32_t> members;
    for (const auto& [event, count] : tx.rule_part) {
      next_events.push_back(to_ess.at(event));
      members.push_back(event);
    }
    VectorMultiRule vmr = p.cn.vector_multi_rule_of(fold_step(p.unfolded.on, members));
    std::vector<VectorMultiRule> next_sequence = sequence;
    next_sequence.push_back(vmr);
    std::vector<std::uint32_t> next_slice;
    for (const auto& [place, count] : tx.final_marking)
      for (long long k = 0; k < count; ++k) next_slice.push_back(place);
    collect_chains(p, view, to_ess, next_slice, remaining - 1, next_events, next_sequence, out);
  }
}

}  // namespace

TEST_CASE("criterion 1: bounded run of the one-membrane example") {
  Criterion c{1, "one-membrane example reaches exactly its four configurations", 1.0};
  MembraneSystem sys = zsmtest::fixture("pi1.psys");

  ReachabilityGraph g = reachability_graph(sys, 3);
  std::set<Configuration> nodes;
  for (const auto& node : g.nodes) nodes.insert(node.config);
  std::set<Configuration> expected{
      {zsmtest::ms(sys, "a b")}, {zsmtest::ms(sys, "b c")},
      {zsmtest::ms(sys, "a c")}, {zsmtest::ms(sys, "c c")}};
  c.expect(nodes == expected, "configuration set differs");
  for (const auto& node : g.nodes)
    c.expect(node.halting == (node.config == Configuration{zsmtest::ms(sys, "c c")}),
             "halting flag wrong at " + configuration_text(sys, node.config));

  auto steps = macro_steps(sys, {zsmtest::ms(sys, "a b")});
  std::set<std::pair<VectorMultiRule, Configuration>> got(steps.begin(), steps.end());
  VectorMultiRule r1r3, r1r2;
  r1r3.per_membrane = {Multiset<std::uint32_t>{{0, 1}, {2, 1}}};
  r1r2.per_membrane = {Multiset<std::uint32_t>{{0, 1}, {1, 1}}};
  std::set<std::pair<VectorMultiRule, Configuration>> expected_steps{
      {r1r3, {zsmtest::ms(sys, "a b")}}, {r1r2, {zsmtest::ms(sys, "b c")}}};
  c.expect(got == expected_steps, "evolution steps from ab differ");
}

TEST_CASE("criterion 2: first step and one-round structure of the first two-membrane example") {
  Criterion c{2, "unique first step r2+r2+r3 and a single class of three", 1.0};
  Pipeline p(zsmtest::fixture("intro1.psys"), 1);

  auto steps = macro_steps(p.sys, heated(initial(p.sys)));
  c.expect(steps.size() == 1, "expected a unique first step");
  if (steps.size() == 1) {
    const auto& [vmr, successor] = steps[0];
    c.expect(vmr.per_membrane[0].empty(), "outer membrane must be idle");
    c.expect(vmr.per_membrane[1] == Multiset<std::uint32_t>{{0, 2}, {1, 1}},
             "inner step must fire r2 twice and r3 once");
    c.expect(successor ==
                 Configuration{zsmtest::ms(p.sys, "b b c"), zsmtest::ms(p.sys, "c")},
             "successor must hold two b and one c outside, one c inside");
  }

  c.expect(p.ess.sim.classes.size() == 1, "expected exactly one simultaneity class");
  if (p.ess.sim.classes.size() == 1)
    c.expect(p.ess.sim.classes[0].events.size() == 3, "the class must have three events");
}

TEST_CASE("criterion 3: concurrency without simultaneity in the second two-membrane example") {
  Criterion c{3, "some r1 and r2 occurrences are concurrent yet never simultaneous", 1.0};
  Pipeline p(zsmtest::fixture("intro2.psys"), 2);

  bool witnessed = false;
  for (std::uint32_t e = 0; e < p.ess.pes.size && !witnessed; ++e) {
    if (label_of(p, e) != "t_1^r1") continue;
    for (std::uint32_t g = 0; g < p.ess.pes.size && !witnessed; ++g) {
      if (label_of(p, g) != "t_2^r2") continue;
      if (!p.ess.pes.concurrent(e, g)) continue;
      bool share_class = false;
      for (const SimClass& cls : p.ess.sim.classes) {
        bool has_e = std::count(cls.events.begin(), cls.events.end(), e) > 0;
        bool has_g = std::count(cls.events.begin(), cls.events.end(), g) > 0;
        share_class = share_class || (has_e && has_g);
      }
      witnessed = !share_class;
    }
  }
  c.expect(witnessed, "no concurrent-but-not-simultaneous pair found");
}

TEST_CASE("criterion 4: the transaction of the one-membrane example") {
  Criterion c{4, "full round passes the transaction check, partial rounds fail", 1.0};
  MembraneSystem sys = zsmtest::fixture("pi1.psys");
  CompiledNet cn = compile(sys);
  Marking ab = nu(cn, Configuration{zsmtest::ms(sys, "a b")});
  TransitionIdx r1 = cn.rule_transition(1, 0), r3 = cn.rule_transition(1, 2);
  TransitionIdx heat_a = cn.heat_transition(*sys.symbol_id("a"), 1);
  TransitionIdx heat_b = cn.heat_transition(*sys.symbol_id("b"), 1);

  c.expect(check_stable_transaction(cn.net, ab,
                                    {{{r1, 1}, {r3, 1}}, {{heat_a, 1}, {heat_b, 1}}}),
           "the two rules plus their heatings must form a stable transaction");
  c.expect(!check_stable_transaction(cn.net, ab, {{{r1, 1}}, {{heat_b, 1}}}),
           "a single rule with its heating must fail the maximality requirement");
  c.expect(!check_stable_transaction(cn.net, ab, {Step{{r1, 1}}}),
           "a rule without heating must not even be a stable step");
}

TEST_CASE("criterion 5: correspondence suite over fixtures, random systems and mutants") {
  Criterion c{5, "interpreter and net agree on fixtures and 50 random systems", 60.0};

  for (const char* name : {"pi1.psys", "intro1.psys", "intro2.psys"}) {
    CheckReport report = check_correspondence(compile(zsmtest::fixture(name)), 4);
    for (const auto& item : report.items)
      c.expect(item.pass, std::string(name) + ": " + item.id + ": " + item.witness);
  }
  int index = 0;
  for (const MembraneSystem& sys : random_suite()) {
    ++index;
    CheckReport report = check_correspondence(compile(sys), 2);
    for (const auto& item : report.items)
      c.expect(item.pass,
               "random system " + std::to_string(index) + ": " + item.id + ": " + item.witness);
  }

  MembraneSystem pi1 = zsmtest::fixture("pi1.psys");
  {
    CompiledNet mutant = compile(pi1);
    TransitionIdx heat_b = mutant.heat_transition(*pi1.symbol_id("b"), 1);
    mutant.net.transitions[heat_b].pre.clear();
    mutant.net.transitions[heat_b].post.clear();
    c.expect(!check_correspondence(mutant, 2).all_pass(),
             "a disconnected heating transition must be detected");
  }
  {
    CompiledNet mutant = compile(pi1);
    mutant.net.transitions[mutant.rule_transition(1, 0)].pre[0].second = 2;
    c.expect(!check_correspondence(mutant, 2).all_pass(),
             "an altered arc weight must be detected");
  }
}

TEST_CASE("criterion 6: folding morphism and token-game preservation") {
  Criterion c{6, "per-event morphism equations, 1000 random firings, safety", 30.0};
  std::mt19937 gen(2026);
  for (const char* name : {"pi1.psys", "intro1.psys", "intro2.psys"}) {
    Pipeline p(zsmtest::fixture(name), 3);
    const OccurrenceNet& on = p.unfolded.on;
    c.expect(fold_marking(on, on.initial_conditions) == p.cn.net.initial,
             std::string(name) + ": initial conditions must fold onto the initial marking");
    for (const auto& ev : on.events) {
      Marking pre_expected, post_expected;
      for (const auto& [s, w] : p.cn.net.transitions[ev.transition].pre) pre_expected.add(s, w);
      for (const auto& [s, w] : p.cn.net.transitions[ev.transition].post) post_expected.add(s, w);
      c.expect(fold_marking(on, ev.preset) == pre_expected,
               std::string(name) + ": preset image mismatch");
      c.expect(fold_marking(on, ev.postset) == post_expected,
               std::string(name) + ": postset image mismatch");
    }

    for (int round = 0; round < 334; ++round) {
      std::set<std::uint32_t> marking(on.initial_conditions.begin(), on.initial_conditions.end());
      Marking folded = p.cn.net.initial;
      for (int step = 0; step < 8; ++step) {
        std::vector<std::uint32_t> ready;
        for (std::uint32_t e = 0; e < on.events.size(); ++e) {
          bool ok = true;
          for (std::uint32_t b : on.events[e].preset) ok = ok && marking.count(b) > 0;
          if (ok) ready.push_back(e);
        }
        if (ready.empty()) break;
        std::uint32_t e = ready[gen() % ready.size()];
        for (std::uint32_t b : on.events[e].preset) marking.erase(b);
        bool safe = true;
        for (std::uint32_t b : on.events[e].postset) safe = safe && marking.insert(b).second;
        c.expect(safe, std::string(name) + ": safety violated");
        Step image{{on.events[e].transition, 1}};
        bool preserved = enabled(p.cn.net, folded, image);
        if (preserved) {
          folded = fire(p.cn.net, folded, image);
          std::vector<std::uint32_t> as_vector(marking.begin(), marking.end());
          preserved = fold_marking(on, as_vector) == folded;
        }
        c.expect(preserved, std::string(name) + ": token game not preserved");
      }
    }
  }
}

TEST_CASE("criterion 7: the slice that is maximal but not maximally simultaneous") {
  Criterion c{7, "two zero c-conditions across rounds: maximal, not simultaneous", 1.0};
  Pipeline p(zsmtest::fixture("pi1.psys"), 2);
  const OccurrenceNet& on = p.unfolded.on;

  // the round-one r2 occurrence on the initial b, and the round-two r2
  // occurrence on the heated b
  std::uint32_t early = 0, late = 0;
  bool found_early = false, found_late = false;
  for (std::uint32_t e = 0; e < on.events.size(); ++e) {
    if (p.cn.net.transitions[on.events[e].transition].name != "t_1^r2") continue;
    if (on.events[e].layer == 1) {
      early = e;
      found_early = true;
    }
    if (on.events[e].layer == 2) {
      late = e;
      found_late = true;
    }
  }
  c.expect(found_early && found_late, "expected r2 occurrences in both rounds");
  if (found_early && found_late) {
    std::vector<std::uint32_t> slice{on.events[early].postset[0], on.events[late].postset[0]};
    SliceClass verdict = classify_slice(on, p.cn.net, slice);
    c.expect(verdict == SliceClass::MaximalUnstable,
             "expected the maximal-but-not-simultaneous verdict, got " +
                 std::to_string(static_cast<int>(verdict)));
  }
}

TEST_CASE("criterion 8: axioms of the extracted structures") {
  Criterion c{8, "simultaneity axioms across fixtures and 50 random systems", 60.0};

  auto audit = [&c](const std::string& name, const Pipeline& p) {
    c.expect(!p.ess.sim.truncated, name + ": extraction truncated");
    EssValidation v = validate_ess(p.ess);
    c.expect(v.nonempty_classes, name + ": empty class");
    c.expect(v.classes_cover_events, name + ": events outside every class");
    c.expect(v.classes_concurrent, name + ": class with non-concurrent events");
    c.expect(v.no_containment,
             name + ": containment between overlapping classes" +
                 (v.violations.empty() ? "" : " (" + v.violations.front() + ")"));
    c.expect(v.overlap_conflict, name + ": overlap without conflict");
    c.expect(v.conflict_hereditary, name + ": conflict not hereditary");

    // every configuration also meets the plain event-structure conditions
    Pes pes = ess_to_pes(p.ess);
    for (const auto& x : ess_configurations(p.ess)) {
      bool plain = true;
      for (std::uint32_t e : x) {
        for (std::uint32_t d = 0; d < pes.size; ++d) {
          bool in_x = std::binary_search(x.begin(), x.end(), d);
          if (in_x && d != e && pes.conflict[d][e]) plain = false;
          if (!in_x && d != e && pes.le[d][e]) plain = false;
        }
      }
      c.expect(plain, name + ": a configuration violates the plain conditions");
    }

    Ess embedded = pes_to_ess(pes);
    c.expect(validate_ess(embedded).ok(), name + ": singleton embedding invalid");
    Pes back = ess_to_pes(embedded);
    c.expect(back.le == pes.le && back.conflict == pes.conflict,
             name + ": embedding round trip changes the order or conflict");
    if (pes.size <= 14) {  // configuration sets compared exhaustively on small instances
      auto embedded_confs = ess_configurations(embedded);
      auto pes_confs = pes_configurations(pes);
      c.expect(std::set<std::vector<std::uint32_t>>(embedded_confs.begin(),
                                                    embedded_confs.end()) ==
                   std::set<std::vector<std::uint32_t>>(pes_confs.begin(), pes_confs.end()),
               name + ": singleton embedding changes the configurations");
    }
  };

  for (const char* name : {"pi1.psys", "intro1.psys", "intro2.psys"})
    audit(name, Pipeline(zsmtest::fixture(name), 2));
  int index = 0;
  for (const MembraneSystem& sys : random_suite()) {
    ++index;
    audit("random system " + std::to_string(index), Pipeline(sys, 2));
  }
}

TEST_CASE("criterion 9: computations and configurations express each other") {
  Criterion c{9, "bounded computations match configurations with their rule layers", 60.0};

  for (const char* name : {"pi1.psys", "intro1.psys", "intro2.psys"}) {
    Pipeline p(zsmtest::fixture(name), 3);
    ZSNet view = occurrence_as_zsnet(p.unfolded.on, p.cn.net);
    std::map<std::uint32_t, std::uint32_t> to_ess;
    for (std::uint32_t e = 0; e < p.ess.unfolding_event.size(); ++e)
      to_ess[p.ess.unfolding_event[e]] = e;

    std::vector<std::uint32_t> start = p.unfolded.on.initial_conditions;
    std::sort(start.begin(), start.end());
    ReplayChains chains;
    collect_chains(p, view, to_ess, start, 3, {}, {}, chains);

    auto confs = ess_configurations(p.ess);
    std::set<std::vector<std::uint32_t>> conf_set(confs.begin(), confs.end());

    for (const auto& x : chains.event_sets)
      c.expect(conf_set.count(x) > 0,
               std::string(name) + ": a computation's event set is not a configuration");
    for (const auto& x : conf_set)
      c.expect(chains.event_sets.count(x) > 0,
               std::string(name) + ": configuration {" +
                   [&] {
                     std::string text;
                     for (std::uint32_t e : x) text += label_of(p, e) + " ";
                     return text;
                   }() +
                   "} corresponds to no bounded computation");

    for (const auto& x : chains.event_sets) {
      if (!conf_set.count(x)) continue;
      auto sequence = configuration_to_rules(p.ess, p.cn, x);
      c.expect(chains.sequences[x].count(sequence) > 0,
               std::string(name) + ": reconstructed rule layers differ from the computation");
    }
  }
}

TEST_CASE("criterion 10: maximal steps agree with exhaustive micro interleaving") {
  Criterion c{10, "direct enumeration equals the interleaving oracle", 30.0};

  std::vector<std::pair<std::string, MembraneSystem>> systems;
  for (const char* name : {"pi1.psys", "intro1.psys", "intro2.psys"})
    systems.push_back({name, zsmtest::fixture(name)});
  int index = 0;
  for (const MembraneSystem& sys : random_suite())
    systems.push_back({"random system " + std::to_string(++index), sys});

  for (const auto& [name, sys] : systems) {
    long long total = 0;
    for (const auto& m : sys.init) total += m.cardinality();
    if (total > 6) continue;

    std::vector<Configuration> probes{heated(initial(sys))};
    for (const auto& [vmr, succ] : macro_steps(sys, probes[0])) probes.push_back(succ);
    for (const auto& probe : probes) {
      long long tokens = 0;
      for (const auto& m : probe) tokens += m.cardinality();
      if (tokens > 8) continue;
      auto direct = macro_steps(sys, probe);
      std::set<zsmtest::OracleStep> got(direct.begin(), direct.end());
      c.expect(got == zsmtest::oracle_macro_steps(sys, probe),
               name + ": disagreement at " + configuration_text(sys, probe));
    }
  }
}
