#include "zsm/exports.hpp"

namespace zsm {

namespace {

constexpr int kSchemaVersion = 1;

ordered_json multiset_json(const MembraneSystem& sys, const SymbolMultiset& m) {
  ordered_json out = ordered_json::object();
  for (const auto& [id, c] : m) out[sys.symbol_name(id)] = c;
  return out;
}

ordered_json vmr_json(const MembraneSystem& sys, const VectorMultiRule& vmr) {
  ordered_json out = ordered_json::array();
  for (std::size_t k = 0; k < vmr.per_membrane.size(); ++k) {
    if (vmr.per_membrane[k].empty()) continue;
    ordered_json entry;
    entry["membrane"] = k + 1;
    ordered_json rules = ordered_json::object();
    for (const auto& [rule_idx, times] : vmr.per_membrane[k])
      rules[sys.rules[k][rule_idx].name] = times;
    entry["rules"] = rules;
    out.push_back(entry);
  }
  return out;
}

}  // namespace

ordered_json manifest_json(const RunManifest& m) {
  ordered_json out;
  out["schema_version"] = kSchemaVersion;
  out["input"] = m.input;
  out["command"] = m.command;
  ordered_json bounds = ordered_json::object();
  if (m.depth) bounds["depth"] = *m.depth;
  if (m.layers) bounds["layers"] = *m.layers;
  if (m.events) bounds["events"] = *m.events;
  bounds["state_cap"] = m.state_cap;
  out["bounds"] = bounds;
  out["format"] = m.format;
  out["deterministic"] = m.deterministic;
  return out;
}

ordered_json system_json(const MembraneSystem& sys) {
  ordered_json out;
  out["objects"] = sys.alphabet;
  ordered_json membranes = ordered_json::array();
  for (std::uint32_t i = 1; i <= sys.membrane_count(); ++i) {
    ordered_json m;
    m["index"] = i;
    if (i != 1) m["father"] = sys.parent_of[i - 1];
    m["init"] = multiset_json(sys, sys.init[i - 1]);
    ordered_json rules = ordered_json::array();
    for (const Rule& r : sys.rules[i - 1]) {
      ordered_json rule;
      rule["name"] = r.name;
      rule["lhs"] = multiset_json(sys, r.lhs);
      ordered_json rhs = ordered_json::object();
      if (!r.rhs_here.empty()) rhs["here"] = multiset_json(sys, r.rhs_here);
      if (!r.rhs_out.empty()) rhs["out"] = multiset_json(sys, r.rhs_out);
      if (!r.rhs_in.empty()) {
        ordered_json in = ordered_json::object();
        for (const auto& [child, m2] : r.rhs_in)
          in[std::to_string(child)] = multiset_json(sys, m2);
        rhs["in"] = in;
      }
      rule["rhs"] = rhs;
      rules.push_back(rule);
    }
    m["rules"] = rules;
    membranes.push_back(m);
  }
  out["membranes"] = membranes;
  return out;
}

ordered_json reachability_json(const RunManifest& m, const MembraneSystem& sys,
                               const ReachabilityGraph& g) {
  ordered_json out;
  out["manifest"] = manifest_json(m);
  out["system"] = system_json(sys);
  ordered_json nodes = ordered_json::array();
  for (std::size_t k = 0; k < g.nodes.size(); ++k) {
    ordered_json node;
    node["id"] = k;
    node["configuration"] = configuration_text(sys, g.nodes[k].config);
    node["depth"] = g.nodes[k].depth;
    node["halting"] = g.nodes[k].halting;
    nodes.push_back(node);
  }
  out["nodes"] = nodes;
  ordered_json edges = ordered_json::array();
  for (const auto& e : g.edges) {
    ordered_json edge;
    edge["from"] = e.from;
    edge["to"] = e.to;
    edge["rules"] = vmr_json(sys, e.rules);
    edges.push_back(edge);
  }
  out["edges"] = edges;
  if (!g.skin_out_discarded.empty())
    out["skin_out_discarded"] = multiset_json(sys, g.skin_out_discarded);
  return out;
}

ordered_json net_json(const RunManifest& m, const CompiledNet& cn) {
  ordered_json out;
  out["manifest"] = manifest_json(m);
  out["system"] = system_json(cn.system);
  ordered_json places = ordered_json::array();
  for (PlaceIdx s = 0; s < cn.net.places.size(); ++s) {
    ordered_json place;
    place["id"] = s;
    place["name"] = cn.net.places[s].name;
    place["zero"] = cn.net.places[s].zero;
    place["initial"] = cn.net.initial.count(s);
    places.push_back(place);
  }
  out["places"] = places;
  ordered_json transitions = ordered_json::array();
  for (TransitionIdx t = 0; t < cn.net.transitions.size(); ++t) {
    ordered_json tr;
    tr["id"] = t;
    tr["name"] = cn.net.transitions[t].name;
    ordered_json pre = ordered_json::array(), post = ordered_json::array();
    for (const auto& [s, w] : cn.net.transitions[t].pre)
      pre.push_back({{"place", s}, {"weight", w}});
    for (const auto& [s, w] : cn.net.transitions[t].post)
      post.push_back({{"place", s}, {"weight", w}});
    tr["pre"] = pre;
    tr["post"] = post;
    transitions.push_back(tr);
  }
  out["transitions"] = transitions;
  return out;
}

ordered_json unfolding_json(const RunManifest& m, const CompiledNet& cn, const OccurrenceNet& on) {
  ordered_json out;
  out["manifest"] = manifest_json(m);
  ordered_json conditions = ordered_json::array();
  for (std::uint32_t c = 0; c < on.conditions.size(); ++c) {
    const auto& cond = on.conditions[c];
    ordered_json node;
    node["id"] = c;
    node["place"] = cn.net.places[cond.place].name;
    node["copy"] = cond.copy;
    node["zero"] = cond.zero;
    node["layer"] = cond.layer;
    if (cond.producer >= 0)
      node["producer"] = cond.producer;
    else
      node["initial"] = true;
    conditions.push_back(node);
  }
  out["conditions"] = conditions;
  ordered_json events = ordered_json::array();
  for (std::uint32_t e = 0; e < on.events.size(); ++e) {
    const auto& ev = on.events[e];
    ordered_json node;
    node["id"] = e;
    node["transition"] = cn.net.transitions[ev.transition].name;
    node["layer"] = ev.layer;
    node["preset"] = ev.preset;
    node["postset"] = ev.postset;
    events.push_back(node);
  }
  out["events"] = events;
  out["layers_complete"] = on.layers_complete;
  out["truncated"] = on.truncated;
  return out;
}

ordered_json ess_json(const RunManifest& m, const CompiledNet& cn, const OccurrenceNet& on,
                      const Ess& ess) {
  ordered_json out;
  out["manifest"] = manifest_json(m);
  ordered_json events = ordered_json::array();
  for (std::uint32_t e = 0; e < ess.pes.size; ++e) {
    ordered_json node;
    node["id"] = e;
    node["label"] = cn.net.transitions[ess.label[e]].name;
    node["layer"] = on.events[ess.unfolding_event[e]].layer;
    node["unfolding_event"] = ess.unfolding_event[e];
    events.push_back(node);
  }
  out["events"] = events;

  // causal order, transitively reduced
  ordered_json order = ordered_json::array();
  for (std::uint32_t a = 0; a < ess.pes.size; ++a)
    for (std::uint32_t b = 0; b < ess.pes.size; ++b) {
      if (a == b || !ess.pes.le[a][b]) continue;
      bool direct = true;
      for (std::uint32_t c = 0; c < ess.pes.size && direct; ++c)
        if (c != a && c != b && ess.pes.le[a][c] && ess.pes.le[c][b]) direct = false;
      if (direct) order.push_back({{"below", a}, {"above", b}});
    }
  out["order"] = order;

  ordered_json conflicts = ordered_json::array();
  for (std::uint32_t a = 0; a < ess.pes.size; ++a)
    for (std::uint32_t b = a + 1; b < ess.pes.size; ++b) {
      if (!ess.pes.conflict[a][b]) continue;
      bool inherited = false;
      for (std::uint32_t c = 0; c < ess.pes.size && !inherited; ++c) {
        if (c != a && ess.pes.le[c][a] && c != b && ess.pes.conflict[c][b]) inherited = true;
        if (c != b && ess.pes.le[c][b] && c != a && ess.pes.conflict[a][c]) inherited = true;
      }
      if (!inherited) conflicts.push_back({{"a", a}, {"b", b}});
    }
  out["immediate_conflicts"] = conflicts;
  out["conflict_hereditary"] = true;

  ordered_json classes = ordered_json::array();
  for (const SimClass& cls : ess.sim.classes) {
    ordered_json entry;
    entry["events"] = cls.events;
    entry["layer"] = cls.layer;
    ordered_json provenance;
    provenance["slice"] = cls.slice;
    provenance["enabled_at"] = marking_text(cn.net, fold_marking(on, cls.slice));
    entry["provenance"] = provenance;
    entry["step"] = step_text(cn.net, cls.folded_step);
    classes.push_back(entry);
  }
  out["sim"] = classes;
  out["truncated"] = ess.sim.truncated;
  return out;
}

ordered_json check_json(const RunManifest& m, const CheckReport& report) {
  ordered_json out;
  out["manifest"] = manifest_json(m);
  ordered_json items = ordered_json::array();
  for (const auto& item : report.items) {
    ordered_json entry;
    entry["id"] = item.id;
    entry["title"] = item.title;
    entry["pass"] = item.pass;
    entry["checks"] = item.instances;
    if (!item.pass) entry["witness"] = item.witness;
    items.push_back(entry);
  }
  out["propositions"] = items;
  out["configurations"] = report.configurations;
  out["partial_configurations"] = report.partial_configurations;
  out["all_pass"] = report.all_pass();
  return out;
}

}  // namespace zsm
