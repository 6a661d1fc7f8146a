// Command-line front end. Every command first builds one structured document;
// the human-readable output is rendered from that document alone.
//
// Exit codes: 0 success, 1 input error, 2 size or capability limit,
// 3 a verification or audit reported a failure.

#pragma once

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "penkey/bb84.hpp"
#include "penkey/bounds.hpp"
#include "penkey/gme.hpp"
#include "penkey/network_io.hpp"
#include "penkey/protocol.hpp"

namespace penkey::cli {

using Json = nlohmann::ordered_json;

enum ExitCode : int { kOk = 0, kInputError = 1, kLimitError = 2, kCheckFailed = 3 };

struct RunConfig {
  std::string command;
  std::string network;
  std::vector<Vertex> seekers;
  std::uint64_t seed = kDefaultSeed;
  int rounds = 1;
  std::string format = "human";
  std::optional<Vertex> reference;
  // verify-gme
  std::size_t samples = 1000;
  std::size_t trials = 1000;
  // simulate
  std::size_t audit_trials = 1000;
  // bb84
  std::vector<double> correlators;
  int resolution = 1000;
  std::vector<double> xxx_range;
};

// ---------------------------------------------------------------------------
// Report -> document

inline Json to_json(const Partition& p) {
  Json blocks = Json::array();
  for (const auto& b : p.blocks) blocks.push_back(b);
  return Json{{"blocks", blocks}, {"proper", p.proper}};
}

inline Json to_json(const Witness& w) {
  return std::visit(
      [](const auto& x) -> Json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, CutWitness>) {
          return Json{{"type", "cut"}, {"side", x.side}, {"edges", x.edges}};
        } else if constexpr (std::is_same_v<T, Partition>) {
          const Json body = to_json(x);
          Json j{{"type", "partition"}};
          for (const auto& [k, v] : body.items()) j[k] = v;
          return j;
        } else if constexpr (std::is_same_v<T, EdgeWitness>) {
          return Json{{"type", "edge"}, {"edge", x.edge}};
        } else {
          return Json{{"type", "vertex"}, {"vertex", x.vertex}};
        }
      },
      w);
}

inline Json to_json(const BoundReport& r) {
  Json j{{"kind", to_string(r.kind)}, {"value", r.value}};
  j["exact"] = r.exact ? Json(*r.exact) : Json(nullptr);
  j["witness"] = to_json(r.witness);
  j["notes"] = r.notes;
  j["packing_crosscheck"] = r.packing_crosscheck ? Json(*r.packing_crosscheck) : Json(nullptr);
  return j;
}

inline Json network_summary(const PenNetwork& net) {
  Json edges = Json::array();
  for (const EdgeSpec& e : net.edges()) {
    edges.push_back(Json{{"u", e.u}, {"v", e.v}, {"state", state_tag(e.state)}, {"multiplicity", e.multiplicity}});
  }
  return Json{{"n_vertices", net.n_vertices()}, {"seekers", net.seekers()}, {"edges", edges}};
}

inline Json bounds_document(const PenNetwork& net, const RunConfig& cfg) {
  const EdgeWeighting w = default_weights(net);
  Json doc{{"command", "bounds"}, {"network", network_summary(net)}};
  doc["weights"] = Json{{"kind", to_string(w.kind)}, {"per_copy", w.per_copy}, {"multiplicity", w.multiplicity}};
  Json rows = Json::array();
  Json skipped = Json::array();
  rows.push_back(to_json(weakest_cut_bound(net, w)));
  rows.push_back(to_json(partition_bound(net, w)));

  const Vertex reference = cfg.reference.value_or(net.seekers().front());
  if (net.all_seekers()) {
    try {
      rows.push_back(to_json(devetak_winter_bound(net, reference)));
    } catch (const InputError& e) {
      if (cfg.reference) throw;
      skipped.push_back(Json{{"kind", "devetak_winter"}, {"reason", e.what()}});
    }
  } else {
    skipped.push_back(Json{{"kind", "devetak_winter"}, {"reason", "only defined when every vertex is a seeker"}});
  }
  if (net.is_tree()) {
    rows.push_back(to_json(tree_exact_rate(net, w)));
  } else {
    skipped.push_back(Json{{"kind", "tree_exact"}, {"reason", "network graph is not a tree"}});
  }
  doc["bounds"] = rows;
  doc["skipped"] = skipped;
  return doc;
}

inline Json simulate_document(const PenNetwork& net, const RunConfig& cfg) {
  if (cfg.rounds < 1) throw InputError("--rounds must be >= 1");
  const TreePacking packing = pack_trees_integer(net, cfg.rounds);
  const KeyTranscript tr = simulate_conference_key(net, packing, cfg.seed);

  std::vector<KeyTranscript> runs;
  const CounterRng rng(cfg.seed);
  for (std::size_t i = 0; i < cfg.audit_trials; ++i) {
    runs.push_back(simulate_conference_key(net, packing, rng(0xA0D17, i)));
  }
  AuditReport audit = audit_secrecy(tr);
  const AuditReport stats = audit_secrecy(std::span<const KeyTranscript>(runs));
  audit.uncorrelated = stats.uncorrelated;
  audit.max_abs_correlation = stats.max_abs_correlation;
  audit.threshold = stats.threshold;
  audit.trials = stats.trials;
  for (const auto& v : stats.violations) audit.violations.push_back(v);
  audit.pads_single_use = audit.pads_single_use && stats.pads_single_use;
  audit.seekers_agree = audit.seekers_agree && stats.seekers_agree;

  const BoundReport bound = partition_bound(net, default_weights(net));
  const double bits = static_cast<double>(tr.trees.size());
  const double rate = bits / cfg.rounds;

  Json doc{{"command", "simulate"}, {"network", network_summary(net)}};
  doc["rounds"] = tr.rounds;
  doc["seed"] = tr.seed;
  Json trees = Json::array();
  for (const auto& t : tr.trees) {
    Json tree = Json::array();
    for (const TreeEdge& te : t) tree.push_back(Json{{"edge", te.edge}, {"copy", te.copy}});
    trees.push_back(tree);
  }
  doc["trees"] = trees;
  Json ann = Json::array();
  for (const Announcement& a : tr.announcements) {
    ann.push_back(Json{{"tree", a.tree}, {"announcer", a.announcer}, {"receiver", a.receiver},
                       {"edge", a.pad.edge}, {"copy", a.pad.copy}, {"bit", a.bit}});
  }
  doc["announcements"] = ann;
  Json keys = Json::object();
  for (const auto& [s, k] : tr.conference_keys) keys[std::to_string(s)] = bits_to_hex(k);
  doc["keys"] = keys;
  doc["conference_bits"] = tr.trees.size();
  doc["achieved_rate"] = rate;
  doc["partition_bound"] = bound.value;
  doc["gap"] = bound.value - rate;
  doc["audit"] = Json{{"passed", audit.passed()},
                      {"pads_single_use", audit.pads_single_use},
                      {"seekers_agree", audit.seekers_agree},
                      {"uncorrelated", audit.uncorrelated ? Json(*audit.uncorrelated) : Json(nullptr)},
                      {"trials", audit.trials},
                      {"max_abs_correlation", audit.max_abs_correlation},
                      {"threshold", audit.threshold},
                      {"violations", audit.violations}};
  return doc;
}

inline Json verify_gme_document(const PenNetwork& net, const RunConfig& cfg) {
  Json doc{{"command", "verify-gme"}, {"network", network_summary(net)}};
  bool ok = true;

  const gme::IdentityReport id = gme::verify_gme_identity(net, {cfg.samples, cfg.seed, 1e-8});
  ok = ok && id.passed();
  doc["identity"] = Json{{"passed", id.passed()},
                         {"weakest_cut", id.weakest_cut},
                         {"relative_entropy", id.relative_entropy},
                         {"method", id.method},
                         {"cut", id.cut},
                         {"side", id.side},
                         {"samples", id.samples},
                         {"min_sampled", id.min_sampled},
                         {"counterexamples", id.counterexamples},
                         {"result", id.counterexamples.empty() ? "no counterexample found"
                                                               : "counterexample found"}};

  try {
    const gme::DerivativeReport d = gme::directional_derivative_check(net, cfg.trials, {cfg.seed, 1e-6, 1e-9});
    ok = ok && d.passed();
    doc["derivative"] = Json{{"passed", d.passed()},
                             {"cut", d.cut},
                             {"trials", d.trials},
                             {"max_abs_one_minus_fprime", d.max_abs_one_minus_fprime},
                             {"max_discrepancy", d.max_discrepancy},
                             {"counterexamples", d.counterexamples}};
  } catch (const LimitError& e) {
    doc["derivative"] = Json{{"skipped", e.what()}};
  }

  try {
    check_partition_limit(net.n_vertices(), kDefaultBruteForceLimit);
    std::size_t count = 0;
    double worst = 0.0;
    Json failures = Json::array();
    for (const Partition& p : enumerate_proper_partitions(net.n_vertices(), net.seekers())) {
      const auto r = gme::total_correlation_check(net, p);
      ++count;
      worst = std::max(worst, std::abs(r.total_correlation - r.cross_entropy));
      if (!r.passed()) failures.push_back(to_json(p));
    }
    ok = ok && failures.empty();
    doc["total_correlation"] = Json{{"passed", failures.empty()},
                                    {"partitions", count},
                                    {"max_deviation", worst},
                                    {"failures", failures}};
  } catch (const LimitError& e) {
    doc["total_correlation"] = Json{{"skipped", e.what()}};
  }
  doc["passed"] = ok;
  return doc;
}

inline Json correlators_json(const bb84::CorrelatorSet& c) {
  return Json{{"xxx", c.xxx}, {"zab", c.zab}, {"zac", c.zac}, {"zb", c.zb}, {"zc", c.zc}};
}

inline Json bb84_document(const RunConfig& cfg) {
  Json doc{{"command", "bb84"}};
  if (!cfg.correlators.empty()) {
    if (cfg.correlators.size() != 5) throw InputError("--correlators takes xxx,zab,zac,zb,zc");
    const bb84::CorrelatorSet c{cfg.correlators[0], cfg.correlators[1], cfg.correlators[2],
                                cfg.correlators[3], cfg.correlators[4]};
    const double rate = bb84::bb84_rate(c);
    const auto f = bb84::pen3_feasible(c);
    doc["mode"] = "evaluate";
    doc["correlators"] = correlators_json(c);
    doc["rate"] = rate;
    doc["no_key"] = rate <= 0.0;
    doc["pen3_feasible"] = f.feasible;
    doc["inflation_slack"] = f.inflation_slack;
    doc["combined_slack"] = f.combined_slack;
    doc["flag"] = f.feasible ? "feasible in PEN-3" : "infeasible in PEN-3";
    return doc;
  }
  bb84::CeilingOptions opt;
  opt.resolution = cfg.resolution;
  if (!cfg.xxx_range.empty()) {
    if (cfg.xxx_range.size() != 2) throw InputError("--xxx-range takes min,max");
    opt.xxx_min = cfg.xxx_range[0];
    opt.xxx_max = cfg.xxx_range[1];
  }
  const auto res = bb84::bb84_ceiling_search(opt);
  doc["mode"] = "ceiling";
  doc["resolution"] = opt.resolution;
  doc["xxx_range"] = {opt.xxx_min, opt.xxx_max};
  doc["rate"] = res.rate;
  doc["argmax"] = correlators_json(res.argmax);
  doc["reference"] = 1.0 - binary_entropy(0.25);
  doc["no_key"] = res.rate <= 0.0;
  return doc;
}

inline Json report_document(const PenNetwork& net, const RunConfig& cfg) {
  Json doc{{"command", "report"}, {"network", network_summary(net)}};
  doc["bounds"] = bounds_document(net, cfg)["bounds"];
  auto section = [&](const char* name, auto&& build) {
    try {
      Json j = build();
      j.erase("command");
      j.erase("network");
      doc[name] = std::move(j);
    } catch (const LimitError& e) {
      doc[name] = Json{{"skipped", e.what()}};
    }
  };
  section("simulate", [&] { return simulate_document(net, cfg); });
  section("verify_gme", [&] { return verify_gme_document(net, cfg); });
  return doc;
}

// ---------------------------------------------------------------------------
// Document -> text

namespace detail {

inline std::string num(const Json& j) {
  if (j.is_null()) return "-";
  if (j.is_boolean()) return j.get<bool>() ? "yes" : "no";
  if (j.is_number_integer() || j.is_number_unsigned()) return j.dump();
  if (j.is_number()) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", j.get<double>());
    return buf;
  }
  if (j.is_string()) return j.get<std::string>();
  return j.dump();
}

inline std::string witness_text(const Json& w) {
  if (w.is_null()) return "-";
  const std::string type = w["type"];
  if (type == "cut") return "side " + w["side"].dump() + ", edges " + w["edges"].dump();
  if (type == "partition") return "blocks " + w["blocks"].dump();
  if (type == "edge") return "edge " + w["edge"].dump();
  return "vertex " + w["vertex"].dump();
}

inline void render_bounds(const Json& rows, std::ostream& out) {
  char line[256];
  std::snprintf(line, sizeof line, "%-16s %-12s %-8s %s\n", "bound", "value", "exact", "witness");
  out << line;
  for (const Json& r : rows) {
    std::snprintf(line, sizeof line, "%-16s %-12s %-8s ", num(r["kind"]).c_str(), num(r["value"]).c_str(),
                  num(r["exact"]).c_str());
    out << line << witness_text(r["witness"]) << "\n";
    if (!r["packing_crosscheck"].is_null())
      out << "  tree-packing cross-check: " << num(r["packing_crosscheck"]) << "\n";
    for (const Json& n : r["notes"]) out << "  note: " << n.get<std::string>() << "\n";
  }
}

inline void render_simulate(const Json& d, std::ostream& out) {
  out << "rounds " << d["rounds"] << ", seed " << d["seed"] << ", trees " << d["trees"].size() << "\n";
  for (const auto& [s, k] : d["keys"].items()) out << "  key[" << s << "] = " << k.get<std::string>() << "\n";
  out << "conference bits: " << d["conference_bits"] << "\n";
  out << "achieved rate:   " << num(d["achieved_rate"]) << "\n";
  out << "partition bound: " << num(d["partition_bound"]) << "\n";
  out << "gap:             " << num(d["gap"]) << "\n";
  const Json& a = d["audit"];
  out << "audit: " << (a["passed"].get<bool>() ? "pass" : "FAIL") << " (pads single-use "
      << num(a["pads_single_use"]) << ", seekers agree " << num(a["seekers_agree"])
      << ", max |corr| " << num(a["max_abs_correlation"]) << " <= " << num(a["threshold"]) << " over "
      << a["trials"] << " trials)\n";
  for (const Json& v : a["violations"]) out << "  violation: " << v.get<std::string>() << "\n";
}

inline void render_verify(const Json& d, std::ostream& out) {
  const Json& id = d["identity"];
  out << "identity: " << (id["passed"].get<bool>() ? "pass" : "FAIL") << "  D(rho||sigma*) = "
      << num(id["relative_entropy"]) << " (" << num(id["method"]) << "), weakest cut = "
      << num(id["weakest_cut"]) << ", cut edges " << id["cut"].dump() << "\n";
  out << "  biseparable search: " << id["samples"] << " samples, min D = " << num(id["min_sampled"])
      << ", " << id["result"].get<std::string>() << "\n";
  for (const Json& c : id["counterexamples"]) out << "  counterexample: " << c.get<std::string>() << "\n";
  const Json& dv = d["derivative"];
  if (dv.contains("skipped")) {
    out << "derivative: skipped (" << dv["skipped"].get<std::string>() << ")\n";
  } else {
    out << "derivative: " << (dv["passed"].get<bool>() ? "pass" : "FAIL") << "  max |1-f'(0)| = "
        << num(dv["max_abs_one_minus_fprime"]) << ", closed form vs quadrature "
        << dv["max_discrepancy"].get<double>() << " over " << dv["trials"] << " directions\n";
  }
  const Json& tc = d["total_correlation"];
  if (tc.contains("skipped")) {
    out << "total correlation: skipped (" << tc["skipped"].get<std::string>() << ")\n";
  } else {
    out << "total correlation: " << (tc["passed"].get<bool>() ? "pass" : "FAIL") << "  "
        << tc["partitions"] << " proper partitions, max deviation "
        << tc["max_deviation"].get<double>() << "\n";
  }
}

inline void render_correlators(const Json& c, std::ostream& out) {
  out << "xxx=" << num(c["xxx"]) << " zab=" << num(c["zab"]) << " zac=" << num(c["zac"])
      << " zb=" << num(c["zb"]) << " zc=" << num(c["zc"]);
}

inline void render_bb84(const Json& d, std::ostream& out) {
  if (d["mode"] == "evaluate") {
    out << "correlators: ";
    render_correlators(d["correlators"], out);
    out << "\nrate: " << num(d["rate"]) << (d["no_key"].get<bool>() ? " (no key)" : "") << "\n";
    out << d["flag"].get<std::string>() << " (inflation slack " << num(d["inflation_slack"])
        << ", combined slack " << num(d["combined_slack"]) << ")\n";
    return;
  }
  out << "ceiling over PEN-3 correlators: " << num(d["rate"]) << " (1 - h(1/4) = " << num(d["reference"])
      << ")\nargmax: ";
  render_correlators(d["argmax"], out);
  out << "\n";
}

}  // namespace detail

inline void render_human(const Json& d, std::ostream& out) {
  const std::string cmd = d["command"];
  if (d.contains("network")) {
    const Json& n = d["network"];
    out << "network: " << n["n_vertices"] << " vertices, " << n["edges"].size() << " edges, seekers "
        << n["seekers"].dump() << "\n";
  }
  if (cmd == "bounds") {
    detail::render_bounds(d["bounds"], out);
    for (const Json& s : d["skipped"])
      out << "  (" << s["kind"].get<std::string>() << " not applicable: " << s["reason"].get<std::string>() << ")\n";
  } else if (cmd == "simulate") {
    detail::render_simulate(d, out);
  } else if (cmd == "verify-gme") {
    detail::render_verify(d, out);
  } else if (cmd == "bb84") {
    detail::render_bb84(d, out);
  } else if (cmd == "report") {
    out << "\n== bounds\n";
    detail::render_bounds(d["bounds"], out);
    out << "\n== simulate\n";
    if (d["simulate"].contains("skipped")) {
      out << "skipped: " << d["simulate"]["skipped"].get<std::string>() << "\n";
    } else {
      detail::render_simulate(d["simulate"], out);
    }
    out << "\n== verify-gme\n";
    if (d["verify_gme"].contains("skipped")) {
      out << "skipped: " << d["verify_gme"]["skipped"].get<std::string>() << "\n";
    } else {
      detail::render_verify(d["verify_gme"], out);
    }
  }
}

// ---------------------------------------------------------------------------
// Entry point

inline int exit_code_for(const Json& doc) {
  const std::string cmd = doc["command"];
  if (cmd == "simulate") return doc["audit"]["passed"].get<bool>() ? kOk : kCheckFailed;
  if (cmd == "verify-gme") return doc["passed"].get<bool>() ? kOk : kCheckFailed;
  if (cmd == "report") {
    const Json& s = doc["simulate"];
    const Json& v = doc["verify_gme"];
    const bool sim_ok = s.contains("skipped") || s["audit"]["passed"].get<bool>();
    const bool gme_ok = v.contains("skipped") || v["passed"].get<bool>();
    return sim_ok && gme_ok ? kOk : kCheckFailed;
  }
  return kOk;
}

inline Json execute(const RunConfig& cfg) {
  if (cfg.command == "bb84") return bb84_document(cfg);
  if (cfg.network.empty()) throw InputError("--network is required for " + cfg.command);
  PenNetwork net = load_network_file(cfg.network);
  if (!cfg.seekers.empty()) net = net.with_seekers(cfg.seekers);
  if (cfg.command == "bounds") return bounds_document(net, cfg);
  if (cfg.command == "simulate") return simulate_document(net, cfg);
  if (cfg.command == "verify-gme") return verify_gme_document(net, cfg);
  return report_document(net, cfg);
}

/// Runs one command. `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Conference key bounds and protocol simulation for pair-entangled networks", "penkey"};
  app.require_subcommand(1, 1);

  auto add_common = [&](CLI::App* sub, bool needs_network) {
    auto* opt = sub->add_option("--network", cfg.network, "network JSON file");
    if (needs_network) opt->required();
    sub->add_option("--seekers", cfg.seekers, "secrecy-seeking vertices, e.g. 1,2,3")->delimiter(',');
    sub->add_option("--seed", cfg.seed, "64-bit seed (default 0x5EED)");
    sub->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"human", "structured"}));
  };
  auto* bounds = app.add_subcommand("bounds", "every applicable upper bound");
  add_common(bounds, true);
  bounds->add_option("--reference", cfg.reference, "reference vertex for the Devetak-Winter bound");

  auto* simulate = app.add_subcommand("simulate", "tree-packing conference key simulation");
  add_common(simulate, true);
  simulate->add_option("--rounds", cfg.rounds, "rounds of bipartite key generation");
  simulate->add_option("--audit-trials", cfg.audit_trials, "seeded runs for the correlation audit");

  auto* verify = app.add_subcommand("verify-gme", "relative entropy of GME checks (pure edges)");
  add_common(verify, true);
  verify->add_option("--samples", cfg.samples, "random biseparable states");
  verify->add_option("--trials", cfg.trials, "random directions for the derivative check");

  auto* bb = app.add_subcommand("bb84", "three-party BB84 rate and PEN-3 ceiling");
  bb->add_option("--correlators", cfg.correlators, "xxx,zab,zac,zb,zc")->delimiter(',');
  bb->add_option("--resolution", cfg.resolution, "ceiling grid resolution (>= 100)");
  bb->add_option("--xxx-range", cfg.xxx_range, "ceiling search range for xxx, min,max")->delimiter(',');
  bb->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"human", "structured"}));

  auto* report = app.add_subcommand("report", "bounds, simulation and GME checks in one document");
  add_common(report, true);
  report->add_option("--reference", cfg.reference, "reference vertex for the Devetak-Winter bound");
  report->add_option("--rounds", cfg.rounds, "rounds for the simulation section");
  report->add_option("--samples", cfg.samples, "random biseparable states");
  report->add_option("--trials", cfg.trials, "random directions for the derivative check");
  report->add_option("--audit-trials", cfg.audit_trials, "seeded runs for the correlation audit");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  try {
    const Json doc = execute(cfg);
    if (cfg.format == "structured") {
      out << doc.dump(2) << "\n";
    } else {
      render_human(doc, out);
    }
    return exit_code_for(doc);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const LimitError& e) {
    err << "limit: " << e.what() << "\n";
    return kLimitError;
  }
}

}  // namespace penkey::cli
