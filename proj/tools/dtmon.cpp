// dtmon: validate properties, precompute verdict sets, simulate and inspect
// distributed monitors.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dtmon/automaton.hpp"
#include "dtmon/error.hpp"
#include "dtmon/io.hpp"
#include "dtmon/monitor.hpp"
#include "dtmon/oracle.hpp"
#include "dtmon/simulator.hpp"

using namespace dtmon;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kValidation = 2, kAssumption = 3, kResource = 4 };

struct Config {
  std::string property_path;
  std::string name;
  std::string scenario_path;
  std::string trace_dir;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> skew;
  std::optional<Ticks> resolution;
  std::size_t cap = kDefaultEnumerationCap;
  int threads = 1;
  bool summary = false;
  bool allow_non_absorbing = false;
  bool auto_complete = false;
  bool no_cache = false;
  int monitor = 1;
  std::optional<double> at;
  std::optional<double> at_frontier;
};

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

/// Named automaton documents in the file: either one automaton or
/// {"properties": {name: automaton, ...}}.
std::vector<std::pair<std::string, json>> property_documents(const Config& cfg) {
  const json doc = read_json(cfg.property_path);
  std::vector<std::pair<std::string, json>> out;
  if (doc.contains("properties")) {
    for (const auto& [name, sub] : doc.at("properties").items())
      if (cfg.name.empty() || cfg.name == name) out.emplace_back(name, sub);
  } else if (cfg.name.empty() || cfg.name == fs::path(cfg.property_path).stem().string()) {
    out.emplace_back(fs::path(cfg.property_path).stem().string(), doc);
  }
  if (out.empty()) throw ValidationError("no property named '" + cfg.name + "' in " + cfg.property_path);
  if (cfg.resolution)
    for (auto& [name, d] : out) d["resolution"] = *cfg.resolution;
  return out;
}

std::pair<std::string, json> single_document(const Config& cfg) {
  auto docs = property_documents(cfg);
  if (docs.size() != 1) throw ValidationError("the document holds several properties; pick one with --name");
  return docs.front();
}

LoadOptions load_options(const Config& cfg) {
  LoadOptions o;
  o.allow_non_absorbing = cfg.allow_non_absorbing;
  o.auto_complete = cfg.auto_complete;
  return o;
}

std::string document_hash(const json& doc, const Config& cfg) {
  return sha256_hex(doc.dump() + (cfg.allow_non_absorbing ? "|nonabsorbing" : "") +
                    (cfg.auto_complete ? "|complete" : ""));
}

fs::path sidecar_path(const Config& cfg, const std::string& name) {
  return fs::path(cfg.property_path).string() + "." + name + ".sets.json";
}

/// Loads the automaton and its sets, reusing a matching sidecar cache.
std::shared_ptr<const Property> load_property(const Config& cfg, std::string* hash_out = nullptr) {
  auto [name, doc] = single_document(cfg);
  std::vector<std::string> warnings;
  TimedAutomaton ta = load_automaton(doc, load_options(cfg), &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  const std::string hash = document_hash(doc, cfg);
  if (hash_out) *hash_out = hash;
  const auto side = sidecar_path(cfg, name);
  if (!cfg.no_cache && fs::exists(side)) {
    std::ifstream in(side);
    try {
      if (auto sets = property_sets_from_json(json::parse(in), ta, hash))
        return std::make_shared<const Property>(Property{std::move(ta), std::move(*sets)});
      std::cerr << "note: " << side.string() << " is stale, recomputing\n";
    } catch (const json::parse_error&) {
      std::cerr << "note: " << side.string() << " is unreadable, recomputing\n";
    }
  }
  return make_property(std::move(ta));
}

std::optional<std::uint64_t> seed_of(const Config& cfg) {
  if (cfg.seed) return cfg.seed;
  if (const char* env = std::getenv("DTMON_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ValidationError(std::string("DTMON_SEED is not a number: ") + env);
    }
  }
  return std::nullopt;
}

Scenario load_run_scenario(const Config& cfg, const Alphabet& alphabet) {
  if (cfg.scenario_path.empty()) throw ValidationError("--scenario is required");
  json doc = read_json(cfg.scenario_path);
  if (cfg.resolution) doc["resolution"] = *cfg.resolution;
  if (cfg.skew) doc["skew"] = *cfg.skew;
  return load_scenario(doc, alphabet, seed_of(cfg));
}

void print_summary(const SimTrace& trace, Ticks resolution) {
  std::printf("%-8s %-8s %-10s %s\n", "monitor", "verdict", "tmin1", "definitive at");
  for (const auto& m : trace.summary)
    std::printf("%-8d %-8s %-10s %s\n", m.monitor, to_string(m.verdict).c_str(),
                format_ticks(m.tmin1, resolution).c_str(),
                m.definitive_at ? format_ticks(*m.definitive_at, resolution).c_str() : "-");
}

int emit_run(const Config& cfg, const Scenario& s, const std::shared_ptr<const Property>& property,
             const std::string& property_hash, const std::string& command) {
  RunOptions options;
  options.threads = cfg.threads;
  options.cap = cfg.cap;
  SimTrace trace = run(s, property, options);
  trace.config_hash = sha256_hex(property_hash + scenario_to_json(s).dump());
  if (!cfg.out_dir.empty()) {
    write_trace(cfg.out_dir, trace,
                {{"command", command}, {"seed", s.seed}, {"resolution", s.resolution}, {"skew", s.skew}});
  } else {
    for (const auto& r : trace.timeline) std::cout << to_json(r).dump() << "\n";
  }
  if (cfg.summary) print_summary(trace, s.resolution);
  return kOk;
}

// --- subcommands -----------------------------------------------------------------

int cmd_validate(const Config& cfg) {
  for (const auto& [name, doc] : property_documents(cfg)) {
    std::vector<std::string> warnings;
    const auto ta = load_automaton(doc, load_options(cfg), &warnings);
    std::printf("%s: %zu locations, %zu clocks, %zu actions, %s\n", name.c_str(), ta.location_count(),
                ta.clock_count(), ta.alphabet().actions().size(),
                ta.mode() == PropertyMode::Absorbing ? "absorbing" : "never-only");
    for (const auto& w : warnings) std::printf("  warning: %s\n", w.c_str());
  }
  return kOk;
}

int cmd_precompute(const Config& cfg) {
  for (const auto& [name, doc] : property_documents(cfg)) {
    const auto ta = load_automaton(doc, load_options(cfg));
    const auto sets = precompute(ta);
    const auto side = sidecar_path(cfg, name);
    std::ofstream(side) << property_sets_to_json(sets, document_hash(doc, cfg)).dump(1) << "\n";
    std::printf("%s -> %s\n", name.c_str(), side.string().c_str());
  }
  return kOk;
}

int cmd_simulate(const Config& cfg) {
  std::string hash;
  const auto property = load_property(cfg, &hash);
  const auto s = load_run_scenario(cfg, property->automaton.alphabet());
  return emit_run(cfg, s, property, hash, "simulate");
}

int cmd_replay(const Config& cfg) {
  std::string hash;
  const auto property = load_property(cfg, &hash);
  const auto base = load_run_scenario(cfg, property->automaton.alphabet());
  if (cfg.trace_dir.empty()) throw ValidationError("--trace is required");
  const auto s = scenario_from_trace(cfg.trace_dir, base, property->automaton.alphabet());
  return emit_run(cfg, s, property, hash, "replay");
}

/// Reruns the scenario and compares every monitor against brute force.
int cmd_oracle_check(const Config& cfg) {
  const auto property = load_property(cfg);
  const auto& ta = property->automaton;
  const auto s = load_run_scenario(cfg, ta.alphabet());
  const auto n = s.components.size() + 1;
  std::vector<TimedWord> collected(n);
  std::vector<std::vector<std::pair<ApproxTimedWord, Ticks>>> updates(n);
  RunOptions options;
  options.cap = cfg.cap;
  options.observer = [&](const Delivery& d, const Message& msg, const Monitor& m,
                         const std::optional<TimelineRecord>& rec) {
    const auto i = static_cast<std::size_t>(d.dst);
    if (m.terminated() && !rec) return;
    for (const auto& a : msg.actions) collected[i].events.push_back({a, msg.timestamp});
    std::stable_sort(collected[i].events.begin(), collected[i].events.end(),
                     [](const Event& x, const Event& y) { return x.date < y.date; });
    if (rec) updates[i].push_back({approximate(collected[i], s.skew), m.frontier()});
  };
  const auto trace = run(s, property, options);
  oracle::RegionOracle regions(ta);
  int failures = 0;
  for (const auto& m : trace.summary) {
    const auto& ups = updates[static_cast<std::size_t>(m.monitor)];
    const Verdict want = oracle::naive_verdict(ta, regions, ups);
    std::size_t outside = 0;
    for (const auto& [word, T] : ups) {
      const auto prefix = restrict(trace.global_trace, TimeInterval::closed(0, T));
      const auto options_at = oracle::naive_restrict(word, T);
      if (std::none_of(options_at.begin(), options_at.end(),
                       [&](const auto& v) { return oracle::naive_unordered_member(v, prefix); }))
        ++outside;
    }
    const bool ok = want == m.verdict && outside == 0;
    failures += ok ? 0 : 1;
    std::printf("M%d: monitor %s, oracle %s, %zu updates, %zu with the true prefix outside: %s\n", m.monitor,
                to_string(m.verdict).c_str(), to_string(want).c_str(), ups.size(), outside, ok ? "ok" : "MISMATCH");
  }
  return failures == 0 ? kOk : kCheckFailed;
}

void print_cs(const TimedAutomaton& ta, const Cs& cs) {
  std::set<ApproxTimedWord> shapes;
  for (const auto& e : cs) shapes.insert(e.remainder);
  std::printf("%zu entries, %zu distinct remainders\n", cs.size(), shapes.size());
  for (std::size_t k = 0; k < cs.size(); ++k) {
    std::printf("entry %zu\n  remainder: %s\n", k, to_string(cs[k].remainder).c_str());
    std::printf("  configs:   %s\n", cs[k].configs.to_string(ta).c_str());
  }
}

/// CS of one monitor at a local time; --at-frontier rebuilds it at a chosen
/// frontier from the events collected by then.
int cmd_explain(const Config& cfg) {
  const auto property = load_property(cfg);
  const auto& ta = property->automaton;
  const auto s = load_run_scenario(cfg, ta.alphabet());
  if (cfg.monitor < 1 || static_cast<std::size_t>(cfg.monitor) > s.components.size())
    throw ValidationError("--monitor out of range");
  const Ticks at = cfg.at ? to_ticks(*cfg.at, s.resolution) : std::numeric_limits<Ticks>::max();
  TimedWord collected;
  std::optional<Cs> cs;
  std::optional<JTmin> jtmin;
  Ticks frontier = 0;
  Verdict verdict = Verdict::Pending;
  RunOptions options;
  options.cap = cfg.cap;
  options.observer = [&](const Delivery& d, const Message& msg, const Monitor& m, const std::optional<TimelineRecord>&) {
    if (d.dst != cfg.monitor || d.local_time > at) return;
    for (const auto& a : msg.actions) collected.events.push_back({a, msg.timestamp});
    cs = m.cs();
    jtmin = m.jtmin();
    frontier = m.frontier();
    verdict = m.verdict();
  };
  run(s, property, options);
  if (!jtmin) {
    std::printf("M%d received nothing by then\n", cfg.monitor);
    return kOk;
  }
  std::stable_sort(collected.events.begin(), collected.events.end(),
                   [](const Event& x, const Event& y) { return x.date < y.date; });
  std::printf("M%d collected: %s\njtmin:", cfg.monitor, to_string(collected).c_str());
  for (const auto& e : jtmin->entries())
    std::printf(" (%d,%s)", e.monitor, format_ticks(e.timestamp, s.resolution).c_str());
  std::printf("\ntmin1: %s\n", format_ticks(jtmin->tmin1(), s.resolution).c_str());
  if (cfg.at_frontier) {
    const Ticks T = to_ticks(*cfg.at_frontier, s.resolution);
    const Cs rebuilt = cs_next(ta, cs_add_events(initial_cs(ta), approximate(collected, s.skew)), T, cfg.cap);
    std::printf("frontier: %s (requested)\n", format_ticks(T, s.resolution).c_str());
    print_cs(ta, rebuilt);
    return kOk;
  }
  std::printf("frontier: %s\nverdict: %s\n", format_ticks(frontier, s.resolution).c_str(),
              to_string(verdict).c_str());
  print_cs(ta, *cs);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed monitoring of timed reachability properties under clock skew"};
  app.require_subcommand(1);
  Config cfg;

  auto add_property = [&](CLI::App* sub) {
    sub->add_option("--property", cfg.property_path, "automaton JSON document")->required()->check(CLI::ExistingFile);
    sub->add_option("--name", cfg.name, "property to use from a multi-property document");
    sub->add_option("--resolution", cfg.resolution, "ticks per time unit (overrides the documents)");
    sub->add_flag("--allow-non-absorbing", cfg.allow_non_absorbing, "monitor bad prefixes only when F is not absorbing");
    sub->add_flag("--auto-complete", cfg.auto_complete, "route missing guards to a sink location");
  };
  auto add_run = [&](CLI::App* sub) {
    add_property(sub);
    sub->add_option("--scenario", cfg.scenario_path, "scenario JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", cfg.seed, "overrides the scenario seed (fallback: DTMON_SEED)");
    sub->add_option("--skew", cfg.skew, "clock skew bound in time units");
    sub->add_option("--cap-decomp", cfg.cap, "limit on enumerated decompositions");
    sub->add_flag("--no-cache", cfg.no_cache, "ignore precomputed sidecar files");
  };

  auto* validate = app.add_subcommand("validate", "check automaton documents");
  add_property(validate);
  auto* pre = app.add_subcommand("precompute", "write Inev/Never sets next to the document");
  add_property(pre);
  auto* simulate = app.add_subcommand("simulate", "run a scenario and write the trace");
  add_run(simulate);
  auto* replay = app.add_subcommand("replay", "rerun a recorded trace directory");
  add_run(replay);
  replay->add_option("--trace", cfg.trace_dir, "directory written by simulate")->required()->check(CLI::ExistingDirectory);
  auto* check = app.add_subcommand("oracle-check", "compare monitors against brute force on a small scenario");
  add_run(check);
  auto* explain = app.add_subcommand("explain", "print a monitor's configuration structure");
  add_run(explain);
  explain->add_option("--monitor", cfg.monitor, "monitor index (1-based)");
  explain->add_option("--at", cfg.at, "local time of the monitor");
  explain->add_option("--at-frontier", cfg.at_frontier, "rebuild the structure at this frontier");
  for (auto* sub : {simulate, replay}) {
    sub->add_option("--out", cfg.out_dir, "output directory (default: timeline on stdout)");
    sub->add_option("--threads", cfg.threads, "monitor threads")->check(CLI::PositiveNumber);
    sub->add_flag("--summary", cfg.summary, "print a per-monitor verdict table");
  }

  CLI11_PARSE(app, argc, argv);
  try {
    if (*validate) return cmd_validate(cfg);
    if (*pre) return cmd_precompute(cfg);
    if (*simulate) return cmd_simulate(cfg);
    if (*replay) return cmd_replay(cfg);
    if (*check) return cmd_oracle_check(cfg);
    if (*explain) return cmd_explain(cfg);
  } catch (const AssumptionViolation& e) {
    std::cerr << "assumption violated (" << e.assumption() << "): " << e.what() << "\n";
    return kAssumption;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kValidation;
  } catch (const ResourceLimit& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return kResource;
  } catch (const json::exception& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kValidation;
  }
  return kOk;
}
