// himap: generate / plan / eval / bench / ablate / flex

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "himap/evaluator.hpp"
#include "himap/executor.hpp"
#include "himap/generator.hpp"
#include "himap/orchestrator.hpp"
#include "himap/serialization.hpp"

namespace fs = std::filesystem;
using namespace himap;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;

struct Common {
  std::string db;
  std::string queries;
  std::string out = "out";
  std::uint64_t seed = 0;
  int kmax = 3;
  int workers = 3;
  std::string latency = "50:200";
  bool no_monitor = false, no_coordinator = false, no_bargaining = false, no_parallel = false;
  bool dump_state = false;
  bool nc_per_tag = false;
  bool meals_on_travel_days = false;
  bool every_meal = false;
  std::string config;
};

LatencyModel parse_latency(const std::string& s) {
  auto colon = s.find(':');
  try {
    if (colon == std::string::npos) {
      int v = std::stoi(s);
      return {v, v};
    }
    return {std::stoi(s.substr(0, colon)), std::stoi(s.substr(colon + 1))};
  } catch (const std::exception&) {
    throw InvalidArgument("--tool-latency-ms expects LO:HI, got '" + s + "'");
  }
}

// Values from --config fill only the options not given on the command line.
void apply_config(CLI::App& sub, Common& c) {
  if (c.config.empty()) return;
  json j = read_json_file(c.config);
  if (!j.is_object()) throw BadDocument(c.config + ": config must be a JSON object");
  auto unset = [&](const char* flag) { return sub.count(flag) == 0; };
  try {
    if (j.contains("db") && unset("--db")) c.db = j["db"].get<std::string>();
    if (j.contains("queries") && unset("--queries")) c.queries = j["queries"].get<std::string>();
    if (j.contains("out") && unset("--out")) c.out = j["out"].get<std::string>();
    if (j.contains("seed") && unset("--seed") && !std::getenv("HIMAP_SEED")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("kmax") && unset("--kmax")) c.kmax = j["kmax"].get<int>();
    if (j.contains("workers") && unset("--workers")) c.workers = j["workers"].get<int>();
    if (j.contains("tool_latency_ms") && unset("--tool-latency-ms")) c.latency = j["tool_latency_ms"].get<std::string>();
    auto flag = [&](const char* key, const char* name, bool& v) {
      if (j.contains(key) && unset(name)) v = j[key].get<bool>();
    };
    flag("no_monitor", "--no-monitor", c.no_monitor);
    flag("no_coordinator", "--no-coordinator", c.no_coordinator);
    flag("no_bargaining", "--no-bargaining", c.no_bargaining);
    flag("no_parallel", "--no-parallel", c.no_parallel);
    flag("dump_state", "--dump-state", c.dump_state);
    flag("nc_per_tag", "--nc-per-tag", c.nc_per_tag);
    flag("meals_on_travel_days", "--meals-on-travel-days", c.meals_on_travel_days);
  } catch (const json::exception& e) {
    throw BadDocument(c.config + ": " + e.what());
  }
}

SessionConfig session_config(const Common& c) {
  SessionConfig cfg;
  cfg.k_max = c.kmax;
  cfg.P = c.workers;
  cfg.latency = parse_latency(c.latency);
  cfg.seed = c.seed;
  cfg.ablations = {c.no_monitor, c.no_coordinator, c.no_bargaining, c.no_parallel};
  cfg.meals_on_travel_days = c.meals_on_travel_days;
  cfg.validate();
  return cfg;
}

void add_common(CLI::App* sub, Common& c, bool planning) {
  sub->add_option("--db", c.db, "database directory (six CSV files)");
  sub->add_option("--queries", c.queries, "queries.json");
  sub->add_option("--out", c.out, "output directory");
  sub->add_option("--seed", c.seed, "seed")->envname("HIMAP_SEED");
  sub->add_option("--config", c.config, "JSON config file; flags win");
  sub->add_flag("--nc-per-tag", c.nc_per_tag, "count each cuisine tag as a local constraint");
  if (!planning) return;
  sub->add_option("--kmax", c.kmax, "bargaining iterations");
  sub->add_option("--workers", c.workers, "executor concurrency P");
  sub->add_option("--tool-latency-ms", c.latency, "simulated tool latency LO:HI");
  sub->add_flag("--no-monitor", c.no_monitor);
  sub->add_flag("--no-coordinator", c.no_coordinator);
  sub->add_flag("--no-bargaining", c.no_bargaining);
  sub->add_flag("--no-parallel", c.no_parallel);
  sub->add_flag("--dump-state", c.dump_state, "write the final global state per query");
  sub->add_flag("--meals-on-travel-days", c.meals_on_travel_days);
  sub->add_flag("--every-meal", c.every_meal, "stress policy: three meals every day");
}

void require(const std::string& v, const char* flag) {
  if (v.empty()) throw InvalidArgument(std::string(flag) + " is required");
}

std::vector<TravelQuery> load_queries(const std::string& path) {
  json j = read_json_file(path);
  if (!j.is_array()) throw BadDocument(path + ": expected an array of queries");
  std::vector<TravelQuery> qs;
  for (const auto& q : j) qs.push_back(query_from_json(q));
  return qs;
}

void write_text(const fs::path& p, const std::string& s) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw Error("cannot write " + p.string());
  out << s;
}

json manifest(const Common& c, const char* command) {
  return {{"command", command}, {"seed", c.seed}};
}

int cmd_generate(const Common& c, int count, const std::string& tier_s, double margin, bool adversarial,
                 std::vector<int> days) {
  auto tier = parse_tier(tier_s);
  if (!tier) throw InvalidArgument("unknown tier '" + tier_s + "'");
  if (margin <= 0) margin = default_margin(*tier);
  GeneratorOptions opts;
  opts.nc_per_tag = c.nc_per_tag;
  opts.coordinator_seed = c.seed;
  if (!days.empty()) opts.days = days;
  InstanceSet set = adversarial ? generate_adversarial(c.seed, count, margin, opts)
                                : generate_instances(c.seed, count, *tier, margin, opts);
  fs::path out = c.out;
  set.db.save(out / "db");
  json qs = json::array(), refs = json::object();
  for (const auto& i : set.instances) {
    qs.push_back(to_json(i.query));
    refs[i.query.id] = to_json(std::span<const DayPlan>(i.reference));
  }
  write_json_file(out / "queries.json", qs);
  write_json_file(out / "references.json", refs);
  json m = manifest(c, "generate");
  m["count"] = count;
  m["tier"] = adversarial ? "adversarial" : tier_s;
  m["margin"] = margin;
  write_json_file(out / "manifest.json", m);
  std::cout << "wrote " << set.instances.size() << " instances to " << out.string() << "\n";
  return kExitOk;
}

struct RunOutput {
  json plans = json::object();
  json sessions = json::array();
  json timings = json::object();
  std::string traces;
  std::string batches;
  std::vector<EvalReport> reports;
};

RunOutput run_all(const Database& db, const std::vector<TravelQuery>& qs, const Policy& policy,
                  const SessionConfig& cfg, const Common& c, const fs::path& volatile_dir) {
  RunOutput r;
  RolloutBuffer buffer(4);
  buffer.set_sink([&r](const Batch& b) { r.batches += batch_to_json(b).dump() + "\n"; });
  for (const auto& q : qs) {
    auto res = plan(db, q, policy, cfg, &buffer);
    r.plans[q.id] = to_json(std::span<const DayPlan>(res.final_plan));
    r.sessions.push_back(session_report(res, false));
    r.timings[q.id] = timings_json(res.timings);
    for (const auto& it : res.per_iteration)
      for (const auto& t : it.traces) {
        json line = t;
        line["query_id"] = q.id;
        line["iteration"] = it.plan.iteration;
        r.traces += line.dump() + "\n";
      }
    r.reports.push_back(res.report);
    if (c.dump_state) write_json_file(volatile_dir / "state" / (q.id + ".json"), dump_state(*res.sigma));
  }
  return r;
}

int cmd_plan(const Common& c) {
  require(c.db, "--db");
  require(c.queries, "--queries");
  auto cfg = session_config(c);
  Database db = Database::load(c.db);
  auto qs = load_queries(c.queries);
  GreedyPolicy policy(GreedyPolicy::Options{c.every_meal});
  fs::path out = c.out;
  fs::path vol = out / "volatile";
  auto r = run_all(db, qs, policy, cfg, c, vol);
  write_json_file(out / "plans.json", r.plans);
  write_json_file(out / "sessions.json", r.sessions);
  json m = manifest(c, "plan");
  if (!r.reports.empty()) m["summary"] = to_json(aggregate(r.reports));
  write_json_file(out / "manifest.json", m);
  // Parallel executors interleave, so traces and timings are run-dependent.
  write_json_file(vol / "timings.json", r.timings);
  write_text(vol / "traces.jsonl", r.traces);
  write_text(vol / "batches.jsonl", r.batches);
  std::cout << "planned " << qs.size() << " queries\n";
  return kExitOk;
}

int cmd_eval(const Common& c, const std::string& plans_path) {
  require(c.db, "--db");
  require(c.queries, "--queries");
  require(plans_path, "--plans");
  Database db = Database::load(c.db);
  auto qs = load_queries(c.queries);
  json doc;
  bool doc_ok = true;
  try {
    doc = read_json_file(plans_path);
  } catch (const BadDocument& e) {
    std::cerr << "warning: " << e.what() << "\n";
    doc_ok = false;
  }
  json per = json::object();
  std::vector<EvalReport> reports;
  for (const auto& q : qs) {
    std::vector<DayPlan> plans;
    try {
      if (!doc_ok) throw BadDocument("plan file unreadable");
      if (doc.is_array()) plans = plans_from_json(doc);
      else if (doc.is_object() && doc.contains(q.id)) plans = plans_from_json(doc.at(q.id));
      else throw BadDocument("no plan for query " + q.id);
    } catch (const BadDocument& e) {
      std::cerr << "warning: " << q.id << ": " << e.what() << "\n";
      plans.clear();
    }
    auto rep = evaluate(db, q, plans);
    json j = to_json(rep);
    j["complexity"] = complexity_score(q, c.nc_per_tag);
    if (auto t = tier_of(complexity_score(q, c.nc_per_tag))) j["tier"] = to_string(*t);
    per[q.id] = j;
    reports.push_back(std::move(rep));
  }
  json report = {{"seed", c.seed}, {"reports", per}};
  if (!reports.empty()) report["summary"] = to_json(aggregate(reports));
  write_json_file(fs::path(c.out) / "report.json", report);
  if (!reports.empty()) std::cout << "final_pass_rate " << aggregate(reports).final_pass_rate << "\n";
  return kExitOk;
}

int cmd_bench(const Common& c, int calls) {
  require(c.db, "--db");
  require(c.queries, "--queries");
  auto cfg = session_config(c);
  Database db = Database::load(c.db);
  auto qs = load_queries(c.queries);
  GreedyPolicy greedy;
  UniformCallPolicy policy(greedy, calls);
  auto rep = benchmark(db, qs, policy, cfg);
  json rows = json::array();
  for (const auto& r : rep.rows)
    rows.push_back({{"query_id", r.query_id},
                    {"sequential", timings_json(r.sequential)},
                    {"parallel", timings_json(r.parallel)},
                    {"day_planning_speedup", r.day_planning_speedup},
                    {"total_speedup", r.total_speedup}});
  json j = {{"seed", c.seed},
            {"workers", cfg.P},
            {"rows", rows},
            {"mean_day_planning_speedup", rep.mean_day_planning_speedup},
            {"mean_total_speedup", rep.mean_total_speedup},
            {"expected_day_planning_speedup", rep.expected_day_planning_speedup}};
  write_json_file(fs::path(c.out) / "volatile" / "timings.json", j);
  std::cout << "day-phase speedup " << rep.mean_day_planning_speedup << " (expected "
            << rep.expected_day_planning_speedup << ")\n";
  return kExitOk;
}

bool has_repeat(const EvalReport& rep) {
  for (const char* n : {"is_valid_restaurants", "is_valid_attractions"}) {
    const auto& v = rep.at(n);
    if (v.verdict == Verdict::fail && v.reason && v.reason->find("repeated") != std::string::npos) return true;
  }
  return false;
}

int cmd_ablate(const Common& c, std::vector<std::string> which) {
  require(c.db, "--db");
  require(c.queries, "--queries");
  Database db = Database::load(c.db);
  auto qs = load_queries(c.queries);
  if (which.empty()) which = {"full", "no_monitor", "no_coordinator", "no_bargaining", "no_parallel"};
  GreedyPolicy policy(GreedyPolicy::Options{c.every_meal});
  json out = json::object();
  json timings = json::object();
  for (const auto& name : which) {
    Common v = c;
    if (name == "no_monitor") v.no_monitor = true;
    else if (name == "no_coordinator") v.no_coordinator = true;
    else if (name == "no_bargaining") v.no_bargaining = true;
    else if (name == "no_parallel") v.no_parallel = true;
    else if (name != "full") throw InvalidArgument("unknown ablation '" + name + "'");
    auto cfg = session_config(v);
    auto r = run_all(db, qs, policy, cfg, v, fs::path(c.out) / "volatile" / name);
    double iters = 0;
    for (const auto& s : r.sessions) iters += s["iterations"].get<double>();
    std::size_t dup_fail = 0;
    for (const auto& rep : r.reports)
      if (has_repeat(rep)) ++dup_fail;
    json row = r.reports.empty() ? json::object() : to_json(aggregate(r.reports));
    row["mean_iterations"] = qs.empty() ? 0.0 : iters / static_cast<double>(qs.size());
    row["duplicate_failures"] = dup_fail;
    out[name] = row;
    timings[name] = r.timings;
  }
  json doc = {{"seed", c.seed}, {"ablations", out}};
  write_json_file(fs::path(c.out) / "ablation.json", doc);
  write_json_file(fs::path(c.out) / "volatile" / "timings.json", timings);
  std::cout << doc.dump(2) << "\n";
  return kExitOk;
}

int cmd_flex(const Common& c, const std::string& shape_s) {
  require(c.db, "--db");
  require(c.queries, "--queries");
  auto shape = parse_flex_shape(shape_s);
  if (!shape) throw InvalidArgument("unknown shape '" + shape_s + "'");
  auto cfg = session_config(c);
  Database db = Database::load(c.db);
  auto qs = load_queries(c.queries);
  auto scenarios = generate_flex_scenarios(qs, c.seed, *shape);
  GreedyPolicy policy;
  json out = json::array();
  json timings = json::object();
  for (const auto& s : scenarios) {
    json turns = json::array();
    json tt = json::array();
    auto res = plan(db, s.first, policy, cfg);
    for (std::size_t t = 1;; ++t) {
      auto rep = evaluate(db, s.query_at(t), res.final_plan);
      turns.push_back({{"turn", t},
                       {"query", to_json(s.query_at(t))},
                       {"iterations", res.iterations_used},
                       {"final_pass", rep.final_pass},
                       {"plans", to_json(std::span<const DayPlan>(res.final_plan))}});
      tt.push_back(timings_json(res.timings));
      if (t == s.turns()) break;
      res = revise(res, s.updates[t - 1], db, policy, cfg);
    }
    out.push_back({{"scenario", to_json(s)}, {"turns", turns}});
    timings[s.id] = tt;
  }
  write_json_file(fs::path(c.out) / "flex.json", {{"seed", c.seed}, {"scenarios", out}});
  write_json_file(fs::path(c.out) / "volatile" / "timings.json", timings);
  std::cout << "ran " << scenarios.size() << " scenarios\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hierarchical multi-agent travel planning engine"};
  app.require_subcommand(1);
  Common c;

  auto* gen = app.add_subcommand("generate", "synthesize a database and feasible queries");
  add_common(gen, c, false);
  int count = 10;
  std::string tier = "easy";
  double margin = 0;
  bool adversarial = false;
  std::vector<int> days;
  gen->add_option("--count", count);
  gen->add_option("--tier", tier, "easy | medium | hard");
  gen->add_option("--margin", margin, "budget margin (default 1.5 easy, 1.2 otherwise)");
  gen->add_flag("--adversarial", adversarial, "trap-city instances");
  gen->add_option("--days", days, "allowed trip lengths");

  auto* pl = app.add_subcommand("plan", "run the bargaining loop over queries");
  add_common(pl, c, true);

  auto* ev = app.add_subcommand("eval", "evaluate plan files");
  add_common(ev, c, false);
  std::string plans_path;
  ev->add_option("--plans", plans_path, "plans.json: {query_id: [DayPlan]} or one [DayPlan] array");

  auto* be = app.add_subcommand("bench", "sequential vs parallel timing");
  add_common(be, c, true);
  int calls = 8;
  be->add_option("--calls", calls, "tool calls per day");

  auto* ab = app.add_subcommand("ablate", "metrics under ablation settings");
  add_common(ab, c, true);
  std::vector<std::string> which;
  ab->add_option("--only", which, "full no_monitor no_coordinator no_bargaining no_parallel");

  auto* fx = app.add_subcommand("flex", "multi-turn constraint revision scenarios");
  add_common(fx, c, true);
  std::string shape = "local_add";
  fx->add_option("--shape", shape, "local_add | global_add | local_then_global | global_then_local");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    apply_config(*sub, c);
    if (sub == gen) return cmd_generate(c, count, tier, margin, adversarial, days);
    if (sub == pl) return cmd_plan(c);
    if (sub == ev) return cmd_eval(c, plans_path);
    if (sub == be) return cmd_bench(c, calls);
    if (sub == ab) return cmd_ablate(c, which);
    if (sub == fx) return cmd_flex(c, shape);
  } catch (const MissingFile& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const SchemaViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const BadDocument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const NothingToRemove& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InfeasibleTier& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}
