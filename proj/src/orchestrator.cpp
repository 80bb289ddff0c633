#include "himap/orchestrator.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <thread>

namespace himap {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

DayOutcome crashed(const DayContext& ctx, const std::string& what) {
  DayOutcome o;
  o.feedback = BargainFeedback{false, Money{}, ViolationType::availability, ctx.goal.day, 0, true, what};
  return o;
}

}  // namespace

void SessionConfig::validate() const {
  if (k_max < 1) throw InvalidArgument("K_max must be >= 1");
  if (P < 1) throw InvalidArgument("P must be >= 1");
  if (latency.lo_ms < 0 || latency.hi_ms < latency.lo_ms) throw InvalidArgument("latency range must be 0 <= LO <= HI");
}

std::vector<int> batch_sizes(int days, int P) {
  if (P < 1) throw InvalidArgument("P must be >= 1");
  std::vector<int> out;
  for (int left = days; left > 0; left -= P) out.push_back(std::min(left, P));
  return out;
}

std::vector<ScheduledDay> schedule_parallel(const Database& db, std::span<const DayContext> days,
                                            std::span<const SubGoal> trip, GlobalState& sigma,
                                            const Policy& policy, int P, bool cancel_on_infeasible,
                                            const ExecutorLimits& limits, LatencyModel latency,
                                            std::uint64_t seed) {
  std::vector<ScheduledDay> out(days.size());
  std::size_t next = 0;
  for (int size : batch_sizes(static_cast<int>(days.size()), P)) {
    std::stop_source stop;
    const std::size_t begin = next;
    next += static_cast<std::size_t>(size);
    auto run_one = [&, seed](std::size_t i) {
      const auto& ctx = days[i];
      try {
        out[i].outcome = run_day(db, ctx, trip, sigma, policy, limits, latency,
                                 mix(seed ^ (static_cast<std::uint64_t>(ctx.goal.day) << 32)), stop.get_token());
      } catch (const std::exception& e) {
        out[i].outcome = crashed(ctx, std::string("executor error: ") + e.what());
      }
      const auto& o = *out[i].outcome;
      if (cancel_on_infeasible && !o.feedback.feasible && !o.cancelled) stop.request_stop();
    };
    if (size == 1) {
      run_one(begin);
    } else {
      std::vector<std::jthread> workers;
      workers.reserve(static_cast<std::size_t>(size));
      for (std::size_t i = begin; i < next; ++i) workers.emplace_back(run_one, i);
    }
    bool failed = false;
    for (std::size_t i = begin; i < next; ++i)
      failed = failed || (out[i].outcome && !out[i].outcome->feedback.feasible);
    if (failed && cancel_on_infeasible) break;
  }
  return out;
}

SessionResult plan(const Database& db, const TravelQuery& q, const Policy& policy, const SessionConfig& cfg,
                   RolloutBuffer* buffer, std::shared_ptr<GlobalState> sigma, std::span<const FailedIteration> prior) {
  cfg.validate();
  q.validate();
  const auto t_start = Clock::now();
  SessionResult res;
  res.query = q;
  if (!sigma) {
    GlobalStateOptions so;
    so.tau = cfg.tau;
    so.enforcing = !cfg.ablations.no_monitor;
    sigma = std::make_shared<GlobalState>(q.budget, so);
  }
  res.sigma = sigma;
  res.history.assign(prior.begin(), prior.end());

  CoordinatorOptions copts;
  copts.weights = cfg.budget_weights;
  copts.flat = cfg.ablations.no_coordinator;
  const int P = cfg.ablations.no_parallel ? 1 : cfg.P;
  const int K = cfg.ablations.no_bargaining ? 1 : cfg.k_max;

  for (int k = 1; k <= K; ++k) {
    const auto t_iter = Clock::now();
    IterationRecord rec;
    res.iterations_used = k;

    // Checkpoint first so that the mode lock written by distribution is undone
    // together with the commits.
    sigma->checkpoint();
    try {
      std::vector<FailedIteration> hist = res.history;
      if (copts.flat) hist.resize(static_cast<std::size_t>(k - 1));  // round-robin index tracks iterations
      rec.plan = distribute_task(db, q, *sigma, hist, cfg.seed, copts);
      rec.plan.iteration = k;
    } catch (const Error& e) {
      sigma->rollback();
      rec.coordinator_error = e.what();
      rec.reward = -std::numeric_limits<double>::infinity();
      if (k == 1) res.timings.coordinator_ms = ms_since(t_iter);
      else res.timings.bargaining_ms += ms_since(t_iter);
      res.per_iteration.push_back(std::move(rec));
      break;
    }
    if (k == 1) res.timings.coordinator_ms = ms_since(t_iter);

    const auto t_days = Clock::now();
    auto contexts = make_day_contexts(q, rec.plan, cfg.meals_on_travel_days);
    auto scheduled = schedule_parallel(db, contexts, rec.plan.sub_goals, *sigma, policy, P, true, cfg.limits,
                                       cfg.latency, mix(cfg.seed + static_cast<std::uint64_t>(k)));
    if (k == 1) res.timings.day_planning_ms = ms_since(t_days);

    rec.feasible = true;
    std::vector<const DayOutcome*> finished;
    for (const auto& s : scheduled) {
      if (!s.outcome) {
        rec.feasible = false;
        continue;
      }
      const auto& o = *s.outcome;
      if (!o.feedback.feasible) rec.feasible = false;
      if (o.cancelled) continue;
      finished.push_back(&o);
      rec.feedback.push_back(o.feedback);
      if (o.plan) rec.day_plans.push_back(*o.plan);
      for (const auto& t : o.trace) rec.traces.push_back(t);
    }

    EvalReport report = evaluate(db, q, rec.day_plans);
    if (!rec.feasible) report.final_pass = false;
    const Money b_used = sigma->view()->b_used;
    rec.reward = global_reward(report, b_used, q.budget, cfg.weights);
    double r_extract = extraction_reward(db, q, rec.plan);
    rec.coordinator_objective = coordinator_objective(rec.reward, r_extract, k, cfg.weights);

    if (buffer) {
      json coord_trace = json::array();
      coord_trace.push_back({{"iteration", k}, {"cities", rec.plan.visiting_cities.size()}});
      buffer->push(Trajectory{coordinator_role(), coord_trace, rec.coordinator_objective, 0});
      for (const auto* o : finished)
        buffer->push(Trajectory{day_planner_role(o->feedback.day), json(o->trace),
                                executor_objective(rec.reward, o->r_local, o->feedback.early, cfg.weights), 0});
    }

    if (rec.feasible) {
      sigma->release_checkpoint();
      res.success = true;
      res.final_plan = rec.day_plans;
    } else {
      sigma->rollback();
      res.history.push_back(FailedIteration{rec.plan, rec.feedback});
    }
    if (k > 1) res.timings.bargaining_ms += ms_since(t_iter);
    res.per_iteration.push_back(std::move(rec));
    if (res.success) break;
  }

  if (!res.success) {
    const IterationRecord* best = nullptr;
    for (const auto& r : res.per_iteration)
      if (!r.coordinator_error && (!best || r.reward > best->reward)) best = &r;
    if (best) res.final_plan = best->day_plans;
  }

  const auto t_val = Clock::now();
  res.report = evaluate(db, q, res.final_plan);
  res.timings.validation_ms = ms_since(t_val);
  res.timings.total_ms = ms_since(t_start);
  return res;
}

TravelQuery ConstraintUpdate::apply(TravelQuery q) const {
  if (house_rule) q.house_rule = house_rule;
  if (cuisines) {
    q.cuisines = *cuisines;
    std::sort(q.cuisines.begin(), q.cuisines.end());
    q.cuisines.erase(std::unique(q.cuisines.begin(), q.cuisines.end()), q.cuisines.end());
  }
  if (room_type) q.room_type = room_type;
  if (transport_restriction) q.transport_restriction = transport_restriction;
  if (budget) q.budget = *budget;
  if (people) q.people = *people;
  return q;
}

bool ConstraintUpdate::empty() const {
  return !house_rule && !cuisines && !room_type && !transport_restriction && !budget && !people;
}

SessionResult revise(const SessionResult& session, const ConstraintUpdate& update, const Database& db,
                     const Policy& policy, const SessionConfig& cfg, RolloutBuffer* buffer) {
  TravelQuery next = update.apply(session.query);
  next.validate();
  const auto t0 = Clock::now();
  if (session.sigma) session.sigma->checkpoint();
  EvalReport check = evaluate(db, next, session.final_plan);
  if (session.success && check.final_pass) {
    if (session.sigma) session.sigma->release_checkpoint();
    SessionResult same = session;
    same.query = next;
    same.report = check;
    same.iterations_used = 0;
    same.per_iteration.clear();
    same.timings = PhaseTimings{};
    same.timings.validation_ms = same.timings.total_ms = ms_since(t0);
    return same;
  }
  if (session.sigma) session.sigma->rollback();

  GlobalStateOptions so;
  so.tau = cfg.tau;
  so.enforcing = !cfg.ablations.no_monitor;
  auto fresh = std::make_shared<GlobalState>(next.budget, so);
  return plan(db, next, policy, cfg, buffer, fresh, session.history);
}

BenchReport benchmark(const Database& db, std::span<const TravelQuery> queries, const Policy& policy,
                      const SessionConfig& cfg) {
  BenchReport rep;
  double sum_day = 0, sum_total = 0;
  for (const auto& q : queries) {
    SessionConfig seq = cfg;
    seq.P = 1;
    seq.ablations.no_parallel = false;
    SessionConfig par = cfg;
    par.ablations.no_parallel = false;
    BenchRow row;
    row.query_id = q.id;
    row.sequential = plan(db, q, policy, seq).timings;
    row.parallel = plan(db, q, policy, par).timings;
    row.day_planning_speedup =
        row.parallel.day_planning_ms > 0 ? row.sequential.day_planning_ms / row.parallel.day_planning_ms : 0.0;
    row.total_speedup = row.parallel.total_ms > 0 ? row.sequential.total_ms / row.parallel.total_ms : 0.0;
    sum_day += row.day_planning_speedup;
    sum_total += row.total_speedup;
    rep.rows.push_back(std::move(row));
  }
  if (!rep.rows.empty()) {
    rep.mean_day_planning_speedup = sum_day / static_cast<double>(rep.rows.size());
    rep.mean_total_speedup = sum_total / static_cast<double>(rep.rows.size());
    const int D = queries.front().days;
    rep.expected_day_planning_speedup =
        static_cast<double>(D) / static_cast<double>(batch_sizes(D, cfg.P).size());
  }
  return rep;
}

}  // namespace himap
