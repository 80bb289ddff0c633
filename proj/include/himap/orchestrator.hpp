#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "himap/coordinator.hpp"
#include "himap/evaluator.hpp"
#include "himap/executor.hpp"
#include "himap/global_state.hpp"
#include "himap/reward.hpp"

namespace himap {

struct Ablations {
  bool no_monitor = false;
  bool no_coordinator = false;
  bool no_bargaining = false;
  bool no_parallel = false;
};

struct SessionConfig {
  int k_max = 3;
  int P = 3;
  LatencyModel latency{50, 200};
  Ablations ablations;
  std::uint64_t seed = 0;
  ExecutorLimits limits;
  RewardWeights weights;
  BudgetWeights budget_weights;
  double tau = 0.95;
  bool meals_on_travel_days = false;

  /// Throws InvalidArgument unless k_max >= 1 and P >= 1.
  void validate() const;
};

struct PhaseTimings {
  double coordinator_ms = 0;
  double day_planning_ms = 0;
  double bargaining_ms = 0;
  double validation_ms = 0;
  double total_ms = 0;
};

struct IterationRecord {
  MetaPlan plan;
  std::vector<BargainFeedback> feedback;  // days that finished, cancelled ones excluded
  std::vector<DayPlan> day_plans;         // feasible days, in day order
  std::vector<json> traces;
  bool feasible = false;
  double reward = 0;
  double coordinator_objective = 0;
  std::optional<std::string> coordinator_error;
};

struct SessionResult {
  TravelQuery query;
  std::vector<DayPlan> final_plan;
  bool success = false;  // false: best-effort attempt returned after K failures
  int iterations_used = 0;
  std::vector<IterationRecord> per_iteration;
  PhaseTimings timings;
  EvalReport report;
  std::shared_ptr<GlobalState> sigma;
  std::vector<FailedIteration> history;
};

/// The bargaining loop. `sigma` defaults to a fresh monitor over the query
/// budget; `prior` seeds city exclusions. Trajectories go to `buffer` if set.
SessionResult plan(const Database& db, const TravelQuery& q, const Policy& policy, const SessionConfig& cfg,
                   RolloutBuffer* buffer = nullptr, std::shared_ptr<GlobalState> sigma = nullptr,
                   std::span<const FailedIteration> prior = {});

struct ScheduledDay {
  std::optional<DayOutcome> outcome;  // nullopt: never launched
};

/// Runs one executor per context in ceil(D/P) batches. When `cancel_on_infeasible`
/// is set, the first infeasible day stops its batch-mates and no later batch
/// starts. Results are in day order.
std::vector<ScheduledDay> schedule_parallel(const Database& db, std::span<const DayContext> days,
                                            std::span<const SubGoal> trip, GlobalState& sigma,
                                            const Policy& policy, int P, bool cancel_on_infeasible,
                                            const ExecutorLimits& limits = {}, LatencyModel latency = {},
                                            std::uint64_t seed = 0);

/// Batch sizes for D days at concurrency P: (3,3,1) for D=7, P=3.
std::vector<int> batch_sizes(int days, int P);

struct ConstraintUpdate {
  std::optional<HouseRule> house_rule;
  std::optional<std::vector<Cuisine>> cuisines;
  std::optional<RoomRequirement> room_type;
  std::optional<TransportRestriction> transport_restriction;
  std::optional<Money> budget;
  std::optional<int> people;

  [[nodiscard]] TravelQuery apply(TravelQuery q) const;
  [[nodiscard]] bool empty() const;
};

/// Re-plans only when the existing plan no longer passes the updated query.
SessionResult revise(const SessionResult& session, const ConstraintUpdate& update, const Database& db,
                     const Policy& policy, const SessionConfig& cfg, RolloutBuffer* buffer = nullptr);

struct BenchRow {
  std::string query_id;
  PhaseTimings sequential;
  PhaseTimings parallel;
  double day_planning_speedup = 0;
  double total_speedup = 0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  double mean_day_planning_speedup = 0;
  double mean_total_speedup = 0;
  double expected_day_planning_speedup = 0;  // D / ceil(D/P) for the first query
};

/// Each query under P=1 and P=cfg.P with the configured latency.
BenchReport benchmark(const Database& db, std::span<const TravelQuery> queries, const Policy& policy,
                      const SessionConfig& cfg);

}  // namespace himap
