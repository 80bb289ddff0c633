#pragma once

#include <map>
#include <optional>
#include <span>
#include <stop_token>
#include <string>
#include <variant>
#include <vector>

#include "himap/coordinator.hpp"
#include "himap/database.hpp"
#include "himap/global_state.hpp"
#include "himap/tools.hpp"

namespace himap {

/// Everything one day executor may know. Built from the meta-plan by the
/// orchestrator; carries no other day's observations.
struct DayContext {
  SubGoal goal;
  TransportMode mode = TransportMode::flight;
  std::optional<HouseRule> house_rule;
  std::optional<RoomRequirement> room_type;
  std::vector<Cuisine> required_cuisines;  // whole-trip requirement
  std::vector<Cuisine> assigned_cuisines;  // the share this day must cover
  int stay_nights = 0;      // length of the stay this day's night belongs to
  int meal_rank = 0;        // index among generic-meal days in the same city
  int attraction_rank = 0;  // index among attraction days in the same city
  bool meals_on_travel_days = false;

  [[nodiscard]] std::optional<City> meal_city() const;
  [[nodiscard]] bool wants_generic_meal() const;
  [[nodiscard]] bool wants_attraction() const;
};

std::vector<DayContext> make_day_contexts(const TravelQuery& q, const MetaPlan& plan,
                                          bool meals_on_travel_days = false);

struct Turn {
  int turn = 0;
  ToolCall call;
  ToolResult result;
};

struct PolicyInput {
  const DayContext& ctx;
  std::span<const Turn> observations;
  const StateSnapshot& sigma;
};

/// A finish request carrying the proposed day plan.
struct DayDraft {
  DayPlan plan;
};

struct GiveUp {
  ViolationType type = ViolationType::availability;
  Money deficit;
  std::string reason;
};

using Decision = std::variant<ToolCall, DayDraft, GiveUp>;

/// Stateless decision rule. Implementations must be safe to call from several
/// executors at once and derive everything from their input.
class Policy {
 public:
  virtual ~Policy() = default;
  [[nodiscard]] virtual Decision decide(const PolicyInput& in) const = 0;
};

/// Cheapest-first baseline: transport, accommodation, required cuisines and
/// one generic meal plus one attraction on stay days.
class GreedyPolicy : public Policy {
 public:
  struct Options {
    /// Book all three meals every day at the cheapest restaurant still
    /// allowed. Produces many duplicate attempts; used for ablation runs.
    bool every_meal = false;
  };
  GreedyPolicy() = default;
  explicit GreedyPolicy(Options o) : opts_(o) {}
  [[nodiscard]] Decision decide(const PolicyInput& in) const override;

 private:
  Options opts_{};
};

/// Pads the inner policy with cost enquiries so that every day issues exactly
/// `calls` tool calls (finish included) when it succeeds first time.
class UniformCallPolicy : public Policy {
 public:
  UniformCallPolicy(const Policy& inner, int calls) : inner_(inner), calls_(calls) {}
  [[nodiscard]] Decision decide(const PolicyInput& in) const override;

 private:
  const Policy& inner_;
  int calls_;
};

struct ExecutorLimits {
  int max_tool_calls = 15;
  int early_window = 5;
  int max_errors = 3;
  ViolationType error_trip = ViolationType::availability;
};

struct DayOutcome {
  std::optional<DayPlan> plan;
  BargainFeedback feedback;
  std::vector<json> trace;
  std::vector<CommitAction> committed;
  bool cancelled = false;
  int errors = 0;
  double r_local = 0.0;  // share of required items committed
};

/// One isolated day-planning loop. Honors `stop` between tool calls.
DayOutcome run_day(const Database& db, const DayContext& ctx, std::span<const SubGoal> trip, GlobalState& sigma,
                   const Policy& policy, const ExecutorLimits& limits = {}, LatencyModel latency = {},
                   std::uint64_t seed = 0, std::stop_token stop = {});

/// {"status","deficit","violation_type","day","n_tools_used","early","reason"}; deficit in cents.
json feedback_to_json(const BargainFeedback& fb);
BargainFeedback feedback_from_json(const json& j);

/// Plan-field view used by cost_enquiry and finish arguments.
json day_plan_arguments(const DayPlan& p, int people);

}  // namespace himap
