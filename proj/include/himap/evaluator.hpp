#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "himap/database.hpp"
#include "himap/types.hpp"

namespace himap {

enum class Verdict { pass, fail, not_applicable };

struct ConstraintVerdict {
  std::string name;
  Verdict verdict = Verdict::pass;
  std::optional<std::string> reason;  // set iff verdict == fail

  [[nodiscard]] bool counts_as_pass() const { return verdict != Verdict::fail; }
  friend bool operator==(const ConstraintVerdict&, const ConstraintVerdict&) = default;
};

inline constexpr std::array<const char*, 8> kCommonsenseConstraints = {
    "is_not_absent",          "is_valid_information_in_sandbox", "is_valid_information_in_current_city",
    "is_reasonable_visiting_city", "is_valid_restaurants",      "is_valid_attractions",
    "is_valid_transportation",     "is_valid_accommodation"};
inline constexpr std::array<const char*, 5> kHardConstraints = {"valid_cost", "valid_room_rule", "valid_cuisine",
                                                                "valid_room_type", "valid_transportation"};

struct DriftPoint {
  int day = 0;
  Money day_cost;
  Money cumulative;
  Money envelope;     // B_total * d / D
  double ratio = 0;   // day_cost / B_total; the ratios sum to total utilization
  bool within = true; // cumulative <= envelope
};

struct EvalReport {
  std::vector<ConstraintVerdict> verdicts;  // 8 commonsense then 5 hard, in table order
  bool delivered = false;
  bool commonsense_pass = false;
  bool hard_pass = false;
  bool final_pass = false;
  std::optional<Money> total_cost;
  std::vector<DriftPoint> drift;

  [[nodiscard]] const ConstraintVerdict& at(std::string_view name) const;
};

/// Validates a plan against all 13 constraints. Never throws on plan content.
EvalReport evaluate(const Database& db, const TravelQuery& q, std::span<const DayPlan> plans);

struct MetricsSummary {
  std::size_t plans = 0;
  double delivery_rate = 0;
  double commonsense_micro = 0;
  double commonsense_macro = 0;
  double hard_micro = 0;
  double hard_macro = 0;
  double final_pass_rate = 0;
  std::vector<double> per_day_budget_satisfaction;  // by day index
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

MetricsSummary aggregate(std::span<const EvalReport> reports);

/// Local constraints present in the query: one per populated field (house
/// rule, cuisines, room type, transport restriction), or one per cuisine tag
/// when `per_tag` is set.
int local_constraint_count(const TravelQuery& q, bool per_tag = false);

/// D x C x (1 + 0.5 N_c).
double complexity_score(int days, int cities, int n_c);
double complexity_score(const TravelQuery& q, bool per_tag = false);

enum class Tier { easy, medium, hard };
std::string_view to_string(Tier);
std::optional<Tier> parse_tier(std::string_view);
struct TierRange {
  double lo;
  double hi;
};
TierRange tier_range(Tier t);
std::optional<Tier> tier_of(double complexity);

/// Per-day cumulative cost against the proportional envelope B x d / D.
std::vector<DriftPoint> drift_profile(const Database& db, const TravelQuery& q, std::span<const DayPlan> plans);

}  // namespace himap
