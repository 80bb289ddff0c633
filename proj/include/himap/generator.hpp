#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "himap/database.hpp"
#include "himap/evaluator.hpp"
#include "himap/orchestrator.hpp"

namespace himap {

class InfeasibleTier : public Error {
 public:
  using Error::Error;
};

class NothingToRemove : public Error {
 public:
  using Error::Error;
};

struct Instance {
  TravelQuery query;
  std::vector<DayPlan> reference;  // passes all 13 constraints under `query`
  std::optional<City> trap;        // adversarial instances only
};

struct InstanceSet {
  Database db;
  std::vector<Instance> instances;
  std::uint64_t seed = 0;

  [[nodiscard]] std::vector<TravelQuery> queries() const;
};

struct GeneratorOptions {
  std::vector<int> days{3, 5, 7};
  std::vector<int> cities{1, 2, 3};
  bool nc_per_tag = false;
  std::uint64_t coordinator_seed = 0;  // must match the seed plan() will use
  bool meals_on_travel_days = false;
};

/// Default margin for a tier: 1.5 for easy, 1.2 otherwise.
double default_margin(Tier t);

/// Builds a world and `count` queries whose complexity lies in the tier range.
/// Each budget is ceil(reference cost x margin) in whole dollars.
InstanceSet generate_instances(std::uint64_t seed, int count, Tier tier, double margin,
                               const GeneratorOptions& opts = {});

/// Single-city queries whose cheapest-looking city cannot house the party
/// within budget, while another city of the same state can.
InstanceSet generate_adversarial(std::uint64_t seed, int count, double margin = 1.2,
                                 const GeneratorOptions& opts = {});

enum class FlexShape { local_add, global_add, local_then_global, global_then_local };
std::string_view to_string(FlexShape);
std::optional<FlexShape> parse_flex_shape(std::string_view);

enum class LocalKind { cuisine, room_type, house_rule };
enum class GlobalKind { budget, people };
std::string_view to_string(LocalKind);
std::string_view to_string(GlobalKind);

struct MultiTurnScenario {
  std::string id;
  FlexShape shape = FlexShape::local_add;
  TravelQuery base;
  TravelQuery first;                      // turn 1, stripped
  std::vector<ConstraintUpdate> updates;  // turns 2..n
  std::optional<LocalKind> local_removed;
  std::optional<GlobalKind> global_removed;
  nlohmann::json metadata;

  [[nodiscard]] std::size_t turns() const { return updates.size() + 1; }
  /// Query in force at 1-based turn t.
  [[nodiscard]] TravelQuery query_at(std::size_t t) const;
};

/// Local removals are uniform over the local constraints present; global
/// removals pick budget 60% and people 40% of the time (people falls back to
/// budget for a party of one). A stripped budget is tripled, stripped people
/// become 1.
std::vector<MultiTurnScenario> generate_flex_scenarios(std::span<const TravelQuery> base, std::uint64_t seed,
                                                       FlexShape shape);

}  // namespace himap
