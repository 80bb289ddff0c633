#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "himap/database.hpp"
#include "himap/global_state.hpp"
#include "himap/types.hpp"

namespace himap {

class UnresolvableDestination : public Error {
 public:
  using Error::Error;
};
class MultiCityInSingleCity : public Error {
 public:
  using Error::Error;
};
class NoFeasibleCities : public Error {
 public:
  using Error::Error;
};
class NoTransportAvailable : public Error {
 public:
  using Error::Error;
};

struct MetaPlan {
  std::vector<SubGoal> sub_goals;
  std::vector<City> visiting_cities;
  TransportMode transport_mode = TransportMode::flight;
  int iteration = 1;

  friend bool operator==(const MetaPlan&, const MetaPlan&) = default;
};

/// Relative day weights, in thousandths.
struct BudgetWeights {
  int departure = 700;
  int stay = 1000;
  int transit = 850;
  int ret = 500;

  [[nodiscard]] int of(DayRole r) const;
};

struct CoordinatorOptions {
  BudgetWeights weights;
  /// Flat ablation: uniform hints and round-robin cities, no feedback use.
  bool flat = false;
};

/// One failed bargaining round: the plan that was tried and what came back.
struct FailedIteration {
  MetaPlan plan;
  std::vector<BargainFeedback> feedback;
};

/// Candidate cities for the query's destination. A bare city name that is not
/// a state resolves through the reverse city-to-state index.
std::vector<City> resolve_destination(const Database& db, const TravelQuery& q);

/// Median nightly accommodation price plus people x median restaurant cost,
/// over every venue of the city. Cities lacking either kind score highest.
Money affordability_score(const Database& db, const City& city, int people);

/// Picks C cities, ordered by ascending score. Cities of infeasible days in
/// `history` are excluded and previously failed city lists are never reused.
std::vector<City> select_cities(const Database& db, std::span<const City> candidates, const TravelQuery& q,
                                std::span<const FailedIteration> history, std::uint64_t seed);

/// Route skeleton: D sub-goals with roles, dates and endpoints. Hints are zero.
std::vector<SubGoal> build_route(const TravelQuery& q, std::span<const City> cities);

/// b_d = floor(B x w_d / sum w), remainder cents to the last STAY day (else the
/// last TRANSIT day, else the last day). Sums to B exactly.
std::vector<Money> allocate_budget_hints(Money b_total, std::span<const DayRole> roles,
                                         const BudgetWeights& w = {});

/// Cheapest permitted mode over all travel legs; ties prefer flight, then
/// self-driving, then taxi.
TransportMode select_transport_mode(const Database& db, const TravelQuery& q, std::span<const SubGoal> route);

/// Cheapest quote for one leg under a mode, nullopt when unavailable.
std::optional<Money> leg_cost(const Database& db, const SubGoal& leg, TransportMode mode);

/// Full meta-plan for iteration history.size() + 1. Locks the mode in `sigma`.
MetaPlan distribute_task(const Database& db, const TravelQuery& q, GlobalState& sigma,
                         std::span<const FailedIteration> history, std::uint64_t seed,
                         const CoordinatorOptions& opts = {});

}  // namespace himap
