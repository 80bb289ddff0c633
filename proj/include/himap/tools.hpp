#pragma once

#include <chrono>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "himap/database.hpp"
#include "himap/global_state.hpp"

namespace himap {

using json = nlohmann::json;

struct ToolCall {
  std::string name;
  json arguments = json::object();
};

struct ToolResult {
  bool ok = true;
  std::string text;  // what an LLM would read
  json data;         // the same content, structured
};

/// Simulated per-call latency, uniform in [lo, hi] milliseconds.
struct LatencyModel {
  int lo_ms = 0;
  int hi_ms = 0;
};

/// Names of the day-planner tools, in table order. `finish` is handled by the
/// executor itself.
inline constexpr const char* kToolNames[] = {"city_search",        "flight_search",        "distance_search",
                                             "accommodation_search", "restaurant_search",  "attraction_search",
                                             "cost_enquiry",       "get_remaining_nights", "finish"};

/// Tool surface seen by one day executor: the database plus read-only views
/// of the global state and this day's trip skeleton.
class ToolBox {
 public:
  ToolBox(const Database& db, const GlobalState& sigma, std::vector<SubGoal> trip, int people,
          LatencyModel latency = {}, std::uint64_t seed = 0);

  /// Runs one search/enquiry tool, sleeping for the simulated latency first.
  /// Unknown tools and bad arguments produce ok=false results, never throw.
  ToolResult invoke(const ToolCall& call);

  /// Sleeps for one sampled latency (used for `finish`, which also counts as a call).
  void simulate_latency();

  [[nodiscard]] const Database& db() const { return db_; }

 private:
  ToolResult dispatch(const ToolCall& call);
  ToolResult cost_enquiry(const json& args);

  const Database& db_;
  const GlobalState& sigma_;
  std::vector<SubGoal> trip_;
  int people_;
  LatencyModel latency_;
  std::mt19937_64 rng_;
};

json to_json_flight(const Flight& f);
json to_json_accommodation(const Accommodation& a);
json to_json_restaurant(const Restaurant& r);

}  // namespace himap
