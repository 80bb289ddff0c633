#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "himap/coordinator.hpp"
#include "himap/database.hpp"
#include "himap/serialization.hpp"
#include "himap/types.hpp"

namespace fixture {

inline std::filesystem::path data_dir() { return HIMAP_TEST_DATA; }

inline const himap::Database& rockford_db() {
  static const himap::Database db = himap::Database::load(data_dir() / "rockford");
  return db;
}

inline himap::TravelQuery rockford_query() {
  auto j = himap::read_json_file(data_dir() / "rockford_query.json");
  return himap::query_from_json(j.at(0));
}

inline std::vector<himap::DayPlan> rockford_plan() {
  return himap::plans_from_json(himap::read_json_file(data_dir() / "rockford_trace_plan.json"));
}

inline himap::City city(const std::string& name, const std::string& state) { return {name, state}; }
inline himap::City rockford() { return {"Rockford", "Illinois"}; }
inline himap::City stpete() { return {"St. Petersburg", "Florida"}; }

inline himap::DayPlan blank_day(int day) {
  himap::DayPlan p;
  p.day = day;
  p.current_city = "-";
  p.transportation = p.breakfast = p.attraction = p.lunch = p.dinner = p.accommodation = "-";
  return p;
}

// Sub-goals for a trip over the given overnight cities, one entry per night.
inline std::vector<himap::SubGoal> trip_over(const himap::City& home, const std::vector<himap::City>& nights) {
  std::vector<himap::SubGoal> out;
  himap::City at = home;
  auto start = himap::Date::from_ymd(2022, 3, 16);
  for (std::size_t i = 0; i <= nights.size(); ++i) {
    himap::SubGoal g;
    g.day = static_cast<int>(i) + 1;
    g.date = start.plus_days(static_cast<int>(i));
    g.from_city = at;
    g.to_city = i < nights.size() ? nights[i] : home;
    if (i == 0) g.role = himap::DayRole::departure;
    else if (i == nights.size()) g.role = himap::DayRole::ret;
    else g.role = g.from_city == g.to_city ? himap::DayRole::stay : himap::DayRole::transit;
    at = g.to_city;
    out.push_back(g);
  }
  return out;
}

}  // namespace fixture
