#include "himap/tools.hpp"

#include <sstream>
#include <thread>

namespace himap {

namespace {

ToolResult fail(std::string msg) { return {false, std::move(msg), json{{"error", msg}}}; }

std::optional<City> city_arg(const Database& db, const json& args, const char* key) {
  if (!args.contains(key) || !args[key].is_string()) return std::nullopt;
  auto s = args[key].get<std::string>();
  if (auto c = City::parse(s); c && db.has_city(*c)) return c;
  auto named = db.cities_named(s);
  if (named.size() == 1) return named.front();
  return std::nullopt;
}

std::string rules_label(const Accommodation& a) {
  if (a.prohibited.empty()) return std::string(kNone);
  std::string out;
  for (auto r : a.prohibited) {
    if (!out.empty()) out += " & ";
    out += prohibition_label(r);
  }
  return out;
}

std::string dollars(Money m) {
  // "$474" when whole, "$12.50" otherwise, as the search tables print it.
  if (m.in_cents() % 100 == 0) return "$" + std::to_string(m.in_cents() / 100);
  return m.str();
}

}  // namespace

json to_json_flight(const Flight& f) {
  return {{"flight_number", f.flight_number}, {"origin", f.origin.display()}, {"dest", f.dest.display()},
          {"date", f.date.str()},            {"price", f.price.in_cents()},   {"dep_time", f.dep_time.str()},
          {"arr_time", f.arr_time.str()}};
}

json to_json_accommodation(const Accommodation& a) {
  json rules = json::array();
  for (auto r : a.prohibited) rules.push_back(std::string(to_string(r)));
  return {{"name", a.name},
          {"city", a.city.display()},
          {"price", a.price_per_night.in_cents()},
          {"room_type", std::string(to_string(a.room_type))},
          {"house_rules", rules},
          {"minimum_nights", a.minimum_nights},
          {"maximum_occupancy", a.maximum_occupancy}};
}

json to_json_restaurant(const Restaurant& r) {
  return {{"name", r.name},
          {"city", r.city.display()},
          {"cuisine", std::string(to_string(r.cuisine))},
          {"avg_cost", r.avg_cost.in_cents()}};
}

ToolBox::ToolBox(const Database& db, const GlobalState& sigma, std::vector<SubGoal> trip, int people,
                 LatencyModel latency, std::uint64_t seed)
    : db_(db), sigma_(sigma), trip_(std::move(trip)), people_(people), latency_(latency), rng_(seed) {}

void ToolBox::simulate_latency() {
  if (latency_.hi_ms <= 0) return;
  int span = latency_.hi_ms - latency_.lo_ms + 1;
  int ms = latency_.lo_ms + (span > 1 ? static_cast<int>(rng_() % static_cast<std::uint64_t>(span)) : 0);
  if (ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(ms));
}

ToolResult ToolBox::invoke(const ToolCall& call) {
  simulate_latency();
  try {
    return dispatch(call);
  } catch (const json::exception& e) {
    return fail("malformed arguments for " + call.name + ": " + e.what());
  }
}

ToolResult ToolBox::dispatch(const ToolCall& call) {
  const json& args = call.arguments;
  std::ostringstream out;

  if (call.name == "city_search") {
    std::string state = args.value("state", std::string{});
    auto cities = db_.city_search(state);
    if (!cities || cities->empty())
      return {true, "No city information found in " + state + ".", json{{"cities", json::array()}}};
    json list = json::array();
    out << "List of cities in " << state << ":\n- ";
    for (std::size_t i = 0; i < cities->size(); ++i) {
      if (i) out << ", ";
      out << (*cities)[i].display();
      list.push_back((*cities)[i].display());
    }
    return {true, out.str(), json{{"cities", list}}};
  }

  if (call.name == "flight_search") {
    auto from = city_arg(db_, args, "depart_city");
    auto to = city_arg(db_, args, "dest_city");
    if (!from || !to) return fail("flight_search: unknown city");
    auto date = Date::parse(args.value("date", std::string{}));
    if (!date) return fail("flight_search: date must be YYYY-MM-DD");
    auto flights = db_.flight_search(*from, *to, *date);
    json list = json::array();
    if (flights.empty()) {
      out << "No flights found from " << from->display() << " to " << to->display() << " on " << date->str() << ".";
    } else {
      out << "Found " << flights.size() << (flights.size() == 1 ? " flight" : " flights") << " from "
          << from->display() << " to " << to->display() << " on " << date->str() << ":";
      for (const auto& f : flights) {
        out << "\nFlightNumber: " << f.flight_number << "\nPrice: " << dollars(f.price)
            << ", DepTime: " << f.dep_time.str() << ", ArrTime: " << f.arr_time.str();
        list.push_back(to_json_flight(f));
      }
    }
    return {true, out.str(), json{{"flights", list}}};
  }

  if (call.name == "distance_search") {
    auto from = city_arg(db_, args, "origin");
    auto to = city_arg(db_, args, "destination");
    if (!from || !to) return fail("distance_search: unknown city");
    auto q = db_.distance_search(*from, *to);
    if (!q) return {true, "No distance information from " + from->display() + " to " + to->display() + ".",
                    json{{"found", false}}};
    out << "Distance from " << from->display() << " to " << to->display() << ": " << static_cast<double>(q->metres) / 1000.0
        << " km\nTaxi: " << dollars(q->taxi_cost) << ", Self-driving: " << dollars(q->selfdrive_cost);
    return {true, out.str(),
            json{{"found", true},
                 {"metres", q->metres},
                 {"taxi_cost", q->taxi_cost.in_cents()},
                 {"selfdrive_cost", q->selfdrive_cost.in_cents()}}};
  }

  if (call.name == "accommodation_search") {
    auto city = city_arg(db_, args, "city");
    if (!city) return fail("accommodation_search: unknown city");
    int people = args.value("people", people_);
    auto all = db_.accommodation_search(*city, people);
    std::optional<int> max_nights;
    if (args.contains("max_minimum_nights")) max_nights = args["max_minimum_nights"].get<int>();
    json list = json::array();
    std::vector<const Accommodation*> shown;
    int filtered = 0;
    for (const auto& a : all) {
      if (max_nights && a.minimum_nights > *max_nights) {
        ++filtered;
        continue;
      }
      shown.push_back(&a);
      list.push_back(to_json_accommodation(a));
    }
    out << "Found " << shown.size() << " accommodations in " << city->display();
    if (max_nights) out << " (MinNights<=" << *max_nights << ")";
    out << ":";
    for (std::size_t i = 0; i < shown.size(); ++i) {
      const auto& a = *shown[i];
      out << "\n" << i + 1 << ". " << a.name << "\n   RoomType: " << to_string(a.room_type)
          << ", Price: " << dollars(a.price_per_night) << "/night, MinimumNights: " << a.minimum_nights
          << ", HouseRules: " << rules_label(a);
    }
    if (filtered) out << "\n\n[Filtered out: " << filtered << " accommodations require longer min stay]";
    return {true, out.str(), json{{"accommodations", list}, {"filtered", filtered}}};
  }

  if (call.name == "restaurant_search") {
    auto city = city_arg(db_, args, "city");
    if (!city) return fail("restaurant_search: unknown city");
    auto rs = db_.restaurant_search(*city);
    json list = json::array();
    out << "Found " << rs.size() << " restaurants in " << city->display() << ":";
    for (std::size_t i = 0; i < rs.size(); ++i) {
      out << "\n" << i + 1 << ". " << rs[i].name << " (" << to_string(rs[i].cuisine)
          << "), Average Cost: " << dollars(rs[i].avg_cost);
      list.push_back(to_json_restaurant(rs[i]));
    }
    return {true, out.str(), json{{"restaurants", list}}};
  }

  if (call.name == "attraction_search") {
    auto city = city_arg(db_, args, "city");
    if (!city) return fail("attraction_search: unknown city");
    auto as = db_.attraction_search(*city);
    json list = json::array();
    out << "Found " << as.size() << " attractions in " << city->display() << ":";
    for (std::size_t i = 0; i < as.size(); ++i) {
      out << "\n" << i + 1 << ". " << as[i].name;
      list.push_back(json{{"name", as[i].name}, {"city", as[i].city.display()}});
    }
    return {true, out.str(), json{{"attractions", list}}};
  }

  if (call.name == "get_remaining_nights") {
    auto city = city_arg(db_, args, "city");
    if (!city) return fail("get_remaining_nights: unknown city");
    int day = args.value("day", 0);
    int n = get_remaining_nights(*city, day, trip_);
    return {true, "You will stay in " + city->display() + " for " + std::to_string(n) + " consecutive nights.",
            json{{"nights", n}}};
  }

  if (call.name == "cost_enquiry") return cost_enquiry(args);

  return fail("unknown tool '" + call.name + "'");
}

ToolResult ToolBox::cost_enquiry(const json& args) {
  DayPlan p;
  p.day = args.value("day", 0);
  p.current_city = args.value("current_city", std::string(kNone));
  p.transportation = args.value("transportation", std::string(kNone));
  p.breakfast = args.value("breakfast", std::string(kNone));
  p.attraction = args.value("attraction", std::string(kNone));
  p.lunch = args.value("lunch", std::string(kNone));
  p.dinner = args.value("dinner", std::string(kNone));
  p.accommodation = args.value("accommodation", std::string(kNone));
  int people = args.value("people_number", people_);
  Money cost;
  try {
    cost = cost_of_day(db_, p, people);
  } catch (const UnknownVenue& e) {
    return fail(std::string("cost_enquiry: ") + e.what());
  }
  Money remaining = sigma_.remaining();
  std::ostringstream out;
  out << "Day " << p.day << ":\n- Current city: " << p.current_city << "\n- Transportation: " << p.transportation
      << "\n- Breakfast: " << p.breakfast << "\n- Lunch: " << p.lunch << "\n- Dinner: " << p.dinner
      << "\n- Attraction: " << p.attraction << "\n- Accommodation: " << p.accommodation
      << "\n- Total cost for the day: " << cost.str() << "\n\n[!] Remaining budget: " << (remaining - cost).str();
  return {true, out.str(),
          json{{"cost", cost.in_cents()}, {"remaining_before", remaining.in_cents()},
               {"remaining_after", (remaining - cost).in_cents()}}};
}

}  // namespace himap
