#pragma once

#include <compare>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "himap/money.hpp"

namespace himap {

/// Base of every exception raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Calendar date with day arithmetic. ISO-8601 text form, no timezone.
class Date {
 public:
  Date() = default;
  static std::optional<Date> parse(std::string_view iso);
  static Date from_ymd(int y, unsigned m, unsigned d);

  [[nodiscard]] Date plus_days(int n) const { return Date{serial_ + n}; }
  [[nodiscard]] int days_since(Date other) const { return serial_ - other.serial_; }
  [[nodiscard]] std::string str() const;

  friend auto operator<=>(const Date&, const Date&) = default;

 private:
  explicit Date(int serial) : serial_(serial) {}
  int serial_ = 0;  // days since 1970-01-01
};

/// Time of day "HH:MM".
struct WallTime {
  int minutes = 0;
  static std::optional<WallTime> parse(std::string_view hhmm);
  [[nodiscard]] std::string str() const;
  friend auto operator<=>(const WallTime&, const WallTime&) = default;
};

struct City {
  std::string name;
  std::string state;

  /// Canonical display form "Name(State)".
  [[nodiscard]] std::string display() const { return name + "(" + state + ")"; }
  /// Parses "Name(State)"; the state part must be non-empty.
  static std::optional<City> parse(std::string_view display);

  friend auto operator<=>(const City&, const City&) = default;
};

enum class RoomType { entire_room, private_room, shared_room };
/// What a query may demand; `not_shared` accepts entire and private rooms.
enum class RoomRequirement { entire_room, private_room, shared_room, not_shared };
enum class HouseRule { smoking, parties, children_under_10, visitors, pets };
enum class Cuisine { american, chinese, french, indian, italian, mediterranean, mexican };
enum class TransportMode { flight, self_driving, taxi };
enum class TransportRestriction { no_flight, no_self_driving };

inline constexpr Cuisine kAllCuisines[] = {Cuisine::american,      Cuisine::chinese, Cuisine::french,
                                           Cuisine::indian,        Cuisine::italian,
                                           Cuisine::mediterranean, Cuisine::mexican};
inline constexpr HouseRule kAllHouseRules[] = {HouseRule::smoking, HouseRule::parties,
                                               HouseRule::children_under_10, HouseRule::visitors,
                                               HouseRule::pets};

std::string_view to_string(RoomType);
std::string_view to_string(RoomRequirement);
std::string_view to_string(HouseRule);
std::string_view to_string(Cuisine);
std::string_view to_string(TransportMode);
std::string_view to_string(TransportRestriction);

std::optional<RoomType> parse_room_type(std::string_view);
std::optional<RoomRequirement> parse_room_requirement(std::string_view);
std::optional<HouseRule> parse_house_rule(std::string_view);
std::optional<Cuisine> parse_cuisine(std::string_view);
std::optional<TransportMode> parse_transport_mode(std::string_view);
std::optional<TransportRestriction> parse_transport_restriction(std::string_view);

/// "No smoking" style label for a prohibition.
std::string prohibition_label(HouseRule);

bool satisfies(RoomRequirement, RoomType);

struct Flight {
  std::string flight_number;
  City origin;
  City dest;
  Date date;
  Money price;
  WallTime dep_time;
  WallTime arr_time;
};

struct Accommodation {
  std::string name;
  City city;
  Money price_per_night;
  RoomType room_type = RoomType::entire_room;
  std::set<HouseRule> prohibited;  // "No smoking & No parties" -> {smoking, parties}
  int minimum_nights = 1;
  int maximum_occupancy = 1;

  [[nodiscard]] bool allows(HouseRule r) const { return !prohibited.contains(r); }
};

struct Restaurant {
  std::string name;
  City city;
  Cuisine cuisine = Cuisine::american;
  Money avg_cost;
};

struct Attraction {
  std::string name;
  City city;
};

/// Distance in thousandths of a kilometre so that the truncating fares are
/// computed exactly.
struct DistanceRecord {
  City origin;
  City dest;
  std::int64_t metres = 0;

  [[nodiscard]] double km() const { return static_cast<double>(metres) / 1000.0; }
};

/// Result of distance_search.
struct GroundQuote {
  std::int64_t metres = 0;
  Money taxi_cost;        // floor(km * $1.00)
  Money selfdrive_cost;   // floor(km * $0.05)
};

GroundQuote quote_ground(std::int64_t metres);

/// Structured task tuple of a travel request.
struct TravelQuery {
  std::string id;
  City origin;
  std::string destination;  // a city name or a state name
  Date start_date;
  int days = 3;
  int visiting_city_number = 1;
  int people = 1;
  Money budget;
  std::optional<HouseRule> house_rule;
  std::vector<Cuisine> cuisines;  // sorted, unique
  std::optional<RoomRequirement> room_type;
  std::optional<TransportRestriction> transport_restriction;

  /// Throws InvalidArgument when a domain bound is violated.
  void validate() const;
  [[nodiscard]] Date date_of_day(int day) const { return start_date.plus_days(day - 1); }
};

/// Venue reference in the "Name, City(State)" form.
struct VenueRef {
  std::string name;
  City city;

  [[nodiscard]] std::string display() const { return name + ", " + city.display(); }
  static std::optional<VenueRef> parse(std::string_view text);
  friend auto operator<=>(const VenueRef&, const VenueRef&) = default;
};

/// One day of an itinerary in the string forms the evaluator consumes.
struct DayPlan {
  int day = 0;
  std::string current_city;
  std::string transportation;
  std::string breakfast;
  std::string attraction;
  std::string lunch;
  std::string dinner;
  std::string accommodation;
  Money cost;

  friend bool operator==(const DayPlan&, const DayPlan&) = default;
};

inline constexpr std::string_view kNone = "-";
inline constexpr std::string_view kTaxi = "Taxi";
inline constexpr std::string_view kSelfDriving = "Self-driving";

std::string travel_city_label(const City& from, const City& to);

/// current_city parsed into the leg it describes. Stay days have from == to.
struct DayLeg {
  City from;
  City to;
  bool travel = false;
};
std::optional<DayLeg> parse_current_city(std::string_view text);

/// Splits an attraction field "A, X(S);B, X(S);" into its entries.
std::vector<std::string> split_attractions(std::string_view field);

enum class DayRole { departure, stay, transit, ret };
std::string_view to_string(DayRole);

/// Per-day boundary condition handed to a day executor.
struct SubGoal {
  int day = 1;
  Date date;
  City from_city;
  City to_city;
  DayRole role = DayRole::stay;
  Money budget_hint;
  int people = 1;

  [[nodiscard]] bool is_travel() const { return role != DayRole::stay; }
  /// City of the night that follows this day, if any.
  [[nodiscard]] std::optional<City> overnight_city() const {
    if (role == DayRole::ret) return std::nullopt;
    return to_city;
  }
  friend bool operator==(const SubGoal&, const SubGoal&) = default;
};

enum class ViolationType { budget, time, availability };
std::string_view to_string(ViolationType);

/// Typed executor-to-coordinator feedback.
struct BargainFeedback {
  bool feasible = true;
  Money deficit;
  ViolationType violation_type = ViolationType::availability;
  int day = 0;
  int n_tools_used = 0;
  bool early = false;
  std::string reason;

  friend bool operator==(const BargainFeedback&, const BargainFeedback&) = default;
};

/// Lower-case copy.
std::string to_lower(std::string_view);
std::string trim(std::string_view);

}  // namespace himap
