#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "himap/types.hpp"

namespace himap {

class MissingFile : public Error {
 public:
  explicit MissingFile(const std::filesystem::path& p)
      : Error("missing database file: " + p.string()), path(p) {}
  std::filesystem::path path;
};

class SchemaViolation : public Error {
 public:
  SchemaViolation(std::string file_, std::size_t row_, std::string column_, std::string reason_)
      : Error(file_ + ": row " + std::to_string(row_) + ", column '" + column_ + "': " + reason_),
        file(std::move(file_)),
        row(row_),
        column(std::move(column_)),
        reason(std::move(reason_)) {}
  std::string file;
  std::size_t row;  // 1-based data row (header excluded)
  std::string column;
  std::string reason;
};

class UnknownVenue : public Error {
 public:
  UnknownVenue(std::string name_, std::string field_)
      : Error("unknown venue '" + name_ + "' in field " + field_),
        name(std::move(name_)),
        field(std::move(field_)) {}
  std::string name;
  std::string field;
};

struct CostOptions {
  /// Multiply flight and ground fares by the party size. Off by default: the
  /// day cost formula bills transport once.
  bool per_person_transport = false;
};

/// Immutable travel world. Copies share the same underlying tables, so a
/// Database can be passed by value and read from any number of threads.
class Database {
 public:
  class Builder;

  Database();

  static Database load(const std::filesystem::path& dir);
  void save(const std::filesystem::path& dir) const;

  // Agent-facing search tools. Result orders are total: primary key, then
  // name ascending.

  /// Cities of a state, alphabetical; nullopt when no state has that name.
  [[nodiscard]] std::optional<std::vector<City>> city_search(std::string_view state) const;
  [[nodiscard]] std::vector<Flight> flight_search(const City& origin, const City& dest, Date date) const;
  [[nodiscard]] std::vector<Accommodation> accommodation_search(const City& city, int people) const;
  [[nodiscard]] std::vector<Restaurant> restaurant_search(const City& city) const;
  [[nodiscard]] std::vector<Attraction> attraction_search(const City& city) const;
  [[nodiscard]] std::optional<GroundQuote> distance_search(const City& origin, const City& dest) const;

  // Lookups shared by cost_of_day and the evaluator. Names resolve by exact
  // canonical match first, then by canonical substring containment, always
  // with strict city equality.
  [[nodiscard]] const Flight* find_flight(std::string_view number) const;
  [[nodiscard]] const Restaurant* resolve_restaurant(std::string_view name, const City& city) const;
  [[nodiscard]] const Accommodation* resolve_accommodation(std::string_view name, const City& city) const;
  [[nodiscard]] const Attraction* resolve_attraction(std::string_view name, const City& city) const;

  [[nodiscard]] bool has_city(const City& c) const;
  [[nodiscard]] bool has_state(std::string_view state) const;
  /// Every city whose name equals `name` exactly, across states.
  [[nodiscard]] std::vector<City> cities_named(std::string_view name) const;

  [[nodiscard]] std::span<const City> cities() const;
  [[nodiscard]] std::span<const Flight> flights() const;
  [[nodiscard]] std::span<const Accommodation> accommodations() const;
  [[nodiscard]] std::span<const Restaurant> restaurants() const;
  [[nodiscard]] std::span<const Attraction> attractions() const;
  [[nodiscard]] std::span<const DistanceRecord> distances() const;

  /// Structural equality over all tables.
  friend bool operator==(const Database& a, const Database& b);

 private:
  struct Tables;
  explicit Database(std::shared_ptr<const Tables> t);
  std::shared_ptr<const Tables> t_;
};

/// Accumulates rows and freezes them into a Database. Validates invariants as
/// rows are added.
class Database::Builder {
 public:
  Builder();
  ~Builder();
  Builder(Builder&&) noexcept;
  Builder& operator=(Builder&&) noexcept;

  Builder& add_city(City c);
  Builder& add_flight(Flight f);
  Builder& add_accommodation(Accommodation a);
  Builder& add_restaurant(Restaurant r);
  Builder& add_attraction(Attraction a);
  Builder& add_distance(DistanceRecord d);

  /// Throws InvalidArgument on dangling city references or duplicate keys.
  [[nodiscard]] Database build() const;

 private:
  std::unique_ptr<Tables> t_;
};

/// Cost of one day: transport + people x sum(meals) + accommodation per night.
/// "-" entries contribute nothing; a name that does not resolve throws
/// UnknownVenue naming the offending field.
Money cost_of_day(const Database& db, const DayPlan& plan, int people, CostOptions opts = {});

/// Transport cost of one plan field on the given leg: a flight number is priced
/// from the flight table, "Taxi"/"Self-driving" from the leg's distance record.
/// nullopt when it does not resolve; "-" costs nothing.
std::optional<Money> transport_cost(const Database& db, std::string_view transportation, const DayLeg& leg,
                                    int people, CostOptions opts = {});

/// Minimal RFC 4180 reader used by the loader; exposed for tests.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);
std::string csv_escape(std::string_view field);

}  // namespace himap
