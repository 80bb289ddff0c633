#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "himap/database.hpp"
#include "support.hpp"

using namespace himap;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("himap_db_" + name + "_" + std::to_string(std::random_device{}()));
  fs::remove_all(p);
  return p;
}

std::size_t rows_in(const fs::path& csv) {
  std::ifstream in(csv);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++n;
  return n - 1;
}

}  // namespace

TEST_CASE("load counts match csv rows") {
  const auto& db = fixture::rockford_db();
  auto dir = fixture::data_dir() / "rockford";
  CHECK(db.cities().size() == rows_in(dir / "cities.csv"));
  CHECK(db.flights().size() == rows_in(dir / "flights.csv"));
  CHECK(db.accommodations().size() == rows_in(dir / "accommodations.csv"));
  CHECK(db.restaurants().size() == rows_in(dir / "restaurants.csv"));
  CHECK(db.attractions().size() == rows_in(dir / "attractions.csv"));
  CHECK(db.distances().size() == rows_in(dir / "distances.csv"));
}

TEST_CASE("trace flight is searchable") {
  const auto& db = fixture::rockford_db();
  auto f = db.flight_search(fixture::stpete(), fixture::rockford(), Date::from_ymd(2022, 3, 16));
  REQUIRE(f.size() >= 1);
  CHECK(f.front().flight_number == "F3573659");
  CHECK(f.front().price == Money::dollars(474));
  CHECK(db.flight_search(fixture::stpete(), fixture::rockford(), Date::from_ymd(2022, 3, 17)).empty());
}

TEST_CASE("schema violations and missing files") {
  auto dir = scratch("bad");
  fs::copy(fixture::data_dir() / "rockford", dir);
  {
    std::ofstream out(dir / "accommodations.csv", std::ios::app);
    out << "Zero Night Place,Rockford,Illinois,50,Private room,,0,2\n";
  }
  try {
    (void)Database::load(dir);
    FAIL("expected SchemaViolation");
  } catch (const SchemaViolation& e) {
    CHECK(e.column == "minimum_nights");
    CHECK(e.file == "accommodations.csv");
  }
  fs::remove(dir / "flights.csv");
  CHECK_THROWS_AS((void)Database::load(dir), MissingFile);
  fs::remove_all(dir);
}

TEST_CASE("city search") {
  const auto& db = fixture::rockford_db();
  auto il = db.city_search("Illinois");
  REQUIRE(il);
  CHECK(il->size() == 7);
  CHECK(std::find(il->begin(), il->end(), fixture::rockford()) != il->end());
  CHECK(std::is_sorted(il->begin(), il->end(), [](auto& a, auto& b) { return a.name < b.name; }));
  CHECK_FALSE(db.city_search("Rockford").has_value());
  CHECK_FALSE(db.city_search("").has_value());
}

TEST_CASE("search results are sorted") {
  const auto& db = fixture::rockford_db();
  auto acc = db.accommodation_search(fixture::rockford(), 1);
  REQUIRE(acc.size() == 13);
  for (std::size_t i = 1; i < acc.size(); ++i) CHECK(acc[i - 1].price_per_night <= acc[i].price_per_night);
  for (const auto& a : db.accommodation_search(fixture::rockford(), 3)) CHECK(a.maximum_occupancy >= 3);
  auto rest = db.restaurant_search(fixture::rockford());
  REQUIRE(rest.size() == 7);
  CHECK(rest.front().name == "Lucha Cantina");
  for (std::size_t i = 1; i < rest.size(); ++i) CHECK(rest[i - 1].avg_cost <= rest[i].avg_cost);
  auto at = db.attraction_search(fixture::rockford());
  for (std::size_t i = 1; i < at.size(); ++i) CHECK(at[i - 1].name < at[i].name);
}

TEST_CASE("distance search") {
  const auto& db = fixture::rockford_db();
  auto q = db.distance_search(fixture::rockford(), {"Chicago", "Illinois"});
  REQUIRE(q);
  CHECK(q->metres == 143200);
  CHECK(q->taxi_cost == Money::dollars(143));
  CHECK(q->selfdrive_cost == Money::dollars(7));
  CHECK_FALSE(db.distance_search(fixture::stpete(), fixture::rockford()).has_value());
}

TEST_CASE("save then load is the identity") {
  auto dir = scratch("roundtrip");
  fixture::rockford_db().save(dir);
  auto again = Database::load(dir);
  CHECK(again == fixture::rockford_db());
  fs::remove_all(dir);
}

TEST_CASE("venue resolution uses canonical names within a city") {
  const auto& db = fixture::rockford_db();
  CHECK(db.resolve_accommodation("private room in a two bedroom apt", fixture::rockford()));
  CHECK(db.resolve_restaurant("LUCHA CANTINA!", fixture::rockford()));
  CHECK_FALSE(db.resolve_restaurant("Lucha Cantina", {"Chicago", "Illinois"}));
  CHECK_FALSE(db.resolve_restaurant("", fixture::rockford()));
}

TEST_CASE("cost of day") {
  const auto& db = fixture::rockford_db();
  auto plan = fixture::rockford_plan();
  CHECK(cost_of_day(db, plan[0], 1) == Money::dollars(684));
  CHECK(cost_of_day(db, fixture::blank_day(1), 1) == Money{});

  // taxi over 100.7 km with two $20 meals for four people
  auto a = fixture::city("Alpha", "Ohio"), b = fixture::city("Beta", "Ohio");
  Database::Builder bld;
  bld.add_city(a).add_city(b);
  bld.add_distance({a, b, 100700});
  bld.add_restaurant({"Noodle Bar", b, Cuisine::chinese, Money::dollars(20)});
  bld.add_restaurant({"Taco Stop", b, Cuisine::mexican, Money::dollars(20)});
  auto small = bld.build();
  auto day = fixture::blank_day(1);
  day.current_city = "from Alpha(Ohio) to Beta(Ohio)";
  day.transportation = "Taxi";
  day.lunch = "Noodle Bar, Beta(Ohio)";
  day.dinner = "Taco Stop, Beta(Ohio)";
  CHECK(cost_of_day(small, day, 4) == Money::dollars(260));
  CHECK(cost_of_day(small, day, 4, {.per_person_transport = true}) == Money::dollars(560));

  day.dinner = "Nowhere, Beta(Ohio)";
  try {
    (void)cost_of_day(small, day, 4);
    FAIL("expected UnknownVenue");
  } catch (const UnknownVenue& e) {
    CHECK(e.field == "dinner");
  }
}

TEST_CASE("builder rejects dangling and duplicate rows") {
  auto a = fixture::city("Alpha", "Ohio");
  Database::Builder b1;
  b1.add_restaurant({"Lost", a, Cuisine::american, Money::dollars(5)});
  CHECK_THROWS_AS((void)b1.build(), InvalidArgument);
}

TEST_CASE("csv quoting") {
  auto rows = parse_csv("a,\"b,c\",\"d \"\"e\"\"\"\n1,2,3\n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0][1] == "b,c");
  CHECK(rows[0][2] == "d \"e\"");
  CHECK(csv_escape("x,y") == "\"x,y\"");
  CHECK(csv_escape("plain") == "plain");
}
