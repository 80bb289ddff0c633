#include <doctest.h>

#include <algorithm>
#include <random>

#include "himap/coordinator.hpp"
#include "support.hpp"

using namespace himap;

namespace {

TravelQuery illinois(int days, int cities, int people = 1, int budget = 5000) {
  TravelQuery q = fixture::rockford_query();
  q.destination = "Illinois";
  q.days = days;
  q.visiting_city_number = cities;
  q.people = people;
  q.budget = Money::dollars(budget);
  return q;
}

// Median over raw table rows, averaging the middle pair in cents.
std::int64_t median_cents(std::vector<std::int64_t> v) {
  std::sort(v.begin(), v.end());
  auto n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

}  // namespace

TEST_CASE("destination resolution") {
  const auto& db = fixture::rockford_db();
  auto q = fixture::rockford_query();
  auto r = resolve_destination(db, q);
  REQUIRE(r.size() == 1);
  CHECK(r[0] == fixture::rockford());

  CHECK(resolve_destination(db, illinois(5, 2)).size() == 7);

  q.destination = "Atlantis";
  CHECK_THROWS_AS(resolve_destination(db, q), UnresolvableDestination);
  q.destination = "Rockford";
  q.days = 5;
  q.visiting_city_number = 2;
  CHECK_THROWS_AS(resolve_destination(db, q), MultiCityInSingleCity);
}

TEST_CASE("budget hints for the trace budget") {
  std::vector<DayRole> roles{DayRole::departure, DayRole::stay, DayRole::ret};
  auto h = allocate_budget_hints(Money::dollars(1700), roles);
  REQUIRE(h.size() == 3);
  // 170000 * w / 2200, floored; the 2 leftover cents go to the stay day
  CHECK(h[0].in_cents() == 54090);
  CHECK(h[1].in_cents() == 77274);
  CHECK(h[2].in_cents() == 38636);
  DayRole single[] = {DayRole::stay};
  CHECK(allocate_budget_hints(Money::dollars(1700), single)[0] == Money::dollars(1700));
}

TEST_CASE("budget hints conserve the total") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    std::vector<DayRole> roles;
    for (std::size_t n = 1 + rng() % 7; n > 0; --n) roles.push_back(static_cast<DayRole>(rng() % 4));
    auto b = Money::cents(static_cast<std::int64_t>(1 + rng() % 10'000'000));
    auto h = allocate_budget_hints(b, roles);
    Money sum;
    for (auto x : h) {
      CHECK(x >= Money{});
      sum += x;
    }
    CHECK(sum == b);
  }
}

TEST_CASE("route construction") {
  auto q = illinois(7, 3);
  std::vector<City> cs{fixture::rockford(), {"Chicago", "Illinois"}, {"Peoria", "Illinois"}};
  auto r = build_route(q, cs);
  REQUIRE(r.size() == 7);
  CHECK(r.front().role == DayRole::departure);
  CHECK(r.back().role == DayRole::ret);
  CHECK(std::count_if(r.begin(), r.end(), [](auto& g) { return g.role == DayRole::transit; }) == 2);
  for (std::size_t i = 1; i < r.size(); ++i) CHECK(r[i].from_city == r[i - 1].to_city);
  CHECK(r.front().from_city == q.origin);
  CHECK(r.back().to_city == q.origin);
  CHECK(r[6].date.str() == "2022-03-22");
  CHECK_THROWS_AS(build_route(illinois(3, 1), std::vector<City>(3, fixture::rockford())), InvalidArgument);
}

TEST_CASE("affordability score is median room plus people times median meal") {
  const auto& db = fixture::rockford_db();
  for (const auto& c : db.cities()) {
    std::vector<std::int64_t> rooms, meals;
    for (const auto& a : db.accommodations())
      if (a.city == c) rooms.push_back(a.price_per_night.in_cents());
    for (const auto& r : db.restaurants())
      if (r.city == c) meals.push_back(r.avg_cost.in_cents());
    if (rooms.empty() || meals.empty()) continue;
    for (int people : {1, 3}) {
      CHECK(affordability_score(db, c, people).in_cents() == median_cents(rooms) + people * median_cents(meals));
    }
  }
  CHECK(affordability_score(db, fixture::rockford(), 1) == Money::dollars(232));
}

TEST_CASE("city selection picks the cheapest score and honours history") {
  const auto& db = fixture::rockford_db();
  auto q = illinois(3, 1);
  auto cand = resolve_destination(db, q);
  auto pick = select_cities(db, cand, q, {}, 0);
  REQUIRE(pick.size() == 1);
  Money best = affordability_score(db, pick[0], 1);
  for (const auto& c : cand) CHECK(affordability_score(db, c, 1) >= best);

  FailedIteration failed;
  failed.plan.visiting_cities = pick;
  failed.plan.sub_goals = build_route(q, pick);
  BargainFeedback fb;
  fb.feasible = false;
  fb.day = 2;
  failed.feedback.push_back(fb);
  auto next = select_cities(db, cand, q, std::span(&failed, 1), 0);
  REQUIRE(next.size() == 1);
  CHECK(next[0] != pick[0]);

  City only[] = {fixture::rockford()};
  CHECK(select_cities(db, only, q, {}, 0)[0] == fixture::rockford());
  FailedIteration rock;
  rock.plan.visiting_cities = {fixture::rockford()};
  CHECK_THROWS_AS(select_cities(db, only, q, std::span(&rock, 1), 0), NoFeasibleCities);
}

TEST_CASE("feasible feedback does not exclude a city") {
  const auto& db = fixture::rockford_db();
  auto q = illinois(5, 2);
  auto cand = resolve_destination(db, q);
  auto first = select_cities(db, cand, q, {}, 3);
  FailedIteration it;
  it.plan.visiting_cities = first;
  it.plan.sub_goals = build_route(q, first);
  BargainFeedback ok;
  ok.day = 1;
  BargainFeedback bad;
  bad.feasible = false;
  bad.day = 4;  // second city's night
  it.feedback = {ok, bad};
  auto next = select_cities(db, cand, q, std::span(&it, 1), 3);
  CHECK(std::find(next.begin(), next.end(), first[1]) == next.end());
  CHECK(next != first);
}

TEST_CASE("transport mode selection") {
  auto a = fixture::city("Alpha", "Ohio"), b = fixture::city("Beta", "Ohio");
  Database::Builder bld;
  bld.add_city(a).add_city(b);
  bld.add_distance({a, b, 1'800'000});
  bld.add_flight({"F1", a, b, Date::from_ymd(2022, 3, 1), Money::dollars(474), {}, {}});
  bld.add_flight({"F2", b, a, Date::from_ymd(2022, 3, 3), Money::dollars(474), {}, {}});
  auto db = bld.build();
  TravelQuery q;
  q.origin = a;
  q.destination = "Beta";
  q.start_date = Date::from_ymd(2022, 3, 1);
  q.budget = Money::dollars(3000);
  std::vector<City> cs{b};
  auto route = build_route(q, cs);
  // flight 948 vs self-driving 90 x 2 vs taxi 1800 x 2
  CHECK(select_transport_mode(db, q, route) == TransportMode::self_driving);
  q.transport_restriction = TransportRestriction::no_self_driving;
  CHECK(select_transport_mode(db, q, route) == TransportMode::flight);
  q.transport_restriction = TransportRestriction::no_flight;
  CHECK(select_transport_mode(db, q, route) == TransportMode::self_driving);

  auto rq = fixture::rockford_query();
  rq.transport_restriction = TransportRestriction::no_flight;
  std::vector<City> rc{fixture::rockford()};
  CHECK_THROWS_AS(select_transport_mode(fixture::rockford_db(), rq, build_route(rq, rc)), NoTransportAvailable);
}

TEST_CASE("distribute task on the trace query") {
  const auto& db = fixture::rockford_db();
  auto q = fixture::rockford_query();
  GlobalState s(q.budget);
  auto p = distribute_task(db, q, s, {}, 0);
  REQUIRE(p.sub_goals.size() == 3);
  CHECK(p.sub_goals[0].role == DayRole::departure);
  CHECK(p.sub_goals[0].from_city == fixture::stpete());
  CHECK(p.sub_goals[0].to_city == fixture::rockford());
  CHECK(p.sub_goals[1].role == DayRole::stay);
  CHECK(p.sub_goals[2].role == DayRole::ret);
  CHECK(p.transport_mode == TransportMode::flight);
  CHECK(s.view()->m_trans == TransportMode::flight);
  CHECK(p.iteration == 1);
  Money sum;
  for (auto& g : p.sub_goals) sum += g.budget_hint;
  CHECK(sum == q.budget);

  GlobalState s2(q.budget);
  CHECK(distribute_task(db, q, s2, {}, 0) == p);
}

TEST_CASE("bargaining keeps the total and changes the city") {
  const auto& db = fixture::rockford_db();
  auto q = illinois(3, 1, 1, 1700);
  GlobalState s(q.budget);
  auto p1 = distribute_task(db, q, s, {}, 9);
  FailedIteration f{p1, {}};
  BargainFeedback fb;
  fb.feasible = false;
  fb.day = 2;
  f.feedback.push_back(fb);
  GlobalState s2(q.budget);
  auto p2 = distribute_task(db, q, s2, std::span(&f, 1), 9);
  CHECK(p2.iteration == 2);
  CHECK(p2.visiting_cities != p1.visiting_cities);
  Money sum;
  for (auto& g : p2.sub_goals) sum += g.budget_hint;
  CHECK(sum == q.budget);
}

TEST_CASE("flat coordinator") {
  const auto& db = fixture::rockford_db();
  auto q = fixture::rockford_query();
  GlobalState s(q.budget);
  auto p = distribute_task(db, q, s, {}, 0, {.flat = true});
  CHECK(p.visiting_cities[0] == fixture::rockford());
  CHECK(p.sub_goals[0].budget_hint.in_cents() == 56666);
  CHECK(p.sub_goals[1].budget_hint.in_cents() == 56666);
  CHECK(p.sub_goals[2].budget_hint.in_cents() == 56668);
}
