#include <doctest.h>

#include "himap/evaluator.hpp"
#include "oracles/brute_force_checker.hpp"
#include "support.hpp"

using namespace himap;

namespace {

void agree_with_oracle(const TravelQuery& q, const std::vector<DayPlan>& plan) {
  auto r = evaluate(fixture::rockford_db(), q, plan);
  auto o = oracle::check(fixture::rockford_db(), q, plan);
  for (std::size_t i = 0; i < 13; ++i) {
    INFO(r.verdicts[i].name);
    bool na = r.verdicts[i].verdict == Verdict::not_applicable;
    CHECK(na == !o.v[i].has_value());
    if (!na) CHECK((r.verdicts[i].verdict == Verdict::pass) == *o.v[i]);
  }
  CHECK(r.hard_pass == o.hard_pass);
  CHECK(r.final_pass == o.final_pass);
}

}  // namespace

TEST_CASE("the trace plan passes every check") {
  auto q = fixture::rockford_query();
  auto plan = fixture::rockford_plan();
  auto r = evaluate(fixture::rockford_db(), q, plan);
  for (const auto& v : r.verdicts) {
    INFO(v.name);
    CHECK(v.counts_as_pass());
  }
  CHECK(r.final_pass);
  REQUIRE(r.total_cost);
  CHECK(*r.total_cost == Money::dollars(474 + 210 + 12 + 210 + 389));
  CHECK(r.at("valid_cuisine").verdict == Verdict::not_applicable);
  agree_with_oracle(q, plan);
}

TEST_CASE("repeated restaurant") {
  auto q = fixture::rockford_query();
  auto plan = fixture::rockford_plan();
  plan[0].lunch = "Lucha Cantina, Rockford(Illinois)";
  auto r = evaluate(fixture::rockford_db(), q, plan);
  const auto& v = r.at("is_valid_restaurants");
  CHECK(v.verdict == Verdict::fail);
  REQUIRE(v.reason);
  CHECK(v.reason->find("repeated") != std::string::npos);
  CHECK(v.reason->find("day 2 dinner") != std::string::npos);
  CHECK_FALSE(r.final_pass);
  agree_with_oracle(q, plan);
}

TEST_CASE("minimum nights before a city change") {
  auto q = fixture::rockford_query();
  auto plan = fixture::rockford_plan();
  plan[0].accommodation = "Pure Luxury One Bdrm Sofa Bed On Central Park, Rockford(Illinois)";
  auto r = evaluate(fixture::rockford_db(), q, plan);
  CHECK(r.at("is_valid_accommodation").verdict == Verdict::fail);
  plan[1].accommodation = plan[0].accommodation;
  CHECK(evaluate(fixture::rockford_db(), q, plan).at("is_valid_accommodation").verdict == Verdict::pass);
  agree_with_oracle(q, plan);
}

TEST_CASE("hallucinated content voids the hard pass") {
  auto q = fixture::rockford_query();
  auto plan = fixture::rockford_plan();
  plan[1].attraction = "Castle Of Dreams, Rockford(Illinois);";
  auto r = evaluate(fixture::rockford_db(), q, plan);
  CHECK(r.at("is_valid_information_in_sandbox").verdict == Verdict::fail);
  for (const char* h : kHardConstraints) CHECK(r.at(h).counts_as_pass());
  CHECK_FALSE(r.hard_pass);
  CHECK_FALSE(r.final_pass);
  agree_with_oracle(q, plan);

  auto short_plan = fixture::rockford_plan();
  short_plan.pop_back();
  auto r2 = evaluate(fixture::rockford_db(), q, short_plan);
  CHECK(r2.at("is_not_absent").verdict == Verdict::fail);
  CHECK_FALSE(r2.hard_pass);
  agree_with_oracle(q, short_plan);
}

TEST_CASE("hard constraints") {
  auto q = fixture::rockford_query();
  auto plan = fixture::rockford_plan();
  q.house_rule = HouseRule::smoking;
  q.room_type = RoomRequirement::entire_room;
  q.cuisines = {Cuisine::mexican, Cuisine::chinese};
  q.transport_restriction = TransportRestriction::no_flight;
  q.budget = Money::dollars(1294);
  auto r = evaluate(fixture::rockford_db(), q, plan);
  for (const char* h : kHardConstraints) CHECK(r.at(h).verdict == Verdict::fail);
  agree_with_oracle(q, plan);
  q.budget = Money::dollars(1295);
  CHECK(evaluate(fixture::rockford_db(), q, plan).at("valid_cost").verdict == Verdict::pass);
}

TEST_CASE("undelivered plans fail everything") {
  auto r = evaluate(fixture::rockford_db(), fixture::rockford_query(), {});
  CHECK_FALSE(r.delivered);
  CHECK(r.verdicts.size() == 13);
  for (const auto& v : r.verdicts) CHECK(v.verdict == Verdict::fail);
  agree_with_oracle(fixture::rockford_query(), {});
}

TEST_CASE("aggregate counts") {
  auto q = fixture::rockford_query();
  auto good = evaluate(fixture::rockford_db(), q, fixture::rockford_plan());
  auto plan = fixture::rockford_plan();
  plan[0].lunch = plan[1].dinner;
  auto bad = evaluate(fixture::rockford_db(), q, plan);
  std::vector<EvalReport> two{good, bad};
  auto m = aggregate(two);
  CHECK(m.commonsense_macro == doctest::Approx(0.5));
  CHECK(m.commonsense_micro == doctest::Approx(15.0 / 16.0));
  CHECK(m.delivery_rate == 1.0);
  CHECK(m.final_pass_rate == doctest::Approx(0.5));

  std::vector<EvalReport> ones{good, good};
  auto all = aggregate(ones);
  CHECK(all.final_pass_rate == 1.0);
  CHECK(all.hard_micro == 1.0);
  CHECK(all.commonsense_micro == 1.0);
  CHECK_THROWS_AS(aggregate(std::span<const EvalReport>{}), EmptyInput);
}

TEST_CASE("complexity and tiers") {
  CHECK(complexity_score(3, 1, 4) == 9.0);
  CHECK(complexity_score(7, 3, 4) == 63.0);
  CHECK(complexity_score(5, 2, 0) == 10.0);
  CHECK(tier_of(9.0) == Tier::easy);
  CHECK(tier_of(20.0) == Tier::easy);
  CHECK(tier_of(45.0) == Tier::medium);
  CHECK(tier_of(63.0) == Tier::hard);
  CHECK_FALSE(tier_of(8.0).has_value());
  CHECK_FALSE(tier_of(20.05).has_value());
  auto q = fixture::rockford_query();
  q.cuisines = {Cuisine::mexican, Cuisine::chinese};
  q.house_rule = HouseRule::pets;
  CHECK(local_constraint_count(q) == 2);
  CHECK(local_constraint_count(q, true) == 3);
}

TEST_CASE("drift profile") {
  auto q = fixture::rockford_query();
  auto plan = fixture::rockford_plan();
  auto d = drift_profile(fixture::rockford_db(), q, plan);
  REQUIRE(d.size() == 3);
  CHECK(d[0].day_cost == Money::dollars(684));
  CHECK_FALSE(d[0].within);  // 684 > 1700 / 3
  CHECK(d[1].within);
  CHECK(d[2].within);
  double sum = 0;
  for (const auto& p : d) sum += p.ratio;
  CHECK(sum == doctest::Approx(1295.0 / 1700.0));
  CHECK(d[2].cumulative == Money::dollars(1295));

  q.budget = Money::dollars(1000);
  for (const auto& p : drift_profile(fixture::rockford_db(), q, plan)) CHECK_FALSE(p.within);
}
