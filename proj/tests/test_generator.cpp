#include <doctest.h>

#include "himap/generator.hpp"
#include "himap/serialization.hpp"
#include "oracles/brute_force_checker.hpp"

using namespace himap;

TEST_CASE("generation is deterministic") {
  auto a = generate_instances(7, 1, Tier::easy, 1.5);
  auto b = generate_instances(7, 1, Tier::easy, 1.5);
  CHECK(a.db == b.db);
  REQUIRE(a.instances.size() == 1);
  CHECK(to_json(a.instances[0].query).dump() == to_json(b.instances[0].query).dump());
  CHECK(to_json(std::span<const DayPlan>(a.instances[0].reference)).dump() ==
        to_json(std::span<const DayPlan>(b.instances[0].reference)).dump());
  auto c = generate_instances(8, 1, Tier::easy, 1.5);
  CHECK(to_json(c.instances[0].query).dump() != to_json(a.instances[0].query).dump());
}

TEST_CASE("tiers stay inside their ranges and references pass") {
  for (auto tier : {Tier::easy, Tier::medium, Tier::hard}) {
    auto set = generate_instances(7, 20, tier, default_margin(tier));
    REQUIRE(set.instances.size() == 20);
    auto range = tier_range(tier);
    for (const auto& inst : set.instances) {
      double c = complexity_score(inst.query);
      CHECK(c >= range.lo);
      CHECK(c <= range.hi);
      CHECK_NOTHROW(inst.query.validate());
      auto r = evaluate(set.db, inst.query, inst.reference);
      CHECK(r.final_pass);
      REQUIRE(r.total_cost);
      CHECK(*r.total_cost <= inst.query.budget);
      // independent re-check of the reference
      auto o = oracle::check(set.db, inst.query, inst.reference);
      CHECK(o.final_pass);
    }
  }
}

TEST_CASE("unreachable tiers and bad arguments") {
  GeneratorOptions only3;
  only3.days = {3};
  CHECK_THROWS_AS(generate_instances(1, 1, Tier::hard, 1.2, only3), InfeasibleTier);
  CHECK_THROWS_AS(generate_instances(1, 0, Tier::easy, 1.5), InvalidArgument);
  CHECK_THROWS_AS(generate_instances(1, 1, Tier::easy, 0.9), InvalidArgument);
}

TEST_CASE("adversarial instances are priced against the trap city") {
  auto set = generate_adversarial(3, 5);
  REQUIRE(set.instances.size() == 5);
  for (const auto& inst : set.instances) {
    REQUIRE(inst.trap);
    CHECK(inst.query.visiting_city_number == 1);
    CHECK(inst.query.budget < Money::dollars(50000));
    auto r = evaluate(set.db, inst.query, inst.reference);
    CHECK(r.final_pass);
    auto first = parse_current_city(inst.reference.front().current_city);
    REQUIRE(first);
    CHECK(first->to != *inst.trap);
  }
}

TEST_CASE("flex scenarios") {
  TravelQuery q;
  q.id = "q";
  q.origin = {"A", "S"};
  q.destination = "T";
  q.start_date = Date::from_ymd(2022, 3, 1);
  q.budget = Money::dollars(900);
  q.cuisines = {Cuisine::mexican};
  TravelQuery one[] = {q};

  auto local = generate_flex_scenarios(one, 1, FlexShape::local_add);
  REQUIRE(local.size() == 1);
  CHECK(local[0].turns() == 2);
  CHECK(local[0].first.cuisines.empty());
  CHECK(local[0].local_removed == LocalKind::cuisine);
  REQUIRE(local[0].updates[0].cuisines);
  CHECK(*local[0].updates[0].cuisines == q.cuisines);
  CHECK(local[0].query_at(2).cuisines == q.cuisines);

  TravelQuery plain = q;
  plain.cuisines.clear();
  TravelQuery none[] = {plain};
  CHECK_THROWS_AS(generate_flex_scenarios(none, 1, FlexShape::local_add), NothingToRemove);

  auto global = generate_flex_scenarios(none, 1, FlexShape::global_add);
  REQUIRE(global.size() == 1);
  CHECK(global[0].global_removed == GlobalKind::budget);  // people == 1 falls back to budget
  CHECK(global[0].first.budget == Money::dollars(2700));
  CHECK(global[0].query_at(2).budget == Money::dollars(900));

  std::vector<TravelQuery> many;
  for (int i = 0; i < 45; ++i) {
    auto x = q;
    x.id = "q" + std::to_string(i);
    x.people = 1 + i % 4;
    if (i % 3 == 0) x.house_rule = HouseRule::pets;
    many.push_back(x);
  }
  auto three = generate_flex_scenarios(many, 5, FlexShape::local_then_global);
  REQUIRE(three.size() == 45);
  for (std::size_t i = 0; i < three.size(); ++i) {
    const auto& s = three[i];
    CHECK(s.turns() == 3);
    REQUIRE(s.local_removed);
    REQUIRE(s.global_removed);
    CHECK(local_constraint_count(s.first) == local_constraint_count(many[i]) - 1);
    bool local_first = s.updates[0].cuisines || s.updates[0].house_rule || s.updates[0].room_type;
    CHECK(local_first);
    CHECK((s.updates[1].budget || s.updates[1].people));
    auto final_q = s.query_at(3);
    CHECK(to_json(final_q).dump() == to_json(many[i]).dump());
  }
  CHECK(parse_flex_shape("global_then_local") == FlexShape::global_then_local);
}
