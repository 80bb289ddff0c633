#include <doctest.h>

#include <cmath>
#include <numeric>
#include <thread>

#include "himap/reward.hpp"
#include "support.hpp"

using namespace himap;

namespace {

EvalReport report_with(int passing, bool final_pass) {
  EvalReport r;
  r.delivered = true;
  for (int i = 0; i < 13; ++i)
    r.verdicts.push_back({"c" + std::to_string(i), i < passing ? Verdict::pass : Verdict::fail,
                          i < passing ? std::nullopt : std::optional<std::string>("x")});
  r.final_pass = final_pass;
  return r;
}

}  // namespace

TEST_CASE("global reward") {
  CHECK(global_reward(report_with(13, true), Money::dollars(900), Money::dollars(1000)) == doctest::Approx(2.3));
  CHECK(global_reward(report_with(0, false), Money::dollars(1100), Money::dollars(1000)) ==
        doctest::Approx(-0.1));
  CHECK(global_reward(report_with(13, true), Money::dollars(1000), Money::dollars(1000)) == doctest::Approx(2.3));
  // not-applicable verdicts count as satisfied
  auto r = report_with(12, false);
  r.verdicts[12].verdict = Verdict::not_applicable;
  r.verdicts[12].reason.reset();
  CHECK(global_reward(r, {}, Money::dollars(1)) == doctest::Approx(1.3));
}

TEST_CASE("coordinator and executor objectives") {
  CHECK(coordinator_objective(2.3, 1.0, 1) == doctest::Approx(1.94));
  CHECK(coordinator_objective(0, 0, 0) == 0.0);
  CHECK(coordinator_objective(1.0, 0.5, 3) - coordinator_objective(1.0, 0.5, 1) == doctest::Approx(-0.2));
  CHECK(executor_objective(2.3, 1.0, false) == doctest::Approx(1.91));
  CHECK(executor_objective(0, 0, true) == doctest::Approx(0.15));
  CHECK(executor_objective(1, 1, true) - executor_objective(1, 1, false) == doctest::Approx(0.15));
}

TEST_CASE("group advantages") {
  std::vector<double> g{1, 0, 0, 0};
  auto a = grpo_advantages(g);
  REQUIRE(a.size() == 4);
  double sigma = std::sqrt(0.1875);
  CHECK(a[0] == doctest::Approx(0.75 / (sigma + 1e-8)).epsilon(1e-12));
  CHECK(a[0] == doctest::Approx(1.73205).epsilon(1e-5));
  for (int i = 1; i < 4; ++i) CHECK(a[i] == doctest::Approx(-0.57735).epsilon(1e-5));
  CHECK(std::abs(std::accumulate(a.begin(), a.end(), 0.0)) < 1e-12);

  std::vector<double> flat(5, 3.25);
  for (double x : grpo_advantages(flat)) CHECK(x == 0.0);
}

TEST_CASE("extraction reward on the distributed plan") {
  auto q = fixture::rockford_query();
  GlobalState s(q.budget);
  auto p = distribute_task(fixture::rockford_db(), q, s, {}, 0);
  CHECK(extraction_reward(fixture::rockford_db(), q, p) == doctest::Approx(1.0));
  p.sub_goals[1].budget_hint += Money::dollars(1);
  CHECK(extraction_reward(fixture::rockford_db(), q, p) == doctest::Approx(7.0 / 8.0));
}

TEST_CASE("buffer emits role-pure groups of G") {
  RolloutBuffer buf(4);
  std::vector<Batch> out;
  auto sink = [&](const Batch& b) { out.push_back(b); };
  for (int i = 0; i < 3; ++i) buf.push({coordinator_role(), json::array(), double(i), 0}, sink);
  buf.push({day_planner_role(1), json::array(), 5, 0}, sink);
  CHECK(out.empty());
  buf.push({coordinator_role(), json::array(), 3, 0}, sink);
  REQUIRE(out.size() == 1);
  CHECK(out[0].role == coordinator_role());
  CHECK(out[0].trajectories.size() == 4);
  CHECK(out[0].advantages.size() == 4);
  CHECK(buf.occupancy(coordinator_role()) == 0);
  CHECK(buf.occupancy(day_planner_role(1)) == 1);

  auto j = batch_to_json(out[0]);
  CHECK(j["role"] == coordinator_role());
  CHECK(j["group"].size() == 4);

  std::vector<Batch> via_sink;
  buf.set_sink([&](const Batch& b) { via_sink.push_back(b); });
  for (int i = 0; i < 3; ++i) buf.push({day_planner_role(1), json::array(), 1, 0});
  CHECK(via_sink.size() == 1);
}

TEST_CASE("buffer under concurrent pushers") {
  RolloutBuffer buf(4);
  std::atomic<std::size_t> impure{0}, batches{0};
  auto sink = [&](const Batch& b) {
    ++batches;
    for (const auto& t : b.trajectories)
      if (t.role != b.role) ++impure;
  };
  std::vector<std::thread> ts;
  for (int w = 0; w < 4; ++w)
    ts.emplace_back([&, w] {
      for (int i = 0; i < 250; ++i) buf.push({day_planner_role(1 + (i + w) % 3), json::array(), double(i), 0}, sink);
    });
  for (auto& t : ts) t.join();
  auto st = buf.stats();
  CHECK(impure == 0);
  CHECK(st.peak_partition <= 4);
  std::size_t expect = 0;
  for (const auto& [role, n] : st.pushed) {
    expect += n / 4;
    CHECK(st.emitted[role] == n / 4);
  }
  CHECK(batches == expect);
}
