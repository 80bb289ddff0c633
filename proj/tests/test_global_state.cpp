#include <doctest.h>

#include <barrier>
#include <random>
#include <thread>

#include "himap/canonical.hpp"
#include "himap/global_state.hpp"
#include "support.hpp"

using namespace himap;

namespace {

// Textbook full-matrix edit distance.
std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] != b[j - 1])});
  return d[a.size()][b.size()];
}

CommitAction meal(int day, const std::string& name, int dollars) {
  return make_action(day, CommitKind::meal, name, Money::dollars(dollars), fixture::rockford());
}

}  // namespace

TEST_CASE("levenshtein agrees with a full-matrix computation") {
  std::mt19937_64 rng(5);
  std::string alpha = "abc ";
  for (int i = 0; i < 500; ++i) {
    std::string a, b;
    for (std::size_t k = rng() % 9; k > 0; --k) a += alpha[rng() % alpha.size()];
    for (std::size_t k = rng() % 9; k > 0; --k) b += alpha[rng() % alpha.size()];
    CHECK(levenshtein(a, b) == edit_distance(a, b));
  }
}

TEST_CASE("duplicate detection") {
  CHECK(is_duplicate("the ritz", "the ritz", 0.95));
  CHECK(is_duplicate("the ritz", "the ritz hotel", 0.95));
  CHECK(is_duplicate("grand hotel", "the grand hotel", 0.95));
  double s = 1.0 - static_cast<double>(edit_distance("pizza palace", "sushi bar")) / 12.0;
  CHECK(similarity("pizza palace", "sushi bar") == doctest::Approx(s));
  CHECK(s < 0.95);
  CHECK_FALSE(is_duplicate("pizza palace", "sushi bar", 0.95));
  CHECK_FALSE(token_contained("", "the ritz"));
  CHECK_FALSE(is_duplicate("the ritzy", "the ritz cafe", 0.95));
}

TEST_CASE("duplicate test matches its definition on random keys") {
  std::mt19937_64 rng(11);
  std::string alpha = "ab ";
  for (int i = 0; i < 20000; ++i) {
    std::string a, b;
    for (std::size_t k = 1 + rng() % 24; k > 0; --k) a += alpha[rng() % alpha.size()];
    b = a;
    for (std::size_t k = rng() % 4; k > 0 && !b.empty(); --k) {
      auto pos = rng() % b.size();
      switch (rng() % 3) {
        case 0: b.erase(pos, 1); break;
        case 1: b.insert(pos, 1, alpha[rng() % alpha.size()]); break;
        default: b[pos] = alpha[rng() % alpha.size()];
      }
    }
    double tau = std::vector<double>{0.0, 0.5, 0.8, 0.9, 0.95, 1.0}[rng() % 6];
    std::size_t m = std::max(a.size(), b.size());
    bool want = a == b || token_contained(a, b) ||
                (m > 0 && 1.0 - static_cast<double>(edit_distance(a, b)) / static_cast<double>(m) >= tau);
    CHECK(is_duplicate(a, b, tau) == want);
  }
}

TEST_CASE("budget ledger arithmetic") {
  GlobalState s(Money::dollars(1700));
  auto a = make_action(1, CommitKind::transport, "F3573659", Money::dollars(684), fixture::rockford());
  a.transport_mode = TransportMode::flight;
  CHECK_FALSE(s.check(a).has_value());
  CHECK_FALSE(s.commit(a).has_value());
  CHECK(s.remaining() == Money::dollars(1016));
  CHECK_FALSE(s.commit(meal(2, "Lucha Cantina", 1016)).has_value());
  CHECK(s.view()->b_used == Money::dollars(1700));
  auto before = *s.view();
  auto over = s.commit(meal(2, "Taqueria El Sol", 1));
  REQUIRE(over);
  CHECK(over->code == ViolationCode::budget_exceeded);
  CHECK(*s.view() == before);
}

TEST_CASE("duplicate venues are rejected within a kind") {
  GlobalState s(Money::dollars(1000));
  REQUIRE_FALSE(s.commit(meal(1, "the ritz", 10)));
  auto r = s.check(meal(2, "The Ritz", 10));
  REQUIRE(r);
  CHECK(r->code == ViolationCode::duplicate_venue);
  CHECK(to_string(r->code) == "DUPLICATE_VENUE");
  auto other_kind = make_action(2, CommitKind::attraction, "The Ritz", Money{}, fixture::rockford());
  CHECK_FALSE(s.check(other_kind).has_value());
  // repeated nights at the same accommodation are not duplicates
  auto n1 = make_action(1, CommitKind::accommodation, "Inn", Money::dollars(50), fixture::rockford());
  auto n2 = make_action(2, CommitKind::accommodation, "Inn", Money::dollars(50), fixture::rockford());
  CHECK_FALSE(s.commit(n1));
  CHECK_FALSE(s.commit(n2));
  CHECK(s.view()->committed_nights.at(fixture::rockford()).size() == 2);
}

TEST_CASE("indexed commit agrees with the linear check") {
  std::mt19937_64 rng(21);
  const std::vector<std::string> words = {"the", "ritz", "grand", "cafe", "rit", "ritzz", "hotel",
                                          "blue", "door", "internationale", "internationals"};
  for (double tau : {0.0, 0.5, 0.8, 0.95, 1.0}) {
    GlobalState s(Money::dollars(100000), {.tau = tau});
    int checkpoints = 0;
    for (int i = 0; i < 600; ++i) {
      std::string name;
      for (std::size_t k = 1 + rng() % 4; k > 0; --k) name += words[rng() % words.size()] + " ";
      auto kind = rng() % 2 ? CommitKind::meal : CommitKind::attraction;
      auto a = make_action(1, kind, name, Money::dollars(1), fixture::rockford());
      auto linear = s.check(a);
      auto indexed = s.commit(a);
      REQUIRE(linear.has_value() == indexed.has_value());
      if (linear) CHECK(linear->code == indexed->code);
      if (rng() % 40 == 0) {
        s.checkpoint();
        ++checkpoints;
      } else if (checkpoints > 0 && rng() % 40 == 0) {
        s.rollback();
        --checkpoints;
      }
    }
  }
}

TEST_CASE("transport mode is locked once") {
  GlobalState s(Money::dollars(1000));
  CHECK_FALSE(s.lock_transport_mode(TransportMode::flight));
  CHECK_FALSE(s.lock_transport_mode(TransportMode::flight));
  auto conflict = s.lock_transport_mode(TransportMode::self_driving);
  REQUIRE(conflict);
  CHECK(conflict->code == ViolationCode::mode_conflict);
  auto a = make_action(1, CommitKind::transport, "Self-driving", Money::dollars(5), fixture::rockford());
  a.transport_mode = TransportMode::self_driving;
  auto r = s.check(a);
  REQUIRE(r);
  CHECK(r->code == ViolationCode::mode_conflict);
}

TEST_CASE("checkpoints and rollback") {
  GlobalState s(Money::dollars(1700));
  CHECK(s.checkpoint() == 0);
  CHECK(s.checkpoints().back() == *s.view());
  CHECK(s.checkpoint() == 1);
  CHECK(s.checkpoint_depth() == 2);
  REQUIRE_FALSE(s.rollback());
  REQUIRE_FALSE(s.rollback());
  auto none = s.rollback();
  REQUIRE(none);
  CHECK(none->code == ViolationCode::no_checkpoint);

  s.checkpoint();
  auto snap = *s.view();
  s.commit(meal(1, "A Cafe", 500));
  CHECK(s.view()->b_used == Money::dollars(500));
  REQUIRE_FALSE(s.rollback());
  CHECK(s.view()->b_used == Money{});

  s.commit(meal(1, "Keep", 10));
  s.checkpoint();
  auto mid = *s.view();
  s.commit(meal(1, "One", 1));
  s.commit(meal(2, "Two", 2));
  s.commit(meal(3, "Three", 3));
  s.rollback();
  CHECK(s.view()->v_committed == mid.v_committed);
  CHECK(*s.view() == mid);
  CHECK_FALSE(*s.view() == snap);

  s.checkpoint();
  s.commit(meal(1, "Stay", 1));
  CHECK_FALSE(s.release_checkpoint());
  CHECK(s.checkpoint_depth() == 0);
  CHECK(s.view()->b_used == Money::dollars(11));
}

TEST_CASE("concurrent fuzzy duplicates: exactly one commit wins") {
  for (int round = 0; round < 200; ++round) {
    GlobalState s(Money::dollars(1000));
    std::barrier sync(2);
    std::optional<Violation> r1, r2;
    std::thread t1([&] {
      sync.arrive_and_wait();
      r1 = s.commit(meal(1, "The Ritz", 10));
    });
    std::thread t2([&] {
      sync.arrive_and_wait();
      r2 = s.commit(meal(2, "the ritz hotel", 10));
    });
    t1.join();
    t2.join();
    CHECK(r1.has_value() != r2.has_value());
    auto& bad = r1 ? r1 : r2;
    CHECK(bad->code == ViolationCode::duplicate_venue);
    CHECK(s.view()->b_used == Money::dollars(10));
  }
}

TEST_CASE("monitor ablation accepts everything") {
  GlobalState s(Money::dollars(10), {.enforcing = false});
  CHECK_FALSE(s.commit(meal(1, "x", 100)));
  CHECK_FALSE(s.commit(meal(2, "x", 100)));
  CHECK_FALSE(s.lock_transport_mode(TransportMode::taxi));
  CHECK_FALSE(s.lock_transport_mode(TransportMode::flight));
}

TEST_CASE("remaining nights along a route") {
  auto a = fixture::rockford(), b = fixture::city("Chicago", "Illinois");
  auto three = fixture::trip_over(fixture::stpete(), {a, a});
  CHECK(get_remaining_nights(a, 1, three) == 2);
  CHECK(get_remaining_nights(a, 2, three) == 1);
  CHECK(get_remaining_nights(a, 3, three) == 0);
  auto five = fixture::trip_over(fixture::stpete(), {a, a, a, b});
  CHECK(get_remaining_nights(a, 2, five) == 2);
  CHECK(get_remaining_nights(b, 4, five) == 1);
  CHECK(get_remaining_nights(b, 2, five) == 0);

  CHECK(is_final_accommodation_day(2, three));
  CHECK_FALSE(is_final_accommodation_day(3, three));
  auto seven = fixture::trip_over(fixture::stpete(), {a, a, a, b, b, b});
  CHECK_FALSE(is_final_accommodation_day(1, seven));
  CHECK(is_final_accommodation_day(3, seven));
}

TEST_CASE("lock timeout") {
  FairMutex m;
  REQUIRE(m.try_lock_for(std::chrono::milliseconds(10)));
  bool got = true;
  std::thread t([&] { got = m.try_lock_for(std::chrono::milliseconds(20)); });
  t.join();
  CHECK_FALSE(got);
  m.unlock();
  CHECK(m.try_lock_for(std::chrono::milliseconds(10)));
  m.unlock();
}
