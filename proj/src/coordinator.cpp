#include "himap/coordinator.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace himap {

int BudgetWeights::of(DayRole r) const {
  switch (r) {
    case DayRole::departure: return departure;
    case DayRole::stay: return stay;
    case DayRole::transit: return transit;
    case DayRole::ret: return ret;
  }
  return stay;
}

std::vector<City> resolve_destination(const Database& db, const TravelQuery& q) {
  std::string dest = trim(q.destination);
  if (auto cities = db.city_search(dest); cities && !cities->empty()) return *cities;

  std::vector<City> named;
  if (auto c = City::parse(dest); c && db.has_city(*c)) {
    named.push_back(*c);
  } else {
    named = db.cities_named(dest);
  }
  if (named.empty()) throw UnresolvableDestination("destination '" + dest + "' is neither a state nor a city");
  if (q.visiting_city_number > 1)
    throw MultiCityInSingleCity("destination '" + dest + "' is a single city but " +
                                std::to_string(q.visiting_city_number) + " cities were requested");
  return named;
}

namespace {

template <class T, class F>
std::optional<Money> median_of(const std::vector<T>& xs, F key) {
  if (xs.empty()) return std::nullopt;
  std::vector<std::int64_t> v;
  v.reserve(xs.size());
  for (const auto& x : xs) v.push_back(key(x).in_cents());
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  if (n % 2 == 1) return Money::cents(v[n / 2]);
  return Money::cents((v[n / 2 - 1] + v[n / 2]) / 2);
}

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t seeded_hash(const City& c, std::uint64_t seed) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : c.display()) h = (h ^ ch) * 1099511628211ULL;
  return mix(h ^ mix(seed));
}

City failing_city(const MetaPlan& plan, const BargainFeedback& fb) {
  for (const auto& g : plan.sub_goals)
    if (g.day == fb.day) return g.role == DayRole::ret ? g.from_city : g.to_city;
  return {};
}

}  // namespace

Money affordability_score(const Database& db, const City& city, int people) {
  // All venues, unfiltered: the score ranks cities, it does not book.
  auto acc = db.accommodation_search(city, 1);
  auto rest = db.restaurant_search(city);
  auto ma = median_of(acc, [](const Accommodation& a) { return a.price_per_night; });
  auto mr = median_of(rest, [](const Restaurant& r) { return r.avg_cost; });
  if (!ma || !mr) return Money::cents(std::numeric_limits<std::int64_t>::max() / 4);
  return *ma + *mr * people;
}

std::vector<City> select_cities(const Database& db, std::span<const City> candidates, const TravelQuery& q,
                                std::span<const FailedIteration> history, std::uint64_t seed) {
  const auto C = static_cast<std::size_t>(q.visiting_city_number);
  std::set<City> excluded;
  std::set<std::vector<City>> failed_lists;
  for (const auto& it : history) {
    failed_lists.insert(it.plan.visiting_cities);
    for (const auto& fb : it.feedback)
      if (!fb.feasible) excluded.insert(failing_city(it.plan, fb));
  }

  struct Ranked {
    Money score;
    std::uint64_t tie;
    City city;
  };
  std::vector<Ranked> ranked;
  std::set<City> seen;
  for (const auto& c : candidates) {
    if (excluded.contains(c) || !seen.insert(c).second) continue;
    if (c == q.origin) continue;
    ranked.push_back({affordability_score(db, c, q.people), seeded_hash(c, seed), c});
  }
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    return std::tie(a.score, a.tie, a.city) < std::tie(b.score, b.tie, b.city);
  });
  if (ranked.size() < C) throw NoFeasibleCities("only " + std::to_string(ranked.size()) +
                                                " candidate cities remain for " + std::to_string(C) + " visits");

  // Combinations of rank indices in lexicographic order; the first is the C
  // best-ranked cities. Ranked order doubles as visiting order.
  std::vector<std::size_t> idx(C);
  for (std::size_t i = 0; i < C; ++i) idx[i] = i;
  const std::size_t n = ranked.size();
  while (true) {
    std::vector<City> pick;
    for (auto i : idx) pick.push_back(ranked[i].city);
    if (!failed_lists.contains(pick)) return pick;
    std::size_t i = C;
    while (i > 0 && idx[i - 1] == n - C + (i - 1)) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < C; ++j) idx[j] = idx[j - 1] + 1;
  }
  throw NoFeasibleCities("every remaining city combination has already failed");
}

std::vector<SubGoal> build_route(const TravelQuery& q, std::span<const City> cities) {
  const int D = q.days;
  const int C = static_cast<int>(cities.size());
  if (C < 1 || C > D - 1) throw InvalidArgument("route needs between 1 and D-1 cities");
  const int nights = D - 1;
  std::vector<City> overnight;  // overnight[d-1] for d = 1..D-1
  for (int i = 0; i < C; ++i) {
    int n = nights / C + (i < nights % C ? 1 : 0);
    for (int k = 0; k < n; ++k) overnight.push_back(cities[static_cast<std::size_t>(i)]);
  }

  std::vector<SubGoal> out;
  for (int d = 1; d <= D; ++d) {
    SubGoal g;
    g.day = d;
    g.date = q.date_of_day(d);
    g.people = q.people;
    if (d == 1) {
      g.from_city = q.origin;
      g.to_city = overnight.front();
      g.role = DayRole::departure;
    } else if (d == D) {
      g.from_city = overnight.back();
      g.to_city = q.origin;
      g.role = DayRole::ret;
    } else {
      g.from_city = overnight[static_cast<std::size_t>(d - 2)];
      g.to_city = overnight[static_cast<std::size_t>(d - 1)];
      g.role = g.from_city == g.to_city ? DayRole::stay : DayRole::transit;
    }
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<Money> allocate_budget_hints(Money b_total, std::span<const DayRole> roles, const BudgetWeights& w) {
  if (roles.empty()) return {};
  std::int64_t sum_w = 0;
  for (auto r : roles) sum_w += w.of(r);
  if (sum_w <= 0) throw InvalidArgument("budget weights must be positive");
  std::vector<Money> out;
  std::int64_t assigned = 0;
  for (auto r : roles) {
    std::int64_t c = b_total.in_cents() * w.of(r) / sum_w;
    out.push_back(Money::cents(c));
    assigned += c;
  }
  std::size_t sink = roles.size() - 1;
  auto last_of = [&](DayRole want) -> std::optional<std::size_t> {
    for (std::size_t i = roles.size(); i-- > 0;)
      if (roles[i] == want) return i;
    return std::nullopt;
  };
  if (auto s = last_of(DayRole::stay)) sink = *s;
  else if (auto t = last_of(DayRole::transit)) sink = *t;
  out[sink] += Money::cents(b_total.in_cents() - assigned);
  return out;
}

std::optional<Money> leg_cost(const Database& db, const SubGoal& leg, TransportMode mode) {
  if (mode == TransportMode::flight) {
    auto flights = db.flight_search(leg.from_city, leg.to_city, leg.date);
    if (flights.empty()) return std::nullopt;
    return flights.front().price;
  }
  auto q = db.distance_search(leg.from_city, leg.to_city);
  if (!q) return std::nullopt;
  return mode == TransportMode::taxi ? q->taxi_cost : q->selfdrive_cost;
}

TransportMode select_transport_mode(const Database& db, const TravelQuery& q, std::span<const SubGoal> route) {
  std::optional<std::pair<Money, TransportMode>> best;
  for (auto mode : {TransportMode::flight, TransportMode::self_driving, TransportMode::taxi}) {
    if (mode == TransportMode::flight && q.transport_restriction == TransportRestriction::no_flight) continue;
    if (mode == TransportMode::self_driving && q.transport_restriction == TransportRestriction::no_self_driving)
      continue;
    Money total;
    bool ok = true;
    for (const auto& g : route) {
      if (g.from_city == g.to_city) continue;
      auto c = leg_cost(db, g, mode);
      if (!c) {
        ok = false;
        break;
      }
      total += *c;
    }
    if (ok && (!best || total < best->first)) best = {total, mode};
  }
  if (!best) throw NoTransportAvailable("no permitted transport mode covers every leg of the route");
  return best->second;
}

MetaPlan distribute_task(const Database& db, const TravelQuery& q, GlobalState& sigma,
                         std::span<const FailedIteration> history, std::uint64_t seed,
                         const CoordinatorOptions& opts) {
  q.validate();
  MetaPlan plan;
  plan.iteration = static_cast<int>(history.size()) + 1;
  auto candidates = resolve_destination(db, q);

  if (opts.flat) {
    std::vector<City> alpha;
    for (const auto& c : candidates)
      if (c != q.origin) alpha.push_back(c);
    std::sort(alpha.begin(), alpha.end(), [](const City& a, const City& b) { return a.display() < b.display(); });
    const auto n = alpha.size();
    const auto C = static_cast<std::size_t>(q.visiting_city_number);
    if (n < C) throw NoFeasibleCities("not enough candidate cities");
    const auto k = static_cast<std::size_t>(plan.iteration);
    for (std::size_t i = 0; i < C; ++i) plan.visiting_cities.push_back(alpha[((k - 1) * C + i) % n]);
  } else {
    plan.visiting_cities = select_cities(db, candidates, q, history, seed);
  }

  plan.sub_goals = build_route(q, plan.visiting_cities);
  std::vector<DayRole> roles;
  for (const auto& g : plan.sub_goals) roles.push_back(g.role);
  std::vector<Money> hints;
  if (opts.flat) {
    const auto D = static_cast<std::int64_t>(roles.size());
    for (std::int64_t d = 0; d < D; ++d) hints.push_back(Money::cents(q.budget.in_cents() / D));
    hints.back() += Money::cents(q.budget.in_cents() % D);
  } else {
    hints = allocate_budget_hints(q.budget, roles, opts.weights);
  }
  for (std::size_t i = 0; i < hints.size(); ++i) plan.sub_goals[i].budget_hint = hints[i];

  plan.transport_mode = select_transport_mode(db, q, plan.sub_goals);
  if (auto v = sigma.lock_transport_mode(plan.transport_mode))
    throw Error("transport mode lock failed: " + v->detail);
  return plan;
}

}  // namespace himap
