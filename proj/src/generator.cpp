#include "himap/generator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <tuple>

#include "himap/canonical.hpp"
#include "himap/coordinator.hpp"
#include "himap/executor.hpp"

namespace himap {

namespace {

using Rng = std::mt19937_64;

std::uint64_t pick(Rng& rng, std::uint64_t n) { return rng() % n; }
bool chance(Rng& rng, int percent) { return static_cast<int>(rng() % 100) < percent; }

struct StateSeed {
  const char* state;
  double x, y;  // rough centre, km
  std::vector<const char*> cities;
};

const std::vector<StateSeed>& state_seeds() {
  static const std::vector<StateSeed> s = {
      {"Illinois", 1500, 1300, {"Rockford", "Peoria", "Springfield", "Champaign", "Naperville", "Joliet", "Chicago"}},
      {"Maryland", 2600, 1300, {"Baltimore", "Salisbury", "Hagerstown", "Annapolis", "Frederick"}},
      {"Florida", 2300, 300, {"St. Petersburg", "Orlando", "Tampa", "Miami", "Tallahassee", "Jacksonville"}},
      {"Texas", 900, 500, {"Austin", "Dallas", "Houston", "El Paso", "Amarillo", "Lubbock"}},
      {"Ohio", 2100, 1300, {"Columbus", "Dayton", "Toledo", "Akron", "Cincinnati"}},
      {"Oregon", 100, 1800, {"Portland", "Eugene", "Salem", "Bend", "Medford"}},
      {"Georgia", 2100, 600, {"Atlanta", "Savannah", "Augusta", "Macon", "Valdosta"}},
      {"Colorado", 800, 1200, {"Denver", "Boulder", "Aspen", "Pueblo", "Durango"}},
  };
  return s;
}

const char* const kWordA[] = {"Golden",  "Blue",   "Copper",  "Silver", "Maple",   "Harbor", "Olive",  "Cedar",
                              "Lantern", "Rustic", "Velvet",  "Amber",  "Coral",   "Ivory",  "Juniper", "Saffron",
                              "Crimson", "Willow", "Granite", "Meadow", "Pepper",  "Sunset", "Orchard", "Thistle",
                              "Bramble", "Lotus",  "Marble",  "Ember",  "Birch",   "Quarry", "Basil",   "Fig"};
const char* const kWordB[] = {"Grill", "Bistro", "Kitchen", "Diner", "Cafe",   "Tavern", "Eatery", "Table",
                              "Spoon", "Fork",   "Oven",    "Pantry", "Brasserie", "Canteen", "Skillet", "Hearth"};
const char* const kAttraction[] = {"Art Museum",     "Botanical Garden", "History Center",  "Riverfront Park",
                                   "Science Museum", "Zoo",              "Memorial Hall",   "Children's Museum",
                                   "Sculpture Park", "Observatory",      "Old Town Square", "Nature Center"};
const char* const kStayAdj[] = {"Cozy", "Sunny", "Quiet", "Modern", "Spacious", "Charming", "Bright", "Classic"};
const char* const kStayKind[] = {"Loft", "Studio", "Suite", "Cottage", "Apartment", "Bungalow", "Townhouse", "Flat"};
const char* const kStayArea[] = {"Downtown", "Old Town", "the Park", "Midtown", "the Riverside", "Uptown",
                                 "the Arts District", "the Heights"};

struct World {
  std::vector<City> cities;
  std::map<City, std::pair<double, double>> coords;
  std::vector<std::string> states;
  std::map<std::string, std::vector<City>> by_state;
  std::vector<Accommodation> accommodations;
  std::vector<Restaurant> restaurants;
  std::vector<Attraction> attractions;
  std::vector<DistanceRecord> distances;
  std::set<std::string> restaurant_keys;
};

Money dollars_between(Rng& rng, int lo, int hi) {
  return Money::dollars(lo + static_cast<std::int64_t>(pick(rng, static_cast<std::uint64_t>(hi - lo + 1))));
}

bool clashes(const std::set<std::string>& keys, const std::string& key) {
  for (const auto& k : keys)
    if (is_duplicate(k, key, 0.95)) return true;
  return false;
}

void add_restaurants(World& w, Rng& rng, const City& c, int n, int lo, int hi) {
  std::set<std::string> used;
  for (int i = 0; i < n;) {
    std::string name = c.name + " " + kWordA[pick(rng, std::size(kWordA))] + " " + kWordB[pick(rng, std::size(kWordB))];
    auto key = canonicalize(name);
    if (used.contains(name) || clashes(w.restaurant_keys, key)) continue;
    used.insert(name);
    w.restaurant_keys.insert(key);
    Restaurant r;
    r.name = name;
    r.city = c;
    r.cuisine = i < static_cast<int>(std::size(kAllCuisines)) ? kAllCuisines[i]
                                                               : kAllCuisines[pick(rng, std::size(kAllCuisines))];
    r.avg_cost = dollars_between(rng, lo, hi);
    w.restaurants.push_back(std::move(r));
    ++i;
  }
}

std::string stay_name(Rng& rng, std::set<std::string>& used) {
  for (;;) {
    std::string n = std::string(kStayAdj[pick(rng, std::size(kStayAdj))]) + " " +
                    kStayKind[pick(rng, std::size(kStayKind))] + " in " + kStayArea[pick(rng, std::size(kStayArea))];
    if (used.insert(n).second) return n;
  }
}

void add_normal_accommodations(World& w, Rng& rng, const City& c, std::set<std::string>& used) {
  // One unrestricted, long-stay-free option per room type so that every query
  // shape has something to book.
  for (RoomType rt : {RoomType::entire_room, RoomType::private_room, RoomType::shared_room}) {
    Accommodation a;
    a.name = stay_name(rng, used);
    a.city = c;
    a.room_type = rt;
    a.price_per_night = dollars_between(rng, rt == RoomType::shared_room ? 40 : 90, 400);
    a.minimum_nights = 1;
    a.maximum_occupancy = 8;
    w.accommodations.push_back(std::move(a));
  }
  for (int i = 0; i < 6; ++i) {
    Accommodation a;
    a.name = stay_name(rng, used);
    a.city = c;
    a.room_type = static_cast<RoomType>(pick(rng, 3));
    a.price_per_night = dollars_between(rng, 50, 900);
    for (HouseRule r : kAllHouseRules)
      if (chance(rng, 30)) a.prohibited.insert(r);
    a.minimum_nights = chance(rng, 70) ? 1 : 2 + static_cast<int>(pick(rng, 3));
    a.maximum_occupancy = 1 + static_cast<int>(pick(rng, 8));
    w.accommodations.push_back(std::move(a));
  }
}

void add_attractions(World& w, Rng& rng, const City& c) {
  std::vector<int> idx(std::size(kAttraction));
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[pick(rng, i)]);
  for (int i = 0; i < 6; ++i) w.attractions.push_back({c.name + " " + kAttraction[idx[static_cast<std::size_t>(i)]], c});
}

World make_world(Rng& rng, const std::set<City>& traps) {
  World w;
  for (const auto& s : state_seeds()) {
    w.states.push_back(s.state);
    for (const char* n : s.cities) {
      City c{n, s.state};
      w.cities.push_back(c);
      w.by_state[s.state].push_back(c);
      double dx = static_cast<double>(pick(rng, 401)) - 200.0;
      double dy = static_cast<double>(pick(rng, 401)) - 200.0;
      w.coords[c] = {s.x + dx, s.y + dy};
    }
  }
  for (const auto& c : w.cities) {
    std::set<std::string> used;
    if (traps.contains(c)) {
      // Cheap single-occupancy rooms drag the median down; the only room
      // that fits a party is priced out of any budget.
      for (int i = 0; i < 7; ++i) {
        Accommodation a;
        a.name = stay_name(rng, used);
        a.city = c;
        a.room_type = static_cast<RoomType>(pick(rng, 3));
        a.price_per_night = dollars_between(rng, 15, 30);
        a.maximum_occupancy = 1;
        w.accommodations.push_back(std::move(a));
      }
      Accommodation big;
      big.name = stay_name(rng, used);
      big.city = c;
      big.room_type = RoomType::entire_room;
      big.price_per_night = Money::dollars(50000);
      big.maximum_occupancy = 8;
      w.accommodations.push_back(std::move(big));
      add_restaurants(w, rng, c, 12, 4, 8);
    } else {
      add_normal_accommodations(w, rng, c, used);
      add_restaurants(w, rng, c, 12, 10, 60);
    }
    add_attractions(w, rng, c);
  }
  for (std::size_t i = 0; i < w.cities.size(); ++i)
    for (std::size_t j = i + 1; j < w.cities.size(); ++j) {
      auto [x1, y1] = w.coords[w.cities[i]];
      auto [x2, y2] = w.coords[w.cities[j]];
      double km = std::hypot(x1 - x2, y1 - y2) + 5.0;
      auto metres = static_cast<std::int64_t>(std::llround(km * 10.0)) * 100;  // one decimal place
      w.distances.push_back({w.cities[i], w.cities[j], metres});
    }
  return w;
}

std::int64_t metres_between(const World& w, const City& a, const City& b) {
  for (const auto& d : w.distances)
    if ((d.origin == a && d.dest == b) || (d.origin == b && d.dest == a)) return d.metres;
  return 0;
}

struct FlightBook {
  std::set<std::tuple<City, City, Date>> keys;
  std::set<std::string> numbers;
  std::vector<Flight> flights;

  void ensure(const World& w, Rng& rng, const City& a, const City& b, Date d, int copies) {
    if (a == b || !keys.insert({a, b, d}).second) return;
    const double km = static_cast<double>(metres_between(w, a, b)) / 1000.0;
    for (int i = 0; i < copies; ++i) {
      Flight f;
      do {
        f.flight_number = "F" + std::to_string(1000000 + pick(rng, 9000000));
      } while (!numbers.insert(f.flight_number).second);
      f.origin = a;
      f.dest = b;
      f.date = d;
      f.price = Money::dollars(60 + static_cast<std::int64_t>(km * 0.12) + static_cast<std::int64_t>(pick(rng, 120)));
      int dep = 6 * 60 + static_cast<int>(pick(rng, 14 * 60));
      int dur = 45 + static_cast<int>(km / 12.0);
      f.dep_time = WallTime{dep};
      f.arr_time = WallTime{std::min(dep + dur, 23 * 60 + 59)};
      flights.push_back(std::move(f));
    }
  }
};

void add_query_flights(const World& w, Rng& rng, FlightBook& book, const TravelQuery& q,
                       const std::vector<City>& dest_cities) {
  const Date first = q.start_date;
  const Date last = q.date_of_day(q.days);
  for (const auto& c : dest_cities) {
    book.ensure(w, rng, q.origin, c, first, 2);
    book.ensure(w, rng, c, q.origin, last, 2);
  }
  for (int d = 2; d < q.days; ++d)
    for (const auto& a : dest_cities)
      for (const auto& b : dest_cities) book.ensure(w, rng, a, b, q.date_of_day(d), 1);
}

Database build(const World& w, const FlightBook& book) {
  Database::Builder b;
  for (const auto& c : w.cities) b.add_city(c);
  for (const auto& f : book.flights) b.add_flight(f);
  for (const auto& a : w.accommodations) b.add_accommodation(a);
  for (const auto& r : w.restaurants) b.add_restaurant(r);
  for (const auto& a : w.attractions) b.add_attraction(a);
  for (const auto& d : w.distances) b.add_distance(d);
  return b.build();
}

const Money kPlaceholderBudget = Money::dollars(100'000'000);

std::optional<std::vector<DayPlan>> reference_plan(const Database& db, const TravelQuery& q,
                                                   std::span<const FailedIteration> history,
                                                   const GeneratorOptions& o, MetaPlan* out_plan = nullptr) {
  GlobalState sigma(q.budget);
  MetaPlan mp;
  try {
    mp = distribute_task(db, q, sigma, history, o.coordinator_seed);
  } catch (const Error&) {
    return std::nullopt;
  }
  if (out_plan) *out_plan = mp;
  GreedyPolicy policy;
  std::vector<DayPlan> plans;
  for (const auto& ctx : make_day_contexts(q, mp, o.meals_on_travel_days)) {
    auto r = run_day(db, ctx, mp.sub_goals, sigma, policy);
    if (!r.plan || !r.feedback.feasible) return std::nullopt;
    plans.push_back(*r.plan);
  }
  return plans;
}

Money budget_for(const Database& db, const TravelQuery& q, std::span<const DayPlan> plans, double margin) {
  Money cost;
  for (const auto& p : plans) cost += cost_of_day(db, p, q.people);
  auto dollars = static_cast<std::int64_t>(std::ceil(static_cast<double>(cost.in_cents()) * margin / 100.0 - 1e-9));
  return Money::dollars(std::max<std::int64_t>(dollars, 1));
}

struct Shape {
  int days, cities, nc;
};

std::vector<Shape> tier_shapes(Tier t, const GeneratorOptions& o) {
  auto range = tier_range(t);
  std::vector<Shape> out;
  const int max_nc = o.nc_per_tag ? 3 + static_cast<int>(std::size(kAllCuisines)) : 4;
  for (int d : o.days)
    for (int c : o.cities) {
      if (c > d - 1) continue;
      for (int n = 0; n <= max_nc; ++n) {
        double s = complexity_score(d, c, n);
        if (s >= range.lo - 1e-9 && s <= range.hi + 1e-9) out.push_back({d, c, n});
      }
    }
  return out;
}

std::string pad(int i) {
  std::string s = std::to_string(i);
  return std::string(s.size() < 4 ? 4 - s.size() : 0, '0') + s;
}

// Fills the local constraints so that local_constraint_count == nc.
void fill_locals(Rng& rng, TravelQuery& q, int nc, bool per_tag) {
  std::vector<int> fields{0, 1, 2, 3};  // house rule, cuisines, room type, transport
  int cuisine_tags = 0;
  if (per_tag) {
    // Up to three non-cuisine fields, the rest as cuisine tags.
    int others = std::min(nc, static_cast<int>(pick(rng, 4)));
    cuisine_tags = nc - others;
    if (cuisine_tags > static_cast<int>(std::size(kAllCuisines))) {
      others += cuisine_tags - static_cast<int>(std::size(kAllCuisines));
      cuisine_tags = static_cast<int>(std::size(kAllCuisines));
    }
    std::vector<int> rest{0, 2, 3};
    for (std::size_t i = rest.size(); i > 1; --i) std::swap(rest[i - 1], rest[pick(rng, i)]);
    fields.assign(rest.begin(), rest.begin() + std::min<std::size_t>(static_cast<std::size_t>(others), rest.size()));
    if (cuisine_tags > 0) fields.push_back(1);
  } else {
    for (std::size_t i = fields.size(); i > 1; --i) std::swap(fields[i - 1], fields[pick(rng, i)]);
    fields.resize(static_cast<std::size_t>(nc));
    cuisine_tags = 1 + static_cast<int>(pick(rng, 3));
  }
  for (int f : fields) {
    switch (f) {
      case 0: q.house_rule = kAllHouseRules[pick(rng, std::size(kAllHouseRules))]; break;
      case 1: {
        std::vector<Cuisine> all(std::begin(kAllCuisines), std::end(kAllCuisines));
        for (std::size_t i = all.size(); i > 1; --i) std::swap(all[i - 1], all[pick(rng, i)]);
        all.resize(static_cast<std::size_t>(cuisine_tags));
        std::sort(all.begin(), all.end());
        q.cuisines = all;
        break;
      }
      case 2: q.room_type = static_cast<RoomRequirement>(pick(rng, 4)); break;
      case 3: q.transport_restriction = static_cast<TransportRestriction>(pick(rng, 2)); break;
    }
  }
}

City pick_origin(Rng& rng, const World& w, const std::string& dest_state) {
  for (;;) {
    const City& c = w.cities[pick(rng, w.cities.size())];
    if (c.state != dest_state) return c;
  }
}

Date pick_start(Rng& rng) { return Date::from_ymd(2022, 3, 1).plus_days(static_cast<int>(pick(rng, 28))); }

void check_common(int count, double margin) {
  if (count < 1) throw InvalidArgument("count must be >= 1");
  if (!(margin >= 1.0)) throw InvalidArgument("margin must be >= 1.0");
}

}  // namespace

std::vector<TravelQuery> InstanceSet::queries() const {
  std::vector<TravelQuery> out;
  out.reserve(instances.size());
  for (const auto& i : instances) out.push_back(i.query);
  return out;
}

double default_margin(Tier t) { return t == Tier::easy ? 1.5 : 1.2; }

InstanceSet generate_instances(std::uint64_t seed, int count, Tier tier, double margin, const GeneratorOptions& opts) {
  check_common(count, margin);
  auto shapes = tier_shapes(tier, opts);
  if (shapes.empty())
    throw InfeasibleTier(std::string("no (days, cities, local constraints) combination reaches tier ") +
                         std::string(to_string(tier)));
  Rng rng(seed);
  World w = make_world(rng, {});
  FlightBook book;
  InstanceSet out;
  out.seed = seed;
  std::vector<TravelQuery> accepted;
  std::vector<std::vector<DayPlan>> refs;
  const auto range = tier_range(tier);
  int attempts = 0;
  int next_id = 0;
  while (static_cast<int>(accepted.size()) < count) {
    if (++attempts > 50) throw Error("generator could not build enough feasible instances");
    std::vector<TravelQuery> batch;
    for (int i = static_cast<int>(accepted.size()); i < count; ++i) {
      for (;;) {
        const Shape& s = shapes[pick(rng, shapes.size())];
        TravelQuery q;
        const auto& state = w.states[pick(rng, w.states.size())];
        const auto& dest_cities = w.by_state.at(state);
        if (static_cast<int>(dest_cities.size()) < s.cities) continue;
        q.id = std::string(to_string(tier)) + "-" + pad(next_id++);
        q.origin = pick_origin(rng, w, state);
        q.days = s.days;
        q.visiting_city_number = s.cities;
        q.destination = (s.cities == 1 && chance(rng, 50)) ? dest_cities[pick(rng, dest_cities.size())].name : state;
        q.start_date = pick_start(rng);
        q.people = 1 + static_cast<int>(pick(rng, 8));
        q.budget = kPlaceholderBudget;
        fill_locals(rng, q, s.nc, opts.nc_per_tag);
        double cx = complexity_score(q, opts.nc_per_tag);
        if (cx < range.lo - 1e-9 || cx > range.hi + 1e-9) continue;
        add_query_flights(w, rng, book, q, dest_cities);
        batch.push_back(std::move(q));
        break;
      }
    }
    Database db = build(w, book);
    for (auto& q : batch) {
      auto ref = reference_plan(db, q, {}, opts);
      if (!ref) continue;
      q.budget = budget_for(db, q, *ref, margin);
      if (!evaluate(db, q, *ref).final_pass) continue;
      accepted.push_back(q);
      refs.push_back(*ref);
    }
    // Earlier references must be unaffected by flights added since.
    std::vector<TravelQuery> keep_q;
    std::vector<std::vector<DayPlan>> keep_r;
    for (std::size_t i = 0; i < accepted.size(); ++i) {
      TravelQuery probe = accepted[i];
      probe.budget = kPlaceholderBudget;
      auto again = reference_plan(db, probe, {}, opts);
      if (again && *again == refs[i]) {
        keep_q.push_back(accepted[i]);
        keep_r.push_back(refs[i]);
      }
    }
    accepted = std::move(keep_q);
    refs = std::move(keep_r);
    out.db = db;
  }
  for (std::size_t i = 0; i < accepted.size(); ++i) out.instances.push_back({accepted[i], refs[i], std::nullopt});
  return out;
}

InstanceSet generate_adversarial(std::uint64_t seed, int count, double margin, const GeneratorOptions& opts) {
  check_common(count, margin);
  Rng rng(seed);
  // The trap of each state is fixed up front so that the world is built once.
  std::set<City> traps;
  std::map<std::string, City> trap_of;
  for (const auto& s : state_seeds()) {
    City t{s.cities[pick(rng, s.cities.size())], s.state};
    traps.insert(t);
    trap_of.emplace(s.state, t);
  }
  World w = make_world(rng, traps);
  FlightBook book;
  InstanceSet out;
  out.seed = seed;
  std::vector<int> days;
  for (int d : opts.days)
    if (d == 3 || d == 5 || d == 7) days.push_back(d);
  if (days.empty()) throw InfeasibleTier("no valid trip length for adversarial instances");

  std::vector<Instance> accepted;
  int attempts = 0;
  int next_id = 0;
  while (static_cast<int>(accepted.size()) < count) {
    if (++attempts > 50) throw Error("generator could not build enough adversarial instances");
    std::vector<TravelQuery> batch;
    for (int i = static_cast<int>(accepted.size()); i < count; ++i) {
      TravelQuery q;
      const auto& state = w.states[pick(rng, w.states.size())];
      q.id = "adv-" + pad(next_id++);
      q.origin = pick_origin(rng, w, state);
      q.destination = state;
      q.days = days[pick(rng, days.size())];
      q.visiting_city_number = 1;
      q.start_date = pick_start(rng);
      q.people = 2 + static_cast<int>(pick(rng, 7));
      q.budget = kPlaceholderBudget;
      if (chance(rng, 50)) {
        q.cuisines = {kAllCuisines[pick(rng, std::size(kAllCuisines))]};
      }
      add_query_flights(w, rng, book, q, w.by_state.at(state));
      batch.push_back(std::move(q));
    }
    Database db = build(w, book);
    for (auto& q : batch) {
      const City& trap = trap_of.at(q.destination);
      MetaPlan first;
      GlobalState probe(q.budget);
      try {
        first = distribute_task(db, q, probe, {}, opts.coordinator_seed);
      } catch (const Error&) {
        continue;
      }
      if (first.visiting_cities != std::vector<City>{trap}) continue;
      FailedIteration failed{first, {BargainFeedback{false, Money{}, ViolationType::budget, 1, 0, true, "trap"}}};
      auto ref = reference_plan(db, q, std::span<const FailedIteration>(&failed, 1), opts);
      if (!ref) continue;
      q.budget = budget_for(db, q, *ref, margin);
      if (q.budget >= Money::dollars(50000)) continue;
      if (!evaluate(db, q, *ref).final_pass) continue;
      accepted.push_back({q, *ref, trap});
    }
    out.db = db;
  }
  out.instances = std::move(accepted);
  return out;
}

std::string_view to_string(FlexShape s) {
  switch (s) {
    case FlexShape::local_add: return "local_add";
    case FlexShape::global_add: return "global_add";
    case FlexShape::local_then_global: return "local_then_global";
    case FlexShape::global_then_local: return "global_then_local";
  }
  return "?";
}

std::optional<FlexShape> parse_flex_shape(std::string_view s) {
  for (auto f : {FlexShape::local_add, FlexShape::global_add, FlexShape::local_then_global,
                 FlexShape::global_then_local})
    if (to_string(f) == s) return f;
  return std::nullopt;
}

std::string_view to_string(LocalKind k) {
  switch (k) {
    case LocalKind::cuisine: return "cuisine";
    case LocalKind::room_type: return "room_type";
    case LocalKind::house_rule: return "house_rule";
  }
  return "?";
}

std::string_view to_string(GlobalKind k) { return k == GlobalKind::budget ? "budget" : "people"; }

TravelQuery MultiTurnScenario::query_at(std::size_t t) const {
  if (t < 1 || t > turns()) throw InvalidArgument("turn out of range");
  TravelQuery q = first;
  for (std::size_t i = 0; i + 1 < t; ++i) q = updates[i].apply(q);
  return q;
}

std::vector<MultiTurnScenario> generate_flex_scenarios(std::span<const TravelQuery> base, std::uint64_t seed,
                                                       FlexShape shape) {
  Rng rng(seed);
  const bool want_local = shape != FlexShape::global_add;
  const bool want_global = shape != FlexShape::local_add;
  std::vector<MultiTurnScenario> out;
  for (const auto& q : base) {
    MultiTurnScenario s;
    s.id = q.id + "-" + std::string(to_string(shape));
    s.shape = shape;
    s.base = q;
    s.first = q;
    s.metadata = nlohmann::json::object();
    s.metadata["shape"] = to_string(shape);
    ConstraintUpdate local_up, global_up;
    if (want_local) {
      std::vector<LocalKind> present;
      if (!q.cuisines.empty()) present.push_back(LocalKind::cuisine);
      if (q.room_type) present.push_back(LocalKind::room_type);
      if (q.house_rule) present.push_back(LocalKind::house_rule);
      if (present.empty()) throw NothingToRemove("query " + q.id + " has no local constraint to remove");
      LocalKind k = present[pick(rng, present.size())];
      s.local_removed = k;
      switch (k) {
        case LocalKind::cuisine:
          local_up.cuisines = q.cuisines;
          s.first.cuisines.clear();
          break;
        case LocalKind::room_type:
          local_up.room_type = q.room_type;
          s.first.room_type.reset();
          break;
        case LocalKind::house_rule:
          local_up.house_rule = q.house_rule;
          s.first.house_rule.reset();
          break;
      }
      s.metadata["local_removed"] = to_string(k);
      s.metadata["local_candidates"] = present.size();
    }
    if (want_global) {
      const bool drew_people = pick(rng, 100) >= 60;
      GlobalKind k = drew_people && q.people > 1 ? GlobalKind::people : GlobalKind::budget;
      s.global_removed = k;
      if (k == GlobalKind::budget) {
        global_up.budget = q.budget;
        s.first.budget = q.budget * 3;
      } else {
        global_up.people = q.people;
        s.first.people = 1;
      }
      s.metadata["global_draw"] = drew_people ? "people" : "budget";
      s.metadata["global_removed"] = to_string(k);
    }
    switch (shape) {
      case FlexShape::local_add: s.updates = {local_up}; break;
      case FlexShape::global_add: s.updates = {global_up}; break;
      case FlexShape::local_then_global: s.updates = {local_up, global_up}; break;
      case FlexShape::global_then_local: s.updates = {global_up, local_up}; break;
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace himap
