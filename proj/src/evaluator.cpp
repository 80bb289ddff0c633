#include "himap/evaluator.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace himap {

const ConstraintVerdict& EvalReport::at(std::string_view name) const {
  for (const auto& v : verdicts)
    if (v.name == name) return v;
  throw InvalidArgument("no verdict named " + std::string(name));
}

namespace {

ConstraintVerdict pass(const char* name) { return {name, Verdict::pass, std::nullopt}; }
ConstraintVerdict na(const char* name) { return {name, Verdict::not_applicable, std::nullopt}; }
ConstraintVerdict fail(const char* name, std::string why) { return {name, Verdict::fail, std::move(why)}; }

bool is_none(const std::string& s) { return trim(s) == kNone; }

struct MealField {
  const char* label;
  const std::string DayPlan::*field;
};
constexpr MealField kMeals[] = {
    {"breakfast", &DayPlan::breakfast}, {"lunch", &DayPlan::lunch}, {"dinner", &DayPlan::dinner}};

enum class Mode { none, flight, taxi, self_driving };
Mode mode_of(const std::string& t) {
  std::string s = trim(t);
  if (s == kNone) return Mode::none;
  if (s == kTaxi) return Mode::taxi;
  if (s == kSelfDriving) return Mode::self_driving;
  return Mode::flight;
}

bool in_destination(const City& c, const TravelQuery& q) {
  std::string dest = trim(q.destination);
  return c.state == dest || c.name == dest || c.display() == dest;
}

// --- commonsense -----------------------------------------------------------

ConstraintVerdict not_absent(const TravelQuery& q, std::span<const DayPlan> plans) {
  const char* n = "is_not_absent";
  if (static_cast<int>(plans.size()) != q.days)
    return fail(n, "plan has " + std::to_string(plans.size()) + " days, expected " + std::to_string(q.days));
  for (std::size_t i = 0; i < plans.size(); ++i) {
    const auto& p = plans[i];
    int d = static_cast<int>(i) + 1;
    if (p.day != d) return fail(n, "day " + std::to_string(d) + " is numbered " + std::to_string(p.day));
    const std::string* fields[] = {&p.current_city, &p.transportation, &p.breakfast,    &p.attraction,
                                   &p.lunch,        &p.dinner,         &p.accommodation};
    for (const auto* f : fields)
      if (trim(*f).empty()) return fail(n, "day " + std::to_string(d) + " has an empty field");
    if (is_none(p.current_city)) return fail(n, "day " + std::to_string(d) + " has no current_city");
    if (d < q.days && is_none(p.accommodation))
      return fail(n, "day " + std::to_string(d) + " has no accommodation");
  }
  return pass(n);
}

ConstraintVerdict sandbox(const Database& db, const TravelQuery& q, std::span<const DayPlan> plans) {
  const char* n = "is_valid_information_in_sandbox";
  for (const auto& p : plans) {
    std::string day = "day " + std::to_string(p.day);
    auto leg = parse_current_city(p.current_city);
    if (!leg) return fail(n, day + " current_city '" + p.current_city + "' is malformed");
    if (!db.has_city(leg->from) || !db.has_city(leg->to))
      return fail(n, day + " current_city '" + p.current_city + "' is not in the database");

    switch (mode_of(p.transportation)) {
      case Mode::none: break;
      case Mode::taxi:
      case Mode::self_driving:
        if (!leg->travel || !db.distance_search(leg->from, leg->to))
          return fail(n, day + " ground transport has no distance record for the leg");
        break;
      case Mode::flight: {
        const Flight* f = db.find_flight(p.transportation);
        if (!f) return fail(n, day + " flight " + trim(p.transportation) + " does not exist");
        if (!leg->travel || f->origin != leg->from || f->dest != leg->to || f->date != q.date_of_day(p.day))
          return fail(n, day + " flight " + trim(p.transportation) + " does not serve this leg and date");
        break;
      }
    }
    for (const auto& m : kMeals) {
      const auto& v = p.*(m.field);
      if (is_none(v)) continue;
      auto ref = VenueRef::parse(v);
      if (!ref || !db.resolve_restaurant(ref->name, ref->city))
        return fail(n, day + " " + m.label + " '" + v + "' is not in the database");
    }
    for (const auto& a : split_attractions(p.attraction)) {
      auto ref = VenueRef::parse(a);
      if (!ref || !db.resolve_attraction(ref->name, ref->city))
        return fail(n, day + " attraction '" + a + "' is not in the database");
    }
    if (!is_none(p.accommodation)) {
      auto ref = VenueRef::parse(p.accommodation);
      if (!ref || !db.resolve_accommodation(ref->name, ref->city))
        return fail(n, day + " accommodation '" + p.accommodation + "' is not in the database");
    }
  }
  return pass(n);
}

ConstraintVerdict current_city(std::span<const DayPlan> plans) {
  const char* n = "is_valid_information_in_current_city";
  for (const auto& p : plans) {
    auto leg = parse_current_city(p.current_city);
    if (!leg) continue;
    auto check = [&](const std::string& v, const std::string& what) -> std::optional<ConstraintVerdict> {
      if (is_none(v)) return std::nullopt;
      auto ref = VenueRef::parse(v);
      if (!ref) return std::nullopt;
      if (ref->city != leg->from && ref->city != leg->to)
        return fail(n, "day " + std::to_string(p.day) + " " + what + " is outside " + trim(p.current_city));
      return std::nullopt;
    };
    for (const auto& m : kMeals)
      if (auto v = check(p.*(m.field), m.label)) return *v;
    for (const auto& a : split_attractions(p.attraction))
      if (auto v = check(a, "attraction")) return *v;
    if (auto v = check(p.accommodation, "accommodation")) return *v;
  }
  return pass(n);
}

ConstraintVerdict visiting_city(const TravelQuery& q, std::span<const DayPlan> plans) {
  const char* n = "is_reasonable_visiting_city";
  std::vector<DayLeg> legs;
  for (const auto& p : plans) {
    auto leg = parse_current_city(p.current_city);
    if (!leg) return fail(n, "day " + std::to_string(p.day) + " current_city is malformed");
    legs.push_back(*leg);
  }
  if (legs.empty()) return fail(n, "empty itinerary");
  if (!legs.front().travel || legs.front().from != q.origin)
    return fail(n, "the trip does not start from " + q.origin.display());
  if (!legs.back().travel || legs.back().to != q.origin)
    return fail(n, "the trip does not return to " + q.origin.display());
  for (std::size_t i = 0; i + 1 < legs.size(); ++i)
    if (legs[i].to != legs[i + 1].from)
      return fail(n, "day " + std::to_string(i + 2) + " does not start where day " + std::to_string(i + 1) + " ended");

  std::vector<City> visited;  // distinct, in order
  for (std::size_t i = 0; i + 1 < legs.size(); ++i) {
    const City& c = legs[i].to;
    if (c == q.origin) return fail(n, "the trip returns to the origin on day " + std::to_string(i + 1));
    if (visited.empty() || visited.back() != c) {
      if (std::ranges::find(visited, c) != visited.end())
        return fail(n, c.display() + " is visited twice");
      visited.push_back(c);
    }
  }
  for (const auto& c : visited)
    if (!in_destination(c, q)) return fail(n, c.display() + " is outside the destination " + q.destination);
  if (static_cast<int>(visited.size()) != q.visiting_city_number)
    return fail(n, "visits " + std::to_string(visited.size()) + " cities, expected " +
                       std::to_string(q.visiting_city_number));
  return pass(n);
}

ConstraintVerdict restaurants(std::span<const DayPlan> plans) {
  const char* n = "is_valid_restaurants";
  std::set<std::string> seen;
  for (const auto& p : plans)
    for (const auto& m : kMeals) {
      std::string v = trim(p.*(m.field));
      if (v == kNone) continue;
      if (!seen.insert(v).second)
        return fail(n, "The restaurant in day " + std::to_string(p.day) + " " + m.label + " is repeated.");
    }
  return pass(n);
}

ConstraintVerdict attractions(std::span<const DayPlan> plans) {
  const char* n = "is_valid_attractions";
  std::set<std::string> seen;
  for (const auto& p : plans)
    for (const auto& a : split_attractions(p.attraction))
      if (!seen.insert(a).second)
        return fail(n, "The attraction '" + a + "' in day " + std::to_string(p.day) + " is repeated.");
  return pass(n);
}

ConstraintVerdict transportation(std::span<const DayPlan> plans) {
  const char* n = "is_valid_transportation";
  if (plans.empty() || mode_of(plans.front().transportation) == Mode::none)
    return fail(n, "day 1 has no transportation");
  std::set<Mode> used;
  for (const auto& p : plans) used.insert(mode_of(p.transportation));
  if (used.contains(Mode::self_driving) && used.contains(Mode::flight))
    return fail(n, "self-driving is mixed with flights");
  if (used.contains(Mode::self_driving) && used.contains(Mode::taxi))
    return fail(n, "self-driving is mixed with taxi");
  return pass(n);
}

ConstraintVerdict accommodation(const Database& db, std::span<const DayPlan> plans) {
  const char* n = "is_valid_accommodation";
  std::size_t i = 0;
  while (i < plans.size()) {
    std::string v = trim(plans[i].accommodation);
    std::size_t j = i;
    while (j < plans.size() && trim(plans[j].accommodation) == v) ++j;
    int run = static_cast<int>(j - i);
    if (v != kNone) {
      auto ref = VenueRef::parse(v);
      const Accommodation* a = ref ? db.resolve_accommodation(ref->name, ref->city) : nullptr;
      if (a && run < a->minimum_nights)
        return fail(n, "accommodation '" + v + "' booked for " + std::to_string(run) + " night(s) but requires " +
                           std::to_string(a->minimum_nights));
    }
    i = j;
  }
  return pass(n);
}

// --- hard ------------------------------------------------------------------

std::vector<const Accommodation*> booked(const Database& db, std::span<const DayPlan> plans) {
  std::vector<const Accommodation*> out;
  for (const auto& p : plans) {
    if (is_none(p.accommodation)) continue;
    auto ref = VenueRef::parse(p.accommodation);
    if (const Accommodation* a = ref ? db.resolve_accommodation(ref->name, ref->city) : nullptr) out.push_back(a);
  }
  return out;
}

ConstraintVerdict cost(const Database& db, const TravelQuery& q, std::span<const DayPlan> plans,
                       std::optional<Money>& total_out) {
  const char* n = "valid_cost";
  Money total;
  try {
    for (const auto& p : plans) total += cost_of_day(db, p, q.people);
  } catch (const UnknownVenue& e) {
    return fail(n, std::string("cost cannot be computed: ") + e.what());
  }
  total_out = total;
  if (total > q.budget) return fail(n, "Total cost " + total.str() + " exceeds budget " + q.budget.str());
  return pass(n);
}

ConstraintVerdict room_rule(const Database& db, const TravelQuery& q, std::span<const DayPlan> plans) {
  const char* n = "valid_room_rule";
  if (!q.house_rule) return na(n);
  for (const auto* a : booked(db, plans))
    if (!a->allows(*q.house_rule)) return fail(n, a->name + " does not allow " + std::string(to_string(*q.house_rule)));
  return pass(n);
}

ConstraintVerdict cuisine(const Database& db, const TravelQuery& q, std::span<const DayPlan> plans) {
  const char* n = "valid_cuisine";
  if (q.cuisines.empty()) return na(n);
  std::set<Cuisine> served;
  for (const auto& p : plans)
    for (const auto& m : kMeals) {
      const auto& v = p.*(m.field);
      if (is_none(v)) continue;
      auto ref = VenueRef::parse(v);
      if (const Restaurant* r = ref ? db.resolve_restaurant(ref->name, ref->city) : nullptr) served.insert(r->cuisine);
    }
  for (auto c : q.cuisines)
    if (!served.contains(c)) return fail(n, "no meal serves " + std::string(to_string(c)) + " cuisine");
  return pass(n);
}

ConstraintVerdict room_type(const Database& db, const TravelQuery& q, std::span<const DayPlan> plans) {
  const char* n = "valid_room_type";
  if (!q.room_type) return na(n);
  for (const auto* a : booked(db, plans))
    if (!satisfies(*q.room_type, a->room_type))
      return fail(n, a->name + " is a " + std::string(to_string(a->room_type)) + ", required " +
                         std::string(to_string(*q.room_type)));
  return pass(n);
}

ConstraintVerdict hard_transport(const TravelQuery& q, std::span<const DayPlan> plans) {
  const char* n = "valid_transportation";
  if (!q.transport_restriction) return na(n);
  for (const auto& p : plans) {
    Mode m = mode_of(p.transportation);
    if (*q.transport_restriction == TransportRestriction::no_flight && m == Mode::flight)
      return fail(n, "day " + std::to_string(p.day) + " uses a flight");
    if (*q.transport_restriction == TransportRestriction::no_self_driving && m == Mode::self_driving)
      return fail(n, "day " + std::to_string(p.day) + " uses self-driving");
  }
  return pass(n);
}

}  // namespace

EvalReport evaluate(const Database& db, const TravelQuery& q, std::span<const DayPlan> plans) {
  EvalReport r;
  r.delivered = !plans.empty();
  if (!r.delivered) {
    for (const char* n : kCommonsenseConstraints) r.verdicts.push_back(fail(n, "plan not delivered"));
    for (const char* n : kHardConstraints) r.verdicts.push_back(fail(n, "plan not delivered"));
    return r;
  }
  r.verdicts.push_back(not_absent(q, plans));
  r.verdicts.push_back(sandbox(db, q, plans));
  r.verdicts.push_back(current_city(plans));
  r.verdicts.push_back(visiting_city(q, plans));
  r.verdicts.push_back(restaurants(plans));
  r.verdicts.push_back(attractions(plans));
  r.verdicts.push_back(transportation(plans));
  r.verdicts.push_back(accommodation(db, plans));
  r.verdicts.push_back(cost(db, q, plans, r.total_cost));
  r.verdicts.push_back(room_rule(db, q, plans));
  r.verdicts.push_back(cuisine(db, q, plans));
  r.verdicts.push_back(room_type(db, q, plans));
  r.verdicts.push_back(hard_transport(q, plans));

  r.commonsense_pass = std::all_of(r.verdicts.begin(), r.verdicts.begin() + 8,
                                   [](const ConstraintVerdict& v) { return v.counts_as_pass(); });
  bool hard = std::all_of(r.verdicts.begin() + 8, r.verdicts.end(),
                          [](const ConstraintVerdict& v) { return v.counts_as_pass(); });
  // Absent or hallucinated content invalidates the hard checks outright.
  r.hard_pass = hard && r.verdicts[0].counts_as_pass() && r.verdicts[1].counts_as_pass();
  r.final_pass = r.commonsense_pass && r.hard_pass;
  r.drift = drift_profile(db, q, plans);
  return r;
}

MetricsSummary aggregate(std::span<const EvalReport> reports) {
  if (reports.empty()) throw EmptyInput("aggregate needs at least one report");
  MetricsSummary m;
  m.plans = reports.size();
  std::size_t delivered = 0, cs_all = 0, hard_all = 0, final_all = 0;
  std::size_t cs_pass = 0, cs_total = 0, hard_pass = 0, hard_total = 0;
  std::map<int, std::pair<std::size_t, std::size_t>> drift;  // day -> (within, seen)
  for (const auto& r : reports) {
    delivered += r.delivered;
    cs_all += r.commonsense_pass;
    hard_all += r.hard_pass;
    final_all += r.final_pass;
    for (std::size_t i = 0; i < r.verdicts.size(); ++i) {
      bool ok = r.verdicts[i].counts_as_pass();
      if (i < 8) {
        cs_pass += ok;
        ++cs_total;
      } else {
        hard_pass += ok;
        ++hard_total;
      }
    }
    for (const auto& d : r.drift) {
      auto& [within, seen] = drift[d.day];
      within += d.within;
      ++seen;
    }
  }
  const double n = static_cast<double>(reports.size());
  m.delivery_rate = delivered / n;
  m.commonsense_macro = cs_all / n;
  m.hard_macro = hard_all / n;
  m.final_pass_rate = final_all / n;
  m.commonsense_micro = cs_total ? static_cast<double>(cs_pass) / static_cast<double>(cs_total) : 0.0;
  m.hard_micro = hard_total ? static_cast<double>(hard_pass) / static_cast<double>(hard_total) : 0.0;
  for (const auto& [day, c] : drift)
    m.per_day_budget_satisfaction.push_back(static_cast<double>(c.first) / static_cast<double>(c.second));
  return m;
}

int local_constraint_count(const TravelQuery& q, bool per_tag) {
  int n = 0;
  n += q.house_rule.has_value();
  n += q.room_type.has_value();
  n += q.transport_restriction.has_value();
  if (per_tag) n += static_cast<int>(q.cuisines.size());
  else n += !q.cuisines.empty();
  return n;
}

double complexity_score(int days, int cities, int n_c) { return days * cities * (1.0 + 0.5 * n_c); }

double complexity_score(const TravelQuery& q, bool per_tag) {
  return complexity_score(q.days, q.visiting_city_number, local_constraint_count(q, per_tag));
}

std::string_view to_string(Tier t) {
  switch (t) {
    case Tier::easy: return "easy";
    case Tier::medium: return "medium";
    case Tier::hard: return "hard";
  }
  return "?";
}

std::optional<Tier> parse_tier(std::string_view s) {
  for (auto t : {Tier::easy, Tier::medium, Tier::hard})
    if (to_string(t) == to_lower(s)) return t;
  return std::nullopt;
}

TierRange tier_range(Tier t) {
  switch (t) {
    case Tier::easy: return {9.0, 20.0};
    case Tier::medium: return {20.1, 45.0};
    case Tier::hard: return {45.1, 63.0};
  }
  return {0, 0};
}

std::optional<Tier> tier_of(double c) {
  for (auto t : {Tier::easy, Tier::medium, Tier::hard}) {
    auto r = tier_range(t);
    if (c >= r.lo && c <= r.hi) return t;
  }
  return std::nullopt;
}

std::vector<DriftPoint> drift_profile(const Database& db, const TravelQuery& q, std::span<const DayPlan> plans) {
  std::vector<DriftPoint> out;
  Money cum;
  const auto D = static_cast<std::int64_t>(q.days);
  for (std::size_t i = 0; i < plans.size(); ++i) {
    DriftPoint pt;
    pt.day = static_cast<int>(i) + 1;
    try {
      pt.day_cost = cost_of_day(db, plans[i], q.people);
    } catch (const UnknownVenue&) {
      pt.day_cost = plans[i].cost;
    }
    cum += pt.day_cost;
    pt.cumulative = cum;
    pt.envelope = Money::cents(q.budget.in_cents() * std::min<std::int64_t>(pt.day, D) / D);
    pt.ratio = q.budget.in_cents() > 0
                   ? static_cast<double>(pt.day_cost.in_cents()) / static_cast<double>(q.budget.in_cents())
                   : 0.0;
    pt.within = pt.cumulative <= pt.envelope && pt.cumulative <= q.budget;
    out.push_back(pt);
  }
  return out;
}

}  // namespace himap
