#pragma once
// Straight-line re-implementation of the 13 itinerary checks, written from the
// constraint table without calling into the evaluator, the cost function or
// the database resolvers. Only raw table spans are read from the Database.

#include <array>
#include <cctype>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "himap/database.hpp"
#include "himap/types.hpp"

namespace oracle {

using namespace himap;

// nullopt = not applicable
using Outcome = std::optional<bool>;

struct Result {
  std::array<Outcome, 13> v{};
  bool hard_pass = false;
  bool final_pass = false;
};

inline std::string strip(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline std::string key_of(const std::string& s) {
  std::string out;
  bool space = false;
  for (unsigned char c : s) {
    if (std::ispunct(c)) continue;
    if (std::isspace(c)) {
      space = !out.empty();
      continue;
    }
    if (space) out += ' ';
    space = false;
    out += static_cast<char>(std::tolower(c));
  }
  return out;
}

struct Place {
  std::string name, state;
  bool operator==(const Place&) const = default;
};

inline std::optional<Place> place(const std::string& raw) {
  std::string t = strip(raw);
  if (t.size() < 4 || t.back() != ')') return std::nullopt;
  auto open = t.rfind('(');
  if (open == std::string::npos || open == 0) return std::nullopt;
  Place p{strip(t.substr(0, open)), strip(t.substr(open + 1, t.size() - open - 2))};
  if (p.name.empty() || p.state.empty()) return std::nullopt;
  return p;
}

struct Leg {
  Place from, to;
  bool moving;
};

inline std::optional<Leg> leg(const std::string& raw) {
  std::string t = strip(raw);
  if (t.compare(0, 5, "from ") == 0) {
    auto k = t.find(" to ", 5);
    if (k == std::string::npos) return std::nullopt;
    auto a = place(t.substr(5, k - 5));
    auto b = place(t.substr(k + 4));
    if (!a || !b) return std::nullopt;
    return Leg{*a, *b, true};
  }
  auto c = place(t);
  if (!c) return std::nullopt;
  return Leg{*c, *c, false};
}

struct Ref {
  std::string name;
  Place city;
};

inline std::optional<Ref> venue(const std::string& raw) {
  std::string t = strip(raw);
  auto k = t.rfind(", ");
  if (k == std::string::npos || k == 0) return std::nullopt;
  auto c = place(t.substr(k + 2));
  std::string n = strip(t.substr(0, k));
  if (!c || n.empty()) return std::nullopt;
  return Ref{n, *c};
}

inline std::vector<std::string> attraction_list(const std::string& field) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    std::string s = strip(cur);
    if (!s.empty() && s != "-") out.push_back(s);
    cur.clear();
  };
  for (char c : field) {
    if (c == ';') flush();
    else cur += c;
  }
  flush();
  return out;
}

inline Place as_place(const City& c) { return {c.name, c.state}; }

template <class Row>
const Row* lookup(std::span<const Row> rows, const std::string& raw_name, const Place& city) {
  std::string want = key_of(raw_name);
  if (want.empty()) return nullptr;
  const Row* best = nullptr;
  std::string best_key;
  for (const auto& r : rows) {
    if (!(as_place(r.city) == city)) continue;
    std::string k = key_of(r.name);
    if (k == want) return &r;
    if (k.find(want) != std::string::npos && (!best || k < best_key)) {
      best = &r;
      best_key = k;
    }
  }
  return best;
}

template <class Row>
const Row* lookup_field(std::span<const Row> rows, const std::string& field) {
  auto r = venue(field);
  if (!r) return nullptr;
  return lookup(rows, r->name, r->city);
}

enum class How { none, flight, taxi, drive };
inline How how(const std::string& t) {
  std::string s = strip(t);
  if (s == "-") return How::none;
  if (s == "Taxi") return How::taxi;
  if (s == "Self-driving") return How::drive;
  return How::flight;
}

inline bool city_exists(const Database& db, const Place& p) {
  for (const auto& c : db.cities())
    if (as_place(c) == p) return true;
  return false;
}

inline const DistanceRecord* distance(const Database& db, const Place& a, const Place& b) {
  for (const auto& d : db.distances())
    if ((as_place(d.origin) == a && as_place(d.dest) == b) || (as_place(d.origin) == b && as_place(d.dest) == a))
      return &d;
  return nullptr;
}

inline const Flight* flight(const Database& db, const std::string& number) {
  for (const auto& f : db.flights())
    if (f.flight_number == strip(number)) return &f;
  return nullptr;
}

inline bool is_dash(const std::string& s) { return strip(s) == "-"; }

// Cents of one day, nullopt when any item cannot be priced.
inline std::optional<std::int64_t> day_cents(const Database& db, const DayPlan& p, int people) {
  std::int64_t sum = 0;
  How h = how(p.transportation);
  if (h != How::none) {
    auto l = leg(p.current_city);
    if (!l) return std::nullopt;
    if (h == How::flight) {
      const Flight* f = flight(db, p.transportation);
      if (!f || strip(p.transportation).empty()) return std::nullopt;
      sum += f->price.in_cents();
    } else {
      if (!l->moving) return std::nullopt;
      const DistanceRecord* d = distance(db, l->from, l->to);
      if (!d) return std::nullopt;
      // $1 per whole km, $1 per whole 20 km
      sum += (h == How::taxi ? d->metres / 1000 : d->metres / 20000) * 100;
    }
  }
  for (const std::string* m : {&p.breakfast, &p.lunch, &p.dinner}) {
    if (is_dash(*m)) continue;
    const Restaurant* r = lookup_field(db.restaurants(), *m);
    if (!r) return std::nullopt;
    sum += r->avg_cost.in_cents() * people;
  }
  if (!is_dash(p.accommodation)) {
    const Accommodation* a = lookup_field(db.accommodations(), p.accommodation);
    if (!a) return std::nullopt;
    sum += a->price_per_night.in_cents();
  }
  return sum;
}

inline bool room_ok(RoomRequirement need, RoomType have) {
  switch (need) {
    case RoomRequirement::entire_room: return have == RoomType::entire_room;
    case RoomRequirement::private_room: return have == RoomType::private_room;
    case RoomRequirement::shared_room: return have == RoomType::shared_room;
    case RoomRequirement::not_shared: return have != RoomType::shared_room;
  }
  return false;
}

inline Result check(const Database& db, const TravelQuery& q, const std::vector<DayPlan>& plan) {
  Result r;
  if (plan.empty()) {
    for (auto& v : r.v) v = false;
    return r;
  }
  const int D = q.days;
  const std::size_t n = plan.size();

  // 0 is_not_absent
  {
    bool ok = static_cast<int>(n) == D;
    for (std::size_t i = 0; ok && i < n; ++i) {
      const auto& p = plan[i];
      if (p.day != static_cast<int>(i) + 1) ok = false;
      for (const std::string* f : {&p.current_city, &p.transportation, &p.breakfast, &p.attraction, &p.lunch,
                                   &p.dinner, &p.accommodation})
        if (strip(*f).empty()) ok = false;
      if (is_dash(p.current_city)) ok = false;
      if (static_cast<int>(i) + 1 < D && is_dash(p.accommodation)) ok = false;
    }
    r.v[0] = ok;
  }

  // 1 sandbox
  {
    bool ok = true;
    for (const auto& p : plan) {
      auto l = leg(p.current_city);
      if (!l || !city_exists(db, l->from) || !city_exists(db, l->to)) {
        ok = false;
        break;
      }
      How h = how(p.transportation);
      if (h == How::taxi || h == How::drive) {
        if (!l->moving || !distance(db, l->from, l->to)) ok = false;
      } else if (h == How::flight) {
        const Flight* f = flight(db, p.transportation);
        if (!f || !l->moving || !(as_place(f->origin) == l->from) || !(as_place(f->dest) == l->to) ||
            f->date != q.start_date.plus_days(p.day - 1))
          ok = false;
      }
      for (const std::string* m : {&p.breakfast, &p.lunch, &p.dinner})
        if (!is_dash(*m) && !lookup_field(db.restaurants(), *m)) ok = false;
      for (const auto& a : attraction_list(p.attraction))
        if (!lookup_field(db.attractions(), a)) ok = false;
      if (!is_dash(p.accommodation) && !lookup_field(db.accommodations(), p.accommodation)) ok = false;
      if (!ok) break;
    }
    r.v[1] = ok;
  }

  // 2 current city
  {
    bool ok = true;
    for (const auto& p : plan) {
      auto l = leg(p.current_city);
      if (!l) continue;
      std::vector<std::string> items{p.breakfast, p.lunch, p.dinner, p.accommodation};
      for (const auto& a : attraction_list(p.attraction)) items.push_back(a);
      for (const auto& it : items) {
        if (is_dash(it)) continue;
        auto v = venue(it);
        if (v && !(v->city == l->from) && !(v->city == l->to)) ok = false;
      }
    }
    r.v[2] = ok;
  }

  // 3 visiting cities
  {
    bool ok = true;
    std::vector<Leg> legs;
    for (const auto& p : plan) {
      auto l = leg(p.current_city);
      if (!l) {
        ok = false;
        break;
      }
      legs.push_back(*l);
    }
    const Place home = as_place(q.origin);
    if (ok) {
      if (!legs.front().moving || !(legs.front().from == home)) ok = false;
      if (!legs.back().moving || !(legs.back().to == home)) ok = false;
      for (std::size_t i = 0; i + 1 < legs.size(); ++i)
        if (!(legs[i].to == legs[i + 1].from)) ok = false;
    }
    if (ok) {
      std::vector<Place> order;
      for (std::size_t i = 0; i + 1 < legs.size(); ++i) {
        const Place& c = legs[i].to;
        if (c == home) ok = false;
        if (order.empty() || !(order.back() == c)) {
          for (const auto& o : order)
            if (o == c) ok = false;
          order.push_back(c);
        }
      }
      std::string dest = strip(q.destination);
      for (const auto& c : order)
        if (c.state != dest && c.name != dest && c.name + "(" + c.state + ")" != dest) ok = false;
      if (static_cast<int>(order.size()) != q.visiting_city_number) ok = false;
    }
    r.v[3] = ok;
  }

  // 4 restaurants, 5 attractions
  {
    std::vector<std::string> meals, sights;
    for (const auto& p : plan) {
      for (const std::string* m : {&p.breakfast, &p.lunch, &p.dinner})
        if (!is_dash(*m)) meals.push_back(strip(*m));
      for (const auto& a : attraction_list(p.attraction)) sights.push_back(a);
    }
    auto unique = [](std::vector<std::string> v) {
      for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j)
          if (v[i] == v[j]) return false;
      return true;
    };
    r.v[4] = unique(meals);
    r.v[5] = unique(sights);
  }

  // 6 transportation
  {
    bool ok = how(plan.front().transportation) != How::none;
    bool drive = false, other = false;
    for (const auto& p : plan) {
      How h = how(p.transportation);
      drive = drive || h == How::drive;
      other = other || h == How::flight || h == How::taxi;
    }
    r.v[6] = ok && !(drive && other);
  }

  // 7 accommodation minimum nights over runs of identical entries
  {
    bool ok = true;
    for (std::size_t i = 0; i < n;) {
      std::size_t j = i;
      while (j < n && strip(plan[j].accommodation) == strip(plan[i].accommodation)) ++j;
      if (!is_dash(plan[i].accommodation)) {
        const Accommodation* a = lookup_field(db.accommodations(), plan[i].accommodation);
        if (a && static_cast<int>(j - i) < a->minimum_nights) ok = false;
      }
      i = j;
    }
    r.v[7] = ok;
  }

  // 8 cost
  {
    bool ok = true;
    std::int64_t total = 0;
    for (const auto& p : plan) {
      auto c = day_cents(db, p, q.people);
      if (!c) {
        ok = false;
        break;
      }
      total += *c;
    }
    r.v[8] = ok && total <= q.budget.in_cents();
  }

  std::vector<const Accommodation*> stays;
  for (const auto& p : plan)
    if (!is_dash(p.accommodation))
      if (auto a = lookup_field(db.accommodations(), p.accommodation)) stays.push_back(a);

  // 9 house rule
  if (q.house_rule) {
    bool ok = true;
    for (auto a : stays)
      if (a->prohibited.count(*q.house_rule)) ok = false;
    r.v[9] = ok;
  }
  // 10 cuisine
  if (!q.cuisines.empty()) {
    std::set<Cuisine> got;
    for (const auto& p : plan)
      for (const std::string* m : {&p.breakfast, &p.lunch, &p.dinner})
        if (!is_dash(*m))
          if (auto rr = lookup_field(db.restaurants(), *m)) got.insert(rr->cuisine);
    bool ok = true;
    for (auto c : q.cuisines)
      if (!got.count(c)) ok = false;
    r.v[10] = ok;
  }
  // 11 room type
  if (q.room_type) {
    bool ok = true;
    for (auto a : stays)
      if (!room_ok(*q.room_type, a->room_type)) ok = false;
    r.v[11] = ok;
  }
  // 12 transport restriction
  if (q.transport_restriction) {
    bool ok = true;
    for (const auto& p : plan) {
      How h = how(p.transportation);
      if (*q.transport_restriction == TransportRestriction::no_flight && h == How::flight) ok = false;
      if (*q.transport_restriction == TransportRestriction::no_self_driving && h == How::drive) ok = false;
    }
    r.v[12] = ok;
  }

  auto passes = [&](std::size_t i) { return !r.v[i].has_value() || *r.v[i]; };
  bool common = true, hard = true;
  for (std::size_t i = 0; i < 8; ++i) common = common && passes(i);
  for (std::size_t i = 8; i < 13; ++i) hard = hard && passes(i);
  r.hard_pass = hard && passes(0) && passes(1);
  r.final_pass = common && r.hard_pass;
  return r;
}

}  // namespace oracle
