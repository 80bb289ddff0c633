#include "himap/types.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>

namespace himap {

// ---------------------------------------------------------------------------
// Money

std::optional<Money> Money::parse(std::string_view text) {
  std::string s;
  for (char c : text) {
    if (c == '$' || c == ',' || std::isspace(static_cast<unsigned char>(c))) continue;
    s.push_back(c);
  }
  if (s.empty()) return std::nullopt;
  std::int64_t whole = 0;
  std::int64_t frac = 0;
  int frac_digits = 0;
  bool seen_dot = false;
  bool any_digit = false;
  for (char c : s) {
    if (c == '.') {
      if (seen_dot) return std::nullopt;
      seen_dot = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    any_digit = true;
    if (seen_dot) {
      if (frac_digits == 2) {
        if (c != '0') return std::nullopt;  // sub-cent precision
        continue;
      }
      frac = frac * 10 + (c - '0');
      ++frac_digits;
    } else {
      if (whole > 900'000'000'000'000LL) return std::nullopt;
      whole = whole * 10 + (c - '0');
    }
  }
  if (!any_digit) return std::nullopt;
  if (frac_digits == 1) frac *= 10;
  return Money::cents(whole * 100 + frac);
}

Money Money::from_dollars(double d) { return Money::cents(std::llround(d * 100.0)); }

std::string Money::plain() const {
  std::int64_t c = cents_ < 0 ? -cents_ : cents_;
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s%lld.%02lld", cents_ < 0 ? "-" : "",
                static_cast<long long>(c / 100), static_cast<long long>(c % 100));
  return buf;
}

std::string Money::str() const {
  std::string p = plain();
  if (!p.empty() && p.front() == '-') return "-$" + p.substr(1);
  return "$" + p;
}

// ---------------------------------------------------------------------------
// Date / time

std::optional<Date> Date::parse(std::string_view iso) {
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') return std::nullopt;
  auto num = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
      if (!std::isdigit(static_cast<unsigned char>(iso[i]))) return std::nullopt;
      v = v * 10 + (iso[i] - '0');
    }
    return v;
  };
  auto y = num(0, 4), m = num(5, 2), d = num(8, 2);
  if (!y || !m || !d) return std::nullopt;
  std::chrono::year_month_day ymd{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*m)},
                                  std::chrono::day{static_cast<unsigned>(*d)}};
  if (!ymd.ok()) return std::nullopt;
  return Date{static_cast<int>(std::chrono::sys_days{ymd}.time_since_epoch().count())};
}

Date Date::from_ymd(int y, unsigned m, unsigned d) {
  std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!ymd.ok()) throw InvalidArgument("invalid calendar date");
  return Date{static_cast<int>(std::chrono::sys_days{ymd}.time_since_epoch().count())};
}

std::string Date::str() const {
  std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{serial_}}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::optional<WallTime> WallTime::parse(std::string_view hhmm) {
  if (hhmm.size() != 5 || hhmm[2] != ':') return std::nullopt;
  for (std::size_t i : {0u, 1u, 3u, 4u})
    if (!std::isdigit(static_cast<unsigned char>(hhmm[i]))) return std::nullopt;
  int h = (hhmm[0] - '0') * 10 + (hhmm[1] - '0');
  int m = (hhmm[3] - '0') * 10 + (hhmm[4] - '0');
  if (h > 23 || m > 59) return std::nullopt;
  return WallTime{h * 60 + m};
}

std::string WallTime::str() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d:%02d", minutes / 60, minutes % 60);
  return buf;
}

// ---------------------------------------------------------------------------
// Strings

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::optional<City> City::parse(std::string_view display) {
  std::string t = trim(display);
  if (t.size() < 4 || t.back() != ')') return std::nullopt;
  auto open = t.rfind('(');
  if (open == std::string::npos || open == 0) return std::nullopt;
  City c{trim(std::string_view(t).substr(0, open)),
         trim(std::string_view(t).substr(open + 1, t.size() - open - 2))};
  if (c.name.empty() || c.state.empty()) return std::nullopt;
  return c;
}

std::optional<VenueRef> VenueRef::parse(std::string_view text) {
  std::string t = trim(text);
  auto comma = t.rfind(", ");
  if (comma == std::string::npos || comma == 0) return std::nullopt;
  auto city = City::parse(std::string_view(t).substr(comma + 2));
  if (!city) return std::nullopt;
  std::string name = trim(std::string_view(t).substr(0, comma));
  if (name.empty()) return std::nullopt;
  return VenueRef{std::move(name), std::move(*city)};
}

std::string travel_city_label(const City& from, const City& to) {
  return "from " + from.display() + " to " + to.display();
}

std::optional<DayLeg> parse_current_city(std::string_view text) {
  std::string t = trim(text);
  if (t.rfind("from ", 0) == 0) {
    auto to_pos = t.find(" to ", 5);
    if (to_pos == std::string::npos) return std::nullopt;
    auto from = City::parse(std::string_view(t).substr(5, to_pos - 5));
    auto to = City::parse(std::string_view(t).substr(to_pos + 4));
    if (!from || !to) return std::nullopt;
    return DayLeg{std::move(*from), std::move(*to), true};
  }
  auto c = City::parse(t);
  if (!c) return std::nullopt;
  return DayLeg{*c, *c, false};
}

std::vector<std::string> split_attractions(std::string_view field) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= field.size()) {
    auto semi = field.find(';', start);
    auto piece = trim(field.substr(start, semi == std::string_view::npos ? std::string_view::npos
                                                                          : semi - start));
    if (!piece.empty() && piece != kNone) out.push_back(std::move(piece));
    if (semi == std::string_view::npos) break;
    start = semi + 1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Enumerations

std::string_view to_string(RoomType t) {
  switch (t) {
    case RoomType::entire_room: return "Entire home/apt";
    case RoomType::private_room: return "Private room";
    case RoomType::shared_room: return "Shared room";
  }
  return "?";
}

std::string_view to_string(RoomRequirement r) {
  switch (r) {
    case RoomRequirement::entire_room: return "entire room";
    case RoomRequirement::private_room: return "private room";
    case RoomRequirement::shared_room: return "shared room";
    case RoomRequirement::not_shared: return "not shared room";
  }
  return "?";
}

std::string_view to_string(HouseRule r) {
  switch (r) {
    case HouseRule::smoking: return "smoking";
    case HouseRule::parties: return "parties";
    case HouseRule::children_under_10: return "children under 10";
    case HouseRule::visitors: return "visitors";
    case HouseRule::pets: return "pets";
  }
  return "?";
}

std::string_view to_string(Cuisine c) {
  switch (c) {
    case Cuisine::american: return "American";
    case Cuisine::chinese: return "Chinese";
    case Cuisine::french: return "French";
    case Cuisine::indian: return "Indian";
    case Cuisine::italian: return "Italian";
    case Cuisine::mediterranean: return "Mediterranean";
    case Cuisine::mexican: return "Mexican";
  }
  return "?";
}

std::string_view to_string(TransportMode m) {
  switch (m) {
    case TransportMode::flight: return "flight";
    case TransportMode::self_driving: return "self-driving";
    case TransportMode::taxi: return "taxi";
  }
  return "?";
}

std::string_view to_string(TransportRestriction r) {
  switch (r) {
    case TransportRestriction::no_flight: return "no flight";
    case TransportRestriction::no_self_driving: return "no self-driving";
  }
  return "?";
}

std::string_view to_string(DayRole r) {
  switch (r) {
    case DayRole::departure: return "DEPARTURE";
    case DayRole::stay: return "STAY";
    case DayRole::transit: return "TRANSIT";
    case DayRole::ret: return "RETURN";
  }
  return "?";
}

std::string_view to_string(ViolationType v) {
  switch (v) {
    case ViolationType::budget: return "budget";
    case ViolationType::time: return "time";
    case ViolationType::availability: return "availability";
  }
  return "?";
}

std::optional<RoomType> parse_room_type(std::string_view s) {
  auto l = to_lower(trim(s));
  if (l == "entire home/apt" || l == "entire room" || l == "entire home") return RoomType::entire_room;
  if (l == "private room") return RoomType::private_room;
  if (l == "shared room") return RoomType::shared_room;
  return std::nullopt;
}

std::optional<RoomRequirement> parse_room_requirement(std::string_view s) {
  auto l = to_lower(trim(s));
  if (l == "entire room" || l == "entire home/apt") return RoomRequirement::entire_room;
  if (l == "private room") return RoomRequirement::private_room;
  if (l == "shared room") return RoomRequirement::shared_room;
  if (l == "not shared room") return RoomRequirement::not_shared;
  return std::nullopt;
}

std::optional<HouseRule> parse_house_rule(std::string_view s) {
  auto l = to_lower(trim(s));
  if (l.rfind("no ", 0) == 0) l = l.substr(3);
  for (HouseRule r : kAllHouseRules)
    if (l == to_string(r)) return r;
  return std::nullopt;
}

std::optional<Cuisine> parse_cuisine(std::string_view s) {
  auto l = to_lower(trim(s));
  for (Cuisine c : kAllCuisines)
    if (l == to_lower(to_string(c))) return c;
  return std::nullopt;
}

std::optional<TransportMode> parse_transport_mode(std::string_view s) {
  auto l = to_lower(trim(s));
  if (l == "flight") return TransportMode::flight;
  if (l == "self-driving" || l == "self driving") return TransportMode::self_driving;
  if (l == "taxi") return TransportMode::taxi;
  return std::nullopt;
}

std::optional<TransportRestriction> parse_transport_restriction(std::string_view s) {
  auto l = to_lower(trim(s));
  if (l == "no flight") return TransportRestriction::no_flight;
  if (l == "no self-driving" || l == "no self driving") return TransportRestriction::no_self_driving;
  return std::nullopt;
}

std::string prohibition_label(HouseRule r) {
  std::string s = "No " + std::string(to_string(r));
  return s;
}

bool satisfies(RoomRequirement req, RoomType t) {
  switch (req) {
    case RoomRequirement::entire_room: return t == RoomType::entire_room;
    case RoomRequirement::private_room: return t == RoomType::private_room;
    case RoomRequirement::shared_room: return t == RoomType::shared_room;
    case RoomRequirement::not_shared: return t != RoomType::shared_room;
  }
  return false;
}

GroundQuote quote_ground(std::int64_t metres) {
  // $1/km and $0.05/km, truncated to whole dollars.
  std::int64_t taxi_dollars = metres / 1000;
  std::int64_t drive_dollars = (metres * 5) / (1000 * 100);
  return GroundQuote{metres, Money::dollars(taxi_dollars), Money::dollars(drive_dollars)};
}

void TravelQuery::validate() const {
  if (days != 3 && days != 5 && days != 7)
    throw InvalidArgument("days must be one of 3, 5, 7 (got " + std::to_string(days) + ")");
  if (visiting_city_number < 1 || visiting_city_number > 3)
    throw InvalidArgument("visiting_city_number must be in 1..3");
  if (visiting_city_number > days - 1)
    throw InvalidArgument("visiting_city_number needs at least one night per city");
  if (people < 1 || people > 8) throw InvalidArgument("people must be in 1..8");
  if (budget <= Money{}) throw InvalidArgument("budget must be positive");
  if (origin.name.empty() || origin.state.empty()) throw InvalidArgument("origin must be City(State)");
  if (trim(destination).empty()) throw InvalidArgument("destination is empty");
}

}  // namespace himap
