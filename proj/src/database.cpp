#include "himap/database.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "himap/canonical.hpp"

namespace himap {

struct Database::Tables {
  std::vector<City> cities;
  std::vector<Flight> flights;
  std::vector<Accommodation> accommodations;
  std::vector<Restaurant> restaurants;
  std::vector<Attraction> attractions;
  std::vector<DistanceRecord> distances;

  // Indexes, rebuilt by finalize().
  std::map<std::string, std::vector<City>> by_state;
  std::map<std::string, std::vector<City>> by_name;
  std::unordered_map<std::string, std::size_t> flight_by_number;
  std::map<City, std::vector<std::size_t>> acc_by_city, rest_by_city, attr_by_city;
  std::map<std::pair<City, City>, std::size_t> distance_by_pair;

  void finalize();
};

namespace {

template <class T>
std::string name_key(const T& v) {
  return canonicalize(v.name);
}

}  // namespace

void Database::Tables::finalize() {
  std::sort(cities.begin(), cities.end(),
            [](const City& a, const City& b) { return std::tie(a.state, a.name) < std::tie(b.state, b.name); });
  std::sort(flights.begin(), flights.end(), [](const Flight& a, const Flight& b) {
    return std::tie(a.date, a.origin, a.dest, a.price, a.flight_number) <
           std::tie(b.date, b.origin, b.dest, b.price, b.flight_number);
  });
  auto by_city_price = [](const auto& a, const auto& b) { return std::tie(a.city, a.name) < std::tie(b.city, b.name); };
  std::sort(accommodations.begin(), accommodations.end(), by_city_price);
  std::sort(restaurants.begin(), restaurants.end(), by_city_price);
  std::sort(attractions.begin(), attractions.end(), by_city_price);
  std::sort(distances.begin(), distances.end(), [](const DistanceRecord& a, const DistanceRecord& b) {
    return std::tie(a.origin, a.dest) < std::tie(b.origin, b.dest);
  });

  by_state.clear();
  by_name.clear();
  for (const auto& c : cities) {
    by_state[c.state].push_back(c);
    by_name[c.name].push_back(c);
  }
  for (auto& [_, v] : by_state)
    std::sort(v.begin(), v.end(), [](const City& a, const City& b) { return a.name < b.name; });

  flight_by_number.clear();
  for (std::size_t i = 0; i < flights.size(); ++i) flight_by_number.emplace(flights[i].flight_number, i);

  acc_by_city.clear();
  rest_by_city.clear();
  attr_by_city.clear();
  for (std::size_t i = 0; i < accommodations.size(); ++i) acc_by_city[accommodations[i].city].push_back(i);
  for (std::size_t i = 0; i < restaurants.size(); ++i) rest_by_city[restaurants[i].city].push_back(i);
  for (std::size_t i = 0; i < attractions.size(); ++i) attr_by_city[attractions[i].city].push_back(i);

  distance_by_pair.clear();
  for (std::size_t i = 0; i < distances.size(); ++i)
    distance_by_pair.emplace(std::make_pair(distances[i].origin, distances[i].dest), i);
}

Database::Database() : t_(std::make_shared<Tables>()) {}
Database::Database(std::shared_ptr<const Tables> t) : t_(std::move(t)) {}

std::span<const City> Database::cities() const { return t_->cities; }
std::span<const Flight> Database::flights() const { return t_->flights; }
std::span<const Accommodation> Database::accommodations() const { return t_->accommodations; }
std::span<const Restaurant> Database::restaurants() const { return t_->restaurants; }
std::span<const Attraction> Database::attractions() const { return t_->attractions; }
std::span<const DistanceRecord> Database::distances() const { return t_->distances; }

bool operator==(const Database& a, const Database& b) {
  const auto& x = *a.t_;
  const auto& y = *b.t_;
  auto flight_eq = [](const Flight& p, const Flight& q) {
    return std::tie(p.flight_number, p.origin, p.dest, p.date, p.price, p.dep_time, p.arr_time) ==
           std::tie(q.flight_number, q.origin, q.dest, q.date, q.price, q.dep_time, q.arr_time);
  };
  auto acc_eq = [](const Accommodation& p, const Accommodation& q) {
    return std::tie(p.name, p.city, p.price_per_night, p.room_type, p.prohibited, p.minimum_nights,
                    p.maximum_occupancy) == std::tie(q.name, q.city, q.price_per_night, q.room_type, q.prohibited,
                                                     q.minimum_nights, q.maximum_occupancy);
  };
  auto rest_eq = [](const Restaurant& p, const Restaurant& q) {
    return std::tie(p.name, p.city, p.cuisine, p.avg_cost) == std::tie(q.name, q.city, q.cuisine, q.avg_cost);
  };
  auto attr_eq = [](const Attraction& p, const Attraction& q) {
    return std::tie(p.name, p.city) == std::tie(q.name, q.city);
  };
  auto dist_eq = [](const DistanceRecord& p, const DistanceRecord& q) {
    return std::tie(p.origin, p.dest, p.metres) == std::tie(q.origin, q.dest, q.metres);
  };
  return x.cities == y.cities && std::ranges::equal(x.flights, y.flights, flight_eq) &&
         std::ranges::equal(x.accommodations, y.accommodations, acc_eq) &&
         std::ranges::equal(x.restaurants, y.restaurants, rest_eq) &&
         std::ranges::equal(x.attractions, y.attractions, attr_eq) &&
         std::ranges::equal(x.distances, y.distances, dist_eq);
}

// ---------------------------------------------------------------------------
// Searches

std::optional<std::vector<City>> Database::city_search(std::string_view state) const {
  auto it = t_->by_state.find(trim(state));
  if (it == t_->by_state.end()) return std::nullopt;
  return it->second;
}

std::vector<Flight> Database::flight_search(const City& origin, const City& dest, Date date) const {
  std::vector<Flight> out;
  for (const auto& f : t_->flights)
    if (f.date == date && f.origin == origin && f.dest == dest) out.push_back(f);
  std::sort(out.begin(), out.end(), [](const Flight& a, const Flight& b) {
    return std::tie(a.price, a.flight_number) < std::tie(b.price, b.flight_number);
  });
  return out;
}

namespace {

template <class T, class Key>
std::vector<T> collect_sorted(const std::vector<T>& table, const std::map<City, std::vector<std::size_t>>& index,
                              const City& city, Key key) {
  std::vector<T> out;
  if (auto it = index.find(city); it != index.end())
    for (auto i : it->second) out.push_back(table[i]);
  std::sort(out.begin(), out.end(), [&](const T& a, const T& b) {
    auto ka = key(a), kb = key(b);
    if (ka != kb) return ka < kb;
    return canonicalize(a.name) < canonicalize(b.name);
  });
  return out;
}

}  // namespace

std::vector<Accommodation> Database::accommodation_search(const City& city, int people) const {
  auto all = collect_sorted(t_->accommodations, t_->acc_by_city, city,
                            [](const Accommodation& a) { return a.price_per_night; });
  std::erase_if(all, [&](const Accommodation& a) { return a.maximum_occupancy < people; });
  return all;
}

std::vector<Restaurant> Database::restaurant_search(const City& city) const {
  return collect_sorted(t_->restaurants, t_->rest_by_city, city, [](const Restaurant& r) { return r.avg_cost; });
}

std::vector<Attraction> Database::attraction_search(const City& city) const {
  return collect_sorted(t_->attractions, t_->attr_by_city, city, [](const Attraction&) { return 0; });
}

std::optional<GroundQuote> Database::distance_search(const City& origin, const City& dest) const {
  auto it = t_->distance_by_pair.find({origin, dest});
  if (it == t_->distance_by_pair.end()) it = t_->distance_by_pair.find({dest, origin});
  if (it == t_->distance_by_pair.end()) return std::nullopt;
  return quote_ground(t_->distances[it->second].metres);
}

const Flight* Database::find_flight(std::string_view number) const {
  auto it = t_->flight_by_number.find(std::string(trim(number)));
  return it == t_->flight_by_number.end() ? nullptr : &t_->flights[it->second];
}

namespace {

template <class T>
const T* resolve(const std::vector<T>& table, const std::map<City, std::vector<std::size_t>>& index,
                 std::string_view name, const City& city) {
  auto it = index.find(city);
  if (it == index.end()) return nullptr;
  std::string want = canonicalize(name);
  if (want.empty()) return nullptr;
  const T* contained = nullptr;
  std::string contained_key;
  for (auto i : it->second) {
    std::string key = canonicalize(table[i].name);
    if (key == want) return &table[i];
    if (key.find(want) != std::string::npos && (!contained || key < contained_key)) {
      contained = &table[i];
      contained_key = key;
    }
  }
  return contained;
}

}  // namespace

const Restaurant* Database::resolve_restaurant(std::string_view name, const City& city) const {
  return resolve(t_->restaurants, t_->rest_by_city, name, city);
}
const Accommodation* Database::resolve_accommodation(std::string_view name, const City& city) const {
  return resolve(t_->accommodations, t_->acc_by_city, name, city);
}
const Attraction* Database::resolve_attraction(std::string_view name, const City& city) const {
  return resolve(t_->attractions, t_->attr_by_city, name, city);
}

bool Database::has_city(const City& c) const {
  auto it = t_->by_state.find(c.state);
  return it != t_->by_state.end() && std::ranges::find(it->second, c) != it->second.end();
}

bool Database::has_state(std::string_view state) const { return t_->by_state.contains(std::string(state)); }

std::vector<City> Database::cities_named(std::string_view name) const {
  auto it = t_->by_name.find(std::string(trim(name)));
  if (it == t_->by_name.end()) return {};
  return it->second;
}

// ---------------------------------------------------------------------------
// Builder

Database::Builder::Builder() : t_(std::make_unique<Tables>()) {}
Database::Builder::~Builder() = default;
Database::Builder::Builder(Builder&&) noexcept = default;
Database::Builder& Database::Builder::operator=(Builder&&) noexcept = default;

Database::Builder& Database::Builder::add_city(City c) {
  t_->cities.push_back(std::move(c));
  return *this;
}
Database::Builder& Database::Builder::add_flight(Flight f) {
  if (f.price < Money{}) throw InvalidArgument("flight price must be non-negative: " + f.flight_number);
  if (f.origin == f.dest) throw InvalidArgument("flight origin equals destination: " + f.flight_number);
  t_->flights.push_back(std::move(f));
  return *this;
}
Database::Builder& Database::Builder::add_accommodation(Accommodation a) {
  if (a.minimum_nights < 1) throw InvalidArgument("minimum_nights must be >= 1: " + a.name);
  if (a.maximum_occupancy < 1) throw InvalidArgument("maximum_occupancy must be >= 1: " + a.name);
  if (a.price_per_night < Money{}) throw InvalidArgument("price must be non-negative: " + a.name);
  t_->accommodations.push_back(std::move(a));
  return *this;
}
Database::Builder& Database::Builder::add_restaurant(Restaurant r) {
  if (r.avg_cost < Money{}) throw InvalidArgument("avg_cost must be non-negative: " + r.name);
  t_->restaurants.push_back(std::move(r));
  return *this;
}
Database::Builder& Database::Builder::add_attraction(Attraction a) {
  t_->attractions.push_back(std::move(a));
  return *this;
}
Database::Builder& Database::Builder::add_distance(DistanceRecord d) {
  if (d.metres < 0) throw InvalidArgument("distance must be non-negative");
  t_->distances.push_back(std::move(d));
  return *this;
}

Database Database::Builder::build() const {
  auto t = std::make_shared<Tables>(*t_);
  std::set<City> cities(t->cities.begin(), t->cities.end());
  if (cities.size() != t->cities.size()) throw InvalidArgument("duplicate (city, state) pair");
  auto need = [&](const City& c, const std::string& what) {
    if (!cities.contains(c)) throw InvalidArgument(what + " references unknown city " + c.display());
  };
  std::set<std::string> numbers;
  for (const auto& f : t->flights) {
    need(f.origin, "flight " + f.flight_number);
    need(f.dest, "flight " + f.flight_number);
    if (!numbers.insert(f.flight_number).second) throw InvalidArgument("duplicate flight number " + f.flight_number);
  }
  std::set<std::pair<City, std::string>> attr_keys;
  for (const auto& a : t->accommodations) need(a.city, "accommodation " + a.name);
  for (const auto& r : t->restaurants) need(r.city, "restaurant " + r.name);
  for (const auto& a : t->attractions) {
    need(a.city, "attraction " + a.name);
    if (!attr_keys.insert({a.city, a.name}).second) throw InvalidArgument("duplicate attraction " + a.name);
  }
  std::set<std::pair<City, City>> pairs;
  for (const auto& d : t->distances) {
    need(d.origin, "distance");
    need(d.dest, "distance");
    if (!pairs.insert({d.origin, d.dest}).second) throw InvalidArgument("duplicate distance record");
  }
  t->finalize();
  return Database(std::move(t));
}

// ---------------------------------------------------------------------------
// CSV

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t i = 0;
  if (text.substr(0, 3) == "\xEF\xBB\xBF") i = 3;  // BOM
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
    row.clear();
  };
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n') {
      end_row();
    } else if (c == '\r') {
      // swallowed; '\n' ends the row
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  if (field_started || !field.empty() || !row.empty()) end_row();
  return rows;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

namespace {

struct CsvTable {
  std::string file;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t col(const std::string& name) const {
    auto it = std::ranges::find(header, name);
    return static_cast<std::size_t>(it - header.begin());
  }
};

CsvTable read_table(const std::filesystem::path& dir, const std::string& file,
                    const std::vector<std::string>& columns) {
  auto path = dir / file;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFile(path);
  std::stringstream ss;
  ss << in.rdbuf();
  auto rows = parse_csv(ss.str());
  if (rows.empty()) throw SchemaViolation(file, 0, columns.front(), "missing header row");
  CsvTable t{file, rows.front(), {}};
  for (auto& h : t.header) h = trim(h);
  for (const auto& c : columns)
    if (std::ranges::find(t.header, c) == t.header.end()) throw SchemaViolation(file, 0, c, "missing column");
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != t.header.size())
      throw SchemaViolation(file, r, columns.front(),
                            "expected " + std::to_string(t.header.size()) + " fields, found " +
                                std::to_string(rows[r].size()));
    t.rows.push_back(std::move(rows[r]));
  }
  return t;
}

struct RowReader {
  const CsvTable& t;
  std::size_t r;  // index into t.rows

  std::string str(const std::string& c) const {
    auto v = trim(t.rows[r][t.col(c)]);
    if (v.empty()) fail(c, "empty value");
    return v;
  }
  [[noreturn]] void fail(const std::string& c, const std::string& why) const {
    throw SchemaViolation(t.file, r + 1, c, why);
  }
  Money money(const std::string& c) const {
    auto m = Money::parse(str(c));
    if (!m) fail(c, "not a non-negative currency amount");
    return *m;
  }
  int positive(const std::string& c) const {
    auto s = str(c);
    int v = 0;
    for (char ch : s) {
      if (!std::isdigit(static_cast<unsigned char>(ch)) || v > 100000) fail(c, "not a positive integer");
      v = v * 10 + (ch - '0');
    }
    if (v < 1) fail(c, "must be >= 1");
    return v;
  }
  City city(const std::string& cc, const std::string& sc) const { return City{str(cc), str(sc)}; }
};

std::int64_t parse_metres(const RowReader& rr, const std::string& c) {
  auto s = rr.str(c);
  std::int64_t whole = 0, frac = 0;
  int digits = 0;
  bool dot = false;
  for (char ch : s) {
    if (ch == '.') {
      if (dot) rr.fail(c, "malformed number");
      dot = true;
    } else if (std::isdigit(static_cast<unsigned char>(ch))) {
      if (dot) {
        if (digits < 3) {
          frac = frac * 10 + (ch - '0');
          ++digits;
        }
      } else {
        whole = whole * 10 + (ch - '0');
      }
    } else {
      rr.fail(c, "not a non-negative decimal");
    }
  }
  while (digits < 3) {
    frac *= 10;
    ++digits;
  }
  return whole * 1000 + frac;
}

std::string metres_text(std::int64_t m) {
  std::string s = std::to_string(m / 1000);
  std::int64_t frac = m % 1000;
  if (frac == 0) return s;
  std::string f = std::to_string(frac);
  f.insert(0, 3 - f.size(), '0');
  while (f.back() == '0') f.pop_back();
  return s + "." + f;
}

std::set<HouseRule> parse_rules(const RowReader& rr, const std::string& c) {
  std::set<HouseRule> out;
  std::string s = trim(rr.t.rows[rr.r][rr.t.col(c)]);
  if (s.empty() || s == kNone) return out;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto amp = s.find('&', start);
    auto piece = trim(std::string_view(s).substr(start, amp == std::string::npos ? std::string::npos : amp - start));
    if (!piece.empty()) {
      auto rule = parse_house_rule(piece);
      if (!rule) rr.fail(c, "unknown house rule '" + piece + "'");
      out.insert(*rule);
    }
    if (amp == std::string::npos) break;
    start = amp + 1;
  }
  return out;
}

std::string rules_text(const std::set<HouseRule>& rules) {
  std::string out;
  for (auto r : rules) {
    if (!out.empty()) out += " & ";
    out += prohibition_label(r);
  }
  return out.empty() ? std::string(kNone) : out;
}

}  // namespace

Database Database::load(const std::filesystem::path& dir) {
  Builder b;
  auto cities = read_table(dir, "cities.csv", {"city", "state"});
  auto flights = read_table(dir, "flights.csv",
                            {"flight_number", "origin_city", "origin_state", "dest_city", "dest_state", "date",
                             "price", "dep_time", "arr_time"});
  auto accs = read_table(dir, "accommodations.csv",
                         {"name", "city", "state", "price", "room_type", "house_rules", "minimum_nights",
                          "maximum_occupancy"});
  auto rests = read_table(dir, "restaurants.csv", {"name", "city", "state", "cuisine", "avg_cost"});
  auto attrs = read_table(dir, "attractions.csv", {"name", "city", "state"});
  auto dists = read_table(dir, "distances.csv", {"origin_city", "origin_state", "dest_city", "dest_state", "km"});

  std::set<City> known;
  for (std::size_t r = 0; r < cities.rows.size(); ++r) {
    RowReader rr{cities, r};
    City c = rr.city("city", "state");
    if (!known.insert(c).second) rr.fail("city", "duplicate (city, state) pair");
    b.add_city(std::move(c));
  }
  auto known_city = [&](const RowReader& rr, const std::string& cc, const std::string& sc) {
    City c = rr.city(cc, sc);
    if (!known.contains(c)) rr.fail(cc, "unknown city " + c.display());
    return c;
  };

  std::set<std::string> numbers;
  for (std::size_t r = 0; r < flights.rows.size(); ++r) {
    RowReader rr{flights, r};
    Flight f;
    f.flight_number = rr.str("flight_number");
    if (!numbers.insert(f.flight_number).second) rr.fail("flight_number", "duplicate flight number");
    f.origin = known_city(rr, "origin_city", "origin_state");
    f.dest = known_city(rr, "dest_city", "dest_state");
    if (f.origin == f.dest) rr.fail("dest_city", "origin equals destination");
    auto d = Date::parse(rr.str("date"));
    if (!d) rr.fail("date", "not an ISO-8601 date");
    f.date = *d;
    f.price = rr.money("price");
    auto dep = WallTime::parse(rr.str("dep_time"));
    auto arr = WallTime::parse(rr.str("arr_time"));
    if (!dep) rr.fail("dep_time", "not HH:MM");
    if (!arr) rr.fail("arr_time", "not HH:MM");
    f.dep_time = *dep;
    f.arr_time = *arr;
    b.add_flight(std::move(f));
  }

  for (std::size_t r = 0; r < accs.rows.size(); ++r) {
    RowReader rr{accs, r};
    Accommodation a;
    a.name = rr.str("name");
    a.city = known_city(rr, "city", "state");
    a.price_per_night = rr.money("price");
    auto rt = parse_room_type(rr.str("room_type"));
    if (!rt) rr.fail("room_type", "unknown room type");
    a.room_type = *rt;
    a.prohibited = parse_rules(rr, "house_rules");
    a.minimum_nights = rr.positive("minimum_nights");
    a.maximum_occupancy = rr.positive("maximum_occupancy");
    b.add_accommodation(std::move(a));
  }

  for (std::size_t r = 0; r < rests.rows.size(); ++r) {
    RowReader rr{rests, r};
    Restaurant x;
    x.name = rr.str("name");
    x.city = known_city(rr, "city", "state");
    auto cu = parse_cuisine(rr.str("cuisine"));
    if (!cu) rr.fail("cuisine", "unknown cuisine");
    x.cuisine = *cu;
    x.avg_cost = rr.money("avg_cost");
    b.add_restaurant(std::move(x));
  }

  std::set<std::pair<City, std::string>> attr_keys;
  for (std::size_t r = 0; r < attrs.rows.size(); ++r) {
    RowReader rr{attrs, r};
    Attraction a{rr.str("name"), known_city(rr, "city", "state")};
    if (!attr_keys.insert({a.city, a.name}).second) rr.fail("name", "duplicate attraction in city");
    b.add_attraction(std::move(a));
  }

  std::set<std::pair<City, City>> pairs;
  for (std::size_t r = 0; r < dists.rows.size(); ++r) {
    RowReader rr{dists, r};
    DistanceRecord d{known_city(rr, "origin_city", "origin_state"), known_city(rr, "dest_city", "dest_state"),
                     parse_metres(rr, "km")};
    if (!pairs.insert({d.origin, d.dest}).second) rr.fail("origin_city", "duplicate distance pair");
    b.add_distance(std::move(d));
  }
  return b.build();
}

void Database::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + (dir / name).string());
    return out;
  };
  auto row = [](std::ofstream& out, std::initializer_list<std::string> fields) {
    bool first = true;
    for (const auto& f : fields) {
      if (!first) out << ',';
      out << csv_escape(f);
      first = false;
    }
    out << '\n';
  };
  {
    auto out = open("cities.csv");
    row(out, {"city", "state"});
    for (const auto& c : t_->cities) row(out, {c.name, c.state});
  }
  {
    auto out = open("flights.csv");
    row(out, {"flight_number", "origin_city", "origin_state", "dest_city", "dest_state", "date", "price",
              "dep_time", "arr_time"});
    for (const auto& f : t_->flights)
      row(out, {f.flight_number, f.origin.name, f.origin.state, f.dest.name, f.dest.state, f.date.str(),
                f.price.plain(), f.dep_time.str(), f.arr_time.str()});
  }
  {
    auto out = open("accommodations.csv");
    row(out, {"name", "city", "state", "price", "room_type", "house_rules", "minimum_nights", "maximum_occupancy"});
    for (const auto& a : t_->accommodations)
      row(out, {a.name, a.city.name, a.city.state, a.price_per_night.plain(), std::string(to_string(a.room_type)),
                rules_text(a.prohibited), std::to_string(a.minimum_nights), std::to_string(a.maximum_occupancy)});
  }
  {
    auto out = open("restaurants.csv");
    row(out, {"name", "city", "state", "cuisine", "avg_cost"});
    for (const auto& r : t_->restaurants)
      row(out, {r.name, r.city.name, r.city.state, std::string(to_string(r.cuisine)), r.avg_cost.plain()});
  }
  {
    auto out = open("attractions.csv");
    row(out, {"name", "city", "state"});
    for (const auto& a : t_->attractions) row(out, {a.name, a.city.name, a.city.state});
  }
  {
    auto out = open("distances.csv");
    row(out, {"origin_city", "origin_state", "dest_city", "dest_state", "km"});
    for (const auto& d : t_->distances)
      row(out, {d.origin.name, d.origin.state, d.dest.name, d.dest.state, metres_text(d.metres)});
  }
}

// ---------------------------------------------------------------------------
// Cost

std::optional<Money> transport_cost(const Database& db, std::string_view transportation, const DayLeg& leg,
                                    int people, CostOptions opts) {
  std::string t = trim(transportation);
  if (t.empty()) return std::nullopt;
  if (t == kNone) return Money{};
  std::int64_t scale = opts.per_person_transport ? people : 1;
  if (t == kTaxi || t == kSelfDriving) {
    if (!leg.travel) return std::nullopt;
    auto q = db.distance_search(leg.from, leg.to);
    if (!q) return std::nullopt;
    return (t == kTaxi ? q->taxi_cost : q->selfdrive_cost) * scale;
  }
  const Flight* f = db.find_flight(t);
  if (!f) return std::nullopt;
  return f->price * scale;
}

Money cost_of_day(const Database& db, const DayPlan& plan, int people, CostOptions opts) {
  Money total;
  auto is_none = [](const std::string& s) { return trim(s) == kNone; };

  if (!is_none(plan.transportation)) {
    auto leg = parse_current_city(plan.current_city);
    auto c = leg ? transport_cost(db, plan.transportation, *leg, people, opts) : std::nullopt;
    if (!c) throw UnknownVenue(plan.transportation, "transportation");
    total += *c;
  }

  struct MealField {
    const std::string* value;
    const char* field;
  };
  for (auto [value, field] : {MealField{&plan.breakfast, "breakfast"}, MealField{&plan.lunch, "lunch"},
                              MealField{&plan.dinner, "dinner"}}) {
    if (is_none(*value)) continue;
    auto ref = VenueRef::parse(*value);
    const Restaurant* r = ref ? db.resolve_restaurant(ref->name, ref->city) : nullptr;
    if (!r) throw UnknownVenue(*value, field);
    total += r->avg_cost * people;
  }

  if (!is_none(plan.accommodation)) {
    auto ref = VenueRef::parse(plan.accommodation);
    const Accommodation* a = ref ? db.resolve_accommodation(ref->name, ref->city) : nullptr;
    if (!a) throw UnknownVenue(plan.accommodation, "accommodation");
    total += a->price_per_night;
  }
  return total;
}

}  // namespace himap
