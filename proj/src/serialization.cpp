#include "himap/serialization.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace himap {

namespace {

json money(Money m) { return m.as_dollars(); }

Money money_from(const json& j, const char* field) {
  if (j.is_number()) return Money::from_dollars(j.get<double>());
  if (j.is_string()) {
    if (auto m = Money::parse(j.get<std::string>())) return *m;
  }
  throw BadDocument(std::string("field '") + field + "' is not an amount");
}

template <class T>
json opt(const std::optional<T>& v) {
  if (!v) return nullptr;
  return std::string(to_string(*v));
}

const json& need(const json& j, const char* field) {
  if (!j.is_object() || !j.contains(field)) throw BadDocument(std::string("missing field '") + field + "'");
  return j.at(field);
}

std::string need_string(const json& j, const char* field) {
  const json& v = need(j, field);
  if (!v.is_string()) throw BadDocument(std::string("field '") + field + "' must be a string");
  return v.get<std::string>();
}

int need_int(const json& j, const char* field) {
  const json& v = need(j, field);
  if (!v.is_number_integer()) throw BadDocument(std::string("field '") + field + "' must be an integer");
  return v.get<int>();
}

template <class T, class Parse>
std::optional<T> opt_enum(const json& j, const char* field, Parse parse) {
  if (!j.contains(field) || j.at(field).is_null()) return std::nullopt;
  if (!j.at(field).is_string()) throw BadDocument(std::string("field '") + field + "' must be a string");
  auto v = parse(j.at(field).get<std::string>());
  if (!v) throw BadDocument(std::string("field '") + field + "' has unknown value '" + j.at(field).get<std::string>() + "'");
  return v;
}

}  // namespace

json to_json(const TravelQuery& q) {
  json cuisines = json::array();
  for (auto c : q.cuisines) cuisines.push_back(to_string(c));
  return {{"id", q.id},
          {"origin", q.origin.display()},
          {"destination", q.destination},
          {"start_date", q.start_date.str()},
          {"days", q.days},
          {"visiting_city_number", q.visiting_city_number},
          {"people", q.people},
          {"budget", money(q.budget)},
          {"house_rule", opt(q.house_rule)},
          {"cuisines", cuisines},
          {"room_type", opt(q.room_type)},
          {"transport_restriction", opt(q.transport_restriction)}};
}

TravelQuery query_from_json(const json& j) {
  TravelQuery q;
  q.id = j.value("id", std::string{});
  auto origin = City::parse(need_string(j, "origin"));
  if (!origin) throw BadDocument("origin must be City(State)");
  q.origin = *origin;
  q.destination = need_string(j, "destination");
  auto d = Date::parse(need_string(j, "start_date"));
  if (!d) throw BadDocument("start_date must be YYYY-MM-DD");
  q.start_date = *d;
  q.days = need_int(j, "days");
  q.visiting_city_number = need_int(j, "visiting_city_number");
  q.people = j.contains("people") ? need_int(j, "people") : 1;
  q.budget = money_from(need(j, "budget"), "budget");
  q.house_rule = opt_enum<HouseRule>(j, "house_rule", parse_house_rule);
  q.room_type = opt_enum<RoomRequirement>(j, "room_type", parse_room_requirement);
  q.transport_restriction = opt_enum<TransportRestriction>(j, "transport_restriction", parse_transport_restriction);
  if (j.contains("cuisines") && !j.at("cuisines").is_null()) {
    if (!j.at("cuisines").is_array()) throw BadDocument("cuisines must be an array");
    for (const auto& c : j.at("cuisines")) {
      auto v = c.is_string() ? parse_cuisine(c.get<std::string>()) : std::nullopt;
      if (!v) throw BadDocument("unknown cuisine " + c.dump());
      q.cuisines.push_back(*v);
    }
    std::sort(q.cuisines.begin(), q.cuisines.end());
    q.cuisines.erase(std::unique(q.cuisines.begin(), q.cuisines.end()), q.cuisines.end());
  }
  try {
    q.validate();
  } catch (const InvalidArgument& e) {
    throw BadDocument(std::string("query ") + q.id + ": " + e.what());
  }
  return q;
}

json to_json(const DayPlan& p) {
  return {{"day", p.day},
          {"current_city", p.current_city},
          {"transportation", p.transportation},
          {"breakfast", p.breakfast},
          {"attraction", p.attraction},
          {"lunch", p.lunch},
          {"dinner", p.dinner},
          {"accommodation", p.accommodation},
          {"cost", money(p.cost)}};
}

DayPlan day_plan_from_json(const json& j) {
  DayPlan p;
  if (!j.is_object()) throw BadDocument("day plan must be an object");
  if (j.contains("day")) p.day = need_int(j, "day");
  else p.day = need_int(j, "days");
  p.current_city = need_string(j, "current_city");
  p.transportation = need_string(j, "transportation");
  p.breakfast = need_string(j, "breakfast");
  p.attraction = need_string(j, "attraction");
  p.lunch = need_string(j, "lunch");
  p.dinner = need_string(j, "dinner");
  p.accommodation = need_string(j, "accommodation");
  if (j.contains("cost")) p.cost = money_from(j.at("cost"), "cost");
  return p;
}

std::vector<DayPlan> plans_from_json(const json& j) {
  if (!j.is_array()) throw BadDocument("plan must be a JSON array of day plans");
  std::vector<DayPlan> out;
  for (const auto& d : j) out.push_back(day_plan_from_json(d));
  return out;
}

json to_json(std::span<const DayPlan> plans) {
  json a = json::array();
  for (const auto& p : plans) a.push_back(to_json(p));
  return a;
}

json to_json(const ConstraintVerdict& v) {
  std::string verdict = v.verdict == Verdict::pass ? "pass" : v.verdict == Verdict::fail ? "fail" : "n/a";
  json j = {{"name", v.name}, {"verdict", verdict}, {"reason", nullptr}};
  if (v.reason) j["reason"] = *v.reason;
  return j;
}

json to_json(const EvalReport& r) {
  json verdicts = json::array();
  for (const auto& v : r.verdicts) verdicts.push_back(to_json(v));
  json drift = json::array();
  for (const auto& d : r.drift)
    drift.push_back({{"day", d.day},
                     {"day_cost", money(d.day_cost)},
                     {"cumulative", money(d.cumulative)},
                     {"envelope", money(d.envelope)},
                     {"ratio", d.ratio},
                     {"within", d.within}});
  return {{"delivered", r.delivered},
          {"commonsense_pass", r.commonsense_pass},
          {"hard_pass", r.hard_pass},
          {"final_pass", r.final_pass},
          {"total_cost", r.total_cost ? json(money(*r.total_cost)) : json(nullptr)},
          {"verdicts", verdicts},
          {"drift", drift}};
}

json to_json(const MetricsSummary& m) {
  return {{"plans", m.plans},
          {"delivery_rate", m.delivery_rate},
          {"commonsense_micro", m.commonsense_micro},
          {"commonsense_macro", m.commonsense_macro},
          {"hard_micro", m.hard_micro},
          {"hard_macro", m.hard_macro},
          {"final_pass_rate", m.final_pass_rate},
          {"per_day_budget_satisfaction", m.per_day_budget_satisfaction}};
}

json to_json(const MetaPlan& p) {
  json days = json::array();
  for (const auto& g : p.sub_goals)
    days.push_back({{"day", g.day},
                    {"role", to_string(g.role)},
                    {"from", g.from_city.display()},
                    {"to", g.to_city.display()},
                    {"hint", money(g.budget_hint)},
                    {"date", g.date.str()}});
  json cities = json::array();
  for (const auto& c : p.visiting_cities) cities.push_back(c.display());
  return {{"iteration", p.iteration}, {"mode", to_string(p.transport_mode)}, {"cities", cities}, {"days", days}};
}

json to_json(const StateSnapshot& s) {
  json venues = json::array();
  for (const auto& v : s.v_committed) venues.push_back({{"kind", to_string(v.kind)}, {"key", v.key}});
  json nights = json::object();
  for (const auto& [city, recs] : s.committed_nights) {
    json a = json::array();
    for (const auto& r : recs) a.push_back({{"day", r.day}, {"key", r.key}});
    nights[city.display()] = a;
  }
  return {{"b_total", s.b_total.in_cents()},
          {"b_used", s.b_used.in_cents()},
          {"v_committed", venues},
          {"m_trans", s.m_trans ? json(std::string(to_string(*s.m_trans))) : json(nullptr)},
          {"committed_nights", nights}};
}

StateSnapshot snapshot_from_json(const json& j) {
  StateSnapshot s;
  try {
    s.b_total = Money::cents(j.at("b_total").get<std::int64_t>());
    s.b_used = Money::cents(j.at("b_used").get<std::int64_t>());
    for (const auto& v : j.at("v_committed")) {
      auto kind = parse_commit_kind(v.at("kind").get<std::string>());
      if (!kind) throw BadDocument("unknown commit kind");
      s.v_committed.push_back({*kind, v.at("key").get<std::string>()});
    }
    if (!j.at("m_trans").is_null()) {
      s.m_trans = parse_transport_mode(j.at("m_trans").get<std::string>());
      if (!s.m_trans) throw BadDocument("unknown transport mode");
    }
    if (j.contains("committed_nights"))
      for (const auto& [display, recs] : j.at("committed_nights").items()) {
        auto c = City::parse(display);
        if (!c) throw BadDocument("bad city '" + display + "'");
        auto& out = s.committed_nights[*c];
        for (const auto& r : recs) out.push_back({r.at("day").get<int>(), r.at("key").get<std::string>()});
      }
  } catch (const json::exception& e) {
    throw BadDocument(std::string("state dump: ") + e.what());
  }
  return s;
}

json dump_state(const GlobalState& s) {
  json j = to_json(*s.view());
  json cps = json::array();
  for (const auto& c : s.checkpoints()) cps.push_back(to_json(c));
  j["checkpoints"] = cps;
  return j;
}

void restore_state(GlobalState& s, const json& dump) {
  StateSnapshot cur = snapshot_from_json(dump);
  std::vector<StateSnapshot> cps;
  if (dump.contains("checkpoints"))
    for (const auto& c : dump.at("checkpoints")) cps.push_back(snapshot_from_json(c));
  s.restore(std::move(cur), std::move(cps));
}

json to_json(const ConstraintUpdate& u) {
  json j = json::object();
  if (u.house_rule) j["house_rule"] = to_string(*u.house_rule);
  if (u.cuisines) {
    json a = json::array();
    for (auto c : *u.cuisines) a.push_back(to_string(c));
    j["cuisines"] = a;
  }
  if (u.room_type) j["room_type"] = to_string(*u.room_type);
  if (u.transport_restriction) j["transport_restriction"] = to_string(*u.transport_restriction);
  if (u.budget) j["budget"] = money(*u.budget);
  if (u.people) j["people"] = *u.people;
  return j;
}

json to_json(const MultiTurnScenario& s) {
  json ups = json::array();
  for (const auto& u : s.updates) ups.push_back(to_json(u));
  return {{"id", s.id},
          {"shape", to_string(s.shape)},
          {"base", to_json(s.base)},
          {"turn1", to_json(s.first)},
          {"updates", ups},
          {"metadata", s.metadata}};
}

json timings_json(const PhaseTimings& t) {
  return {{"coordinator", t.coordinator_ms},
          {"day_planning", t.day_planning_ms},
          {"bargaining", t.bargaining_ms},
          {"validation", t.validation_ms},
          {"total", t.total_ms}};
}

json session_report(const SessionResult& r, bool with_timings) {
  json iters = json::array();
  for (const auto& it : r.per_iteration) {
    json fb = json::array();
    for (const auto& f : it.feedback) fb.push_back(feedback_to_json(f));
    json rec = {{"meta_plan", to_json(it.plan)},
                {"feedback", fb},
                {"feasible", it.feasible},
                {"reward", it.coordinator_error ? json(nullptr) : json(it.reward)},
                {"coordinator_objective", it.coordinator_objective}};
    if (it.coordinator_error) rec["coordinator_error"] = *it.coordinator_error;
    iters.push_back(rec);
  }
  json j = {{"query_id", r.query.id},
            {"final_pass_input", r.report.final_pass},
            {"success", r.success},
            {"iterations", r.iterations_used},
            {"per_iteration", iters},
            {"plans", to_json(std::span<const DayPlan>(r.final_plan))}};
  if (with_timings) j["timings_ms"] = timings_json(r.timings);
  return j;
}

json read_json_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw MissingFile(p);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw BadDocument(p.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& p, const json& j) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw Error("cannot write " + p.string());
  out << j.dump(2) << "\n";
}

}  // namespace himap
