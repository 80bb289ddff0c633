#include "himap/executor.hpp"

#include <algorithm>
#include <set>

#include "himap/canonical.hpp"

namespace himap {

// ---------------------------------------------------------------------------
// Day contexts

std::optional<City> DayContext::meal_city() const {
  return goal.role == DayRole::ret ? goal.from_city : goal.to_city;
}

bool DayContext::wants_generic_meal() const {
  if (!assigned_cuisines.empty()) return false;
  return goal.role == DayRole::stay || meals_on_travel_days;
}

bool DayContext::wants_attraction() const { return goal.role == DayRole::stay; }

std::vector<DayContext> make_day_contexts(const TravelQuery& q, const MetaPlan& plan, bool meals_on_travel_days) {
  const auto& trip = plan.sub_goals;
  std::vector<DayContext> out;
  for (const auto& g : trip) {
    DayContext c;
    c.goal = g;
    c.mode = plan.transport_mode;
    c.house_rule = q.house_rule;
    c.room_type = q.room_type;
    c.required_cuisines = q.cuisines;
    c.meals_on_travel_days = meals_on_travel_days;
    if (auto night = g.overnight_city()) {
      int start = g.day;
      for (auto it = trip.rbegin(); it != trip.rend(); ++it) {
        if (it->day >= g.day) continue;
        if (it->overnight_city() != night) break;
        start = it->day;
      }
      c.stay_nights = get_remaining_nights(*night, start, trip);
    }
    out.push_back(std::move(c));
  }

  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < out.size(); ++i)
    if (out[i].goal.role == DayRole::stay) eligible.push_back(i);
  if (eligible.empty())
    for (std::size_t i = 0; i < out.size(); ++i)
      if (out[i].goal.role == DayRole::transit) eligible.push_back(i);
  if (eligible.empty() && !out.empty()) eligible.push_back(0);
  for (std::size_t k = 0; k < q.cuisines.size(); ++k)
    out[eligible[k % eligible.size()]].assigned_cuisines.push_back(q.cuisines[k]);

  std::map<City, int> meal_counter, attr_counter;
  for (auto& c : out) {
    auto city = *c.meal_city();
    if (c.wants_generic_meal()) c.meal_rank = meal_counter[city]++;
    if (c.wants_attraction()) c.attraction_rank = attr_counter[city]++;
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON helpers

json day_plan_arguments(const DayPlan& p, int people) {
  return {{"day", p.day},           {"current_city", p.current_city}, {"transportation", p.transportation},
          {"breakfast", p.breakfast}, {"attraction", p.attraction},     {"lunch", p.lunch},
          {"dinner", p.dinner},     {"accommodation", p.accommodation}, {"people_number", people}};
}

json feedback_to_json(const BargainFeedback& fb) {
  return {{"status", fb.feasible ? "feasible" : "infeasible"},
          {"deficit", fb.deficit.in_cents()},
          {"violation_type", std::string(to_string(fb.violation_type))},
          {"day", fb.day},
          {"n_tools_used", fb.n_tools_used},
          {"early", fb.early},
          {"reason", fb.reason}};
}

BargainFeedback feedback_from_json(const json& j) {
  BargainFeedback fb;
  fb.feasible = j.at("status").get<std::string>() == "feasible";
  fb.deficit = Money::cents(j.at("deficit").get<std::int64_t>());
  auto vt = j.at("violation_type").get<std::string>();
  for (auto t : {ViolationType::budget, ViolationType::time, ViolationType::availability})
    if (to_string(t) == vt) fb.violation_type = t;
  fb.day = j.at("day").get<int>();
  fb.n_tools_used = j.at("n_tools_used").get<int>();
  fb.early = j.at("early").get<bool>();
  fb.reason = j.value("reason", std::string{});
  return fb;
}

// ---------------------------------------------------------------------------
// Greedy policy

namespace {

constexpr const char* kMealSlots[] = {"breakfast", "lunch", "dinner"};

struct Seen {
  const json* flights = nullptr;
  const json* distance = nullptr;
  const json* accommodations = nullptr;
  const json* restaurants = nullptr;
  const json* attractions = nullptr;
  bool cost_enquired = false;
  std::set<std::string> excluded;  // canonical names rejected as duplicates
  std::set<std::string> dropped;   // optional slots rejected on budget
  json committed = json::object(); // slot -> value locked by earlier finishes
  const json* last_finish = nullptr;
};

Seen scan(std::span<const Turn> turns) {
  Seen s;
  for (const auto& t : turns) {
    const auto& d = t.result.data;
    const auto& n = t.call.name;
    if (!t.result.ok && n != "finish") continue;
    if (n == "flight_search") s.flights = &d;
    else if (n == "distance_search") s.distance = &d;
    else if (n == "accommodation_search") s.accommodations = &d;
    else if (n == "restaurant_search") s.restaurants = &d;
    else if (n == "attraction_search") s.attractions = &d;
    else if (n == "cost_enquiry") s.cost_enquired = true;
    else if (n == "finish") {
      s.last_finish = &d;
      if (d.contains("committed")) s.committed = d["committed"];
      if (d.contains("violation")) {
        auto code = d["violation"].get<std::string>();
        if (code == "DUPLICATE_VENUE") s.excluded.insert(canonicalize(d.value("name", std::string{})));
        if (code == "BUDGET_EXCEEDED" && !d.value("required", true)) s.dropped.insert(d.value("slot", std::string{}));
      }
    }
  }
  return s;
}

std::string venue(const std::string& name, const std::string& city_display) { return name + ", " + city_display; }

}  // namespace

Decision GreedyPolicy::decide(const PolicyInput& in) const {
  const auto& ctx = in.ctx;
  const auto& g = ctx.goal;
  Seen s = scan(in.observations);

  // A budget violation on a required item cannot be repaired by this policy.
  if (s.last_finish && s.last_finish->contains("violation")) {
    const auto& f = *s.last_finish;
    auto code = f["violation"].get<std::string>();
    if (code == "BUDGET_EXCEEDED" && f.value("required", true)) {
      Money deficit = Money::cents(f["cost"].get<std::int64_t>() - f["remaining"].get<std::int64_t>());
      return GiveUp{ViolationType::budget, deficit,
                    "cannot afford required " + f.value("slot", std::string{}) + " (" +
                        Money::cents(f["cost"].get<std::int64_t>()).str() + ")"};
    }
    if (code == "MODE_CONFLICT")
      return GiveUp{ViolationType::availability, Money{}, "transport mode conflicts with the locked mode"};
  }

  DayPlan p;
  p.day = g.day;
  p.current_city = g.is_travel() ? travel_city_label(g.from_city, g.to_city) : g.to_city.display();
  p.transportation = p.breakfast = p.lunch = p.dinner = p.attraction = p.accommodation = std::string(kNone);

  if (g.from_city != g.to_city) {
    if (ctx.mode == TransportMode::flight) {
      if (!s.flights)
        return ToolCall{"flight_search",
                        {{"depart_city", g.from_city.display()},
                         {"dest_city", g.to_city.display()},
                         {"date", g.date.str()}}};
      const auto& list = (*s.flights)["flights"];
      if (list.empty())
        return GiveUp{ViolationType::availability, Money{},
                      "no flight from " + g.from_city.display() + " to " + g.to_city.display() + " on " +
                          g.date.str()};
      p.transportation = list.front()["flight_number"].get<std::string>();
    } else {
      if (!s.distance)
        return ToolCall{"distance_search",
                        {{"origin", g.from_city.display()}, {"destination", g.to_city.display()}}};
      if (!(*s.distance)["found"].get<bool>())
        return GiveUp{ViolationType::availability, Money{},
                      "no road distance from " + g.from_city.display() + " to " + g.to_city.display()};
      p.transportation = std::string(ctx.mode == TransportMode::taxi ? kTaxi : kSelfDriving);
    }
  }

  if (auto night = g.overnight_city()) {
    if (!s.accommodations)
      return ToolCall{"accommodation_search",
                      {{"city", night->display()}, {"people", g.people}, {"max_minimum_nights", ctx.stay_nights}}};
    const json* pick = nullptr;
    for (const auto& a : (*s.accommodations)["accommodations"]) {
      if (a["minimum_nights"].get<int>() > ctx.stay_nights) continue;
      if (a["maximum_occupancy"].get<int>() < g.people) continue;
      if (ctx.house_rule) {
        auto rules = a["house_rules"].get<std::vector<std::string>>();
        if (std::ranges::find(rules, std::string(to_string(*ctx.house_rule))) != rules.end()) continue;
      }
      if (ctx.room_type) {
        auto rt = parse_room_type(a["room_type"].get<std::string>());
        if (!rt || !satisfies(*ctx.room_type, *rt)) continue;
      }
      pick = &a;
      break;
    }
    if (!pick)
      return GiveUp{ViolationType::availability, Money{},
                    "no accommodation in " + night->display() + " satisfies the stay constraints"};
    p.accommodation = venue((*pick)["name"].get<std::string>(), night->display());
  }

  const City meal_city = *ctx.meal_city();
  bool needs_meals = !ctx.assigned_cuisines.empty() || ctx.wants_generic_meal() || opts_.every_meal;
  if (needs_meals) {
    if (!s.restaurants) return ToolCall{"restaurant_search", {{"city", meal_city.display()}}};
    const auto& rs = (*s.restaurants)["restaurants"];
    std::set<std::string> used;
    auto allowed = [&](const json& r) {
      auto key = canonicalize(r["name"].get<std::string>());
      return !s.excluded.contains(key) && !used.contains(key);
    };
    std::vector<std::string> fill_order = {"lunch", "dinner", "breakfast"};
    std::size_t next_slot = 0;
    auto slot_ref = [&](const std::string& slot) -> std::string& {
      return slot == "breakfast" ? p.breakfast : slot == "lunch" ? p.lunch : p.dinner;
    };
    for (auto cu : ctx.assigned_cuisines) {
      const json* pick = nullptr;
      for (const auto& r : rs)
        if (r["cuisine"].get<std::string>() == to_string(cu) && allowed(r)) {
          pick = &r;
          break;
        }
      if (!pick)
        return GiveUp{ViolationType::availability, Money{},
                      "no " + std::string(to_string(cu)) + " restaurant left in " + meal_city.display()};
      if (next_slot >= fill_order.size())
        return GiveUp{ViolationType::availability, Money{}, "more required cuisines than meal slots"};
      used.insert(canonicalize((*pick)["name"].get<std::string>()));
      slot_ref(fill_order[next_slot++]) = venue((*pick)["name"].get<std::string>(), meal_city.display());
    }
    if (opts_.every_meal) {
      for (const char* slot : kMealSlots) {
        if (slot_ref(slot) != kNone || s.dropped.contains(slot)) continue;
        for (const auto& r : rs)
          if (allowed(r)) {
            used.insert(canonicalize(r["name"].get<std::string>()));
            slot_ref(slot) = venue(r["name"].get<std::string>(), meal_city.display());
            break;
          }
      }
    } else if (ctx.wants_generic_meal() && !s.dropped.contains("dinner")) {
      std::vector<const json*> cands;
      for (const auto& r : rs) {
        auto cu = parse_cuisine(r["cuisine"].get<std::string>());
        if (cu && std::ranges::find(ctx.required_cuisines, *cu) != ctx.required_cuisines.end()) continue;
        if (allowed(r)) cands.push_back(&r);
      }
      if (!cands.empty()) {
        const json& r = *cands[static_cast<std::size_t>(ctx.meal_rank) % cands.size()];
        p.dinner = venue(r["name"].get<std::string>(), meal_city.display());
      }
    }
  }

  if (ctx.wants_attraction() && !s.dropped.contains("attraction")) {
    if (!s.attractions) return ToolCall{"attraction_search", {{"city", meal_city.display()}}};
    std::vector<const json*> cands;
    for (const auto& a : (*s.attractions)["attractions"])
      if (!s.excluded.contains(canonicalize(a["name"].get<std::string>()))) cands.push_back(&a);
    if (!cands.empty()) {
      const json& a = *cands[static_cast<std::size_t>(ctx.attraction_rank) % cands.size()];
      p.attraction = venue(a["name"].get<std::string>(), meal_city.display()) + ";";
    }
  }

  // Earlier finishes may have locked some slots; keep them verbatim.
  for (auto& [slot, value] : s.committed.items()) {
    auto v = value.get<std::string>();
    if (slot == "transportation") p.transportation = v;
    else if (slot == "accommodation") p.accommodation = v;
    else if (slot == "breakfast") p.breakfast = v;
    else if (slot == "lunch") p.lunch = v;
    else if (slot == "dinner") p.dinner = v;
  }
  if (s.committed.contains("attraction")) {
    auto locked = s.committed["attraction"].get<std::string>();
    if (locked != kNone) p.attraction = locked;
  }

  if (!s.cost_enquired) return ToolCall{"cost_enquiry", day_plan_arguments(p, g.people)};
  return DayDraft{std::move(p)};
}

Decision UniformCallPolicy::decide(const PolicyInput& in) const {
  Decision d = inner_.decide(in);
  if (auto* draft = std::get_if<DayDraft>(&d)) {
    if (static_cast<int>(in.observations.size()) < calls_ - 1)
      return ToolCall{"cost_enquiry", day_plan_arguments(draft->plan, in.ctx.goal.people)};
  }
  return d;
}

// ---------------------------------------------------------------------------
// run_day

namespace {

struct SlotAction {
  std::string slot;
  std::string value;
  CommitAction action;
  bool required = false;
};

struct FinishOutcome {
  bool fault = false;
  bool success = false;
  ToolResult result;
};

std::optional<DayPlan> plan_from_arguments(const json& a) {
  try {
    DayPlan p;
    p.day = a.at("day").get<int>();
    p.current_city = a.at("current_city").get<std::string>();
    p.transportation = a.at("transportation").get<std::string>();
    p.breakfast = a.at("breakfast").get<std::string>();
    p.attraction = a.at("attraction").get<std::string>();
    p.lunch = a.at("lunch").get<std::string>();
    p.dinner = a.at("dinner").get<std::string>();
    p.accommodation = a.at("accommodation").get<std::string>();
    return p;
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

class DayRunner {
 public:
  DayRunner(const Database& db, const DayContext& ctx, GlobalState& sigma)
      : db_(db), ctx_(ctx), sigma_(sigma) {}

  FinishOutcome finish(const DayPlan& draft) {
    const auto& g = ctx_.goal;
    std::string expected_city = g.is_travel() ? travel_city_label(g.from_city, g.to_city) : g.to_city.display();
    if (draft.day != g.day) return fault("finish: plan is for day " + std::to_string(draft.day));
    if (draft.current_city != expected_city) return fault("finish: current_city must be '" + expected_city + "'");
    if (g.from_city != g.to_city && trim(draft.transportation) == kNone)
      return fault("finish: travel day needs transportation");
    if (g.overnight_city() && trim(draft.accommodation) == kNone)
      return fault("finish: accommodation is required for tonight");

    std::vector<SlotAction> actions;
    std::string err;
    if (!build_actions(draft, actions, err)) return fault(err);

    // Locked slots may not change.
    for (const auto& [slot, value] : locked_) {
      if (slot == "attraction") continue;
      const std::string& now = field(draft, slot);
      if (now != value) return fault("finish: " + slot + " already committed as '" + value + "'");
    }
    for (const auto& key : locked_attractions_) {
      bool present = std::ranges::any_of(actions, [&](const SlotAction& a) {
        return a.slot == "attraction" && a.action.venue_key == key;
      });
      if (!present) return fault("finish: committed attraction '" + key + "' was removed");
    }

    for (const auto& a : actions) {
      if (a.slot == "attraction" ? locked_attractions_.contains(a.action.venue_key) : locked_.contains(a.slot))
        continue;
      if (auto v = sigma_.commit(a.action)) {
        json data = {{"violation", std::string(to_string(v->code))},
                     {"detail", v->detail},
                     {"slot", a.slot},
                     {"name", a.action.raw_name},
                     {"cost", a.action.cost.in_cents()},
                     {"remaining", sigma_.remaining().in_cents()},
                     {"required", a.required},
                     {"committed", committed_json()}};
        std::string text = std::string(to_string(v->code)) + " on " + a.slot + " '" + a.value + "': " + v->detail +
                           ". Remaining budget: " + sigma_.remaining().str();
        return {false, false, {true, std::move(text), std::move(data)}};
      }
      committed_.push_back(a.action);
      if (a.slot == "attraction") {
        locked_attractions_.insert(a.action.venue_key);
        attraction_values_.push_back(a.value);
      } else {
        locked_[a.slot] = a.value;
      }
    }
    return {false, true,
            {true, "Finish planning for this day. All selections committed successfully to Synchronized Global State.",
             json{{"status", "committed"}, {"committed", committed_json()}}}};
  }

  [[nodiscard]] const std::vector<CommitAction>& committed() const { return committed_; }

  [[nodiscard]] double r_local() const {
    const auto& g = ctx_.goal;
    int required = 0, have = 0;
    if (g.from_city != g.to_city) {
      ++required;
      have += locked_.contains("transportation");
    }
    if (g.overnight_city()) {
      ++required;
      have += locked_.contains("accommodation");
    }
    for (auto cu : ctx_.assigned_cuisines) {
      ++required;
      for (const char* slot : kMealSlots) {
        auto it = locked_.find(slot);
        if (it == locked_.end()) continue;
        auto ref = VenueRef::parse(it->second);
        const Restaurant* r = ref ? db_.resolve_restaurant(ref->name, ref->city) : nullptr;
        if (r && r->cuisine == cu) {
          ++have;
          break;
        }
      }
    }
    return required == 0 ? 1.0 : static_cast<double>(have) / required;
  }

 private:
  static const std::string& field(const DayPlan& p, const std::string& slot) {
    if (slot == "transportation") return p.transportation;
    if (slot == "accommodation") return p.accommodation;
    if (slot == "breakfast") return p.breakfast;
    if (slot == "lunch") return p.lunch;
    return p.dinner;
  }

  FinishOutcome fault(std::string msg) { return {true, false, {false, msg, json{{"error", msg}}}}; }

  json committed_json() const {
    json j = json::object();
    for (const auto& [k, v] : locked_) j[k] = v;
    if (!attraction_values_.empty()) {
      std::string joined;
      for (const auto& v : attraction_values_) joined += v + ";";
      j["attraction"] = joined;
    }
    return j;
  }

  bool build_actions(const DayPlan& d, std::vector<SlotAction>& out, std::string& err) {
    const auto& g = ctx_.goal;
    const int people = g.people;
    DayLeg leg{g.from_city, g.to_city, g.is_travel()};

    std::string t = trim(d.transportation);
    if (t != kNone) {
      auto cost = transport_cost(db_, t, leg, people);
      if (!cost) {
        err = "finish: transportation '" + t + "' does not resolve on this leg";
        return false;
      }
      if (t != kTaxi && t != kSelfDriving) {
        const Flight* f = db_.find_flight(t);
        if (f->origin != g.from_city || f->dest != g.to_city || f->date != g.date) {
          err = "finish: flight " + t + " does not serve this leg";
          return false;
        }
      }
      auto a = make_action(g.day, CommitKind::transport, t, *cost, g.to_city);
      a.transport_mode = t == kTaxi ? TransportMode::taxi
                         : t == kSelfDriving ? TransportMode::self_driving
                                             : TransportMode::flight;
      out.push_back({"transportation", t, std::move(a), true});
    }

    if (trim(d.accommodation) != kNone) {
      auto ref = VenueRef::parse(d.accommodation);
      const Accommodation* acc = ref ? db_.resolve_accommodation(ref->name, ref->city) : nullptr;
      if (!acc) {
        err = "finish: accommodation '" + d.accommodation + "' not found";
        return false;
      }
      auto a = make_action(g.day, CommitKind::accommodation, acc->name, acc->price_per_night, acc->city);
      a.nights = ctx_.stay_nights;
      out.push_back({"accommodation", d.accommodation, std::move(a), true});
    }

    std::set<Cuisine> outstanding(ctx_.assigned_cuisines.begin(), ctx_.assigned_cuisines.end());
    for (const char* slot : kMealSlots) {
      const std::string& v = field(d, slot);
      if (trim(v) == kNone) continue;
      auto ref = VenueRef::parse(v);
      const Restaurant* r = ref ? db_.resolve_restaurant(ref->name, ref->city) : nullptr;
      if (!r) {
        err = "finish: restaurant '" + v + "' not found";
        return false;
      }
      bool required = outstanding.erase(r->cuisine) > 0;
      out.push_back({slot, v, make_action(g.day, CommitKind::meal, r->name, r->avg_cost * people, r->city), required});
    }

    for (const auto& entry : split_attractions(d.attraction)) {
      auto ref = VenueRef::parse(entry);
      const Attraction* at = ref ? db_.resolve_attraction(ref->name, ref->city) : nullptr;
      if (!at) {
        err = "finish: attraction '" + entry + "' not found";
        return false;
      }
      out.push_back({"attraction", entry, make_action(g.day, CommitKind::attraction, at->name, Money{}, at->city),
                     false});
    }
    return true;
  }

  const Database& db_;
  const DayContext& ctx_;
  GlobalState& sigma_;
  std::map<std::string, std::string> locked_;
  std::set<std::string> locked_attractions_;
  std::vector<std::string> attraction_values_;
  std::vector<CommitAction> committed_;
};

json trace_record(int turn, int day, const ToolCall& call, const ToolResult& r) {
  return {{"turn", turn},
          {"role", "day_planner"},
          {"day", day},
          {"call", {{"name", call.name}, {"arguments", call.arguments}}},
          {"observation", r.text}};
}

}  // namespace

DayOutcome run_day(const Database& db, const DayContext& ctx, std::span<const SubGoal> trip, GlobalState& sigma,
                   const Policy& policy, const ExecutorLimits& limits, LatencyModel latency, std::uint64_t seed,
                   std::stop_token stop) {
  ToolBox tools(db, sigma, std::vector<SubGoal>(trip.begin(), trip.end()), ctx.goal.people, latency, seed);
  DayRunner runner(db, ctx, sigma);
  DayOutcome out;
  std::vector<Turn> turns;
  int calls = 0;

  auto infeasible = [&](ViolationType type, Money deficit, std::string reason) {
    out.plan.reset();
    out.feedback.feasible = false;
    out.feedback.violation_type = type;
    out.feedback.deficit = deficit < Money{} ? Money{} : deficit;
    out.feedback.day = ctx.goal.day;
    out.feedback.n_tools_used = calls;
    out.feedback.early = calls < limits.early_window;
    out.feedback.reason = std::move(reason);
    out.committed = runner.committed();
    out.r_local = runner.r_local();
    return out;
  };

  while (true) {
    if (stop.stop_requested()) {
      out.cancelled = true;
      return infeasible(ViolationType::availability, Money{}, "cancelled");
    }
    auto view = sigma.view();
    Decision d = policy.decide(PolicyInput{ctx, turns, *view});

    if (auto* give = std::get_if<GiveUp>(&d)) return infeasible(give->type, give->deficit, give->reason);

    if (calls >= limits.max_tool_calls)
      return infeasible(ViolationType::time, Money{},
                        "tool-call cap of " + std::to_string(limits.max_tool_calls) + " reached");

    ToolCall call;
    ToolResult result;
    bool done = false;
    if (auto* tc = std::get_if<ToolCall>(&d); tc && tc->name != "finish") {
      call = *tc;
      result = tools.invoke(call);
      if (!result.ok) ++out.errors;
    } else {
      std::optional<DayPlan> draft;
      if (auto* dd = std::get_if<DayDraft>(&d)) {
        draft = dd->plan;
        call = ToolCall{"finish", day_plan_arguments(dd->plan, ctx.goal.people)};
      } else {
        call = std::get<ToolCall>(d);
        draft = plan_from_arguments(call.arguments);
      }
      tools.simulate_latency();
      if (!draft) {
        result = ToolResult{false, "finish: malformed plan arguments", json{{"error", "malformed plan"}}};
        ++out.errors;
      } else {
        auto f = runner.finish(*draft);
        result = std::move(f.result);
        if (f.fault) ++out.errors;
        if (f.success) {
          done = true;
          draft->cost = cost_of_day(db, *draft, ctx.goal.people);
          out.plan = std::move(*draft);
        }
      }
    }
    ++calls;
    out.trace.push_back(trace_record(calls, ctx.goal.day, call, result));
    turns.push_back(Turn{calls, std::move(call), std::move(result)});

    if (done) {
      out.feedback = BargainFeedback{true, Money{}, ViolationType::availability, ctx.goal.day, calls, false, ""};
      out.committed = runner.committed();
      out.r_local = runner.r_local();
      return out;
    }
    if (out.errors > limits.max_errors)
      return infeasible(limits.error_trip, Money{},
                        "Too many execution errors (" + std::to_string(out.errors) + ")");
  }
}

}  // namespace himap
