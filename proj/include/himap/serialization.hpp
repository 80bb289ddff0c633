#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "himap/coordinator.hpp"
#include "himap/evaluator.hpp"
#include "himap/generator.hpp"
#include "himap/global_state.hpp"
#include "himap/orchestrator.hpp"

namespace himap {

using json = nlohmann::json;

/// Malformed JSON document content. Carries a path-like location.
class BadDocument : public Error {
 public:
  using Error::Error;
};

// Money is written as a dollar figure; cents-typed fields say so in their name.
json to_json(const TravelQuery& q);
TravelQuery query_from_json(const json& j);

json to_json(const DayPlan& p);
DayPlan day_plan_from_json(const json& j);
std::vector<DayPlan> plans_from_json(const json& j);
json to_json(std::span<const DayPlan> plans);

json to_json(const ConstraintVerdict& v);
json to_json(const EvalReport& r);
json to_json(const MetricsSummary& m);

/// {"iteration","mode","days":[{"day","role","from","to","hint","date"}]}
json to_json(const MetaPlan& p);

/// {"b_total","b_used","v_committed","m_trans","committed_nights","checkpoints"}; amounts in cents.
json dump_state(const GlobalState& s);
json to_json(const StateSnapshot& s);
StateSnapshot snapshot_from_json(const json& j);
/// Replaces the state and checkpoint stack of `s` with the dump's contents.
void restore_state(GlobalState& s, const json& dump);

json to_json(const ConstraintUpdate& u);
json to_json(const MultiTurnScenario& s);

/// {"query_id","final_pass_input","iterations","timings_ms":{...},"plans"}. The CLI
/// leaves timings out of deterministic files.
json session_report(const SessionResult& r, bool with_timings = true);
/// Only the volatile parts: phase timings.
json timings_json(const PhaseTimings& t);

json read_json_file(const std::filesystem::path& p);
/// Pretty-printed with a trailing newline.
void write_json_file(const std::filesystem::path& p, const json& j);

}  // namespace himap
