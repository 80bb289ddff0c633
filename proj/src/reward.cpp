#include "himap/reward.hpp"

#include <algorithm>
#include <cmath>

namespace himap {

double global_reward(const EvalReport& report, Money b_used, Money b_total, const RewardWeights& w) {
  int satisfied = 0;
  for (const auto& v : report.verdicts) satisfied += v.counts_as_pass();
  double overrun = std::max<double>(0.0, (b_used - b_total).as_dollars());
  return (report.final_pass ? 1.0 : 0.0) + w.alpha * satisfied - w.beta * overrun;
}

double coordinator_objective(double r_global, double r_extract, int n_iter, const RewardWeights& w) {
  return w.lambda_global * r_global + w.lambda_extract * r_extract - w.lambda_iter * n_iter;
}

double executor_objective(double r_global, double r_local, bool early, const RewardWeights& w) {
  return w.gamma_global * r_global + w.gamma_local * r_local + (early ? w.gamma_early : 0.0);
}

double extraction_reward(const Database& db, const TravelQuery& q, const MetaPlan& plan) {
  const auto& sg = plan.sub_goals;
  if (sg.empty()) return 0.0;
  int hits = 0;
  hits += sg.front().from_city == q.origin && sg.back().to_city == q.origin;
  bool in_dest = !plan.visiting_cities.empty();
  for (const auto& c : plan.visiting_cities) {
    bool state_match = c.state == trim(q.destination);
    bool city_match = c.name == trim(q.destination) || c.display() == trim(q.destination);
    in_dest = in_dest && db.has_city(c) && (state_match || city_match);
  }
  hits += in_dest;
  hits += sg.front().date == q.start_date;
  hits += static_cast<int>(sg.size()) == q.days;
  hits += static_cast<int>(plan.visiting_cities.size()) == q.visiting_city_number;
  hits += std::ranges::all_of(sg, [&](const SubGoal& g) { return g.people == q.people; });
  Money sum;
  for (const auto& g : sg) sum += g.budget_hint;
  hits += sum == q.budget;
  bool mode_ok = !(q.transport_restriction == TransportRestriction::no_flight &&
                   plan.transport_mode == TransportMode::flight) &&
                 !(q.transport_restriction == TransportRestriction::no_self_driving &&
                   plan.transport_mode == TransportMode::self_driving);
  hits += mode_ok;
  return hits / 8.0;
}

std::vector<double> grpo_advantages(std::span<const double> rewards, double eps) {
  const std::size_t g = rewards.size();
  std::vector<double> out(g, 0.0);
  if (g == 0) return out;
  if (std::ranges::all_of(rewards, [&](double r) { return r == rewards[0]; })) return out;
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= static_cast<double>(g);
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  var /= static_cast<double>(g);
  double denom = std::sqrt(var) + eps;
  for (std::size_t i = 0; i < g; ++i) out[i] = (rewards[i] - mean) / denom;
  return out;
}

std::string coordinator_role() { return "coordinator"; }
std::string day_planner_role(int day) { return "day_planner(" + std::to_string(day) + ")"; }

json batch_to_json(const Batch& b) {
  json group = json::array();
  for (const auto& t : b.trajectories) group.push_back(t.reward);
  return {{"role", b.role}, {"group", group}, {"advantages", b.advantages}};
}

RolloutBuffer::RolloutBuffer(std::size_t group_size, double eps) : g_(group_size), eps_(eps) {
  if (g_ < 1) throw InvalidArgument("group size must be >= 1");
  if (!(eps_ > 0.0)) throw InvalidArgument("epsilon must be positive");
}

void RolloutBuffer::push(Trajectory t, const Callback& on_group_ready) {
  std::lock_guard lk(m_);
  const std::string role = t.role;
  auto& part = partitions_[role];
  part.push_back(std::move(t));
  ++total_;
  ++stats_.pushed[role];
  stats_.peak_partition = std::max(stats_.peak_partition, part.size());
  stats_.peak_total = std::max(stats_.peak_total, total_);
  if (part.size() < g_) return;

  Batch b;
  b.role = role;
  b.trajectories = std::move(part);
  part.clear();
  total_ -= b.trajectories.size();
  std::uint64_t gid = next_group_++;
  std::vector<double> rewards;
  for (auto& tr : b.trajectories) {
    tr.group_id = gid;
    rewards.push_back(tr.reward);
  }
  b.advantages = grpo_advantages(rewards, eps_);
  ++stats_.emitted[role];
  if (on_group_ready) on_group_ready(b);
  else if (sink_) sink_(b);
}

void RolloutBuffer::set_sink(Callback sink) {
  std::lock_guard lk(m_);
  sink_ = std::move(sink);
}

RolloutBuffer::Stats RolloutBuffer::stats() const {
  std::lock_guard lk(m_);
  return stats_;
}

std::size_t RolloutBuffer::occupancy(const std::string& role) const {
  std::lock_guard lk(m_);
  auto it = partitions_.find(role);
  return it == partitions_.end() ? 0 : it->second.size();
}

}  // namespace himap
