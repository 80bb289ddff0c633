#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "himap/coordinator.hpp"
#include "himap/evaluator.hpp"

namespace himap {

using json = nlohmann::json;

struct RewardWeights {
  double lambda_global = 0.8;
  double lambda_extract = 0.2;
  double lambda_iter = 0.1;
  double gamma_global = 0.7;
  double gamma_local = 0.3;
  double gamma_early = 0.15;
  double alpha = 0.1;    // per satisfied constraint
  double beta = 0.001;   // per dollar over budget
  double epsilon = 1e-8;
};

/// 1{final pass} + alpha * (#satisfied verdicts) - beta * max(0, overrun in dollars).
double global_reward(const EvalReport& report, Money b_used, Money b_total, const RewardWeights& w = {});

/// lambda_global * R + lambda_extract * R_extract - lambda_iter * N_iter.
double coordinator_objective(double r_global, double r_extract, int n_iter, const RewardWeights& w = {});

/// gamma_global * R + gamma_local * R_local + gamma_early * 1{early}.
double executor_objective(double r_global, double r_local, bool early, const RewardWeights& w = {});

/// Share of the eight query fields the meta-plan reproduces: origin,
/// destination, start date, days, city count, party size, budget (hint sum)
/// and transport restriction (mode honours it).
double extraction_reward(const Database& db, const TravelQuery& q, const MetaPlan& plan);

/// (R_i - mean) / (population std + eps). All-equal groups give exact zeros.
std::vector<double> grpo_advantages(std::span<const double> rewards, double eps = 1e-8);

std::string coordinator_role();
std::string day_planner_role(int day);

struct Trajectory {
  std::string role;
  json trace = json::array();
  double reward = 0.0;
  std::uint64_t group_id = 0;
};

struct Batch {
  std::string role;
  std::vector<Trajectory> trajectories;
  std::vector<double> advantages;
};

/// {"role":..., "group":[R_i...], "advantages":[A_i...]}
json batch_to_json(const Batch& b);

/// Role-partitioned rollout store. A partition is turned into a batch and
/// flushed the moment it holds G trajectories.
class RolloutBuffer {
 public:
  using Callback = std::function<void(const Batch&)>;

  explicit RolloutBuffer(std::size_t group_size = 4, double eps = 1e-8);

  /// Appends; on reaching G computes advantages, invokes `on_group_ready`
  /// (under the buffer lock) and empties the partition.
  void push(Trajectory t, const Callback& on_group_ready = {});

  struct Stats {
    std::size_t peak_partition = 0;
    std::size_t peak_total = 0;
    std::map<std::string, std::size_t> pushed;
    std::map<std::string, std::size_t> emitted;
  };
  [[nodiscard]] Stats stats() const;
  [[nodiscard]] std::size_t occupancy(const std::string& role) const;
  [[nodiscard]] std::size_t group_size() const { return g_; }
  /// Fallback callback for pushes that pass none.
  void set_sink(Callback sink);

 private:
  std::size_t g_;
  double eps_;
  mutable std::mutex m_;
  std::map<std::string, std::vector<Trajectory>> partitions_;
  std::size_t total_ = 0;
  std::uint64_t next_group_ = 0;
  Stats stats_;
  Callback sink_;
};

}  // namespace himap
