#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "himap/types.hpp"

namespace himap {

enum class CommitKind { transport, meal, attraction, accommodation };
std::string_view to_string(CommitKind);
std::optional<CommitKind> parse_commit_kind(std::string_view);

enum class ViolationCode { budget_exceeded, duplicate_venue, mode_conflict, no_checkpoint };
/// "BUDGET_EXCEEDED", "DUPLICATE_VENUE", "MODE_CONFLICT", "NO_CHECKPOINT".
std::string_view to_string(ViolationCode);

struct Violation {
  ViolationCode code;
  std::string detail;
};

/// nullopt means OK.
using CheckResult = std::optional<Violation>;

struct CommitAction {
  int day = 0;
  CommitKind kind = CommitKind::meal;
  std::string venue_key;  // canonical
  std::string raw_name;
  Money cost;
  std::optional<TransportMode> transport_mode;
  City city;
  std::optional<int> nights;  // accommodation only
};

/// Builds an action with venue_key = canonicalize(raw_name).
CommitAction make_action(int day, CommitKind kind, std::string raw_name, Money cost, City city);

struct CommittedVenue {
  CommitKind kind;
  std::string key;
  friend auto operator<=>(const CommittedVenue&, const CommittedVenue&) = default;
};

struct NightRecord {
  int day = 0;
  std::string key;
  friend auto operator<=>(const NightRecord&, const NightRecord&) = default;
};

/// One immutable version of the monitor state.
struct StateSnapshot {
  Money b_total;
  Money b_used;
  std::vector<CommittedVenue> v_committed;  // in commit order
  std::optional<TransportMode> m_trans;
  std::map<City, std::vector<NightRecord>> committed_nights;

  friend bool operator==(const StateSnapshot&, const StateSnapshot&) = default;
};

class LockTimeout : public Error {
 public:
  using Error::Error;
};

struct GlobalStateOptions {
  double tau = 0.95;
  std::chrono::milliseconds lock_timeout{5000};
  /// false turns check/commit into no-ops returning OK (monitor ablation).
  bool enforcing = true;
};

/// FIFO-fair exclusive lock with timed acquisition.
class FairMutex {
 public:
  bool try_lock_for(std::chrono::milliseconds timeout);
  void unlock();

 private:
  std::mutex m_;
  std::condition_variable cv_;
  std::uint64_t next_ticket_ = 0;
  std::uint64_t serving_ = 0;
  std::set<std::uint64_t> abandoned_;
};

/// The synchronized global state. All members are thread-safe; reads go
/// through an atomically published snapshot and never block.
class GlobalState {
 public:
  explicit GlobalState(Money b_total, GlobalStateOptions opts = {});
  GlobalState(const GlobalState&) = delete;
  GlobalState& operator=(const GlobalState&) = delete;
  ~GlobalState();

  [[nodiscard]] CheckResult check(const CommitAction& a) const;
  CheckResult commit(const CommitAction& a);

  /// Pushes the current state; ids are a monotone counter starting at 0.
  std::uint64_t checkpoint();
  /// Pops the latest checkpoint and restores it; NO_CHECKPOINT when empty.
  CheckResult rollback();
  /// Pops the latest checkpoint keeping the current state (iteration accepted).
  CheckResult release_checkpoint();

  /// Writes M_trans when unset; MODE_CONFLICT when set to another mode.
  CheckResult lock_transport_mode(TransportMode m);

  [[nodiscard]] std::shared_ptr<const StateSnapshot> view() const;
  [[nodiscard]] Money remaining() const;
  [[nodiscard]] std::vector<StateSnapshot> checkpoints() const;
  [[nodiscard]] std::size_t checkpoint_depth() const;
  [[nodiscard]] bool enforcing() const { return opts_.enforcing; }
  [[nodiscard]] double tau() const { return opts_.tau; }

  /// Replaces state and checkpoint stack wholesale (restore from a dump).
  void restore(StateSnapshot state, std::vector<StateSnapshot> checkpoints);

 private:
  class Guard;
  struct VenueIndex;
  CheckResult check_against(const StateSnapshot& s, const CommitAction& a) const;
  CheckResult check_indexed(const StateSnapshot& s, const CommitAction& a) const;
  void reindex();

  GlobalStateOptions opts_;
  mutable FairMutex mutex_;
  std::shared_ptr<const StateSnapshot> state_;  // accessed via atomic_load/atomic_store
  std::vector<std::shared_ptr<const StateSnapshot>> stack_;
  std::uint64_t next_checkpoint_id_ = 0;
  std::unique_ptr<VenueIndex> index_;  // mirrors state_->v_committed, guarded by mutex_
};

/// Consecutive nights spent in `city` starting with the night after `day`,
/// walking the route forward. 0 on a day with no overnight stay in `city`.
int get_remaining_nights(const City& city, int day, std::span<const SubGoal> trip);

/// True when `day` has an overnight stay and the following day either returns
/// home or sleeps in a different city.
bool is_final_accommodation_day(int day, std::span<const SubGoal> trip);

}  // namespace himap
