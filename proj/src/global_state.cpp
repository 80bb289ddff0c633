#include "himap/global_state.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <unordered_map>

#include "himap/canonical.hpp"

namespace himap {

std::string_view to_string(CommitKind k) {
  switch (k) {
    case CommitKind::transport: return "transport";
    case CommitKind::meal: return "meal";
    case CommitKind::attraction: return "attraction";
    case CommitKind::accommodation: return "accommodation";
  }
  return "?";
}

std::optional<CommitKind> parse_commit_kind(std::string_view s) {
  for (auto k : {CommitKind::transport, CommitKind::meal, CommitKind::attraction, CommitKind::accommodation})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

std::string_view to_string(ViolationCode c) {
  switch (c) {
    case ViolationCode::budget_exceeded: return "BUDGET_EXCEEDED";
    case ViolationCode::duplicate_venue: return "DUPLICATE_VENUE";
    case ViolationCode::mode_conflict: return "MODE_CONFLICT";
    case ViolationCode::no_checkpoint: return "NO_CHECKPOINT";
  }
  return "?";
}

CommitAction make_action(int day, CommitKind kind, std::string raw_name, Money cost, City city) {
  CommitAction a;
  a.day = day;
  a.kind = kind;
  a.venue_key = canonicalize(raw_name);
  a.raw_name = std::move(raw_name);
  a.cost = cost;
  a.city = std::move(city);
  return a;
}

// ---------------------------------------------------------------------------

bool FairMutex::try_lock_for(std::chrono::milliseconds timeout) {
  std::unique_lock lk(m_);
  std::uint64_t ticket = next_ticket_++;
  if (cv_.wait_for(lk, timeout, [&] { return serving_ == ticket; })) return true;
  abandoned_.insert(ticket);
  return false;
}

void FairMutex::unlock() {
  {
    std::lock_guard lk(m_);
    ++serving_;
    while (abandoned_.erase(serving_)) ++serving_;
  }
  cv_.notify_all();
}

class GlobalState::Guard {
 public:
  explicit Guard(const GlobalState& g) : m_(g.mutex_) {
    if (!m_.try_lock_for(g.opts_.lock_timeout))
      throw LockTimeout("global state lock not acquired within " + std::to_string(g.opts_.lock_timeout.count()) +
                        " ms");
  }
  ~Guard() { m_.unlock(); }
  Guard(const Guard&) = delete;
  Guard& operator=(const Guard&) = delete;

 private:
  FairMutex& m_;
};

// ---------------------------------------------------------------------------

// Candidate lookup for the duplicate test, confirmed afterwards with
// is_duplicate so verdicts match the linear scan.
//  - containment: the shorter token sequence is a whole-token prefix or suffix
//    of the longer one, so one side's key equals one of the other's prefixes
//    or suffixes
//  - similarity with distance <= 1: the two keys share a single-deletion
//    variant (or one is the other)
//  - larger allowed distances fall back to a length window
struct GlobalState::VenueIndex {
  struct PerKind {
    std::unordered_map<std::string, std::vector<std::size_t>> key, affix, deletion;
    std::map<std::size_t, std::vector<std::size_t>> by_length;
  };
  PerKind meal, attraction;

  PerKind& of(CommitKind k) { return k == CommitKind::meal ? meal : attraction; }
  const PerKind& of(CommitKind k) const { return k == CommitKind::meal ? meal : attraction; }

  static std::vector<std::string> affixes(std::string_view key) {
    std::vector<std::string> out;
    auto toks = split_tokens(key);
    for (std::size_t n = 1; n <= toks.size(); ++n) {
      std::string pre, suf;
      for (std::size_t i = 0; i < n; ++i) {
        if (i) pre += ' ', suf += ' ';
        pre += toks[i];
        suf += toks[toks.size() - n + i];
      }
      out.push_back(std::move(pre));
      out.push_back(std::move(suf));
    }
    return out;
  }

  static std::vector<std::string> deletions(std::string_view key) {
    std::vector<std::string> out{std::string(key)};
    for (std::size_t i = 0; i < key.size(); ++i) {
      std::string d(key.substr(0, i));
      d += key.substr(i + 1);
      out.push_back(std::move(d));
    }
    return out;
  }

  // upper bound on the edit distance a similarity match may have against key
  static std::size_t max_distance(std::size_t la, double tau) {
    if (tau <= 0.0) return SIZE_MAX;
    // the partner is at most la / tau long; the slack absorbs rounding
    auto m = static_cast<double>(la) / tau;
    return static_cast<std::size_t>(std::floor((1.0 - tau) * m + 1e-9));
  }

  void add(const CommittedVenue& v, std::size_t pos) {
    auto& p = of(v.kind);
    p.key[v.key].push_back(pos);
    for (auto& a : affixes(v.key)) p.affix[a].push_back(pos);
    for (auto& d : deletions(v.key)) p.deletion[d].push_back(pos);
    p.by_length[v.key.size()].push_back(pos);
  }

  std::vector<std::size_t> candidates(CommitKind k, std::string_view key, double tau) const {
    const auto& p = of(k);
    std::vector<std::size_t> out;
    auto take = [&](const auto& m, const std::string& s) {
      auto it = m.find(s);
      if (it != m.end()) out.insert(out.end(), it->second.begin(), it->second.end());
    };
    take(p.affix, std::string(key));
    for (const auto& a : affixes(key)) take(p.key, a);
    if (max_distance(key.size(), tau) <= 1) {
      for (const auto& d : deletions(key)) take(p.deletion, d);
    } else {
      double la = static_cast<double>(key.size());
      std::size_t lo = static_cast<std::size_t>(std::max(0.0, std::floor(tau * la) - 1));
      auto from = p.by_length.lower_bound(lo);
      auto to = tau > 0.0 ? p.by_length.upper_bound(static_cast<std::size_t>(std::ceil(la / tau) + 1))
                          : p.by_length.end();
      for (auto it = from; it != to; ++it) out.insert(out.end(), it->second.begin(), it->second.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
};

GlobalState::~GlobalState() = default;

void GlobalState::reindex() {
  index_ = std::make_unique<VenueIndex>();
  const auto& v = state_->v_committed;
  for (std::size_t i = 0; i < v.size(); ++i) index_->add(v[i], i);
}

// ---------------------------------------------------------------------------

GlobalState::GlobalState(Money b_total, GlobalStateOptions opts) : opts_(opts) {
  if (b_total < Money{}) throw InvalidArgument("B_total must be non-negative");
  if (opts_.tau < 0.0 || opts_.tau > 1.0) throw InvalidArgument("tau must lie in [0, 1]");
  auto s = std::make_shared<StateSnapshot>();
  s->b_total = b_total;
  state_ = std::move(s);
  reindex();
}

std::shared_ptr<const StateSnapshot> GlobalState::view() const { return std::atomic_load(&state_); }

Money GlobalState::remaining() const {
  auto s = view();
  return s->b_total - s->b_used;
}

namespace {

CheckResult budget_violation(const StateSnapshot& s, const CommitAction& a) {
  if (a.cost < Money{}) throw InvalidArgument("commit cost must be non-negative");
  if (s.b_used + a.cost > s.b_total)
    return Violation{ViolationCode::budget_exceeded, "cost " + a.cost.str() + " exceeds remaining " +
                                                         (s.b_total - s.b_used).str()};
  return std::nullopt;
}

Violation duplicate_violation(const CommitAction& a, const CommittedVenue& v) {
  return Violation{ViolationCode::duplicate_venue, "'" + a.venue_key + "' duplicates committed '" + v.key + "'"};
}

CheckResult mode_violation(const StateSnapshot& s, const CommitAction& a) {
  if (a.transport_mode && s.m_trans && *a.transport_mode != *s.m_trans)
    return Violation{ViolationCode::mode_conflict, "mode " + std::string(to_string(*a.transport_mode)) +
                                                       " conflicts with locked " +
                                                       std::string(to_string(*s.m_trans))};
  return std::nullopt;
}

bool deduplicated(CommitKind k) { return k == CommitKind::meal || k == CommitKind::attraction; }

}  // namespace

CheckResult GlobalState::check_against(const StateSnapshot& s, const CommitAction& a) const {
  if (auto v = budget_violation(s, a)) return v;
  if (deduplicated(a.kind)) {
    for (const auto& v : s.v_committed)
      if (v.kind == a.kind && is_duplicate(v.key, a.venue_key, opts_.tau)) return duplicate_violation(a, v);
  }
  return mode_violation(s, a);
}

// Same verdict as check_against, reporting the earliest committed duplicate.
CheckResult GlobalState::check_indexed(const StateSnapshot& s, const CommitAction& a) const {
  if (auto v = budget_violation(s, a)) return v;
  if (deduplicated(a.kind)) {
    for (std::size_t i : index_->candidates(a.kind, a.venue_key, opts_.tau)) {
      const auto& v = s.v_committed[i];
      if (is_duplicate(v.key, a.venue_key, opts_.tau)) return duplicate_violation(a, v);
    }
  }
  return mode_violation(s, a);
}

CheckResult GlobalState::check(const CommitAction& a) const {
  if (!opts_.enforcing) return std::nullopt;
  return check_against(*view(), a);
}

CheckResult GlobalState::commit(const CommitAction& a) {
  if (!opts_.enforcing) return std::nullopt;
  Guard g(*this);
  const auto& cur = *state_;
  if (auto v = check_indexed(cur, a)) return v;
  auto next = std::make_shared<StateSnapshot>(cur);
  next->b_used += a.cost;
  if (deduplicated(a.kind)) {
    next->v_committed.push_back({a.kind, a.venue_key});
    index_->add(next->v_committed.back(), next->v_committed.size() - 1);
  }
  if (a.transport_mode && !next->m_trans) next->m_trans = a.transport_mode;
  if (a.kind == CommitKind::accommodation) next->committed_nights[a.city].push_back({a.day, a.venue_key});
  std::atomic_store(&state_, std::shared_ptr<const StateSnapshot>(std::move(next)));
  return std::nullopt;
}

std::uint64_t GlobalState::checkpoint() {
  Guard g(*this);
  stack_.push_back(state_);
  return next_checkpoint_id_++;
}

CheckResult GlobalState::rollback() {
  Guard g(*this);
  if (stack_.empty()) return Violation{ViolationCode::no_checkpoint, "checkpoint stack is empty"};
  std::atomic_store(&state_, std::move(stack_.back()));
  stack_.pop_back();
  reindex();
  return std::nullopt;
}

CheckResult GlobalState::release_checkpoint() {
  Guard g(*this);
  if (stack_.empty()) return Violation{ViolationCode::no_checkpoint, "checkpoint stack is empty"};
  stack_.pop_back();
  return std::nullopt;
}

CheckResult GlobalState::lock_transport_mode(TransportMode m) {
  if (!opts_.enforcing) return std::nullopt;
  Guard g(*this);
  const auto& cur = *state_;
  if (cur.m_trans) {
    if (*cur.m_trans == m) return std::nullopt;
    return Violation{ViolationCode::mode_conflict, "mode already locked to " + std::string(to_string(*cur.m_trans))};
  }
  auto next = std::make_shared<StateSnapshot>(cur);
  next->m_trans = m;
  std::atomic_store(&state_, std::shared_ptr<const StateSnapshot>(std::move(next)));
  return std::nullopt;
}

std::vector<StateSnapshot> GlobalState::checkpoints() const {
  Guard g(*this);
  std::vector<StateSnapshot> out;
  for (const auto& s : stack_) out.push_back(*s);
  return out;
}

std::size_t GlobalState::checkpoint_depth() const {
  Guard g(*this);
  return stack_.size();
}

void GlobalState::restore(StateSnapshot state, std::vector<StateSnapshot> checkpoints) {
  Guard g(*this);
  stack_.clear();
  for (auto& s : checkpoints) stack_.push_back(std::make_shared<const StateSnapshot>(std::move(s)));
  std::atomic_store(&state_, std::shared_ptr<const StateSnapshot>(std::make_shared<StateSnapshot>(std::move(state))));
  reindex();
}

// ---------------------------------------------------------------------------

int get_remaining_nights(const City& city, int day, std::span<const SubGoal> trip) {
  int n = 0;
  for (const auto& g : trip) {
    if (g.day < day) continue;
    auto night = g.overnight_city();
    if (!night || *night != city) break;
    ++n;
  }
  return n;
}

bool is_final_accommodation_day(int day, std::span<const SubGoal> trip) {
  auto it = std::ranges::find_if(trip, [&](const SubGoal& g) { return g.day == day; });
  if (it == trip.end()) return false;
  auto night = it->overnight_city();
  if (!night) return false;
  auto next = std::next(it);
  if (next == trip.end()) return true;
  auto next_night = next->overnight_city();
  return !next_night || *next_night != *night;
}

}  // namespace himap
