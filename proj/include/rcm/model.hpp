#pragma once

// Instance and schedule types for RCPSP/max, an independent schedule checker
// and an exhaustive reference solver for tiny instances.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rcm {

using Value = std::int64_t;

/// Generalized precedence S_from + lag <= S_to.
struct Precedence {
  std::size_t from = 0;
  std::size_t to = 0;
  Value lag = 0;

  friend bool operator==(const Precedence&, const Precedence&) = default;
};

struct Instance {
  std::size_t n = 0;
  std::vector<Value> durations;
  std::vector<std::vector<Value>> demands;  // n rows, one column per resource
  std::vector<Value> capacities;
  std::vector<Precedence> precedences;
  std::optional<Value> horizon;

  std::size_t num_resources() const { return capacities.size(); }

  friend bool operator==(const Instance&, const Instance&) = default;
};

struct Schedule {
  std::vector<Value> starts;
  Value makespan = 0;

  friend bool operator==(const Schedule&, const Schedule&) = default;
};

inline Value makespan_of(const Instance& inst, const std::vector<Value>& starts) {
  Value m = 0;
  for (std::size_t i = 0; i < starts.size() && i < inst.durations.size(); ++i)
    m = std::max(m, starts[i] + inst.durations[i]);
  return m;
}

inline Schedule make_schedule(const Instance& inst, std::vector<Value> starts) {
  Schedule s;
  s.makespan = makespan_of(inst, starts);
  s.starts = std::move(starts);
  return s;
}

enum class ViolationKind {
  IndexOutOfRange,
  NegativeDuration,
  NegativeDemand,
  SelfLoop,
  NonPositiveCapacity,
  NonPositiveHorizon,
  ShapeMismatch,
  Precedence,
  ResourceOverload,
  ExceedsHorizon,
  NegativeStart,
  Arity,
};

struct Violation {
  ViolationKind kind;
  std::string message;
};

using Violations = std::vector<Violation>;

namespace detail {

template <typename... Ts>
std::string concat(const Ts&... parts) {
  std::ostringstream os;
  (os << ... << parts);
  return os.str();
}

}  // namespace detail

/// Structural checks on an instance. Never throws; an empty result means ok.
inline Violations validate(const Instance& inst) {
  using detail::concat;
  Violations out;
  const std::size_t m = inst.capacities.size();
  if (inst.durations.size() != inst.n)
    out.push_back({ViolationKind::ShapeMismatch,
                   concat("durations has ", inst.durations.size(), " entries, expected ", inst.n)});
  if (inst.demands.size() != inst.n)
    out.push_back({ViolationKind::ShapeMismatch,
                   concat("demands has ", inst.demands.size(), " rows, expected ", inst.n)});
  for (std::size_t i = 0; i < inst.durations.size(); ++i)
    if (inst.durations[i] < 0)
      out.push_back({ViolationKind::NegativeDuration, concat("negative duration for activity ", i)});
  for (std::size_t i = 0; i < inst.demands.size(); ++i) {
    if (inst.demands[i].size() != m)
      out.push_back({ViolationKind::ShapeMismatch,
                     concat("demand row ", i, " has ", inst.demands[i].size(), " entries, expected ", m)});
    for (std::size_t k = 0; k < inst.demands[i].size(); ++k)
      if (inst.demands[i][k] < 0)
        out.push_back({ViolationKind::NegativeDemand,
                       concat("negative demand for activity ", i, " on resource ", k)});
  }
  for (std::size_t k = 0; k < m; ++k)
    if (inst.capacities[k] <= 0)
      out.push_back({ViolationKind::NonPositiveCapacity, concat("non-positive capacity for resource ", k)});
  for (const auto& p : inst.precedences) {
    if (p.from >= inst.n || p.to >= inst.n)
      out.push_back({ViolationKind::IndexOutOfRange,
                     concat("precedence (", p.from, ",", p.to, ",", p.lag, ") index out of range")});
    else if (p.from == p.to)
      out.push_back({ViolationKind::SelfLoop, concat("self-loop precedence on activity ", p.from)});
  }
  if (inst.horizon && *inst.horizon <= 0)
    out.push_back({ViolationKind::NonPositiveHorizon, concat("non-positive horizon ", *inst.horizon)});
  return out;
}

/// Checks precedences, resource profiles and the horizon for a full start
/// assignment. Without a horizon only precedences and resources are checked.
inline Violations check_schedule(const Instance& inst, const Schedule& sched) {
  using detail::concat;
  Violations out;
  if (sched.starts.size() != inst.n) {
    out.push_back({ViolationKind::Arity,
                   concat("schedule has ", sched.starts.size(), " start times, expected ", inst.n)});
    return out;
  }
  const auto& s = sched.starts;
  for (std::size_t i = 0; i < inst.n; ++i) {
    if (s[i] < 0) out.push_back({ViolationKind::NegativeStart, concat("activity ", i, " starts before 0")});
    if (inst.horizon && s[i] + inst.durations[i] > *inst.horizon)
      out.push_back({ViolationKind::ExceedsHorizon,
                     concat("activity ", i, " ends at ", s[i] + inst.durations[i], " which exceeds horizon ",
                            *inst.horizon)});
  }
  for (const auto& p : inst.precedences) {
    if (s[p.from] + p.lag > s[p.to])
      out.push_back({ViolationKind::Precedence,
                     concat("precedence S", p.from, " + ", p.lag, " <= S", p.to, " violated (", s[p.from],
                            " + ", p.lag, " > ", s[p.to], ")")});
  }
  // Profile over every time point some activity runs.
  Value t_end = 0;
  for (std::size_t i = 0; i < inst.n; ++i) t_end = std::max(t_end, s[i] + inst.durations[i]);
  Value t_begin = 0;
  for (std::size_t i = 0; i < inst.n; ++i) t_begin = std::min(t_begin, s[i]);
  for (std::size_t k = 0; k < inst.num_resources(); ++k) {
    for (Value t = t_begin; t < t_end; ++t) {
      Value used = 0;
      for (std::size_t i = 0; i < inst.n; ++i)
        if (s[i] <= t && t < s[i] + inst.durations[i]) used += inst.demands[i][k];
      if (used > inst.capacities[k])
        out.push_back({ViolationKind::ResourceOverload,
                       concat("resource ", k, " overloaded at time ", t, " (", used, " > ",
                              inst.capacities[k], ")")});
    }
  }
  return out;
}

enum class BruteForceStatus { Optimal, Infeasible, Exhausted };

struct BruteForceResult {
  BruteForceStatus status = BruteForceStatus::Exhausted;
  std::optional<Schedule> schedule;
  std::uint64_t states = 0;
};

namespace detail {

class BruteForce {
 public:
  BruteForce(const Instance& inst, Value horizon, std::uint64_t limit)
      : inst_(inst), horizon_(horizon), limit_(limit), starts_(inst.n, 0),
        usage_(inst.num_resources(), std::vector<Value>(static_cast<std::size_t>(std::max<Value>(horizon, 0)), 0)) {
    incoming_.resize(inst.n);
    for (const auto& p : inst.precedences) {
      // Checked when the later-indexed endpoint is placed.
      incoming_[std::max(p.from, p.to)].push_back(p);
    }
  }

  BruteForceResult run() {
    BruteForceResult r;
    exhausted_ = false;
    place(0, 0);
    r.states = states_;
    if (exhausted_) {
      r.status = BruteForceStatus::Exhausted;
    } else if (best_) {
      r.status = BruteForceStatus::Optimal;
      r.schedule = make_schedule(inst_, *best_);
    } else {
      r.status = BruteForceStatus::Infeasible;
    }
    return r;
  }

 private:
  bool fits(std::size_t i, Value s) const {
    for (std::size_t k = 0; k < inst_.num_resources(); ++k) {
      const Value r = inst_.demands[i][k];
      if (r == 0) continue;
      for (Value t = s; t < s + inst_.durations[i]; ++t)
        if (usage_[k][static_cast<std::size_t>(t)] + r > inst_.capacities[k]) return false;
    }
    return true;
  }

  void occupy(std::size_t i, Value s, Value sign) {
    for (std::size_t k = 0; k < inst_.num_resources(); ++k)
      for (Value t = s; t < s + inst_.durations[i]; ++t)
        usage_[k][static_cast<std::size_t>(t)] += sign * inst_.demands[i][k];
  }

  bool precedences_ok(std::size_t i) const {
    for (const auto& p : incoming_[i])
      if (starts_[p.from] + p.lag > starts_[p.to]) return false;
    return true;
  }

  void place(std::size_t i, Value partial_makespan) {
    if (exhausted_) return;
    if (++states_ > limit_) {
      exhausted_ = true;
      return;
    }
    if (i == inst_.n) {
      best_ = starts_;
      best_makespan_ = partial_makespan;
      return;
    }
    const Value p = inst_.durations[i];
    for (Value s = 0; s + p <= horizon_; ++s) {
      const Value m = std::max(partial_makespan, s + p);
      if (best_ && m >= best_makespan_) break;
      starts_[i] = s;
      if (!precedences_ok(i) || !fits(i, s)) continue;
      occupy(i, s, 1);
      place(i + 1, m);
      occupy(i, s, -1);
      if (exhausted_) return;
    }
  }

  const Instance& inst_;
  Value horizon_;
  std::uint64_t limit_;
  std::uint64_t states_ = 0;
  bool exhausted_ = false;
  std::vector<Value> starts_;
  std::vector<std::vector<Value>> usage_;
  std::vector<std::vector<Precedence>> incoming_;
  std::optional<std::vector<Value>> best_;
  Value best_makespan_ = 0;
};

}  // namespace detail

/// Depth-first enumeration of start tuples in [0, horizon - p_i] with
/// precedence/resource pruning and makespan bounding. Requires a horizon.
inline BruteForceResult brute_force_solve(const Instance& inst, std::uint64_t limit_states) {
  if (!inst.horizon) throw std::invalid_argument("brute_force_solve requires an instance horizon");
  return detail::BruteForce(inst, *inst.horizon, limit_states).run();
}

}  // namespace rcm
