#pragma once

// Model construction, branching strategies and the two-phase
// feasibility/optimization driver with branch-and-bound on makespan.

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "rcm/engine.hpp"
#include "rcm/model.hpp"
#include "rcm/props.hpp"
#include "rcm/tempo.hpp"

namespace rcm {

enum class Strategy { Mslf, MslfRestart, Vsids, Restart, HotStart, HotRestart };

inline constexpr Strategy kAllStrategies[] = {Strategy::Mslf,    Strategy::MslfRestart, Strategy::Vsids,
                                              Strategy::Restart, Strategy::HotStart,    Strategy::HotRestart};

inline std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::Mslf: return "mslf";
    case Strategy::MslfRestart: return "mslf-restart";
    case Strategy::Vsids: return "vsids";
    case Strategy::Restart: return "restart";
    case Strategy::HotStart: return "hot-start";
    case Strategy::HotRestart: return "hot-restart";
  }
  return "?";
}

inline std::optional<Strategy> parse_strategy(std::string_view name) {
  for (Strategy s : kAllStrategies)
    if (to_string(s) == name) return s;
  return std::nullopt;
}

enum class Status { Optimal, Feasible, Infeasible, Unknown };

inline std::string_view to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "OPTIMAL";
    case Status::Feasible: return "FEASIBLE";
    case Status::Infeasible: return "INFEASIBLE";
    case Status::Unknown: return "UNKNOWN";
  }
  return "?";
}

struct SolveStats {
  std::int64_t nodes = 0;
  std::int64_t fails = 0;
  std::int64_t restarts = 0;
  std::int64_t solutions = 0;
  double runtime = 0.0;
  double phase1_time = 0.0;
  /// Decisions since the previous restart at each restart, in order.
  std::vector<std::int64_t> restart_intervals;
  /// Phase decision count at which a hybrid strategy switched to VSIDS.
  std::optional<std::int64_t> switch_node;
  std::optional<std::int64_t> phase1_switch_node;
};

struct SolveOutcome {
  Status status = Status::Unknown;
  std::optional<Schedule> schedule;
  SolveStats stats;
  /// Makespans of successive improving solutions.
  std::vector<Value> improvements;

  std::optional<Value> makespan() const {
    if (!schedule) return std::nullopt;
    return schedule->makespan;
  }
};

struct Disjunct {
  std::size_t i, j;
  VarId order;  // [order >= 1]: i before j, [order <= 0]: j before i
};

/// Solver state for one phase: start variables with domains [est, lst], an
/// objective variable, and all posted propagators.
struct Model {
  const Instance* instance = nullptr;
  Value horizon = 0;
  Engine engine;
  std::vector<VarId> starts;
  VarId objective = -1;
  std::vector<Disjunct> disjuncts;
  TemporalInfo temporal;
  bool infeasible = false;
  std::string cause;

  explicit Model(std::uint64_t seed) : engine(seed) {}
};

/// Activities that contribute to a disjunction must both take time; a
/// zero-duration activity overlaps nothing.
inline std::vector<std::pair<std::size_t, std::size_t>> model_disjunctions(const Instance& inst) {
  auto pairs = disjunctive_pairs(inst);
  std::erase_if(pairs, [&](const auto& p) { return inst.durations[p.first] == 0 || inst.durations[p.second] == 0; });
  return pairs;
}

inline std::unique_ptr<Model> build_model(const Instance& inst, Value t_max, std::uint64_t seed = 0) {
  auto m = std::make_unique<Model>(seed);
  m->instance = &inst;
  m->horizon = t_max;
  auto temporal = compute_temporal(inst, t_max);
  if (auto* bad = std::get_if<TemporalInfeasible>(&temporal)) {
    m->infeasible = true;
    m->cause = bad->describe();
    return m;
  }
  m->temporal = std::get<TemporalInfo>(std::move(temporal));
  for (std::size_t i = 0; i < inst.n; ++i)
    for (std::size_t k = 0; k < inst.num_resources(); ++k)
      if (inst.durations[i] > 0 && inst.demands[i][k] > inst.capacities[k]) {
        m->infeasible = true;
        m->cause = "activity " + std::to_string(i) + " exceeds capacity of resource " + std::to_string(k);
        return m;
      }

  Engine& e = m->engine;
  const auto& t = m->temporal;
  for (std::size_t i = 0; i < inst.n; ++i) m->starts.push_back(e.new_int_var(t.est[i], t.lst[i]));
  Value obj_lb = 0;
  for (std::size_t i = 0; i < inst.n; ++i) obj_lb = std::max(obj_lb, t.est[i] + t.tail[i]);
  m->objective = e.new_int_var(obj_lb, t_max);

  for (const auto& p : inst.precedences) PrecedenceProp::post(e, m->starts[p.from], m->starts[p.to], p.lag);
  for (std::size_t k = 0; k < inst.num_resources(); ++k) {
    std::vector<TaskSpec> tasks;
    for (std::size_t i = 0; i < inst.n; ++i) tasks.push_back({m->starts[i], inst.durations[i], inst.demands[i][k]});
    TimetableProp::post(e, std::move(tasks), inst.capacities[k]);
  }
  for (const auto& [i, j] : model_disjunctions(inst)) {
    const VarId b = e.new_int_var(0, 1);
    m->disjuncts.push_back({i, j, b});
    ReifiedPrecProp::post_pair(e, b, m->starts[i], inst.durations[i], m->starts[j], inst.durations[j]);
  }
  for (std::size_t i = 0; i < inst.n; ++i) PrecedenceProp::post(e, m->starts[i], m->objective, t.tail[i]);

  if (!e.propagate()) {
    m->infeasible = true;
    m->cause = "root propagation failed";
  }
  return m;
}

/// Index of the unfixed domain with the smallest minimum, ties broken by the
/// widest domain and then the lowest index.
inline std::optional<std::size_t> mslf_select(std::span<const std::pair<Value, Value>> domains) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < domains.size(); ++i) {
    const auto [lo, hi] = domains[i];
    if (lo == hi) continue;
    if (!best) {
      best = i;
      continue;
    }
    const auto [blo, bhi] = domains[*best];
    if (lo < blo || (lo == blo && hi - lo > bhi - blo)) best = i;
  }
  return best;
}

struct MslfChoice {
  std::size_t activity;
  Value split;  // left branch S <= split, right branch S > split
};

inline std::optional<MslfChoice> mslf_pick(const Model& m) {
  std::vector<std::pair<Value, Value>> domains;
  domains.reserve(m.starts.size());
  for (VarId s : m.starts) domains.push_back(m.engine.trail().domain(s));
  auto i = mslf_select(domains);
  if (!i) return std::nullopt;
  return MslfChoice{*i, domains[*i].first};
}

struct SolveOptions {
  Strategy strategy = Strategy::HotRestart;
  std::optional<double> time_limit;  // seconds, both phases together
  std::optional<std::int64_t> node_limit;  // per phase
  std::uint64_t seed = 0;
  std::int64_t restart_base = 250;
  double restart_factor = 2.0;
  /// Hybrid switch thresholds; phase 1 defaults to 5 * n.
  std::int64_t phase2_switch = 500;
  std::optional<std::int64_t> phase1_switch;
  std::function<void(const Model&, const ConflictRecord&)> on_learn;
  std::function<void(const Schedule&)> on_solution;
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct PhaseConfig {
  Strategy strategy;
  std::int64_t switch_threshold;
  bool optimize;
  std::optional<Clock::time_point> deadline;
};

inline Schedule extract_schedule(const Model& m) {
  std::vector<Value> starts;
  starts.reserve(m.starts.size());
  for (VarId s : m.starts) starts.push_back(m.engine.lb(s));
  return make_schedule(*m.instance, std::move(starts));
}

inline void verify(const Model& m, const Schedule& s) {
  Instance bounded = *m.instance;
  bounded.horizon = m.horizon;
  if (!check_schedule(bounded, s).empty()) throw std::logic_error("solver produced an invalid schedule");
}

/// Runs CDCL search on a built model. Satisfaction stops at the first
/// solution; optimization tightens the objective at the root after each.
inline SolveOutcome run_phase(Model& m, const PhaseConfig& cfg, const SolveOptions& opts, SolveStats& stats) {
  SolveOutcome out;
  if (m.infeasible) {
    out.status = Status::Infeasible;
    return out;
  }
  if (cfg.deadline && Clock::now() >= *cfg.deadline) return out;
  Engine& e = m.engine;
  if (opts.on_learn) e.on_learn = [&](const ConflictRecord& r) { opts.on_learn(m, r); };

  const Strategy s = cfg.strategy;
  const bool hybrid = s == Strategy::HotStart || s == Strategy::HotRestart;
  bool vsids = s == Strategy::Vsids || s == Strategy::Restart;
  auto restarts_on = [&] {
    return s == Strategy::MslfRestart || s == Strategy::Restart || (s == Strategy::HotRestart && vsids);
  };
  GeometricRestart policy(opts.restart_base, opts.restart_factor);
  std::int64_t phase_nodes = 0, since_restart = 0;

  auto finish_exhausted = [&] {
    out.status = out.schedule ? Status::Optimal : Status::Infeasible;
    return out;
  };

  for (;;) {
    if (!e.propagate()) {
      ++stats.fails;
      if (e.conflict_level() == 0) return finish_exhausted();
      e.learn_and_jump(e.analyze());
      continue;
    }

    if (std::all_of(m.starts.begin(), m.starts.end(), [&](VarId v) { return e.fixed(v); })) {
      Schedule sol = extract_schedule(m);
      verify(m, sol);
      ++stats.solutions;
      if (opts.on_solution) opts.on_solution(sol);
      out.improvements.push_back(sol.makespan);
      out.schedule = sol;
      if (!cfg.optimize) {
        out.status = Status::Feasible;
        return out;
      }
      e.restart();
      if (!e.assert_root(leq(m.objective, sol.makespan - 1))) return finish_exhausted();
      continue;
    }

    if ((cfg.deadline && Clock::now() >= *cfg.deadline) || (opts.node_limit && phase_nodes >= *opts.node_limit)) {
      out.status = out.schedule ? Status::Feasible : Status::Unknown;
      return out;
    }

    if (hybrid && !vsids && phase_nodes >= cfg.switch_threshold) {
      stats.restart_intervals.push_back(since_restart);
      e.restart();
      vsids = true;
      stats.switch_node = phase_nodes;
      since_restart = 0;
      ++stats.restarts;
      continue;
    }
    if (restarts_on() && policy.due(since_restart)) {
      stats.restart_intervals.push_back(since_restart);
      e.restart();
      policy.on_restart();
      since_restart = 0;
      ++stats.restarts;
      continue;
    }

    std::optional<BoundLit> decision;
    if (vsids) decision = e.pick_vsids();
    if (!decision) {
      const auto c = mslf_pick(m);
      decision = leq(m.starts[c->activity], c->split);
    }
    e.decide(*decision);
    ++phase_nodes;
    ++since_restart;
    ++stats.nodes;
  }
}

inline std::optional<Clock::time_point> deadline_from(Clock::time_point t0, const std::optional<double>& limit) {
  if (!limit) return std::nullopt;
  return t0 + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(*limit));
}

inline SolveOutcome trivial_outcome(const Instance& inst) {
  SolveOutcome out;
  out.status = Status::Optimal;
  out.schedule = make_schedule(inst, {});
  out.improvements.push_back(0);
  return out;
}

inline SolveOutcome phase1(const Instance& inst, const SolveOptions& opts, std::optional<Clock::time_point> deadline) {
  const auto t0 = Clock::now();
  if (inst.n == 0) return trivial_outcome(inst);
  const Value t_max = inst.horizon.value_or(trivial_horizon(inst));
  auto model = build_model(inst, t_max, opts.seed);
  SolveOutcome out;
  const PhaseConfig cfg{Strategy::HotStart, opts.phase1_switch.value_or(5 * static_cast<std::int64_t>(inst.n)), false,
                        deadline};
  SolveStats stats;
  out = run_phase(*model, cfg, opts, stats);
  stats.phase1_switch_node = stats.switch_node;
  stats.switch_node.reset();
  stats.runtime = stats.phase1_time = seconds_since(t0);
  out.stats = stats;
  return out;
}

inline SolveOutcome phase2(const Instance& inst, Value ub, const SolveOptions& opts,
                           std::optional<Clock::time_point> deadline) {
  const auto t0 = Clock::now();
  if (inst.n == 0) return trivial_outcome(inst);
  auto model = build_model(inst, ub, opts.seed);
  const PhaseConfig cfg{opts.strategy, opts.phase2_switch, true, deadline};
  SolveStats stats;
  SolveOutcome out = run_phase(*model, cfg, opts, stats);
  stats.runtime = seconds_since(t0);
  out.stats = stats;
  return out;
}

}  // namespace detail

/// Feasibility phase: horizon from the instance (trivial bound when unset),
/// hot-start search switching to VSIDS after 5n decisions.
inline SolveOutcome solve_phase1(const Instance& inst, const SolveOptions& opts = {}) {
  return detail::phase1(inst, opts, detail::deadline_from(detail::Clock::now(), opts.time_limit));
}

/// Optimization phase with horizon `ub`, using the configured strategy.
inline SolveOutcome solve_phase2(const Instance& inst, Value ub, const SolveOptions& opts = {}) {
  return detail::phase2(inst, ub, opts, detail::deadline_from(detail::Clock::now(), opts.time_limit));
}

/// Both phases under one time budget; statistics cover both.
inline SolveOutcome solve(const Instance& inst, const SolveOptions& opts = {}) {
  using namespace detail;
  const auto t0 = Clock::now();
  const auto deadline = deadline_from(t0, opts.time_limit);
  if (inst.n == 0) return trivial_outcome(inst);

  SolveOutcome first = phase1(inst, opts, deadline);
  if (first.status != Status::Feasible) {
    first.stats.runtime = seconds_since(t0);
    return first;
  }
  SolveOutcome second = phase2(inst, first.schedule->makespan, opts, deadline);

  SolveOutcome out;
  out.stats = second.stats;
  out.stats.nodes += first.stats.nodes;
  out.stats.fails += first.stats.fails;
  out.stats.restarts += first.stats.restarts;
  out.stats.solutions += first.stats.solutions;
  out.stats.phase1_time = first.stats.phase1_time;
  out.stats.phase1_switch_node = first.stats.phase1_switch_node;
  out.stats.restart_intervals.insert(out.stats.restart_intervals.begin(), first.stats.restart_intervals.begin(),
                                     first.stats.restart_intervals.end());
  out.improvements = first.improvements;
  for (Value v : second.improvements)
    if (v < out.improvements.back()) out.improvements.push_back(v);

  if (second.status == Status::Optimal) {
    out.status = Status::Optimal;
    out.schedule = second.schedule;
  } else {
    out.status = Status::Feasible;
    out.schedule = second.schedule && second.schedule->makespan <= first.schedule->makespan ? second.schedule
                                                                                             : first.schedule;
  }
  out.stats.runtime = seconds_since(t0);
  return out;
}

}  // namespace rcm
