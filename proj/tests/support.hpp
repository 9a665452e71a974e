#pragma once

// Fixtures, a seeded instance generator and an independent box-restricted
// schedule search shared by the unit and acceptance suites.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "rcm/rcm.hpp"

namespace rcm::testing {

/// Five activities a..e on one resource of capacity 4.
inline Instance ex1(std::optional<Value> horizon = 15) {
  Instance inst;
  inst.n = 5;
  inst.durations = {2, 5, 3, 1, 2};
  inst.demands = {{3}, {2}, {1}, {2}, {2}};
  inst.capacities = {4};
  inst.precedences = {{0, 1, 2}, {1, 2, 1}, {2, 0, -6}, {3, 4, 3}, {4, 3, -3}};
  inst.horizon = horizon;
  return inst;
}

/// Two equal-start activities that together overload the resource.
inline Instance forced_overlap() {
  Instance inst;
  inst.n = 2;
  inst.durations = {2, 2};
  inst.demands = {{3}, {3}};
  inst.capacities = {4};
  inst.precedences = {{0, 1, 0}, {1, 0, 0}};
  inst.horizon = 10;
  return inst;
}

struct GenParams {
  std::size_t max_n = 6;
  std::size_t max_resources = 2;
  Value max_capacity = 4;
  Value max_duration = 4;
  Value max_demand = 4;
  Value min_lag = -6, max_lag = 6;
  Value horizon_cap = 25;
};

/// Random small instance; horizon is the trivial bound capped at
/// `horizon_cap` (and at least 1).
inline Instance random_instance(std::uint64_t seed, const GenParams& g = {}) {
  std::mt19937_64 rng(seed);
  auto uni = [&](Value lo, Value hi) { return std::uniform_int_distribution<Value>(lo, hi)(rng); };
  Instance inst;
  inst.n = static_cast<std::size_t>(uni(2, static_cast<Value>(g.max_n)));
  const auto m = static_cast<std::size_t>(uni(1, static_cast<Value>(g.max_resources)));
  for (std::size_t k = 0; k < m; ++k) inst.capacities.push_back(uni(1, g.max_capacity));
  for (std::size_t i = 0; i < inst.n; ++i) {
    inst.durations.push_back(uni(0, g.max_duration));
    std::vector<Value> row;
    for (std::size_t k = 0; k < m; ++k) row.push_back(uni(0, g.max_demand));
    inst.demands.push_back(std::move(row));
  }
  const auto arcs = uni(0, static_cast<Value>(inst.n + 2));
  for (Value a = 0; a < arcs; ++a) {
    const auto i = static_cast<std::size_t>(uni(0, static_cast<Value>(inst.n) - 1));
    auto j = static_cast<std::size_t>(uni(0, static_cast<Value>(inst.n) - 2));
    if (j >= i) ++j;
    inst.precedences.push_back({i, j, uni(g.min_lag, g.max_lag)});
  }
  inst.horizon = std::max<Value>(1, std::min(trivial_horizon(inst), g.horizon_cap));
  return inst;
}

inline constexpr std::uint64_t kCorpusSeed = 20260101;
inline constexpr std::size_t kCorpusSize = 200;

inline std::vector<Instance> corpus() {
  std::vector<Instance> out;
  for (std::size_t k = 0; k < kCorpusSize; ++k) out.push_back(random_instance(kCorpusSeed + k));
  return out;
}

/// Search for any schedule with starts in per-activity windows, ends within
/// `horizon`, satisfying all precedences, resources and the extra ordering
/// constraints S_from + lag <= S_to, whose makespan lies in [ms_lo, ms_hi].
/// Plain enumeration in index order; independent of the solver.
class BoxSearch {
 public:
  BoxSearch(const Instance& inst, Value horizon, std::vector<std::pair<Value, Value>> windows,
            std::vector<Precedence> extra, Value ms_lo, Value ms_hi)
      : inst_(inst), horizon_(horizon), win_(std::move(windows)), ms_lo_(ms_lo), ms_hi_(ms_hi) {
    arcs_ = inst.precedences;
    arcs_.insert(arcs_.end(), extra.begin(), extra.end());
    for (std::size_t i = 0; i < inst.n; ++i) {
      win_[i].first = std::max<Value>(win_[i].first, 0);
      win_[i].second = std::min(win_[i].second, horizon - inst.durations[i]);
    }
    starts_.assign(inst.n, 0);
  }

  std::optional<std::vector<Value>> find() {
    if (ms_lo_ > ms_hi_) return std::nullopt;
    if (dfs(0)) return starts_;
    return std::nullopt;
  }

 private:
  bool dfs(std::size_t i) {
    if (i == inst_.n) return accept();
    for (Value s = win_[i].first; s <= win_[i].second; ++s) {
      starts_[i] = s;
      if (s + inst_.durations[i] > ms_hi_) break;
      bool ok = true;
      for (const auto& a : arcs_) {
        const std::size_t later = std::max(a.from, a.to);
        if (later == i && starts_[a.from] + a.lag > starts_[a.to]) {
          ok = false;
          break;
        }
      }
      if (ok && fits(i) && dfs(i + 1)) return true;
    }
    return false;
  }

  // Resource usage of activities 0..i stays within capacity over i's run.
  bool fits(std::size_t i) const {
    for (std::size_t k = 0; k < inst_.num_resources(); ++k) {
      if (inst_.demands[i][k] == 0) continue;
      for (Value t = starts_[i]; t < starts_[i] + inst_.durations[i]; ++t) {
        Value use = 0;
        for (std::size_t j = 0; j <= i; ++j)
          if (starts_[j] <= t && t < starts_[j] + inst_.durations[j]) use += inst_.demands[j][k];
        if (use > inst_.capacities[k]) return false;
      }
    }
    return true;
  }

  bool accept() const {
    Value ms = 0;
    for (std::size_t i = 0; i < inst_.n; ++i) ms = std::max(ms, starts_[i] + inst_.durations[i]);
    if (ms < ms_lo_ || ms > ms_hi_) return false;
    for (std::size_t k = 0; k < inst_.num_resources(); ++k) {
      for (Value t = 0; t < horizon_; ++t) {
        Value use = 0;
        for (std::size_t i = 0; i < inst_.n; ++i)
          if (starts_[i] <= t && t < starts_[i] + inst_.durations[i]) use += inst_.demands[i][k];
        if (use > inst_.capacities[k]) return false;
      }
    }
    return true;
  }

  const Instance& inst_;
  Value horizon_;
  std::vector<std::pair<Value, Value>> win_;
  Value ms_lo_, ms_hi_;
  std::vector<Precedence> arcs_;
  std::vector<Value> starts_;
};

/// A learned nogood is entailed when no schedule of the phase model lies in
/// the region where every literal is false. Starts map to activities, the
/// objective bounds the makespan (capped by its root upper bound `obj_root_ub`
/// at learning time), and disjunct controls force an ordering.
inline bool nogood_entailed(const Model& m, const std::vector<BoundLit>& nogood, Value obj_root_ub) {
  const Instance& inst = *m.instance;
  std::vector<std::pair<Value, Value>> win(inst.n, {0, m.horizon});
  Value obj_lo = 0, obj_hi = obj_root_ub;
  std::vector<std::pair<Value, Value>> ctrl(m.disjuncts.size(), {0, 1});
  for (const auto& lit : nogood) {
    const BoundLit f = ~lit;  // must hold in the box
    auto narrow = [&](std::pair<Value, Value>& w) {
      if (f.rel == Rel::Leq)
        w.second = std::min(w.second, f.value);
      else
        w.first = std::max(w.first, f.value);
    };
    bool found = false;
    for (std::size_t i = 0; i < inst.n && !found; ++i)
      if (m.starts[i] == f.var) narrow(win[i]), found = true;
    if (!found && f.var == m.objective) {
      std::pair<Value, Value> w{obj_lo, obj_hi};
      narrow(w);
      obj_lo = w.first, obj_hi = w.second;
      found = true;
    }
    for (std::size_t k = 0; k < m.disjuncts.size() && !found; ++k)
      if (m.disjuncts[k].order == f.var) narrow(ctrl[k]), found = true;
    if (!found) return false;  // literal on an unknown variable
  }
  std::vector<Precedence> extra;
  for (std::size_t k = 0; k < m.disjuncts.size(); ++k) {
    const auto [lo, hi] = ctrl[k];
    if (lo > hi) return true;
    const auto& d = m.disjuncts[k];
    if (lo == 1) extra.push_back({d.i, d.j, inst.durations[d.i]});
    if (hi == 0) extra.push_back({d.j, d.i, inst.durations[d.j]});
  }
  // With the objective at least every S_i + tail_i, a feasible schedule's
  // makespan M admits an objective value in [max(M, obj_lo), obj_hi].
  BoxSearch search(inst, m.horizon, win, extra, 0, obj_hi);
  if (obj_lo > obj_hi) return true;
  return !search.find().has_value();
}

}  // namespace rcm::testing
