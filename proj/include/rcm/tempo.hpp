#pragma once

// Activity-on-node network preprocessing: earliest/latest starts, tails,
// negative-cycle detection and disjunctive activity pairs.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rcm/model.hpp"

namespace rcm {

struct Arc {
  std::size_t from = 0;
  std::size_t to = 0;
  Value weight = 0;

  friend bool operator==(const Arc&, const Arc&) = default;
};

/// Nodes 0..n-1 are activities, node n is the source and node n+1 the sink.
struct AonGraph {
  std::size_t num_activities = 0;
  std::vector<Arc> arcs;

  std::size_t num_nodes() const { return num_activities + 2; }
  std::size_t source() const { return num_activities; }
  std::size_t sink() const { return num_activities + 1; }
};

inline AonGraph build_graph(const Instance& inst) {
  AonGraph g;
  g.num_activities = inst.n;
  g.arcs.reserve(inst.precedences.size() + 2 * inst.n);
  for (const auto& p : inst.precedences) g.arcs.push_back({p.from, p.to, -p.lag});
  for (std::size_t i = 0; i < inst.n; ++i) g.arcs.push_back({g.source(), i, 0});
  for (std::size_t i = 0; i < inst.n; ++i) g.arcs.push_back({i, g.sink(), -inst.durations[i]});
  return g;
}

inline constexpr Value kUnreachable = std::numeric_limits<Value>::max();

struct NegativeCycle {
  std::vector<std::size_t> nodes;  // closed walk, first node not repeated
};

using ShortestPaths = std::variant<std::vector<Value>, NegativeCycle>;

namespace detail {

inline ShortestPaths bellman_ford(std::size_t num_nodes, const std::vector<Arc>& arcs, std::size_t source) {
  std::vector<Value> dist(num_nodes, kUnreachable);
  std::vector<std::size_t> pred(num_nodes, num_nodes);
  dist[source] = 0;
  std::optional<std::size_t> relaxed_last;
  for (std::size_t pass = 0; pass < num_nodes; ++pass) {
    relaxed_last.reset();
    for (const auto& a : arcs) {
      if (dist[a.from] == kUnreachable) continue;
      if (dist[a.from] + a.weight < dist[a.to]) {
        dist[a.to] = dist[a.from] + a.weight;
        pred[a.to] = a.from;
        relaxed_last = a.to;
      }
    }
    if (!relaxed_last) return dist;
  }
  // Still relaxing on pass |V|: walk predecessors |V| times to land inside the cycle.
  std::size_t v = *relaxed_last;
  for (std::size_t i = 0; i < num_nodes; ++i) v = pred[v];
  NegativeCycle cycle;
  std::size_t u = v;
  do {
    cycle.nodes.push_back(u);
    u = pred[u];
  } while (u != v);
  std::reverse(cycle.nodes.begin(), cycle.nodes.end());
  return cycle;
}

}  // namespace detail

inline ShortestPaths shortest_paths(const AonGraph& g, std::size_t source) {
  return detail::bellman_ford(g.num_nodes(), g.arcs, source);
}

struct TemporalInfo {
  std::vector<Value> est;
  std::vector<Value> lst;
  std::vector<Value> tail;
};

struct TemporalInfeasible {
  enum class Cause { NegativeCycle, EmptyWindow } cause;
  std::vector<std::size_t> cycle;   // for NegativeCycle
  std::size_t activity = 0;         // for EmptyWindow
  std::string describe() const {
    if (cause == Cause::NegativeCycle) {
      std::string s = "negative cycle through nodes";
      for (auto v : cycle) s += " " + std::to_string(v);
      return s;
    }
    return "empty start window for activity " + std::to_string(activity);
  }
};

using TemporalResult = std::variant<TemporalInfo, TemporalInfeasible>;

/// est from the source, tails from one Bellman-Ford run on the reversed graph
/// rooted at the sink, lst = t_max - tail.
inline TemporalResult compute_temporal(const Instance& inst, Value t_max) {
  const AonGraph g = build_graph(inst);
  auto forward = shortest_paths(g, g.source());
  if (auto* cyc = std::get_if<NegativeCycle>(&forward))
    return TemporalInfeasible{TemporalInfeasible::Cause::NegativeCycle, cyc->nodes, 0};

  std::vector<Arc> reversed;
  reversed.reserve(g.arcs.size());
  for (const auto& a : g.arcs) reversed.push_back({a.to, a.from, a.weight});
  auto backward = detail::bellman_ford(g.num_nodes(), reversed, g.sink());
  if (auto* cyc = std::get_if<NegativeCycle>(&backward)) {
    std::vector<std::size_t> nodes(cyc->nodes.rbegin(), cyc->nodes.rend());
    return TemporalInfeasible{TemporalInfeasible::Cause::NegativeCycle, std::move(nodes), 0};
  }

  const auto& from_source = std::get<std::vector<Value>>(forward);
  const auto& to_sink = std::get<std::vector<Value>>(backward);
  TemporalInfo info;
  info.est.resize(inst.n);
  info.lst.resize(inst.n);
  info.tail.resize(inst.n);
  for (std::size_t i = 0; i < inst.n; ++i) {
    info.est[i] = -from_source[i];
    info.tail[i] = -to_sink[i];
    info.lst[i] = t_max - info.tail[i];
    if (info.est[i] > info.lst[i])
      return TemporalInfeasible{TemporalInfeasible::Cause::EmptyWindow, {}, i};
  }
  return info;
}

/// Unordered pairs (i < j) whose joint demand exceeds some capacity.
inline std::vector<std::pair<std::size_t, std::size_t>> disjunctive_pairs(const Instance& inst) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < inst.n; ++i)
    for (std::size_t j = i + 1; j < inst.n; ++j)
      for (std::size_t k = 0; k < inst.num_resources(); ++k)
        if (inst.demands[i][k] + inst.demands[j][k] > inst.capacities[k]) {
          out.emplace_back(i, j);
          break;
        }
  return out;
}

/// Sum over activities of max(p_i, largest outgoing lag).
inline Value trivial_horizon(const Instance& inst) {
  std::vector<Value> contribution(inst.durations.begin(), inst.durations.end());
  for (const auto& p : inst.precedences)
    contribution[p.from] = std::max(contribution[p.from], p.lag);
  Value total = 0;
  for (Value c : contribution) total += c;
  return total;
}

}  // namespace rcm
