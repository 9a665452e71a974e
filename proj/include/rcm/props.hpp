#pragma once

// Explaining propagators: generalized precedence, half-reified precedence for
// activities in disjunction, and timetable filtering for cumulative resources
// with pointwise explanations.

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <optional>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

#include "rcm/engine.hpp"

namespace rcm {

// ---------------------------------------------------------------------------
// Precedence S_from + lag <= S_to

/// Lower-bound step for S_to: [lb_from <= S_from] -> [lb_from + lag <= S_to].
inline Explanation precedence_lb_explanation(VarId from, VarId to, Value lag, Value lb_from) {
  return {geq(to, lb_from + lag), {geq(from, lb_from)}};
}

/// Upper-bound step for S_from: [S_to <= ub_to] -> [S_from <= ub_to - lag].
inline Explanation precedence_ub_explanation(VarId from, VarId to, Value lag, Value ub_to) {
  return {leq(from, ub_to - lag), {leq(to, ub_to)}};
}

class PrecedenceProp final : public Propagator {
 public:
  PrecedenceProp(VarId from, VarId to, Value lag) : from_(from), to_(to), lag_(lag) {}

  static Engine::PropId post(Engine& e, VarId from, VarId to, Value lag) {
    const auto id = e.post(std::make_unique<PrecedenceProp>(from, to, lag));
    e.subscribe(id, from, Rel::Geq);
    e.subscribe(id, to, Rel::Leq);
    return id;
  }

  bool propagate(Engine& e) override {
    if (e.lb(to_) < e.lb(from_) + lag_) {
      auto ex = precedence_lb_explanation(from_, to_, lag_, e.lb(from_));
      if (!e.explain(*ex.head, std::move(ex.body))) return false;
    }
    if (e.ub(from_) > e.ub(to_) - lag_) {
      auto ex = precedence_ub_explanation(from_, to_, lag_, e.ub(to_));
      if (!e.explain(*ex.head, std::move(ex.body))) return false;
    }
    return true;
  }

  VarId from() const { return from_; }
  VarId to() const { return to_; }
  Value lag() const { return lag_; }

 private:
  VarId from_, to_;
  Value lag_;
};

// ---------------------------------------------------------------------------
// control -> S_from + lag <= S_to

/// One half of a disjunction: when `control` holds the precedence is active;
/// when the precedence cannot hold under the current bounds, `control` is
/// refuted. `sibling` is the other half's precedence (under ~control); if
/// both are impossible the propagator fails on the four bounds.
class ReifiedPrecProp final : public Propagator {
 public:
  struct Half {
    VarId from, to;
    Value lag;
  };

  ReifiedPrecProp(BoundLit control, Half guarded, Half sibling)
      : control_(control), guarded_(guarded), sibling_(sibling) {}

  /// Posts both halves of "i before j or j before i" sharing Boolean b:
  /// [b >= 1] -> S_i + p_i <= S_j and [b <= 0] -> S_j + p_j <= S_i.
  static void post_pair(Engine& e, VarId b, VarId si, Value pi, VarId sj, Value pj) {
    const Half i_first{si, sj, pi}, j_first{sj, si, pj};
    for (const auto& [ctrl, guarded, sibling] :
         {std::tuple{geq(b, 1), i_first, j_first}, std::tuple{leq(b, 0), j_first, i_first}}) {
      const auto id = e.post(std::make_unique<ReifiedPrecProp>(ctrl, guarded, sibling));
      e.subscribe_bounds(id, b);
      e.subscribe_bounds(id, si);
      e.subscribe_bounds(id, sj);
    }
  }

  bool propagate(Engine& e) override {
    const LBool c = e.value(control_);
    if (c == LBool::False) return true;
    const auto [from, to, lag] = guarded_;
    if (c == LBool::True) {
      if (e.lb(to) < e.lb(from) + lag) {
        if (!e.explain(geq(to, e.lb(from) + lag), {control_, geq(from, e.lb(from))})) return false;
      }
      if (e.ub(from) > e.ub(to) - lag) {
        if (!e.explain(leq(from, e.ub(to) - lag), {control_, leq(to, e.ub(to))})) return false;
      }
      return true;
    }
    if (e.lb(from) + lag <= e.ub(to)) return true;
    // Guarded precedence is impossible.
    std::vector<BoundLit> body{geq(from, e.lb(from)), leq(to, e.ub(to))};
    const auto [sf, st, sl] = sibling_;
    if (e.lb(sf) + sl > e.ub(st)) {
      body.push_back(geq(sf, e.lb(sf)));
      body.push_back(leq(st, e.ub(st)));
      return e.fail(std::move(body));
    }
    return e.explain(~control_, std::move(body));
  }

  int priority() const override { return 0; }

 private:
  BoundLit control_;
  Half guarded_, sibling_;
};

// ---------------------------------------------------------------------------
// Timetable cumulative

struct TaskSpec {
  VarId start;
  Value duration;
  Value demand;
};

/// Contributor literals showing every task in `contributors` runs throughout
/// [t1, t2]: [t2 - p_j + 1 <= S_j] and [S_j <= t1]. Literals true at level 0
/// are left out.
inline void append_cover(const Trail& trail, std::span<const TaskSpec> contributors, Value t1, Value t2,
                         std::vector<BoundLit>& body) {
  auto add = [&](BoundLit l) {
    if (!trail.true_at_root(l)) body.push_back(l);
  };
  for (const auto& c : contributors) {
    add(geq(c.start, t2 - c.duration + 1));
    add(leq(c.start, t1));
  }
}

/// Body of the pointwise explanation that `pushed` cannot run at time t:
/// [t - p + 1 <= S_pushed] for the pushed task plus, for each contributor,
/// [t - p_j + 1 <= S_j] and [S_j <= t]. Literals true at level 0 are left out.
inline std::vector<BoundLit> pointwise_body(const Trail& trail, const TaskSpec* pushed, std::span<const TaskSpec> contributors,
                                            Value t) {
  std::vector<BoundLit> body;
  if (pushed && !trail.true_at_root(geq(pushed->start, t - pushed->duration + 1)))
    body.push_back(geq(pushed->start, t - pushed->duration + 1));
  append_cover(trail, contributors, t, t, body);
  return body;
}

/// Pointwise explanation for raising the start of `pushed` past time t.
inline Explanation pointwise_explanation(const Trail& trail, const TaskSpec& pushed, std::span<const TaskSpec> contributors,
                                         Value t) {
  return {geq(pushed.start, t + 1), pointwise_body(trail, &pushed, contributors, t)};
}

/// Raising the start of `pushed` past t2 when the contributors fill [t1, t2]
/// and every start from t1 - p + 1 up to t2 overlaps that range. Equals the
/// pointwise explanation when t1 == t2.
inline Explanation interval_explanation(const Trail& trail, const TaskSpec& pushed,
                                        std::span<const TaskSpec> contributors, Value t1, Value t2) {
  Explanation ex{geq(pushed.start, t2 + 1), {}};
  if (!trail.true_at_root(geq(pushed.start, t1 - pushed.duration + 1)))
    ex.body.push_back(geq(pushed.start, t1 - pushed.duration + 1));
  append_cover(trail, contributors, t1, t2, ex.body);
  return ex;
}

/// Mirrored explanation for lowering the latest start of `pushed` so that it
/// ends by t1: [S_pushed <= t2] plus contributors filling [t1, t2] ->
/// [S_pushed <= t1 - p].
inline Explanation interval_explanation_ub(const Trail& trail, const TaskSpec& pushed,
                                           std::span<const TaskSpec> contributors, Value t1, Value t2) {
  Explanation ex{leq(pushed.start, t1 - pushed.duration), {}};
  if (!trail.true_at_root(leq(pushed.start, t2))) ex.body.push_back(leq(pushed.start, t2));
  append_cover(trail, contributors, t1, t2, ex.body);
  return ex;
}

/// Pointwise form of the mirrored explanation at time t.
inline Explanation pointwise_explanation_ub(const Trail& trail, const TaskSpec& pushed,
                                            std::span<const TaskSpec> contributors, Value t) {
  return interval_explanation_ub(trail, pushed, contributors, t, t);
}

/// Profile segment [begin, end) with constant compulsory-part height.
struct ProfileSegment {
  Value begin, end;
  Value height;
};

class TimetableProp final : public Propagator {
 public:
  TimetableProp(std::vector<TaskSpec> tasks, Value capacity) : tasks_(std::move(tasks)), capacity_(capacity) {}

  static Engine::PropId post(Engine& e, std::vector<TaskSpec> tasks, Value capacity) {
    std::erase_if(tasks, [](const TaskSpec& t) { return t.duration <= 0 || t.demand <= 0; });
    std::vector<VarId> starts;
    for (const auto& t : tasks) starts.push_back(t.start);
    const auto id = e.post(std::make_unique<TimetableProp>(std::move(tasks), capacity));
    for (VarId s : starts) e.subscribe_bounds(id, s);
    return id;
  }

  int priority() const override { return 1; }

  bool propagate(Engine& e) override {
    for (;;) {
      build_profile(e);
      if (auto over = std::find_if(profile_.begin(), profile_.end(),
                                   [&](const ProfileSegment& s) { return s.height > capacity_; });
          over != profile_.end()) {
        const Value t = over->begin;
        const auto who = covering(e, t, tasks_.size());
        return e.fail(pointwise_body(e.trail(), nullptr, who, t));
      }
      bool changed = false;
      for (std::size_t i = 0; i < tasks_.size(); ++i) {
        bool moved = false;
        if (!push_lower(e, i, moved)) return false;
        changed |= moved;
        moved = false;
        if (!push_upper(e, i, moved)) return false;
        changed |= moved;
      }
      if (!changed) return true;
    }
  }

  const std::vector<ProfileSegment>& profile() const { return profile_; }
  const std::vector<TaskSpec>& tasks() const { return tasks_; }

  /// Compulsory part [begin, end) of task i at profile-build time, if any.
  std::optional<std::pair<Value, Value>> compulsory_part(std::size_t i) const { return parts_[i]; }

 private:
  void build_profile(const Engine& e) {
    parts_.assign(tasks_.size(), std::nullopt);
    std::vector<std::pair<Value, Value>> events;  // (time, delta)
    for (std::size_t i = 0; i < tasks_.size(); ++i) {
      const auto& t = tasks_[i];
      const Value b = e.ub(t.start), en = e.lb(t.start) + t.duration;
      if (b < en) {
        parts_[i] = {b, en};
        events.emplace_back(b, t.demand);
        events.emplace_back(en, -t.demand);
      }
    }
    std::sort(events.begin(), events.end());
    profile_.clear();
    Value height = 0;
    for (std::size_t k = 0; k < events.size();) {
      const Value time = events[k].first;
      while (k < events.size() && events[k].first == time) height += events[k++].second;
      if (k < events.size() && height > 0) profile_.push_back({time, events[k].first, height});
    }
  }

  /// Tasks other than `skip` whose compulsory part covers t.
  std::vector<TaskSpec> covering(const Engine&, Value t, std::size_t skip) const {
    std::vector<TaskSpec> out;
    for (std::size_t j = 0; j < tasks_.size(); ++j)
      if (j != skip && parts_[j] && parts_[j]->first <= t && t < parts_[j]->second) out.push_back(tasks_[j]);
    return out;
  }

  Value height_without(std::size_t i, const ProfileSegment& s) const {
    const bool own = parts_[i] && parts_[i]->first <= s.begin && s.begin < parts_[i]->second;
    return s.height - (own ? tasks_[i].demand : 0);
  }

  // Ascending sweep: a task at its earliest start overlapping a segment with
  // no room for it cannot start anywhere up to the segment's last point, so
  // its earliest start moves to the segment end.
  bool push_lower(Engine& e, std::size_t i, bool& moved) {
    const auto& task = tasks_[i];
    std::size_t k = 0;
    while (k < profile_.size()) {
      const auto& seg = profile_[k];
      const Value est = e.lb(task.start);
      if (seg.end <= est || height_without(i, seg) + task.demand <= capacity_) {
        ++k;
        continue;
      }
      if (seg.begin >= est + task.duration) break;
      const Value t2 = seg.end - 1;
      const Value t1 = std::min(t2, est + task.duration - 1);
      const auto who = covering(e, t1, i);
      auto ex = interval_explanation(e.trail(), task, who, t1, t2);
      if (!e.explain(*ex.head, std::move(ex.body))) return false;
      moved = true;
      ++k;
    }
    return true;
  }

  // Descending sweep, mirrored on the latest start.
  bool push_upper(Engine& e, std::size_t i, bool& moved) {
    const auto& task = tasks_[i];
    std::size_t k = profile_.size();
    while (k > 0) {
      const auto& seg = profile_[k - 1];
      const Value lst = e.ub(task.start);
      if (seg.begin >= lst + task.duration || height_without(i, seg) + task.demand <= capacity_) {
        --k;
        continue;
      }
      if (seg.end <= lst) break;
      const Value t1 = seg.begin;
      const Value t2 = std::max(t1, lst);
      const auto who = covering(e, t1, i);
      auto ex = interval_explanation_ub(e.trail(), task, who, t1, t2);
      if (!e.explain(*ex.head, std::move(ex.body))) return false;
      moved = true;
      --k;
    }
    return true;
  }

  std::vector<TaskSpec> tasks_;
  Value capacity_;
  std::vector<ProfileSegment> profile_;
  std::vector<std::optional<std::pair<Value, Value>>> parts_;
};

}  // namespace rcm
