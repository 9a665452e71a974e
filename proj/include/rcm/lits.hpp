#pragma once

// Bounds-literal encoding of integer variables and the level-stamped trail.
//
// Each integer variable x with initial domain [lo, hi] owns the Boolean
// variables [x <= d] for d in [lo, hi-1]. Only bounds literals exist; the
// chain [x <= d] -> [x <= d+1] is implicit in the stored lower/upper bound,
// so a literal's value is read off the bounds and the trail records bound
// changes rather than individual chain consequences.

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rcm/model.hpp"

namespace rcm {

using VarId = std::int32_t;
using ClauseRef = std::int32_t;

inline constexpr ClauseRef kDecision = -1;
inline constexpr ClauseRef kRootFact = -2;

enum class Rel : std::uint8_t { Leq, Geq };

/// [var <= value] or [var >= value].
struct BoundLit {
  VarId var = 0;
  Rel rel = Rel::Leq;
  Value value = 0;

  friend bool operator==(const BoundLit&, const BoundLit&) = default;
  friend auto operator<=>(const BoundLit&, const BoundLit&) = default;
};

inline BoundLit leq(VarId x, Value v) { return {x, Rel::Leq, v}; }
inline BoundLit geq(VarId x, Value v) { return {x, Rel::Geq, v}; }

inline BoundLit operator~(BoundLit l) {
  return l.rel == Rel::Leq ? geq(l.var, l.value + 1) : leq(l.var, l.value - 1);
}

inline std::ostream& operator<<(std::ostream& os, const BoundLit& l) {
  return os << "[x" << l.var << (l.rel == Rel::Leq ? " <= " : " >= ") << l.value << "]";
}

enum class LBool : std::uint8_t { False, True, Undef };

struct TrailEntry {
  VarId var = 0;
  Rel rel = Rel::Leq;  // Leq: upper bound lowered, Geq: lower bound raised
  Value value = 0;
  Value previous = 0;
  int level = 0;
  ClauseRef reason = kDecision;

  BoundLit literal() const { return {var, rel, value}; }
};

class Trail {
 public:
  enum class Push { Changed, Unchanged, Conflict };

  VarId new_int_var(Value lo, Value hi) {
    if (lo > hi)
      throw std::invalid_argument("empty initial domain [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    const auto id = static_cast<VarId>(vars_.size());
    vars_.push_back({lo, hi, lo, hi, num_bools_});
    num_bools_ += static_cast<std::size_t>(hi - lo);
    owner_.resize(num_bools_, id);
    lb_hist_.emplace_back();
    ub_hist_.emplace_back();
    return id;
  }

  std::size_t num_vars() const { return vars_.size(); }
  std::size_t num_bool_vars() const { return num_bools_; }

  Value lb(VarId x) const { return vars_[x].lb; }
  Value ub(VarId x) const { return vars_[x].ub; }
  Value initial_lb(VarId x) const { return vars_[x].lo; }
  Value initial_ub(VarId x) const { return vars_[x].hi; }
  bool fixed(VarId x) const { return vars_[x].lb == vars_[x].ub; }

  /// Bounds-only projection of the assignment onto x.
  std::pair<Value, Value> domain(VarId x) const { return {lb(x), ub(x)}; }

  LBool value(BoundLit l) const {
    const auto& v = vars_[l.var];
    if (l.rel == Rel::Leq) {
      if (v.ub <= l.value) return LBool::True;
      if (v.lb > l.value) return LBool::False;
    } else {
      if (v.lb >= l.value) return LBool::True;
      if (v.ub < l.value) return LBool::False;
    }
    return LBool::Undef;
  }

  /// Constant literals lie outside the initial domain's encoding.
  std::optional<bool> constant(BoundLit l) const {
    const auto& v = vars_[l.var];
    if (l.rel == Rel::Leq) {
      if (l.value >= v.hi) return true;
      if (l.value < v.lo) return false;
    } else {
      if (l.value <= v.lo) return true;
      if (l.value > v.hi) return false;
    }
    return std::nullopt;
  }

  int level() const { return static_cast<int>(level_start_.size()); }
  void new_level() { level_start_.push_back(entries_.size()); }

  Push push(BoundLit l, ClauseRef reason) {
    switch (value(l)) {
      case LBool::True: return Push::Unchanged;
      case LBool::False: return Push::Conflict;
      case LBool::Undef: break;
    }
    auto& v = vars_[l.var];
    TrailEntry e{l.var, l.rel, l.value, 0, level(), reason};
    if (l.rel == Rel::Leq) {
      e.previous = v.ub;
      v.ub = l.value;
      ub_hist_[l.var].push_back(entries_.size());
    } else {
      e.previous = v.lb;
      v.lb = l.value;
      lb_hist_[l.var].push_back(entries_.size());
    }
    entries_.push_back(e);
    return Push::Changed;
  }

  /// Pops every entry above `target`, restoring bounds. `on_undo` sees each
  /// entry after its bound has been restored.
  void backjump(int target, const std::function<void(const TrailEntry&)>& on_undo = {}) {
    if (target < 0 || target >= level())
      throw std::logic_error("backjump target " + std::to_string(target) + " not below current level " +
                             std::to_string(level()));
    const std::size_t keep = level_start_[static_cast<std::size_t>(target)];
    while (entries_.size() > keep) {
      const TrailEntry e = entries_.back();
      entries_.pop_back();
      auto& v = vars_[e.var];
      if (e.rel == Rel::Leq) {
        v.ub = e.previous;
        ub_hist_[e.var].pop_back();
      } else {
        v.lb = e.previous;
        lb_hist_[e.var].pop_back();
      }
      if (on_undo) on_undo(e);
    }
    level_start_.resize(static_cast<std::size_t>(target));
  }

  std::size_t size() const { return entries_.size(); }
  const TrailEntry& entry(std::size_t i) const { return entries_[i]; }

  /// Earliest trail entry that made a currently-true literal true; nullopt
  /// when it holds in the initial domain.
  std::optional<std::size_t> entry_for(BoundLit t) const {
    assert(value(t) == LBool::True);
    if (t.rel == Rel::Leq) {
      if (vars_[t.var].hi <= t.value) return std::nullopt;
      const auto& h = ub_hist_[t.var];
      auto it = std::partition_point(h.begin(), h.end(), [&](std::size_t i) { return entries_[i].value > t.value; });
      assert(it != h.end());
      return *it;
    }
    if (vars_[t.var].lo >= t.value) return std::nullopt;
    const auto& h = lb_hist_[t.var];
    auto it = std::partition_point(h.begin(), h.end(), [&](std::size_t i) { return entries_[i].value < t.value; });
    assert(it != h.end());
    return *it;
  }

  /// Decision level at which a true literal became true (0 if initial).
  int level_of(BoundLit t) const {
    auto e = entry_for(t);
    return e ? entries_[*e].level : 0;
  }

  bool true_at_root(BoundLit l) const { return value(l) == LBool::True && level_of(l) == 0; }
  bool false_at_root(BoundLit l) const { return true_at_root(~l); }

  Value root_lb(VarId x) const { return root_bound(x, lb_hist_[x], vars_[x].lo); }
  Value root_ub(VarId x) const { return root_bound(x, ub_hist_[x], vars_[x].hi); }

  /// Literal codes: 2*b for [x <= d], 2*b+1 for its negation, where b is the
  /// Boolean variable index of [x <= d]. Constants have no code.
  std::optional<std::size_t> code(BoundLit l) const {
    const auto& v = vars_[l.var];
    const Value d = l.rel == Rel::Leq ? l.value : l.value - 1;
    if (d < v.lo || d >= v.hi) return std::nullopt;
    const std::size_t b = v.base + static_cast<std::size_t>(d - v.lo);
    return 2 * b + (l.rel == Rel::Leq ? 0 : 1);
  }

  BoundLit literal_of_code(std::size_t c) const {
    const std::size_t b = c / 2;
    const VarId x = owner_[b];
    const Value d = vars_[x].lo + static_cast<Value>(b - vars_[x].base);
    return (c % 2 == 0) ? leq(x, d) : geq(x, d + 1);
  }

  /// Every variable has lb <= ub and monotone bound histories.
  bool consistent() const {
    for (std::size_t x = 0; x < vars_.size(); ++x) {
      const auto& v = vars_[x];
      if (v.lb > v.ub || v.lb < v.lo || v.ub > v.hi) return false;
      for (std::size_t k = 1; k < lb_hist_[x].size(); ++k)
        if (entries_[lb_hist_[x][k]].value <= entries_[lb_hist_[x][k - 1]].value) return false;
      for (std::size_t k = 1; k < ub_hist_[x].size(); ++k)
        if (entries_[ub_hist_[x][k]].value >= entries_[ub_hist_[x][k - 1]].value) return false;
    }
    return true;
  }

 private:
  struct VarState {
    Value lo, hi;
    Value lb, ub;
    std::size_t base;
  };

  Value root_bound(VarId, const std::vector<std::size_t>& hist, Value initial) const {
    auto it = std::partition_point(hist.begin(), hist.end(), [&](std::size_t i) { return entries_[i].level == 0; });
    return it == hist.begin() ? initial : entries_[*(it - 1)].value;
  }

  std::vector<VarState> vars_;
  std::vector<VarId> owner_;
  std::size_t num_bools_ = 0;
  std::vector<TrailEntry> entries_;
  std::vector<std::size_t> level_start_;
  std::vector<std::vector<std::size_t>> lb_hist_;
  std::vector<std::vector<std::size_t>> ub_hist_;
};

}  // namespace rcm
