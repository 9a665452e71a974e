#pragma once

// CDCL core over bounds literals: clause store with two watched literals,
// unit propagation interleaved with explaining propagators, 1UIP conflict
// analysis, per-literal VSIDS and a geometric restart schedule.

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rcm/lits.hpp"

namespace rcm {

enum class ClauseKind : std::uint8_t { Original, Explanation, Learned };

struct Clause {
  std::vector<BoundLit> lits;
  ClauseKind kind = ClauseKind::Original;
};

/// A propagation step C -> head, or a failure C -> false when head is empty.
struct Explanation {
  std::optional<BoundLit> head;
  std::vector<BoundLit> body;

  /// Clausal form: head or the negated body literals.
  std::vector<BoundLit> clause() const {
    std::vector<BoundLit> c;
    c.reserve(body.size() + 1);
    for (const auto& b : body) c.push_back(~b);
    if (head) c.push_back(*head);
    return c;
  }
};

class Engine;

class Propagator {
 public:
  virtual ~Propagator() = default;
  /// Returns false after reporting a conflict through the engine.
  virtual bool propagate(Engine& engine) = 0;
  /// Lower runs first.
  virtual int priority() const { return 0; }

 private:
  friend class Engine;
  bool queued_ = false;
};

/// Max-heap of literal codes by activity; ties go to the lower code.
class ActivityHeap {
 public:
  void grow(std::size_t n) {
    if (pos_.size() < n) pos_.resize(n, npos);
  }

  bool contains(std::size_t c) const { return c < pos_.size() && pos_[c] != npos; }
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }

  void insert(std::size_t c, const std::vector<double>& act) {
    grow(c + 1);
    if (contains(c)) return;
    pos_[c] = heap_.size();
    heap_.push_back(c);
    up(pos_[c], act);
  }

  void increased(std::size_t c, const std::vector<double>& act) {
    if (contains(c)) up(pos_[c], act);
  }

  std::size_t pop(const std::vector<double>& act) {
    const std::size_t top = heap_.front();
    swap_at(0, heap_.size() - 1);
    heap_.pop_back();
    pos_[top] = npos;
    if (!heap_.empty()) down(0, act);
    return top;
  }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  static bool better(std::size_t a, std::size_t b, const std::vector<double>& act) {
    return act[a] > act[b] || (act[a] == act[b] && a < b);
  }

  void swap_at(std::size_t i, std::size_t j) {
    std::swap(heap_[i], heap_[j]);
    pos_[heap_[i]] = i;
    pos_[heap_[j]] = j;
  }

  void up(std::size_t i, const std::vector<double>& act) {
    while (i > 0) {
      const std::size_t parent = (i - 1) / 2;
      if (!better(heap_[i], heap_[parent], act)) break;
      swap_at(i, parent);
      i = parent;
    }
  }

  void down(std::size_t i, const std::vector<double>& act) {
    for (;;) {
      std::size_t best = i;
      const std::size_t l = 2 * i + 1, r = l + 1;
      if (l < heap_.size() && better(heap_[l], heap_[best], act)) best = l;
      if (r < heap_.size() && better(heap_[r], heap_[best], act)) best = r;
      if (best == i) return;
      swap_at(i, best);
      i = best;
    }
  }

  std::vector<std::size_t> heap_;
  std::vector<std::size_t> pos_;
};

/// Restart after `limit` decisions since the previous restart; the limit
/// grows by `factor` each time.
class GeometricRestart {
 public:
  explicit GeometricRestart(std::int64_t base = 250, double factor = 2.0) : base_(base), factor_(factor), limit_(base) {}

  bool due(std::int64_t nodes_since_restart) const { return nodes_since_restart >= limit_; }
  void on_restart() { limit_ = static_cast<std::int64_t>(static_cast<double>(limit_) * factor_); }
  void reset() { limit_ = base_; }
  std::int64_t limit() const { return limit_; }

 private:
  std::int64_t base_;
  double factor_;
  std::int64_t limit_;
};

struct Analysis {
  std::vector<BoundLit> nogood;  // nogood[0] is the asserting literal
  int backjump_level = 0;
};

/// Snapshot handed to learning observers after each conflict.
struct ConflictRecord {
  std::vector<BoundLit> nogood;
  std::vector<int> levels;  // decision level at which each nogood literal became false
  int conflict_level = 0;
  int backjump_level = 0;
  bool asserting_after_backjump = false;
};

class Engine {
 public:
  using PropId = std::size_t;

  explicit Engine(std::uint64_t seed = 0) : seed_(seed), rng_(seed) {}

  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;
  Engine(Engine&&) = default;
  Engine& operator=(Engine&&) = default;

  // ---- variables -------------------------------------------------------

  VarId new_int_var(Value lo, Value hi) {
    const VarId x = trail_.new_int_var(lo, hi);
    const std::size_t codes = 2 * trail_.num_bool_vars();
    watches_.resize(codes);
    activity_.resize(codes, 0.0);
    heap_.grow(codes);
    if (seed_ != 0) {
      std::uniform_real_distribution<double> jitter(0.0, 1e-6);
      for (std::size_t c = first_new_code_; c < codes; ++c) activity_[c] = jitter(rng_);
    }
    for (std::size_t c = first_new_code_; c < codes; ++c) heap_.insert(c, activity_);
    first_new_code_ = codes;
    lb_subs_.emplace_back();
    ub_subs_.emplace_back();
    return x;
  }

  const Trail& trail() const { return trail_; }
  Value lb(VarId x) const { return trail_.lb(x); }
  Value ub(VarId x) const { return trail_.ub(x); }
  bool fixed(VarId x) const { return trail_.fixed(x); }
  LBool value(BoundLit l) const { return trail_.value(l); }
  int level() const { return trail_.level(); }

  // ---- clauses ---------------------------------------------------------

  enum class AddResult { Stored, Unit, Conflict, Satisfied };

  /// Adds a clause under the current assignment. Literals false at level 0
  /// are dropped. A clause with one non-false literal asserts it; with none it
  /// becomes the current conflict.
  AddResult add_clause(std::vector<BoundLit> lits, ClauseKind kind) {
    std::vector<BoundLit> kept;
    kept.reserve(lits.size());
    for (const auto& l : lits) {
      if (auto k = trail_.constant(l)) {
        if (*k) return AddResult::Satisfied;
        continue;
      }
      if (trail_.true_at_root(l)) return AddResult::Satisfied;
      if (trail_.false_at_root(l)) continue;
      kept.push_back(l);
    }
    std::sort(kept.begin(), kept.end());
    kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
    for (std::size_t i = 0; i + 1 < kept.size(); ++i)
      if (kept[i].var == kept[i + 1].var && kept[i].rel != kept[i + 1].rel &&
          ((kept[i].rel == Rel::Leq && kept[i + 1].value <= kept[i].value + 1) ||
           (kept[i].rel == Rel::Geq && kept[i].value <= kept[i + 1].value + 1)))
        return AddResult::Satisfied;

    if (kept.empty()) {
      // Contradiction independent of any decision.
      root_conflict_ = true;
      conflict_ = store({}, kind, false);
      return AddResult::Conflict;
    }

    // Order: non-false literals first (true before undef), then false ones by
    // decreasing level, so positions 0/1 are the right watches.
    auto rank = [&](const BoundLit& l) -> std::pair<int, int> {
      switch (trail_.value(l)) {
        case LBool::True: return {0, 0};
        case LBool::Undef: return {1, 0};
        case LBool::False: return {2, -trail_.level_of(~l)};
      }
      return {3, 0};
    };
    std::stable_sort(kept.begin(), kept.end(), [&](const BoundLit& a, const BoundLit& b) { return rank(a) < rank(b); });

    const LBool v0 = trail_.value(kept[0]);
    const ClauseRef cref = store(std::move(kept), kind, true);
    const auto& c = clauses_[static_cast<std::size_t>(cref)].lits;
    if (v0 == LBool::False) {
      conflict_ = cref;
      return AddResult::Conflict;
    }
    if (v0 == LBool::Undef && (c.size() == 1 || trail_.value(c[1]) == LBool::False)) {
      trail_.push(c[0], cref);
      return AddResult::Unit;
    }
    return AddResult::Stored;
  }

  /// Records body -> head. Returns false iff this produced a conflict.
  bool explain(BoundLit head, std::vector<BoundLit> body) {
    if (trail_.value(head) == LBool::True) return true;
    assert(std::all_of(body.begin(), body.end(), [&](const BoundLit& b) { return value(b) == LBool::True; }));
    Explanation ex{head, std::move(body)};
    if (on_explain) on_explain(ex);
    ++stats_.explanations;
    const AddResult r = add_clause(ex.clause(), ClauseKind::Explanation);
    return r != AddResult::Conflict;
  }

  /// Records body -> false as the current conflict. Always returns false.
  bool fail(std::vector<BoundLit> body) {
    assert(std::all_of(body.begin(), body.end(), [&](const BoundLit& b) { return value(b) == LBool::True; }));
    Explanation ex{std::nullopt, std::move(body)};
    if (on_explain) on_explain(ex);
    const AddResult r = add_clause(ex.clause(), ClauseKind::Explanation);
    assert(r == AddResult::Conflict);
    (void)r;
    return false;
  }

  const Clause& clause(ClauseRef c) const { return clauses_[static_cast<std::size_t>(c)]; }
  std::size_t num_clauses() const { return clauses_.size(); }
  std::size_t num_learned() const { return num_learned_; }
  std::optional<ClauseRef> conflict() const { return conflict_; }
  bool root_conflict() const { return root_conflict_; }

  /// Reason clause recorded for a true literal (nullopt for decisions and
  /// root facts).
  std::optional<ClauseRef> reason_for(BoundLit t) const {
    auto e = trail_.entry_for(t);
    if (!e) return std::nullopt;
    const ClauseRef r = trail_.entry(*e).reason;
    if (r < 0) return std::nullopt;
    return r;
  }

  // ---- propagators -----------------------------------------------------

  PropId post(std::unique_ptr<Propagator> p) {
    props_.push_back(std::move(p));
    const PropId id = props_.size() - 1;
    enqueue(id);
    return id;
  }

  /// Wake `p` when the lower (Geq) or upper (Leq) bound of x changes.
  void subscribe(PropId p, VarId x, Rel change) {
    auto& subs = change == Rel::Geq ? lb_subs_[static_cast<std::size_t>(x)] : ub_subs_[static_cast<std::size_t>(x)];
    if (std::find(subs.begin(), subs.end(), p) == subs.end()) subs.push_back(p);
  }

  void subscribe_bounds(PropId p, VarId x) {
    subscribe(p, x, Rel::Geq);
    subscribe(p, x, Rel::Leq);
  }

  Propagator& propagator(PropId p) { return *props_[p]; }
  std::size_t num_propagators() const { return props_.size(); }

  // ---- propagation -----------------------------------------------------

  /// Clause propagation first, then propagators in priority order, to
  /// fixpoint. Returns false on conflict.
  bool propagate() {
    if (conflict_) return false;
    for (;;) {
      if (!unit_propagate()) {
        clear_queue();
        return false;
      }
      Propagator* p = pop_propagator();
      if (!p) return true;
      if (!p->propagate(*this)) {
        assert(conflict_);
        clear_queue();
        return false;
      }
      if (conflict_) {
        clear_queue();
        return false;
      }
    }
  }

  // ---- search ----------------------------------------------------------

  void decide(BoundLit l) {
    if (trail_.value(l) != LBool::Undef) throw std::logic_error("decision on an assigned literal");
    trail_.new_level();
    trail_.push(l, kDecision);
  }

  /// Permanent fact at level 0. Returns false if it contradicts the root.
  bool assert_root(BoundLit l) {
    if (level() != 0) throw std::logic_error("assert_root above level 0");
    switch (trail_.push(l, kRootFact)) {
      case Trail::Push::Conflict:
        root_conflict_ = true;
        conflict_ = store({}, ClauseKind::Original, false);
        return false;
      default: return true;
    }
  }

  /// Highest decision level among the conflict clause's literals; 0 means
  /// the problem is infeasible under the root facts.
  int conflict_level() const {
    assert(conflict_);
    if (root_conflict_) return 0;
    int lv = 0;
    for (const auto& l : clauses_[static_cast<std::size_t>(*conflict_)].lits) lv = std::max(lv, trail_.level_of(~l));
    return lv;
  }

  /// 1UIP analysis of the current conflict. Requires conflict_level() > 0.
  /// If the conflict lies entirely below the current level, first backjumps
  /// to the level where it arose.
  Analysis analyze() {
    assert(conflict_);
    if (const int cl = conflict_level(); cl < level()) {
      const ClauseRef keep = *conflict_;
      backjump(cl);
      conflict_ = keep;
    }
    assert(level() > 0);
    const int current = level();
    std::vector<char> seen(trail_.size(), 0);
    std::vector<BoundLit> out;
    int pending = 0;

    auto visit = [&](const BoundLit& l) {
      const BoundLit t = ~l;
      const auto e = trail_.entry_for(t);
      if (!e) return;
      const int lv = trail_.entry(*e).level;
      if (lv == 0) return;
      if (lv == current) {
        if (!seen[*e]) {
          seen[*e] = 1;
          ++pending;
        }
      } else {
        out.push_back(l);
      }
    };

    for (const auto& l : clauses_[static_cast<std::size_t>(*conflict_)].lits) visit(l);
    std::optional<BoundLit> uip;
    for (std::size_t i = trail_.size(); i-- > 0;) {
      if (!seen[i]) continue;
      seen[i] = 0;
      const TrailEntry& e = trail_.entry(i);
      if (--pending == 0) {
        uip = e.literal();
        break;
      }
      assert(e.reason >= 0);
      const BoundLit head = e.literal();
      for (const auto& l : clauses_[static_cast<std::size_t>(e.reason)].lits)
        if (!(l == head)) visit(l);
    }
    assert(uip);

    // Keep the weakest literal per (var, relation); it subsumes the others.
    std::sort(out.begin(), out.end(), [](const BoundLit& a, const BoundLit& b) {
      if (a.var != b.var) return a.var < b.var;
      if (a.rel != b.rel) return a.rel < b.rel;
      return a.rel == Rel::Leq ? a.value > b.value : a.value < b.value;
    });
    out.erase(std::unique(out.begin(), out.end(),
                          [](const BoundLit& a, const BoundLit& b) { return a.var == b.var && a.rel == b.rel; }),
              out.end());

    Analysis a;
    a.nogood.reserve(out.size() + 1);
    a.nogood.push_back(~*uip);
    int bj = 0;
    for (const auto& l : out) {
      a.nogood.push_back(l);
      bj = std::max(bj, trail_.level_of(~l));
    }
    a.backjump_level = bj;
    return a;
  }

  /// Backjumps, stores the nogood and asserts its first literal with it as
  /// reason. Bumps the nogood's literals. Returns the asserted literal.
  BoundLit learn_and_jump(const Analysis& a) {
    ConflictRecord rec;
    const bool observe = static_cast<bool>(on_learn);
    if (observe) {
      rec.nogood = a.nogood;
      rec.conflict_level = level();
      rec.backjump_level = a.backjump_level;
      for (const auto& l : a.nogood) rec.levels.push_back(trail_.level_of(~l));
    }
    backjump(a.backjump_level);
    if (observe) {
      int undef = 0, falses = 0;
      for (const auto& l : a.nogood) {
        const LBool v = trail_.value(l);
        undef += v == LBool::Undef;
        falses += v == LBool::False;
      }
      rec.asserting_after_backjump = undef == 1 && falses == static_cast<int>(a.nogood.size()) - 1 &&
                                     trail_.value(a.nogood[0]) == LBool::Undef;
    }
    std::vector<BoundLit> lits = a.nogood;
    // Second watch must be the highest-level false literal.
    if (lits.size() > 2) {
      auto it = std::max_element(lits.begin() + 1, lits.end(), [&](const BoundLit& x, const BoundLit& y) {
        return trail_.level_of(~x) < trail_.level_of(~y);
      });
      std::iter_swap(lits.begin() + 1, it);
    }
    const BoundLit asserted = lits[0];
    const ClauseRef cref = store(std::move(lits), ClauseKind::Learned, true);
    ++num_learned_;
    [[maybe_unused]] auto pushed = trail_.push(asserted, cref);
    assert(pushed == Trail::Push::Changed);
    for (const auto& l : a.nogood) bump(l);
    decay();
    if (observe) on_learn(rec);
    return asserted;
  }

  void backjump(int target) {
    if (target == level()) return;
    undone_.clear();
    trail_.backjump(target, [&](const TrailEntry& e) { undone_.push_back(e); });
    for (const auto& e : undone_) reinsert_range(e);
    qhead_ = std::min(qhead_, trail_.size());
    conflict_.reset();
    clear_queue();
  }

  void restart() {
    if (level() > 0) backjump(0);
  }

  /// Highest-activity unassigned literal, lowest code on ties.
  std::optional<BoundLit> pick_vsids() {
    while (!heap_.empty()) {
      const std::size_t c = heap_.pop(activity_);
      const BoundLit l = trail_.literal_of_code(c);
      if (trail_.value(l) == LBool::Undef) return l;
    }
    return std::nullopt;
  }

  double activity(BoundLit l) const {
    auto c = trail_.code(l);
    return c ? activity_[*c] : 0.0;
  }

  void bump(BoundLit l) {
    auto c = trail_.code(l);
    if (!c) return;
    activity_[*c] += bump_;
    if (activity_[*c] > 1e100) {
      for (auto& a : activity_) a *= 1e-100;
      bump_ *= 1e-100;
    }
    heap_.increased(*c, activity_);
  }

  void decay() { bump_ /= decay_factor_; }

  struct Stats {
    std::int64_t propagations = 0;
    std::int64_t explanations = 0;
  };
  const Stats& stats() const { return stats_; }

  std::function<void(const Explanation&)> on_explain;
  std::function<void(const ConflictRecord&)> on_learn;

 private:
  ClauseRef store(std::vector<BoundLit> lits, ClauseKind kind, bool watch) {
    const auto cref = static_cast<ClauseRef>(clauses_.size());
    clauses_.push_back({std::move(lits), kind});
    const auto& c = clauses_.back().lits;
    if (watch && c.size() >= 2) {
      watches_[*trail_.code(c[0])].push_back(cref);
      watches_[*trail_.code(c[1])].push_back(cref);
    }
    return cref;
  }

  void enqueue(PropId id) {
    Propagator& p = *props_[id];
    if (p.queued_) return;
    p.queued_ = true;
    const auto prio = static_cast<std::size_t>(std::max(0, p.priority()));
    if (queues_.size() <= prio) queues_.resize(prio + 1);
    queues_[prio].push_back(id);
  }

  Propagator* pop_propagator() {
    for (auto& q : queues_) {
      if (q.empty()) continue;
      const PropId id = q.front();
      q.pop_front();
      props_[id]->queued_ = false;
      return props_[id].get();
    }
    return nullptr;
  }

  void clear_queue() {
    for (auto& q : queues_) {
      for (PropId id : q) props_[id]->queued_ = false;
      q.clear();
    }
  }

  bool unit_propagate() {
    while (qhead_ < trail_.size()) {
      const TrailEntry e = trail_.entry(qhead_++);
      ++stats_.propagations;
      const auto x = static_cast<std::size_t>(e.var);
      for (PropId p : (e.rel == Rel::Geq ? lb_subs_[x] : ub_subs_[x])) enqueue(p);
      const Value lo = trail_.initial_lb(e.var), hi = trail_.initial_ub(e.var);
      if (e.rel == Rel::Geq) {
        // [x <= d] became false for d in [previous, value-1].
        for (Value d = std::max(e.previous, lo); d <= std::min(e.value - 1, hi - 1); ++d)
          if (!visit_watches(*trail_.code(leq(e.var, d)))) return false;
      } else {
        // [x >= v] became false for v in [value+1, previous].
        for (Value v = std::max(e.value + 1, lo + 1); v <= std::min(e.previous, hi); ++v)
          if (!visit_watches(*trail_.code(geq(e.var, v)))) return false;
      }
    }
    return true;
  }

  bool visit_watches(std::size_t falsified) {
    auto& ws = watches_[falsified];
    std::size_t i = 0, j = 0;
    while (i < ws.size()) {
      const ClauseRef cref = ws[i++];
      auto& c = clauses_[static_cast<std::size_t>(cref)].lits;
      if (*trail_.code(c[0]) == falsified) std::swap(c[0], c[1]);
      if (trail_.value(c[0]) == LBool::True) {
        ws[j++] = cref;
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < c.size(); ++k) {
        if (trail_.value(c[k]) != LBool::False) {
          std::swap(c[1], c[k]);
          watches_[*trail_.code(c[1])].push_back(cref);
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[j++] = cref;
      if (trail_.value(c[0]) == LBool::False) {
        while (i < ws.size()) ws[j++] = ws[i++];
        ws.resize(j);
        conflict_ = cref;
        return false;
      }
      trail_.push(c[0], cref);
    }
    ws.resize(j);
    return true;
  }

  void reinsert_range(const TrailEntry& e) {
    const Value lo = trail_.initial_lb(e.var), hi = trail_.initial_ub(e.var);
    Value from, to;  // Boolean variables [x <= d] whose value was restored
    if (e.rel == Rel::Geq) {
      from = std::max(e.previous, lo);
      to = std::min(e.value - 1, hi - 1);
    } else {
      from = std::max(e.value, lo);
      to = std::min(e.previous - 1, hi - 1);
    }
    for (Value d = from; d <= to; ++d) {
      const std::size_t c = *trail_.code(leq(e.var, d));
      heap_.insert(c, activity_);
      heap_.insert(c + 1, activity_);
    }
  }

  std::uint64_t seed_;
  std::mt19937_64 rng_;
  Trail trail_;
  std::vector<Clause> clauses_;
  std::vector<std::vector<ClauseRef>> watches_;
  std::size_t num_learned_ = 0;
  std::optional<ClauseRef> conflict_;
  bool root_conflict_ = false;
  std::size_t qhead_ = 0;

  std::vector<std::unique_ptr<Propagator>> props_;
  std::vector<std::vector<PropId>> lb_subs_, ub_subs_;
  std::vector<std::deque<PropId>> queues_;

  std::vector<double> activity_;
  ActivityHeap heap_;
  std::size_t first_new_code_ = 0;
  double bump_ = 1.0;
  double decay_factor_ = 0.95;
  std::vector<TrailEntry> undone_;
  Stats stats_;
};

}  // namespace rcm
