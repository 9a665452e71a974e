#pragma once

// Batch records, best-known bounds files and the summary statistics
// reported over a testset.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rcm/psplib_io.hpp"
#include "rcm/search.hpp"

namespace rcm {

struct RunRecord {
  std::string instance;
  std::string status;  // OPTIMAL | FEASIBLE | INFEASIBLE | UNKNOWN | ERROR
  std::optional<Value> makespan;
  std::optional<Value> lb, ub;
  double runtime = 0.0;
  std::int64_t nodes = 0;
  std::int64_t fails = 0;
  std::string strategy;
  double phase1_time = 0.0;
  std::string error;
};

inline RunRecord make_record(std::string instance, Strategy strategy, const SolveOutcome& o) {
  RunRecord r;
  r.instance = std::move(instance);
  r.status = std::string(to_string(o.status));
  r.makespan = o.makespan();
  r.runtime = o.stats.runtime;
  r.nodes = o.stats.nodes;
  r.fails = o.stats.fails;
  r.strategy = std::string(to_string(strategy));
  r.phase1_time = o.stats.phase1_time;
  return r;
}

struct Bound {
  std::optional<Value> lb, ub;
};

using BoundsTable = std::map<std::string, Bound, std::less<>>;

/// Reads `instance,lb,ub` CSV; empty cells mean unknown.
inline BoundsTable parse_bounds(std::istream& in) {
  BoundsTable out;
  std::string line;
  std::size_t number = 0;
  auto cell = [&](const std::string& s) -> std::optional<Value> {
    std::string t = s;
    std::erase_if(t, [](unsigned char c) { return std::isspace(c) != 0; });
    if (t.empty()) return std::nullopt;
    return detail::parse_int(t, number);
  };
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
    if (line.back() == ',') cols.emplace_back();
    if (cols.size() != 3) throw ParseError(number, "bounds row must have 3 columns: instance,lb,ub");
    std::string key = cols[0];
    std::erase_if(key, [](unsigned char c) { return std::isspace(c) != 0; });
    if (number == 1 && key == "instance") continue;
    out[key] = {cell(cols[1]), cell(cols[2])};
  }
  return out;
}

inline void attach_bounds(std::vector<RunRecord>& records, const BoundsTable& bounds) {
  for (auto& r : records) {
    if (auto it = bounds.find(r.instance); it != bounds.end()) {
      r.lb = it->second.lb;
      r.ub = it->second.ub;
    }
  }
}

struct Summary {
  std::size_t instances = 0;
  double rt_avg = 0.0;
  double fails_avg = 0.0;
  double feas_pct = 0.0;
  double infeas_pct = 0.0;
  double opt_pct = 0.0;
  std::optional<double> delta_lb;  // mean of 100 (M - LB) / LB over feasible instances with LB > 0
  std::size_t delta_lb_count = 0;
  std::vector<std::string> missing_bounds;  // feasible instances without a known LB
};

inline Summary summarize(const std::vector<RunRecord>& records) {
  Summary s;
  s.instances = records.size();
  if (records.empty()) return s;
  double rt = 0, fails = 0, dev = 0;
  std::size_t feas = 0, infeas = 0, opt = 0;
  for (const auto& r : records) {
    rt += r.runtime;
    fails += static_cast<double>(r.fails);
    const bool has_solution = r.status == "OPTIMAL" || r.status == "FEASIBLE";
    feas += has_solution;
    opt += r.status == "OPTIMAL";
    infeas += r.status == "INFEASIBLE";
    if (!has_solution || !r.makespan) continue;
    if (r.lb && *r.lb > 0) {
      dev += 100.0 * static_cast<double>(*r.makespan - *r.lb) / static_cast<double>(*r.lb);
      ++s.delta_lb_count;
    } else if (!r.lb) {
      s.missing_bounds.push_back(r.instance);
    }
  }
  const double n = static_cast<double>(records.size());
  s.rt_avg = rt / n;
  s.fails_avg = fails / n;
  s.feas_pct = 100.0 * static_cast<double>(feas) / n;
  s.infeas_pct = 100.0 * static_cast<double>(infeas) / n;
  s.opt_pct = 100.0 * static_cast<double>(opt) / n;
  if (s.delta_lb_count) s.delta_lb = dev / static_cast<double>(s.delta_lb_count);
  return s;
}

inline constexpr std::string_view kCsvHeader =
    "instance,strategy,status,makespan,lb,ub,runtime,phase1_time,nodes,fails,lb_known";

inline void write_csv(std::ostream& os, const std::vector<RunRecord>& records) {
  auto opt = [](const std::optional<Value>& v) { return v ? std::to_string(*v) : std::string(); };
  os << kCsvHeader << "\n";
  os << std::fixed << std::setprecision(6);
  for (const auto& r : records) {
    os << r.instance << ',' << r.strategy << ',' << r.status << ',' << opt(r.makespan) << ',' << opt(r.lb) << ','
       << opt(r.ub) << ',' << r.runtime << ',' << r.phase1_time << ',' << r.nodes << ',' << r.fails << ','
       << (r.lb ? 1 : 0) << "\n";
  }
}

inline void write_summary(std::ostream& os, const Summary& s) {
  os << std::fixed << std::setprecision(2);
  os << "instances " << s.instances << "\n"
     << "rt_avg " << std::setprecision(4) << s.rt_avg << std::setprecision(2) << "\n"
     << "fails_avg " << s.fails_avg << "\n"
     << "feas% " << s.feas_pct << "\n"
     << "infeas% " << s.infeas_pct << "\n"
     << "opt% " << s.opt_pct << "\n"
     << "delta_lb ";
  if (s.delta_lb)
    os << *s.delta_lb << " (" << s.delta_lb_count << " instances)\n";
  else
    os << "n/a\n";
  for (const auto& name : s.missing_bounds) os << "no_lb " << name << "\n";
}

}  // namespace rcm
