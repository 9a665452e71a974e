// rcm: solve RCPSP/max instances, run testset batches, check schedules.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "rcm/rcm.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUnknown = 2;
constexpr int kExitViolations = 3;

std::optional<double> env_time_limit() {
  const char* v = std::getenv("RCM_TIME_LIMIT");
  if (!v || !*v) return std::nullopt;
  try {
    return std::stod(v);
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("RCM_TIME_LIMIT is not a number: ") + v);
  }
}

rcm::InstanceFormat format_from(const std::string& name) {
  if (name == "sch") return rcm::InstanceFormat::Psplib;
  if (name == "native") return rcm::InstanceFormat::Native;
  return rcm::InstanceFormat::Auto;
}

std::string starts_line(const rcm::Schedule& s) {
  std::ostringstream os;
  for (std::size_t i = 0; i < s.starts.size(); ++i) os << (i ? " " : "") << s.starts[i];
  return os.str();
}

std::vector<rcm::Value> read_starts(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw rcm::ParseError(0, "cannot open " + path.string());
  std::vector<rcm::Value> out;
  for (std::string tok; in >> tok;) out.push_back(rcm::detail::parse_int(tok, 0));
  return out;
}

struct SolveArgs {
  std::string path;
  std::string strategy = "hot-restart";
  std::optional<double> time_limit;
  std::string format = "auto";
  std::string output;
  std::uint64_t seed = 0;
};

int cmd_solve(const SolveArgs& a) {
  const auto strategy = rcm::parse_strategy(a.strategy);
  if (!strategy) {
    std::cerr << "unknown strategy '" << a.strategy << "'\n";
    return kExitError;
  }
  const auto inst = rcm::load_instance(a.path, format_from(a.format));
  rcm::SolveOptions opts;
  opts.strategy = *strategy;
  opts.time_limit = a.time_limit ? a.time_limit : env_time_limit();
  opts.seed = a.seed;
  const auto out = rcm::solve(inst, opts);

  std::cout << rcm::to_string(out.status);
  if (out.schedule) std::cout << ' ' << out.schedule->makespan;
  std::cout << '\n';
  if (out.schedule) std::cout << starts_line(*out.schedule) << '\n';
  const auto& st = out.stats;
  std::cout << "nodes " << st.nodes << " fails " << st.fails << " restarts " << st.restarts << " solutions "
            << st.solutions << " runtime " << st.runtime << " phase1_time " << st.phase1_time << '\n';
  if (!a.output.empty() && out.schedule) {
    std::ofstream f(a.output);
    if (!f) throw std::runtime_error("cannot write " + a.output);
    f << starts_line(*out.schedule) << '\n';
  }
  return out.status == rcm::Status::Unknown ? kExitUnknown : kExitOk;
}

struct BenchArgs {
  std::string dir;
  std::string strategy = "hot-restart";
  std::optional<double> time_limit;
  std::string bounds_file;
  std::string csv;
  unsigned jobs = 1;
  std::uint64_t seed = 0;
};

bool is_instance_file(const fs::path& p) {
  const std::string name = p.filename().string();
  return name.ends_with(".sch") || name.ends_with(".SCH") || name.ends_with(".json");
}

int cmd_bench(const BenchArgs& a) {
  const auto strategy = rcm::parse_strategy(a.strategy);
  if (!strategy) {
    std::cerr << "unknown strategy '" << a.strategy << "'\n";
    return kExitError;
  }
  if (!fs::is_directory(a.dir)) {
    std::cerr << "not a directory: " << a.dir << '\n';
    return kExitError;
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(a.dir))
    if (entry.is_regular_file() && is_instance_file(entry.path())) files.push_back(entry.path());
  std::sort(files.begin(), files.end(),
            [](const fs::path& x, const fs::path& y) { return rcm::instance_stem(x) < rcm::instance_stem(y); });

  rcm::SolveOptions opts;
  opts.strategy = *strategy;
  opts.time_limit = a.time_limit ? a.time_limit : env_time_limit();
  opts.seed = a.seed;

  std::vector<rcm::RunRecord> records(files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next++) < files.size();) {
      const std::string name = rcm::instance_stem(files[k]);
      try {
        const auto inst = rcm::load_instance(files[k]);
        records[k] = rcm::make_record(name, *strategy, rcm::solve(inst, opts));
      } catch (const std::exception& ex) {
        records[k].instance = name;
        records[k].strategy = std::string(rcm::to_string(*strategy));
        records[k].status = "ERROR";
        records[k].error = ex.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned j = 0; j < std::max(1u, a.jobs); ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  if (!a.bounds_file.empty()) {
    std::ifstream in(a.bounds_file);
    if (!in) throw rcm::ParseError(0, "cannot open " + a.bounds_file);
    rcm::attach_bounds(records, rcm::parse_bounds(in));
  }
  for (const auto& r : records)
    if (r.status == "ERROR") std::cerr << r.instance << ": " << r.error << '\n';
  if (!a.csv.empty()) {
    std::ofstream f(a.csv);
    if (!f) throw std::runtime_error("cannot write " + a.csv);
    rcm::write_csv(f, records);
  } else {
    rcm::write_csv(std::cout, records);
  }
  rcm::write_summary(std::cout, rcm::summarize(records));
  return kExitOk;
}

int cmd_check(const std::string& instance_path, const std::string& schedule_path, const std::string& format) {
  const auto inst = rcm::load_instance(instance_path, format_from(format));
  const auto starts = read_starts(schedule_path);
  if (starts.size() != inst.n) {
    std::cerr << "schedule has " << starts.size() << " start times, instance has " << inst.n << " activities\n";
    return kExitError;
  }
  const auto sched = rcm::make_schedule(inst, starts);
  const auto violations = rcm::check_schedule(inst, sched);
  if (violations.empty()) {
    std::cout << "ok makespan " << sched.makespan << '\n';
    return kExitOk;
  }
  for (const auto& v : violations) std::cout << v.message << '\n';
  return kExitViolations;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RCPSP/max solver based on lazy clause generation"};
  app.require_subcommand(1);
  const std::string strategies = "mslf|mslf-restart|vsids|restart|hot-start|hot-restart";

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "Solve one instance");
  solve->add_option("path", solve_args.path, "Instance file (.sch or .rcm.json)")->required();
  solve->add_option("--strategy", solve_args.strategy, strategies)->capture_default_str();
  solve->add_option("--time-limit", solve_args.time_limit, "Seconds for both phases (default: RCM_TIME_LIMIT)");
  solve->add_option("--format", solve_args.format, "Instance format")
      ->check(CLI::IsMember({"auto", "sch", "native"}))
      ->capture_default_str();
  solve->add_option("--output", solve_args.output, "Write start times to this file");
  solve->add_option("--seed", solve_args.seed, "VSIDS tie-breaking seed")->capture_default_str();

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "Solve every instance in a directory");
  bench->add_option("dir", bench_args.dir, "Directory of .sch / .rcm.json files")->required();
  bench->add_option("--strategy", bench_args.strategy, strategies)->capture_default_str();
  bench->add_option("--time-limit", bench_args.time_limit, "Seconds per instance (default: RCM_TIME_LIMIT)");
  bench->add_option("--bounds-file", bench_args.bounds_file, "CSV with header instance,lb,ub");
  bench->add_option("--csv", bench_args.csv, "Write per-instance records here instead of stdout");
  bench->add_option("--jobs", bench_args.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_option("--seed", bench_args.seed, "VSIDS tie-breaking seed")->capture_default_str();

  std::string check_instance, check_schedule, check_format = "auto";
  auto* check = app.add_subcommand("check", "Validate a schedule file against an instance");
  check->add_option("instance", check_instance, "Instance file")->required();
  check->add_option("schedule", check_schedule, "Whitespace-separated start times")->required();
  check->add_option("--format", check_format, "Instance format")->check(CLI::IsMember({"auto", "sch", "native"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*solve) return cmd_solve(solve_args);
    if (*bench) return cmd_bench(bench_args);
    if (*check) return cmd_check(check_instance, check_schedule, check_format);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
