// geosched: Fisher-Rao optimal schedules for masked discrete diffusion.
//
//   geosched schedule --process linear --steps 16 --generator geodesic
//   geosched verify --suite all --seed 7
//   geosched simulate --data uniform-pair --N 2 --vocab 2 --steps 1,4,16 ...
//
// Exit codes: 0 success, 1 verification failure, 2 usage error,
// 3 numeric or capacity error.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "geosched/geosched.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

geosched::NoiseProcess parse_process(const std::string& arg) {
  using geosched::NoiseProcess;
  if (arg == "linear" || arg == "linear-alpha") return NoiseProcess::linear_alpha();
  const auto eq = arg.find('=');
  const std::string head = arg.substr(0, eq);
  const std::string value = eq == std::string::npos ? "" : arg.substr(eq + 1);
  if ((head == "const-beta" || head == "constant-beta") && !value.empty()) {
    return NoiseProcess::constant_beta(geosched::parse_double(value));
  }
  if (head == "table" && !value.empty()) {
    const auto flat = geosched::read_rate_table(value);
    return geosched::make_process(geosched::ProcessKind::TabulatedBeta, flat);
  }
  throw UsageError("unknown --process '" + arg + "' (linear | const-beta=<c> | table=<path>)");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  if (out.empty()) throw UsageError("empty list '" + text + "'");
  return out;
}

unsigned thread_budget() {
  if (const char* env = std::getenv("GEO_SCHED_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n < 1) throw UsageError("GEO_SCHED_THREADS must be a positive integer");
    return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Output goes to --out when given, stdout otherwise.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw UsageError("cannot open '" + path + "' for writing");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

struct ScheduleArgs {
  std::string process = "linear";
  int steps = 0;
  std::string generator = "geodesic";
  std::string format = "json";
  std::string out;
};

int run_schedule(const ScheduleArgs& args) {
  if (args.steps < 1) throw UsageError("--steps must be at least 1");
  const auto np = parse_process(args.process);
  geosched::ScheduleFile file{np, geosched::make_schedule(np, args.steps, args.generator)};
  Sink sink(args.out);
  if (args.format == "csv") {
    geosched::write_schedule_csv(sink.stream(), file);
  } else {
    geosched::write_schedule_json(sink.stream(), file);
  }
  return kExitOk;
}

struct VerifyArgs {
  std::string suite = "all";
  std::uint64_t seed = 7;
  int max_tokens = 3;
  int max_vocab = 3;
};

int run_verify(const VerifyArgs& args) {
  if (args.max_tokens < 1 || args.max_vocab < 1) {
    throw UsageError("--max-N and --max-vocab must be positive");
  }
  geosched::verify::SuiteOptions opt;
  opt.seed = args.seed;
  opt.max_tokens = args.max_tokens;
  opt.max_vocab = args.max_vocab;

  std::vector<geosched::verify::CheckResult> checks;
  auto append = [&](std::vector<geosched::verify::CheckResult> more) {
    checks.insert(checks.end(), more.begin(), more.end());
  };
  const bool all = args.suite == "all";
  if (all || args.suite == "geometry") append(geosched::verify::geometry_suite());
  if (all || args.suite == "fisher") append(geosched::verify::fisher_suite(opt));
  if (all || args.suite == "taylor") append(geosched::verify::taylor_suite(opt));

  bool ok = true;
  for (const auto& c : checks) {
    ok = ok && c.passed;
    std::cout << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << ": measured "
              << geosched::format_double(c.measured) << ", tolerance "
              << geosched::format_double(c.tolerance) << '\n';
  }
  std::cout << (ok ? "all checks passed" : "verification FAILED") << '\n';
  return ok ? kExitOk : kExitVerifyFailed;
}

struct SimulateArgs {
  std::string data = "uniform-pair";
  int tokens = 2;
  int vocab = 2;
  std::string process = "linear";
  std::string steps = "1,4,16";
  std::string schedules = "geodesic,uniform-time";
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
  std::string out;
  bool no_timing = false;
};

geosched::DataDistribution make_data(const SimulateArgs& args) {
  const geosched::TokenSpace space{args.tokens, args.vocab};
  if (args.tokens < 1 || args.vocab < 1) throw UsageError("--N and --vocab must be positive");
  if (args.data == "pointmass") {
    return geosched::DataDistribution::point_mass(space, std::vector<int>(space.length, 0));
  }
  if (args.data == "uniform-pair") {
    if (args.vocab < 2) throw UsageError("uniform-pair data needs --vocab >= 2");
    return geosched::DataDistribution::uniform_over(
        space, {std::vector<int>(space.length, 0), std::vector<int>(space.length, 1)});
  }
  if (args.data.rfind("random=", 0) == 0) {
    return geosched::DataDistribution::random_flat(space,
                                                   std::stoull(args.data.substr(7)));
  }
  throw UsageError("unknown --data '" + args.data + "' (pointmass | uniform-pair | random=<seed>)");
}

int run_simulate(const SimulateArgs& args) {
  if (args.samples < 1) throw UsageError("--samples must be at least 1");
  const auto np = parse_process(args.process);
  std::vector<int> step_counts;
  for (const auto& s : split_list(args.steps)) {
    const int t = std::stoi(s);
    if (t < 1) throw UsageError("--steps entries must be at least 1");
    step_counts.push_back(t);
  }
  const auto tags = split_list(args.schedules);
  for (const auto& tag : tags) geosched::make_schedule(np, 1, tag);  // reject unknown names early
  const auto data = make_data(args);

  const auto reports = geosched::compare_schedules(data, np, step_counts, tags, args.samples,
                                                   args.seed, thread_budget());
  Sink sink(args.out);
  std::ostream& out = sink.stream();
  out << "# geosched simulate\n";
  out << "# data: " << args.data << ", N: " << args.tokens << ", vocab: " << args.vocab << '\n';
  out << "# process: " << geosched::to_string(np.kind()) << '\n';
  out << "# samples: " << args.samples << ", seed: " << args.seed << '\n';
  out << "schedule,T,tv,kl,max_step_len,min_step_len,wall_time_s\n";
  for (const auto& r : reports) {
    const auto [lo, hi] =
        std::minmax_element(r.per_step_lengths.begin(), r.per_step_lengths.end());
    out << r.schedule_tag << ',' << r.steps << ',' << geosched::format_double(r.tv_distance)
        << ',' << geosched::format_double(r.kl_estimate) << ','
        << geosched::format_double(*hi) << ',' << geosched::format_double(*lo) << ','
        << geosched::format_double(args.no_timing ? 0.0 : r.wall_time) << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fisher-Rao optimal discretisation schedules for masked discrete diffusion"};
  app.require_subcommand(1);

  ScheduleArgs schedule_args;
  auto* schedule = app.add_subcommand("schedule", "Write a schedule file");
  schedule->add_option("--process", schedule_args.process,
                       "linear | const-beta=<c> | table=<path>");
  schedule->add_option("--steps", schedule_args.steps, "Number of steps T")->required();
  schedule->add_option("--generator", schedule_args.generator)
      ->check(CLI::IsMember(
          {"geodesic", "cosine", "geodesic-numeric", "uniform-time", "uniform-alpha"}));
  schedule->add_option("--format", schedule_args.format)->check(CLI::IsMember({"json", "csv"}));
  schedule->add_option("--out", schedule_args.out, "Output path (default stdout)");

  VerifyArgs verify_args;
  auto* verify = app.add_subcommand("verify", "Check closed forms against independent oracles");
  verify->add_option("--suite", verify_args.suite)
      ->check(CLI::IsMember({"geometry", "fisher", "taylor", "all"}));
  verify->add_option("--seed", verify_args.seed);
  verify->add_option("--max-N", verify_args.max_tokens);
  verify->add_option("--max-vocab", verify_args.max_vocab);

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "Compare schedules with the exact sampler");
  simulate->add_option("--data", sim_args.data, "pointmass | uniform-pair | random=<seed>");
  simulate->add_option("--N", sim_args.tokens);
  simulate->add_option("--vocab", sim_args.vocab);
  simulate->add_option("--process", sim_args.process);
  simulate->add_option("--steps", sim_args.steps, "Comma-separated step counts");
  simulate->add_option("--schedules", sim_args.schedules, "Comma-separated generators");
  simulate->add_option("--samples", sim_args.samples);
  simulate->add_option("--seed", sim_args.seed);
  simulate->add_option("--out", sim_args.out, "Output path (default stdout)");
  simulate->add_flag("--no-timing", sim_args.no_timing, "Write 0 for wall_time_s");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*schedule) return run_schedule(schedule_args);
    if (*verify) return run_verify(verify_args);
    if (*simulate) return run_simulate(sim_args);
  } catch (const geosched::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
