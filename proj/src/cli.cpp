#include "goldeneq/cli.hpp"

#include "goldeneq/generator.hpp"
#include "goldeneq/instance_io.hpp"
#include "goldeneq/rate.hpp"
#include "goldeneq/solvers.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <fstream>
#include <future>
#include <iostream>

namespace goldeneq::cli {

namespace {

using nlohmann::json;

constexpr const char* kAlgorithms[] = {"gra", "mgra1", "mgra2"};

struct InstanceArgs {
  std::string path;
  long long dim = 0;
  std::uint64_t seed = 0;

  bool inline_generator() const { return dim > 0; }

  void add_flags(CLI::App* cmd, bool required) {
    auto* path_opt = cmd->add_option("--instance", path, "Instance JSON file");
    auto* dim_opt = cmd->add_option(
        "--dim", dim, "Generate an instance inline (default ranges) with this dimension");
    dim_opt->check(CLI::Range(1ll, (1ll << 20)))->excludes(path_opt);
    path_opt->excludes(dim_opt);
    cmd->add_option("--seed", seed, "Seed for inline generation")->needs(dim_opt);
    if (required) {
      // exactly one source; enforced after parsing because CLI11 groups
      // cannot express (path xor dim) with extra companions
      required_ = true;
    }
  }

  ProblemInstance load(json* source_meta) const {
    if (required_ && path.empty() && !inline_generator())
      throw UsageError("exactly one instance source required: --instance or --dim");
    if (inline_generator()) {
      GeneratorConfig config;
      config.dimension = static_cast<Eigen::Index>(dim);
      config.seed = seed;
      if (source_meta)
        (*source_meta)["generator"] = {{"dimension", dim}, {"seed", seed}};
      return generate(config);
    }
    if (source_meta) (*source_meta)["path"] = path;
    return load_instance(path);
  }

 private:
  bool required_ = false;
};

struct RunFlags {
  double stop_residual = 1e-10;
  long long max_iter = 1'000'000;
  int residual_every = 1;
  double residual_p = 0.9;
  bool residual_p_set = false;
  double prox_tol = 1e-12;
  int prox_max_iter = 10000;

  void add_flags(CLI::App* cmd) {
    cmd->add_option("--stop-residual", stop_residual, "Stop when D falls to this value")
        ->capture_default_str();
    cmd->add_option("--max-iter", max_iter, "Outer iteration cap")->capture_default_str();
    cmd->add_option("--residual-every", residual_every,
                    "Evaluate D every k-th iteration (timing excludes D)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--residual-p", residual_p,
                    "Fraction p defining the fixed lambda used inside D")
        ->check(CLI::Range(0.0, 1.0))
        ->each([this](std::string) { residual_p_set = true; });
    cmd->add_option("--prox-tol", prox_tol, "Inner projected-gradient tolerance")
        ->capture_default_str();
    cmd->add_option("--prox-max-iter", prox_max_iter, "Inner iteration cap")
        ->capture_default_str();
  }

  SolverOptions options() const {
    SolverOptions opts;
    opts.stop_residual = stop_residual;
    opts.max_iterations = static_cast<int>(max_iter);
    opts.residual_every = residual_every;
    opts.record_iterates = false;
    opts.prox.grad_tolerance = prox_tol;
    opts.prox.max_inner_iterations = prox_max_iter;
    return opts;
  }
};

double lambda_from_fraction(double p, const ProblemConstants& constants) {
  return p * golden_ratio<double>() / (4.0 * constants.c1);
}

struct SeriesResult {
  SolverTrace trace;
  double lambda = 0.0;  // gra only
  bool has_certificate = false;
  RateCertificate certificate;
};

SeriesResult run_series(const ProblemInstance& instance, const SeriesSpec& spec,
                        SolverOptions options, std::optional<double> lambda_override) {
  const ProblemConstants constants = instance.bifunction.constants();
  SeriesResult result;
  if (spec.algorithm == "gra") {
    const double lambda =
        lambda_override ? *lambda_override : lambda_from_fraction(spec.p, constants);
    if (!options.residual_lambda) options.residual_lambda = lambda;
    result.lambda = lambda;
    result.certificate = rate_certificate(lambda, constants);
    result.has_certificate = true;
    result.trace = gra_solve(instance, lambda, options);
  } else if (spec.algorithm == "mgra1") {
    result.trace = mgra1_solve(instance, StepRule::diminishing(spec.base), options);
  } else if (spec.algorithm == "mgra2") {
    result.trace = mgra2_solve(instance, StepRule::diminishing(spec.base), options);
  } else {
    throw UsageError("unknown algorithm '" + spec.algorithm + "'");
  }
  return result;
}

void write_line(std::ofstream& out, std::initializer_list<std::string> cells) {
  bool first = true;
  for (const auto& cell : cells) {
    if (!first) out << ',';
    out << cell;
    first = false;
  }
  out << '\n';
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path.string());
  return out;
}

void write_trace_csv(const std::filesystem::path& path, const SolverTrace& trace) {
  std::ofstream out = open_output(path);
  out << "n,D_n,elapsed_seconds\n";
  for (const auto& rec : trace.records)
    write_line(out, {std::to_string(rec.n), format_double(rec.residual),
                     format_double(rec.elapsed_seconds)});
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

json certificate_json(const RateCertificate& cert) {
  return {{"alpha", cert.alpha},
          {"epsilon", cert.epsilon},
          {"r1", cert.r1},
          {"r2", cert.r2},
          {"theta", cert.theta}};
}

json constants_json(const ProblemConstants& k) {
  return {{"c1", k.c1}, {"c2", k.c2}, {"gamma", k.gamma}};
}

std::filesystem::path metadata_path(std::filesystem::path csv_path) {
  csv_path.replace_extension(".meta.json");
  return csv_path;
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out = open_output(path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

// ---------------------------------------------------------------------------
// generate

struct GenerateArgs {
  long long dim = 0;
  std::uint64_t seed = 0;
  std::string out;
  double eig_neg_lo = -2.0, eig_neg_hi = 0.0;
  double eig_pos_lo = 0.0, eig_pos_hi = 2.0;
  double q_lo = -2.0, q_hi = 2.0;
  double box_lo = -2.0, box_hi = 5.0;
  double start_lo = 0.0, start_hi = 1.0;
};

int cmd_generate(const GenerateArgs& args) {
  GeneratorConfig config;
  config.dimension = static_cast<Eigen::Index>(args.dim);
  config.seed = args.seed;
  config.eig_neg = {args.eig_neg_lo, args.eig_neg_hi};
  config.eig_pos = {args.eig_pos_lo, args.eig_pos_hi};
  config.q_range = {args.q_lo, args.q_hi};
  config.box = BoxSet::cube(config.dimension, args.box_lo, args.box_hi);
  config.start_range = {args.start_lo, args.start_hi};

  const ProblemInstance instance = generate(config);
  save_instance(instance, args.out);
  std::cout << "wrote " << args.out << " (dimension=" << args.dim
            << ", seed=" << args.seed << ")\n";
  return 0;
}

// ---------------------------------------------------------------------------
// solve

struct SolveArgs {
  InstanceArgs instance;
  RunFlags flags;
  std::string algorithm;
  double p = 0.9;
  double lambda = 0.0;
  bool lambda_set = false;
  double base = 1.0;
  std::string out;
};

int cmd_solve(const SolveArgs& args) {
  json source;
  const ProblemInstance instance = args.instance.load(&source);
  const ProblemConstants constants = instance.bifunction.constants();

  SolverOptions options = args.flags.options();
  if (args.flags.residual_p_set || args.algorithm != "gra")
    options.residual_lambda = lambda_from_fraction(args.flags.residual_p, constants);

  SeriesSpec spec;
  spec.algorithm = args.algorithm;
  spec.p = args.p;
  spec.base = args.base;
  const SeriesResult result = run_series(
      instance, spec, options,
      args.lambda_set ? std::optional<double>(args.lambda) : std::nullopt);

  write_trace_csv(args.out, result.trace);

  json meta;
  meta["command"] = "solve";
  meta["algorithm"] = args.algorithm;
  meta["instance"] = source;
  meta["dimension"] = instance.dim();
  meta["seed"] = instance.seed;
  meta["rng_id"] = instance.rng_id;
  meta["constants"] = constants_json(constants);
  meta["stop_residual"] = args.flags.stop_residual;
  meta["max_iterations"] = args.flags.max_iter;
  meta["residual_every"] = args.flags.residual_every;
  meta["residual_lambda"] = result.trace.residual_lambda;
  meta["prox"] = {{"grad_tolerance", args.flags.prox_tol},
                  {"max_inner_iterations", args.flags.prox_max_iter}};
  if (args.algorithm == "gra") {
    meta["lambda"] = result.lambda;
    if (!args.lambda_set) meta["p"] = args.p;
    meta["certificate"] = certificate_json(result.certificate);
  } else {
    meta["step_base"] = args.base;
  }
  meta["iterations"] = result.trace.iterations;
  meta["stop_reason"] = to_string(result.trace.reason);
  meta["csv"] = args.out;
  write_json(metadata_path(args.out), meta);

  std::cout << args.algorithm << ": iterations=" << result.trace.iterations
            << " D=" << format_double(result.trace.records.back().residual)
            << " reason=" << to_string(result.trace.reason) << " csv=" << args.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// compare

struct CompareArgs {
  InstanceArgs instance;
  RunFlags flags;
  std::vector<std::string> specs;
  std::string out;
};

int cmd_compare(const CompareArgs& args) {
  if (args.specs.empty()) throw UsageError("compare: at least one --spec is required");
  std::vector<SeriesSpec> specs;
  specs.reserve(args.specs.size());
  for (const auto& text : args.specs) specs.push_back(parse_series_spec(text));

  json source;
  const ProblemInstance instance = args.instance.load(&source);
  const ProblemConstants constants = instance.bifunction.constants();

  // One residual definition across all series: --residual-p when given, else
  // the first gra series' lambda, else the 0.9-fraction default.
  SolverOptions options = args.flags.options();
  if (args.flags.residual_p_set) {
    options.residual_lambda = lambda_from_fraction(args.flags.residual_p, constants);
  } else {
    for (const auto& spec : specs)
      if (spec.algorithm == "gra") {
        options.residual_lambda = lambda_from_fraction(spec.p, constants);
        break;
      }
    if (!options.residual_lambda)
      options.residual_lambda = lambda_from_fraction(0.9, constants);
  }

  std::vector<std::future<SeriesResult>> futures;
  futures.reserve(specs.size());
  for (const auto& spec : specs)
    futures.push_back(std::async(std::launch::async, [&instance, spec, options] {
      return run_series(instance, spec, options, std::nullopt);
    }));

  std::ofstream out = open_output(args.out);
  out << "algorithm,label,n,D_n,elapsed_seconds\n";
  json series_meta = json::array();
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const SeriesResult result = futures[i].get();
    for (const auto& rec : result.trace.records)
      write_line(out, {specs[i].algorithm, specs[i].label, std::to_string(rec.n),
                       format_double(rec.residual), format_double(rec.elapsed_seconds)});
    json s = {{"algorithm", specs[i].algorithm},
              {"label", specs[i].label},
              {"iterations", result.trace.iterations},
              {"stop_reason", to_string(result.trace.reason)}};
    if (specs[i].algorithm == "gra") {
      s["p"] = specs[i].p;
      s["lambda"] = result.lambda;
      s["certificate"] = certificate_json(result.certificate);
    } else {
      s["step_base"] = specs[i].base;
    }
    series_meta.push_back(std::move(s));
  }
  if (!out) throw std::runtime_error("write failed: " + args.out);

  json meta;
  meta["command"] = "compare";
  meta["instance"] = source;
  meta["dimension"] = instance.dim();
  meta["seed"] = instance.seed;
  meta["rng_id"] = instance.rng_id;
  meta["constants"] = constants_json(constants);
  meta["stop_residual"] = args.flags.stop_residual;
  meta["max_iterations"] = args.flags.max_iter;
  meta["residual_every"] = args.flags.residual_every;
  meta["residual_lambda"] = *options.residual_lambda;
  meta["prox"] = {{"grad_tolerance", args.flags.prox_tol},
                  {"max_inner_iterations", args.flags.prox_max_iter}};
  meta["series"] = std::move(series_meta);
  meta["csv"] = args.out;
  write_json(metadata_path(args.out), meta);
  return 0;
}

// ---------------------------------------------------------------------------
// counterexample

struct CounterexampleArgs {
  long long n = 100000;
  double base = 1.0;
  double x0 = 1.0;
  double y1 = 1.0;
  std::string out;
};

int cmd_counterexample(const CounterexampleArgs& args) {
  if (args.n < 2) throw UsageError("counterexample: --n must be at least 2");
  if (!(args.base > 0.0 && args.base < 2.0))
    throw UsageError("counterexample: --base must lie in (0, 2) so that every lambda_n "
                     "is in (0, 1)");

  const std::vector<double> xs = counterexample_run(
      args.x0, args.y1, StepRule::diminishing(args.base), static_cast<int>(args.n));

  std::ostringstream body;
  body << "n,x_n,ratio\n";
  for (std::size_t n = 0; n + 1 < xs.size(); ++n)
    body << n << ',' << format_double(xs[n]) << ',' << format_double(xs[n + 1] / xs[n])
         << '\n';

  if (args.out.empty()) {
    std::cout << body.str();
  } else {
    std::ofstream out = open_output(args.out);
    out << body.str();
    if (!out) throw std::runtime_error("write failed: " + args.out);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// rate

struct RateArgs {
  InstanceArgs instance;
  double p = 0.9;
  double lambda = 0.0;
  bool lambda_set = false;
};

int cmd_rate(const RateArgs& args) {
  const ProblemInstance instance = args.instance.load(nullptr);
  const ProblemConstants constants = instance.bifunction.constants();
  const double lambda =
      args.lambda_set ? args.lambda : lambda_from_fraction(args.p, constants);
  const RateCertificate cert = rate_certificate(lambda, constants);

  json j;
  j["lambda"] = lambda;
  if (!args.lambda_set) j["p"] = args.p;
  j["constants"] = constants_json(constants);
  j["certificate"] = certificate_json(cert);
  std::cout << j.dump(2) << '\n';
  return 0;
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

SeriesSpec parse_series_spec(const std::string& text) {
  SeriesSpec spec;
  const auto colon = text.find(':');
  spec.algorithm = text.substr(0, colon);
  if (std::find(std::begin(kAlgorithms), std::end(kAlgorithms), spec.algorithm) ==
      std::end(kAlgorithms))
    throw UsageError("spec '" + text + "': unknown algorithm '" + spec.algorithm + "'");

  if (colon != std::string::npos) {
    std::string rest = text.substr(colon + 1);
    std::istringstream stream(rest);
    std::string item;
    while (std::getline(stream, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos)
        throw UsageError("spec '" + text + "': expected key=value, got '" + item + "'");
      const std::string key = item.substr(0, eq);
      const std::string value = item.substr(eq + 1);
      try {
        if (key == "p")
          spec.p = std::stod(value);
        else if (key == "base")
          spec.base = std::stod(value);
        else if (key == "label")
          spec.label = value;
        else
          throw UsageError("spec '" + text + "': unknown key '" + key + "'");
      } catch (const std::logic_error&) {
        throw UsageError("spec '" + text + "': bad value for '" + key + "'");
      }
    }
  }

  if (spec.algorithm == "gra" && !(spec.p > 0.0 && spec.p < 1.0))
    throw UsageError("spec '" + text + "': p must lie in (0, 1)");
  if (spec.algorithm != "gra" && !(spec.base > 0.0))
    throw UsageError("spec '" + text + "': base must be positive");
  if (spec.label.empty())
    spec.label = spec.algorithm == "gra"
                     ? spec.algorithm + "(p=" + format_double(spec.p) + ")"
                     : spec.algorithm + "(base=" + format_double(spec.base) + ")";
  return spec;
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Golden ratio solvers for box-constrained equilibrium problems"};
  app.require_subcommand(1);

  GenerateArgs gen_args;
  auto* gen = app.add_subcommand("generate", "Generate a random instance file");
  gen->add_option("--dim", gen_args.dim, "Problem dimension")
      ->required()
      ->check(CLI::Range(1ll, (1ll << 20)));
  gen->add_option("--seed", gen_args.seed, "RNG seed")->capture_default_str();
  gen->add_option("--out", gen_args.out, "Output instance JSON path")->required();
  gen->add_option("--eig-neg-lo", gen_args.eig_neg_lo)->capture_default_str();
  gen->add_option("--eig-neg-hi", gen_args.eig_neg_hi)->capture_default_str();
  gen->add_option("--eig-pos-lo", gen_args.eig_pos_lo)->capture_default_str();
  gen->add_option("--eig-pos-hi", gen_args.eig_pos_hi)->capture_default_str();
  gen->add_option("--q-lo", gen_args.q_lo)->capture_default_str();
  gen->add_option("--q-hi", gen_args.q_hi)->capture_default_str();
  gen->add_option("--box-lo", gen_args.box_lo)->capture_default_str();
  gen->add_option("--box-hi", gen_args.box_hi)->capture_default_str();
  gen->add_option("--start-lo", gen_args.start_lo)->capture_default_str();
  gen->add_option("--start-hi", gen_args.start_hi)->capture_default_str();

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "Run one solver and write the trace CSV");
  solve_args.instance.add_flags(solve, true);
  solve->add_option("--algorithm", solve_args.algorithm, "gra | mgra1 | mgra2")
      ->required()
      ->check(CLI::IsMember(std::vector<std::string>(std::begin(kAlgorithms),
                                                     std::end(kAlgorithms))));
  auto* p_opt = solve->add_option("--p", solve_args.p,
                                  "gra step fraction: lambda = p phi / (4 c1)")
                    ->check(CLI::Range(0.0, 1.0))
                    ->capture_default_str();
  solve->add_option("--lambda", solve_args.lambda, "Explicit gra step size")
      ->excludes(p_opt)
      ->each([&solve_args](std::string) { solve_args.lambda_set = true; });
  solve->add_option("--base", solve_args.base, "Diminishing base: lambda_n = base/(n+1)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  solve_args.flags.add_flags(solve);
  solve->add_option("--out", solve_args.out, "Output CSV path")->required();

  CompareArgs compare_args;
  auto* compare =
      app.add_subcommand("compare", "Run several solvers on one instance; long CSV");
  compare_args.instance.add_flags(compare, true);
  compare->add_option("--spec", compare_args.specs,
                      "Series spec, e.g. gra:p=0.9 or mgra1:base=1 (repeatable)")
      ->required();
  compare_args.flags.add_flags(compare);
  compare->add_option("--out", compare_args.out, "Output CSV path")->required();

  CounterexampleArgs cx_args;
  auto* cx = app.add_subcommand(
      "counterexample", "Scalar diminishing-step recurrence and its consecutive ratios");
  cx->add_option("--n", cx_args.n, "Final index N")->capture_default_str();
  cx->add_option("--base", cx_args.base, "lambda_n = base/(n+1)")->capture_default_str();
  cx->add_option("--x0", cx_args.x0)->capture_default_str();
  cx->add_option("--y1", cx_args.y1)->capture_default_str();
  cx->add_option("--out", cx_args.out, "Output CSV path (stdout when omitted)");

  RateArgs rate_args;
  auto* rate = app.add_subcommand("rate", "Print the geometric-rate certificate as JSON");
  rate_args.instance.add_flags(rate, true);
  auto* rate_p = rate->add_option("--p", rate_args.p, "Step fraction")
                     ->check(CLI::Range(0.0, 1.0))
                     ->capture_default_str();
  rate->add_option("--lambda", rate_args.lambda, "Explicit step size")
      ->excludes(rate_p)
      ->each([&rate_args](std::string) { rate_args.lambda_set = true; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmd_generate(gen_args);
    if (solve->parsed()) return cmd_solve(solve_args);
    if (compare->parsed()) return cmd_compare(compare_args);
    if (cx->parsed()) return cmd_counterexample(cx_args);
    if (rate->parsed()) return cmd_rate(rate_args);
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace goldeneq::cli
