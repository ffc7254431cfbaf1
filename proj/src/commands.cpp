#include "chaoslab/commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "chaoslab/gate.hpp"
#include "chaoslab/numfmt.hpp"
#include "chaoslab/orbit.hpp"
#include "chaoslab/sweep.hpp"
#include "chaoslab/verify.hpp"

namespace chaoslab {

namespace {

using ojson = nlohmann::ordered_json;

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

double parse_arg(const std::string& text, std::string_view name) {
  try {
    return parse_real(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(fmt::format("--{}: {}", name, e.what()));
  }
}

EconomyParams parse_params(const std::string& alpha, const std::string& beta,
                           const std::string& lambda) {
  const double a = parse_arg(alpha, "alpha");
  const double b = parse_arg(beta, "beta");
  const double l = parse_arg(lambda, "lambda");
  try {
    return EconomyParams(a, b, l);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
}

Range parse_range(const std::string& text, std::string_view name) {
  const auto first = text.find(':');
  const auto second = first == std::string::npos ? first : text.find(':', first + 1);
  if (second == std::string::npos)
    throw UsageError(fmt::format("--{}: expected lo:hi:count, got '{}'", name, text));
  Range r;
  r.lo = parse_arg(text.substr(0, first), name);
  r.hi = parse_arg(text.substr(first + 1, second - first - 1), name);
  const std::string count = text.substr(second + 1);
  try {
    size_t used = 0;
    r.count = std::stoi(count, &used);
    if (used != count.size()) throw std::invalid_argument(count);
  } catch (const std::exception&) {
    throw UsageError(fmt::format("--{}: bad count '{}'", name, count));
  }
  return r;
}

int default_jobs() {
  if (const char* env = std::getenv("CHAOSLAB_JOBS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
    throw UsageError(fmt::format("CHAOSLAB_JOBS must be a positive integer, got '{}'", env));
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

// Opens `path` ("-" or empty is `fallback`) and hands the stream to `fn`.
int with_output(const std::string& path, std::ostream& fallback, std::ostream& err,
                const std::function<int(std::ostream&)>& fn) {
  if (path.empty() || path == "-") return fn(fallback);
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) {
    err << fmt::format("error: cannot write '{}'\n", path);
    return exit_code::kCannotWrite;
  }
  const int rc = fn(file);
  file.flush();
  if (!file) {
    err << fmt::format("error: failed writing '{}'\n", path);
    return exit_code::kCannotWrite;
  }
  return rc;
}

ojson params_json(const EconomyParams& p) {
  return {{"alpha", p.alpha()}, {"beta", p.beta()}, {"lambda", p.lambda()}};
}

ojson thresholds_json(const ThresholdSet& t) {
  return {{"lambda_g_low", t.lambda_g_low},
          {"lambda_pi", t.lambda_pi},
          {"lambda_chaos", t.lambda_chaos},
          {"lambda_max", t.lambda_max}};
}

ojson interval_json(const TrappingInterval& e) { return {{"a", e.a()}, {"m", e.m()}, {"b", e.b()}}; }

ojson verdict_json(const ChaosVerdict& v) {
  return {{"method", to_string(v.method)},
          {"odd_cycle", v.odd_cycle},
          {"turbulent_second_iterate", v.turbulent_second_iterate},
          {"m", v.m},
          {"f2_of_m", v.f2_of_m},
          {"f3_of_m", v.f3_of_m},
          {"pi_min", v.pi_min},
          {"pi_max", v.pi_max}};
}

ojson bounds_json(const SearchBounds& b) {
  return {{"lo", b.lo},
          {"hi", b.hi},
          {"max_period", b.max_period},
          {"grid_cells", b.grid_cells},
          {"eps_root", b.eps_root}};
}

ojson orbit_json(const std::optional<PeriodicOrbit>& o) {
  if (!o) return nullptr;
  return {{"period", o->period}, {"points", o->points}, {"residual", o->residual}};
}

std::string window_message(const EconomyParams& p, const ThresholdSet& t) {
  if (!(p.lambda() > t.lambda_g_low)) return fmt::format("λ ≤ λ_G_low = {}", t.lambda_g_low);
  return fmt::format("λ ≥ λ_max = {}", t.lambda_max);
}

// ---------------------------------------------------------------- classify

struct ClassifyArgs {
  std::string alpha, beta, lambda;
  std::string method = "both";
  std::string format = "text";
  std::string out;
  int gate_grid = 1000;
  Tolerances tol;
};

int cmd_classify(const ClassifyArgs& args, std::ostream& out, std::ostream& err) {
  const EconomyParams p = parse_params(args.alpha, args.beta, args.lambda);
  const ThresholdSet t = thresholds(p);
  const bool json = args.format == "json";
  const bool run_cf = args.method != "numerical";
  const bool run_num = args.method != "closed_form";

  std::optional<TrappingInterval> interval;
  std::string outside;
  if (t.in_window(p.lambda())) {
    try {
      interval = trapping_interval(p);
    } catch (const WindowError& e) {
      outside = e.what();
    }
  } else {
    outside = window_message(p, t);
  }

  if (!interval) {
    err << "outside G window: " << outside << '\n';
    return with_output(args.out, out, err, [&](std::ostream& os) {
      if (json) {
        os << ojson{{"parameters", params_json(p)},
                    {"thresholds", thresholds_json(t)},
                    {"in_window", false},
                    {"reason", outside}}
                  .dump(2)
           << '\n';
      } else {
        os << fmt::format("thresholds: lambda_g_low={} lambda_pi={} lambda_chaos={} lambda_max={}\n",
                          fmt17(t.lambda_g_low), fmt17(t.lambda_pi), fmt17(t.lambda_chaos),
                          fmt17(t.lambda_max));
        os << "in_window: false (" << outside << ")\n";
      }
      return exit_code::kOutsideWindow;
    });
  }

  const GateReport gate = gate_check(p, *interval, args.gate_grid, args.tol);
  std::optional<ChaosVerdict> cf, num;
  if (run_cf) cf = classify_closed_form(p);
  if (run_num && gate.in_class_g) num = classify_numerical(p, *interval, args.tol);
  std::optional<bool> agree;
  if (cf && num)
    agree = cf->odd_cycle == num->odd_cycle &&
            cf->turbulent_second_iterate == num->turbulent_second_iterate;

  const int rc = gate.in_class_g ? exit_code::kOk : exit_code::kInternal;
  if (!gate.in_class_g) err << "error: gate check failed inside the window\n";

  return with_output(args.out, out, err, [&](std::ostream& os) {
    if (json) {
      ojson doc{{"parameters", params_json(p)},
                {"thresholds", thresholds_json(t)},
                {"in_window", true},
                {"interval", interval_json(*interval)},
                {"gate",
                 {{"in_class_g", gate.in_class_g},
                  {"cond_endpoints", gate.cond_endpoints},
                  {"cond_below_diagonal", gate.cond_below_diagonal},
                  {"cond_unimodal", gate.cond_unimodal},
                  {"cond_self_map", gate.cond_self_map},
                  {"margin", gate.margin}}}};
      doc["closed_form"] = cf ? verdict_json(*cf) : ojson(nullptr);
      doc["numerical"] = num ? verdict_json(*num) : ojson(nullptr);
      doc["agree"] = agree ? ojson(*agree) : ojson(nullptr);
      os << doc.dump(2) << '\n';
      return rc;
    }
    os << fmt::format("parameters: alpha={} beta={} lambda={}\n", fmt17(p.alpha()), fmt17(p.beta()),
                      fmt17(p.lambda()));
    os << fmt::format("thresholds: lambda_g_low={} lambda_pi={} lambda_chaos={} lambda_max={}\n",
                      fmt17(t.lambda_g_low), fmt17(t.lambda_pi), fmt17(t.lambda_chaos),
                      fmt17(t.lambda_max));
    os << fmt::format("interval: a={} m={} b={}\n", fmt17(interval->a()), fmt17(interval->m()),
                      fmt17(interval->b()));
    os << fmt::format(
        "gate: in_class_g={} endpoints={} below_diagonal={} unimodal={} self_map={} margin={}\n",
        gate.in_class_g, gate.cond_endpoints, gate.cond_below_diagonal, gate.cond_unimodal,
        gate.cond_self_map, fmt17(gate.margin));
    for (const auto* v : {cf ? &*cf : nullptr, num ? &*num : nullptr}) {
      if (!v) continue;
      os << fmt::format(
          "{}: odd_cycle={} turbulent_second_iterate={} f2_of_m={} f3_of_m={} pi_min={} pi_max={}\n",
          to_string(v->method), v->odd_cycle, v->turbulent_second_iterate, fmt17(v->f2_of_m),
          fmt17(v->f3_of_m), fmt17(v->pi_min), fmt17(v->pi_max));
    }
    if (agree) os << fmt::format("agree: {}\n", *agree);
    return rc;
  });
}

// ------------------------------------------------------------------- sweep

struct SweepArgs {
  std::string config;
  std::string alpha_range, beta_range, lambda_range;
  int lambda_window = 0;
  std::string methods, out, format;
  int jobs = 0;
  int gate_grid = 0;
  std::optional<double> eps_cmp, eps_root;
};

int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err) {
  SweepConfig cfg;
  cfg.jobs = default_jobs();
  if (!args.config.empty()) {
    std::ifstream in(args.config);
    if (!in) throw UsageError(fmt::format("cannot read config '{}'", args.config));
    try {
      cfg.apply_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
      throw UsageError(fmt::format("config '{}': {}", args.config, e.what()));
    } catch (const ConfigError& e) {
      throw UsageError(e.what());
    }
  }
  if (!args.alpha_range.empty()) cfg.alpha = parse_range(args.alpha_range, "alpha-range");
  if (!args.beta_range.empty()) cfg.beta = parse_range(args.beta_range, "beta-range");
  if (!args.lambda_range.empty() && args.lambda_window > 0)
    throw UsageError("--lambda-range and --lambda-window are exclusive");
  if (!args.lambda_range.empty())
    cfg.lambda = LambdaAbsolute{parse_range(args.lambda_range, "lambda-range")};
  if (args.lambda_window > 0) cfg.lambda = LambdaWindowRelative{args.lambda_window};
  if (!args.methods.empty()) {
    try {
      cfg.methods = parse_methods(args.methods);
    } catch (const ConfigError& e) {
      throw UsageError(e.what());
    }
  }
  if (!args.out.empty()) cfg.output_path = args.out;
  if (!args.format.empty()) cfg.output_format = args.format == "json" ? OutputFormat::JSON : OutputFormat::CSV;
  if (args.jobs > 0) cfg.jobs = args.jobs;
  if (args.gate_grid > 0) cfg.gate_grid = args.gate_grid;
  if (args.eps_cmp) cfg.tol.cmp = *args.eps_cmp;
  if (args.eps_root) cfg.tol.root = *args.eps_root;
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }

  return with_output(cfg.output_path, out, err, [&](std::ostream& os) {
    const auto rows = run_sweep(cfg);
    const auto meta = sweep_metadata(cfg);
    if (cfg.output_format == OutputFormat::JSON)
      write_json(os, rows, meta);
    else
      write_csv(os, rows, meta);
    return exit_code::kOk;
  });
}

// ----------------------------------------------------------------- certify

struct CertifyArgs {
  std::string alpha, beta, lambda, out;
  int max_period = 15;
  int grid_density = 8192;
  Tolerances tol;
};

int cmd_certify(const CertifyArgs& args, std::ostream& out, std::ostream& err) {
  const EconomyParams p = parse_params(args.alpha, args.beta, args.lambda);
  if (args.max_period < 1 || args.max_period > 20)
    throw UsageError(fmt::format("--max-period must lie in [1, 20], got {}", args.max_period));
  if (args.grid_density < 16) throw UsageError("--grid-density must be >= 16");
  const ThresholdSet t = thresholds(p);
  std::optional<TrappingInterval> interval;
  try {
    interval = trapping_interval(p);
  } catch (const WindowError& e) {
    err << "outside G window: " << e.what() << '\n';
    return exit_code::kOutsideWindow;
  }
  if (!gate_check(p, *interval, 1000, args.tol).in_class_g) {
    err << "error: gate check failed inside the window\n";
    return exit_code::kInternal;
  }

  OrbitSearchOptions opts;
  opts.grid_density = args.grid_density;
  opts.tol = args.tol;
  const auto odd = find_odd_cycle(p, *interval, args.max_period, opts);
  const auto witness = find_turbulence_witness(p, *interval, opts);
  const auto p3 = search_period3(p, *interval, opts);

  ojson w = nullptr;
  if (witness.found) {
    const auto& x = *witness.found;
    w = {{"x1", x.x1}, {"x2", x.x2}, {"x3", x.x3}, {"residuals", x.residuals}};
  }
  ojson doc{
      {"tool", fmt::format("chaoslab {}", kToolVersion)},
      {"parameters", params_json(p)},
      {"thresholds", thresholds_json(t)},
      {"interval", interval_json(*interval)},
      {"odd_cycle",
       {{"found", odd.found.has_value()}, {"orbit", orbit_json(odd.found)}, {"search", bounds_json(odd.bounds)}}},
      {"turbulence_witness",
       {{"found", witness.found.has_value()}, {"witness", w}, {"search", bounds_json(witness.bounds)}}},
      {"period3",
       {{"exploratory", true},
        {"found", p3.found.has_value()},
        {"orbit", orbit_json(p3.found)},
        {"search", bounds_json(p3.bounds)}}},
      {"note", "an empty certificate means nothing was found within the search bounds, not that "
               "no such object exists"}};
  return with_output(args.out, out, err, [&](std::ostream& os) {
    os << doc.dump(2) << '\n';
    return exit_code::kOk;
  });
}

// ------------------------------------------------------------------- orbit

struct OrbitArgs {
  std::string alpha, beta, lambda, p0, out;
  std::int64_t steps = 100;
};

int cmd_orbit(const OrbitArgs& args, std::ostream& out, std::ostream& err) {
  const EconomyParams p = parse_params(args.alpha, args.beta, args.lambda);
  const double p0 = parse_arg(args.p0, "p0");
  Orbit orbit;
  try {
    orbit = iterate(p, p0, args.steps);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  return with_output(args.out, out, err, [&](std::ostream& os) {
    os << "# chaoslab " << kToolVersion << '\n'
       << "# command: orbit\n"
       << "# alpha: " << fmt17(p.alpha()) << '\n'
       << "# beta: " << fmt17(p.beta()) << '\n'
       << "# lambda: " << fmt17(p.lambda()) << '\n'
       << "# p0: " << fmt17(p0) << '\n'
       << "# steps: " << args.steps << '\n'
       << "# escaped: " << (orbit.escaped ? "true" : "false") << '\n'
       << "t,p\n";
    for (size_t t = 0; t < orbit.points.size(); ++t) os << t << ',' << fmt17(orbit.points[t]) << '\n';
    return exit_code::kOk;
  });
}

// ------------------------------------------------------------------ verify

struct VerifyArgs {
  VerifyOptions options;
  std::string out;
};

int cmd_verify(VerifyArgs args, std::ostream& out, std::ostream& err) {
  if (args.options.jobs <= 0) args.options.jobs = default_jobs();
  if (args.options.grid < 2 || args.options.lambda_count < 1 || args.options.random_count < 0 ||
      args.options.oracle_count < 0)
    throw UsageError("verify: grid >= 2, lambda-count >= 1, counts >= 0");
  const VerifyReport report = run_verify(args.options);
  const int rc = report.ok() ? exit_code::kOk : exit_code::kInternal;
  if (const CheckResult* f = report.first_failed())
    err << fmt::format("verify failed: {}: {}\n", f->name, f->first_failure);
  return with_output(args.out, out, err, [&](std::ostream& os) {
    print_report(os, report);
    return rc;
  });
}

void add_params(CLI::App* sub, std::string& alpha, std::string& beta, std::string& lambda) {
  sub->add_option("--alpha", alpha, "consumer-1 exponent in (0,1); decimal or p/q")->required();
  sub->add_option("--beta", beta, "consumer-2 exponent in (0,1); decimal or p/q")->required();
  sub->add_option("--lambda", lambda, "adjustment speed > 0; decimal or p/q")->required();
}

void add_tolerances(CLI::App* sub, Tolerances& tol) {
  sub->add_option("--eps-cmp", tol.cmp, "absolute tolerance for threshold comparisons")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--eps-root", tol.root, "root residual tolerance")->check(CLI::PositiveNumber);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"chaoslab: odd-cycle and turbulence classification of the tatonnement price map"};
  app.require_subcommand(1);

  ClassifyArgs classify;
  auto* c = app.add_subcommand("classify", "classify one (alpha, beta, lambda)");
  add_params(c, classify.alpha, classify.beta, classify.lambda);
  c->add_option("--method", classify.method)->check(CLI::IsMember({"closed_form", "numerical", "both"}));
  c->add_option("--format", classify.format)->check(CLI::IsMember({"text", "json"}));
  c->add_option("--out", classify.out, "write the report here instead of stdout");
  c->add_option("--grid-density", classify.gate_grid, "gate-check grid points")->check(CLI::Range(100, 10'000'000));
  add_tolerances(c, classify.tol);

  SweepArgs sweep;
  Tolerances sweep_tol;
  auto* s = app.add_subcommand("sweep", "classify every cell of an (alpha, beta, lambda) grid");
  s->add_option("--config", sweep.config, "flat key-value JSON config; flags override it");
  s->add_option("--alpha-range", sweep.alpha_range, "lo:hi:count");
  s->add_option("--beta-range", sweep.beta_range, "lo:hi:count");
  s->add_option("--lambda-range", sweep.lambda_range, "absolute lambda grid lo:hi:count");
  s->add_option("--lambda-window", sweep.lambda_window, "count lambdas strictly inside each cell's window")
      ->check(CLI::PositiveNumber);
  s->add_option("--methods", sweep.methods, "closed_form,numerical");
  s->add_option("--out", sweep.out, "output path, '-' for stdout");
  s->add_option("--format", sweep.format)->check(CLI::IsMember({"csv", "json"}));
  s->add_option("--jobs", sweep.jobs, "worker threads (default $CHAOSLAB_JOBS or all cores)")
      ->check(CLI::PositiveNumber);
  s->add_option("--grid-density", sweep.gate_grid, "gate-check grid points")->check(CLI::Range(100, 10'000'000));
  auto* s_cmp = s->add_option("--eps-cmp", sweep_tol.cmp)->check(CLI::NonNegativeNumber);
  auto* s_root = s->add_option("--eps-root", sweep_tol.root)->check(CLI::PositiveNumber);

  CertifyArgs certify;
  auto* k = app.add_subcommand("certify", "search for odd cycles, turbulence witnesses and 3-cycles");
  add_params(k, certify.alpha, certify.beta, certify.lambda);
  k->add_option("--max-period", certify.max_period, "largest period scanned (<= 20)");
  k->add_option("--grid-density", certify.grid_density, "scan cells per unit of period");
  k->add_option("--out", certify.out);
  add_tolerances(k, certify.tol);

  OrbitArgs orbit;
  auto* o = app.add_subcommand("orbit", "emit a trajectory as CSV");
  add_params(o, orbit.alpha, orbit.beta, orbit.lambda);
  o->add_option("--p0", orbit.p0, "initial price > 0")->required();
  o->add_option("--steps", orbit.steps, "number of steps");
  o->add_option("--out", orbit.out);

  VerifyArgs verify;
  verify.options.jobs = 0;
  auto* v = app.add_subcommand("verify", "run the cross-validation suite");
  v->add_option("--grid", verify.options.grid, "alpha and beta points per axis");
  v->add_option("--lambda-count", verify.options.lambda_count, "lambda points per (alpha, beta)");
  v->add_option("--random-count", verify.options.random_count, "random triples for classifier agreement");
  v->add_option("--oracle-count", verify.options.oracle_count, "random triples for orbit/factorisation checks");
  v->add_option("--jobs", verify.options.jobs)->check(CLI::PositiveNumber);
  v->add_option("--out", verify.out);
  add_tolerances(v, verify.options.tol);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? exit_code::kOk : exit_code::kUsage;
  }

  try {
    if (c->parsed()) return cmd_classify(classify, out, err);
    if (s->parsed()) {
      if (s_cmp->count()) sweep.eps_cmp = sweep_tol.cmp;
      if (s_root->count()) sweep.eps_root = sweep_tol.root;
      return cmd_sweep(sweep, out, err);
    }
    if (k->parsed()) return cmd_certify(certify, out, err);
    if (o->parsed()) return cmd_orbit(orbit, out, err);
    if (v->parsed()) return cmd_verify(verify, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return exit_code::kUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return exit_code::kInternal;
  }
  return exit_code::kUsage;
}

}  // namespace chaoslab
