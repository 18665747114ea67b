// aniso — experiment harness and calculator CLI over the aniso C API.
//
// Subcommands: rate | compare | subset (experiment sweeps), bounds (closed-form
// calculator values), calibrate (smoothness estimation of a configured target).
// Exit codes: 0 success, 2 config error, 3 numerical failure, 4 threshold
// failure under --check.

#include <aniso.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitCheckFailed = 4;

int exit_code_for(aniso_status status) {
  switch (status) {
    case ANISO_OK: return kExitOk;
    case ANISO_ERR_INVALID_ARGUMENT: return kExitConfig;
    default: return kExitNumerical;
  }
}

int fail(aniso_status status) {
  std::cerr << "error: " << aniso_last_error() << "\n";
  return exit_code_for(status);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CLI::ValidationError("--config", "cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<double> parse_doubles(const std::string& csv) {
  std::vector<double> values;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) values.push_back(std::stod(item));
  return values;
}

std::vector<long> parse_longs(const std::string& csv) {
  std::vector<long> values;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) values.push_back(std::stol(item));
  return values;
}

std::vector<int> parse_ints(const std::string& csv) {
  std::vector<int> values;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) values.push_back(std::stoi(item));
  return values;
}

struct ExperimentArgs {
  std::string config_path;
  std::string out_dir = "aniso_out";
  std::string n_grid;
  int replicates = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int workers = 0;
  bool check = false;
};

void add_experiment_options(CLI::App* cmd, ExperimentArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment config (JSON)")->required();
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--n-grid", args.n_grid, "override n grid, e.g. 64,128,256");
  cmd->add_option("--replicates", args.replicates, "override replicate count");
  cmd->add_option("--seed", args.seed, "override master seed")
      ->each([&](const std::string&) { args.seed_set = true; });
  cmd->add_option("--workers", args.workers, "worker threads (0 = hardware)");
  cmd->add_flag("--check", args.check, "exit 4 when a configured threshold fails");
}

int run_experiment_command(const std::string& mode, const ExperimentArgs& args) {
  json cfg;
  try {
    cfg = json::parse(read_file(args.config_path));
  } catch (const json::exception& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return kExitConfig;
  }
  if (!cfg.is_object()) {
    std::cerr << "error: config: top level must be an object\n";
    return kExitConfig;
  }
  if (cfg.contains("mode")) {
    const std::string configured = cfg["mode"].get<std::string>();
    const bool same = configured == mode ||
                      (mode == "compare" && configured == "iso_vs_aniso");
    if (!same) {
      std::cerr << "error: config mode '" << configured
                << "' does not match subcommand '" << mode << "'\n";
      return kExitConfig;
    }
  }
  cfg["mode"] = mode;
  if (!args.n_grid.empty()) cfg["n_grid"] = parse_longs(args.n_grid);
  if (args.replicates > 0) cfg["replicates"] = args.replicates;
  if (args.seed_set) cfg["seed"] = args.seed;

  char* report_text = nullptr;
  int pass = 0;
  const aniso_status status = aniso_run_experiment(cfg.dump().c_str(),
                                                   args.out_dir.c_str(), args.workers,
                                                   &report_text, &pass);
  if (status != ANISO_OK) return fail(status);
  std::cout << report_text;
  aniso_string_free(report_text);
  std::cout << "outputs written to " << args.out_dir << "\n";
  if (args.check && pass == 0) {
    std::cerr << "check failed: see report.json\n";
    return kExitCheckFailed;
  }
  return kExitOk;
}

// ---- bounds subcommand ----

struct BoundsArgs {
  std::string alpha;
  std::string subset;
  std::string c2;
  long n = 1024;
  double c1 = 1.0;
  double m_bound = 1.0;
  double p = 0.0;  // 0: use 1/log n clamped into (0, 1/2]
  double capacity = 1.0;
  double approx_c1 = 1.0;
  double approx_cs = 1.0;
  bool as_json = false;
};

int run_bounds_command(const BoundsArgs& args) {
  const std::vector<double> alpha = parse_doubles(args.alpha);
  const int d = static_cast<int>(alpha.size());
  std::vector<double> c2 = args.c2.empty() ? std::vector<double>(d, 1.0)
                                           : parse_doubles(args.c2);
  const double p = args.p > 0.0
                       ? args.p
                       : std::min(0.5, 1.0 / std::log(static_cast<double>(args.n)));

  double alpha0 = 0.0;
  aniso_status status = aniso_effective_smoothness(alpha.data(), d, &alpha0);
  if (status != ANISO_OK) return fail(status);

  json out;
  out["alpha"] = alpha;
  out["alpha0"] = alpha0;
  out["n"] = args.n;
  out["p"] = p;

  double exponent = 0.0;
  if ((status = aniso_rate_exponent(alpha0, d, &exponent)) != ANISO_OK)
    return fail(status);
  out["rate_exponent"] = exponent;
  out["log_factor_power"] = d + 1;

  double lambda_n = 0.0;
  std::vector<double> gamma_n(d);
  int clamped = 0;
  if ((status = aniso_schedule(args.n, alpha.data(), d, nullptr, 0, args.c1, c2.data(),
                               &lambda_n, gamma_n.data(), &clamped)) != ANISO_OK)
    return fail(status);
  out["schedule"] = {{"lambda", lambda_n}, {"gamma", gamma_n}, {"clamped", clamped != 0}};

  if (!args.subset.empty()) {
    const std::vector<int> subset = parse_ints(args.subset);
    double alpha0_subset = 0.0;
    if ((status = aniso_effective_smoothness_subset(
             alpha.data(), d, subset.data(), static_cast<int>(subset.size()),
             &alpha0_subset)) != ANISO_OK)
      return fail(status);
    double subset_exponent = 0.0;
    if ((status = aniso_rate_exponent(alpha0_subset, d, &subset_exponent)) != ANISO_OK)
      return fail(status);
    std::vector<double> gamma_subset(d);
    double lambda_subset = 0.0;
    if ((status = aniso_schedule(args.n, alpha.data(), d, subset.data(),
                                 static_cast<int>(subset.size()), args.c1, c2.data(),
                                 &lambda_subset, gamma_subset.data(), &clamped)) !=
        ANISO_OK)
      return fail(status);
    out["subset"] = {{"dims", subset},
                     {"alpha0", alpha0_subset},
                     {"rate_exponent", subset_exponent},
                     {"log_factor_power", subset.size() + 1},
                     {"gamma", gamma_subset}};
  }

  double kp = 0.0;
  if ((status = aniso_kp_constant(p, args.m_bound, &kp)) != ANISO_OK)
    return fail(status);
  out["kp_constant"] = kp;

  double coefficient = 0.0;
  if ((status = aniso_entropy_coefficient_rates(p, args.capacity, d, gamma_n.data(),
                                                &coefficient)) != ANISO_OK)
    return fail(status);
  out["entropy_coefficient"] = coefficient;

  double entropy1 = 0.0;
  if ((status = aniso_entropy_bound(1, p, gamma_n.data(), d, args.capacity,
                                    &entropy1)) != ANISO_OK)
    return fail(status);
  out["entropy_bound_i1"] = entropy1;

  std::vector<double> gamma_opt(d);
  if ((status = aniso_optimal_bandwidths(lambda_n, args.n, p, alpha.data(), d,
                                         gamma_opt.data())) != ANISO_OK)
    return fail(status);
  out["optimal_bandwidths"] = gamma_opt;

  double approx = 0.0;
  if ((status = aniso_approximation_error_bound(lambda_n, gamma_n.data(), alpha.data(),
                                                d, args.approx_c1, args.approx_cs,
                                                &approx)) != ANISO_OK)
    return fail(status);
  out["approximation_error_bound"] = approx;

  double mse_floor = 0.0;  // oracle right-hand side with the computed pieces
  if ((status = aniso_oracle_rhs(approx, 4.0 * args.m_bound * args.m_bound,
                                 args.m_bound, p, 1.0, coefficient, lambda_n, args.n,
                                 &mse_floor)) != ANISO_OK)
    return fail(status);
  out["oracle_rhs"] = mse_floor;

  if (args.as_json) {
    std::cout << out.dump(2) << "\n";
    return kExitOk;
  }
  std::cout << "alpha0 (effective smoothness): " << alpha0 << "\n"
            << "rate exponent 2a0/(2a0+d):     " << exponent << "  (risk ~ n^-"
            << exponent << ", log power " << d + 1 << ")\n"
            << "schedule at n=" << args.n << ":          lambda=" << lambda_n
            << ", gamma=[";
  for (int i = 0; i < d; ++i) std::cout << (i ? ", " : "") << gamma_n[i];
  std::cout << "]" << (clamped ? " (clamped)" : "") << "\n";
  if (out.contains("subset"))
    std::cout << "subset alpha0:                 " << out["subset"]["alpha0"].get<double>()
              << ", exponent " << out["subset"]["rate_exponent"].get<double>() << "\n";
  std::cout << "K(p), p=" << p << ":        " << kp << "\n"
            << "entropy coefficient a:         " << coefficient << "\n"
            << "entropy bound e_1:             " << entropy1 << "\n"
            << "optimal bandwidths:            [";
  for (int i = 0; i < d; ++i) std::cout << (i ? ", " : "") << gamma_opt[i];
  std::cout << "]\n"
            << "approximation error bound:     " << approx << "\n"
            << "oracle inequality rhs:         " << mse_floor << "\n";
  return kExitOk;
}

// ---- calibrate subcommand ----

double target_callback(const double* x, int d, void* ctx) {
  (void)d;
  double value = std::nan("");
  aniso_target_eval(static_cast<const aniso_target*>(ctx), x, &value);
  return value;
}

struct CalibrateArgs {
  std::string config_path;
  double t_max = 0.2;
  int t_count = 5;
  int order = 0;  // 0: floor(declared alpha) + 1 per dimension
  bool as_json = false;
};

int run_calibrate_command(const CalibrateArgs& args) {
  json cfg;
  try {
    cfg = json::parse(read_file(args.config_path));
  } catch (const json::exception& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return kExitConfig;
  }
  const json target_spec = cfg.contains("target") ? cfg["target"] : cfg;

  aniso_target* target = nullptr;
  aniso_status status = aniso_target_create(target_spec.dump().c_str(), &target);
  if (status != ANISO_OK) return fail(status);

  const int d = aniso_target_dim(target);
  std::vector<double> declared(d);
  aniso_target_declared_alpha(target, declared.data());

  std::vector<double> t_grid(args.t_count);
  for (int k = 0; k < args.t_count; ++k) t_grid[k] = args.t_max / std::pow(2.0, k);
  const std::vector<double> lo(d, 0.0), hi(d, 1.0);

  json out;
  out["declared_alpha"] = declared;
  json estimates = json::array();
  int code = kExitOk;
  for (int dim = 1; dim <= d; ++dim) {
    const int order =
        args.order > 0
            ? args.order
            : static_cast<int>(std::floor(declared[dim - 1])) + 1;
    double estimate = 0.0;
    status = aniso_estimate_smoothness_exponent(target_callback, target, d, lo.data(),
                                                hi.data(), dim, order, t_grid.data(),
                                                args.t_count, &estimate);
    if (status == ANISO_OK) {
      estimates.push_back({{"dim", dim},
                           {"order", order},
                           {"declared", declared[dim - 1]},
                           {"estimated", estimate}});
    } else {
      estimates.push_back({{"dim", dim},
                           {"order", order},
                           {"declared", declared[dim - 1]},
                           {"error", aniso_last_error()}});
      if (status != ANISO_ERR_DEGENERATE) code = exit_code_for(status);
    }
  }
  out["estimates"] = estimates;
  aniso_target_free(target);

  if (args.as_json) {
    std::cout << out.dump(2) << "\n";
  } else {
    for (const json& e : estimates) {
      std::cout << "dim " << e["dim"].get<int>() << ": declared alpha "
                << e["declared"].get<double>() << ", order " << e["order"].get<int>();
      if (e.contains("estimated"))
        std::cout << ", estimated " << e["estimated"].get<double>() << "\n";
      else
        std::cout << ", " << e["error"].get<std::string>() << "\n";
    }
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anisotropic Gaussian LS-SVM experiment harness (lib v" +
               std::string(aniso_version()) + ")"};
  app.require_subcommand(1);

  ExperimentArgs rate_args, compare_args, subset_args;
  add_experiment_options(app.add_subcommand("rate", "rate-verification sweep"),
                         rate_args);
  add_experiment_options(
      app.add_subcommand("compare", "isotropic vs anisotropic comparison"),
      compare_args);
  add_experiment_options(app.add_subcommand("subset", "subset-rate experiment"),
                         subset_args);

  BoundsArgs bounds_args;
  CLI::App* bounds_cmd = app.add_subcommand("bounds", "print calculator values");
  bounds_cmd->add_option("--alpha", bounds_args.alpha, "smoothness per dim, e.g. 1,2")
      ->required();
  bounds_cmd->add_option("--subset", bounds_args.subset, "active subset (1-based)");
  bounds_cmd->add_option("--n", bounds_args.n, "sample size");
  bounds_cmd->add_option("--c1", bounds_args.c1, "lambda constant");
  bounds_cmd->add_option("--c2", bounds_args.c2, "bandwidth constants");
  bounds_cmd->add_option("--m", bounds_args.m_bound, "response bound M");
  bounds_cmd->add_option("--p", bounds_args.p, "entropy exponent p (default 1/log n)");
  bounds_cmd->add_option("--capacity", bounds_args.capacity, "capacity constant K");
  bounds_cmd->add_option("--approx-c1", bounds_args.approx_c1, "approximation C1");
  bounds_cmd->add_option("--approx-cs", bounds_args.approx_cs, "approximation Cs");
  bounds_cmd->add_flag("--json", bounds_args.as_json, "JSON output");

  CalibrateArgs calibrate_args;
  CLI::App* calibrate_cmd =
      app.add_subcommand("calibrate", "estimate target smoothness exponents");
  calibrate_cmd
      ->add_option("--config", calibrate_args.config_path,
                   "target spec or experiment config (JSON)")
      ->required();
  calibrate_cmd->add_option("--t-max", calibrate_args.t_max, "largest modulus scale");
  calibrate_cmd->add_option("--t-count", calibrate_args.t_count, "scales in the grid");
  calibrate_cmd->add_option("--order", calibrate_args.order,
                            "difference order (default floor(alpha)+1)");
  calibrate_cmd->add_flag("--json", calibrate_args.as_json, "JSON output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (app.got_subcommand("rate")) return run_experiment_command("rate", rate_args);
    if (app.got_subcommand("compare"))
      return run_experiment_command("compare", compare_args);
    if (app.got_subcommand("subset"))
      return run_experiment_command("subset", subset_args);
    if (app.got_subcommand("bounds")) return run_bounds_command(bounds_args);
    if (app.got_subcommand("calibrate")) return run_calibrate_command(calibrate_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
