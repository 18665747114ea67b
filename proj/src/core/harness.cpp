#include "core/harness.hpp"

#include "core/besov.hpp"
#include "core/kernel.hpp"
#include "core/quadrature.hpp"
#include "core/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

namespace aniso::harness {

using nlohmann::json;

SlopeFit fit_loglog_slope(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2)
    throw std::invalid_argument("fit_loglog_slope: need at least two points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& [n, risk] : points) {
    if (!(n > 0.0)) throw std::invalid_argument("fit_loglog_slope: n must be positive");
    if (!(risk > 0.0))
      throw std::invalid_argument("fit_loglog_slope: risks must be positive");
    const double x = std::log(n);
    const double y = std::log(risk);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(points.size());
  const double det = m * sxx - sx * sx;
  if (!(std::abs(det) > 1e-12 * m * sxx))
    throw std::invalid_argument("fit_loglog_slope: need at least two distinct n");
  SlopeFit fit;
  fit.slope = (m * sxy - sx * sy) / det;
  fit.intercept = (sy - fit.slope * sx) / m;
  double ssr = 0.0, sst = 0.0;
  const double mean_y = sy / m;
  for (const auto& [n, risk] : points) {
    const double x = std::log(n);
    const double y = std::log(risk);
    const double r = y - (fit.intercept + fit.slope * x);
    ssr += r * r;
    sst += (y - mean_y) * (y - mean_y);
  }
  fit.r_squared = sst > 0.0 ? 1.0 - ssr / sst : 1.0;
  fit.slope_stderr =
      points.size() > 2 ? std::sqrt(ssr / (m - 2.0) / (sxx - sx * sx / m)) : 0.0;
  return fit;
}

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag, std::uint64_t a,
                          std::uint64_t b) {
  std::uint64_t s = rng::mix(seed + 0x7F4A7C15ull * tag);
  s = rng::mix(s + 0x632BE59Bull * (a + 1));
  return rng::mix(s + 0x9E3779B9ull * (b + 1));
}

void parallel_cells(int workers, int count, const std::function<void(int)>& fn) {
  if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        fn(i);
      }
    });
  for (std::thread& t : pool) t.join();
}

struct Arm {
  std::string name;
  bounds::RateSchedule schedule;
  std::vector<bool> tunable;  // dimensions the bandwidth factors apply to
  bool per_dim_tuning;        // independent factor per tunable dimension
  double alpha0;
  int log_power;              // exponent of the (log n) factor in the rate
};

struct TuneOutcome {
  double lambda;
  Bandwidths gamma;
  bool edge;
};

TuneOutcome tune_constants(const ExperimentConfig& cfg, const Dataset& data,
                           const Arm& arm, const bounds::SchedulePoint& base) {
  const long n = data.inputs.rows();
  const long n_val = std::max<long>(1, std::lround(cfg.tune.validation_fraction * n));
  const long n_train = n - n_val;
  if (n_train < 1) throw std::invalid_argument("tune: not enough points to split");
  const Dataset train{data.inputs.topRows(n_train), data.responses.head(n_train),
                      data.clip_bound};
  const Matrix val_x = data.inputs.bottomRows(n_val);
  const Vector val_y = data.responses.tail(n_val);

  const int g = cfg.tune.grid;
  std::vector<double> factors(g);
  const double half = 0.5 * std::log10(cfg.tune.span);
  for (int i = 0; i < g; ++i)
    factors[i] = std::pow(10.0, -half + 2.0 * half * i / (g - 1));

  const int d = static_cast<int>(base.gamma.dim());
  std::vector<int> tuned_dims;
  for (int k = 0; k < d; ++k)
    if (arm.tunable[k]) tuned_dims.push_back(k);

  // Candidate bandwidth vectors: one shared factor across the tuned dimensions,
  // or an independent factor per tuned dimension. Each candidate remembers
  // whether any of its factor indices sits on the grid edge.
  struct GammaCandidate {
    Vector gamma;
    bool edge;
  };
  std::vector<GammaCandidate> candidates;
  const auto push_candidate = [&](const std::vector<int>& idx) {
    Vector gam = base.gamma.values();
    bool edge = false;
    for (std::size_t t = 0; t < tuned_dims.size(); ++t) {
      gam[tuned_dims[t]] = std::min(1.0, gam[tuned_dims[t]] * factors[idx[t]]);
      edge = edge || idx[t] == 0 || idx[t] == g - 1;
    }
    candidates.push_back({std::move(gam), edge});
  };
  if (arm.per_dim_tuning && tuned_dims.size() > 1) {
    quad::for_each_multi_index(std::vector<int>(tuned_dims.size(), g), push_candidate);
  } else {
    for (int gi = 0; gi < g; ++gi)
      push_candidate(std::vector<int>(tuned_dims.size(), gi));
  }

  double best_score = std::numeric_limits<double>::infinity();
  bool best_edge = false;
  double best_lambda = base.lambda;
  Bandwidths best_gamma = base.gamma;

  for (const GammaCandidate& cand : candidates) {
    const Bandwidths bw(cand.gamma);
    const Matrix gram = kernel::gram(train.inputs, bw);
    for (int li = 0; li < g; ++li) {
      const double lam = base.lambda * factors[li];
      const solver::TrainedModel model = solver::fit_with_gram(gram, train, lam, bw);
      const Vector pred = solver::predict_many(model, val_x);
      double mse = 0.0;
      for (Eigen::Index i = 0; i < pred.size(); ++i) {
        const double e = val_y[i] - solver::clip(pred[i], data.clip_bound);
        mse += e * e;
      }
      mse /= static_cast<double>(n_val);
      if (mse < best_score) {
        best_score = mse;
        best_lambda = lam;
        best_gamma = bw;
        best_edge = cand.edge || li == 0 || li == g - 1;
      }
    }
  }
  return TuneOutcome{best_lambda, best_gamma, best_edge};
}

CellRow run_cell(const ExperimentConfig& cfg, const synth::Target& target,
                 const Arm& arm, long n, int n_idx, int rep, double clip_bound) {
  CellRow row;
  row.arm = arm.name;
  row.n = n;
  row.replicate = rep;
  // Dataset and Monte-Carlo seeds depend only on (seed, n, replicate), never on
  // the arm or the worker count, so arms are paired and reruns are byte-stable.
  const std::uint64_t data_seed = derive_seed(cfg.seed, 1, n_idx, rep);
  const std::uint64_t mc_seed = derive_seed(cfg.seed, 2, n_idx, rep);
  row.seed = data_seed;
  try {
    const synth::SamplingSpec samp{n, cfg.noise_sd, cfg.noise, data_seed};
    const Dataset data = synth::sample_dataset(target, samp, clip_bound);
    const bounds::SchedulePoint base = bounds::schedule_at(arm.schedule, n);
    double lambda = base.lambda;
    Bandwidths gamma = base.gamma;
    if (cfg.tune.enabled) {
      const TuneOutcome tuned = tune_constants(cfg, data, arm, base);
      lambda = tuned.lambda;
      gamma = tuned.gamma;
      row.tuned_edge = tuned.edge;
    }
    const solver::TrainedModel model = solver::fit(data, lambda, gamma);
    const synth::ExcessRisk risk =
        synth::excess_risk(model, target, cfg.mc_samples, mc_seed);
    row.lambda = lambda;
    row.gamma = gamma.values();
    row.risk = risk.clipped.value;
    row.risk_se = risk.clipped.std_error;
  } catch (const std::exception& e) {
    row.error = e.what();
  } catch (...) {
    row.error = "unknown failure";
  }
  return row;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size();
  return m % 2 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

// Exact two-sided sign test against Binomial(m, 1/2).
double sign_test_p(int positives, int m) {
  if (m <= 0) return 1.0;
  const auto log_pmf = [m](int i) {
    return std::lgamma(m + 1.0) - std::lgamma(i + 1.0) - std::lgamma(m - i + 1.0) -
           m * M_LN2;
  };
  double below = 0.0, above = 0.0;
  for (int i = 0; i <= m; ++i) {
    const double p = std::exp(log_pmf(i));
    if (i <= positives) below += p;
    if (i >= positives) above += p;
  }
  return std::min(1.0, 2.0 * std::min(below, above));
}

struct ArmAggregate {
  std::vector<long> ns;
  std::vector<double> mean_log_risk;
  std::vector<double> mean_risk;
  std::vector<double> mean_risk_se;  // sd across replicates / sqrt(count)
  std::optional<SlopeFit> slope;
  int edge_cells = 0;
  int failed_cells = 0;
};

ArmAggregate aggregate_arm(const std::vector<CellRow>& rows, const std::string& arm,
                           const std::vector<long>& n_grid) {
  ArmAggregate agg;
  for (long n : n_grid) {
    double sum_log = 0.0, sum = 0.0, sumsq = 0.0;
    int count = 0;
    for (const CellRow& row : rows) {
      if (row.arm != arm || row.n != n) continue;
      if (!row.error.empty()) {
        ++agg.failed_cells;
        continue;
      }
      if (row.tuned_edge) ++agg.edge_cells;
      if (row.risk > 0.0) {
        sum_log += std::log(row.risk);
        sum += row.risk;
        sumsq += row.risk * row.risk;
        ++count;
      }
    }
    if (count > 0) {
      agg.ns.push_back(n);
      agg.mean_log_risk.push_back(sum_log / count);
      const double mean = sum / count;
      agg.mean_risk.push_back(mean);
      const double var =
          count > 1 ? std::max(0.0, (sumsq - count * mean * mean) / (count - 1.0)) : 0.0;
      agg.mean_risk_se.push_back(std::sqrt(var / count));
    }
  }
  if (agg.ns.size() >= 2) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < agg.ns.size(); ++i)
      pts.emplace_back(static_cast<double>(agg.ns[i]), std::exp(agg.mean_log_risk[i]));
    agg.slope = fit_loglog_slope(pts);
  }
  return agg;
}

// Per-replicate slope over the n grid, for paired slope-margin statistics.
std::optional<double> replicate_slope(const std::vector<CellRow>& rows,
                                      const std::string& arm, int rep) {
  std::vector<std::pair<double, double>> pts;
  for (const CellRow& row : rows)
    if (row.arm == arm && row.replicate == rep && row.error.empty() && row.risk > 0.0)
      pts.emplace_back(static_cast<double>(row.n), row.risk);
  if (pts.size() < 2) return std::nullopt;
  return fit_loglog_slope(pts).slope;
}

json arm_to_json(const ArmAggregate& agg) {
  json j;
  j["per_n"] = json::array();
  for (std::size_t i = 0; i < agg.ns.size(); ++i)
    j["per_n"].push_back({{"n", agg.ns[i]},
                          {"mean_log_risk", agg.mean_log_risk[i]},
                          {"mean_risk", agg.mean_risk[i]},
                          {"mean_risk_se", agg.mean_risk_se[i]}});
  if (agg.slope) {
    j["slope"] = agg.slope->slope;
    j["slope_stderr"] = agg.slope->slope_stderr;
    j["intercept"] = agg.slope->intercept;
    j["r_squared"] = agg.slope->r_squared;
  }
  j["tuned_edge_cells"] = agg.edge_cells;
  j["failed_cells"] = agg.failed_cells;
  return j;
}

void write_results_csv(const std::string& path, const std::vector<CellRow>& rows, int d) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "mode,n,replicate,lambda";
  for (int k = 1; k <= d; ++k) out << ",gamma_" << k;
  out << ",risk,risk_se,seed\n";
  for (const CellRow& row : rows) {
    if (!row.error.empty()) continue;
    out << row.arm << ',' << row.n << ',' << (row.replicate + 1) << ','
        << format_double(row.lambda);
    for (int k = 0; k < d; ++k) out << ',' << format_double(row.gamma[k]);
    out << ',' << format_double(row.risk) << ',' << format_double(row.risk_se) << ','
        << row.seed << '\n';
  }
}

void write_slope_csv(const std::string& path,
                     const std::vector<std::pair<std::string, ArmAggregate>>& arms) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "arm,log_n,mean_log_risk\n";
  for (const auto& [name, agg] : arms)
    for (std::size_t i = 0; i < agg.ns.size(); ++i)
      out << name << ',' << format_double(std::log(static_cast<double>(agg.ns[i])))
          << ',' << format_double(agg.mean_log_risk[i]) << '\n';
}

}  // namespace

Report run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
  const synth::Target target(cfg.target);
  const int d = target.dim();
  const double clip_bound =
      cfg.clip_bound ? *cfg.clip_bound : target.default_clip_bound();

  const SmoothnessProfile full_profile{target.declared_alpha(), std::nullopt};
  std::vector<Arm> arms;
  const auto full_alpha0 = bounds::profile_alpha0(full_profile);
  switch (cfg.mode) {
    case Mode::rate: {
      arms.push_back(Arm{"rate", bounds::make_schedule(full_profile, cfg.c1, cfg.c2),
                         std::vector<bool>(d, true), false, full_alpha0, d + 1});
      break;
    }
    case Mode::compare: {
      // The isotropic arm treats every dimension as alpha0-smooth, which is
      // exactly a single shared bandwidth schedule. The anisotropic arm tunes a
      // factor per dimension — unless its schedule is itself isotropic, in
      // which case the grid degenerates to the shared one and the two arms
      // select identical models on identical data.
      const SmoothnessProfile iso_profile{std::vector<double>(d, full_alpha0),
                                          std::nullopt};
      const bounds::RateSchedule aniso_schedule =
          bounds::make_schedule(full_profile, cfg.c1, cfg.c2);
      bool isotropic = true;
      for (int i = 1; i < d; ++i)
        isotropic = isotropic &&
                    aniso_schedule.exponents_gamma[i] == aniso_schedule.exponents_gamma[0] &&
                    cfg.c2[i] == cfg.c2[0];
      arms.push_back(Arm{"aniso", aniso_schedule, std::vector<bool>(d, true),
                         !isotropic, full_alpha0, d + 1});
      arms.push_back(Arm{"iso", bounds::make_schedule(iso_profile, cfg.c1, cfg.c2),
                         std::vector<bool>(d, true), false, full_alpha0, d + 1});
      break;
    }
    case Mode::subset: {
      SmoothnessProfile sub_profile = full_profile;
      sub_profile.active_subset = cfg.subset;
      std::vector<bool> tunable(d, false);
      for (int i : cfg.subset) tunable[i] = true;
      arms.push_back(Arm{"full", bounds::make_schedule(full_profile, cfg.c1, cfg.c2),
                         std::vector<bool>(d, true), false, full_alpha0, d + 1});
      arms.push_back(Arm{"subset", bounds::make_schedule(sub_profile, cfg.c1, cfg.c2),
                         tunable, false, bounds::profile_alpha0(sub_profile),
                         static_cast<int>(cfg.subset.size()) + 1});
      break;
    }
  }

  // One job per (arm, n, replicate); results land in a preallocated slot, so
  // aggregation order never depends on the worker count.
  const int n_count = static_cast<int>(cfg.n_grid.size());
  const int cells_per_arm = n_count * cfg.replicates;
  const int total = cells_per_arm * static_cast<int>(arms.size());
  std::vector<CellRow> rows(total);
  parallel_cells(cfg.workers, total, [&](int index) {
    const int arm_i = index / cells_per_arm;
    const int rest = index % cells_per_arm;
    const int n_idx = rest / cfg.replicates;
    const int rep = rest % cfg.replicates;
    rows[index] =
        run_cell(cfg, target, arms[arm_i], cfg.n_grid[n_idx], n_idx, rep, clip_bound);
  });

  std::vector<std::pair<std::string, ArmAggregate>> aggregates;
  for (const Arm& arm : arms)
    aggregates.emplace_back(arm.name, aggregate_arm(rows, arm.name, cfg.n_grid));

  json report;
  report["mode"] = mode_name(cfg.mode);
  report["d"] = d;
  report["n_grid"] = cfg.n_grid;
  report["replicates"] = cfg.replicates;
  report["seed"] = cfg.seed;
  report["clip_bound"] = clip_bound;
  report["declared_alpha"] = target.declared_alpha();
  report["warnings"] = target.warnings();
  report["tuned"] = cfg.tune.enabled;
  for (const auto& [name, agg] : aggregates) report["arms"][name] = arm_to_json(agg);
  json errors = json::array();
  for (const CellRow& row : rows)
    if (!row.error.empty())
      errors.push_back({{"arm", row.arm},
                        {"n", row.n},
                        {"replicate", row.replicate + 1},
                        {"message", row.error}});
  report["errors"] = errors;

  bool pass = true;
  json checks;
  const double theory_full = bounds::rate_exponent(full_alpha0, d);
  report["theoretical_exponent"] = theory_full;
  report["log_factor_power"] = d + 1;

  switch (cfg.mode) {
    case Mode::rate: {
      const auto& agg = aggregates[0].second;
      const bool have = agg.slope.has_value();
      const double slope = have ? agg.slope->slope : 0.0;
      const bool ok = have && slope >= cfg.thresholds.slope_min &&
                      slope <= cfg.thresholds.slope_max;
      checks["slope_in_range"] = {
          {"pass", ok},
          {"slope", have ? json(slope) : json()},
          {"range", {cfg.thresholds.slope_min, cfg.thresholds.slope_max}},
          {"theoretical", -theory_full}};
      pass = ok;
      break;
    }
    case Mode::compare: {
      json per_n = json::array();
      bool all_ok = true;
      for (long n : cfg.n_grid) {
        std::vector<double> aniso, iso, diffs;
        int positives = 0, nonzero = 0;
        for (int rep = 0; rep < cfg.replicates; ++rep) {
          const CellRow* a = nullptr;
          const CellRow* b = nullptr;
          for (const CellRow& row : rows) {
            if (row.n != n || row.replicate != rep || !row.error.empty()) continue;
            if (row.arm == "aniso") a = &row;
            if (row.arm == "iso") b = &row;
          }
          if (!a || !b) continue;
          aniso.push_back(a->risk);
          iso.push_back(b->risk);
          const double diff = b->risk - a->risk;  // > 0 when aniso is better
          diffs.push_back(diff);
          if (diff != 0.0) {
            ++nonzero;
            if (diff > 0.0) ++positives;
          }
        }
        if (aniso.empty()) {
          all_ok = false;
          continue;
        }
        const double med_a = median(aniso);
        const double med_i = median(iso);
        const bool ok = med_a <= med_i;
        all_ok = all_ok && ok;
        per_n.push_back({{"n", n},
                         {"median_aniso", med_a},
                         {"median_iso", med_i},
                         {"median_diff_iso_minus_aniso", median(diffs)},
                         {"sign_test_p", sign_test_p(positives, nonzero)},
                         {"pairs", aniso.size()},
                         {"pass", ok}});
      }
      checks["aniso_not_worse"] = {{"pass", all_ok}, {"per_n", per_n}};
      pass = all_ok;
      break;
    }
    case Mode::subset: {
      const auto& full_agg = aggregates[0].second;
      const auto& sub_agg = aggregates[1].second;
      const double theory_sub = bounds::rate_exponent(arms[1].alpha0, d);
      report["theoretical_exponent_subset"] = theory_sub;
      report["log_factor_power_subset"] = arms[1].log_power;

      std::vector<double> margins;
      for (int rep = 0; rep < cfg.replicates; ++rep) {
        const auto sf = replicate_slope(rows, "full", rep);
        const auto ss = replicate_slope(rows, "subset", rep);
        if (sf && ss) margins.push_back(*sf - *ss);  // > 0 when subset is steeper
      }
      const bool have_margin = !margins.empty();
      const double med_margin = have_margin ? median(margins) : 0.0;
      const bool margin_ok = have_margin && med_margin >= cfg.thresholds.subset_margin;
      const bool have_slope = sub_agg.slope.has_value();
      const double sub_slope = have_slope ? sub_agg.slope->slope : 0.0;
      const bool range_ok = have_slope && sub_slope >= cfg.thresholds.subset_slope_min &&
                            sub_slope <= cfg.thresholds.subset_slope_max;
      checks["subset_margin"] = {{"pass", margin_ok},
                                 {"median_margin", have_margin ? json(med_margin) : json()},
                                 {"required", cfg.thresholds.subset_margin},
                                 {"replicates_used", margins.size()}};
      checks["subset_slope_in_range"] = {
          {"pass", range_ok},
          {"slope", have_slope ? json(sub_slope) : json()},
          {"range", {cfg.thresholds.subset_slope_min, cfg.thresholds.subset_slope_max}},
          {"theoretical", -theory_sub}};
      checks["full_slope"] = full_agg.slope
                                 ? json(full_agg.slope->slope)
                                 : json();
      pass = margin_ok && range_ok;
      break;
    }
  }
  report["checks"] = checks;
  report["pass"] = pass;

  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  write_results_csv((fs::path(out_dir) / "results.csv").string(), rows, d);
  write_slope_csv((fs::path(out_dir) / "slope.csv").string(), aggregates);
  const std::string text = report.dump(2) + "\n";
  {
    std::ofstream out((fs::path(out_dir) / "report.json").string(), std::ios::binary);
    if (!out) throw std::runtime_error("cannot write report.json");
    out << text;
  }

  Report result;
  result.json_text = text;
  result.pass = pass;
  result.rows = std::move(rows);
  return result;
}

}  // namespace aniso::harness
