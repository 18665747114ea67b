#include "core/harness.hpp"

#include "core/besov.hpp"
#include "core/bounds.hpp"

#include <json.hpp>

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace aniso;
using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string small_config(const std::string& mode, int workers) {
  json cfg = {
      {"mode", mode},
      {"target",
       {{"factors",
         {{{"kind", "kink"}, {"center", 0.5}}, {{"kind", "bspline"}, {"order", 3}}}}}},
      {"n_grid", {48, 96}},
      {"replicates", 3},
      {"noise_sd", 0.1},
      {"mc_samples", 1500},
      {"seed", 2718},
      {"tune", {{"validation_fraction", 0.2}, {"grid", 3}, {"span", 4.0}}},
      {"workers", workers},
  };
  if (mode == "subset") cfg["subset"] = {1, 2};
  return cfg.dump();
}

std::filesystem::path temp_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() / ("aniso_test_" + tag);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("log-log slope fitting") {
  std::vector<std::pair<double, double>> exact;
  for (long n : {16, 32, 64, 128}) exact.push_back({double(n), 1.0 / n});
  const harness::SlopeFit unit = harness::fit_loglog_slope(exact);
  CHECK(unit.slope == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(unit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(unit.slope_stderr == doctest::Approx(0.0).epsilon(1e-8));

  std::vector<std::pair<double, double>> scaled;
  for (long n : {16, 32, 64, 128}) scaled.push_back({double(n), 4.0 / std::sqrt(double(n))});
  const harness::SlopeFit half = harness::fit_loglog_slope(scaled);
  CHECK(half.slope == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(half.intercept == doctest::Approx(std::log(4.0)).epsilon(1e-12));

  std::vector<std::pair<double, double>> flat = {{8, 0.25}, {64, 0.25}, {512, 0.25}};
  CHECK(harness::fit_loglog_slope(flat).slope == doctest::Approx(0.0).epsilon(1e-12));

  CHECK_THROWS_AS(harness::fit_loglog_slope({{16, 0.5}, {32, 0.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(harness::fit_loglog_slope({{16, 0.5}, {16, 0.25}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(harness::fit_loglog_slope({{16, 0.5}}), std::invalid_argument);
}

TEST_CASE("config parsing is strict") {
  CHECK_THROWS_AS(harness::parse_experiment_config("{not json"), std::invalid_argument);
  CHECK_THROWS_AS(harness::parse_experiment_config("{}"), std::invalid_argument);

  json cfg = json::parse(small_config("rate", 1));
  cfg["typo_key"] = 1;
  CHECK_THROWS_AS(harness::parse_experiment_config(cfg.dump()), std::invalid_argument);
  cfg.erase("typo_key");

  cfg["target"]["factors"][0]["order"] = 3;  // kink has no 'order'
  CHECK_THROWS_AS(harness::parse_experiment_config(cfg.dump()), std::invalid_argument);
  cfg = json::parse(small_config("rate", 1));

  cfg["n_grid"] = {64, 64};
  CHECK_THROWS_AS(harness::parse_experiment_config(cfg.dump()), std::invalid_argument);
  cfg["n_grid"] = {64};
  CHECK_THROWS_AS(harness::parse_experiment_config(cfg.dump()), std::invalid_argument);
  cfg = json::parse(small_config("rate", 1));

  cfg["mode"] = "subset";  // subset mode without a subset
  CHECK_THROWS_AS(harness::parse_experiment_config(cfg.dump()), std::invalid_argument);

  cfg = json::parse(small_config("rate", 1));
  const harness::ExperimentConfig parsed = harness::parse_experiment_config(cfg.dump());
  CHECK(parsed.mode == harness::Mode::rate);
  CHECK(parsed.n_grid == std::vector<long>{48, 96});
  CHECK(parsed.tune.enabled);
  CHECK(parsed.c2 == std::vector<double>{1.0, 1.0});

  // "iso_vs_aniso" is accepted as a spelling of compare mode.
  cfg["mode"] = "iso_vs_aniso";
  CHECK(harness::parse_experiment_config(cfg.dump()).mode == harness::Mode::compare);
}

TEST_CASE("rate experiment is reproducible byte for byte across worker counts") {
  const auto dir1 = temp_dir("det1");
  const auto dir4 = temp_dir("det4");
  const auto dir8 = temp_dir("det8");
  harness::run_experiment(harness::parse_experiment_config(small_config("rate", 1)),
                          dir1.string());
  harness::run_experiment(harness::parse_experiment_config(small_config("rate", 4)),
                          dir4.string());
  harness::run_experiment(harness::parse_experiment_config(small_config("rate", 8)),
                          dir8.string());
  const std::string csv1 = read_file(dir1 / "results.csv");
  CHECK(csv1 == read_file(dir4 / "results.csv"));
  CHECK(csv1 == read_file(dir8 / "results.csv"));
  CHECK(read_file(dir1 / "report.json") == read_file(dir4 / "report.json"));
  CHECK(read_file(dir1 / "slope.csv") == read_file(dir8 / "slope.csv"));
}

TEST_CASE("rate experiment emits the documented outputs") {
  const auto dir = temp_dir("outputs");
  const harness::Report report = harness::run_experiment(
      harness::parse_experiment_config(small_config("rate", 1)), dir.string());

  const std::string csv = read_file(dir / "results.csv");
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "mode,n,replicate,lambda,gamma_1,gamma_2,risk,risk_se,seed");
  int rows = 0;
  for (std::string line; std::getline(lines, line);) {
    CHECK(line.rfind("rate,", 0) == 0);
    ++rows;
  }
  CHECK(rows == 6);  // 2 n-values x 3 replicates

  const json parsed = json::parse(report.json_text);
  CHECK(parsed.at("mode") == "rate");
  // The reported theoretical exponent always equals the recomputed one.
  const double alpha0 = besov::effective_smoothness({1.0, 2.0});
  CHECK(parsed.at("theoretical_exponent").get<double>() ==
        doctest::Approx(bounds::rate_exponent(alpha0, 2)).epsilon(1e-14));
  CHECK(parsed.at("log_factor_power") == 3);
  CHECK(parsed.at("arms").contains("rate"));
  CHECK(parsed.at("checks").contains("slope_in_range"));
  CHECK(json::parse(read_file(dir / "report.json")) == parsed);

  const std::string slope_csv = read_file(dir / "slope.csv");
  CHECK(slope_csv.rfind("arm,log_n,mean_log_risk\n", 0) == 0);

  // Risks improve from n=48 to n=96 on this easy target (median over replicates).
  std::vector<double> risk48, risk96;
  for (const auto& row : report.rows)
    (row.n == 48 ? risk48 : risk96).push_back(row.risk);
  std::sort(risk48.begin(), risk48.end());
  std::sort(risk96.begin(), risk96.end());
  CHECK(risk96[risk96.size() / 2] <= risk48[risk48.size() / 2]);
}

TEST_CASE("every cell carries its own reusable seed and schedule") {
  const auto dir = temp_dir("seeds");
  const harness::Report report = harness::run_experiment(
      harness::parse_experiment_config(small_config("rate", 1)), dir.string());
  for (const auto& row : report.rows) {
    CHECK(row.error.empty());
    CHECK(row.lambda > 0.0);
    CHECK(row.gamma.minCoeff() > 0.0);
    CHECK(row.gamma.maxCoeff() <= 1.0);
  }
  // Seeds differ between replicates but agree across reruns (they derive from
  // (seed, n, replicate) only).
  CHECK(report.rows[0].seed != report.rows[1].seed);
  const harness::Report again = harness::run_experiment(
      harness::parse_experiment_config(small_config("rate", 1)), dir.string());
  CHECK(report.rows[0].seed == again.rows[0].seed);
}

TEST_CASE("compare mode pairs the two arms on identical data") {
  json cfg = json::parse(small_config("compare", 1));
  // An isotropic declared profile makes both arms' schedules identical, so the
  // paired risks coincide exactly and the sign test is degenerate.
  cfg["target"] = {{"factors",
                    {{{"kind", "bspline"}, {"order", 3}}, {{"kind", "bspline"}, {"order", 3}}}}};
  const auto dir = temp_dir("compare_iso");
  const harness::Report report =
      harness::run_experiment(harness::parse_experiment_config(cfg.dump()), dir.string());
  const json parsed = json::parse(report.json_text);
  for (const json& row : parsed.at("checks").at("aniso_not_worse").at("per_n")) {
    CHECK(row.at("median_diff_iso_minus_aniso").get<double>() == 0.0);
    CHECK(row.at("sign_test_p").get<double>() == 1.0);
    CHECK(row.at("pass").get<bool>());
  }
  CHECK(report.pass);
}

TEST_CASE("subset mode with the full subset degenerates to the rate experiment") {
  const auto dir = temp_dir("subset_full");
  const harness::Report report = harness::run_experiment(
      harness::parse_experiment_config(small_config("subset", 1)), dir.string());
  // subset = {1, 2} = all dims: both arms run the same schedule on the same data.
  for (const auto& row : report.rows) CHECK(row.error.empty());
  std::vector<harness::CellRow> full, subset;
  for (const auto& row : report.rows)
    (row.arm == "full" ? full : subset).push_back(row);
  REQUIRE(full.size() == subset.size());
  for (std::size_t i = 0; i < full.size(); ++i) {
    CHECK(full[i].lambda == subset[i].lambda);
    CHECK(full[i].gamma == subset[i].gamma);
    CHECK(full[i].risk == subset[i].risk);
  }
}

TEST_CASE("per-n standard error shrinks like one over sqrt(replicates)") {
  // Calibration run: across independent master seeds, the spread of the per-n
  // mean risk with R = 4 replicates should be about half the spread with R = 1.
  const auto dir = temp_dir("se_scaling");
  std::vector<double> means_r1, means_r4;
  for (int s = 0; s < 48; ++s) {
    json cfg = {
        {"mode", "rate"},
        {"target", {{"factors", {{{"kind", "kink"}, {"center", 0.5}}}}}},
        {"n_grid", {32, 64}},
        {"noise_sd", 0.1},
        {"mc_samples", 2000},
        {"seed", 9000 + s},
        {"workers", 1},
    };
    for (int r : {1, 4}) {
      cfg["replicates"] = r;
      const harness::Report report = harness::run_experiment(
          harness::parse_experiment_config(cfg.dump()), dir.string());
      const json arm = json::parse(report.json_text).at("arms").at("rate");
      for (const json& row : arm.at("per_n"))
        if (row.at("n").get<long>() == 64)
          (r == 1 ? means_r1 : means_r4).push_back(row.at("mean_risk").get<double>());
    }
  }
  REQUIRE(means_r1.size() == 48);
  REQUIRE(means_r4.size() == 48);
  const auto sd = [](const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= v.size();
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / (v.size() - 1.0));
  };
  const double ratio = sd(means_r1) / sd(means_r4);
  CHECK(ratio == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("a failing cell is recorded without aborting the sweep") {
  json cfg = json::parse(small_config("rate", 1));
  cfg["clip_bound"] = 0.01;  // below sup |f*| so sampling fails in every cell
  const auto dir = temp_dir("failures");
  const harness::Report report =
      harness::run_experiment(harness::parse_experiment_config(cfg.dump()), dir.string());
  CHECK_FALSE(report.pass);
  const json parsed = json::parse(report.json_text);
  CHECK(parsed.at("errors").size() == 6);
  CHECK(parsed.at("errors")[0].contains("message"));
  // Only the header survives in results.csv.
  CHECK(read_file(dir / "results.csv") ==
        "mode,n,replicate,lambda,gamma_1,gamma_2,risk,risk_se,seed\n");
}
