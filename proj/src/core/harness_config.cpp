#include "core/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>

namespace aniso::harness {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& message) {
  throw std::invalid_argument("config: " + message);
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      fail("unknown key '" + it.key() + "' in " + where);
}

double get_number(const json& obj, const std::string& key) {
  if (!obj.at(key).is_number()) fail("'" + key + "' must be a number");
  return obj.at(key).get<double>();
}

synth::Factor parse_factor(const json& jf, int index) {
  const std::string where = "target.factors[" + std::to_string(index) + "]";
  if (!jf.is_object()) fail(where + " must be an object");
  if (!jf.contains("kind")) fail(where + " needs a 'kind'");
  const std::string kind = jf.at("kind").get<std::string>();
  synth::Factor f;
  if (kind == "smooth_sine") {
    reject_unknown(jf, {"kind", "frequency"}, where);
    f.kind = synth::FactorKind::smooth_sine;
    if (jf.contains("frequency")) f.frequency = get_number(jf, "frequency");
  } else if (kind == "kink") {
    reject_unknown(jf, {"kind", "center"}, where);
    f.kind = synth::FactorKind::kink;
    if (jf.contains("center")) f.center = get_number(jf, "center");
  } else if (kind == "bspline") {
    reject_unknown(jf, {"kind", "order"}, where);
    f.kind = synth::FactorKind::bspline;
    if (jf.contains("order")) f.order = jf.at("order").get<int>();
  } else {
    fail(where + ": unknown kind '" + kind + "'");
  }
  return f;
}

synth::TargetSpec parse_target(const json& jt) {
  if (!jt.is_object()) fail("'target' must be an object");
  reject_unknown(jt, {"factors", "combine", "active_dims", "amplitude", "declared_alpha"},
                 "target");
  if (!jt.contains("factors") || !jt.at("factors").is_array() || jt.at("factors").empty())
    fail("target needs a nonempty 'factors' array");

  synth::TargetSpec spec;
  int index = 0;
  for (const json& jf : jt.at("factors")) spec.factors.push_back(parse_factor(jf, index++));
  if (jt.contains("combine")) {
    const std::string c = jt.at("combine").get<std::string>();
    if (c == "product")
      spec.combine = synth::Combine::product;
    else if (c == "sum")
      spec.combine = synth::Combine::sum;
    else
      fail("target.combine must be 'product' or 'sum'");
  }
  if (jt.contains("active_dims")) {
    for (const json& v : jt.at("active_dims")) {
      const int dim_1based = v.get<int>();
      if (dim_1based < 1) fail("target.active_dims entries are 1-based");
      spec.active_dims.push_back(dim_1based - 1);
    }
  }
  if (jt.contains("amplitude")) spec.amplitude = get_number(jt, "amplitude");
  if (jt.contains("declared_alpha"))
    spec.declared_alpha = jt.at("declared_alpha").get<std::vector<double>>();
  return spec;
}

TuneSpec parse_tune(const json& jt) {
  TuneSpec tune;
  tune.enabled = true;
  if (jt.is_boolean()) {
    tune.enabled = jt.get<bool>();
    return tune;
  }
  if (!jt.is_object()) fail("'tune' must be a boolean or an object");
  reject_unknown(jt, {"validation_fraction", "grid", "span"}, "tune");
  if (jt.contains("validation_fraction"))
    tune.validation_fraction = get_number(jt, "validation_fraction");
  if (jt.contains("grid")) tune.grid = jt.at("grid").get<int>();
  if (jt.contains("span")) tune.span = get_number(jt, "span");
  if (!(tune.validation_fraction > 0.0 && tune.validation_fraction < 1.0))
    fail("tune.validation_fraction must lie in (0, 1)");
  if (tune.grid < 2) fail("tune.grid must be >= 2");
  if (!(tune.span > 1.0)) fail("tune.span must exceed 1");
  return tune;
}

void parse_thresholds(const json& jt, Thresholds& th) {
  if (!jt.is_object()) fail("'thresholds' must be an object");
  reject_unknown(jt, {"slope_range", "subset_margin", "subset_slope_range"}, "thresholds");
  if (jt.contains("slope_range")) {
    const auto r = jt.at("slope_range").get<std::vector<double>>();
    if (r.size() != 2 || !(r[0] < r[1])) fail("thresholds.slope_range must be [min, max]");
    th.slope_min = r[0];
    th.slope_max = r[1];
  }
  if (jt.contains("subset_margin")) th.subset_margin = get_number(jt, "subset_margin");
  if (jt.contains("subset_slope_range")) {
    const auto r = jt.at("subset_slope_range").get<std::vector<double>>();
    if (r.size() != 2 || !(r[0] < r[1]))
      fail("thresholds.subset_slope_range must be [min, max]");
    th.subset_slope_min = r[0];
    th.subset_slope_max = r[1];
  }
}

json parse_text(const std::string& text) {
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) fail("malformed JSON");
  return j;
}

}  // namespace

std::string mode_name(Mode mode) {
  switch (mode) {
    case Mode::rate: return "rate";
    case Mode::compare: return "compare";
    case Mode::subset: return "subset";
  }
  return "?";
}

synth::TargetSpec parse_target_spec(const std::string& json_text) {
  return parse_target(parse_text(json_text));
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  const json j = parse_text(json_text);
  if (!j.is_object()) fail("top level must be an object");
  reject_unknown(j,
                 {"mode", "target", "n_grid", "replicates", "noise_sd", "noise",
                  "clip_bound", "mc_samples", "seed", "schedule", "tune", "subset",
                  "workers", "thresholds"},
                 "config");

  ExperimentConfig cfg;
  if (!j.contains("mode")) fail("missing 'mode'");
  const std::string mode = j.at("mode").get<std::string>();
  if (mode == "rate")
    cfg.mode = Mode::rate;
  else if (mode == "compare" || mode == "iso_vs_aniso")
    cfg.mode = Mode::compare;
  else if (mode == "subset")
    cfg.mode = Mode::subset;
  else
    fail("mode must be 'rate', 'compare' or 'subset'");

  if (!j.contains("target")) fail("missing 'target'");
  cfg.target = parse_target(j.at("target"));
  const int d = static_cast<int>(cfg.target.factors.size());

  if (!j.contains("n_grid")) fail("missing 'n_grid'");
  cfg.n_grid = j.at("n_grid").get<std::vector<long>>();
  if (cfg.n_grid.size() < 2) fail("n_grid needs at least two entries for slope fitting");
  for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
    if (cfg.n_grid[i] < 1) fail("n_grid entries must be >= 1");
    if (i > 0 && cfg.n_grid[i] <= cfg.n_grid[i - 1])
      fail("n_grid must be strictly increasing");
  }

  if (!j.contains("replicates")) fail("missing 'replicates'");
  cfg.replicates = j.at("replicates").get<int>();
  if (cfg.replicates < 1) fail("replicates must be >= 1");

  if (j.contains("noise_sd")) {
    cfg.noise_sd = get_number(j, "noise_sd");
    if (!(cfg.noise_sd >= 0.0)) fail("noise_sd must be >= 0");
  }
  if (j.contains("noise")) {
    const std::string noise = j.at("noise").get<std::string>();
    if (noise == "truncated_gaussian")
      cfg.noise = synth::NoiseKind::truncated_gaussian;
    else if (noise == "uniform")
      cfg.noise = synth::NoiseKind::uniform;
    else
      fail("noise must be 'truncated_gaussian' or 'uniform'");
  }
  if (j.contains("clip_bound")) {
    cfg.clip_bound = get_number(j, "clip_bound");
    if (!(*cfg.clip_bound > 0.0)) fail("clip_bound must be positive");
  }
  if (j.contains("mc_samples")) {
    cfg.mc_samples = j.at("mc_samples").get<long>();
    if (cfg.mc_samples < 1) fail("mc_samples must be >= 1");
  }
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();

  if (j.contains("schedule")) {
    const json& js = j.at("schedule");
    if (!js.is_object()) fail("'schedule' must be an object");
    reject_unknown(js, {"c1", "c2"}, "schedule");
    if (js.contains("c1")) cfg.c1 = get_number(js, "c1");
    if (js.contains("c2")) cfg.c2 = js.at("c2").get<std::vector<double>>();
  }
  if (!(cfg.c1 > 0.0)) fail("schedule.c1 must be positive");
  if (cfg.c2.empty()) cfg.c2.assign(d, 1.0);
  if (static_cast<int>(cfg.c2.size()) != d) fail("schedule.c2 must have one entry per dimension");
  for (double c : cfg.c2)
    if (!(c > 0.0)) fail("schedule.c2 entries must be positive");

  if (j.contains("tune")) cfg.tune = parse_tune(j.at("tune"));

  if (j.contains("subset")) {
    for (const json& v : j.at("subset")) {
      const int dim_1based = v.get<int>();
      if (dim_1based < 1 || dim_1based > d) fail("subset entries must lie in 1..d");
      cfg.subset.push_back(dim_1based - 1);
    }
    std::sort(cfg.subset.begin(), cfg.subset.end());
    if (std::unique(cfg.subset.begin(), cfg.subset.end()) != cfg.subset.end())
      fail("subset entries must be distinct");
  }
  if (cfg.mode == Mode::subset && cfg.subset.empty())
    fail("subset mode needs a nonempty 'subset'");

  if (j.contains("workers")) {
    cfg.workers = j.at("workers").get<int>();
    if (cfg.workers < 0) fail("workers must be >= 0");
  }
  if (j.contains("thresholds")) parse_thresholds(j.at("thresholds"), cfg.thresholds);
  return cfg;
}

}  // namespace aniso::harness
