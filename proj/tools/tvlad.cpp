#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tvlad/bootstrap.hpp"
#include "tvlad/diagnostics.hpp"
#include "tvlad/errors.hpp"
#include "tvlad/estimator.hpp"
#include "tvlad/experiments.hpp"
#include "tvlad/io.hpp"
#include "tvlad/parallel.hpp"
#include "tvlad/process.hpp"

namespace {

using tvlad::io::json;

constexpr std::uint64_t kDefaultSeed = 20240601;

struct DataOptions {
  std::string input;
  std::string column;
  std::string transform = "none";
};

struct EstimationOptions {
  std::string config_file;
  std::string weight = "unit";
  std::optional<double> c;
  std::optional<double> q;
  std::optional<double> bandwidth;
  std::size_t order = 1;
  std::string boundary = "error";
};

void add_data_options(CLI::App* cmd, DataOptions& o) {
  cmd->add_option("--in", o.input, "Input CSV")->required()->check(CLI::ExistingFile);
  cmd->add_option("--column", o.column, "Column name or 0-based index (default: last column)");
  cmd->add_option("--transform", o.transform, "none or log_return")->check(CLI::IsMember({"none", "log_return"}));
}

void add_estimation_options(CLI::App* cmd, EstimationOptions& o) {
  cmd->add_option("--estimation", o.config_file, "Estimation config JSON; command-line flags are ignored when given")
      ->check(CLI::ExistingFile);
  cmd->add_option("--weight", o.weight, "unit, ling, smooth_indicator, pan, or a menu label such as LSW2q2");
  cmd->add_option("--c", o.c, "ling constant or smooth_indicator cutoff");
  cmd->add_option("--q", o.q, "smooth_indicator quantile level");
  cmd->add_option("--bandwidth", o.bandwidth, "Bandwidth h (default log(T)/T^0.6)");
  cmd->add_option("--order", o.order, "Autoregressive order p")->check(CLI::PositiveNumber);
  cmd->add_option("--boundary", o.boundary, "error or truncate")->check(CLI::IsMember({"error", "truncate"}));
}

tvlad::EstimationConfig resolve_estimation(const EstimationOptions& o) {
  if (!o.config_file.empty()) return tvlad::io::estimation_from_json(tvlad::io::read_json(o.config_file));
  tvlad::EstimationConfig config;
  config.order = o.order;
  config.bandwidth = o.bandwidth;
  config.boundary = o.boundary == "truncate" ? tvlad::BoundaryPolicy::Truncate : tvlad::BoundaryPolicy::Error;
  json w{{"type", o.weight}};
  if (o.weight.rfind("LSW", 0) == 0 || o.weight == "L2" || o.weight == "LAD") w = json{{"label", o.weight}};
  if (o.c) w["c"] = *o.c;
  if (o.q) w["q"] = *o.q;
  config.weight = tvlad::io::weight_from_json(w);
  return config;
}

std::vector<double> load_series(const DataOptions& o) {
  return tvlad::io::ingest_csv(o.input, o.column, tvlad::io::transform_from_string(o.transform));
}

json data_json(const DataOptions& o) {
  return {{"input", o.input}, {"column", o.column}, {"transform", o.transform}};
}

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> parts;
  std::size_t start = 0;
  while (start <= spec.size()) {
    const std::size_t end = spec.find(':', start);
    const std::string piece = spec.substr(start, end == std::string::npos ? std::string::npos : end - start);
    try {
      parts.push_back(std::stod(piece));
    } catch (...) {
      throw tvlad::ConfigError("grid must look like start:stop:step");
    }
    if (end == std::string::npos) break;
    start = end + 1;
  }
  if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
    throw tvlad::ConfigError("grid must look like start:stop:step with step > 0 and stop >= start");
  }
  std::vector<double> grid;
  for (std::size_t i = 0;; ++i) {
    const double v = std::round((parts[0] + static_cast<double>(i) * parts[2]) * 1e12) / 1e12;
    if (v > parts[1] + 1e-12) break;
    grid.push_back(v);
  }
  return grid;
}

void emit(const std::string& command, const json& config, std::optional<std::uint64_t> seed, const json& result,
          const std::string& out) {
  json doc{{"command", command},
           {"config", config},
           {"config_hash", tvlad::io::config_hash(config)},
           {"seed", seed ? json(*seed) : json(nullptr)},
           {"result", result}};
  const std::string text = doc.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    tvlad::io::write_text(out, text);
  }
}

tvlad::StudyConfig study_from_json(const json& j) {
  if (!j.contains("model")) throw tvlad::ConfigError("study config needs a 'model'");
  tvlad::StudyConfig config{tvlad::io::model_from_json(j.at("model"))};
  if (j.contains("T")) config.T_list = j.at("T").get<std::vector<std::size_t>>();
  if (j.contains("replications")) config.replications = j.at("replications").get<std::size_t>();
  if (j.contains("grid")) config.grid = j.at("grid").get<std::vector<double>>();
  if (j.contains("M")) config.M = j.at("M").get<std::size_t>();
  if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("bandwidth") && j.at("bandwidth").is_number()) config.bandwidth = j.at("bandwidth").get<double>();
  if (j.contains("burn_in")) config.burn_in = j.at("burn_in").get<std::size_t>();
  if (j.contains("estimators")) {
    config.menu.clear();
    for (const auto& label : j.at("estimators")) config.menu.push_back(tvlad::find_estimator(label.get<std::string>()));
  }
  if (j.contains("inference_weight")) config.inference_weight = tvlad::io::weight_from_json(j.at("inference_weight"));
  if (j.contains("multiplier")) config.multiplier = tvlad::io::multiplier_from_json(j.at("multiplier"));
  return config;
}

int run(int argc, char** argv) {
  CLI::App app{"Local self-weighted LAD estimation and bootstrap inference for tvAR models"};
  app.require_subcommand(1);
  app.fallthrough();
  std::size_t threads = 0;
  app.add_option("--threads", threads, "Worker threads (default TVLAD_THREADS or hardware concurrency)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Simulate a tvAR path");
  std::string model_file, sim_out;
  std::size_t T = 1000, burn_in = tvlad::kDefaultBurnIn;
  std::uint64_t seed = kDefaultSeed;
  sim->add_option("--model", model_file, "Model JSON")->required()->check(CLI::ExistingFile);
  sim->add_option("--T", T, "Sample size")->check(CLI::PositiveNumber);
  sim->add_option("--burn-in", burn_in, "Burn-in length");
  sim->add_option("--seed", seed, "Random seed");
  sim->add_option("--out", sim_out, "Output CSV")->required();

  // estimate
  auto* est = app.add_subcommand("estimate", "Local fits over a grid of rescaled times");
  DataOptions est_data;
  EstimationOptions est_opts;
  std::string grid_spec, est_out, estimator = "lswlade";
  std::vector<double> u0_list;
  add_data_options(est, est_data);
  add_estimation_options(est, est_opts);
  est->add_option("--grid", grid_spec, "start:stop:step");
  est->add_option("--u0", u0_list, "Explicit points");
  est->add_option("--estimator", estimator, "lswlade, l2 or lad")->check(CLI::IsMember({"lswlade", "l2", "lad"}));
  est->add_option("--out", est_out, "Output JSON (default stdout)");

  // bootstrap
  auto* bs = app.add_subcommand("bootstrap", "Multiplier bootstrap at one or two points");
  DataOptions bs_data;
  EstimationOptions bs_opts;
  std::vector<double> bs_points;
  std::size_t bs_M = 500;
  std::string bs_multiplier = "exponential", bs_out, bs_reps;
  double bs_level = 0.10;
  add_data_options(bs, bs_data);
  add_estimation_options(bs, bs_opts);
  bs->add_option("--u0", bs_points, "One or two points")->required()->expected(1, 2);
  bs->add_option("--M", bs_M, "Bootstrap replicates");
  bs->add_option("--multiplier", bs_multiplier, "exponential, gaussian or two_point")
      ->check(CLI::IsMember({"exponential", "gaussian", "two_point"}));
  bs->add_option("--seed", seed, "Random seed");
  bs->add_option("--level", bs_level, "Confidence region level delta");
  bs->add_option("--out", bs_out, "Output JSON (default stdout)");
  bs->add_option("--replicates", bs_reps, "Write replicates CSV here");

  // test
  auto* tst = app.add_subcommand("test", "Bootstrap equivalence test of beta(u1) = beta(u2)");
  DataOptions tst_data;
  EstimationOptions tst_opts;
  double u1 = 0.0, u2 = 0.0;
  std::size_t tst_M = 1000;
  std::string tst_multiplier = "exponential", tst_out;
  std::vector<double> levels(std::begin(tvlad::kTestLevels), std::end(tvlad::kTestLevels));
  add_data_options(tst, tst_data);
  add_estimation_options(tst, tst_opts);
  tst->add_option("--u1", u1, "First point")->required();
  tst->add_option("--u2", u2, "Second point")->required();
  tst->add_option("--M", tst_M, "Bootstrap replicates");
  tst->add_option("--multiplier", tst_multiplier, "exponential, gaussian or two_point")
      ->check(CLI::IsMember({"exponential", "gaussian", "two_point"}));
  tst->add_option("--seed", seed, "Random seed");
  tst->add_option("--levels", levels, "Significance levels");
  tst->add_option("--out", tst_out, "Output JSON (default stdout)");

  // hill
  auto* hill = app.add_subcommand("hill", "Hill tail-index curve");
  DataOptions hill_data;
  std::string side = "right", hill_out, hill_json;
  std::size_t k_min = 10, k_max = 0, k_step = 1;
  add_data_options(hill, hill_data);
  hill->add_option("--side", side, "left or right")->check(CLI::IsMember({"left", "right"}));
  hill->add_option("--k-min", k_min, "Smallest k");
  hill->add_option("--k-max", k_max, "Largest k (default: a tenth of the exceedances)");
  hill->add_option("--step", k_step, "k step");
  hill->add_option("--out", hill_out, "Output CSV (default stdout)");
  hill->add_option("--json", hill_json, "Also write a JSON summary here");

  // study
  auto* study = app.add_subcommand("study", "Simulation study from a JSON config");
  std::string study_file, study_prefix;
  study->add_option("--config", study_file, "Study JSON")->required()->check(CLI::ExistingFile);
  study->add_option("--out-prefix", study_prefix, "Writes <prefix>.csv, <prefix>.txt and <prefix>.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(tvlad::ErrorCategory::Config);
  }

  std::optional<tvlad::ScopedThreadCount> pin;
  if (threads > 0) pin.emplace(threads);

  if (*sim) {
    const json model_json = tvlad::io::read_json(model_file);
    const tvlad::TvModel model = tvlad::io::model_from_json(model_json);
    const json config{{"model", tvlad::io::to_json(model)}, {"T", T}, {"burn_in", burn_in}, {"seed", seed}};
    const tvlad::TvSeries series = tvlad::simulate_tvar(model, T, burn_in, seed);
    tvlad::io::write_series_csv(sim_out, series.values,
                                {"seed=" + std::to_string(seed), "config_hash=" + tvlad::io::config_hash(config),
                                 "config=" + config.dump()});
    return 0;
  }

  if (*est) {
    const std::vector<double> series = load_series(est_data);
    const tvlad::EstimationConfig config = resolve_estimation(est_opts);
    std::vector<double> grid = u0_list;
    if (!grid_spec.empty()) {
      const auto g = parse_grid(grid_spec);
      grid.insert(grid.end(), g.begin(), g.end());
    }
    if (grid.empty()) throw tvlad::ConfigError("estimate needs --grid or --u0");
    json results = json::array();
    std::size_t failures = 0;
    std::string first_error;
    if (estimator == "lswlade") {
      const auto fits = tvlad::lswlade_grid(series, grid, config);
      for (std::size_t i = 0; i < fits.size(); ++i) {
        json entry = tvlad::io::to_json(fits[i]);
        if (!fits[i].fit) {
          entry["u0"] = grid[i];
          if (failures++ == 0) first_error = fits[i].error;
        }
        results.push_back(entry);
      }
    } else {
      const auto which = estimator == "l2" ? tvlad::Baseline::L2 : tvlad::Baseline::LAD;
      for (double u : grid) {
        try {
          results.push_back(tvlad::io::to_json(tvlad::baseline_estimate(series, u, config, which)));
        } catch (const tvlad::Error& e) {
          results.push_back({{"u0", u}, {"error", e.what()}});
          if (failures++ == 0) first_error = e.what();
        }
      }
    }
    if (failures == grid.size()) throw tvlad::DataError("no grid point could be estimated: " + first_error);
    tvlad::EstimationConfig shown = config;
    shown.weight = tvlad::resolve_weight(config.weight, series);
    const json cfg{{"data", data_json(est_data)}, {"estimation", tvlad::io::to_json(shown)},
                   {"estimator", estimator}, {"grid", grid}};
    emit("estimate", cfg, std::nullopt, results, est_out);
    return 0;
  }

  if (*bs) {
    const std::vector<double> series = load_series(bs_data);
    const tvlad::EstimationConfig config = resolve_estimation(bs_opts);
    const auto multiplier = tvlad::io::multiplier_from_json(json(bs_multiplier));
    const tvlad::BootstrapEnsemble ens = tvlad::bootstrap_replicates(series, bs_points, config, bs_M, multiplier, seed);
    json result{{"base_fits", json::array()}, {"failed", ens.failed}, {"clamped", ens.clamped},
                {"usable", ens.replicate_ids.size()}};
    json covs = json::array();
    json regions = json::array();
    for (std::size_t i = 0; i < ens.points.size(); ++i) {
      result["base_fits"].push_back(tvlad::io::to_json(ens.base_fits[i]));
      const Eigen::MatrixXd cov = tvlad::bootstrap_covariance(ens, i);
      covs.push_back(tvlad::io::to_json(cov));
      const tvlad::ConfidenceRegion region = tvlad::confidence_region(ens.base_fits[i].beta_hat, cov, bs_level);
      regions.push_back({{"center", tvlad::io::to_json(region.center)},
                         {"shape", tvlad::io::to_json(region.shape)},
                         {"radius2", region.radius2},
                         {"delta", bs_level}});
    }
    result["covariance"] = covs;
    result["confidence_region"] = regions;
    if (ens.points.size() == 2) result["equivalence"] = tvlad::io::to_json(tvlad::equivalence_from_ensemble(ens));
    if (!bs_reps.empty()) tvlad::io::write_text(bs_reps, tvlad::io::ensemble_csv(ens));
    tvlad::EstimationConfig shown = config;
    shown.weight = tvlad::resolve_weight(config.weight, series);
    const json cfg{{"data", data_json(bs_data)}, {"estimation", tvlad::io::to_json(shown)}, {"points", bs_points},
                   {"M", bs_M},  {"multiplier", tvlad::io::to_json(multiplier)}, {"level", bs_level}};
    emit("bootstrap", cfg, seed, result, bs_out);
    return 0;
  }

  if (*tst) {
    const std::vector<double> series = load_series(tst_data);
    const tvlad::EstimationConfig config = resolve_estimation(tst_opts);
    const auto multiplier = tvlad::io::multiplier_from_json(json(tst_multiplier));
    const tvlad::EquivalenceReport report =
        tvlad::equivalence_test(series, u1, u2, config, tst_M, multiplier, seed, levels);
    tvlad::EstimationConfig shown = config;
    shown.weight = tvlad::resolve_weight(config.weight, series);
    const json cfg{{"data", data_json(tst_data)}, {"estimation", tvlad::io::to_json(shown)}, {"u1", u1},
                   {"u2", u2}, {"M", tst_M}, {"multiplier", tvlad::io::to_json(multiplier)}, {"levels", levels}};
    emit("test", cfg, seed, tvlad::io::to_json(report), tst_out);
    return 0;
  }

  if (*hill) {
    const std::vector<double> series = load_series(hill_data);
    const auto tail = side == "left" ? tvlad::TailSide::Left : tvlad::TailSide::Right;
    std::size_t n_tail = 0;
    for (double y : series) n_tail += (tail == tvlad::TailSide::Right ? y > 0.0 : y < 0.0) ? 1 : 0;
    const std::size_t top = k_max > 0 ? k_max : std::max<std::size_t>(k_min, n_tail / 10);
    const tvlad::HillCurve curve = tvlad::hill_curve(series, k_min, top, k_step, tail);
    if (hill_out.empty()) {
      std::cout << tvlad::io::hill_csv(curve);
    } else {
      tvlad::io::write_text(hill_out, tvlad::io::hill_csv(curve));
    }
    if (!hill_json.empty()) {
      const json cfg{{"data", data_json(hill_data)}, {"side", side}, {"k_min", k_min}, {"k_max", top}, {"step", k_step}};
      emit("hill", cfg, std::nullopt, tvlad::io::to_json(curve), hill_json);
    }
    return 0;
  }

  if (*study) {
    const json spec = tvlad::io::read_json(study_file);
    const std::string kind = spec.value("kind", std::string("mae"));
    const tvlad::StudyConfig config = study_from_json(spec);
    tvlad::StudyTable table;
    if (kind == "mae" || kind == "mse") {
      table = tvlad::run_mae_study(config, kind == "mae" ? tvlad::ErrorMetric::MAE : tvlad::ErrorMetric::MSE);
    } else if (kind == "size_power") {
      table = tvlad::run_size_power_study(config, spec.value("u1", 0.2),
                                          spec.value("u2", std::vector<double>{0.7, 0.75, 0.8}),
                                          spec.value("levels", std::vector<double>{0.10, 0.05}));
    } else if (kind == "coverage") {
      table = tvlad::run_coverage_study(config, spec.value("u0", 0.5),
                                        spec.value("coverages", std::vector<double>{0.90, 0.95}));
    } else {
      throw tvlad::ConfigError("unknown study kind '" + kind + "'");
    }
    const json doc{{"command", "study"}, {"config", spec}, {"config_hash", tvlad::io::config_hash(spec)},
                   {"seed", config.seed}, {"result", tvlad::io::to_json(table)}};
    if (study_prefix.empty()) {
      std::cout << table.to_text();
    } else {
      tvlad::io::write_text(study_prefix + ".csv", table.to_csv());
      tvlad::io::write_text(study_prefix + ".txt", table.to_text());
      tvlad::io::write_text(study_prefix + ".json", doc.dump(2) + "\n");
    }
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const tvlad::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.category());
  } catch (const tvlad::io::json::exception& e) {
    std::cerr << "error: invalid configuration: " << e.what() << '\n';
    return static_cast<int>(tvlad::ErrorCategory::Config);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return static_cast<int>(tvlad::ErrorCategory::Internal);
  }
}
