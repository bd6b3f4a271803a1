#include "tvlad/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "tvlad/errors.hpp"
#include "tvlad/parallel.hpp"
#include "tvlad/rng.hpp"

namespace tvlad {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string shortest(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string join(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ' ';
    out += shortest(xs[i]);
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string fixed4(double v) {
  if (std::isnan(v)) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

void fill_cell(StudyTable& table, Index row, Index col, const std::vector<double>& samples) {
  if (samples.empty()) {
    table.values(row, col) = kNaN;
    table.standard_errors(row, col) = kNaN;
    return;
  }
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= static_cast<double>(samples.size());
  table.values(row, col) = mean;
  if (samples.size() < 2) {
    table.standard_errors(row, col) = kNaN;
    return;
  }
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  const double n = static_cast<double>(samples.size());
  table.standard_errors(row, col) = std::sqrt(ss / (n - 1.0) / n);
}

StudyTable empty_table(std::string title, const StudyConfig& config, std::vector<std::string> columns) {
  if (config.replications < 1) throw ConfigError("study needs at least one replication");
  if (config.T_list.empty()) throw ConfigError("study needs at least one sample size");
  StudyTable table;
  table.title = std::move(title);
  for (std::size_t T : config.T_list) table.row_labels.push_back("T=" + std::to_string(T));
  table.column_labels = std::move(columns);
  const auto rows = static_cast<Index>(table.row_labels.size());
  const auto cols = static_cast<Index>(table.column_labels.size());
  table.values = MatrixXd::Constant(rows, cols, kNaN);
  table.standard_errors = MatrixXd::Constant(rows, cols, kNaN);
  table.metadata.emplace_back("seed", std::to_string(config.seed));
  table.metadata.emplace_back("replications", std::to_string(config.replications));
  table.metadata.emplace_back("burn_in", std::to_string(config.burn_in));
  return table;
}

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

EstimationConfig inference_config(const StudyConfig& config) {
  EstimationConfig est;
  est.weight = config.inference_weight;
  est.bandwidth = config.bandwidth;
  est.order = config.model.order();
  return est;
}

}  // namespace

std::vector<EstimatorChoice> standard_estimator_menu() {
  using K = EstimatorChoice::Kind;
  return {
      {"L2", K::L2, WeightSpec::unit()},
      {"LAD", K::LAD, WeightSpec::unit()},
      {"LSW1c1", K::Weighted, WeightSpec::ling(0.5)},
      {"LSW1c2", K::Weighted, WeightSpec::ling(0.1)},
      {"LSW2q1", K::Weighted, WeightSpec::smooth_indicator_quantile(0.95)},
      {"LSW2q2", K::Weighted, WeightSpec::smooth_indicator_quantile(0.90)},
      {"LSW3", K::Weighted, WeightSpec::pan()},
  };
}

EstimatorChoice find_estimator(const std::string& label) {
  for (auto& choice : standard_estimator_menu()) {
    if (choice.label == label) return choice;
  }
  throw ConfigError("unknown estimator label '" + label + "'");
}

std::vector<double> default_study_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 16; ++i) grid.push_back((10.0 + 5.0 * i) / 100.0);
  return grid;
}

std::uint64_t replication_seed(std::uint64_t seed, std::size_t T, std::size_t r) {
  return derive_seed(derive_seed(seed, T), r);
}

std::vector<double> admissible_grid(const std::vector<double>& grid, std::size_t T, std::optional<double> bandwidth) {
  EstimationConfig probe;
  probe.bandwidth = bandwidth;
  const double h = resolve_bandwidth(probe, T);
  std::vector<double> out;
  for (double u : grid) {
    if (u >= h && u <= 1.0 - h) out.push_back(u);
  }
  return out;
}

std::string StudyTable::to_csv() const {
  std::ostringstream os;
  os << "row";
  for (const auto& c : column_labels) os << ',' << csv_field(c) << ',' << csv_field(c + "_se");
  os << '\n';
  for (Index r = 0; r < values.rows(); ++r) {
    os << csv_field(row_labels[static_cast<std::size_t>(r)]);
    for (Index c = 0; c < values.cols(); ++c) {
      os << ',' << shortest(values(r, c)) << ',' << shortest(standard_errors(r, c));
    }
    os << '\n';
  }
  return os.str();
}

std::string StudyTable::to_text() const {
  std::size_t first = 6;
  for (const auto& r : row_labels) first = std::max(first, r.size());
  std::vector<std::size_t> widths;
  for (const auto& c : column_labels) widths.push_back(std::max<std::size_t>(c.size(), 8));
  std::ostringstream os;
  os << title << '\n';
  os << std::string(first, ' ');
  for (std::size_t c = 0; c < column_labels.size(); ++c) {
    os << "  " << std::string(widths[c] - column_labels[c].size(), ' ') << column_labels[c];
  }
  os << '\n';
  for (Index r = 0; r < values.rows(); ++r) {
    const auto& label = row_labels[static_cast<std::size_t>(r)];
    os << label << std::string(first - label.size(), ' ');
    for (Index c = 0; c < values.cols(); ++c) {
      const std::string cell = fixed4(values(r, c));
      os << "  " << std::string(widths[static_cast<std::size_t>(c)] - std::min(cell.size(), widths[static_cast<std::size_t>(c)]), ' ')
         << cell;
    }
    os << '\n';
  }
  for (const auto& c : incomplete_columns) os << "incomplete: " << c << '\n';
  return os.str();
}

StudyTable run_mae_study(const StudyConfig& config, ErrorMetric metric) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::string> labels;
  for (const auto& e : config.menu) labels.push_back(e.label);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t j = i + 1; j < labels.size(); ++j) {
      if (labels[i] == labels[j]) throw ConfigError("estimator labels must be unique");
    }
  }
  StudyTable table = empty_table(metric == ErrorMetric::MAE ? "MAE" : "MSE", config, labels);
  const std::size_t p = config.model.order();
  const std::size_t E = config.menu.size();
  std::vector<std::size_t> failures(E, 0);

  for (std::size_t row = 0; row < config.T_list.size(); ++row) {
    const std::size_t T = config.T_list[row];
    const std::vector<double> grid = admissible_grid(config.grid, T, config.bandwidth);
    if (grid.empty()) throw ConfigError("no grid point is admissible at T=" + std::to_string(T));
    table.metadata.emplace_back("grid_T" + std::to_string(T), join(grid));

    std::vector<std::vector<double>> errors(config.replications, std::vector<double>(E, kNaN));
    parallel_for(config.replications, [&](std::size_t r) {
      const TvSeries series = simulate_tvar(config.model, T, config.burn_in, replication_seed(config.seed, T, r));
      for (std::size_t e = 0; e < E; ++e) {
        const EstimatorChoice& choice = config.menu[e];
        EstimationConfig est;
        est.weight = resolve_weight(choice.weight, series.values);
        est.bandwidth = config.bandwidth;
        est.order = p;
        double total = 0.0;
        try {
          for (double u : grid) {
            const LocalFitResult fit =
                choice.kind == EstimatorChoice::Kind::Weighted
                    ? lswlade_at(series.values, u, est)
                    : baseline_estimate(series.values, u, est,
                                        choice.kind == EstimatorChoice::Kind::L2 ? Baseline::L2 : Baseline::LAD);
            const VectorXd err = fit.beta_hat - config.model.beta_at(u);
            total += metric == ErrorMetric::MAE ? err.lpNorm<1>() : err.norm();
          }
          errors[r][e] = total / static_cast<double>(grid.size());
        } catch (const Error&) {
        }
      }
    });

    for (std::size_t e = 0; e < E; ++e) {
      std::vector<double> samples;
      for (std::size_t r = 0; r < config.replications; ++r) {
        if (!std::isnan(errors[r][e])) samples.push_back(errors[r][e]);
      }
      failures[e] += config.replications - samples.size();
      if (static_cast<double>(config.replications - samples.size()) > 0.1 * static_cast<double>(config.replications)) {
        table.incomplete_columns.push_back(labels[e] + " (T=" + std::to_string(T) + ")");
      }
      fill_cell(table, static_cast<Index>(row), static_cast<Index>(e), samples);
    }
  }
  table.metadata.emplace_back("metric", metric == ErrorMetric::MAE ? "mae_l1" : "mse_l2");
  table.metadata.emplace_back("runtime_seconds", shortest(elapsed_seconds(start)));
  return table;
}

StudyTable run_size_power_study(const StudyConfig& config, double u1, const std::vector<double>& u2_list,
                                const std::vector<double>& levels) {
  const auto start = std::chrono::steady_clock::now();
  if (u2_list.empty() || levels.empty()) throw ConfigError("size/power study needs u2 values and levels");
  std::vector<std::string> columns;
  for (double level : levels) {
    for (double u2 : u2_list) columns.push_back("d=" + shortest(level) + ",u2=" + shortest(u2));
  }
  StudyTable table = empty_table("rejection rate", config, columns);
  table.metadata.emplace_back("u1", shortest(u1));
  table.metadata.emplace_back("M", std::to_string(config.M));
  table.metadata.emplace_back("multiplier", config.multiplier.name());
  table.metadata.emplace_back("weight", config.inference_weight.name());
  const EstimationConfig est = inference_config(config);
  const std::size_t U = u2_list.size();
  const std::size_t L = levels.size();

  for (std::size_t row = 0; row < config.T_list.size(); ++row) {
    const std::size_t T = config.T_list[row];
    // outcome[r][j * L + l]: 1 reject, 0 accept, NaN failed.
    std::vector<std::vector<double>> outcome(config.replications, std::vector<double>(U * L, kNaN));
    parallel_for(config.replications, [&](std::size_t r) {
      const std::uint64_t rep_seed = replication_seed(config.seed, T, r);
      const TvSeries series = simulate_tvar(config.model, T, config.burn_in, rep_seed);
      for (std::size_t j = 0; j < U; ++j) {
        try {
          const EquivalenceReport report = equivalence_test(series.values, u1, u2_list[j], est, config.M,
                                                            config.multiplier, derive_seed(rep_seed, 1 + j), levels);
          for (std::size_t l = 0; l < L; ++l) outcome[r][j * L + l] = report.decisions[l].reject ? 1.0 : 0.0;
        } catch (const Error&) {
        }
      }
    });
    std::size_t failed = 0;
    for (std::size_t l = 0; l < L; ++l) {
      for (std::size_t j = 0; j < U; ++j) {
        std::vector<double> samples;
        for (std::size_t r = 0; r < config.replications; ++r) {
          if (!std::isnan(outcome[r][j * L + l])) samples.push_back(outcome[r][j * L + l]);
        }
        if (l == 0) failed += config.replications - samples.size();
        const auto col = static_cast<Index>(l * U + j);
        fill_cell(table, static_cast<Index>(row), col, samples);
        if (samples.size() >= 2) {
          const double rate = table.values(static_cast<Index>(row), col);
          table.standard_errors(static_cast<Index>(row), col) =
              std::sqrt(rate * (1.0 - rate) / static_cast<double>(samples.size()));
        }
      }
    }
    table.metadata.emplace_back("failed_T" + std::to_string(T), std::to_string(failed));
  }
  table.metadata.emplace_back("runtime_seconds", shortest(elapsed_seconds(start)));
  return table;
}

StudyTable run_coverage_study(const StudyConfig& config, double u0, const std::vector<double>& coverages) {
  const auto start = std::chrono::steady_clock::now();
  if (coverages.empty()) throw ConfigError("coverage study needs at least one nominal level");
  std::vector<double> sorted = coverages;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::string> columns;
  for (double c : sorted) {
    if (!(c > 0.0 && c < 1.0)) throw ConfigError("nominal coverage must lie in (0, 1)");
    columns.push_back("coverage=" + shortest(c));
  }
  StudyTable table = empty_table("coverage", config, columns);
  table.metadata.emplace_back("u0", shortest(u0));
  table.metadata.emplace_back("M", std::to_string(config.M));
  table.metadata.emplace_back("multiplier", config.multiplier.name());
  table.metadata.emplace_back("weight", config.inference_weight.name());
  const EstimationConfig est = inference_config(config);
  const VectorXd truth = config.model.beta_at(u0);
  const std::size_t C = sorted.size();
  const double pts[] = {u0};

  std::size_t violations = 0;
  for (std::size_t row = 0; row < config.T_list.size(); ++row) {
    const std::size_t T = config.T_list[row];
    std::vector<std::vector<double>> covered(config.replications, std::vector<double>(C, kNaN));
    std::vector<char> nested(config.replications, 1);
    parallel_for(config.replications, [&](std::size_t r) {
      const std::uint64_t rep_seed = replication_seed(config.seed, T, r);
      const TvSeries series = simulate_tvar(config.model, T, config.burn_in, rep_seed);
      try {
        const BootstrapEnsemble ens =
            bootstrap_replicates(series.values, pts, est, config.M, config.multiplier, derive_seed(rep_seed, 1));
        const MatrixXd cov = bootstrap_covariance(ens);
        bool inside_smaller = false;
        for (std::size_t c = 0; c < C; ++c) {
          const ConfidenceRegion region = confidence_region(ens.base_fits[0].beta_hat, cov, 1.0 - sorted[c]);
          const bool inside = region.contains(truth);
          covered[r][c] = inside ? 1.0 : 0.0;
          if (inside_smaller && !inside) nested[r] = 0;
          inside_smaller = inside;
        }
      } catch (const Error&) {
      }
    });
    std::size_t failed = 0;
    for (std::size_t c = 0; c < C; ++c) {
      std::vector<double> samples;
      for (std::size_t r = 0; r < config.replications; ++r) {
        if (!std::isnan(covered[r][c])) samples.push_back(covered[r][c]);
      }
      if (c == 0) failed = config.replications - samples.size();
      fill_cell(table, static_cast<Index>(row), static_cast<Index>(c), samples);
      if (samples.size() >= 2) {
        const double rate = table.values(static_cast<Index>(row), static_cast<Index>(c));
        table.standard_errors(static_cast<Index>(row), static_cast<Index>(c)) =
            std::sqrt(rate * (1.0 - rate) / static_cast<double>(samples.size()));
      }
    }
    for (char ok : nested) violations += ok ? 0 : 1;
    table.metadata.emplace_back("failed_T" + std::to_string(T), std::to_string(failed));
  }
  table.metadata.emplace_back("nesting_violations", std::to_string(violations));
  table.metadata.emplace_back("runtime_seconds", shortest(elapsed_seconds(start)));
  return table;
}

}  // namespace tvlad
