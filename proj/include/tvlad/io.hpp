#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tvlad/bootstrap.hpp"
#include "tvlad/diagnostics.hpp"
#include "tvlad/estimator.hpp"
#include "tvlad/experiments.hpp"
#include "tvlad/process.hpp"

namespace tvlad::io {

using nlohmann::json;

/// Parsed RFC-4180 text. Lines starting with '#' are skipped; the first record
/// is a header when any of its fields is not a number.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  ///< 1-based source line of each row
};

CsvTable parse_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);

enum class Transform { None, LogReturn };
Transform transform_from_string(const std::string& name);

/// y_t = log(s_{t+1} / s_t), length n - 1. Throws DataError naming the first
/// nonpositive price by its 1-based row.
std::vector<double> log_returns(std::span<const double> prices);

/// One numeric column selected by header name or 0-based index; an empty
/// selector picks the last column.
std::vector<double> ingest_csv(const std::filesystem::path& path, const std::string& column, Transform transform);

/// Shortest round-trip decimal form.
std::string format_double(double v);

/// Writes "t,y" rows, preceded by '#' comment lines for each entry of comments.
void write_series_csv(const std::filesystem::path& path, std::span<const double> values,
                      const std::vector<std::string>& comments = {});

void write_text(const std::filesystem::path& path, const std::string& text);
json read_json(const std::filesystem::path& path);

/// FNV-1a 64 of the canonical dump, as 16 hex digits.
std::string config_hash(const json& config);

json to_json(const CoefFunction& f);
CoefFunction coef_from_json(const json& j);
json to_json(const InnovationSpec& spec);
InnovationSpec innovation_from_json(const json& j);
json to_json(const TvModel& model);
TvModel model_from_json(const json& j);

json to_json(const WeightSpec& spec);
/// {"type": "ling", "c": ...}, {"type": "smooth_indicator", "c" | "q": ...},
/// {"type": "pan"}, {"type": "unit"} or {"label": "LSW2q2"}.
WeightSpec weight_from_json(const json& j);
json to_json(const EstimationConfig& config);
EstimationConfig estimation_from_json(const json& j);
json to_json(const MultiplierSpec& spec);
MultiplierSpec multiplier_from_json(const json& j);

json to_json(const Eigen::MatrixXd& m);
json to_json(const Eigen::VectorXd& v);
json to_json(const LocalFitResult& fit);
json to_json(const GridFit& fit);
json to_json(const EquivalenceReport& report);
json to_json(const WaldResult& result, double level);
json to_json(const HillCurve& curve);
json to_json(const StudyTable& table);

/// One replicate per row, columns beta_<point>_<j>.
std::string ensemble_csv(const BootstrapEnsemble& ensemble);
/// "k,estimate" rows.
std::string hill_csv(const HillCurve& curve);

}  // namespace tvlad::io
