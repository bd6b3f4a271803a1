#include "tvlad/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tvlad/errors.hpp"
#include "tvlad/stats.hpp"

namespace tvlad::io {
namespace {

using Eigen::Index;

bool parse_number(const std::string& raw, double& out) {
  std::size_t b = 0, e = raw.size();
  while (b < e && (raw[b] == ' ' || raw[b] == '\t')) ++b;
  while (e > b && (raw[e - 1] == ' ' || raw[e - 1] == '\t')) --e;
  if (b == e) return false;
  const char* first = raw.data() + b;
  if (*first == '+') ++first;
  const auto res = std::from_chars(first, raw.data() + e, out);
  return res.ec == std::errc() && res.ptr == raw.data() + e;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  return j.at(key);
}

double number(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_number()) throw ConfigError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
  return j.contains(key) ? number(j, key) : fallback;
}

std::string text(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_string()) throw ConfigError(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

CsvTable parse_csv(std::istream& in) {
  CsvTable table;
  std::vector<std::vector<std::string>> records;
  std::vector<std::size_t> lines;

  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool at_record_start = true;
  bool comment = false;
  bool field_started = false;
  std::size_t line = 1, record_line = 1;
  char c = 0;

  const auto end_record = [&] {
    if (!comment && (field_started || !record.empty())) {
      record.push_back(field);
      records.push_back(std::move(record));
      lines.push_back(record_line);
    }
    record.clear();
    field.clear();
    comment = false;
    field_started = false;
    at_record_start = true;
  };

  while (in.get(c)) {
    if (comment) {
      if (c == '\n') {
        ++line;
        end_record();
      }
      continue;
    }
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (at_record_start) {
      record_line = line;
      at_record_start = false;
      if (c == '#') {
        comment = true;
        continue;
      }
    }
    switch (c) {
      case '"':
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        record.push_back(field);
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        ++line;
        end_record();
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (in_quotes) throw DataError("CSV ends inside a quoted field");
  end_record();

  if (records.empty()) return table;
  double probe = 0.0;
  bool header = false;
  for (const auto& f : records.front()) {
    if (!parse_number(f, probe)) header = true;
  }
  std::size_t first = 0;
  if (header) {
    table.header = records.front();
    first = 1;
  }
  for (std::size_t i = first; i < records.size(); ++i) {
    table.rows.push_back(std::move(records[i]));
    table.line_numbers.push_back(lines[i]);
  }
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return parse_csv(in);
}

Transform transform_from_string(const std::string& name) {
  if (name == "none") return Transform::None;
  if (name == "log_return") return Transform::LogReturn;
  throw ConfigError("unknown transform '" + name + "' (expected none or log_return)");
}

std::vector<double> log_returns(std::span<const double> prices) {
  for (std::size_t i = 0; i < prices.size(); ++i) {
    if (!(prices[i] > 0.0)) {
      throw DataError("nonpositive price at row " + std::to_string(i + 1) + "; log returns need s_t > 0");
    }
  }
  std::vector<double> out;
  if (prices.size() < 2) return out;
  out.reserve(prices.size() - 1);
  for (std::size_t t = 0; t + 1 < prices.size(); ++t) out.push_back(std::log(prices[t + 1] / prices[t]));
  return out;
}

std::vector<double> ingest_csv(const std::filesystem::path& path, const std::string& column, Transform transform) {
  const CsvTable table = read_csv(path);
  if (table.rows.empty()) throw DataError("'" + path.string() + "' holds no data rows");

  std::size_t width = table.header.empty() ? table.rows.front().size() : table.header.size();
  std::size_t index = width - 1;
  if (!column.empty()) {
    const bool numeric = column.find_first_not_of("0123456789") == std::string::npos;
    if (numeric) {
      index = static_cast<std::size_t>(std::stoul(column));
    } else {
      const auto it = std::find(table.header.begin(), table.header.end(), column);
      if (it == table.header.end()) throw ConfigError("column '" + column + "' not found in the CSV header");
      index = static_cast<std::size_t>(it - table.header.begin());
    }
    if (index >= width) throw ConfigError("column index " + column + " is out of range");
  }

  std::vector<double> values;
  values.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    double v = 0.0;
    if (index >= row.size() || !parse_number(row[index], v) || !std::isfinite(v)) {
      throw DataError("non-numeric value in column " + std::to_string(index) + " at line " +
                      std::to_string(table.line_numbers[r]));
    }
    values.push_back(v);
  }
  if (values.empty()) throw DataError("selected column is empty");
  if (transform == Transform::None) return values;

  for (std::size_t r = 0; r < values.size(); ++r) {
    if (!(values[r] > 0.0)) {
      throw DataError("nonpositive price at data row " + std::to_string(r + 1) + " (line " +
                      std::to_string(table.line_numbers[r]) + ")");
    }
  }
  return log_returns(values);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_series_csv(const std::filesystem::path& path, std::span<const double> values,
                      const std::vector<std::string>& comments) {
  std::ostringstream os;
  for (const auto& c : comments) os << "# " << c << '\n';
  os << "t,y\n";
  for (std::size_t t = 0; t < values.size(); ++t) os << (t + 1) << ',' << format_double(values[t]) << '\n';
  write_text(path, os.str());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw DataError("failed while writing '" + path.string() + "'");
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("invalid JSON in '" + path.string() + "': " + e.what());
  }
}

std::string config_hash(const json& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json to_json(const CoefFunction& f) {
  switch (f.family) {
    case CoefFunction::Family::Constant: return {{"type", "constant"}, {"c", f.params.at(0)}};
    case CoefFunction::Family::Linear:
      return {{"type", "linear"}, {"slope", f.params.at(0)}, {"intercept", f.params.at(1)}};
    case CoefFunction::Family::Sine:
      return {{"type", "sine"}, {"amplitude", f.params.at(0)}, {"frequency", f.params.at(1)}, {"phase", f.params.at(2)}};
    case CoefFunction::Family::Custom: break;
  }
  return {{"type", "custom"}};
}

CoefFunction coef_from_json(const json& j) {
  if (j.is_number()) return CoefFunction::constant(j.get<double>());
  const std::string type = text(j, "type");
  if (type == "constant") return CoefFunction::constant(number(j, "c"));
  if (type == "linear") return CoefFunction::linear(number(j, "slope"), number(j, "intercept"));
  if (type == "sine") {
    return CoefFunction::sine(number(j, "amplitude"), number_or(j, "frequency", 1.0), number_or(j, "phase", 0.0));
  }
  throw ConfigError("unknown coefficient type '" + type + "'");
}

json to_json(const InnovationSpec& spec) {
  json j{{"type", spec.name()}, {"scale", spec.scale()}};
  if (spec.kind() == InnovationKind::StudentT) j["nu"] = spec.nu();
  return j;
}

InnovationSpec innovation_from_json(const json& j) {
  const std::string type = text(j, "type");
  const double scale = number_or(j, "scale", 1.0);
  if (type == "gaussian") return InnovationSpec::gaussian(scale);
  if (type == "cauchy") return InnovationSpec::cauchy(scale);
  if (type == "student_t") return InnovationSpec::student_t(number(j, "nu"), scale);
  throw ConfigError("unknown innovation type '" + type + "'");
}

json to_json(const TvModel& model) {
  json coefs = json::array();
  for (const auto& f : model.coefficients()) coefs.push_back(to_json(f));
  return {{"coefficients", coefs}, {"innovation", to_json(model.innovation())}};
}

TvModel model_from_json(const json& j) {
  const json& coefs = require(j, "coefficients");
  if (!coefs.is_array() || coefs.empty()) throw ConfigError("'coefficients' must be a nonempty array");
  std::vector<CoefFunction> fs;
  for (const auto& c : coefs) fs.push_back(coef_from_json(c));
  return TvModel(std::move(fs), innovation_from_json(require(j, "innovation")));
}

json to_json(const WeightSpec& spec) {
  json j{{"type", spec.name()}};
  if (spec.c) j["c"] = *spec.c;
  if (spec.q) j["q"] = *spec.q;
  return j;
}

WeightSpec weight_from_json(const json& j) {
  if (j.is_string()) return weight_from_json(json{{"type", j.get<std::string>()}});
  if (j.contains("label")) {
    const EstimatorChoice choice = find_estimator(text(j, "label"));
    if (choice.kind != EstimatorChoice::Kind::Weighted) return WeightSpec::unit();
    return choice.weight;
  }
  const std::string type = text(j, "type");
  if (type == "ling") return WeightSpec::ling(number(j, "c"));
  if (type == "smooth_indicator") {
    if (j.contains("c")) return WeightSpec::smooth_indicator(number(j, "c"));
    return WeightSpec::smooth_indicator_quantile(number(j, "q"));
  }
  if (type == "pan") return WeightSpec::pan();
  if (type == "unit") return WeightSpec::unit();
  throw ConfigError("unknown weight type '" + type + "'");
}

json to_json(const EstimationConfig& config) {
  json j{{"weight", to_json(config.weight)},
         {"kernel", {{"type", "epanechnikov"}, {"support", config.kernel.support}}},
         {"order", config.order},
         {"boundary", config.boundary == BoundaryPolicy::Truncate ? "truncate" : "error"}};
  j["bandwidth"] = config.bandwidth ? json(*config.bandwidth) : json("log(T)/T^0.6");
  return j;
}

EstimationConfig estimation_from_json(const json& j) {
  EstimationConfig config;
  if (j.contains("weight")) config.weight = weight_from_json(j.at("weight"));
  if (j.contains("order")) {
    const json& o = j.at("order");
    if (!o.is_number_integer() || o.get<long long>() < 1) throw ConfigError("'order' must be a positive integer");
    config.order = o.get<std::size_t>();
  }
  if (j.contains("bandwidth") && j.at("bandwidth").is_number()) config.bandwidth = j.at("bandwidth").get<double>();
  if (j.contains("boundary")) {
    const std::string b = text(j, "boundary");
    if (b == "truncate") {
      config.boundary = BoundaryPolicy::Truncate;
    } else if (b != "error") {
      throw ConfigError("boundary must be 'error' or 'truncate'");
    }
  }
  return config;
}

json to_json(const MultiplierSpec& spec) {
  json j{{"type", spec.name()}};
  if (spec.kind == MultiplierKind::TwoPoint) {
    j["low"] = spec.low;
    j["high"] = spec.high;
  }
  return j;
}

MultiplierSpec multiplier_from_json(const json& j) {
  const std::string type = j.is_string() ? j.get<std::string>() : text(j, "type");
  if (type == "exponential") return MultiplierSpec::exponential();
  if (type == "gaussian") return MultiplierSpec::gaussian();
  if (type == "two_point") {
    if (j.is_string()) return MultiplierSpec::two_point();
    return MultiplierSpec::two_point(number_or(j, "low", 0.0), number_or(j, "high", 2.0));
  }
  throw ConfigError("unknown multiplier type '" + type + "'");
}

json to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

json to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json to_json(const LocalFitResult& fit) {
  return {{"u0", fit.u0},
          {"beta_hat", to_json(fit.beta_hat)},
          {"effective_n", fit.effective_n},
          {"V1", to_json(fit.V1)},
          {"V2", to_json(fit.V2)},
          {"objective", fit.objective},
          {"solver_status", to_string(fit.status)},
          {"bandwidth", fit.bandwidth}};
}

json to_json(const GridFit& fit) {
  if (fit.fit) return to_json(*fit.fit);
  return {{"error", fit.error}};
}

json to_json(const EquivalenceReport& report) {
  json decisions = json::array();
  for (const auto& d : report.decisions) {
    decisions.push_back({{"level", d.level}, {"critical_value", d.critical_value}, {"reject", d.reject}});
  }
  return {{"u1", report.u1},
          {"u2", report.u2},
          {"statistic", report.statistic},
          {"df", report.df},
          {"p_value", report.p_value},
          {"difference", to_json(report.difference)},
          {"xi", to_json(report.xi)},
          {"Th", report.th},
          {"decisions", decisions}};
}

json to_json(const WaldResult& result, double level) {
  const double crit = stats::chi2_upper_quantile(level, static_cast<double>(result.df));
  return {{"statistic", result.statistic}, {"df", result.df},          {"p_value", result.p_value},
          {"level", level},                {"critical_value", crit},   {"reject", result.statistic > crit},
          {"pseudo_inverse", result.pseudo_inverse}};
}

json to_json(const HillCurve& curve) {
  return {{"side", to_string(curve.side)},
          {"n_used", curve.n_used},
          {"k", curve.k_values},
          {"estimate", curve.estimates},
          {"plateau", curve.plateau},
          {"plateau_median", curve.plateau_median}};
}

json to_json(const StudyTable& table) {
  json meta = json::object();
  for (const auto& [k, v] : table.metadata) meta[k] = v;
  const auto cells = [](const Eigen::MatrixXd& m) {
    json out = json::array();
    for (Index r = 0; r < m.rows(); ++r) {
      json row = json::array();
      for (Index c = 0; c < m.cols(); ++c) row.push_back(std::isnan(m(r, c)) ? json(nullptr) : json(m(r, c)));
      out.push_back(row);
    }
    return out;
  };
  return {{"title", table.title},
          {"rows", table.row_labels},
          {"columns", table.column_labels},
          {"values", cells(table.values)},
          {"standard_errors", cells(table.standard_errors)},
          {"incomplete_columns", table.incomplete_columns},
          {"metadata", meta}};
}

std::string ensemble_csv(const BootstrapEnsemble& ensemble) {
  std::ostringstream os;
  os << "replicate";
  for (std::size_t i = 0; i < ensemble.points.size(); ++i) {
    for (std::size_t j = 0; j < ensemble.order; ++j) {
      os << ',' << csv_quote("beta_" + format_double(ensemble.points[i]) + "_" + std::to_string(j + 1));
    }
  }
  os << '\n';
  for (Index r = 0; r < ensemble.replicates.rows(); ++r) {
    os << ensemble.replicate_ids[static_cast<std::size_t>(r)];
    for (Index c = 0; c < ensemble.replicates.cols(); ++c) os << ',' << format_double(ensemble.replicates(r, c));
    os << '\n';
  }
  return os.str();
}

std::string hill_csv(const HillCurve& curve) {
  std::ostringstream os;
  os << "k,estimate\n";
  for (std::size_t i = 0; i < curve.k_values.size(); ++i) {
    os << curve.k_values[i] << ',' << format_double(curve.estimates[i]) << '\n';
  }
  return os.str();
}

}  // namespace tvlad::io
