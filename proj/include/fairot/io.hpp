#pragma once

// CSV and JSON surfaces: dataset schemas, prediction files, model documents.
//
// CSV: header row required, comma separated, `.` decimal separator, group
// labels are 1-based integers. Floats are written as the shortest decimal
// that round-trips.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "fairot/distributions.hpp"
#include "fairot/error.hpp"
#include "fairot/projection.hpp"
#include "fairot/regressors.hpp"
#include "fairot/transport.hpp"

namespace fairot::io {

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Writes through a temporary sibling and renames it into place.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + path.string());
    out << content;
    out.flush();
    if (!out) throw InputError("cannot write " + path.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw InputError("cannot write " + path.string() + ": " + ec.message());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CsvTable {
 public:
  static CsvTable parse(std::string_view text, std::string name) {
    CsvTable t;
    t.name_ = std::move(name);
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(pos, end - pos);
      pos = end + 1;
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (line.empty()) continue;
      auto cells = split(line);
      if (t.header_.empty()) {
        t.header_ = std::move(cells);
        continue;
      }
      if (cells.size() != t.header_.size())
        throw InputError(t.name_ + " line " + std::to_string(line_no) + ": expected " +
                         std::to_string(t.header_.size()) + " fields, found " + std::to_string(cells.size()));
      t.rows_.push_back(std::move(cells));
      t.lines_.push_back(line_no);
    }
    if (t.header_.empty()) throw InputError(t.name_ + ": missing header row");
    return t;
  }

  static CsvTable load(const std::filesystem::path& path) {
    return parse(read_file(path), path.filename().string());
  }

  const std::vector<std::string>& header() const { return header_; }
  std::size_t size() const { return rows_.size(); }

  std::optional<std::size_t> find_column(std::string_view column) const {
    for (std::size_t i = 0; i < header_.size(); ++i)
      if (header_[i] == column) return i;
    return std::nullopt;
  }

  std::size_t column(std::string_view column) const {
    const auto c = find_column(column);
    if (!c) throw InputError(name_ + ": missing column '" + std::string(column) + "'");
    return *c;
  }

  const std::string& cell(std::size_t row, std::size_t col) const { return rows_[row][col]; }

  double number(std::size_t row, std::size_t col) const {
    const auto& text = rows_[row][col];
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v))
      throw cell_error(row, col, "not a finite number: '" + text + "'");
    return v;
  }

  std::optional<double> optional_number(std::size_t row, std::size_t col) const {
    if (rows_[row][col].empty()) return std::nullopt;
    return number(row, col);
  }

  long long integer(std::size_t row, std::size_t col) const {
    const auto& text = rows_[row][col];
    long long v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
      throw cell_error(row, col, "not an integer: '" + text + "'");
    return v;
  }

  int group(std::size_t row, std::size_t col) const {
    const auto v = integer(row, col);
    if (v < 1 || v > 1000000) throw cell_error(row, col, "group label must be a positive integer");
    return static_cast<int>(v);
  }

  InputError cell_error(std::size_t row, std::size_t col, const std::string& what) const {
    return InputError(name_ + " line " + std::to_string(lines_[row]) + ", column '" + header_[col] + "': " + what);
  }

 private:
  static std::vector<std::string> split(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      std::string_view cell = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
      while (!cell.empty() && cell.back() == ' ') cell.remove_suffix(1);
      out.emplace_back(cell);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return out;
  }

  std::string name_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::size_t> lines_;
};

namespace detail {

// Expects columns x1..xd starting at `first`; returns d.
inline std::size_t feature_columns(const CsvTable& t, std::size_t first, std::size_t count,
                                   const std::string& name) {
  for (std::size_t j = 0; j < count; ++j) {
    const std::string expected = "x" + std::to_string(j + 1);
    if (t.header()[first + j] != expected)
      throw InputError(name + ": header column " + std::to_string(first + j + 1) + " must be '" + expected +
                       "', found '" + t.header()[first + j] + "'");
  }
  return count;
}

}  // namespace detail

// Header y,x1..xd,s
inline LabeledDataset parse_labeled(const CsvTable& t, const std::string& name = "labeled.csv") {
  const auto& h = t.header();
  if (h.size() < 3 || h.front() != "y" || h.back() != "s")
    throw InputError(name + ": header must be y,x1..xd,s");
  const std::size_t d = detail::feature_columns(t, 1, h.size() - 2, name);
  std::vector<LabeledRow> rows;
  rows.reserve(t.size());
  for (std::size_t r = 0; r < t.size(); ++r) {
    LabeledRow row{t.number(r, 0), std::vector<double>(d), t.group(r, d + 1)};
    for (std::size_t j = 0; j < d; ++j) row.x[j] = t.number(r, j + 1);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError(name + ": no data rows");
  return LabeledDataset(std::move(rows));
}

// Header x1..xd,s
inline UnlabeledDataset parse_unlabeled(const CsvTable& t, std::size_t dimension,
                                        const std::string& name = "unlabeled.csv") {
  const auto& h = t.header();
  if (h.size() < 2 || h.back() != "s") throw InputError(name + ": header must be x1..xd,s");
  const std::size_t d = detail::feature_columns(t, 0, h.size() - 1, name);
  if (d != dimension)
    throw InputError(name + ": " + std::to_string(d) + " feature columns, labeled data has " +
                     std::to_string(dimension));
  std::vector<UnlabeledRow> rows;
  rows.reserve(t.size());
  for (std::size_t r = 0; r < t.size(); ++r) {
    UnlabeledRow row{std::vector<double>(d), t.group(r, d)};
    for (std::size_t j = 0; j < d; ++j) row.x[j] = t.number(r, j);
    rows.push_back(std::move(row));
  }
  return UnlabeledDataset(std::move(rows), dimension);
}

inline std::string labeled_csv(const LabeledDataset& data) {
  std::string out = "y";
  for (std::size_t j = 0; j < data.dimension(); ++j) out += ",x" + std::to_string(j + 1);
  out += ",s\n";
  for (const auto& r : data.rows()) {
    out += format_double(r.y);
    for (double x : r.x) out += "," + format_double(x);
    out += "," + std::to_string(r.s) + "\n";
  }
  return out;
}

inline std::string unlabeled_csv(const UnlabeledDataset& data) {
  std::string out;
  for (std::size_t j = 0; j < data.dimension(); ++j) out += (j ? ",x" : "x") + std::to_string(j + 1);
  out += ",s\n";
  for (const auto& r : data.rows()) {
    for (double x : r.x) out += format_double(x) + ",";
    out += std::to_string(r.s) + "\n";
  }
  return out;
}

// ---- model documents ----

inline nlohmann::json distribution_json(const EmpiricalDistribution& d) {
  return {{"values", std::vector<double>(d.values().begin(), d.values().end())},
          {"weights", d.weights()},
          {"cumulative", std::vector<double>(d.cumulative().begin(), d.cumulative().end())}};
}

inline EmpiricalDistribution distribution_from_json(const nlohmann::json& j) {
  return EmpiricalDistribution::from_cumulative(j.at("values").get<std::vector<double>>(),
                                                j.at("cumulative").get<std::vector<double>>());
}

inline nlohmann::json model_json(const FairRegressorModel& model) {
  nlohmann::json estimator;
  if (model.estimator) {
    estimator["kind"] = to_string(model.estimator->kind);
    if (model.estimator->kind == EstimatorKind::knn) estimator["neighbors"] = model.estimator->neighbors;
    else estimator["bins"] = model.estimator->bins;
  } else {
    estimator["kind"] = "precomputed";
  }

  nlohmann::json profile = nlohmann::json::array();
  for (const auto& g : model.profile) {
    auto entry = distribution_json(g.distribution);
    entry["group"] = g.group_id;
    entry["weight"] = g.weight;
    profile.push_back(std::move(entry));
  }

  nlohmann::json segments = nlohmann::json::array();
  for (const auto& seg : model.coupling.segments())
    segments.push_back({{"lo", seg.level_lo}, {"hi", seg.level_hi}, {"values", seg.values},
                        {"barycenter", seg.barycenter_value}});

  return {{"format", "fairot-model"},
          {"version", 1},
          {"seed", model.seed},
          {"estimator", std::move(estimator)},
          {"profile", std::move(profile)},
          {"coupling",
           {{"weights", std::vector<double>(model.coupling.weights().begin(), model.coupling.weights().end())},
            {"segments", std::move(segments)}}},
          {"barycenter", distribution_json(model.barycenter)}};
}

// Loads everything except the in-sample rows and fitted base estimator,
// which are not part of the document.
inline FairRegressorModel model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format") != "fairot-model") throw InputError("not a fairot model document");
    std::vector<GroupDistribution> groups;
    for (const auto& g : j.at("profile"))
      groups.push_back({g.at("group").get<int>(), g.at("weight").get<double>(), distribution_from_json(g)});

    std::vector<CouplingSegment> segments;
    for (const auto& s : j.at("coupling").at("segments"))
      segments.push_back({s.at("lo").get<double>(), s.at("hi").get<double>(),
                          s.at("values").get<std::vector<double>>(), s.at("barycenter").get<double>()});

    std::optional<EstimatorConfig> estimator;
    const auto& e = j.at("estimator");
    const auto kind = e.at("kind").get<std::string>();
    if (kind == "knn") estimator = EstimatorConfig{EstimatorKind::knn, e.at("neighbors").get<std::size_t>(), 0};
    else if (kind == "binned") estimator = EstimatorConfig{EstimatorKind::binned, 0, e.at("bins").get<std::size_t>()};
    else if (kind != "precomputed") throw InputError("unknown estimator kind '" + kind + "'");

    return FairRegressorModel{
        std::nullopt,
        estimator,
        FairnessProfile(std::move(groups)),
        MultimarginalCoupling(std::move(segments), j.at("coupling").at("weights").get<std::vector<double>>()),
        distribution_from_json(j.at("barycenter")),
        j.at("seed").get<std::uint64_t>(),
        {},
        {}};
  } catch (const nlohmann::json::exception& ex) {
    throw InputError(std::string("malformed model document: ") + ex.what());
  }
}

inline FairRegressorModel load_model(const std::filesystem::path& path) {
  try {
    return model_from_json(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::parse_error& ex) {
    throw InputError(path.filename().string() + ": " + ex.what());
  }
}

}  // namespace fairot::io
