#include <algorithm>
#include <charconv>
#include <deque>
#include <numeric>
#include <unordered_map>

#include "multiseg/series.hpp"

namespace multiseg {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool is_missing_token(std::string_view s) {
  return s.empty() || s == "NA" || s == "NaN" || s == "nan" || s == "null" || s == "NULL";
}

std::optional<double> parse_number(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

/// Streaming tokenizer; fields are views into the input unless they needed
/// unescaping, in which case they live in `arena`.
class Tokenizer {
 public:
  explicit Tokenizer(std::string_view bytes) : data_(bytes) {
    if (data_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
  }

  std::size_t line() const noexcept { return line_; }

  /// Reads one record; returns false at end of input. Blank lines are skipped.
  bool next(std::vector<std::string_view>& fields) {
    fields.clear();
    while (pos_ < data_.size()) {
      if (data_[pos_] == '\n') {
        ++pos_;
        ++line_;
        continue;
      }
      if (data_[pos_] == '\r' && pos_ + 1 < data_.size() && data_[pos_ + 1] == '\n') {
        pos_ += 2;
        ++line_;
        continue;
      }
      break;
    }
    if (pos_ >= data_.size()) return false;
    ++line_;

    while (true) {
      fields.push_back(read_field());
      if (pos_ >= data_.size()) break;
      const char c = data_[pos_];
      if (c == ',') {
        ++pos_;
        if (pos_ >= data_.size()) {
          fields.emplace_back();
          break;
        }
        continue;
      }
      if (c == '\r') ++pos_;
      if (pos_ < data_.size() && data_[pos_] == '\n') ++pos_;
      break;
    }
    return true;
  }

 private:
  std::string_view read_field() {
    if (pos_ < data_.size() && data_[pos_] == '"') {
      ++pos_;
      const std::size_t start = pos_;
      bool escaped = false;
      while (pos_ < data_.size()) {
        if (data_[pos_] == '"') {
          if (pos_ + 1 < data_.size() && data_[pos_ + 1] == '"') {
            escaped = true;
            pos_ += 2;
            continue;
          }
          break;
        }
        if (data_[pos_] == '\n') ++line_;
        ++pos_;
      }
      if (pos_ >= data_.size()) {
        throw Error(ErrorCode::UnparsableValue, "unterminated quoted field",
                    "line " + std::to_string(line_));
      }
      std::string_view raw = data_.substr(start, pos_ - start);
      ++pos_;  // closing quote
      // tolerate trailing spaces before the delimiter
      while (pos_ < data_.size() && data_[pos_] == ' ') ++pos_;
      if (!escaped) return raw;
      std::string unescaped;
      unescaped.reserve(raw.size());
      for (std::size_t i = 0; i < raw.size(); ++i) {
        unescaped.push_back(raw[i]);
        if (raw[i] == '"') ++i;
      }
      return arena_.emplace_back(std::move(unescaped));
    }
    const std::size_t start = pos_;
    while (pos_ < data_.size() && data_[pos_] != ',' && data_[pos_] != '\n' &&
           !(data_[pos_] == '\r' && (pos_ + 1 >= data_.size() || data_[pos_ + 1] == '\n'))) {
      ++pos_;
    }
    return trim(data_.substr(start, pos_ - start));
  }

  std::string_view data_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;
  std::deque<std::string> arena_;
};

std::string location(std::size_t row, std::string_view column) {
  return "row " + std::to_string(row) + ", column " + std::string(column);
}

}  // namespace

std::vector<DimensionKind> detect_dimension_kinds(
    std::span<const std::string> headers,
    std::span<const std::vector<std::string_view>> sample_columns) {
  static const std::vector<std::string> kLatitude = {"lat", "latitude", "location-lat"};
  static const std::vector<std::string> kLongitude = {"long", "lon", "longitude",
                                                      "location-long"};
  std::vector<DimensionKind> kinds;
  kinds.reserve(headers.size());
  for (std::size_t c = 0; c < headers.size(); ++c) {
    const auto name = lower(trim(headers[c]));
    if (std::find(kLatitude.begin(), kLatitude.end(), name) != kLatitude.end()) {
      kinds.push_back(DimensionKind::latitude);
      continue;
    }
    if (std::find(kLongitude.begin(), kLongitude.end(), name) != kLongitude.end()) {
      kinds.push_back(DimensionKind::longitude);
      continue;
    }
    bool categorical = false;
    if (c < sample_columns.size()) {
      for (auto v : sample_columns[c]) {
        if (!is_missing_token(v) && !parse_number(v)) {
          categorical = true;
          break;
        }
      }
    }
    kinds.push_back(categorical ? DimensionKind::categorical : DimensionKind::numeric);
  }
  return kinds;
}

TimeSeries parse_csv(std::string_view bytes, const CsvOptions& options) {
  Tokenizer tokenizer(bytes);
  std::vector<std::string_view> fields;
  if (!tokenizer.next(fields)) {
    throw Error(ErrorCode::MissingTimestampColumn, "empty input: header row required");
  }
  std::vector<std::string> headers(fields.begin(), fields.end());
  const std::size_t ncols = headers.size();

  std::optional<std::size_t> ts_col;
  for (std::size_t c = 0; c < ncols; ++c) {
    if (lower(headers[c]) == "timestamp") {
      ts_col = c;
      break;
    }
  }
  if (!ts_col) {
    throw Error(ErrorCode::MissingTimestampColumn, "no 'timestamp' column in header", "row 0");
  }
  for (std::size_t c = 0; c < ncols; ++c) {
    for (std::size_t d = c + 1; d < ncols; ++d) {
      if (headers[c] == headers[d]) {
        throw Error(ErrorCode::UnparsableValue, "duplicate column name '" + headers[c] + "'",
                    "row 0");
      }
    }
  }

  // Flat field storage, ncols per row; source_rows keeps 1-based data row numbers.
  std::vector<std::string_view> cells;
  std::vector<Timestamp> raw_ts;
  std::size_t row = 0;
  while (tokenizer.next(fields)) {
    ++row;
    if (fields.size() != ncols) {
      throw Error(ErrorCode::RaggedRow,
                  "expected " + std::to_string(ncols) + " fields, found " +
                      std::to_string(fields.size()),
                  "row " + std::to_string(row));
    }
    const auto ts = parse_timestamp(fields[*ts_col]);
    if (!ts) {
      throw Error(ErrorCode::UnparsableValue,
                  "unparsable timestamp '" + std::string(fields[*ts_col]) + "'",
                  location(row, headers[*ts_col]));
    }
    raw_ts.push_back(*ts);
    cells.insert(cells.end(), fields.begin(), fields.end());
  }
  const std::size_t nrows = row;
  if (nrows == 0) {
    throw Error(ErrorCode::InsufficientData, "no data rows");
  }

  std::vector<std::size_t> order(nrows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return raw_ts[a] < raw_ts[b]; });
  std::vector<Timestamp> timestamps(nrows);
  for (std::size_t i = 0; i < nrows; ++i) {
    timestamps[i] = raw_ts[order[i]];
    if (i > 0 && timestamps[i] == timestamps[i - 1]) {
      throw Error(ErrorCode::NonMonotonicAfterSort,
                  "duplicate timestamp " + format_timestamp(timestamps[i]),
                  "rows " + std::to_string(order[i - 1] + 1) + " and " +
                      std::to_string(order[i] + 1));
    }
  }

  // Detection samples the leading rows in timestamp order so the outcome
  // does not depend on the input row order.
  std::vector<std::string> dim_headers;
  std::vector<std::size_t> dim_cols;
  for (std::size_t c = 0; c < ncols; ++c) {
    if (c == *ts_col) continue;
    dim_headers.push_back(headers[c]);
    dim_cols.push_back(c);
  }
  const std::size_t sample = std::min(nrows, options.detection_sample_rows);
  std::vector<std::vector<std::string_view>> samples(dim_cols.size());
  for (std::size_t d = 0; d < dim_cols.size(); ++d) {
    samples[d].reserve(sample);
    for (std::size_t i = 0; i < sample; ++i) {
      samples[d].push_back(cells[order[i] * ncols + dim_cols[d]]);
    }
  }
  auto kinds = detect_dimension_kinds(dim_headers, samples);
  for (std::size_t d = 0; d < dim_cols.size(); ++d) {
    if (auto hint = options.kind_hints.find(dim_headers[d]); hint != options.kind_hints.end()) {
      kinds[d] = hint->second;
    }
  }

  std::vector<Dimension> dimensions;
  dimensions.reserve(dim_cols.size());
  for (std::size_t d = 0; d < dim_cols.size(); ++d) {
    Dimension dim;
    dim.name = dim_headers[d];
    dim.kind = kinds[d];
    const std::size_t col = dim_cols[d];
    if (dim.is_categorical()) {
      std::unordered_map<std::string_view, std::int32_t> table;
      dim.codes.resize(nrows);
      for (std::size_t i = 0; i < nrows; ++i) {
        const auto cell = cells[order[i] * ncols + col];
        if (cell.empty()) {
          dim.codes[i] = kMissingCode;
          continue;
        }
        auto [it, inserted] = table.try_emplace(cell, static_cast<std::int32_t>(table.size()));
        if (inserted) dim.categories.emplace_back(cell);
        dim.codes[i] = it->second;
      }
    } else {
      dim.values.resize(nrows);
      for (std::size_t i = 0; i < nrows; ++i) {
        const auto cell = cells[order[i] * ncols + col];
        if (is_missing_token(cell)) {
          dim.values[i] = kMissing;
          continue;
        }
        const auto value = parse_number(cell);
        if (!value) {
          throw Error(ErrorCode::UnparsableValue,
                      "non-numeric value '" + std::string(cell) + "' in numeric column",
                      location(order[i] + 1, dim.name));
        }
        const double bound = dim.kind == DimensionKind::latitude    ? 90.0
                             : dim.kind == DimensionKind::longitude ? 180.0
                                                                    : 0.0;
        if (bound > 0 && (*value < -bound || *value > bound)) {
          throw Error(ErrorCode::UnparsableValue,
                      std::string(to_string(dim.kind)) + " value out of range",
                      location(order[i] + 1, dim.name));
        }
        dim.values[i] = *value;
      }
    }
    dimensions.push_back(std::move(dim));
  }

  return TimeSeries(std::move(timestamps), std::move(dimensions), options.source_name);
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos &&
      (field.empty() || (field.front() != ' ' && field.back() != ' '))) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::vector<std::vector<std::string>> read_csv_rows(std::string_view bytes) {
  Tokenizer tokenizer(bytes);
  std::vector<std::string_view> fields;
  std::vector<std::vector<std::string>> rows;
  while (tokenizer.next(fields)) rows.emplace_back(fields.begin(), fields.end());
  return rows;
}

std::string serialize_csv(const TimeSeries& series) {
  std::string out = "timestamp";
  for (const auto& dim : series.dimensions()) {
    out += ',';
    out += csv_escape(dim.name);
  }
  out += '\n';
  const auto ts = series.timestamps();
  char buf[64];
  for (std::size_t i = 0; i < series.size(); ++i) {
    out += format_timestamp(ts[i]);
    for (const auto& dim : series.dimensions()) {
      out += ',';
      if (dim.is_categorical()) {
        if (dim.codes[i] != kMissingCode) {
          out += csv_escape(dim.categories[static_cast<std::size_t>(dim.codes[i])]);
        }
      } else if (!is_missing(dim.values[i])) {
        const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, dim.values[i]);
        out.append(buf, ptr);
      }
    }
    out += '\n';
  }
  return out;
}

}  // namespace multiseg
