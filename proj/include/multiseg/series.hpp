#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "multiseg/error.hpp"

namespace multiseg {

/// Milliseconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

/// 1-based record index as used in every external contract.
using RecordIndex = std::int64_t;

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) noexcept { return std::isnan(v); }

inline constexpr std::int32_t kMissingCode = -1;

enum class DimensionKind { numeric, categorical, latitude, longitude };

std::string_view to_string(DimensionKind kind) noexcept;
std::optional<DimensionKind> parse_dimension_kind(std::string_view text) noexcept;

/// One column of a series. Numeric, latitude and longitude columns use
/// `values` (NaN marks a missing value); categorical columns use `codes`
/// into `categories` (kMissingCode marks a missing value).
struct Dimension {
  std::string name;
  DimensionKind kind = DimensionKind::numeric;
  std::vector<double> values;
  std::vector<std::int32_t> codes;
  std::vector<std::string> categories;

  bool is_categorical() const noexcept { return kind == DimensionKind::categorical; }
  std::size_t size() const noexcept { return is_categorical() ? codes.size() : values.size(); }

  bool operator==(const Dimension& other) const;
};

struct IndexInterval {
  RecordIndex from = 1;
  RecordIndex to = 1;

  RecordIndex length() const noexcept { return to - from + 1; }
  bool operator==(const IndexInterval&) const = default;
};

class SeriesView;

/// Immutable time series: strictly increasing timestamps plus aligned
/// dimensions. Construction validates every invariant.
class TimeSeries {
 public:
  TimeSeries(std::vector<Timestamp> timestamps, std::vector<Dimension> dimensions,
             std::string source_name = {});

  std::size_t size() const noexcept { return timestamps_.size(); }
  std::span<const Timestamp> timestamps() const noexcept { return timestamps_; }
  const std::vector<Dimension>& dimensions() const noexcept { return dimensions_; }
  const std::string& source_name() const noexcept { return source_name_; }

  const Dimension* find(std::string_view name) const noexcept;
  const Dimension& dimension(std::string_view name) const;  // throws UnknownDimension
  const Dimension* first_of_kind(DimensionKind kind) const noexcept;

  IndexInterval full() const noexcept { return {1, static_cast<RecordIndex>(size())}; }
  SeriesView view(IndexInterval interval) const;
  SeriesView view() const;

  bool operator==(const TimeSeries& other) const;

 private:
  std::vector<Timestamp> timestamps_;
  std::vector<Dimension> dimensions_;
  std::string source_name_;
};

/// Zero-copy read-only window over [from, to] of a TimeSeries.
/// Local positions are 1..length(); the span accessors are 0-based.
class SeriesView {
 public:
  SeriesView(const TimeSeries& series, IndexInterval interval);

  const TimeSeries& series() const noexcept { return *series_; }
  IndexInterval interval() const noexcept { return interval_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(interval_.length()); }

  RecordIndex global_index(RecordIndex local) const noexcept { return interval_.from + local - 1; }

  std::span<const Timestamp> timestamps() const noexcept;
  std::span<const double> values(const Dimension& dim) const noexcept;
  std::span<const std::int32_t> codes(const Dimension& dim) const noexcept;

 private:
  const TimeSeries* series_;
  IndexInterval interval_;
};

// Timestamps ----------------------------------------------------------------

/// Accepts `YYYY-MM-DDTHH:MM:SS[.fff]Z` (also with a space separator and/or
/// without the trailing Z, read as UTC) or an integer of epoch milliseconds.
std::optional<Timestamp> parse_timestamp(std::string_view text) noexcept;

/// `YYYY-MM-DDTHH:MM:SS.sssZ`
std::string format_timestamp(Timestamp ms);

// CSV ingestion -------------------------------------------------------------

struct CsvOptions {
  /// Forces the kind of a column by header name; overrides detection.
  std::map<std::string, DimensionKind> kind_hints;
  /// Number of leading rows inspected when detecting categorical columns.
  std::size_t detection_sample_rows = 1000;
  std::string source_name;
};

/// Kind detection from headers and sample content. `sample_columns[c]` holds
/// the sampled raw strings of column c (may be empty).
std::vector<DimensionKind> detect_dimension_kinds(
    std::span<const std::string> headers,
    std::span<const std::vector<std::string_view>> sample_columns);

TimeSeries parse_csv(std::string_view bytes, const CsvOptions& options = {});

/// Writes the series back as CSV: `timestamp` first, then every dimension.
std::string serialize_csv(const TimeSeries& series);

/// RFC 4180 field quoting when needed.
std::string csv_escape(std::string_view field);

/// Splits one CSV document into rows of unescaped fields.
std::vector<std::vector<std::string>> read_csv_rows(std::string_view bytes);

}  // namespace multiseg
