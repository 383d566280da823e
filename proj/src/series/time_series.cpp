#include <algorithm>

#include "multiseg/series.hpp"

namespace multiseg {

std::string_view to_string(DimensionKind kind) noexcept {
  switch (kind) {
    case DimensionKind::numeric: return "numeric";
    case DimensionKind::categorical: return "categorical";
    case DimensionKind::latitude: return "latitude";
    case DimensionKind::longitude: return "longitude";
  }
  return "numeric";
}

std::optional<DimensionKind> parse_dimension_kind(std::string_view text) noexcept {
  if (text == "numeric") return DimensionKind::numeric;
  if (text == "categorical") return DimensionKind::categorical;
  if (text == "latitude") return DimensionKind::latitude;
  if (text == "longitude") return DimensionKind::longitude;
  return std::nullopt;
}

bool Dimension::operator==(const Dimension& other) const {
  if (name != other.name || kind != other.kind) return false;
  if (is_categorical()) {
    return codes == other.codes && categories == other.categories;
  }
  if (values.size() != other.values.size()) return false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const bool ma = is_missing(values[i]);
    const bool mb = is_missing(other.values[i]);
    if (ma != mb || (!ma && values[i] != other.values[i])) return false;
  }
  return true;
}

TimeSeries::TimeSeries(std::vector<Timestamp> timestamps, std::vector<Dimension> dimensions,
                       std::string source_name)
    : timestamps_(std::move(timestamps)),
      dimensions_(std::move(dimensions)),
      source_name_(std::move(source_name)) {
  if (timestamps_.empty()) {
    throw Error(ErrorCode::InsufficientData, "a time series needs at least one record");
  }
  for (std::size_t i = 1; i < timestamps_.size(); ++i) {
    if (timestamps_[i - 1] >= timestamps_[i]) {
      throw Error(ErrorCode::NonMonotonicAfterSort,
                  "timestamps must be strictly increasing",
                  "record " + std::to_string(i + 1));
    }
  }
  for (const auto& dim : dimensions_) {
    if (dim.size() != timestamps_.size()) {
      throw Error(ErrorCode::RaggedRow,
                  "dimension '" + dim.name + "' has " + std::to_string(dim.size()) +
                      " values for " + std::to_string(timestamps_.size()) + " timestamps");
    }
    if (dim.is_categorical()) {
      const auto table = static_cast<std::int32_t>(dim.categories.size());
      for (auto c : dim.codes) {
        if (c != kMissingCode && (c < 0 || c >= table)) {
          throw Error(ErrorCode::UnparsableValue,
                      "categorical code outside the code table of '" + dim.name + "'");
        }
      }
    } else if (dim.kind == DimensionKind::latitude || dim.kind == DimensionKind::longitude) {
      const double bound = dim.kind == DimensionKind::latitude ? 90.0 : 180.0;
      for (std::size_t i = 0; i < dim.values.size(); ++i) {
        const double v = dim.values[i];
        if (!is_missing(v) && (v < -bound || v > bound)) {
          throw Error(ErrorCode::UnparsableValue,
                      std::string(to_string(dim.kind)) + " value out of range",
                      "record " + std::to_string(i + 1) + ", column " + dim.name);
        }
      }
    }
  }
}

const Dimension* TimeSeries::find(std::string_view name) const noexcept {
  for (const auto& dim : dimensions_) {
    if (dim.name == name) return &dim;
  }
  return nullptr;
}

const Dimension& TimeSeries::dimension(std::string_view name) const {
  if (const auto* dim = find(name)) return *dim;
  throw Error(ErrorCode::UnknownDimension, "unknown dimension '" + std::string(name) + "'");
}

const Dimension* TimeSeries::first_of_kind(DimensionKind kind) const noexcept {
  for (const auto& dim : dimensions_) {
    if (dim.kind == kind) return &dim;
  }
  return nullptr;
}

SeriesView TimeSeries::view(IndexInterval interval) const { return SeriesView(*this, interval); }
SeriesView TimeSeries::view() const { return SeriesView(*this, full()); }

bool TimeSeries::operator==(const TimeSeries& other) const {
  return timestamps_ == other.timestamps_ && dimensions_ == other.dimensions_;
}

SeriesView::SeriesView(const TimeSeries& series, IndexInterval interval)
    : series_(&series), interval_(interval) {
  const auto n = static_cast<RecordIndex>(series.size());
  if (interval.from < 1 || interval.from > interval.to || interval.to > n) {
    throw Error(ErrorCode::IntervalOutOfBounds,
                "interval [" + std::to_string(interval.from) + ", " +
                    std::to_string(interval.to) + "] outside [1, " + std::to_string(n) + "]");
  }
}

std::span<const Timestamp> SeriesView::timestamps() const noexcept {
  return series_->timestamps().subspan(static_cast<std::size_t>(interval_.from - 1), size());
}

std::span<const double> SeriesView::values(const Dimension& dim) const noexcept {
  return std::span<const double>(dim.values).subspan(static_cast<std::size_t>(interval_.from - 1),
                                                     size());
}

std::span<const std::int32_t> SeriesView::codes(const Dimension& dim) const noexcept {
  return std::span<const std::int32_t>(dim.codes)
      .subspan(static_cast<std::size_t>(interval_.from - 1), size());
}

}  // namespace multiseg
