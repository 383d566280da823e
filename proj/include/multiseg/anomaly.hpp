#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "multiseg/series.hpp"

namespace multiseg {

enum class AnomalyType { lof, mad_global, shesd, innovative_outlier, temporary_change };
inline constexpr std::size_t kAnomalyTypeCount = 5;

std::string_view to_string(AnomalyType type) noexcept;
std::optional<AnomalyType> parse_anomaly_type(std::string_view name) noexcept;

struct PointAnomaly {
  /// 0-based position for the detectors, global record index from analyze_segment.
  RecordIndex index = 0;
  AnomalyType type = AnomalyType::lof;
  double score = 0.0;
  bool operator==(const PointAnomaly&) const = default;
};

// Detectors over one segment's values. Missing values are never flagged.

/// LOF scores for row-major points with `dims` coordinates (Euclidean
/// distance, k-distance neighbourhoods including ties). Missing rows score NaN.
/// Errors: TooFewPoints when fewer than k + 1 complete rows.
std::vector<double> lof_scores(std::span<const double> rows, std::size_t dims, int k);

/// Flags LOF > threshold. Errors: TooFewPoints, InvalidParameter (k < 1).
std::vector<PointAnomaly> detect_lof(std::span<const double> values, int k, double threshold = 1.5,
                                     std::size_t dims = 1);

/// Robust z |x - median| / (1.4826 MAD) > c; with MAD = 0 the z-score
/// |x - mean| / sd is used; nothing is flagged when both are zero.
/// Errors: TooFewPoints (fewer than 3 finite values).
std::vector<PointAnomaly> detect_mad(std::span<const double> values, double c = 3.0);

/// Per-phase median removal then generalized ESD with median/MAD statistics,
/// at most max(1, floor(max_anoms * n)) flags. Errors: PeriodTooLong, InvalidParameter.
std::vector<PointAnomaly> detect_shesd(std::span<const double> values, std::size_t period,
                                       double alpha = 0.05, double max_anoms = 0.02);

/// AR(1) innovative-outlier / temporary-change scoring with iterative effect
/// removal. Errors: TooFewPoints (length < 10).
std::vector<PointAnomaly> detect_io_tc(std::span<const double> values, double delta = 0.7,
                                       double threshold = 4.0);

enum class Normalization { absolute, per_bin_percent, per_type_percent };

std::string_view to_string(Normalization n) noexcept;
std::optional<Normalization> parse_normalization(std::string_view name) noexcept;

struct AnomalyHistogram {
  std::size_t bin_count = 1;
  /// counts[bin][type], indexed by AnomalyType.
  std::vector<std::array<double, kAnomalyTypeCount>> counts;
  Normalization normalization = Normalization::absolute;
};

/// Equal-width index bins over `segment`; anomalies outside it are ignored.
/// Errors: InvalidParameter (bin_count < 1).
AnomalyHistogram aggregate(std::span<const PointAnomaly> anomalies, IndexInterval segment,
                           std::size_t bin_count, Normalization normalization);

/// Counts per seventh of the segment.
std::array<std::size_t, 7> density_overlay(std::span<const PointAnomaly> anomalies,
                                           IndexInterval segment);

/// Index of the equal-width bin holding `index`.
std::size_t bin_of(RecordIndex index, IndexInterval segment, std::size_t bin_count) noexcept;

struct DetectorParams {
  int lof_k = 10;
  double lof_threshold = 1.5;
  double mad_c = 3.0;
  /// Estimated from the periodogram when absent.
  std::optional<std::size_t> shesd_period;
  double shesd_alpha = 0.05;
  double shesd_max_anoms = 0.02;
  double io_tc_delta = 0.7;
  double io_tc_threshold = 4.0;
  std::size_t bin_count = 10;
  Normalization normalization = Normalization::absolute;
};

/// Detector names: "lof", "mad", "shesd", "io_tc".
enum class Detector { lof, mad, shesd, io_tc };
std::string_view to_string(Detector d) noexcept;
/// Errors: InvalidParameter for an unknown name.
Detector parse_detector(std::string_view name);
std::set<Detector> all_detectors();

struct SegmentAnalysis {
  IndexInterval interval;
  std::string dimension;
  std::vector<double> values;
  /// Global record indices, sorted by (index, type).
  std::vector<PointAnomaly> anomalies;
  AnomalyHistogram histogram;
  std::array<std::size_t, 7> density{};
  /// Detectors that could not run on this segment.
  std::vector<std::string> warnings;
};

/// Runs the detectors on one numeric dimension of a segment.
/// Errors: UnknownDimension, DimensionKindMismatch, IntervalOutOfBounds.
SegmentAnalysis analyze_segment(const TimeSeries& series, IndexInterval interval,
                                const std::string& dimension, const std::set<Detector>& detectors,
                                const DetectorParams& params = {});

}  // namespace multiseg
