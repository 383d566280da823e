#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "multiseg/series.hpp"
#include "multiseg/split_index_list.hpp"

namespace multiseg {

// Technique parameters -------------------------------------------------------

/// Split after record i when dt_i = t[i+1] - t[i] is anomalous:
/// (dt_i - median) / (1.4826 MAD) > factor, or dt_i > factor * median when MAD = 0.
struct TemporalGaps {
  double factor = 10.0;
  bool operator==(const TemporalGaps&) const = default;
};

enum class BinMode { count, duration, calendar };
enum class CalendarUnit { day, week, month };

struct Bins {
  BinMode mode = BinMode::count;
  std::int64_t width = 1;  // records (count) or milliseconds (duration)
  CalendarUnit unit = CalendarUnit::day;
  bool operator==(const Bins&) const = default;
};

enum class ChangePointMode { fixed_k, penalty };

struct ChangePoints {
  std::string dimension;
  ChangePointMode mode = ChangePointMode::fixed_k;
  int k = 1;
  double penalty = 0.0;
  bool operator==(const ChangePoints&) const = default;
};

struct ValueRange {
  std::string dimension;
  double min = 0.0;
  double max = 0.0;
  bool operator==(const ValueRange&) const = default;
};

struct CategoricalChange {
  std::string dimension;
  bool operator==(const CategoricalChange&) const = default;
};

struct Seasonality {
  std::string dimension;
  int min_cycles = 2;
  bool operator==(const Seasonality&) const = default;
};

struct MotifRepresentatives {
  std::string dimension;
  int length = 8;
  int top_k = 1;
  bool operator==(const MotifRepresentatives&) const = default;
};

struct PatternMatches {
  std::string dimension;
  std::vector<double> pattern;
  double threshold = 0.0;
  bool operator==(const PatternMatches&) const = default;
};

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;
  bool operator==(const GeoPoint&) const = default;
};

struct GeoArea {
  std::vector<GeoPoint> polygon;
  bool operator==(const GeoArea&) const = default;
};

struct DensityClusters {
  double eps_meters = 50.0;
  int min_pts = 5;
  bool operator==(const DensityClusters&) const = default;
};

struct FptMinima {
  double radius_meters = 100.0;
  double prominence_seconds = 0.0;
  bool operator==(const FptMinima&) const = default;
};

using TechniqueSpec =
    std::variant<TemporalGaps, Bins, ChangePoints, ValueRange, CategoricalChange, Seasonality,
                 MotifRepresentatives, PatternMatches, GeoArea, DensityClusters, FptMinima>;

/// Wire name, e.g. "value_range".
std::string technique_name(const TechniqueSpec& spec);

/// Compact human-readable descriptor used as the technique tag of tree nodes.
std::string describe(const TechniqueSpec& spec);

/// Parameter range checks independent of any series.
void validate(const TechniqueSpec& spec);

/// Dimension existence and kind checks against a concrete series.
void check_compatible(const TechniqueSpec& spec, const TimeSeries& series);

/// Parses `{"type": ..., "params": {...}}`. Errors carry the JSON path.
TechniqueSpec technique_from_json(const nlohmann::json& node, const std::string& path);
nlohmann::json technique_to_json(const TechniqueSpec& spec);

// Application ----------------------------------------------------------------

/// Applies one technique to [from, to]. Throws InsufficientData when the
/// range is too short for the technique.
SplitIndexList compute_split_indices(const TechniqueSpec& spec, const TimeSeries& series,
                                     RecordIndex from, RecordIndex to);

/// As compute_split_indices, but InsufficientData degrades to [0, L] and a
/// message is appended to `warnings` (when given).
SplitIndexList get_split_indices(const TechniqueSpec& spec, const TimeSeries& series,
                                 RecordIndex from, RecordIndex to,
                                 std::vector<std::string>* warnings = nullptr);

/// Labels attached automatically to a child segment produced by `spec`
/// (e.g. "inside value range [a, b]"); empty when nothing applies.
std::vector<std::string> automatic_labels(const TechniqueSpec& spec, const SeriesView& child);

// Building blocks exposed for direct use and testing -------------------------

namespace techniques {

SplitIndexList temporal_gaps(std::span<const Timestamp> t, const TemporalGaps& spec);
SplitIndexList bins(std::span<const Timestamp> t, const Bins& spec);
SplitIndexList value_range(std::span<const double> v, const ValueRange& spec);
SplitIndexList categorical_change(std::span<const std::int32_t> codes);
SplitIndexList change_points(std::span<const double> v, const ChangePoints& spec);
SplitIndexList seasonality(std::span<const double> v, const Seasonality& spec);
SplitIndexList motifs(std::span<const double> v, const MotifRepresentatives& spec);
SplitIndexList pattern_matches(std::span<const double> v, const PatternMatches& spec);
SplitIndexList geo_area(std::span<const double> lat, std::span<const double> lon,
                        const GeoArea& spec);
SplitIndexList density_clusters(std::span<const double> lat, std::span<const double> lon,
                                const DensityClusters& spec);
SplitIndexList fpt_minima(std::span<const Timestamp> t, std::span<const double> lat,
                          std::span<const double> lon, const FptMinima& spec);

/// Interior splits before every change in `labels` (split i between records i and i+1).
SplitIndexList label_transitions(std::span<const std::int64_t> labels);

}  // namespace techniques

// Numerical helpers ----------------------------------------------------------

inline constexpr double kEarthRadiusMeters = 6'371'000.0;

double haversine_meters(GeoPoint a, GeoPoint b) noexcept;

/// Ray casting; points on an edge or vertex count as inside.
bool point_in_polygon(GeoPoint p, std::span<const GeoPoint> polygon) noexcept;

/// Total L2 cost of the partition given by padded split indices; missing
/// values are skipped.
double l2_partition_cost(std::span<const double> v, std::span<const std::int64_t> splits);

/// Exact optimal partition with `k` change points (dynamic programming).
std::vector<std::int64_t> optimal_partition(std::span<const double> v, int k);
/// Greedy binary segmentation with `k` change points.
std::vector<std::int64_t> binary_segmentation(std::span<const double> v, int k);
/// PELT with additive penalty per change point.
std::vector<std::int64_t> pelt(std::span<const double> v, double penalty);

/// Mean-removed periodogram power for frequency bins 0..L/2 (missing -> mean).
std::vector<double> periodogram(std::span<const double> v);

/// Z-normalized matrix profile (nearest neighbour distance and index per
/// window start, 0-based). Windows with missing values get +inf.
struct MatrixProfile {
  std::vector<double> distance;
  std::vector<std::int64_t> index;
};
MatrixProfile matrix_profile(std::span<const double> v, int window, int exclusion_zone);

/// Z-normalized Euclidean distance following the constant-window convention
/// (0 between two constant windows, +inf between constant and non-constant).
double znorm_distance(std::span<const double> a, std::span<const double> b);

/// DBSCAN labels (cluster id >= 0, noise = -1) under the haversine metric.
std::vector<std::int64_t> dbscan_labels(std::span<const double> lat, std::span<const double> lon,
                                        double eps_meters, int min_pts);

/// Forward first-passage time in seconds; NaN where the circle is never left.
std::vector<double> first_passage_times(std::span<const Timestamp> t, std::span<const double> lat,
                                        std::span<const double> lon, double radius_meters);

}  // namespace multiseg
