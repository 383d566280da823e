#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "multiseg/segment_tree.hpp"

namespace multiseg {

struct ScaleDomain {
  double min = 0.0;
  double max = 0.0;
  double midpoint = 0.0;
  bool operator==(const ScaleDomain&) const = default;
};

struct SiblingSimilarity {
  std::string node_id;
  /// Mean DTW distance to the other children of the same parent.
  double d_bar = 0.0;
  ScaleDomain scale_domain;
  std::vector<std::string> dimension_set;
};

/// DTW with steps (i-1,j), (i,j-1), (i-1,j-1). Sequences are row-major with
/// `dims` values per step; the step cost is the L1 distance between rows.
/// With `band`, only cells with |i - j| <= max(band, |n - m|) are admitted.
/// Errors: EmptySequence, InvalidParameter (length not a multiple of dims).
double dtw_distance(std::span<const double> a, std::span<const double> b, std::size_t dims = 1,
                    std::optional<std::size_t> band = std::nullopt);

/// Piecewise aggregate approximation of a row-major sequence to `target` rows.
std::vector<double> paa(std::span<const double> rows, std::size_t dims, std::size_t target);

/// Per-dimension z-normalization of a row-major segment; constant dimensions
/// become zeros and missing values become 0 after normalization.
std::vector<double> znormalize_rows(std::span<const double> rows, std::size_t dims);

struct GuidanceOptions {
  /// Longer segments are reduced by PAA before DTW.
  std::size_t max_points = 2000;
  /// Sibling groups larger than this use a Sakoe-Chiba band of 10% of the longer length.
  std::size_t band_threshold = 64;
  std::size_t threads = 1;
};

/// Sibling similarity for every child of `parent_id`, in child order; empty
/// when the parent has fewer than two children. An empty dimension set
/// selects every non-categorical dimension.
/// Errors: UnknownNode, UnknownDimension, DimensionKindMismatch.
std::vector<SiblingSimilarity> sibling_distances(const SegmentTree& tree, std::string_view parent_id,
                                                 std::vector<std::string> dimension_set = {},
                                                 const GuidanceOptions& options = {});

/// Mean of each row of a symmetric distance matrix, excluding the diagonal.
std::vector<double> mean_sibling_distance(const std::vector<std::vector<double>>& distances);

ScaleDomain scale_domain(std::span<const double> d_bars);

/// Linear map of d_bar onto [0, 1]; a degenerate domain maps to 0.5.
double color_position(double d_bar, const ScaleDomain& domain);

}  // namespace multiseg
