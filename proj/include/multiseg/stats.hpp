#pragma once

#include <span>
#include <vector>

namespace multiseg::stats {

/// Consistency constant relating the MAD to the standard deviation of a normal.
inline constexpr double kMadScale = 1.4826;

/// Median of the finite values; NaN when there are none.
double median(std::span<const double> values);

/// Unscaled median absolute deviation around `center`, over finite values.
double mad(std::span<const double> values, double center);

double mean(std::span<const double> values);

/// Population standard deviation of the finite values.
double stddev(std::span<const double> values);

/// Copies the finite values.
std::vector<double> finite(std::span<const double> values);

}  // namespace multiseg::stats
