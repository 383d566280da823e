#include "multiseg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace multiseg::stats {

std::vector<double> finite(std::span<const double> values) {
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) {
    if (std::isfinite(v)) out.push_back(v);
  }
  return out;
}

namespace {

double median_inplace(std::vector<double>& data) {
  if (data.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t mid = data.size() / 2;
  std::nth_element(data.begin(), data.begin() + static_cast<std::ptrdiff_t>(mid), data.end());
  const double upper = data[mid];
  if (data.size() % 2 == 1) return upper;
  const double lower = *std::max_element(data.begin(), data.begin() + static_cast<std::ptrdiff_t>(mid));
  return (lower + upper) / 2.0;
}

}  // namespace

double median(std::span<const double> values) {
  auto data = finite(values);
  return median_inplace(data);
}

double mad(std::span<const double> values, double center) {
  auto data = finite(values);
  for (auto& v : data) v = std::abs(v - center);
  return median_inplace(data);
}

double mean(std::span<const double> values) {
  double sum = 0;
  std::size_t count = 0;
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    sum += v;
    ++count;
  }
  return count == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(count);
}

double stddev(std::span<const double> values) {
  const double m = mean(values);
  double sum = 0;
  std::size_t count = 0;
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    sum += (v - m) * (v - m);
    ++count;
  }
  return count == 0 ? std::numeric_limits<double>::quiet_NaN()
                    : std::sqrt(sum / static_cast<double>(count));
}

}  // namespace multiseg::stats
