#include <algorithm>
#include <cmath>

#include "multiseg/anomaly.hpp"
#include "multiseg/technique.hpp"

namespace multiseg {

std::string_view to_string(Normalization n) noexcept {
  switch (n) {
    case Normalization::absolute: return "absolute";
    case Normalization::per_bin_percent: return "per_bin_percent";
    case Normalization::per_type_percent: return "per_type_percent";
  }
  return "absolute";
}

std::optional<Normalization> parse_normalization(std::string_view name) noexcept {
  for (auto n : {Normalization::absolute, Normalization::per_bin_percent, Normalization::per_type_percent}) {
    if (to_string(n) == name) return n;
  }
  return std::nullopt;
}

std::string_view to_string(Detector d) noexcept {
  switch (d) {
    case Detector::lof: return "lof";
    case Detector::mad: return "mad";
    case Detector::shesd: return "shesd";
    case Detector::io_tc: return "io_tc";
  }
  return "lof";
}

Detector parse_detector(std::string_view name) {
  for (auto d : all_detectors()) {
    if (to_string(d) == name) return d;
  }
  throw Error(ErrorCode::InvalidParameter, "unknown detector '" + std::string(name) + "'");
}

std::set<Detector> all_detectors() {
  return {Detector::lof, Detector::mad, Detector::shesd, Detector::io_tc};
}

std::size_t bin_of(RecordIndex index, IndexInterval segment, std::size_t bin_count) noexcept {
  const auto offset = static_cast<std::size_t>(index - segment.from);
  const auto length = static_cast<std::size_t>(segment.length());
  return std::min(bin_count - 1, offset * bin_count / length);
}

AnomalyHistogram aggregate(std::span<const PointAnomaly> anomalies, IndexInterval segment,
                           std::size_t bin_count, Normalization normalization) {
  if (bin_count < 1) throw Error(ErrorCode::InvalidParameter, "bin_count must be >= 1");
  AnomalyHistogram h;
  h.bin_count = bin_count;
  h.normalization = normalization;
  h.counts.assign(bin_count, {});
  for (const auto& a : anomalies) {
    if (a.index < segment.from || a.index > segment.to) continue;
    h.counts[bin_of(a.index, segment, bin_count)][static_cast<std::size_t>(a.type)] += 1.0;
  }
  if (normalization == Normalization::per_bin_percent) {
    for (auto& row : h.counts) {
      double sum = 0.0;
      for (double c : row) sum += c;
      if (sum > 0.0) {
        for (double& c : row) c = 100.0 * c / sum;
      }
    }
  } else if (normalization == Normalization::per_type_percent) {
    for (std::size_t t = 0; t < kAnomalyTypeCount; ++t) {
      double sum = 0.0;
      for (const auto& row : h.counts) sum += row[t];
      if (sum > 0.0) {
        for (auto& row : h.counts) row[t] = 100.0 * row[t] / sum;
      }
    }
  }
  return h;
}

std::array<std::size_t, 7> density_overlay(std::span<const PointAnomaly> anomalies,
                                           IndexInterval segment) {
  std::array<std::size_t, 7> out{};
  for (const auto& a : anomalies) {
    if (a.index < segment.from || a.index > segment.to) continue;
    ++out[bin_of(a.index, segment, out.size())];
  }
  return out;
}

namespace {

std::size_t estimate_period(std::span<const double> v) {
  const auto power = periodogram(v);
  std::size_t best = 0;
  for (std::size_t k = 2; k < power.size(); ++k) {
    if (best == 0 || power[k] > power[best]) best = k;
  }
  if (best == 0) return 0;
  return static_cast<std::size_t>(std::lround(static_cast<double>(v.size()) / static_cast<double>(best)));
}

}  // namespace

SegmentAnalysis analyze_segment(const TimeSeries& series, IndexInterval interval,
                                const std::string& dimension, const std::set<Detector>& detectors,
                                const DetectorParams& params) {
  const auto& dim = series.dimension(dimension);
  if (dim.is_categorical()) {
    throw Error(ErrorCode::DimensionKindMismatch, "dimension '" + dimension + "' is categorical");
  }
  const auto view = series.view(interval);
  SegmentAnalysis out;
  out.interval = interval;
  out.dimension = dimension;
  const auto v = view.values(dim);
  out.values.assign(v.begin(), v.end());

  const auto run = [&](Detector d, auto&& fn) {
    if (!detectors.contains(d)) return;
    try {
      for (auto a : fn()) {
        a.index = view.global_index(a.index + 1);
        out.anomalies.push_back(a);
      }
    } catch (const Error& e) {
      out.warnings.push_back(std::string(to_string(d)) + ": " + e.what());
    }
  };
  run(Detector::lof, [&] { return detect_lof(v, params.lof_k, params.lof_threshold); });
  run(Detector::mad, [&] { return detect_mad(v, params.mad_c); });
  run(Detector::shesd, [&] {
    std::size_t period = params.shesd_period.value_or(0);
    if (period == 0) {
      if (v.size() < 4) throw Error(ErrorCode::TooFewPoints, "too short to estimate a period");
      period = estimate_period(v);
    }
    return detect_shesd(v, std::max<std::size_t>(1, period), params.shesd_alpha, params.shesd_max_anoms);
  });
  run(Detector::io_tc, [&] { return detect_io_tc(v, params.io_tc_delta, params.io_tc_threshold); });

  std::sort(out.anomalies.begin(), out.anomalies.end(), [](const PointAnomaly& a, const PointAnomaly& b) {
    return a.index != b.index ? a.index < b.index : a.type < b.type;
  });
  out.histogram = aggregate(out.anomalies, interval, params.bin_count, params.normalization);
  out.density = density_overlay(out.anomalies, interval);
  return out;
}

}  // namespace multiseg
