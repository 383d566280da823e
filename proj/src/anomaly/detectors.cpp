// Global (MAD, S-H-ESD) and intervention (IO/TC) point-anomaly detectors.

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/students_t.hpp>

#include "multiseg/anomaly.hpp"
#include "multiseg/stats.hpp"

namespace multiseg {

std::string_view to_string(AnomalyType type) noexcept {
  switch (type) {
    case AnomalyType::lof: return "lof";
    case AnomalyType::mad_global: return "mad_global";
    case AnomalyType::shesd: return "shesd";
    case AnomalyType::innovative_outlier: return "innovative_outlier";
    case AnomalyType::temporary_change: return "temporary_change";
  }
  return "lof";
}

std::optional<AnomalyType> parse_anomaly_type(std::string_view name) noexcept {
  for (std::size_t t = 0; t < kAnomalyTypeCount; ++t) {
    const auto type = static_cast<AnomalyType>(t);
    if (to_string(type) == name) return type;
  }
  return std::nullopt;
}

std::vector<PointAnomaly> detect_mad(std::span<const double> values, double c) {
  const auto finite = stats::finite(values);
  if (finite.size() < 3) {
    throw Error(ErrorCode::TooFewPoints,
                "MAD needs at least 3 finite values, got " + std::to_string(finite.size()));
  }
  const double med = stats::median(finite);
  const double scale = stats::kMadScale * stats::mad(finite, med);
  double center = med;
  double spread = scale;
  if (!(spread > 0.0)) {
    center = stats::mean(finite);
    spread = stats::stddev(finite);
  }
  std::vector<PointAnomaly> out;
  if (!(spread > 0.0)) return out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) continue;
    const double z = std::abs(values[i] - center) / spread;
    if (z > c) out.push_back({static_cast<RecordIndex>(i), AnomalyType::mad_global, z});
  }
  return out;
}

std::vector<PointAnomaly> detect_shesd(std::span<const double> values, std::size_t period,
                                       double alpha, double max_anoms) {
  if (period < 1) throw Error(ErrorCode::InvalidParameter, "period must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidParameter, "alpha must be in (0, 1)");
  if (!(max_anoms > 0.0 && max_anoms <= 0.5)) {
    throw Error(ErrorCode::InvalidParameter, "max_anoms must be in (0, 0.5]");
  }
  const std::size_t n_all = values.size();
  if (n_all < 2 * period) {
    throw Error(ErrorCode::PeriodTooLong, "period " + std::to_string(period) + " needs at least " +
                                              std::to_string(2 * period) + " values, got " +
                                              std::to_string(n_all));
  }

  std::vector<double> phase_median(period);
  std::vector<double> bucket;
  for (std::size_t ph = 0; ph < period; ++ph) {
    bucket.clear();
    for (std::size_t i = ph; i < n_all; i += period) bucket.push_back(values[i]);
    phase_median[ph] = stats::median(bucket);
  }
  std::vector<double> residual(n_all, kMissing);
  for (std::size_t i = 0; i < n_all; ++i) {
    if (std::isfinite(values[i])) residual[i] = values[i] - phase_median[i % period];
  }
  const double global = stats::median(residual);
  std::vector<std::size_t> live;
  for (std::size_t i = 0; i < n_all; ++i) {
    if (std::isfinite(residual[i])) {
      residual[i] -= global;
      live.push_back(i);
    }
  }

  const std::size_t n = live.size();
  const std::size_t cap =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(max_anoms * static_cast<double>(n))));
  std::vector<PointAnomaly> removed;
  std::size_t accepted = 0;
  std::vector<double> current;
  for (std::size_t i = 1; i <= cap && n >= i + 2; ++i) {
    current.clear();
    for (const auto idx : live) current.push_back(residual[idx]);
    const double med = stats::median(current);
    const double scale = stats::kMadScale * stats::mad(current, med);
    std::size_t worst = 0;
    double worst_dev = -1.0;
    for (std::size_t j = 0; j < live.size(); ++j) {
      const double dev = std::abs(residual[live[j]] - med);
      if (dev > worst_dev) {
        worst_dev = dev;
        worst = j;
      }
    }
    if (!(worst_dev > 0.0)) break;
    const double r = scale > 0.0 ? worst_dev / scale : std::numeric_limits<double>::infinity();

    const auto ni = static_cast<double>(n - i);
    const boost::math::students_t dist(ni - 1.0);
    const double p = 1.0 - alpha / (2.0 * (ni + 1.0));
    const double t = boost::math::quantile(dist, p);
    const double lambda = ni * t / std::sqrt((ni - 1.0 + t * t) * (ni + 1.0));

    removed.push_back({static_cast<RecordIndex>(live[worst]), AnomalyType::shesd, r});
    live.erase(live.begin() + static_cast<std::ptrdiff_t>(worst));
    if (r > lambda) accepted = i;
  }
  removed.resize(accepted);
  std::sort(removed.begin(), removed.end(),
            [](const PointAnomaly& a, const PointAnomaly& b) { return a.index < b.index; });
  return removed;
}

std::vector<PointAnomaly> detect_io_tc(std::span<const double> values, double delta,
                                       double threshold) {
  const std::size_t n = values.size();
  if (n < 10) {
    throw Error(ErrorCode::TooFewPoints, "IO/TC needs at least 10 values, got " + std::to_string(n));
  }
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::InvalidParameter, "delta must be in (0, 1)");

  // Missing values carry the previous observation forward (leading ones the first).
  std::vector<double> x(values.begin(), values.end());
  std::vector<bool> observed(n);
  double last = kMissing;
  for (std::size_t i = 0; i < n; ++i) {
    observed[i] = std::isfinite(x[i]);
    if (observed[i] && !std::isfinite(last)) last = x[i];
  }
  if (!std::isfinite(last)) return {};
  for (std::size_t i = 0; i < n; ++i) {
    if (observed[i]) last = x[i];
    else x[i] = last;
  }

  const double mu = stats::mean(x);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t t = 1; t < n; ++t) {
    num += (x[t] - mu) * (x[t - 1] - mu);
    den += (x[t - 1] - mu) * (x[t - 1] - mu);
  }
  const double phi = den > 0.0 ? std::clamp(num / den, -0.99, 0.99) : 0.0;
  std::vector<double> e(n, 0.0);
  for (std::size_t t = 1; t < n; ++t) e[t] = (x[t] - mu) - phi * (x[t - 1] - mu);

  const std::vector<double> fit(e.begin() + 1, e.end());
  double sigma = stats::kMadScale * stats::mad(fit, stats::median(fit));
  if (!(sigma > 0.0)) sigma = stats::stddev(fit);
  if (!(sigma > 0.0)) return {};

  // Residual signature of a temporary change: 1, delta - phi, (delta - phi) delta, ...
  std::vector<double> z(n);
  z[0] = 1.0;
  for (std::size_t j = 1; j < n; ++j) z[j] = j == 1 ? delta - phi : z[j - 1] * delta;

  std::vector<PointAnomaly> out;
  std::vector<bool> flagged(n, false);
  for (std::size_t round = 0; round < n; ++round) {
    double best = threshold;
    std::size_t best_t = 0;
    bool best_tc = false;
    double best_omega = 0.0;
    for (std::size_t t = 1; t < n; ++t) {
      if (!observed[t] || flagged[t]) continue;
      const double tau_io = e[t] / sigma;
      double ez = 0.0;
      double zz = 0.0;
      for (std::size_t j = 0; t + j < n; ++j) {
        if (std::abs(z[j]) < 1e-12 && j > 1) break;
        ez += e[t + j] * z[j];
        zz += z[j] * z[j];
      }
      const double omega_tc = ez / zz;
      const double tau_tc = omega_tc * std::sqrt(zz) / sigma;
      if (std::abs(tau_io) > best && std::abs(tau_io) >= std::abs(tau_tc)) {
        best = std::abs(tau_io);
        best_t = t;
        best_tc = false;
        best_omega = e[t];
      } else if (std::abs(tau_tc) > best && std::abs(tau_tc) > std::abs(tau_io)) {
        best = std::abs(tau_tc);
        best_t = t;
        best_tc = true;
        best_omega = omega_tc;
      }
    }
    if (best_t == 0) break;
    flagged[best_t] = true;
    if (best_tc) {
      for (std::size_t j = 0; best_t + j < n; ++j) e[best_t + j] -= best_omega * z[j];
      out.push_back({static_cast<RecordIndex>(best_t), AnomalyType::temporary_change, best});
    } else {
      e[best_t] = 0.0;
      out.push_back({static_cast<RecordIndex>(best_t), AnomalyType::innovative_outlier, best});
    }
  }
  std::sort(out.begin(), out.end(),
            [](const PointAnomaly& a, const PointAnomaly& b) { return a.index < b.index; });
  return out;
}

}  // namespace multiseg
