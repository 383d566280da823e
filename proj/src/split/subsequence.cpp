// Periodogram seasonality, matrix-profile motifs and z-normalized pattern search.

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>

#include <fftw3.h>

#include "multiseg/stats.hpp"
#include "multiseg/technique.hpp"

namespace multiseg {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// FFTW's planner is not re-entrant; execution of distinct plans is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

bool is_constant(double var, double mean_square) {
  return var <= 1e-12 * mean_square || var <= 0.0;
}

/// Sliding-window mean/variance over centered data plus a missing-value mask.
struct WindowStats {
  std::vector<double> mean;
  std::vector<double> sd;  // 0 for constant windows
  std::vector<bool> valid;
  std::vector<double> data;  // centered, missing -> 0

  WindowStats(std::span<const double> v, std::size_t m) {
    double center = stats::mean(v);
    if (!std::isfinite(center)) center = 0;
    data.resize(v.size());
    std::vector<double> s1(v.size() + 1, 0.0), s2(v.size() + 1, 0.0);
    std::vector<std::size_t> bad(v.size() + 1, 0);
    for (std::size_t i = 0; i < v.size(); ++i) {
      const bool ok = std::isfinite(v[i]);
      data[i] = ok ? v[i] - center : 0.0;
      s1[i + 1] = s1[i] + data[i];
      s2[i + 1] = s2[i] + data[i] * data[i];
      bad[i + 1] = bad[i] + (ok ? 0 : 1);
    }
    const std::size_t windows = v.size() - m + 1;
    mean.resize(windows);
    sd.resize(windows);
    valid.resize(windows);
    const auto dm = static_cast<double>(m);
    for (std::size_t i = 0; i < windows; ++i) {
      valid[i] = bad[i + m] == bad[i];
      mean[i] = (s1[i + m] - s1[i]) / dm;
      const double ms = (s2[i + m] - s2[i]) / dm;
      const double var = ms - mean[i] * mean[i];
      sd[i] = is_constant(var, ms) ? 0.0 : std::sqrt(var);
    }
  }
};

double window_distance(const WindowStats& w, std::size_t i, std::size_t j, double dot, double m) {
  if (!w.valid[i] || !w.valid[j]) return kInf;
  const bool ci = w.sd[i] == 0.0;
  const bool cj = w.sd[j] == 0.0;
  if (ci && cj) return 0.0;
  if (ci || cj) return kInf;
  const double corr = (dot - m * w.mean[i] * w.mean[j]) / (m * w.sd[i] * w.sd[j]);
  return std::sqrt(std::max(0.0, 2.0 * m * (1.0 - std::min(1.0, corr))));
}

}  // namespace

std::vector<double> periodogram(std::span<const double> v) {
  const std::size_t n = v.size();
  double center = stats::mean(v);
  if (!std::isfinite(center)) center = 0;
  std::vector<double> in(n);
  for (std::size_t i = 0; i < n; ++i) in[i] = std::isfinite(v[i]) ? v[i] - center : 0.0;
  const std::size_t bins = n / 2 + 1;
  std::vector<fftw_complex> out(bins);

  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(), out.data(), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }

  std::vector<double> power(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    power[k] = (out[k][0] * out[k][0] + out[k][1] * out[k][1]) / static_cast<double>(n);
  }
  return power;
}

MatrixProfile matrix_profile(std::span<const double> v, int window, int exclusion_zone) {
  const auto m = static_cast<std::size_t>(window);
  if (m < 2 || v.size() < m) {
    throw Error(ErrorCode::InsufficientData, "series shorter than the window");
  }
  const WindowStats w(v, m);
  const std::size_t windows = v.size() - m + 1;
  MatrixProfile mp;
  mp.distance.assign(windows, kInf);
  mp.index.assign(windows, -1);
  const auto zone = static_cast<std::size_t>(std::max(0, exclusion_zone));
  const auto dm = static_cast<double>(m);
  const auto& x = w.data;

  auto update = [&](std::size_t i, std::size_t j, double d) {
    const auto sj = static_cast<std::int64_t>(j);
    if (d < mp.distance[i] || (d == mp.distance[i] && (mp.index[i] < 0 || sj < mp.index[i]))) {
      mp.distance[i] = d;
      mp.index[i] = sj;
    }
  };

  // Walk each diagonal j = i + k, updating the dot product incrementally
  // and refreshing it now and then to bound drift.
  constexpr std::size_t kRefresh = 1024;
  for (std::size_t k = zone + 1; k < windows; ++k) {
    double dot = 0;
    for (std::size_t i = 0; i + k < windows; ++i) {
      const std::size_t j = i + k;
      if (i % kRefresh == 0) {
        dot = std::inner_product(x.begin() + static_cast<std::ptrdiff_t>(i),
                                 x.begin() + static_cast<std::ptrdiff_t>(i + m),
                                 x.begin() + static_cast<std::ptrdiff_t>(j), 0.0);
      } else {
        dot += x[i + m - 1] * x[j + m - 1] - x[i - 1] * x[j - 1];
      }
      const double d = window_distance(w, i, j, dot, dm);
      update(i, j, d);
      update(j, i, d);
    }
  }
  // Windows with a valid neighbour keep their index; the rest stay at +inf / -1.
  for (std::size_t i = 0; i < windows; ++i) {
    if (mp.distance[i] == kInf) mp.index[i] = -1;
  }
  return mp;
}

double znorm_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) {
    throw Error(ErrorCode::InvalidParameter, "z-normalized distance needs equal, non-empty lengths");
  }
  auto normalize = [](std::span<const double> s, std::vector<double>& out) {
    const double mu = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
    double var = 0, ms = 0;
    for (double x : s) {
      var += (x - mu) * (x - mu);
      ms += x * x;
    }
    var /= static_cast<double>(s.size());
    ms /= static_cast<double>(s.size());
    if (is_constant(var, ms)) return false;
    const double sd = std::sqrt(var);
    out.resize(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = (s[i] - mu) / sd;
    return true;
  };
  for (double x : a) {
    if (!std::isfinite(x)) return kInf;
  }
  for (double x : b) {
    if (!std::isfinite(x)) return kInf;
  }
  std::vector<double> na, nb;
  const bool va = normalize(a, na);
  const bool vb = normalize(b, nb);
  if (!va && !vb) return 0.0;
  if (!va || !vb) return kInf;
  double sum = 0;
  for (std::size_t i = 0; i < na.size(); ++i) sum += (na[i] - nb[i]) * (na[i] - nb[i]);
  return std::sqrt(sum);
}

namespace techniques {

SplitIndexList seasonality(std::span<const double> v, const Seasonality& spec) {
  const auto n = static_cast<std::int64_t>(v.size());
  if (n < 4) throw Error(ErrorCode::InsufficientData, "seasonality needs at least 4 records");
  const auto power = periodogram(v);
  const std::int64_t first = spec.min_cycles;
  const std::int64_t last = n / 2;
  if (first > last) {
    throw Error(ErrorCode::InsufficientData,
                "segment too short for " + std::to_string(spec.min_cycles) + " full cycles");
  }
  std::int64_t best = first;
  for (std::int64_t k = first + 1; k <= last; ++k) {
    if (power[static_cast<std::size_t>(k)] > power[static_cast<std::size_t>(best)]) best = k;
  }
  const auto period = std::max<std::int64_t>(
      1, std::llround(static_cast<double>(n) / static_cast<double>(best)));
  std::vector<std::int64_t> splits;
  for (std::int64_t s = period; s < n; s += period) splits.push_back(s);
  return SplitIndexList::from_interior(n, std::move(splits));
}

SplitIndexList motifs(std::span<const double> v, const MotifRepresentatives& spec) {
  const auto n = static_cast<std::int64_t>(v.size());
  const std::int64_t m = spec.length;
  if (n < 2 * m) {
    throw Error(ErrorCode::InsufficientData,
                "motif length " + std::to_string(m) + " needs at least " + std::to_string(2 * m) +
                    " records");
  }
  const auto zone = static_cast<int>((m + 1) / 2);
  const auto mp = matrix_profile(v, static_cast<int>(m), zone);

  std::vector<std::size_t> order(mp.distance.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return mp.distance[a] < mp.distance[b]; });

  std::vector<std::int64_t> chosen;
  auto clear = [&](std::int64_t x) {
    return std::none_of(chosen.begin(), chosen.end(),
                        [&](std::int64_t c) { return std::abs(c - x) <= zone; });
  };
  std::vector<std::int64_t> splits;
  int found = 0;
  for (std::size_t i : order) {
    if (found >= spec.top_k) break;
    if (!std::isfinite(mp.distance[i]) || mp.index[i] < 0) break;
    const auto a = static_cast<std::int64_t>(i);
    const auto b = mp.index[i];
    if (!clear(a) || !clear(b)) continue;
    chosen.push_back(a);
    chosen.push_back(b);
    for (auto s : {a, b}) {
      splits.push_back(s);
      splits.push_back(s + m);
    }
    ++found;
  }
  return SplitIndexList::from_interior(n, std::move(splits));
}

SplitIndexList pattern_matches(std::span<const double> v, const PatternMatches& spec) {
  const auto n = static_cast<std::int64_t>(v.size());
  const auto q = static_cast<std::int64_t>(spec.pattern.size());
  if (n < q) throw Error(ErrorCode::InsufficientData, "segment shorter than the query pattern");

  const auto uq = static_cast<std::size_t>(q);
  const double qmean = stats::mean(spec.pattern);
  double qvar = 0, qms = 0;
  for (double x : spec.pattern) {
    qvar += (x - qmean) * (x - qmean);
    qms += x * x;
  }
  qvar /= static_cast<double>(q);
  qms /= static_cast<double>(q);
  const bool query_constant = is_constant(qvar, qms);
  std::vector<double> qn(uq, 0.0);
  if (!query_constant) {
    for (std::size_t i = 0; i < uq; ++i) qn[i] = (spec.pattern[i] - qmean) / std::sqrt(qvar);
  }

  const WindowStats w(v, uq);
  const std::size_t windows = w.mean.size();
  const auto dq = static_cast<double>(q);
  std::vector<double> dist(windows, kInf);
  for (std::size_t s = 0; s < windows; ++s) {
    if (!w.valid[s]) continue;
    const bool constant = w.sd[s] == 0.0;
    if (constant || query_constant) {
      dist[s] = constant && query_constant ? 0.0 : kInf;
      continue;
    }
    double dot = 0;
    for (std::size_t i = 0; i < uq; ++i) dot += w.data[s + i] * qn[i];
    const double corr = dot / (dq * w.sd[s]);
    dist[s] = std::sqrt(std::max(0.0, 2.0 * dq * (1.0 - std::min(1.0, corr))));
  }

  std::vector<std::size_t> candidates;
  for (std::size_t s = 0; s < windows; ++s) {
    if (dist[s] <= spec.threshold) candidates.push_back(s);
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
  std::vector<bool> taken(v.size(), false);
  std::vector<std::int64_t> splits;
  for (std::size_t s : candidates) {
    const bool free = std::none_of(taken.begin() + static_cast<std::ptrdiff_t>(s),
                                   taken.begin() + static_cast<std::ptrdiff_t>(s + uq),
                                   [](bool t) { return t; });
    if (!free) continue;
    std::fill(taken.begin() + static_cast<std::ptrdiff_t>(s),
              taken.begin() + static_cast<std::ptrdiff_t>(s + uq), true);
    splits.push_back(static_cast<std::int64_t>(s));
    splits.push_back(static_cast<std::int64_t>(s) + q);
  }
  return SplitIndexList::from_interior(n, std::move(splits));
}

}  // namespace techniques
}  // namespace multiseg
