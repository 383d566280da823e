#include "multiseg/guidance.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "multiseg/stats.hpp"

namespace multiseg {

double dtw_distance(std::span<const double> a, std::span<const double> b, std::size_t dims,
                    std::optional<std::size_t> band) {
  if (dims == 0) throw Error(ErrorCode::InvalidParameter, "dims must be positive");
  if (a.empty() || b.empty()) throw Error(ErrorCode::EmptySequence, "DTW needs non-empty sequences");
  if (a.size() % dims != 0 || b.size() % dims != 0) {
    throw Error(ErrorCode::InvalidParameter, "sequence length is not a multiple of dims");
  }
  const std::size_t n = a.size() / dims;
  const std::size_t m = b.size() / dims;
  const std::size_t gap = n > m ? n - m : m - n;
  const std::size_t w = band ? std::max(*band, gap) : std::max(n, m);
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // prev[j] / cur[j] hold D(i-1, j) / D(i, j) for j = 0..m.
  std::vector<double> prev(m + 1, kInf);
  std::vector<double> cur(m + 1, kInf);
  prev[0] = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    std::fill(cur.begin(), cur.end(), kInf);
    const std::size_t lo = i > w ? i - w : 1;
    const std::size_t hi = std::min(m, i + w);
    const double* ai = a.data() + (i - 1) * dims;
    for (std::size_t j = lo; j <= hi; ++j) {
      const double* bj = b.data() + (j - 1) * dims;
      double cost = 0.0;
      for (std::size_t d = 0; d < dims; ++d) cost += std::abs(ai[d] - bj[d]);
      cur[j] = cost + std::min({prev[j], cur[j - 1], prev[j - 1]});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

std::vector<double> paa(std::span<const double> rows, std::size_t dims, std::size_t target) {
  const std::size_t n = rows.size() / dims;
  if (target == 0 || n <= target) return {rows.begin(), rows.end()};
  std::vector<double> out(target * dims, 0.0);
  for (std::size_t k = 0; k < target; ++k) {
    const std::size_t begin = k * n / target;
    const std::size_t end = (k + 1) * n / target;
    for (std::size_t d = 0; d < dims; ++d) {
      double sum = 0.0;
      for (std::size_t i = begin; i < end; ++i) sum += rows[i * dims + d];
      out[k * dims + d] = sum / static_cast<double>(end - begin);
    }
  }
  return out;
}

std::vector<double> znormalize_rows(std::span<const double> rows, std::size_t dims) {
  const std::size_t n = rows.size() / dims;
  std::vector<double> out(rows.size(), 0.0);
  std::vector<double> column(n);
  for (std::size_t d = 0; d < dims; ++d) {
    for (std::size_t i = 0; i < n; ++i) column[i] = rows[i * dims + d];
    const double mu = stats::mean(column);
    const double sd = stats::stddev(column);
    if (!(sd > 0.0)) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = column[i];
      out[i * dims + d] = std::isfinite(x) ? (x - mu) / sd : 0.0;
    }
  }
  return out;
}

std::vector<double> mean_sibling_distance(const std::vector<std::vector<double>>& distances) {
  const std::size_t k = distances.size();
  std::vector<double> out(k, 0.0);
  if (k < 2) return out;
  for (std::size_t i = 0; i < k; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (j != i) sum += distances[i][j];
    }
    out[i] = sum / static_cast<double>(k - 1);
  }
  return out;
}

ScaleDomain scale_domain(std::span<const double> d_bars) {
  if (d_bars.empty()) return {};
  const auto [lo, hi] = std::minmax_element(d_bars.begin(), d_bars.end());
  return {*lo, *hi, (*lo + *hi) / 2.0};
}

double color_position(double d_bar, const ScaleDomain& domain) {
  const double span = domain.max - domain.min;
  if (!(span > 0.0)) return 0.5;
  return std::clamp((d_bar - domain.min) / span, 0.0, 1.0);
}

std::vector<SiblingSimilarity> sibling_distances(const SegmentTree& tree, std::string_view parent_id,
                                                 std::vector<std::string> dimension_set,
                                                 const GuidanceOptions& options) {
  const auto* parent = find_node(tree, parent_id);
  if (parent == nullptr) {
    throw Error(ErrorCode::UnknownNode, "no node with id '" + std::string(parent_id) + "'");
  }
  const auto& series = *tree.series;
  if (dimension_set.empty()) {
    for (const auto& d : series.dimensions()) {
      if (!d.is_categorical()) dimension_set.push_back(d.name);
    }
  }
  std::vector<const Dimension*> dims;
  for (const auto& name : dimension_set) {
    const auto& d = series.dimension(name);
    if (d.is_categorical()) {
      throw Error(ErrorCode::DimensionKindMismatch, "dimension '" + name + "' is categorical");
    }
    dims.push_back(&d);
  }
  const auto& children = parent->children;
  if (children.size() < 2 || dims.empty()) return {};

  const std::size_t nd = dims.size();
  std::vector<std::vector<double>> segments;
  for (const auto& child : children) {
    const auto view = series.view(child.interval);
    std::vector<double> rows(view.size() * nd);
    for (std::size_t d = 0; d < nd; ++d) {
      const auto v = view.values(*dims[d]);
      for (std::size_t i = 0; i < v.size(); ++i) rows[i * nd + d] = v[i];
    }
    segments.push_back(paa(znormalize_rows(rows, nd), nd, options.max_points));
  }

  const std::size_t k = segments.size();
  const bool banded = k > options.band_threshold;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) pairs.emplace_back(i, j);
  }
  std::vector<std::vector<double>> dist(k, std::vector<double>(k, 0.0));
  auto work = [&](std::size_t p) {
    const auto [i, j] = pairs[p];
    std::optional<std::size_t> band;
    if (banded) {
      const auto longer = std::max(segments[i].size(), segments[j].size()) / nd;
      band = (longer + 9) / 10;
    }
    dist[i][j] = dist[j][i] = dtw_distance(segments[i], segments[j], nd, band);
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(options.threads, pairs.size()));
  if (threads == 1) {
    for (std::size_t p = 0; p < pairs.size(); ++p) work(p);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    for (std::size_t t = 0; t < threads; ++t) {
      workers.emplace_back([&] {
        for (std::size_t p; (p = next.fetch_add(1)) < pairs.size();) work(p);
      });
    }
  }

  const auto d_bar = mean_sibling_distance(dist);
  const auto domain = scale_domain(d_bar);
  std::vector<SiblingSimilarity> out;
  for (std::size_t i = 0; i < k; ++i) {
    out.push_back({children[i].id, d_bar[i], domain, dimension_set});
  }
  return out;
}

}  // namespace multiseg
