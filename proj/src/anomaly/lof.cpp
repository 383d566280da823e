// Local outlier factor with k-distance neighbourhoods (ties included).

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "multiseg/anomaly.hpp"

namespace multiseg {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Neighbourhood {
  double k_distance = 0.0;
  std::vector<std::size_t> members;  // indices into the complete-row list
  std::vector<double> distances;
};

std::vector<Neighbourhood> neighbourhoods_1d(const std::vector<double>& x, std::size_t k) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  std::vector<Neighbourhood> out(n);
  for (std::size_t p = 0; p < n; ++p) {
    const double xp = x[order[p]];
    auto& nb = out[order[p]];
    std::size_t l = p;  // next left candidate is l - 1
    std::size_t r = p + 1;
    const auto take_left = [&] {
      --l;
      nb.members.push_back(order[l]);
      nb.distances.push_back(xp - x[order[l]]);
    };
    const auto take_right = [&] {
      nb.members.push_back(order[r]);
      nb.distances.push_back(x[order[r]] - xp);
      ++r;
    };
    while (nb.members.size() < k) {
      const double dl = l > 0 ? xp - x[order[l - 1]] : kInf;
      const double dr = r < n ? x[order[r]] - xp : kInf;
      if (dl <= dr) take_left();
      else take_right();
    }
    nb.k_distance = *std::max_element(nb.distances.begin(), nb.distances.end());
    while (l > 0 && xp - x[order[l - 1]] <= nb.k_distance) take_left();
    while (r < n && x[order[r]] - xp <= nb.k_distance) take_right();
  }
  return out;
}

std::vector<Neighbourhood> neighbourhoods_nd(const std::vector<double>& rows, std::size_t dims,
                                             std::size_t k) {
  const std::size_t n = rows.size() / dims;
  std::vector<Neighbourhood> out(n);
  std::vector<double> d(n);
  std::vector<double> scratch;
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      double s = 0.0;
      for (std::size_t c = 0; c < dims; ++c) {
        const double diff = rows[p * dims + c] - rows[q * dims + c];
        s += diff * diff;
      }
      d[q] = std::sqrt(s);
    }
    scratch.clear();
    for (std::size_t q = 0; q < n; ++q) {
      if (q != p) scratch.push_back(d[q]);
    }
    std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k - 1), scratch.end());
    auto& nb = out[p];
    nb.k_distance = scratch[k - 1];
    for (std::size_t q = 0; q < n; ++q) {
      if (q != p && d[q] <= nb.k_distance) {
        nb.members.push_back(q);
        nb.distances.push_back(d[q]);
      }
    }
  }
  return out;
}

}  // namespace

std::vector<double> lof_scores(std::span<const double> rows, std::size_t dims, int k) {
  if (k < 1) throw Error(ErrorCode::InvalidParameter, "LOF needs k >= 1");
  if (dims == 0 || rows.size() % dims != 0) {
    throw Error(ErrorCode::InvalidParameter, "row data is not a multiple of dims");
  }
  const std::size_t total = rows.size() / dims;
  std::vector<std::size_t> complete;
  std::vector<double> data;
  for (std::size_t i = 0; i < total; ++i) {
    const auto row = rows.subspan(i * dims, dims);
    if (std::all_of(row.begin(), row.end(), [](double v) { return std::isfinite(v); })) {
      complete.push_back(i);
      data.insert(data.end(), row.begin(), row.end());
    }
  }
  const std::size_t n = complete.size();
  const auto uk = static_cast<std::size_t>(k);
  if (n <= uk) {
    throw Error(ErrorCode::TooFewPoints,
                "LOF with k = " + std::to_string(k) + " needs more than " + std::to_string(k) +
                    " points, got " + std::to_string(n));
  }
  const auto nb = dims == 1 ? neighbourhoods_1d(data, uk) : neighbourhoods_nd(data, dims, uk);

  std::vector<double> lrd(n);
  for (std::size_t p = 0; p < n; ++p) {
    double reach = 0.0;
    for (std::size_t j = 0; j < nb[p].members.size(); ++j) {
      reach += std::max(nb[nb[p].members[j]].k_distance, nb[p].distances[j]);
    }
    lrd[p] = reach > 0.0 ? static_cast<double>(nb[p].members.size()) / reach : kInf;
  }

  std::vector<double> scores(total, kMissing);
  for (std::size_t p = 0; p < n; ++p) {
    double sum = 0.0;
    for (const auto o : nb[p].members) {
      if (std::isinf(lrd[p])) sum += std::isinf(lrd[o]) ? 1.0 : 0.0;
      else sum += lrd[o] / lrd[p];
    }
    scores[complete[p]] = sum / static_cast<double>(nb[p].members.size());
  }
  return scores;
}

std::vector<PointAnomaly> detect_lof(std::span<const double> values, int k, double threshold,
                                     std::size_t dims) {
  const auto scores = lof_scores(values, dims, k);
  std::vector<PointAnomaly> out;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] > threshold) out.push_back({static_cast<RecordIndex>(i), AnomalyType::lof, scores[i]});
  }
  return out;
}

}  // namespace multiseg
