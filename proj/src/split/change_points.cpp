#include <algorithm>
#include <limits>

#include "multiseg/stats.hpp"
#include "multiseg/technique.hpp"

namespace multiseg {
namespace {

/// Exact DP beyond this length is too slow for interactive use; longer
/// ranges fall back to binary segmentation.
constexpr std::int64_t kExactDpMaxLength = 50'000;
/// Bound on k * L^2 inner-loop steps for the exact DP.
constexpr double kExactDpMaxWork = 4e9;

/// Prefix sums over non-missing values (centered for numerical stability).
/// cost(a, b) is the L2 cost of local records a+1..b.
class L2Cost {
 public:
  explicit L2Cost(std::span<const double> v) : count_(v.size() + 1), sum_(v.size() + 1), sq_(v.size() + 1) {
    double center = stats::mean(v);
    if (!std::isfinite(center)) center = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const bool ok = std::isfinite(v[i]);
      const double x = ok ? v[i] - center : 0.0;
      count_[i + 1] = count_[i] + (ok ? 1 : 0);
      sum_[i + 1] = sum_[i] + x;
      sq_[i + 1] = sq_[i] + x * x;
    }
  }

  double operator()(std::int64_t a, std::int64_t b) const noexcept {
    const auto ua = static_cast<std::size_t>(a);
    const auto ub = static_cast<std::size_t>(b);
    const auto c = count_[ub] - count_[ua];
    if (c == 0) return 0.0;
    const double s = sum_[ub] - sum_[ua];
    const double q = sq_[ub] - sq_[ua];
    return std::max(0.0, q - s * s / static_cast<double>(c));
  }

  std::int64_t length() const noexcept { return static_cast<std::int64_t>(count_.size()) - 1; }

 private:
  std::vector<std::int64_t> count_;
  std::vector<double> sum_;
  std::vector<double> sq_;
};

}  // namespace

double l2_partition_cost(std::span<const double> v, std::span<const std::int64_t> splits) {
  const L2Cost cost(v);
  double total = 0;
  for (std::size_t j = 0; j + 1 < splits.size(); ++j) total += cost(splits[j], splits[j + 1]);
  return total;
}

std::vector<std::int64_t> optimal_partition(std::span<const double> v, int k) {
  const L2Cost cost(v);
  const std::int64_t n = cost.length();
  if (n < k + 1) {
    throw Error(ErrorCode::InsufficientData,
                std::to_string(k) + " change points need at least " + std::to_string(k + 1) +
                    " records");
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const auto un = static_cast<std::size_t>(n);
  // prev[b]: best cost of the first b records split into j segments.
  std::vector<double> prev(un + 1, kInf);
  std::vector<double> next(un + 1, kInf);
  for (std::int64_t b = 1; b <= n; ++b) prev[static_cast<std::size_t>(b)] = cost(0, b);
  std::vector<std::vector<std::int32_t>> arg(static_cast<std::size_t>(k),
                                             std::vector<std::int32_t>(un + 1, 0));

  for (int j = 1; j <= k; ++j) {
    std::fill(next.begin(), next.end(), kInf);
    auto& back = arg[static_cast<std::size_t>(j - 1)];
    // b must leave room for the k - j segments still to come
    const std::int64_t last_b = j == k ? n : n - (k - j);
    for (std::int64_t b = j == k ? n : j + 1; b <= last_b; ++b) {
      double best = kInf;
      std::int64_t best_a = j;
      for (std::int64_t a = j; a < b; ++a) {
        const double c = prev[static_cast<std::size_t>(a)] + cost(a, b);
        if (c < best) {
          best = c;
          best_a = a;
        }
      }
      next[static_cast<std::size_t>(b)] = best;
      back[static_cast<std::size_t>(b)] = static_cast<std::int32_t>(best_a);
    }
    std::swap(prev, next);
  }

  std::vector<std::int64_t> splits(static_cast<std::size_t>(k) + 2);
  splits.back() = n;
  std::int64_t b = n;
  for (int j = k; j >= 1; --j) {
    b = arg[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(b)];
    splits[static_cast<std::size_t>(j)] = b;
  }
  splits.front() = 0;
  return splits;
}

std::vector<std::int64_t> binary_segmentation(std::span<const double> v, int k) {
  const L2Cost cost(v);
  const std::int64_t n = cost.length();
  if (n < k + 1) {
    throw Error(ErrorCode::InsufficientData,
                std::to_string(k) + " change points need at least " + std::to_string(k + 1) +
                    " records");
  }
  struct Candidate {
    std::int64_t from, to, split;
    double gain;
  };
  auto best_split = [&](std::int64_t a, std::int64_t b) {
    Candidate c{a, b, -1, -1.0};
    const double whole = cost(a, b);
    for (std::int64_t s = a + 1; s < b; ++s) {
      const double gain = whole - cost(a, s) - cost(s, b);
      if (gain > c.gain) {
        c.gain = gain;
        c.split = s;
      }
    }
    return c;
  };

  std::vector<Candidate> segments{best_split(0, n)};
  std::vector<std::int64_t> splits{0, n};
  for (int step = 0; step < k; ++step) {
    auto it = std::max_element(segments.begin(), segments.end(),
                               [](const Candidate& x, const Candidate& y) { return x.gain < y.gain; });
    if (it == segments.end() || it->split < 0) break;
    const Candidate chosen = *it;
    segments.erase(it);
    splits.push_back(chosen.split);
    segments.push_back(best_split(chosen.from, chosen.split));
    segments.push_back(best_split(chosen.split, chosen.to));
  }
  std::sort(splits.begin(), splits.end());
  return splits;
}

std::vector<std::int64_t> pelt(std::span<const double> v, double penalty) {
  const L2Cost cost(v);
  const std::int64_t n = cost.length();
  const auto un = static_cast<std::size_t>(n);
  std::vector<double> f(un + 1, 0.0);
  std::vector<std::int64_t> last(un + 1, 0);
  f[0] = -penalty;
  std::vector<std::int64_t> candidates{0};
  std::vector<double> scratch;
  for (std::int64_t t = 1; t <= n; ++t) {
    double best = std::numeric_limits<double>::infinity();
    std::int64_t best_s = 0;
    scratch.resize(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const auto s = candidates[i];
      scratch[i] = f[static_cast<std::size_t>(s)] + cost(s, t);
      if (scratch[i] + penalty < best) {
        best = scratch[i] + penalty;
        best_s = s;
      }
    }
    f[static_cast<std::size_t>(t)] = best;
    last[static_cast<std::size_t>(t)] = best_s;
    std::vector<std::int64_t> kept;
    kept.reserve(candidates.size() + 1);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (scratch[i] <= best) kept.push_back(candidates[i]);
    }
    kept.push_back(t);
    candidates.swap(kept);
  }
  std::vector<std::int64_t> splits{n};
  for (std::int64_t t = n; t > 0;) {
    t = last[static_cast<std::size_t>(t)];
    splits.push_back(t);
  }
  std::reverse(splits.begin(), splits.end());
  return splits;
}

namespace techniques {

SplitIndexList change_points(std::span<const double> v, const ChangePoints& spec) {
  const auto n = static_cast<std::int64_t>(v.size());
  if (spec.mode == ChangePointMode::penalty) {
    return SplitIndexList::from_padded(pelt(v, spec.penalty));
  }
  const bool exact = n <= kExactDpMaxLength &&
                     static_cast<double>(spec.k) * static_cast<double>(n) * static_cast<double>(n) <=
                         kExactDpMaxWork;
  auto splits = exact ? optimal_partition(v, spec.k) : binary_segmentation(v, spec.k);
  return SplitIndexList::from_padded(std::move(splits));
}

}  // namespace techniques
}  // namespace multiseg
