#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "multiseg/series.hpp"

namespace multiseg {

/// Sorted, unique, local split indices over an application range of length L,
/// always padded with 0 and L. Consecutive entries a < b delimit the local
/// records a+1..b.
class SplitIndexList {
 public:
  using Index = std::int64_t;

  /// [0, L]
  static SplitIndexList trivial(Index length);

  /// Pads, sorts and deduplicates `interior`; values outside (0, L) are dropped.
  static SplitIndexList from_interior(Index length, std::vector<Index> interior);

  /// Takes an already padded list; throws InvalidParameter when the invariants fail.
  static SplitIndexList from_padded(std::vector<Index> indices);

  Index length() const noexcept { return indices_.back(); }
  const std::vector<Index>& indices() const noexcept { return indices_; }
  std::span<const Index> interior() const noexcept {
    return std::span<const Index>(indices_).subspan(1, indices_.size() - 2);
  }
  bool is_trivial() const noexcept { return indices_.size() == 2; }

  /// Global child intervals for an application range starting at `from`.
  std::vector<IndexInterval> intervals(RecordIndex from) const;

  bool operator==(const SplitIndexList&) const = default;

 private:
  explicit SplitIndexList(std::vector<Index> indices) : indices_(std::move(indices)) {}
  std::vector<Index> indices_;
};

/// True when `indices` is strictly increasing, starts with 0 and ends with `length`.
bool satisfies_split_contract(std::span<const std::int64_t> indices, std::int64_t length) noexcept;

}  // namespace multiseg
