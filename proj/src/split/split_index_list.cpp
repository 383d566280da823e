#include "multiseg/split_index_list.hpp"

#include <algorithm>

namespace multiseg {

bool satisfies_split_contract(std::span<const std::int64_t> indices, std::int64_t length) noexcept {
  if (length < 1 || indices.size() < 2) return false;
  if (indices.front() != 0 || indices.back() != length) return false;
  for (std::size_t i = 1; i < indices.size(); ++i) {
    if (indices[i - 1] >= indices[i]) return false;
  }
  return true;
}

SplitIndexList SplitIndexList::trivial(Index length) {
  if (length < 1) throw Error(ErrorCode::InvalidParameter, "application range must be non-empty");
  return SplitIndexList({0, length});
}

SplitIndexList SplitIndexList::from_interior(Index length, std::vector<Index> interior) {
  if (length < 1) throw Error(ErrorCode::InvalidParameter, "application range must be non-empty");
  std::erase_if(interior, [length](Index i) { return i <= 0 || i >= length; });
  std::sort(interior.begin(), interior.end());
  interior.erase(std::unique(interior.begin(), interior.end()), interior.end());
  interior.insert(interior.begin(), 0);
  interior.push_back(length);
  return SplitIndexList(std::move(interior));
}

SplitIndexList SplitIndexList::from_padded(std::vector<Index> indices) {
  if (indices.empty() || !satisfies_split_contract(indices, indices.back())) {
    throw Error(ErrorCode::InvalidParameter, "split index list violates its contract");
  }
  return SplitIndexList(std::move(indices));
}

std::vector<IndexInterval> SplitIndexList::intervals(RecordIndex from) const {
  std::vector<IndexInterval> out;
  out.reserve(indices_.size() - 1);
  for (std::size_t j = 0; j + 1 < indices_.size(); ++j) {
    out.push_back({indices_[j] + from, indices_[j + 1] + from - 1});
  }
  return out;
}

}  // namespace multiseg
