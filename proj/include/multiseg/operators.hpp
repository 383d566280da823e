#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "multiseg/query.hpp"

namespace multiseg {

/// Memoizes node results per (node tag, from, to). Thread-safe. One cache
/// must only ever see a single series.
class SplitCache {
 public:
  struct Entry {
    SplitIndexList splits = SplitIndexList::trivial(1);
    std::vector<std::string> warnings;
  };

  std::optional<Entry> get(const std::string& key) const;
  void put(const std::string& key, Entry entry);
  void clear();

  std::size_t hits() const;
  std::size_t misses() const;
  std::size_t size() const;

  static std::string key(const QueryNode& node, RecordIndex from, RecordIndex to);

 private:
  mutable std::mutex mutex_;
  std::map<std::string, Entry> entries_;
  mutable std::size_t hits_ = 0;
  mutable std::size_t misses_ = 0;
};

struct NodeContext {
  SplitCache* cache = nullptr;
  /// Non-fatal messages (degraded techniques) are appended here.
  std::vector<std::string>* warnings = nullptr;
};

/// Operator template: the output is the fold out = f(new, out) over the
/// operands' interior indices, then sorted, deduplicated and re-padded.
/// `out` is empty (nullopt) before the first operand unless `init` is set.
struct OperatorTemplate {
  using Indices = std::vector<std::int64_t>;
  using Step = std::function<Indices(const Indices& fresh, std::optional<Indices> out)>;

  std::optional<Indices> init;
  Step f;
  /// Fold from the last operand to the first (chain operators).
  bool reverse = false;
};

/// Template instance for a built-in operator over a range of `length` records.
OperatorTemplate operator_template(OperatorKind op, std::optional<std::int64_t> theta,
                                   std::int64_t length);

/// Runs a template over already computed operand lists of equal length.
SplitIndexList run_template(const OperatorTemplate& tmpl, std::span<const SplitIndexList> operands);

/// Combines operand lists with a built-in operator.
SplitIndexList combine(OperatorKind op, std::optional<std::int64_t> theta,
                       std::span<const SplitIndexList> operands);

/// Split indices of any node over the global range [from, to].
SplitIndexList evaluate_node(const QueryNode& node, const TimeSeries& series, RecordIndex from,
                             RecordIndex to, const NodeContext& context = {});

/// Evaluates the operands over [from, to] and combines them.
SplitIndexList apply_operator(const OperatorNode& node, const TimeSeries& series, RecordIndex from,
                              RecordIndex to, const NodeContext& context = {});

}  // namespace multiseg
