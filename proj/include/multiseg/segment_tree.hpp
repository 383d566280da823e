#pragma once

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <stop_token>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "multiseg/operators.hpp"
#include "multiseg/query.hpp"

namespace multiseg {

struct SegmentNode {
  /// Hash of (level, from, to, technique_tag); stable across re-evaluation.
  std::string id;
  IndexInterval interval;
  int level = 0;
  std::vector<SegmentNode> children;
  /// Attached by the producing technique.
  std::vector<std::string> labels;
  /// Assigned by the analyst.
  std::vector<std::string> user_labels;
  bool bookmarked = false;
  std::string technique_tag;

  /// labels followed by user_labels.
  std::vector<std::string> all_labels() const;
  bool operator==(const SegmentNode&) const = default;
};

struct SegmentTree {
  SegmentNode root;
  std::shared_ptr<const TimeSeries> series;
  /// Degraded evaluations, each naming its level and parent interval.
  std::vector<std::string> warnings;
};

/// Analyst state carried from one evaluation to the next, keyed by node id.
struct Annotations {
  std::set<std::string> bookmarks;
  std::map<std::string, std::vector<std::string>> user_labels;
  bool operator==(const Annotations&) const = default;
};

inline constexpr std::string_view kRootTag = "root";

std::string make_node_id(int level, IndexInterval interval, std::string_view technique_tag);

SegmentNode* find_node(SegmentTree& tree, std::string_view id);
const SegmentNode* find_node(const SegmentTree& tree, std::string_view id);
/// nullptr for the root or an unknown id.
const SegmentNode* find_parent(const SegmentTree& tree, std::string_view id);

std::size_t node_count(const SegmentTree& tree);
/// Deepest populated level (0 for a lone root).
int depth(const SegmentTree& tree);
/// Pre-order visit.
void visit(const SegmentTree& tree, const std::function<void(const SegmentNode&, const SegmentNode* parent)>& fn);

/// Errors: UnknownNode.
void set_bookmark(SegmentTree& tree, std::string_view id, bool flag);
void label_node(SegmentTree& tree, std::string_view id, std::string text);

Annotations annotations_of(const SegmentTree& tree);

/// Root covers [1, n] at level 0; every child list partitions its parent
/// and sits one level below it. Returns one message per violation.
std::vector<std::string> partition_violations(const SegmentTree& tree);

// Evaluation -----------------------------------------------------------------

struct EvalProgress {
  int level = 0;
  int levels = 0;
  std::size_t parents_done = 0;
  std::size_t parents_total = 0;
};

struct EvalOptions {
  std::size_t threads = 1;
  SplitCache* cache = nullptr;
  /// Called after each parent completes (serialized, possibly from a worker thread).
  std::function<void(const EvalProgress&)> progress;
  /// Cancellation is checked between parents; throws Error(Cancelled).
  std::stop_token stop;
};

/// Applies the query level by level. Nodes in `annotations.bookmarks` are
/// bookmarked (and selected by bookmarked_only levels); user labels are
/// re-attached by id. The result does not depend on `options.threads`.
SegmentTree evaluate(const QuerySpec& query, std::shared_ptr<const TimeSeries> series,
                     const Annotations& annotations = {}, const EvalOptions& options = {});

/// Children that `level_node` produces for one parent (level = parent level + 1).
/// `deeper` tells whether further levels follow (pass-through rule).
std::vector<SegmentNode> expand_parent(const QueryNode& level_node, const TimeSeries& series,
                                       const SegmentNode& parent, bool deeper,
                                       const Annotations& annotations, const NodeContext& context);

// Serialization ----------------------------------------------------------------

inline constexpr std::string_view kTreeCsvHeader =
    "node_id,parent_id,level,from,to,from_timestamp,to_timestamp,labels,bookmarked,technique_tag";

/// One row per node in pre-order; labels are ';'-joined with '\' escaping.
std::string export_tree_csv(const SegmentTree& tree);

/// Inverse of export_tree_csv. Imported labels become user labels.
/// Errors: SyntaxError (header), UnparsableValue (row, column), UnknownNode
/// (parent reference), IntervalOutOfBounds.
SegmentTree import_tree_csv(std::string_view bytes, std::shared_ptr<const TimeSeries> series);

std::string join_labels(const std::vector<std::string>& labels);
std::vector<std::string> split_labels(std::string_view field);

nlohmann::json node_to_json(const SegmentNode& node, const TimeSeries& series);
nlohmann::json tree_to_json(const SegmentTree& tree);

}  // namespace multiseg
