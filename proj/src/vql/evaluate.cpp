// Level-by-level evaluation of a query into a segment tree.

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "multiseg/segment_tree.hpp"

namespace multiseg {
namespace {

/// Runs fn(i) for i in [0, count) on up to `threads` workers. The first
/// exception stops the remaining work and is rethrown.
template <class Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) {
      workers.emplace_back([&] {
        while (!failed.load()) {
          const std::size_t i = next.fetch_add(1);
          if (i >= count) return;
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            failed = true;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

std::string where(int level, IndexInterval parent) {
  return "level " + std::to_string(level) + ", parent [" + std::to_string(parent.from) + ", " +
         std::to_string(parent.to) + "]";
}

}  // namespace

std::vector<SegmentNode> expand_parent(const QueryNode& level_node, const TimeSeries& series,
                                       const SegmentNode& parent, bool deeper,
                                       const Annotations& annotations, const NodeContext& context) {
  const int level = parent.level + 1;
  const auto range = parent.interval;
  std::vector<std::string> local;
  SplitIndexList splits = SplitIndexList::trivial(range.length());
  try {
    splits = evaluate_node(level_node, series, range.from, range.to, {context.cache, &local});
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Cancelled) throw;
    local.push_back(std::string(to_string(e.code())) + ": " + e.what());
  }
  if (context.warnings != nullptr) {
    for (auto& w : local) context.warnings->push_back(where(level, range) + ": " + w);
  }

  std::vector<IndexInterval> intervals;
  if (!splits.is_trivial()) {
    intervals = splits.intervals(range.from);
  } else if (deeper) {
    intervals.push_back(range);
  }

  const auto tag = node_tag(level_node);
  const auto* spec = std::get_if<TechniqueSpec>(&level_node.value);
  std::vector<SegmentNode> children;
  children.reserve(intervals.size());
  for (const auto& interval : intervals) {
    SegmentNode child;
    child.interval = interval;
    child.level = level;
    child.technique_tag = tag;
    child.id = make_node_id(level, interval, tag);
    if (spec != nullptr) child.labels = automatic_labels(*spec, series.view(interval));
    child.bookmarked = annotations.bookmarks.contains(child.id);
    if (const auto it = annotations.user_labels.find(child.id); it != annotations.user_labels.end()) {
      child.user_labels = it->second;
    }
    children.push_back(std::move(child));
  }
  return children;
}

SegmentTree evaluate(const QuerySpec& query, std::shared_ptr<const TimeSeries> series,
                     const Annotations& annotations, const EvalOptions& options) {
  SegmentTree tree;
  tree.series = series;
  auto& root = tree.root;
  root.interval = series->full();
  root.level = 0;
  root.technique_tag = std::string(kRootTag);
  root.id = make_node_id(0, root.interval, kRootTag);
  root.bookmarked = annotations.bookmarks.contains(root.id);
  if (const auto it = annotations.user_labels.find(root.id); it != annotations.user_labels.end()) {
    root.user_labels = it->second;
  }

  const int levels = static_cast<int>(query.levels.size());
  std::vector<SegmentNode*> frontier{&root};
  for (int li = 0; li < levels; ++li) {
    const auto& level = query.levels[static_cast<std::size_t>(li)];
    std::vector<SegmentNode*> selected;
    for (auto* node : frontier) {
      if (level.selector == Selector::all || node->bookmarked) selected.push_back(node);
    }
    const bool deeper = li + 1 < levels;
    std::vector<std::vector<SegmentNode>> produced(selected.size());
    std::vector<std::vector<std::string>> warnings(selected.size());
    std::mutex progress_mutex;
    std::size_t done = 0;

    parallel_for(selected.size(), options.threads, [&](std::size_t i) {
      if (options.stop.stop_requested()) throw Error(ErrorCode::Cancelled, "evaluation cancelled");
      produced[i] = expand_parent(level.node, *series, *selected[i], deeper, annotations,
                                  {options.cache, &warnings[i]});
      if (options.progress) {
        std::lock_guard lock(progress_mutex);
        options.progress({li + 1, levels, ++done, selected.size()});
      }
    });

    frontier.clear();
    for (std::size_t i = 0; i < selected.size(); ++i) {
      selected[i]->children = std::move(produced[i]);
      for (auto& child : selected[i]->children) frontier.push_back(&child);
      for (auto& w : warnings[i]) tree.warnings.push_back(std::move(w));
    }
  }
  return tree;
}

}  // namespace multiseg
