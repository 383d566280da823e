#include "multiseg/segment_tree.hpp"

#include <charconv>
#include <cstdio>
#include <unordered_map>

namespace multiseg {

using nlohmann::json;

std::vector<std::string> SegmentNode::all_labels() const {
  auto out = labels;
  out.insert(out.end(), user_labels.begin(), user_labels.end());
  return out;
}

std::string make_node_id(int level, IndexInterval interval, std::string_view technique_tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto mix = [&h](std::string_view s) {
    for (const unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  mix(std::to_string(level));
  mix("|");
  mix(std::to_string(interval.from));
  mix("|");
  mix(std::to_string(interval.to));
  mix("|");
  mix(technique_tag);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

template <class Node, class Fn>
Node* find_in(Node& node, std::string_view id, Fn&& on_parent) {
  if (node.id == id) return &node;
  for (auto& child : node.children) {
    if (auto* hit = find_in(child, id, on_parent)) {
      if (hit == &child) on_parent(node);
      return hit;
    }
  }
  return nullptr;
}

void visit_node(const SegmentNode& node, const SegmentNode* parent,
                const std::function<void(const SegmentNode&, const SegmentNode*)>& fn) {
  fn(node, parent);
  for (const auto& child : node.children) visit_node(child, &node, fn);
}

SegmentNode& require(SegmentTree& tree, std::string_view id) {
  auto* node = find_node(tree, id);
  if (node == nullptr) throw Error(ErrorCode::UnknownNode, "no node with id '" + std::string(id) + "'");
  return *node;
}

std::string interval_text(IndexInterval i) {
  return "[" + std::to_string(i.from) + ", " + std::to_string(i.to) + "]";
}

}  // namespace

SegmentNode* find_node(SegmentTree& tree, std::string_view id) {
  return find_in(tree.root, id, [](SegmentNode&) {});
}

const SegmentNode* find_node(const SegmentTree& tree, std::string_view id) {
  return find_in(tree.root, id, [](const SegmentNode&) {});
}

const SegmentNode* find_parent(const SegmentTree& tree, std::string_view id) {
  const SegmentNode* parent = nullptr;
  find_in(tree.root, id, [&](const SegmentNode& p) { parent = &p; });
  return parent;
}

void visit(const SegmentTree& tree,
           const std::function<void(const SegmentNode&, const SegmentNode*)>& fn) {
  visit_node(tree.root, nullptr, fn);
}

std::size_t node_count(const SegmentTree& tree) {
  std::size_t count = 0;
  visit(tree, [&](const SegmentNode&, const SegmentNode*) { ++count; });
  return count;
}

int depth(const SegmentTree& tree) {
  int d = 0;
  visit(tree, [&](const SegmentNode& n, const SegmentNode*) { d = std::max(d, n.level); });
  return d;
}

void set_bookmark(SegmentTree& tree, std::string_view id, bool flag) {
  require(tree, id).bookmarked = flag;
}

void label_node(SegmentTree& tree, std::string_view id, std::string text) {
  require(tree, id).user_labels.push_back(std::move(text));
}

Annotations annotations_of(const SegmentTree& tree) {
  Annotations a;
  visit(tree, [&](const SegmentNode& n, const SegmentNode*) {
    if (n.bookmarked) a.bookmarks.insert(n.id);
    if (!n.user_labels.empty()) a.user_labels[n.id] = n.user_labels;
  });
  return a;
}

std::vector<std::string> partition_violations(const SegmentTree& tree) {
  std::vector<std::string> out;
  const auto n = tree.series ? static_cast<RecordIndex>(tree.series->size()) : tree.root.interval.to;
  if (tree.root.level != 0) out.push_back("root level is " + std::to_string(tree.root.level));
  if (tree.root.interval != IndexInterval{1, n}) {
    out.push_back("root covers " + interval_text(tree.root.interval) + " instead of [1, " +
                  std::to_string(n) + "]");
  }
  visit(tree, [&](const SegmentNode& node, const SegmentNode*) {
    if (node.interval.from > node.interval.to) {
      out.push_back("node " + node.id + " has empty interval " + interval_text(node.interval));
    }
    if (node.children.empty()) return;
    RecordIndex next = node.interval.from;
    for (const auto& child : node.children) {
      if (child.level != node.level + 1) {
        out.push_back("node " + child.id + " at level " + std::to_string(child.level) +
                      " under level " + std::to_string(node.level));
      }
      if (child.interval.from != next) {
        out.push_back("node " + child.id + " starts at " + std::to_string(child.interval.from) +
                      ", expected " + std::to_string(next));
      }
      next = child.interval.to + 1;
    }
    if (next != node.interval.to + 1) {
      out.push_back("children of " + node.id + " end at " + std::to_string(next - 1) +
                    ", expected " + std::to_string(node.interval.to));
    }
  });
  return out;
}

// Serialization --------------------------------------------------------------

std::string join_labels(const std::vector<std::string>& labels) {
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i > 0) out += ';';
    for (const char c : labels[i]) {
      if (c == ';' || c == '\\') out += '\\';
      out += c;
    }
  }
  return out;
}

std::vector<std::string> split_labels(std::string_view field) {
  std::vector<std::string> out;
  if (field.empty()) return out;
  std::string current;
  for (std::size_t i = 0; i < field.size(); ++i) {
    const char c = field[i];
    if (c == '\\' && i + 1 < field.size()) {
      current += field[++i];
    } else if (c == ';') {
      out.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  out.push_back(std::move(current));
  return out;
}

std::string export_tree_csv(const SegmentTree& tree) {
  std::string out(kTreeCsvHeader);
  out += '\n';
  const auto ts = tree.series->timestamps();
  visit(tree, [&](const SegmentNode& n, const SegmentNode* parent) {
    out += csv_escape(n.id);
    out += ',';
    if (parent != nullptr) out += csv_escape(parent->id);
    out += ',' + std::to_string(n.level);
    out += ',' + std::to_string(n.interval.from);
    out += ',' + std::to_string(n.interval.to);
    out += ',' + format_timestamp(ts[static_cast<std::size_t>(n.interval.from - 1)]);
    out += ',' + format_timestamp(ts[static_cast<std::size_t>(n.interval.to - 1)]);
    out += ',' + csv_escape(join_labels(n.all_labels()));
    out += n.bookmarked ? ",true," : ",false,";
    out += csv_escape(n.technique_tag);
    out += '\n';
  });
  return out;
}

namespace {

struct ImportedRow {
  SegmentNode node;
  std::string parent_id;
  std::vector<std::size_t> children;
};

std::int64_t parse_int(const std::string& text, std::size_t row, const char* column) {
  std::int64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::UnparsableValue, "expected an integer, got '" + text + "'",
                "row " + std::to_string(row) + ", column " + column);
  }
  return value;
}

SegmentNode assemble(std::vector<ImportedRow>& rows, std::size_t i) {
  SegmentNode node = std::move(rows[i].node);
  for (const auto c : rows[i].children) node.children.push_back(assemble(rows, c));
  return node;
}

}  // namespace

SegmentTree import_tree_csv(std::string_view bytes, std::shared_ptr<const TimeSeries> series) {
  const auto table = read_csv_rows(bytes);
  if (table.empty()) throw Error(ErrorCode::SyntaxError, "empty tree file", "row 1");
  std::string header;
  for (std::size_t i = 0; i < table[0].size(); ++i) header += (i ? "," : "") + table[0][i];
  if (header != kTreeCsvHeader) {
    throw Error(ErrorCode::SyntaxError, "unexpected header '" + header + "'", "row 1");
  }
  if (table.size() < 2) throw Error(ErrorCode::SyntaxError, "tree file has no root row", "row 2");

  const auto n = static_cast<RecordIndex>(series->size());
  const auto ts = series->timestamps();
  std::vector<ImportedRow> rows;
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t r = 1; r < table.size(); ++r) {
    const auto& f = table[r];
    const auto row = r + 1;
    if (f.size() != 10) {
      throw Error(ErrorCode::RaggedRow,
                  "expected 10 fields, got " + std::to_string(f.size()), "row " + std::to_string(row));
    }
    ImportedRow in;
    in.node.id = f[0];
    in.parent_id = f[1];
    in.node.level = static_cast<int>(parse_int(f[2], row, "level"));
    in.node.interval = {parse_int(f[3], row, "from"), parse_int(f[4], row, "to")};
    if (in.node.interval.from < 1 || in.node.interval.to > n ||
        in.node.interval.from > in.node.interval.to) {
      throw Error(ErrorCode::IntervalOutOfBounds, "interval " + interval_text(in.node.interval),
                  "row " + std::to_string(row));
    }
    const auto check_ts = [&](const std::string& text, RecordIndex at, const char* column) {
      const auto parsed = parse_timestamp(text);
      if (!parsed || *parsed != ts[static_cast<std::size_t>(at - 1)]) {
        throw Error(ErrorCode::UnparsableValue,
                    "timestamp '" + text + "' does not match record " + std::to_string(at),
                    "row " + std::to_string(row) + ", column " + column);
      }
    };
    check_ts(f[5], in.node.interval.from, "from_timestamp");
    check_ts(f[6], in.node.interval.to, "to_timestamp");
    in.node.user_labels = split_labels(f[7]);
    if (f[8] != "true" && f[8] != "false") {
      throw Error(ErrorCode::UnparsableValue, "expected true or false, got '" + f[8] + "'",
                  "row " + std::to_string(row) + ", column bookmarked");
    }
    in.node.bookmarked = f[8] == "true";
    in.node.technique_tag = f[9];

    if (rows.empty() != in.parent_id.empty()) {
      throw Error(ErrorCode::UnknownNode, "only the first row may (and must) lack a parent",
                  "row " + std::to_string(row));
    }
    if (!in.parent_id.empty()) {
      const auto it = index.find(in.parent_id);
      if (it == index.end()) {
        throw Error(ErrorCode::UnknownNode, "parent '" + in.parent_id + "' not defined earlier",
                    "row " + std::to_string(row));
      }
      rows[it->second].children.push_back(rows.size());
    }
    if (!index.emplace(in.node.id, rows.size()).second) {
      throw Error(ErrorCode::UnparsableValue, "duplicate node id '" + in.node.id + "'",
                  "row " + std::to_string(row));
    }
    rows.push_back(std::move(in));
  }

  SegmentTree tree;
  tree.series = std::move(series);
  tree.root = assemble(rows, 0);
  if (const auto bad = partition_violations(tree); !bad.empty()) {
    throw Error(ErrorCode::IntervalOutOfBounds, "tree is not a partition: " + bad.front());
  }
  // Pre-order is required for a byte-identical re-export.
  std::size_t position = 0;
  bool ordered = true;
  visit(tree, [&](const SegmentNode& node, const SegmentNode*) {
    ordered = ordered && node.id == table[position + 1][0];
    ++position;
  });
  if (!ordered) throw Error(ErrorCode::SyntaxError, "rows are not in pre-order");
  return tree;
}

json node_to_json(const SegmentNode& node, const TimeSeries& series) {
  const auto ts = series.timestamps();
  json children = json::array();
  for (const auto& child : node.children) children.push_back(node_to_json(child, series));
  return json{{"id", node.id},
              {"level", node.level},
              {"from", node.interval.from},
              {"to", node.interval.to},
              {"from_timestamp", format_timestamp(ts[static_cast<std::size_t>(node.interval.from - 1)])},
              {"to_timestamp", format_timestamp(ts[static_cast<std::size_t>(node.interval.to - 1)])},
              {"labels", node.all_labels()},
              {"user_labels", node.user_labels},
              {"bookmarked", node.bookmarked},
              {"technique_tag", node.technique_tag},
              {"children", std::move(children)}};
}

json tree_to_json(const SegmentTree& tree) {
  return json{{"series", tree.series->source_name()},
              {"records", tree.series->size()},
              {"node_count", node_count(tree)},
              {"depth", depth(tree)},
              {"warnings", tree.warnings},
              {"root", node_to_json(tree.root, *tree.series)}};
}

}  // namespace multiseg
