#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "multiseg/technique.hpp"

namespace multiseg {

enum class OperatorKind { OR, AND, AFTER, NEAR, NOT };

std::string_view to_string(OperatorKind op) noexcept;

struct QueryNode;

struct OperatorNode {
  OperatorKind op = OperatorKind::OR;
  std::vector<QueryNode> operands;
  /// Tolerance in record indices; present exactly for AFTER and NEAR.
  std::optional<std::int64_t> theta;

  bool operator==(const OperatorNode& other) const;
};

/// A technique or an operator over nested nodes; both yield a SplitIndexList.
struct QueryNode {
  std::variant<TechniqueSpec, OperatorNode> value;

  bool is_technique() const noexcept { return std::holds_alternative<TechniqueSpec>(value); }
  bool operator==(const QueryNode& other) const;
};

enum class Selector { all, bookmarked_only };

struct QueryLevel {
  QueryNode node;
  Selector selector = Selector::all;
  bool operator==(const QueryLevel&) const = default;
};

/// Ordered levels; level i is applied to the segments produced by level i-1.
struct QuerySpec {
  std::vector<QueryLevel> levels;
  bool operator==(const QuerySpec&) const = default;
};

/// Parses and validates a query document. Errors: SyntaxError (with byte
/// position or JSON path), UnknownTechnique, ParameterOutOfRange, ArityError.
QuerySpec parse_query(std::string_view text);
QuerySpec query_from_json(const nlohmann::json& doc);

nlohmann::json query_to_json(const QuerySpec& query);
nlohmann::json node_to_json(const QueryNode& node);

/// Canonical pretty-printed document; parse_query(serialize_query(q)) == q.
std::string serialize_query(const QuerySpec& query);

/// Stable descriptor of a node, used for node ids and cache keys.
std::string node_tag(const QueryNode& node);

/// Checks every technique in the query against the series (dimensions, kinds).
void check_compatible(const QuerySpec& query, const TimeSeries& series);

// Convenience constructors.
QueryNode technique(TechniqueSpec spec);
QueryNode op(OperatorKind kind, std::vector<QueryNode> operands,
             std::optional<std::int64_t> theta = std::nullopt);

}  // namespace multiseg
