#include "multiseg/query.hpp"

namespace multiseg {

using nlohmann::json;

std::string_view to_string(OperatorKind op) noexcept {
  switch (op) {
    case OperatorKind::OR: return "OR";
    case OperatorKind::AND: return "AND";
    case OperatorKind::AFTER: return "AFTER";
    case OperatorKind::NEAR: return "NEAR";
    case OperatorKind::NOT: return "NOT";
  }
  return "OR";
}

bool OperatorNode::operator==(const OperatorNode& other) const {
  return op == other.op && theta == other.theta && operands == other.operands;
}

bool QueryNode::operator==(const QueryNode& other) const { return value == other.value; }

QueryNode technique(TechniqueSpec spec) { return QueryNode{std::move(spec)}; }

QueryNode op(OperatorKind kind, std::vector<QueryNode> operands, std::optional<std::int64_t> theta) {
  return QueryNode{OperatorNode{kind, std::move(operands), theta}};
}

namespace {

[[noreturn]] void syntax(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::SyntaxError, what, path);
}

std::optional<OperatorKind> parse_operator_kind(const std::string& s) {
  if (s == "OR") return OperatorKind::OR;
  if (s == "AND") return OperatorKind::AND;
  if (s == "AFTER") return OperatorKind::AFTER;
  if (s == "NEAR") return OperatorKind::NEAR;
  if (s == "NOT") return OperatorKind::NOT;
  return std::nullopt;
}

QueryNode node_from_json(const json& j, const std::string& path) {
  if (!j.is_object() || j.size() != 1) {
    syntax(path, "node must be an object with exactly one of 'technique' or 'operator'");
  }
  if (j.contains("technique")) {
    return QueryNode{technique_from_json(j.at("technique"), path + ".technique")};
  }
  if (!j.contains("operator")) syntax(path, "node must contain 'technique' or 'operator'");

  const auto& o = j.at("operator");
  const auto opath = path + ".operator";
  if (!o.is_object()) syntax(opath, "operator must be an object");
  for (const auto& [key, value] : o.items()) {
    if (key != "op" && key != "theta" && key != "operands") {
      syntax(opath + "." + key, "unexpected key in operator");
    }
  }
  if (!o.contains("op") || !o.at("op").is_string()) syntax(opath + ".op", "missing operator name");
  const auto kind = parse_operator_kind(o.at("op").get<std::string>());
  if (!kind) {
    throw Error(ErrorCode::UnknownTechnique,
                "unknown operator '" + o.at("op").get<std::string>() + "'", opath + ".op");
  }
  OperatorNode node;
  node.op = *kind;
  if (!o.contains("operands") || !o.at("operands").is_array()) {
    syntax(opath + ".operands", "operands must be an array");
  }
  const auto& operands = o.at("operands");
  for (std::size_t i = 0; i < operands.size(); ++i) {
    node.operands.push_back(node_from_json(operands[i], opath + ".operands[" + std::to_string(i) + "]"));
  }

  const bool chain = node.op == OperatorKind::AFTER || node.op == OperatorKind::NEAR;
  if (o.contains("theta") && !o.at("theta").is_null()) {
    if (!chain) {
      throw Error(ErrorCode::ParameterOutOfRange,
                  std::string(to_string(node.op)) + " takes no theta", opath + ".theta");
    }
    const auto& t = o.at("theta");
    if (!t.is_number_integer() || t.get<std::int64_t>() < 0) {
      throw Error(ErrorCode::ParameterOutOfRange, "theta must be a non-negative integer",
                  opath + ".theta");
    }
    node.theta = t.get<std::int64_t>();
  }

  const auto name = std::string(to_string(node.op));
  const auto count = node.operands.size();
  if (node.op == OperatorKind::NOT && count != 1) {
    throw Error(ErrorCode::ArityError, "NOT requires exactly 1 operand, got " + std::to_string(count),
                opath);
  }
  if (node.op != OperatorKind::NOT && count < 2) {
    throw Error(ErrorCode::ArityError,
                name + " requires at least 2 operands, got " + std::to_string(count), opath);
  }
  if (chain && !node.theta) {
    throw Error(ErrorCode::ArityError, name + " requires theta", opath + ".theta");
  }
  return QueryNode{std::move(node)};
}

}  // namespace

QuerySpec query_from_json(const json& doc) {
  if (!doc.is_object()) syntax("$", "query must be an object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "levels") syntax("$." + key, "unexpected key in query");
  }
  if (!doc.contains("levels") || !doc.at("levels").is_array()) {
    syntax("$.levels", "query requires a 'levels' array");
  }
  const auto& levels = doc.at("levels");
  if (levels.empty()) syntax("$.levels", "query needs at least one level");
  QuerySpec query;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const auto path = "$.levels[" + std::to_string(i) + "]";
    const auto& level = levels[i];
    if (!level.is_object()) syntax(path, "level must be an object");
    for (const auto& [key, value] : level.items()) {
      if (key != "selector" && key != "node") syntax(path + "." + key, "unexpected key in level");
    }
    QueryLevel out;
    if (level.contains("selector")) {
      const auto& s = level.at("selector");
      if (s == "all") out.selector = Selector::all;
      else if (s == "bookmarked_only") out.selector = Selector::bookmarked_only;
      else syntax(path + ".selector", "selector must be 'all' or 'bookmarked_only'");
    }
    if (!level.contains("node")) syntax(path + ".node", "level requires a node");
    out.node = node_from_json(level.at("node"), path + ".node");
    query.levels.push_back(std::move(out));
  }
  return query;
}

QuerySpec parse_query(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SyntaxError, e.what(), "byte " + std::to_string(e.byte));
  } catch (const json::exception& e) {
    // number overflow and similar are syntax errors of the document too
    throw Error(ErrorCode::SyntaxError, e.what());
  }
  return query_from_json(doc);
}

json node_to_json(const QueryNode& node) {
  if (const auto* t = std::get_if<TechniqueSpec>(&node.value)) {
    return json{{"technique", technique_to_json(*t)}};
  }
  const auto& o = std::get<OperatorNode>(node.value);
  json operands = json::array();
  for (const auto& child : o.operands) operands.push_back(node_to_json(child));
  json body{{"op", std::string(to_string(o.op))}, {"operands", operands}};
  if (o.theta) body["theta"] = *o.theta;
  return json{{"operator", body}};
}

json query_to_json(const QuerySpec& query) {
  json levels = json::array();
  for (const auto& level : query.levels) {
    levels.push_back({{"selector", level.selector == Selector::all ? "all" : "bookmarked_only"},
                      {"node", node_to_json(level.node)}});
  }
  return json{{"levels", levels}};
}

std::string serialize_query(const QuerySpec& query) { return query_to_json(query).dump(2) + "\n"; }

std::string node_tag(const QueryNode& node) {
  if (const auto* t = std::get_if<TechniqueSpec>(&node.value)) return describe(*t);
  const auto& o = std::get<OperatorNode>(node.value);
  std::string tag(to_string(o.op));
  if (o.theta) tag += "(theta=" + std::to_string(*o.theta) + ")";
  tag += "[";
  for (std::size_t i = 0; i < o.operands.size(); ++i) {
    if (i > 0) tag += ", ";
    tag += node_tag(o.operands[i]);
  }
  tag += "]";
  return tag;
}

namespace {

void check_node(const QueryNode& node, const TimeSeries& series) {
  if (const auto* t = std::get_if<TechniqueSpec>(&node.value)) {
    check_compatible(*t, series);
    return;
  }
  for (const auto& child : std::get<OperatorNode>(node.value).operands) check_node(child, series);
}

}  // namespace

void check_compatible(const QuerySpec& query, const TimeSeries& series) {
  for (const auto& level : query.levels) check_node(level.node, series);
}

}  // namespace multiseg
