#include "multiseg/operators.hpp"

#include <algorithm>

namespace multiseg {

using Indices = OperatorTemplate::Indices;

std::optional<SplitCache::Entry> SplitCache::get(const std::string& key) const {
  std::lock_guard lock(mutex_);
  const auto it = entries_.find(key);
  if (it == entries_.end()) {
    ++misses_;
    return std::nullopt;
  }
  ++hits_;
  return it->second;
}

void SplitCache::put(const std::string& key, Entry entry) {
  std::lock_guard lock(mutex_);
  entries_.insert_or_assign(key, std::move(entry));
}

void SplitCache::clear() {
  std::lock_guard lock(mutex_);
  entries_.clear();
  hits_ = misses_ = 0;
}

std::size_t SplitCache::hits() const {
  std::lock_guard lock(mutex_);
  return hits_;
}

std::size_t SplitCache::misses() const {
  std::lock_guard lock(mutex_);
  return misses_;
}

std::size_t SplitCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::string SplitCache::key(const QueryNode& node, RecordIndex from, RecordIndex to) {
  return std::to_string(from) + ":" + std::to_string(to) + "|" + node_tag(node);
}

namespace {

// Both inputs sorted and unique.
Indices intersect(const Indices& a, const Indices& b) {
  Indices out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// Keeps a in `fresh` when some b in `next` is reachable: 0 <= b - a <= theta
// (AFTER) or |b - a| <= theta (NEAR). `next` holds the chain starts of the
// remaining operands, so the kept a extend a full chain.
Indices chain_step(const Indices& fresh, const Indices& next, std::int64_t theta, bool symmetric) {
  Indices out;
  for (const auto a : fresh) {
    const auto lo = symmetric ? a - theta : a;
    const auto it = std::lower_bound(next.begin(), next.end(), lo);
    if (it != next.end() && *it <= a + theta) out.push_back(a);
  }
  return out;
}

}  // namespace

OperatorTemplate operator_template(OperatorKind op, std::optional<std::int64_t> theta,
                                   std::int64_t length) {
  OperatorTemplate t;
  switch (op) {
    case OperatorKind::OR:
      t.f = [](const Indices& fresh, std::optional<Indices> out) {
        Indices merged = out ? std::move(*out) : Indices{};
        merged.insert(merged.end(), fresh.begin(), fresh.end());
        return merged;
      };
      break;
    case OperatorKind::AND:
      t.f = [](const Indices& fresh, std::optional<Indices> out) {
        return out ? intersect(*out, fresh) : fresh;
      };
      break;
    case OperatorKind::AFTER:
    case OperatorKind::NEAR: {
      const bool symmetric = op == OperatorKind::NEAR;
      const auto th = theta.value_or(0);
      t.reverse = true;
      t.f = [th, symmetric](const Indices& fresh, std::optional<Indices> out) {
        return out ? chain_step(fresh, *out, th, symmetric) : fresh;
      };
      break;
    }
    case OperatorKind::NOT: {
      Indices universe;
      for (std::int64_t i = 1; i < length; ++i) universe.push_back(i);
      t.init = std::move(universe);
      t.f = [](const Indices& fresh, std::optional<Indices> out) {
        Indices kept;
        std::set_difference(out->begin(), out->end(), fresh.begin(), fresh.end(),
                            std::back_inserter(kept));
        return kept;
      };
      break;
    }
  }
  return t;
}

SplitIndexList run_template(const OperatorTemplate& tmpl, std::span<const SplitIndexList> operands) {
  if (operands.empty()) {
    throw Error(ErrorCode::ArityError, "operator needs at least one operand");
  }
  const auto length = operands.front().length();
  for (const auto& o : operands) {
    if (o.length() != length) {
      throw Error(ErrorCode::InvalidParameter, "operand split lists cover different ranges");
    }
  }
  std::optional<Indices> out = tmpl.init;
  const auto step = [&](const SplitIndexList& operand) {
    const auto interior = operand.interior();
    out = tmpl.f(Indices(interior.begin(), interior.end()), std::move(out));
    std::sort(out->begin(), out->end());
    out->erase(std::unique(out->begin(), out->end()), out->end());
  };
  if (tmpl.reverse) {
    for (auto it = operands.rbegin(); it != operands.rend(); ++it) step(*it);
  } else {
    for (const auto& operand : operands) step(operand);
  }
  return SplitIndexList::from_interior(length, out.value_or(Indices{}));
}

SplitIndexList combine(OperatorKind op, std::optional<std::int64_t> theta,
                       std::span<const SplitIndexList> operands) {
  const auto length = operands.empty() ? 1 : operands.front().length();
  return run_template(operator_template(op, theta, length), operands);
}

SplitIndexList apply_operator(const OperatorNode& node, const TimeSeries& series, RecordIndex from,
                              RecordIndex to, const NodeContext& context) {
  std::vector<SplitIndexList> operands;
  operands.reserve(node.operands.size());
  for (const auto& operand : node.operands) {
    operands.push_back(evaluate_node(operand, series, from, to, context));
  }
  return combine(node.op, node.theta, operands);
}

SplitIndexList evaluate_node(const QueryNode& node, const TimeSeries& series, RecordIndex from,
                             RecordIndex to, const NodeContext& context) {
  std::string key;
  if (context.cache != nullptr) {
    key = SplitCache::key(node, from, to);
    if (auto hit = context.cache->get(key)) {
      if (context.warnings != nullptr) {
        context.warnings->insert(context.warnings->end(), hit->warnings.begin(), hit->warnings.end());
      }
      return std::move(hit->splits);
    }
  }
  std::vector<std::string> local;
  NodeContext inner{context.cache, &local};
  SplitIndexList result = std::holds_alternative<TechniqueSpec>(node.value)
                              ? get_split_indices(std::get<TechniqueSpec>(node.value), series, from,
                                                  to, &local)
                              : apply_operator(std::get<OperatorNode>(node.value), series, from, to,
                                               inner);
  if (context.cache != nullptr) context.cache->put(key, {result, local});
  if (context.warnings != nullptr) {
    context.warnings->insert(context.warnings->end(), local.begin(), local.end());
  }
  return result;
}

}  // namespace multiseg
