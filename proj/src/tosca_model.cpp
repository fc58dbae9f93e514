// Copyright 2026 The Stratus Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "stratus/tosca/model.hpp"

#include <set>

#include "stratus/error.hpp"

namespace stratus::tosca {

std::string_view constraint_kind_name(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::valid_values: return "valid_values";
    case ConstraintKind::equal: return "equal";
    case ConstraintKind::greater_or_equal: return "greater_or_equal";
    case ConstraintKind::less_or_equal: return "less_or_equal";
    case ConstraintKind::in_range: return "in_range";
  }
  return "equal";
}

std::optional<ConstraintKind> constraint_kind_from(std::string_view name) {
  if (name == "valid_values") return ConstraintKind::valid_values;
  if (name == "equal") return ConstraintKind::equal;
  if (name == "greater_or_equal") return ConstraintKind::greater_or_equal;
  if (name == "less_or_equal") return ConstraintKind::less_or_equal;
  if (name == "in_range") return ConstraintKind::in_range;
  return std::nullopt;
}

namespace {

// Cross-type numeric equality; other types match only themselves.
bool values_equal(const Value& a, const Value& b) {
  if (a.is_number() && b.is_number()) return a.as_number() == b.as_number();
  if (a.is_size() && b.is_size()) return a.as_size().bytes() == b.as_size().bytes();
  return a == b;
}

// Ordering exists only for numbers and sizes; range clauses against anything
// else indicate a malformed type definition.
int compare_ordered(const Value& a, const Value& b) {
  if (a.is_number() && b.is_number()) {
    double x = a.as_number(), y = b.as_number();
    return x < y ? -1 : (x > y ? 1 : 0);
  }
  if (a.is_size() && b.is_size()) {
    auto x = a.as_size().bytes(), y = b.as_size().bytes();
    return x < y ? -1 : (x > y ? 1 : 0);
  }
  throw Error(Errc::incompatible_operand,
              std::string("cannot order ") + std::string(a.type_name()) + " against " +
                  std::string(b.type_name()));
}

std::string violation_message(const ConstraintClause& clause, const Value& value) {
  std::string msg = "value ";
  msg += value.is_list() || value.is_map() ? std::string(value.type_name())
                                           : value.scalar_string();
  msg += " violates ";
  msg += constraint_kind_name(clause.kind);
  if (clause.kind == ConstraintKind::valid_values || clause.kind == ConstraintKind::in_range) {
    msg += " [";
    bool first = true;
    for (const auto& v : clause.operand.as_list()) {
      if (!first) msg += ", ";
      first = false;
      msg += v.scalar_string();
    }
    msg += "]";
  } else {
    msg += " " + clause.operand.scalar_string();
  }
  return msg;
}

bool clause_satisfied(const Value& value, const ConstraintClause& clause) {
  switch (clause.kind) {
    case ConstraintKind::equal:
      return values_equal(value, clause.operand);
    case ConstraintKind::valid_values: {
      if (!clause.operand.is_list())
        throw Error(Errc::incompatible_operand, "valid_values operand must be a list");
      for (const auto& candidate : clause.operand.as_list())
        if (values_equal(value, candidate)) return true;
      return false;
    }
    case ConstraintKind::greater_or_equal:
      return compare_ordered(value, clause.operand) >= 0;
    case ConstraintKind::less_or_equal:
      return compare_ordered(value, clause.operand) <= 0;
    case ConstraintKind::in_range: {
      if (!clause.operand.is_list() || clause.operand.as_list().size() != 2)
        throw Error(Errc::incompatible_operand, "in_range operand must be [lower, upper]");
      return compare_ordered(value, clause.operand.as_list()[0]) >= 0 &&
             compare_ordered(value, clause.operand.as_list()[1]) <= 0;
    }
  }
  return false;
}

}  // namespace

ConstraintReport check_constraints(const Value& value,
                                   const std::vector<ConstraintClause>& clauses) {
  ConstraintReport report;
  for (const auto& clause : clauses) {
    if (!clause_satisfied(value, clause))
      report.violations.push_back({clause, violation_message(clause, value)});
  }
  return report;
}

TypeRegistry& TypeRegistry::operator=(const TypeRegistry& other) {
  if (this != &other) {
    types_ = other.types_;
    std::lock_guard lock(cache_mu_);
    cache_.clear();
  }
  return *this;
}

TypeRegistry& TypeRegistry::operator=(TypeRegistry&& other) noexcept {
  if (this != &other) {
    types_ = std::move(other.types_);
    std::lock_guard lock(cache_mu_);
    cache_.clear();
  }
  return *this;
}

void TypeRegistry::add(NodeTypeDefinition def) {
  std::lock_guard lock(cache_mu_);
  cache_.clear();
  types_[def.name] = std::move(def);
}

bool TypeRegistry::contains(const std::string& name) const { return types_.count(name) > 0; }

const NodeTypeDefinition* TypeRegistry::find(const std::string& name) const {
  auto it = types_.find(name);
  return it == types_.end() ? nullptr : &it->second;
}

namespace {

// Child entries override parent entries key-by-key; capability and interface
// contents merge one level deeper so partial overrides keep siblings.
NodeTypeDefinition merge_onto(NodeTypeDefinition base, const NodeTypeDefinition& child) {
  base.name = child.name;
  base.derived_from = child.derived_from;
  for (const auto& [name, prop] : child.properties) base.properties[name] = prop;
  for (const auto& [name, cap] : child.capabilities) {
    auto& slot = base.capabilities[name];
    if (!cap.type.empty()) slot.type = cap.type;
    for (const auto& [pname, pdef] : cap.properties) slot.properties[pname] = pdef;
  }
  for (const auto& [name, artifact] : child.artifacts) base.artifacts[name] = artifact;
  for (const auto& [name, iface] : child.interfaces) {
    auto& slot = base.interfaces[name];
    for (const auto& [op, def] : iface.operations) slot.operations[op] = def;
  }
  return base;
}

}  // namespace

const NodeTypeDefinition& TypeRegistry::flatten(const std::string& name) const {
  {
    std::lock_guard lock(cache_mu_);
    if (auto it = cache_.find(name); it != cache_.end()) return *it->second;
  }

  // Collect the derivation chain root-first, failing on cycles.
  std::vector<const NodeTypeDefinition*> chain;
  std::set<std::string> seen;
  const std::string* cursor = &name;
  while (true) {
    if (!seen.insert(*cursor).second)
      throw Error(Errc::cyclic_derivation, "derivation cycle through type " + *cursor, name);
    const NodeTypeDefinition* def = find(*cursor);
    if (def == nullptr) throw Error(Errc::unknown_type, "unknown type " + *cursor, *cursor);
    chain.push_back(def);
    if (!def->derived_from) break;
    cursor = &*def->derived_from;
  }

  NodeTypeDefinition merged = *chain.back();
  for (auto it = chain.rbegin() + 1; it != chain.rend(); ++it) {
    merged = merge_onto(std::move(merged), **it);
  }

  std::lock_guard lock(cache_mu_);
  auto [it, inserted] =
      cache_.emplace(name, std::make_shared<const NodeTypeDefinition>(std::move(merged)));
  return *it->second;
}

NodeTypeDefinition flatten_type(const std::string& type_name, const TypeRegistry& registry) {
  return registry.flatten(type_name);
}

bool type_derives_from(const std::string& candidate, const std::string& ancestor,
                       const TypeRegistry& registry) {
  std::set<std::string> seen;
  const std::string* cursor = &candidate;
  while (seen.insert(*cursor).second) {
    if (*cursor == ancestor) return true;
    const NodeTypeDefinition* def = registry.find(*cursor);
    if (def == nullptr || !def->derived_from) return false;
    cursor = &*def->derived_from;
  }
  return false;
}

void AttributeStore::set(const std::string& node, const std::string& attribute, Value value) {
  attributes_[node][attribute] = std::move(value);
}

const Value* AttributeStore::find(const std::string& node, const std::string& attribute) const {
  auto nit = attributes_.find(node);
  if (nit == attributes_.end()) return nullptr;
  auto ait = nit->second.find(attribute);
  return ait == nit->second.end() ? nullptr : &ait->second;
}

bool TemplateSource::has_node(const std::string& node) const {
  return topology_.node_templates.count(node) > 0;
}

std::optional<Value> TemplateSource::property(const std::string& node,
                                              const std::string& name) const {
  auto nit = topology_.node_templates.find(node);
  if (nit == topology_.node_templates.end()) return std::nullopt;
  if (auto pit = nit->second.properties.find(name); pit != nit->second.properties.end())
    return pit->second;
  if (!registry_.contains(nit->second.type_name)) return std::nullopt;
  const NodeTypeDefinition& flat = registry_.flatten(nit->second.type_name);
  if (auto dit = flat.properties.find(name); dit != flat.properties.end())
    return dit->second.default_value;
  return std::nullopt;
}

namespace {

Value evaluate_function_impl(const FunctionExpr& expr, const EvalContext& ctx, int depth);

Value evaluate_value_impl(const Value& value, const EvalContext& ctx, int depth) {
  if (value.is_function()) return evaluate_function_impl(value.as_function(), ctx, depth);
  if (value.is_list()) {
    ValueList out;
    out.reserve(value.as_list().size());
    for (const auto& item : value.as_list()) out.push_back(evaluate_value_impl(item, ctx, depth));
    return Value(std::move(out));
  }
  if (value.is_map()) {
    ValueMap out;
    for (const auto& [key, item] : value.as_map())
      out[key] = evaluate_value_impl(item, ctx, depth);
    return Value(std::move(out));
  }
  return value;
}

std::string resolve_self(const std::string& name, const EvalContext& ctx) {
  if (name != "SELF") return name;
  if (ctx.self.empty())
    throw Error(Errc::unknown_reference, "SELF used outside a node context", name);
  return ctx.self;
}

Value evaluate_function_impl(const FunctionExpr& expr, const EvalContext& ctx, int depth) {
  if (depth > 32)
    throw Error(Errc::unknown_reference, "property expression recursion limit exceeded");

  switch (expr.kind) {
    case FunctionKind::get_input: {
      if (expr.args.size() != 1)
        throw Error(Errc::unknown_reference, "get_input expects one argument");
      const std::string& input = expr.args[0];
      if (ctx.inputs != nullptr) {
        if (auto it = ctx.inputs->find(input); it != ctx.inputs->end()) return it->second;
      }
      if (ctx.input_definitions != nullptr) {
        if (auto it = ctx.input_definitions->find(input); it != ctx.input_definitions->end()) {
          if (it->second.default_value) return *it->second.default_value;
          throw Error(Errc::unknown_reference,
                      "input " + input + " has no value and no default", input);
        }
      }
      throw Error(Errc::unknown_reference, "undeclared input " + input, input);
    }

    case FunctionKind::get_property: {
      if (expr.args.size() != 2)
        throw Error(Errc::unknown_reference, "get_property expects [node, property]");
      const std::string node = resolve_self(expr.args[0], ctx);
      if (ctx.nodes == nullptr || !ctx.nodes->has_node(node))
        throw Error(Errc::unknown_reference, "unknown node " + node, node);
      std::optional<Value> raw = ctx.nodes->property(node, expr.args[1]);
      if (!raw)
        throw Error(Errc::unknown_reference,
                    "node " + node + " has no property " + expr.args[1], node);
      EvalContext inner = ctx;
      inner.self = node;
      return evaluate_value_impl(*raw, inner, depth + 1);
    }

    case FunctionKind::get_attribute: {
      if (expr.args.size() != 2)
        throw Error(Errc::unknown_reference, "get_attribute expects [node, attribute]");
      const std::string node = resolve_self(expr.args[0], ctx);
      if (ctx.nodes != nullptr && !ctx.nodes->has_node(node))
        throw Error(Errc::unknown_reference, "unknown node " + node, node);
      if (ctx.runtime == nullptr)
        throw Error(Errc::attribute_unavailable,
                    "attribute " + expr.args[1] + " of " + node +
                        " is not available before deployment",
                    node);
      const Value* found = ctx.runtime->find(node, expr.args[1]);
      if (found == nullptr)
        throw Error(Errc::attribute_unavailable,
                    "attribute " + expr.args[1] + " of " + node + " is not set", node);
      return *found;
    }
  }
  throw Error(Errc::unknown_reference, "unhandled intrinsic");
}

}  // namespace

Value evaluate_function(const FunctionExpr& expr, const EvalContext& ctx) {
  return evaluate_function_impl(expr, ctx, 0);
}

Value evaluate_value(const Value& value, const EvalContext& ctx) {
  return evaluate_value_impl(value, ctx, 0);
}

Value evaluate_function(const FunctionExpr& expr, const TopologyTemplate& topology,
                        const TypeRegistry& registry, const ValueMap& inputs,
                        const AttributeStore* runtime, const std::string& self) {
  TemplateSource source(topology, registry);
  EvalContext ctx;
  ctx.nodes = &source;
  ctx.input_definitions = &topology.inputs;
  ctx.inputs = &inputs;
  ctx.runtime = runtime;
  ctx.self = self;
  return evaluate_function(expr, ctx);
}

}  // namespace stratus::tosca
