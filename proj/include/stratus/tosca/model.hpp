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
//
// In-memory TOSCA domain model: service templates, the node type system with
// derived_from inheritance, constraint clauses, and intrinsic function
// evaluation. No parsing or I/O lives here.

#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "stratus/value.hpp"

namespace stratus::tosca {

inline constexpr std::string_view kSupportedVersion = "tosca_simple_yaml_1_0";

enum class ConstraintKind { valid_values, equal, greater_or_equal, less_or_equal, in_range };

std::string_view constraint_kind_name(ConstraintKind kind);
std::optional<ConstraintKind> constraint_kind_from(std::string_view name);

struct ConstraintClause {
  ConstraintKind kind = ConstraintKind::equal;
  // valid_values and in_range carry a list; the others a single value.
  Value operand;

  bool operator==(const ConstraintClause&) const = default;
};

struct ConstraintViolation {
  ConstraintClause clause;
  std::string message;

  bool operator==(const ConstraintViolation&) const = default;
};

struct ConstraintReport {
  std::vector<ConstraintViolation> violations;

  bool satisfied() const { return violations.empty(); }
  bool operator==(const ConstraintReport&) const = default;
};

// Every violated clause in declaration order. Throws IncompatibleOperand for
// clause/value type mismatches (a malformed type definition, not user input).
ConstraintReport check_constraints(const Value& value,
                                   const std::vector<ConstraintClause>& clauses);

struct PropertyDefinition {
  std::string type = "string";
  bool required = true;
  std::optional<Value> default_value;
  std::vector<ConstraintClause> constraints;

  bool operator==(const PropertyDefinition&) const = default;
};

struct CapabilityDefinition {
  std::string type;
  std::map<std::string, PropertyDefinition> properties;

  bool operator==(const CapabilityDefinition&) const = default;
};

struct ArtifactDefinition {
  std::string file;
  std::string type;

  bool operator==(const ArtifactDefinition&) const = default;
};

struct OperationDefinition {
  std::string implementation;
  ValueMap inputs;

  bool operator==(const OperationDefinition&) const = default;
};

struct InterfaceDefinition {
  std::map<std::string, OperationDefinition> operations;

  bool operator==(const InterfaceDefinition&) const = default;
};

struct NodeTypeDefinition {
  std::string name;
  std::optional<std::string> derived_from;
  std::map<std::string, PropertyDefinition> properties;
  std::map<std::string, CapabilityDefinition> capabilities;
  std::map<std::string, ArtifactDefinition> artifacts;
  std::map<std::string, InterfaceDefinition> interfaces;

  bool operator==(const NodeTypeDefinition&) const = default;
};

struct CapabilityAssignment {
  ValueMap properties;

  bool operator==(const CapabilityAssignment&) const = default;
};

struct RequirementAssignment {
  std::string name;    // e.g. "host", "lrms", "wn"
  std::string target;  // node template name

  bool operator==(const RequirementAssignment&) const = default;
};

struct NodeTemplate {
  std::string name;
  std::string type_name;
  ValueMap properties;
  std::map<std::string, CapabilityAssignment> capabilities;
  std::vector<RequirementAssignment> requirements;
  std::map<std::string, ArtifactDefinition> artifacts;
  std::map<std::string, InterfaceDefinition> interfaces;

  bool operator==(const NodeTemplate&) const = default;
};

struct InputDefinition {
  std::string type = "string";
  std::optional<Value> default_value;
  std::string description;

  bool operator==(const InputDefinition&) const = default;
};

struct OutputDefinition {
  std::string description;
  Value value;

  bool operator==(const OutputDefinition&) const = default;
};

struct TopologyTemplate {
  std::map<std::string, InputDefinition> inputs;
  std::map<std::string, NodeTemplate> node_templates;
  std::map<std::string, OutputDefinition> outputs;

  bool operator==(const TopologyTemplate&) const = default;
};

struct ImportReference {
  std::string name;       // alias key, e.g. "indigo_types"
  std::string reference;  // e.g. "indigo-dc/tosca-types/master/custom_types.yaml"

  bool operator==(const ImportReference&) const = default;
};

struct ServiceTemplate {
  std::string definitions_version;
  std::string description;
  std::vector<ImportReference> imports;
  std::map<std::string, NodeTypeDefinition> node_types;
  TopologyTemplate topology;

  bool operator==(const ServiceTemplate&) const = default;
};

/// Named node type definitions plus a memoized flatten cache. Lookup is
/// const and thread-safe; building the registry is not.
class TypeRegistry {
 public:
  TypeRegistry() = default;
  // The flatten cache is derived data; copies and moves start with a cold one.
  TypeRegistry(const TypeRegistry& other) : types_(other.types_) {}
  TypeRegistry(TypeRegistry&& other) noexcept : types_(std::move(other.types_)) {}
  TypeRegistry& operator=(const TypeRegistry& other);
  TypeRegistry& operator=(TypeRegistry&& other) noexcept;

  void add(NodeTypeDefinition def);
  bool contains(const std::string& name) const;
  const NodeTypeDefinition* find(const std::string& name) const;
  const std::map<std::string, NodeTypeDefinition>& all() const { return types_; }

  // Fully merged definition, derived_from chain walked to the root; child
  // entries override parent entries key-by-key. Memoized per registry.
  const NodeTypeDefinition& flatten(const std::string& name) const;

 private:
  std::map<std::string, NodeTypeDefinition> types_;
  mutable std::mutex cache_mu_;
  mutable std::map<std::string, std::shared_ptr<const NodeTypeDefinition>> cache_;
};

NodeTypeDefinition flatten_type(const std::string& type_name, const TypeRegistry& registry);

// True when `candidate` equals `ancestor` or derives from it.
bool type_derives_from(const std::string& candidate, const std::string& ancestor,
                       const TypeRegistry& registry);

/// Runtime attribute bindings, filled in by the orchestrator once instances
/// exist: node name → attribute name → value (lists for multi-instance nodes).
class AttributeStore {
 public:
  void set(const std::string& node, const std::string& attribute, Value value);
  const Value* find(const std::string& node, const std::string& attribute) const;

 private:
  std::map<std::string, ValueMap> attributes_;
};

/// Static property lookup against some topology representation. The resolved
/// graph implements this; plain-template evaluation uses TemplateSource.
class PropertySource {
 public:
  virtual ~PropertySource() = default;
  virtual bool has_node(const std::string& node) const = 0;
  // Property value after type-default substitution; nullopt when undeclared.
  virtual std::optional<Value> property(const std::string& node,
                                        const std::string& name) const = 0;
};

/// PropertySource over an unresolved template: node properties fall back to
/// the flattened type's declared defaults.
class TemplateSource : public PropertySource {
 public:
  TemplateSource(const TopologyTemplate& topology, const TypeRegistry& registry)
      : topology_(topology), registry_(registry) {}

  bool has_node(const std::string& node) const override;
  std::optional<Value> property(const std::string& node,
                                const std::string& name) const override;

 private:
  const TopologyTemplate& topology_;
  const TypeRegistry& registry_;
};

struct EvalContext {
  const PropertySource* nodes = nullptr;
  const std::map<std::string, InputDefinition>* input_definitions = nullptr;
  const ValueMap* inputs = nullptr;
  const AttributeStore* runtime = nullptr;
  std::string self;  // node bound to SELF, may be empty
};

// Evaluates one intrinsic. get_input consults supplied inputs then declared
// defaults; get_property re-evaluates FunctionExpr-valued properties
// recursively; get_attribute requires ctx.runtime.
Value evaluate_function(const FunctionExpr& expr, const EvalContext& ctx);

// Recursively replaces every FunctionExpr inside `value`.
Value evaluate_value(const Value& value, const EvalContext& ctx);

// Convenience form matching the module contract.
Value evaluate_function(const FunctionExpr& expr, const TopologyTemplate& topology,
                        const TypeRegistry& registry, const ValueMap& inputs,
                        const AttributeStore* runtime = nullptr,
                        const std::string& self = {});

}  // namespace stratus::tosca
