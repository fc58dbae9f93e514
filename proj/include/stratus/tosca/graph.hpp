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
// Resolved topology graph: node templates merged with their flattened types,
// explicit and implicit dependency edges, and template validation.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stratus/tosca/model.hpp"
#include "stratus/tosca/parser.hpp"

namespace stratus::tosca {

enum class EdgeKind { HostedOn, DependsOn };

std::string_view edge_kind_name(EdgeKind kind);

struct Edge {
  std::string source;
  std::string target;
  EdgeKind kind = EdgeKind::DependsOn;

  bool operator==(const Edge&) const = default;
  auto operator<=>(const Edge&) const = default;
};

/// A node template merged with its flattened type: property and capability
/// defaults substituted, artifacts and interfaces inherited.
struct ResolvedNode {
  std::string name;
  NodeTypeDefinition type;              // flattened definition
  std::vector<std::string> type_chain;  // self first, root last
  ValueMap properties;
  std::map<std::string, CapabilityAssignment> capabilities;
  std::vector<RequirementAssignment> requirements;
  std::map<std::string, ArtifactDefinition> artifacts;
  std::map<std::string, InterfaceDefinition> interfaces;

  bool derives_from(std::string_view ancestor) const;
  bool is_compute() const { return derives_from("tosca.nodes.Compute"); }

  const Value* capability_property(const std::string& capability,
                                   const std::string& property) const;
};

struct TopologyGraph {
  std::map<std::string, ResolvedNode> nodes;
  std::vector<Edge> edges;  // sorted by (source, target, kind), deduplicated
  std::map<std::string, InputDefinition> inputs;
  std::map<std::string, OutputDefinition> outputs;

  // Direct HostedOn target, then the compute node at the end of the chain.
  std::optional<std::string> host_of(const std::string& node) const;
  std::optional<std::string> compute_host(const std::string& node) const;
};

/// PropertySource over resolved nodes (defaults already substituted).
class GraphSource : public PropertySource {
 public:
  explicit GraphSource(const TopologyGraph& graph) : graph_(graph) {}
  bool has_node(const std::string& node) const override;
  std::optional<Value> property(const std::string& node,
                                const std::string& name) const override;

 private:
  const TopologyGraph& graph_;
};

// One ResolvedNode per template. A `host` requirement becomes a HostedOn
// edge, any other requirement a DependsOn edge, and get_property /
// get_attribute expressions naming another node add implicit DependsOn edges.
// Throws UnknownType, DanglingRequirement, CyclicTopology.
TopologyGraph build_graph(const ServiceTemplate& tmpl, const TypeRegistry& registry);

// Dependency-first deterministic order: a node appears after everything it
// points at; ties break lexicographically.
std::vector<std::string> topological_order(const TopologyGraph& graph);

struct Finding {
  std::string node;
  std::string rule;
  std::string message;

  bool operator==(const Finding&) const = default;
};

struct ValidationReport {
  std::vector<Finding> errors;
  std::vector<Finding> warnings;

  bool ok() const { return errors.empty(); }
};

// Required properties, constraint clauses, scaling bounds, endpoint network
// names, host out-degree, capability names, and acyclicity. Findings only,
// never throws for template faults.
ValidationReport validate(const TopologyGraph& graph);

// Full pipeline for a document: parse, resolve imports, build, validate.
// Structural errors become report entries instead of exceptions.
ValidationReport validate_document(const std::string& text, const ImportResolver& resolver);

/// One contextualization step folded from a software node's lifecycle
/// interface (an Ansible role or playbook run, modeled as metadata).
struct ConfigTask {
  std::string node;            // software node template name
  std::string operation;       // "<interface>.<operation>"
  std::string implementation;  // artifact or playbook reference
  ValueMap inputs;             // unevaluated expressions

  bool operator==(const ConfigTask&) const = default;
};

// Tasks for every software node hosted on `compute_node`, dependency order
// first, lifecycle order (create, configure, start) within a node.
std::vector<ConfigTask> config_tasks(const TopologyGraph& graph,
                                     const std::string& compute_node);

/// Instance-count bounds for a compute node. When a hosted software node
/// carries worker-node bounds (min_instances / max_instances on one of its
/// capabilities), those govern and the initial count is min_instances.
struct ScalingBounds {
  std::int64_t count = 1;
  std::int64_t min_instances = 1;
  std::int64_t max_instances = 1;
  bool elastic = false;

  bool operator==(const ScalingBounds&) const = default;
};

ScalingBounds scaling_bounds(const TopologyGraph& graph, const std::string& compute_node);

}  // namespace stratus::tosca
