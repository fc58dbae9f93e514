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

#include "stratus/tosca/graph.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "stratus/error.hpp"

namespace stratus::tosca {

std::string_view edge_kind_name(EdgeKind kind) {
  return kind == EdgeKind::HostedOn ? "HostedOn" : "DependsOn";
}

bool ResolvedNode::derives_from(std::string_view ancestor) const {
  return std::find(type_chain.begin(), type_chain.end(), ancestor) != type_chain.end();
}

const Value* ResolvedNode::capability_property(const std::string& capability,
                                               const std::string& property) const {
  auto cit = capabilities.find(capability);
  if (cit == capabilities.end()) return nullptr;
  auto pit = cit->second.properties.find(property);
  return pit == cit->second.properties.end() ? nullptr : &pit->second;
}

std::optional<std::string> TopologyGraph::host_of(const std::string& node) const {
  for (const auto& edge : edges) {
    if (edge.kind == EdgeKind::HostedOn && edge.source == node) return edge.target;
  }
  return std::nullopt;
}

std::optional<std::string> TopologyGraph::compute_host(const std::string& node) const {
  std::string cursor = node;
  for (size_t hops = 0; hops <= nodes.size(); ++hops) {
    auto it = nodes.find(cursor);
    if (it == nodes.end()) return std::nullopt;
    if (it->second.is_compute()) return cursor;
    auto next = host_of(cursor);
    if (!next) return std::nullopt;
    cursor = *next;
  }
  return std::nullopt;
}

bool GraphSource::has_node(const std::string& node) const {
  return graph_.nodes.count(node) > 0;
}

std::optional<Value> GraphSource::property(const std::string& node,
                                           const std::string& name) const {
  auto nit = graph_.nodes.find(node);
  if (nit == graph_.nodes.end()) return std::nullopt;
  auto pit = nit->second.properties.find(name);
  if (pit == nit->second.properties.end()) return std::nullopt;
  return pit->second;
}

namespace {

std::vector<std::string> derivation_chain(const std::string& type_name,
                                          const TypeRegistry& registry) {
  std::vector<std::string> chain;
  std::set<std::string> seen;
  const std::string* cursor = &type_name;
  while (seen.insert(*cursor).second) {
    chain.push_back(*cursor);
    const NodeTypeDefinition* def = registry.find(*cursor);
    if (def == nullptr || !def->derived_from) break;
    cursor = &*def->derived_from;
  }
  return chain;
}

ResolvedNode resolve_node(const NodeTemplate& tmpl, const TypeRegistry& registry) {
  ResolvedNode node;
  node.name = tmpl.name;
  node.type = registry.flatten(tmpl.type_name);
  node.type_chain = derivation_chain(tmpl.type_name, registry);
  node.requirements = tmpl.requirements;

  for (const auto& [pname, pdef] : node.type.properties) {
    if (pdef.default_value) node.properties[pname] = *pdef.default_value;
  }
  for (const auto& [pname, value] : tmpl.properties) node.properties[pname] = value;

  for (const auto& [cname, cdef] : node.type.capabilities) {
    CapabilityAssignment merged;
    for (const auto& [pname, pdef] : cdef.properties) {
      if (pdef.default_value) merged.properties[pname] = *pdef.default_value;
    }
    node.capabilities[cname] = std::move(merged);
  }
  for (const auto& [cname, assignment] : tmpl.capabilities) {
    auto& slot = node.capabilities[cname];  // may introduce an undeclared capability
    for (const auto& [pname, value] : assignment.properties) slot.properties[pname] = value;
  }

  node.artifacts = node.type.artifacts;
  for (const auto& [aname, artifact] : tmpl.artifacts) node.artifacts[aname] = artifact;

  node.interfaces = node.type.interfaces;
  for (const auto& [iname, iface] : tmpl.interfaces) {
    auto& slot = node.interfaces[iname];
    for (const auto& [op, def] : iface.operations) slot.operations[op] = def;
  }
  return node;
}

void collect_node_refs(const Value& value, std::vector<std::string>& out) {
  if (value.is_function()) {
    const FunctionExpr& fn = value.as_function();
    if (fn.kind != FunctionKind::get_input && !fn.args.empty()) out.push_back(fn.args[0]);
    return;
  }
  if (value.is_list()) {
    for (const auto& item : value.as_list()) collect_node_refs(item, out);
  } else if (value.is_map()) {
    for (const auto& [key, item] : value.as_map()) collect_node_refs(item, out);
  }
}

void check_acyclic(const TopologyGraph& graph) {
  std::map<std::string, int> out_degree;
  for (const auto& [name, node] : graph.nodes) out_degree[name] = 0;
  for (const auto& edge : graph.edges) ++out_degree[edge.source];

  std::set<std::string> ready;
  for (const auto& [name, degree] : out_degree)
    if (degree == 0) ready.insert(name);

  size_t processed = 0;
  while (!ready.empty()) {
    const std::string node = *ready.begin();
    ready.erase(ready.begin());
    ++processed;
    for (const auto& edge : graph.edges) {
      if (edge.target == node && --out_degree[edge.source] == 0) ready.insert(edge.source);
    }
  }
  if (processed != graph.nodes.size()) {
    for (const auto& [name, degree] : out_degree) {
      if (degree > 0)
        throw Error(Errc::cyclic_topology, "dependency cycle through node " + name, name);
    }
  }
}

}  // namespace

TopologyGraph build_graph(const ServiceTemplate& tmpl, const TypeRegistry& registry) {
  TopologyGraph graph;
  graph.inputs = tmpl.topology.inputs;
  graph.outputs = tmpl.topology.outputs;

  for (const auto& [name, node_tmpl] : tmpl.topology.node_templates) {
    try {
      graph.nodes[name] = resolve_node(node_tmpl, registry);
    } catch (const Error& e) {
      if (e.code() == Errc::unknown_type) {
        throw Error(Errc::unknown_type, "node " + name + ": " + e.what(), name);
      }
      throw;
    }
  }

  std::set<Edge> edges;
  for (const auto& [name, node] : graph.nodes) {
    for (const auto& req : node.requirements) {
      if (graph.nodes.count(req.target) == 0)
        throw Error(Errc::dangling_requirement,
                    "requirement '" + req.name + "' of node " + name +
                        " targets unknown node " + req.target,
                    name);
      edges.insert({name, req.target,
                    req.name == "host" ? EdgeKind::HostedOn : EdgeKind::DependsOn});
    }

    std::vector<std::string> refs;
    for (const auto& [pname, value] : node.properties) collect_node_refs(value, refs);
    for (const auto& [cname, cap] : node.capabilities)
      for (const auto& [pname, value] : cap.properties) collect_node_refs(value, refs);
    for (const auto& [iname, iface] : node.interfaces)
      for (const auto& [op, def] : iface.operations)
        for (const auto& [in, value] : def.inputs) collect_node_refs(value, refs);
    for (const auto& ref : refs) {
      if (ref == "SELF" || ref == name || graph.nodes.count(ref) == 0) continue;
      edges.insert({name, ref, EdgeKind::DependsOn});
    }
  }
  graph.edges.assign(edges.begin(), edges.end());

  check_acyclic(graph);
  return graph;
}

std::vector<std::string> topological_order(const TopologyGraph& graph) {
  std::map<std::string, int> out_degree;
  for (const auto& [name, node] : graph.nodes) out_degree[name] = 0;
  for (const auto& edge : graph.edges) ++out_degree[edge.source];

  std::set<std::string> ready;
  for (const auto& [name, degree] : out_degree)
    if (degree == 0) ready.insert(name);

  std::vector<std::string> order;
  order.reserve(graph.nodes.size());
  while (!ready.empty()) {
    const std::string node = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(node);
    for (const auto& edge : graph.edges) {
      if (edge.target == node && --out_degree[edge.source] == 0) ready.insert(edge.source);
    }
  }
  return order;
}

namespace {

std::optional<std::int64_t> as_int(const Value* value) {
  if (value != nullptr && value->is_int()) return value->as_int();
  return std::nullopt;
}

void check_bounds(const ResolvedNode& node, ValidationReport& report) {
  for (const auto& [cname, cap] : node.capabilities) {
    auto find = [&](const char* key) {
      auto it = cap.properties.find(key);
      return it == cap.properties.end() ? nullptr : &it->second;
    };
    auto min = as_int(find("min_instances"));
    auto max = as_int(find("max_instances"));
    auto count = as_int(find("count"));
    if (min && max && *min > *max) {
      report.errors.push_back(
          {node.name, "bounds",
           "capability " + cname + ": min_instances " + std::to_string(*min) +
               " exceeds max_instances " + std::to_string(*max)});
      continue;
    }
    if (count && min && *count < *min)
      report.errors.push_back({node.name, "bounds",
                               "capability " + cname + ": count " + std::to_string(*count) +
                                   " below min_instances " + std::to_string(*min)});
    if (count && max && *count > *max)
      report.errors.push_back({node.name, "bounds",
                               "capability " + cname + ": count " + std::to_string(*count) +
                                   " above max_instances " + std::to_string(*max)});
  }
}

}  // namespace

ValidationReport validate(const TopologyGraph& graph) {
  ValidationReport report;

  for (const auto& [name, node] : graph.nodes) {
    // Required properties after default substitution.
    for (const auto& [pname, pdef] : node.type.properties) {
      if (pdef.required && node.properties.count(pname) == 0)
        report.errors.push_back(
            {name, "required-property", "required property " + pname + " is not assigned"});
    }

    // Constraint clauses on node properties, then capability properties.
    auto check_value = [&](const std::string& label, const Value& value,
                           const std::vector<ConstraintClause>& clauses) {
      if (clauses.empty() || value.contains_function()) return;
      try {
        for (const auto& violation : check_constraints(value, clauses).violations)
          report.errors.push_back({name, "constraint", label + ": " + violation.message});
      } catch (const Error& e) {
        report.errors.push_back({name, "constraint", label + ": " + e.what()});
      }
    };
    for (const auto& [pname, value] : node.properties) {
      auto pit = node.type.properties.find(pname);
      if (pit != node.type.properties.end()) check_value(pname, value, pit->second.constraints);
    }
    for (const auto& [cname, cap] : node.capabilities) {
      auto cit = node.type.capabilities.find(cname);
      if (cit == node.type.capabilities.end()) {
        report.errors.push_back({name, "capability",
                                 "capability " + cname + " is not declared by type " +
                                     node.type.name});
        continue;
      }
      for (const auto& [pname, value] : cap.properties) {
        auto pit = cit->second.properties.find(pname);
        if (pit != cit->second.properties.end())
          check_value(cname + "." + pname, value, pit->second.constraints);
      }
      for (const auto& [pname, pdef] : cit->second.properties) {
        if (pdef.required && !pdef.default_value && cap.properties.count(pname) == 0)
          report.errors.push_back({name, "required-property",
                                   "required capability property " + cname + "." + pname +
                                       " is not assigned"});
      }
    }

    // Endpoint networks are simulated overlay names, not arbitrary strings.
    if (const Value* network = node.capability_property("endpoint", "network_name")) {
      if (!network->is_string() ||
          (network->as_string() != "PUBLIC" && network->as_string() != "PRIVATE"))
        report.errors.push_back(
            {name, "network",
             "endpoint network_name must be PUBLIC or PRIVATE, got " +
                 network->scalar_string()});
    }

    check_bounds(node, report);

    int hosts = 0;
    for (const auto& req : node.requirements)
      if (req.name == "host") ++hosts;
    if (hosts > 1)
      report.errors.push_back(
          {name, "host", "node declares " + std::to_string(hosts) + " host requirements"});
  }

  if (topological_order(graph).size() != graph.nodes.size()) {
    for (const auto& [name, node] : graph.nodes) {
      report.errors.push_back({name, "cycle", "node participates in a dependency cycle"});
      break;
    }
  }

  return report;
}

ValidationReport validate_document(const std::string& text, const ImportResolver& resolver) {
  ValidationReport report;
  std::vector<std::string> warnings;
  try {
    const ServiceTemplate tmpl = parse_service_template(text);
    const TypeRegistry registry = resolve_imports(tmpl, resolver, &warnings);
    for (const auto& warning : warnings) report.warnings.push_back({"", "import", warning});
    const TopologyGraph graph = build_graph(tmpl, registry);
    const ValidationReport inner = validate(graph);
    report.errors.insert(report.errors.end(), inner.errors.begin(), inner.errors.end());
    report.warnings.insert(report.warnings.end(), inner.warnings.begin(),
                           inner.warnings.end());
  } catch (const Error& e) {
    report.errors.push_back({e.subject(), std::string(errc_name(e.code())), e.what()});
  }
  return report;
}

namespace {

int lifecycle_rank(const std::string& op) {
  if (op == "create") return 0;
  if (op == "configure") return 1;
  if (op == "start") return 2;
  return 3;
}

}  // namespace

std::vector<ConfigTask> config_tasks(const TopologyGraph& graph,
                                     const std::string& compute_node) {
  std::vector<ConfigTask> tasks;
  for (const auto& name : topological_order(graph)) {
    const ResolvedNode& node = graph.nodes.at(name);
    if (node.is_compute()) continue;
    if (graph.compute_host(name) != std::optional<std::string>(compute_node)) continue;

    std::vector<std::pair<std::string, std::string>> ops;  // (interface, operation)
    for (const auto& [iname, iface] : node.interfaces)
      for (const auto& [op, def] : iface.operations)
        if (!def.implementation.empty()) ops.emplace_back(iname, op);
    std::stable_sort(ops.begin(), ops.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first < b.first;
      auto ra = lifecycle_rank(a.second), rb = lifecycle_rank(b.second);
      return ra != rb ? ra < rb : a.second < b.second;
    });

    for (const auto& [iname, op] : ops) {
      const OperationDefinition& def = node.interfaces.at(iname).operations.at(op);
      tasks.push_back({name, iname + "." + op, def.implementation, def.inputs});
    }
  }
  return tasks;
}

ScalingBounds scaling_bounds(const TopologyGraph& graph, const std::string& compute_node) {
  ScalingBounds bounds;
  auto nit = graph.nodes.find(compute_node);
  if (nit == graph.nodes.end()) return bounds;

  if (auto v = as_int(nit->second.capability_property("scalable", "count"))) bounds.count = *v;
  if (auto v = as_int(nit->second.capability_property("scalable", "min_instances")))
    bounds.min_instances = *v;
  if (auto v = as_int(nit->second.capability_property("scalable", "max_instances")))
    bounds.max_instances = *v;

  // Worker-node bounds on a hosted software node override the host's own
  // scalable range; such nodes start at min_instances and grow on demand.
  for (const auto& [name, node] : graph.nodes) {
    if (node.is_compute() || graph.compute_host(name) != std::optional(compute_node)) continue;
    for (const auto& [cname, cap] : node.capabilities) {
      if (cname == "scalable") continue;
      auto min = as_int(node.capability_property(cname, "min_instances"));
      auto max = as_int(node.capability_property(cname, "max_instances"));
      if (min || max) {
        bounds.elastic = true;
        if (min) bounds.min_instances = *min;
        if (max) bounds.max_instances = *max;
        bounds.count = bounds.min_instances;
        return bounds;
      }
    }
  }
  return bounds;
}

}  // namespace stratus::tosca
