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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <string>

#include "fixtures.hpp"
#include "stratus/error.hpp"
#include "stratus/tosca/graph.hpp"

using namespace stratus;
using namespace stratus::tosca;
using stratus::testing::fixture_path;
using stratus::testing::read_fixture;

namespace {

ImportResolver fixture_resolver() {
  ImportResolver resolver;
  resolver.add_search_dir(fixture_path("types"));
  return resolver;
}

TopologyGraph graph_for(const std::string& relative) {
  ServiceTemplate tmpl = parse_service_template(read_fixture(relative));
  TypeRegistry registry = resolve_imports(tmpl, fixture_resolver());
  return build_graph(tmpl, registry);
}

TopologyGraph graph_from_text(const std::string& text) {
  ServiceTemplate tmpl = parse_service_template(text);
  TypeRegistry registry = resolve_imports(tmpl, fixture_resolver());
  return build_graph(tmpl, registry);
}

bool has_error(const ValidationReport& report, const std::string& node,
               const std::string& rule) {
  return std::any_of(report.errors.begin(), report.errors.end(), [&](const Finding& f) {
    return f.node == node && f.rule == rule;
  });
}

}  // namespace

TEST_CASE("resolving a bare compute substitutes every declared default") {
  TopologyGraph graph = graph_for("templates/my_server.yaml");
  REQUIRE(graph.nodes.size() == 1);
  const ResolvedNode& server = graph.nodes.at("my_server");

  CHECK(server.is_compute());
  CHECK(server.derives_from("tosca.nodes.Root"));
  CHECK_FALSE(server.derives_from("tosca.nodes.SoftwareComponent"));
  CHECK(server.type_chain.front() == "tosca.nodes.Compute");
  CHECK(server.type_chain.back() == "tosca.nodes.Root");

  // Template overrides win; untouched defaults appear.
  CHECK(*server.capability_property("host", "num_cpus") == Value(2));
  CHECK(server.capability_property("host", "mem_size")->as_size().bytes() == 512000000ull);
  CHECK(*server.capability_property("endpoint", "network_name") == Value("PRIVATE"));
  CHECK(*server.capability_property("scalable", "count") == Value(1));
  CHECK(server.capability_property("os", "distribution")->as_string() == "RHEL");
  CHECK(server.capability_property("host", "ghost") == nullptr);

  CHECK(graph.edges.empty());
  CHECK(validate(graph).ok());
}

TEST_CASE("host requirements become HostedOn edges") {
  TopologyGraph graph = graph_for("templates/powerfit.yaml");

  REQUIRE(graph.edges.size() == 1);
  CHECK(graph.edges[0] == Edge{"powerfit", "p_server", EdgeKind::HostedOn});
  CHECK(graph.host_of("powerfit") == std::optional<std::string>("p_server"));
  CHECK(graph.compute_host("powerfit") == std::optional<std::string>("p_server"));
  CHECK(graph.compute_host("p_server") == std::optional<std::string>("p_server"));
  CHECK_FALSE(graph.compute_host("ghost").has_value());
  CHECK_FALSE(graph.host_of("p_server").has_value());

  auto order = topological_order(graph);
  REQUIRE(order.size() == 2);
  CHECK(order[0] == "p_server");
  CHECK(order[1] == "powerfit");

  CHECK(validate(graph).ok());
}

TEST_CASE("attribute references add implicit dependency edges") {
  TopologyGraph graph = graph_for("templates/mesos_elastic_cluster.yaml");

  auto has_edge = [&](const std::string& src, const std::string& dst, EdgeKind kind) {
    return std::find(graph.edges.begin(), graph.edges.end(), Edge{src, dst, kind}) !=
           graph.edges.end();
  };

  // Explicit requirements.
  CHECK(has_edge("mesos_master", "master_server", EdgeKind::HostedOn));
  CHECK(has_edge("mesos_slave", "mesos_slave_server", EdgeKind::HostedOn));
  CHECK(has_edge("mesos_load_balancer", "lb_server", EdgeKind::HostedOn));
  CHECK(has_edge("elastic_cluster_front_end", "mesos_master", EdgeKind::DependsOn));
  CHECK(has_edge("elastic_cluster_front_end", "mesos_slave", EdgeKind::DependsOn));

  // get_attribute(master_server, public_address) in properties.
  CHECK(has_edge("mesos_slave", "master_server", EdgeKind::DependsOn));
  CHECK(has_edge("mesos_load_balancer", "master_server", EdgeKind::DependsOn));

  // Edges are sorted and unique.
  CHECK(std::is_sorted(graph.edges.begin(), graph.edges.end()));
  CHECK(std::adjacent_find(graph.edges.begin(), graph.edges.end()) == graph.edges.end());

  // Dependency-first order puts the master's compute before its dependents.
  auto order = topological_order(graph);
  auto at = [&](const std::string& name) {
    return std::find(order.begin(), order.end(), name) - order.begin();
  };
  CHECK(at("master_server") < at("mesos_slave"));
  CHECK(at("master_server") < at("mesos_load_balancer"));
  CHECK(at("mesos_master") < at("elastic_cluster_front_end"));

  CHECK(validate(graph).ok());
}

TEST_CASE("dangling requirements and topology cycles are build errors") {
  try {
    graph_from_text(
        "tosca_definitions_version: tosca_simple_yaml_1_0\n"
        "topology_template:\n"
        "  node_templates:\n"
        "    app:\n"
        "      type: tosca.nodes.SoftwareComponent\n"
        "      requirements:\n"
        "        - host: ghost_server\n");
    FAIL("expected dangling_requirement");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::dangling_requirement);
    CHECK(e.subject() == "app");
    CHECK(std::string(e.what()) ==
          "requirement 'host' of node app targets unknown node ghost_server");
  }

  try {
    graph_from_text(
        "tosca_definitions_version: tosca_simple_yaml_1_0\n"
        "topology_template:\n"
        "  node_templates:\n"
        "    a:\n"
        "      type: tosca.nodes.SoftwareComponent\n"
        "      requirements:\n"
        "        - dependency: b\n"
        "    b:\n"
        "      type: tosca.nodes.SoftwareComponent\n"
        "      requirements:\n"
        "        - dependency: a\n");
    FAIL("expected cyclic_topology");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::cyclic_topology);
  }
}

TEST_CASE("validate flags missing required properties at both levels") {
  // chronos_password and marathon_password are required without defaults.
  TopologyGraph graph = graph_from_text(
      "tosca_definitions_version: tosca_simple_yaml_1_0\n"
      "imports:\n"
      "  - t: custom_types.yaml\n"
      "topology_template:\n"
      "  node_templates:\n"
      "    front:\n"
      "      type: tosca.nodes.indigo.LRMS.FrontEnd.Mesos\n"
      "      properties:\n"
      "        marathon_password: pw\n"
      "      requirements:\n"
      "        - host: server\n"
      "    server:\n"
      "      type: tosca.nodes.indigo.Compute\n");
  ValidationReport report = validate(graph);
  CHECK_FALSE(report.ok());
  CHECK(has_error(report, "front", "required-property"));
  REQUIRE(report.errors.size() == 1);
  CHECK(report.errors[0].message == "required property chronos_password is not assigned");
}

TEST_CASE("validate applies declared constraint clauses") {
  TopologyGraph graph = graph_from_text(
      "tosca_definitions_version: tosca_simple_yaml_1_0\n"
      "imports:\n"
      "  - t: custom_types.yaml\n"
      "topology_template:\n"
      "  node_templates:\n"
      "    app:\n"
      "      type: tosca.nodes.indigo.HaddockApp\n"
      "      properties:\n"
      "        haddock_app_name: gromacs\n"
      "      requirements:\n"
      "        - host: server\n"
      "    server:\n"
      "      type: tosca.nodes.indigo.Compute\n"
      "      capabilities:\n"
      "        host:\n"
      "          properties:\n"
      "            num_cpus: 0\n");
  ValidationReport report = validate(graph);
  CHECK(has_error(report, "app", "constraint"));
  CHECK(has_error(report, "server", "constraint"));
  bool found = false;
  for (const auto& f : report.errors)
    if (f.message == "haddock_app_name: value gromacs violates valid_values [disvis, powerfit]")
      found = true;
  CHECK(found);
}

TEST_CASE("constraint checks skip values that still contain functions") {
  TopologyGraph graph = graph_from_text(
      "tosca_definitions_version: tosca_simple_yaml_1_0\n"
      "imports:\n"
      "  - t: custom_types.yaml\n"
      "topology_template:\n"
      "  inputs:\n"
      "    app_name:\n"
      "      type: string\n"
      "  node_templates:\n"
      "    app:\n"
      "      type: tosca.nodes.indigo.HaddockApp\n"
      "      properties:\n"
      "        haddock_app_name: { get_input: app_name }\n"
      "      requirements:\n"
      "        - host: server\n"
      "    server:\n"
      "      type: tosca.nodes.indigo.Compute\n");
  CHECK(validate(graph).ok());
}

TEST_CASE("validate flags undeclared capabilities and bad networks") {
  TopologyGraph graph = graph_from_text(
      "tosca_definitions_version: tosca_simple_yaml_1_0\n"
      "topology_template:\n"
      "  node_templates:\n"
      "    server:\n"
      "      type: tosca.nodes.Compute\n"
      "      capabilities:\n"
      "        turbo:\n"
      "          properties:\n"
      "            level: 11\n"
      "        endpoint:\n"
      "          properties:\n"
      "            network_name: LAN\n");
  ValidationReport report = validate(graph);
  CHECK(has_error(report, "server", "capability"));
  CHECK(has_error(report, "server", "network"));
  bool found = false;
  for (const auto& f : report.errors)
    if (f.rule == "network")
      found = f.message == "endpoint network_name must be PUBLIC or PRIVATE, got LAN";
  CHECK(found);
}

TEST_CASE("validate checks scaling bounds for consistency") {
  auto report_for = [&](const char* scalable_props) {
    return validate(graph_from_text(
        std::string("tosca_definitions_version: tosca_simple_yaml_1_0\n"
                    "topology_template:\n"
                    "  node_templates:\n"
                    "    server:\n"
                    "      type: tosca.nodes.Compute\n"
                    "      capabilities:\n"
                    "        scalable:\n"
                    "          properties:\n") +
        scalable_props));
  };

  ValidationReport inverted = report_for("            min_instances: 5\n"
                                         "            max_instances: 2\n");
  REQUIRE(has_error(inverted, "server", "bounds"));
  CHECK(inverted.errors[0].message ==
        "capability scalable: min_instances 5 exceeds max_instances 2");

  ValidationReport below = report_for("            count: 0\n"
                                      "            min_instances: 1\n"
                                      "            max_instances: 3\n");
  CHECK(has_error(below, "server", "bounds"));

  ValidationReport above = report_for("            count: 7\n"
                                      "            min_instances: 1\n"
                                      "            max_instances: 3\n");
  CHECK(has_error(above, "server", "bounds"));

  ValidationReport fine = report_for("            count: 2\n"
                                     "            min_instances: 1\n"
                                     "            max_instances: 3\n");
  CHECK(fine.ok());
}

TEST_CASE("validate flags nodes with more than one host requirement") {
  TopologyGraph graph = graph_from_text(
      "tosca_definitions_version: tosca_simple_yaml_1_0\n"
      "topology_template:\n"
      "  node_templates:\n"
      "    app:\n"
      "      type: tosca.nodes.SoftwareComponent\n"
      "      requirements:\n"
      "        - host: server_a\n"
      "        - host: server_b\n"
      "    server_a:\n"
      "      type: tosca.nodes.Compute\n"
      "    server_b:\n"
      "      type: tosca.nodes.Compute\n");
  ValidationReport report = validate(graph);
  CHECK(has_error(report, "app", "host"));
  CHECK(report.errors[0].message == "node declares 2 host requirements");
}

TEST_CASE("validate reports cycles on hand-built graphs") {
  // build_graph would refuse this topology; validate must still diagnose it.
  TopologyGraph graph;
  ResolvedNode a;
  a.name = "a";
  ResolvedNode b;
  b.name = "b";
  graph.nodes["a"] = a;
  graph.nodes["b"] = b;
  graph.edges = {{"a", "b", EdgeKind::DependsOn}, {"b", "a", EdgeKind::DependsOn}};
  ValidationReport report = validate(graph);
  CHECK(has_error(report, "a", "cycle"));
}

TEST_CASE("validate_document folds structural failures into the report") {
  ImportResolver resolver = fixture_resolver();

  ValidationReport syntax = validate_document("tosca_definitions_version: [broken\n", resolver);
  REQUIRE_FALSE(syntax.ok());
  CHECK(syntax.errors[0].rule == "SyntaxError");

  ValidationReport missing_import = validate_document(
      "tosca_definitions_version: tosca_simple_yaml_1_0\n"
      "imports:\n"
      "  - t: no/such/file.yaml\n",
      resolver);
  REQUIRE_FALSE(missing_import.ok());
  CHECK(missing_import.errors[0].rule == "UnresolvedImport");
  CHECK(missing_import.errors[0].node == "no/such/file.yaml");

  ValidationReport clean =
      validate_document(read_fixture("templates/mesos_elastic_cluster.yaml"), resolver);
  CHECK(clean.ok());
}

TEST_CASE("every shipped template validates cleanly") {
  ImportResolver resolver = fixture_resolver();
  for (const char* name :
       {"templates/my_server.yaml", "templates/powerfit.yaml", "templates/disvis.yaml",
        "templates/mesos_elastic_cluster.yaml", "templates/two_node_service.yaml"}) {
    CAPTURE(name);
    ValidationReport report = validate_document(read_fixture(name), resolver);
    for (const auto& f : report.errors) {
      CAPTURE(f.node);
      CAPTURE(f.message);
      CHECK(false);
    }
    CHECK(report.ok());
  }
}

TEST_CASE("derived types only narrow constraints on shared properties") {
  // For each derived type in the shipped registry: any value its clauses
  // accept must also satisfy the parent's clauses on the same property.
  ServiceTemplate probe = parse_service_template(
      "tosca_definitions_version: tosca_simple_yaml_1_0\n"
      "imports:\n"
      "  - t: custom_types.yaml\n");
  TypeRegistry reg = resolve_imports(probe, fixture_resolver());

  // Candidate pool: every scalar mentioned in any clause, plus neutral
  // outsiders, covers the enumerable domains used by the fixture types.
  std::vector<Value> candidates = {Value("gromacs"), Value("unrelated"), Value(0), Value(1),
                                   Value(2), Value(7), Value(-1)};
  for (const auto& [tname, def] : reg.all()) {
    for (const auto& [pname, pdef] : def.properties) {
      for (const auto& clause : pdef.constraints) {
        if (clause.operand.is_list()) {
          for (const auto& v : clause.operand.as_list()) candidates.push_back(v);
        } else {
          candidates.push_back(clause.operand);
        }
      }
    }
  }

  auto accepts = [](const std::vector<ConstraintClause>& clauses, const Value& v) {
    try {
      return check_constraints(v, clauses).satisfied();
    } catch (const Error&) {
      return false;  // unordered comparison: treat as rejection
    }
  };

  int narrowing_pairs = 0;
  for (const auto& [tname, def] : reg.all()) {
    if (!def.derived_from) continue;
    const NodeTypeDefinition& child = reg.flatten(tname);
    const NodeTypeDefinition& parent = reg.flatten(*def.derived_from);
    for (const auto& [pname, child_prop] : child.properties) {
      auto pit = parent.properties.find(pname);
      if (pit == parent.properties.end()) continue;
      if (child_prop.constraints.empty() || pit->second.constraints.empty()) continue;
      ++narrowing_pairs;
      for (const auto& candidate : candidates) {
        if (accepts(child_prop.constraints, candidate)) {
          CAPTURE(tname);
          CAPTURE(pname);
          CAPTURE(candidate.scalar_string());
          CHECK(accepts(pit->second.constraints, candidate));
        }
      }
    }
  }
  // The docking application override is among the checked pairs.
  CHECK(narrowing_pairs >= 1);
}

TEST_CASE("config_tasks folds lifecycle operations per compute host") {
  TopologyGraph graph = graph_for("templates/powerfit.yaml");
  auto tasks = config_tasks(graph, "p_server");
  REQUIRE(tasks.size() == 1);
  CHECK(tasks[0].node == "powerfit");
  CHECK(tasks[0].operation == "Standard.configure");
  CHECK(tasks[0].implementation.find("haddock_install.yml") != std::string::npos);
  REQUIRE(tasks[0].inputs.count("haddock_app_name") == 1);
  CHECK(tasks[0].inputs.at("haddock_app_name").is_function());

  CHECK(config_tasks(graph_for("templates/my_server.yaml"), "my_server").empty());
}

TEST_CASE("config_tasks respects dependency and lifecycle order") {
  TopologyGraph graph = graph_from_text(
      "tosca_definitions_version: tosca_simple_yaml_1_0\n"
      "topology_template:\n"
      "  node_templates:\n"
      "    database:\n"
      "      type: tosca.nodes.SoftwareComponent\n"
      "      requirements:\n"
      "        - host: server\n"
      "      interfaces:\n"
      "        Standard:\n"
      "          start: scripts/db_start.sh\n"
      "          create: scripts/db_create.sh\n"
      "    app:\n"
      "      type: tosca.nodes.SoftwareComponent\n"
      "      requirements:\n"
      "        - host: server\n"
      "        - dependency: database\n"
      "      interfaces:\n"
      "        Standard:\n"
      "          configure: scripts/app_configure.sh\n"
      "    server:\n"
      "      type: tosca.nodes.Compute\n");
  auto tasks = config_tasks(graph, "server");
  REQUIRE(tasks.size() == 3);
  // Database before app; create before start within the database node.
  CHECK(tasks[0].node == "database");
  CHECK(tasks[0].operation == "Standard.create");
  CHECK(tasks[1].node == "database");
  CHECK(tasks[1].operation == "Standard.start");
  CHECK(tasks[2].node == "app");
  CHECK(tasks[2].operation == "Standard.configure");
}

TEST_CASE("scaling_bounds reads the scalable capability") {
  TopologyGraph graph = graph_for("templates/my_server.yaml");
  ScalingBounds bounds = scaling_bounds(graph, "my_server");
  CHECK(bounds == ScalingBounds{1, 1, 1, false});
  CHECK(scaling_bounds(graph, "ghost") == ScalingBounds{});
}

TEST_CASE("worker-node bounds on hosted software override the host") {
  TopologyGraph graph = graph_for("templates/mesos_elastic_cluster.yaml");

  ScalingBounds workers = scaling_bounds(graph, "mesos_slave_server");
  CHECK(workers.elastic);
  CHECK(workers.count == 0);
  CHECK(workers.min_instances == 0);
  CHECK(workers.max_instances == 5);

  ScalingBounds master = scaling_bounds(graph, "master_server");
  CHECK_FALSE(master.elastic);
  CHECK(master.count == 1);
  CHECK(master.max_instances == 1);
}
