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

#include <string>

#include "fixtures.hpp"
#include "stratus/error.hpp"
#include "stratus/tosca/parser.hpp"

using namespace stratus;
using namespace stratus::tosca;
using stratus::testing::fixture_path;
using stratus::testing::read_fixture;

TEST_CASE("single-server template parses with typed capability properties") {
  ServiceTemplate tmpl = parse_service_template(read_fixture("templates/my_server.yaml"));

  CHECK(tmpl.definitions_version == "tosca_simple_yaml_1_0");
  CHECK(tmpl.description ==
        "Template for deploying a single server with predefined properties.");
  CHECK(tmpl.imports.empty());
  REQUIRE(tmpl.topology.node_templates.size() == 1);

  const NodeTemplate& server = tmpl.topology.node_templates.at("my_server");
  CHECK(server.type_name == "tosca.nodes.Compute");
  REQUIRE(server.capabilities.count("host") == 1);
  REQUIRE(server.capabilities.count("os") == 1);

  const ValueMap& host = server.capabilities.at("host").properties;
  CHECK(host.at("num_cpus") == Value(2));
  REQUIRE(host.at("disk_size").is_size());
  CHECK(host.at("disk_size").as_size().bytes() == 10000000000ull);
  CHECK(host.at("mem_size").as_size().bytes() == 512000000ull);

  const ValueMap& os = server.capabilities.at("os").properties;
  CHECK(os.at("architecture") == Value("x86_64"));
  CHECK(os.at("distribution") == Value("RHEL"));
  // Unquoted 6.5 is a YAML float, not a string.
  REQUIRE(os.at("version").is_float());
  CHECK(os.at("version").scalar_string() == "6.5");
}

TEST_CASE("application template parses imports, requirements and outputs") {
  ServiceTemplate tmpl = parse_service_template(read_fixture("templates/powerfit.yaml"));

  REQUIRE(tmpl.imports.size() == 1);
  CHECK(tmpl.imports[0].name == "indigo_types");
  CHECK(tmpl.imports[0].reference == "indigo-dc/tosca-types/master/custom_types.yaml");

  const NodeTemplate& app = tmpl.topology.node_templates.at("powerfit");
  CHECK(app.type_name == "tosca.nodes.indigo.Powerfit");
  REQUIRE(app.requirements.size() == 1);
  CHECK(app.requirements[0].name == "host");
  CHECK(app.requirements[0].target == "p_server");

  const NodeTemplate& server = tmpl.topology.node_templates.at("p_server");
  CHECK(server.capabilities.at("os").properties.at("image") ==
        Value("indigodatacloudapps/powerfit"));

  REQUIRE(tmpl.topology.outputs.count("powerfit_ip") == 1);
  const Value& out = tmpl.topology.outputs.at("powerfit_ip").value;
  REQUIRE(out.is_function());
  CHECK(out.as_function().kind == FunctionKind::get_attribute);
  CHECK(out.as_function().args == std::vector<std::string>{"p_server", "private_address"});
}

TEST_CASE("intrinsic functions parse from single-entry mappings") {
  ServiceTemplate tmpl = parse_service_template(R"(tosca_definitions_version: tosca_simple_yaml_1_0
topology_template:
  inputs:
    app_name:
      type: string
      default: disvis
  node_templates:
    app:
      type: tosca.nodes.SoftwareComponent
      properties:
        name: { get_input: app_name }
        master_ips: { get_attribute: [ master, public_address ] }
        nested:
          inner: { get_property: [ SELF, name ] }
        decoy:
          get_input: x
          extra: 1
)");
  const ValueMap& props = tmpl.topology.node_templates.at("app").properties;

  REQUIRE(props.at("name").is_function());
  CHECK(props.at("name").as_function().kind == FunctionKind::get_input);
  CHECK(props.at("name").as_function().args == std::vector<std::string>{"app_name"});

  CHECK(props.at("master_ips").as_function().args ==
        std::vector<std::string>{"master", "public_address"});

  CHECK(props.at("nested").as_map().at("inner").is_function());

  // Two keys: not an intrinsic, stays a plain map.
  REQUIRE(props.at("decoy").is_map());
  CHECK(props.at("decoy").as_map().count("get_input") == 1);
}

TEST_CASE("quoted scalars survive as strings in templates") {
  ServiceTemplate tmpl = parse_service_template(R"(tosca_definitions_version: tosca_simple_yaml_1_0
topology_template:
  node_templates:
    server:
      type: tosca.nodes.Compute
      capabilities:
        os:
          properties:
            version: "14.04"
)");
  const Value& version = tmpl.topology.node_templates.at("server")
                             .capabilities.at("os")
                             .properties.at("version");
  REQUIRE(version.is_string());
  CHECK(version.as_string() == "14.04");
}

TEST_CASE("unsupported definitions versions are rejected") {
  try {
    parse_service_template("tosca_definitions_version: tosca_simple_yaml_1_3\n");
    FAIL("expected unsupported_version");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::unsupported_version);
    CHECK(e.subject() == "tosca_simple_yaml_1_3");
    CHECK(std::string(e.what()).find("expected tosca_simple_yaml_1_0") != std::string::npos);
  }

  try {
    parse_service_template("description: no version\n");
    FAIL("expected syntax_error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::syntax_error);
  }
}

TEST_CASE("strict mode rejects unknown keys with their location") {
  try {
    parse_service_template(
        "tosca_definitions_version: tosca_simple_yaml_1_0\n"
        "template_author: me\n");
    FAIL("expected syntax_error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::syntax_error);
    CHECK(std::string(e.what()) ==
          "line 2, column 1: unknown key 'template_author' in document root");
  }

  try {
    parse_service_template(
        "tosca_definitions_version: tosca_simple_yaml_1_0\n"
        "topology_template:\n"
        "  node_templates:\n"
        "    web:\n"
        "      type: tosca.nodes.Compute\n"
        "      flavor: m1.small\n");
    FAIL("expected syntax_error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()) ==
          "line 6, column 7: unknown key 'flavor' in node template 'web'");
  }
}

TEST_CASE("duplicate node templates are a hard error") {
  try {
    parse_service_template(
        "tosca_definitions_version: tosca_simple_yaml_1_0\n"
        "topology_template:\n"
        "  node_templates:\n"
        "    web:\n"
        "      type: tosca.nodes.Compute\n"
        "    web:\n"
        "      type: tosca.nodes.Compute\n");
    FAIL("expected duplicate_node");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::duplicate_node);
    CHECK(e.subject() == "web");
    CHECK(std::string(e.what()) == "line 6: duplicate node template 'web'");
  }
}

TEST_CASE("malformed structures carry precise diagnostics") {
  // Node template without a type.
  CHECK_THROWS_AS(parse_service_template(
                      "tosca_definitions_version: tosca_simple_yaml_1_0\n"
                      "topology_template:\n"
                      "  node_templates:\n"
                      "    web:\n"
                      "      properties:\n"
                      "        a: 1\n"),
                  Error);

  // Requirements must be a sequence.
  try {
    parse_service_template(
        "tosca_definitions_version: tosca_simple_yaml_1_0\n"
        "topology_template:\n"
        "  node_templates:\n"
        "    web:\n"
        "      type: tosca.nodes.SoftwareComponent\n"
        "      requirements:\n"
        "        host: server\n");
    FAIL("expected syntax_error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::syntax_error);
    CHECK(std::string(e.what()).find("must be a sequence") != std::string::npos);
  }

  // Unparseable YAML surfaces the underlying mark.
  try {
    parse_service_template("a: [unclosed\n");
    FAIL("expected syntax_error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::syntax_error);
    CHECK(std::string(e.what()).rfind("line ", 0) == 0);
  }
}

TEST_CASE("built-in compute type carries the documented defaults") {
  TypeRegistry reg = builtin_types();
  REQUIRE(reg.contains("tosca.nodes.Root"));
  REQUIRE(reg.contains("tosca.nodes.SoftwareComponent"));

  const NodeTypeDefinition& compute = reg.flatten("tosca.nodes.Compute");
  CHECK(*compute.derived_from == "tosca.nodes.Root");

  const auto& host = compute.capabilities.at("host");
  CHECK(host.type == "tosca.capabilities.Container");
  CHECK(*host.properties.at("num_cpus").default_value == Value(1));
  CHECK(host.properties.at("num_cpus").constraints.size() == 1);
  CHECK(host.properties.at("mem_size").default_value->as_size().bytes() == 1000000000ull);
  CHECK(host.properties.at("disk_size").default_value->as_size().bytes() == 10000000000ull);

  const auto& endpoint = compute.capabilities.at("endpoint");
  CHECK(*endpoint.properties.at("network_name").default_value == Value("PRIVATE"));
  REQUIRE(endpoint.properties.at("network_name").constraints.size() == 1);
  CHECK(endpoint.properties.at("network_name").constraints[0].kind ==
        ConstraintKind::valid_values);

  const auto& scalable = compute.capabilities.at("scalable");
  CHECK(*scalable.properties.at("count").default_value == Value(1));
  CHECK(*scalable.properties.at("min_instances").default_value == Value(1));
  CHECK(*scalable.properties.at("max_instances").default_value == Value(1));

  CHECK(compute.capabilities.at("os").properties.at("architecture").default_value ==
        Value("x86_64"));
}

TEST_CASE("type library files parse into inheritable definitions") {
  auto lib = parse_type_library(read_fixture("types/custom_types.yaml"));

  REQUIRE(lib.count("tosca.nodes.indigo.Powerfit") == 1);
  const NodeTypeDefinition& powerfit = lib.at("tosca.nodes.indigo.Powerfit");
  CHECK(*powerfit.derived_from == "tosca.nodes.indigo.HaddockApp");
  const PropertyDefinition& app_name = powerfit.properties.at("haddock_app_name");
  CHECK(app_name.required);
  CHECK(*app_name.default_value == Value("powerfit"));
  REQUIRE(app_name.constraints.size() == 1);
  CHECK(app_name.constraints[0].kind == ConstraintKind::equal);
  CHECK(app_name.constraints[0].operand == Value("powerfit"));

  const NodeTypeDefinition& haddock = lib.at("tosca.nodes.indigo.HaddockApp");
  CHECK(haddock.artifacts.at("galaxy_role").file == "indigo-dc.disvis-powerfit");
  CHECK(haddock.interfaces.at("Standard").operations.count("configure") == 1);

  const NodeTypeDefinition& wn = lib.at("tosca.nodes.indigo.LRMS.WorkerNode.Mesos");
  CHECK(*wn.capabilities.at("wn").properties.at("max_instances").default_value == Value(1));
}

TEST_CASE("flattening a library type inherits the configure operation") {
  TypeRegistry reg = builtin_types();
  for (auto& [name, def] : parse_type_library(read_fixture("types/custom_types.yaml")))
    reg.add(def);

  const NodeTypeDefinition& flat = reg.flatten("tosca.nodes.indigo.Powerfit");
  // The configure operation and artifact come from the parent application type.
  REQUIRE(flat.interfaces.count("Standard") == 1);
  const OperationDefinition& configure = flat.interfaces.at("Standard").operations.at("configure");
  CHECK(configure.implementation.find("haddock_install.yml") != std::string::npos);
  REQUIRE(configure.inputs.count("haddock_app_name") == 1);
  CHECK(configure.inputs.at("haddock_app_name").is_function());
  CHECK(flat.artifacts.count("galaxy_role") == 1);
  // The override tightens the property default.
  CHECK(*flat.properties.at("haddock_app_name").default_value == Value("powerfit"));
  CHECK(type_derives_from("tosca.nodes.indigo.Powerfit", "tosca.nodes.SoftwareComponent", reg));
}

TEST_CASE("import resolver prefers explicit mappings over search dirs") {
  ImportResolver resolver;
  resolver.add_mapping("indigo-dc/tosca-types/master/custom_types.yaml",
                       fixture_path("types/custom_types.yaml"));
  auto hit = resolver.resolve("indigo-dc/tosca-types/master/custom_types.yaml");
  REQUIRE(hit.has_value());
  CHECK(*hit == fixture_path("types/custom_types.yaml"));

  ImportResolver by_dir;
  by_dir.add_search_dir(fixture_path("types"));
  // Falls back to the basename inside a search dir when the full relative
  // reference does not exist there.
  auto fallback = by_dir.resolve("indigo-dc/tosca-types/master/custom_types.yaml");
  REQUIRE(fallback.has_value());
  CHECK(fallback->filename() == "custom_types.yaml");

  CHECK_FALSE(by_dir.resolve("no/such/library.yaml").has_value());
}

TEST_CASE("resolve_imports loads libraries and reports unresolved references") {
  ServiceTemplate tmpl = parse_service_template(read_fixture("templates/powerfit.yaml"));

  ImportResolver resolver;
  resolver.add_search_dir(fixture_path("types"));
  std::vector<std::string> warnings;
  TypeRegistry reg = resolve_imports(tmpl, resolver, &warnings);
  CHECK(reg.contains("tosca.nodes.indigo.Powerfit"));
  CHECK(reg.contains("tosca.nodes.Compute"));
  CHECK(warnings.empty());

  ImportResolver empty;
  try {
    resolve_imports(tmpl, empty);
    FAIL("expected unresolved_import");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::unresolved_import);
    CHECK(e.subject() == "indigo-dc/tosca-types/master/custom_types.yaml");
  }
}

TEST_CASE("conflicting custom type redefinitions are rejected") {
  const std::string library_text = read_fixture("types/custom_types.yaml");

  ServiceTemplate tmpl = parse_service_template(
      "tosca_definitions_version: tosca_simple_yaml_1_0\n"
      "imports:\n"
      "  - indigo_types: custom_types.yaml\n"
      "node_types:\n"
      "  tosca.nodes.indigo.Powerfit:\n"
      "    derived_from: tosca.nodes.Root\n");
  ImportResolver resolver;
  resolver.add_search_dir(fixture_path("types"));
  try {
    resolve_imports(tmpl, resolver);
    FAIL("expected duplicate_type_conflict");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::duplicate_type_conflict);
    CHECK(e.subject() == "tosca.nodes.indigo.Powerfit");
  }

  // An identical re-import only warns.
  ServiceTemplate twice = parse_service_template(
      "tosca_definitions_version: tosca_simple_yaml_1_0\n"
      "imports:\n"
      "  - a: custom_types.yaml\n"
      "  - b: custom_types.yaml\n");
  std::vector<std::string> warnings;
  TypeRegistry reg = resolve_imports(twice, resolver, &warnings);
  CHECK(reg.contains("tosca.nodes.indigo.Compute"));
  CHECK(!warnings.empty());
  CHECK(warnings[0].find("duplicate identical definition") != std::string::npos);
}
