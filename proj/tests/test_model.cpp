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

#include <random>
#include <string>

#include "stratus/error.hpp"
#include "stratus/tosca/model.hpp"

using namespace stratus;
using namespace stratus::tosca;

namespace {

TypeRegistry small_registry() {
  TypeRegistry reg;

  NodeTypeDefinition root;
  root.name = "tosca.nodes.Root";
  reg.add(root);

  NodeTypeDefinition base;
  base.name = "app.Base";
  base.derived_from = "tosca.nodes.Root";
  base.properties["port"] = {"integer", true, Value(80), {}};
  base.properties["proto"] = {"string", false, Value("http"), {}};
  base.capabilities["host"].type = "tosca.capabilities.Container";
  base.capabilities["host"].properties["num_cpus"] = {"integer", false, Value(1), {}};
  base.capabilities["host"].properties["mem_size"] = {"scalar-unit.size", false, std::nullopt, {}};
  base.interfaces["Standard"].operations["create"] = {"scripts/create.sh", {}};
  base.interfaces["Standard"].operations["configure"] = {"scripts/configure.sh", {}};
  reg.add(base);

  NodeTypeDefinition child;
  child.name = "app.Child";
  child.derived_from = "app.Base";
  child.properties["port"] = {"integer", true, Value(8080), {}};
  // No capability type given: the base capability type must survive.
  child.capabilities["host"].properties["num_cpus"] = {"integer", false, Value(2), {}};
  child.interfaces["Standard"].operations["configure"] = {"scripts/child_configure.sh", {}};
  reg.add(child);

  return reg;
}

}  // namespace

TEST_CASE("flatten merges the derivation chain child-over-parent") {
  TypeRegistry reg = small_registry();
  const NodeTypeDefinition& flat = reg.flatten("app.Child");

  CHECK(flat.name == "app.Child");
  REQUIRE(flat.derived_from.has_value());
  CHECK(*flat.derived_from == "app.Base");

  // Overridden property wins, untouched sibling survives.
  REQUIRE(flat.properties.count("port") == 1);
  CHECK(*flat.properties.at("port").default_value == Value(8080));
  REQUIRE(flat.properties.count("proto") == 1);
  CHECK(*flat.properties.at("proto").default_value == Value("http"));

  // Capability contents merge one level deep; the base type is kept when the
  // child does not restate it.
  REQUIRE(flat.capabilities.count("host") == 1);
  const CapabilityDefinition& host = flat.capabilities.at("host");
  CHECK(host.type == "tosca.capabilities.Container");
  CHECK(*host.properties.at("num_cpus").default_value == Value(2));
  CHECK(host.properties.count("mem_size") == 1);

  // Interface operations merge per operation.
  const InterfaceDefinition& standard = flat.interfaces.at("Standard");
  CHECK(standard.operations.at("create").implementation == "scripts/create.sh");
  CHECK(standard.operations.at("configure").implementation == "scripts/child_configure.sh");
}

TEST_CASE("flatten memoizes and add invalidates the cache") {
  TypeRegistry reg = small_registry();
  const NodeTypeDefinition& first = reg.flatten("app.Child");
  const NodeTypeDefinition& second = reg.flatten("app.Child");
  CHECK(&first == &second);

  NodeTypeDefinition patched = *reg.find("app.Base");
  patched.properties["proto"].default_value = Value("https");
  reg.add(std::move(patched));
  CHECK(*reg.flatten("app.Child").properties.at("proto").default_value == Value("https"));
}

TEST_CASE("flatten rejects unknown types and derivation cycles") {
  TypeRegistry reg = small_registry();

  CHECK_THROWS_WITH_AS(reg.flatten("app.Missing"), "unknown type app.Missing", Error);
  try {
    reg.flatten("app.Missing");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::unknown_type);
    CHECK(e.subject() == "app.Missing");
  }

  NodeTypeDefinition a;
  a.name = "loop.A";
  a.derived_from = "loop.B";
  NodeTypeDefinition b;
  b.name = "loop.B";
  b.derived_from = "loop.A";
  reg.add(a);
  reg.add(b);
  try {
    reg.flatten("loop.A");
    FAIL("expected cyclic_derivation");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::cyclic_derivation);
  }
}

TEST_CASE("type_derives_from walks the chain and tolerates cycles") {
  TypeRegistry reg = small_registry();
  CHECK(type_derives_from("app.Child", "app.Base", reg));
  CHECK(type_derives_from("app.Child", "tosca.nodes.Root", reg));
  CHECK(type_derives_from("app.Child", "app.Child", reg));
  CHECK_FALSE(type_derives_from("app.Base", "app.Child", reg));
  CHECK_FALSE(type_derives_from("app.Missing", "tosca.nodes.Root", reg));

  NodeTypeDefinition a;
  a.name = "loop.A";
  a.derived_from = "loop.B";
  NodeTypeDefinition b;
  b.name = "loop.B";
  b.derived_from = "loop.A";
  reg.add(a);
  reg.add(b);
  CHECK_FALSE(type_derives_from("loop.A", "tosca.nodes.Root", reg));
}

TEST_CASE("registry copies and moves keep the type table") {
  TypeRegistry reg = small_registry();
  (void)reg.flatten("app.Child");  // warm the cache

  TypeRegistry copied(reg);
  CHECK(copied.contains("app.Child"));
  CHECK(*copied.flatten("app.Child").properties.at("port").default_value == Value(8080));

  TypeRegistry assigned;
  assigned = reg;
  CHECK(assigned.contains("app.Base"));

  TypeRegistry moved(std::move(copied));
  CHECK(moved.contains("app.Child"));
  CHECK(moved.flatten("app.Child").interfaces.count("Standard") == 1);
}

TEST_CASE("constraint clauses evaluate against scalars") {
  std::vector<ConstraintClause> app_names = {
      {ConstraintKind::valid_values, Value(ValueList{Value("disvis"), Value("powerfit")})}};

  CHECK(check_constraints(Value("powerfit"), app_names).satisfied());
  ConstraintReport bad = check_constraints(Value("gromacs"), app_names);
  REQUIRE(bad.violations.size() == 1);
  CHECK(bad.violations[0].message == "value gromacs violates valid_values [disvis, powerfit]");

  std::vector<ConstraintClause> at_least_one = {{ConstraintKind::greater_or_equal, Value(1)}};
  CHECK(check_constraints(Value(1), at_least_one).satisfied());
  CHECK_FALSE(check_constraints(Value(0), at_least_one).satisfied());
  // Numbers compare across int/float representations.
  CHECK(check_constraints(Value(1.5), at_least_one).satisfied());

  std::vector<ConstraintClause> eq = {{ConstraintKind::equal, Value("powerfit")}};
  CHECK(check_constraints(Value("powerfit"), eq).satisfied());
  ConstraintReport eq_bad = check_constraints(Value("disvis"), eq);
  REQUIRE(eq_bad.violations.size() == 1);
  CHECK(eq_bad.violations[0].message == "value disvis violates equal powerfit");

  std::vector<ConstraintClause> cap = {{ConstraintKind::less_or_equal, Value(5)}};
  CHECK(check_constraints(Value(5), cap).satisfied());
  CHECK_FALSE(check_constraints(Value(6), cap).satisfied());
}

TEST_CASE("constraints compare sizes by byte count") {
  std::vector<ConstraintClause> min_mem = {
      {ConstraintKind::greater_or_equal, Value(*ScalarSize::parse("1 GB"))}};
  CHECK(check_constraints(Value(*ScalarSize::parse("1 GiB")), min_mem).satisfied());
  CHECK_FALSE(check_constraints(Value(*ScalarSize::parse("512 MB")), min_mem).satisfied());

  std::vector<ConstraintClause> eq = {{ConstraintKind::equal, Value(*ScalarSize::parse("1000 B"))}};
  CHECK(check_constraints(Value(*ScalarSize::parse("1 kB")), eq).satisfied());
}

TEST_CASE("every violated clause is reported in declaration order") {
  std::vector<ConstraintClause> clauses = {
      {ConstraintKind::greater_or_equal, Value(10)},
      {ConstraintKind::valid_values, Value(ValueList{Value(20), Value(30)})},
  };
  ConstraintReport report = check_constraints(Value(5), clauses);
  REQUIRE(report.violations.size() == 2);
  CHECK(report.violations[0].clause.kind == ConstraintKind::greater_or_equal);
  CHECK(report.violations[1].clause.kind == ConstraintKind::valid_values);
  CHECK(report.violations[1].message == "value 5 violates valid_values [20, 30]");
}

TEST_CASE("malformed clauses raise incompatible_operand") {
  std::vector<ConstraintClause> not_a_list = {{ConstraintKind::in_range, Value(3)}};
  CHECK_THROWS_AS(check_constraints(Value(2), not_a_list), Error);

  std::vector<ConstraintClause> wrong_arity = {
      {ConstraintKind::in_range, Value(ValueList{Value(1)})}};
  try {
    check_constraints(Value(2), wrong_arity);
    FAIL("expected incompatible_operand");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::incompatible_operand);
  }

  std::vector<ConstraintClause> unordered = {{ConstraintKind::greater_or_equal, Value("abc")}};
  try {
    check_constraints(Value(2), unordered);
    FAIL("expected incompatible_operand");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::incompatible_operand);
  }
}

TEST_CASE("in_range agrees with the two-comparison definition") {
  // Independent oracle: x in [lo, hi] iff lo <= x and x <= hi.
  std::mt19937 rng(424242);
  std::uniform_int_distribution<int> draw(-50, 50);
  for (int trial = 0; trial < 500; ++trial) {
    int lo = draw(rng), hi = draw(rng);
    if (lo > hi) std::swap(lo, hi);
    int x = draw(rng);

    std::vector<ConstraintClause> range = {
        {ConstraintKind::in_range, Value(ValueList{Value(lo), Value(hi)})}};
    std::vector<ConstraintClause> both = {
        {ConstraintKind::greater_or_equal, Value(lo)},
        {ConstraintKind::less_or_equal, Value(hi)},
    };
    bool via_range = check_constraints(Value(x), range).satisfied();
    bool via_pair = check_constraints(Value(x), both).satisfied();
    bool direct = lo <= x && x <= hi;
    CAPTURE(lo);
    CAPTURE(hi);
    CAPTURE(x);
    CHECK(via_range == direct);
    CHECK(via_pair == direct);
  }
}

namespace {

TopologyTemplate app_topology() {
  TopologyTemplate topo;
  topo.inputs["app_name"] = {"string", Value("disvis"), ""};
  topo.inputs["replicas"] = {"integer", std::nullopt, ""};

  NodeTemplate app;
  app.name = "app";
  app.type_name = "app.Child";
  app.properties["label"] =
      Value(FunctionExpr{FunctionKind::get_input, {"app_name"}});
  topo.node_templates["app"] = app;

  NodeTemplate peer;
  peer.name = "peer";
  peer.type_name = "app.Child";
  peer.properties["partner"] =
      Value(FunctionExpr{FunctionKind::get_property, {"app", "label"}});
  topo.node_templates["peer"] = peer;

  return topo;
}

}  // namespace

TEST_CASE("get_input prefers supplied values over declared defaults") {
  TypeRegistry reg = small_registry();
  TopologyTemplate topo = app_topology();

  FunctionExpr expr{FunctionKind::get_input, {"app_name"}};
  CHECK(evaluate_function(expr, topo, reg, {{"app_name", Value("powerfit")}}) ==
        Value("powerfit"));
  CHECK(evaluate_function(expr, topo, reg, {}) == Value("disvis"));

  FunctionExpr missing{FunctionKind::get_input, {"replicas"}};
  try {
    evaluate_function(missing, topo, reg, {});
    FAIL("expected unknown_reference");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::unknown_reference);
    CHECK(std::string(e.what()) == "input replicas has no value and no default");
  }

  FunctionExpr undeclared{FunctionKind::get_input, {"nope"}};
  try {
    evaluate_function(undeclared, topo, reg, {});
    FAIL("expected unknown_reference");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::unknown_reference);
    CHECK(e.subject() == "nope");
  }
}

TEST_CASE("get_property resolves template values, type defaults and chains") {
  TypeRegistry reg = small_registry();
  TopologyTemplate topo = app_topology();

  // Template property that is itself a function: evaluated recursively.
  FunctionExpr chained{FunctionKind::get_property, {"peer", "partner"}};
  CHECK(evaluate_function(chained, topo, reg, {{"app_name", Value("powerfit")}}) ==
        Value("powerfit"));

  // Falls back to the flattened type default when the template is silent.
  FunctionExpr port{FunctionKind::get_property, {"app", "port"}};
  CHECK(evaluate_function(port, topo, reg, {}) == Value(8080));

  FunctionExpr unknown_node{FunctionKind::get_property, {"ghost", "port"}};
  CHECK_THROWS_AS(evaluate_function(unknown_node, topo, reg, {}), Error);

  FunctionExpr unknown_prop{FunctionKind::get_property, {"app", "ghost"}};
  try {
    evaluate_function(unknown_prop, topo, reg, {});
    FAIL("expected unknown_reference");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::unknown_reference);
    CHECK(e.subject() == "app");
  }
}

TEST_CASE("SELF binds to the evaluating node") {
  TypeRegistry reg = small_registry();
  TopologyTemplate topo = app_topology();

  FunctionExpr self_prop{FunctionKind::get_property, {"SELF", "label"}};
  CHECK(evaluate_function(self_prop, topo, reg, {}, nullptr, "app") == Value("disvis"));

  try {
    evaluate_function(self_prop, topo, reg, {});
    FAIL("expected unknown_reference for unbound SELF");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::unknown_reference);
  }
}

TEST_CASE("get_attribute needs a runtime store") {
  TypeRegistry reg = small_registry();
  TopologyTemplate topo = app_topology();
  FunctionExpr attr{FunctionKind::get_attribute, {"app", "private_address"}};

  try {
    evaluate_function(attr, topo, reg, {});
    FAIL("expected attribute_unavailable");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::attribute_unavailable);
    CHECK(e.subject() == "app");
  }

  AttributeStore runtime;
  runtime.set("app", "private_address", Value(ValueList{Value("10.0.0.1")}));
  Value got = evaluate_function(attr, topo, reg, {}, &runtime);
  REQUIRE(got.is_list());
  CHECK(got.as_list()[0] == Value("10.0.0.1"));

  FunctionExpr absent{FunctionKind::get_attribute, {"app", "public_address"}};
  CHECK_THROWS_AS(evaluate_function(absent, topo, reg, {}, &runtime), Error);
}

TEST_CASE("evaluate_value rewrites functions nested in lists and maps") {
  TypeRegistry reg = small_registry();
  TopologyTemplate topo = app_topology();
  TemplateSource source(topo, reg);
  EvalContext ctx;
  ctx.nodes = &source;
  ctx.input_definitions = &topo.inputs;

  Value tree(ValueMap{
      {"app", Value(FunctionExpr{FunctionKind::get_input, {"app_name"}})},
      {"list", Value(ValueList{Value(FunctionExpr{FunctionKind::get_property, {"app", "port"}}),
                               Value("literal")})},
  });
  Value out = evaluate_value(tree, ctx);
  CHECK(out.as_map().at("app") == Value("disvis"));
  CHECK(out.as_map().at("list").as_list()[0] == Value(8080));
  CHECK(out.as_map().at("list").as_list()[1] == Value("literal"));
  CHECK_FALSE(out.contains_function());
}

TEST_CASE("self-referential property expressions hit the recursion limit") {
  TypeRegistry reg = small_registry();
  TopologyTemplate topo;
  NodeTemplate n;
  n.name = "narcissus";
  n.type_name = "app.Child";
  n.properties["zelf"] = Value(FunctionExpr{FunctionKind::get_property, {"narcissus", "zelf"}});
  topo.node_templates["narcissus"] = n;

  FunctionExpr expr{FunctionKind::get_property, {"narcissus", "zelf"}};
  try {
    evaluate_function(expr, topo, reg, {});
    FAIL("expected recursion limit");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::unknown_reference);
  }
}
