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

#include "stratus/tosca/parser.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

#include "stratus/error.hpp"

namespace stratus::tosca {

namespace {

[[noreturn]] void syntax_error(const YAML::Mark& mark, const std::string& message) {
  std::string where = "line " + std::to_string(mark.line + 1) + ", column " +
                      std::to_string(mark.column + 1);
  throw Error(Errc::syntax_error, where + ": " + message);
}

void require_map(const YAML::Node& node, const std::string& what) {
  if (!node.IsMap()) syntax_error(node.Mark(), what + " must be a mapping");
}

void require_sequence(const YAML::Node& node, const std::string& what) {
  if (!node.IsSequence()) syntax_error(node.Mark(), what + " must be a sequence");
}

std::string scalar_key(const YAML::Node& key) {
  if (!key.IsScalar()) syntax_error(key.Mark(), "mapping key must be a scalar");
  return key.Scalar();
}

// Strict mode: every key must be in the allowed set.
void check_keys(const YAML::Node& map, std::initializer_list<std::string_view> allowed,
                const std::string& what) {
  for (const auto& kv : map) {
    const std::string key = scalar_key(kv.first);
    bool ok = false;
    for (auto a : allowed)
      if (key == a) ok = true;
    if (!ok) syntax_error(kv.first.Mark(), "unknown key '" + key + "' in " + what);
  }
}

bool is_quoted(const YAML::Node& node) { return node.Tag() == "!"; }

Value parse_value(const YAML::Node& node);

// A single-entry map whose key is an intrinsic name parses as a FunctionExpr.
std::optional<FunctionExpr> try_parse_function(const YAML::Node& node) {
  if (!node.IsMap() || node.size() != 1) return std::nullopt;
  const auto kv = *node.begin();
  if (!kv.first.IsScalar()) return std::nullopt;
  auto kind = function_kind_from(kv.first.Scalar());
  if (!kind) return std::nullopt;
  FunctionExpr expr;
  expr.kind = *kind;
  if (kv.second.IsScalar()) {
    expr.args.push_back(kv.second.Scalar());
  } else if (kv.second.IsSequence()) {
    for (const auto& item : kv.second) {
      if (!item.IsScalar())
        syntax_error(item.Mark(), "intrinsic function arguments must be scalars");
      expr.args.push_back(item.Scalar());
    }
  } else {
    syntax_error(kv.second.Mark(), "intrinsic function arguments must be a scalar or list");
  }
  return expr;
}

Value parse_value(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Null:
      return Value();
    case YAML::NodeType::Scalar:
      return Value::from_scalar(node.Scalar(), is_quoted(node));
    case YAML::NodeType::Sequence: {
      ValueList list;
      for (const auto& item : node) list.push_back(parse_value(item));
      return Value(std::move(list));
    }
    case YAML::NodeType::Map: {
      if (auto fn = try_parse_function(node)) return Value(std::move(*fn));
      ValueMap map;
      for (const auto& kv : node) map[scalar_key(kv.first)] = parse_value(kv.second);
      return Value(std::move(map));
    }
    default:
      syntax_error(node.Mark(), "unsupported YAML node");
  }
}

std::vector<ConstraintClause> parse_constraints(const YAML::Node& node) {
  require_sequence(node, "constraints");
  std::vector<ConstraintClause> out;
  for (const auto& item : node) {
    if (!item.IsMap() || item.size() != 1)
      syntax_error(item.Mark(), "constraint clause must be a single-entry mapping");
    const auto kv = *item.begin();
    const std::string name = scalar_key(kv.first);
    auto kind = constraint_kind_from(name);
    if (!kind) syntax_error(kv.first.Mark(), "unknown constraint '" + name + "'");
    ConstraintClause clause;
    clause.kind = *kind;
    clause.operand = parse_value(kv.second);
    if ((clause.kind == ConstraintKind::valid_values ||
         clause.kind == ConstraintKind::in_range) &&
        !clause.operand.is_list())
      syntax_error(kv.second.Mark(), name + " operand must be a list");
    out.push_back(std::move(clause));
  }
  return out;
}

PropertyDefinition parse_property_definition(const YAML::Node& node) {
  PropertyDefinition def;
  if (node.IsNull()) return def;
  require_map(node, "property definition");
  check_keys(node, {"type", "description", "required", "default", "constraints"},
             "property definition");
  if (node["type"]) def.type = node["type"].Scalar();
  if (node["required"]) {
    const Value v = parse_value(node["required"]);
    if (!v.is_bool()) syntax_error(node["required"].Mark(), "'required' must be a boolean");
    def.required = v.as_bool();
  }
  if (node["default"]) def.default_value = parse_value(node["default"]);
  if (node["constraints"]) def.constraints = parse_constraints(node["constraints"]);
  return def;
}

std::map<std::string, ArtifactDefinition> parse_artifacts(const YAML::Node& node) {
  require_map(node, "artifacts");
  std::map<std::string, ArtifactDefinition> out;
  for (const auto& kv : node) {
    const std::string name = scalar_key(kv.first);
    require_map(kv.second, "artifact '" + name + "'");
    check_keys(kv.second, {"file", "type"}, "artifact '" + name + "'");
    ArtifactDefinition def;
    if (kv.second["file"]) def.file = kv.second["file"].Scalar();
    if (kv.second["type"]) def.type = kv.second["type"].Scalar();
    out[name] = std::move(def);
  }
  return out;
}

std::map<std::string, InterfaceDefinition> parse_interfaces(const YAML::Node& node) {
  require_map(node, "interfaces");
  std::map<std::string, InterfaceDefinition> out;
  for (const auto& kv : node) {
    const std::string iface = scalar_key(kv.first);
    require_map(kv.second, "interface '" + iface + "'");
    InterfaceDefinition def;
    for (const auto& op : kv.second) {
      const std::string op_name = scalar_key(op.first);
      OperationDefinition operation;
      if (op.second.IsScalar()) {
        operation.implementation = op.second.Scalar();
      } else if (op.second.IsMap()) {
        check_keys(op.second, {"implementation", "inputs"},
                   "operation '" + iface + "." + op_name + "'");
        if (op.second["implementation"])
          operation.implementation = op.second["implementation"].Scalar();
        if (op.second["inputs"]) {
          require_map(op.second["inputs"], "operation inputs");
          for (const auto& in : op.second["inputs"])
            operation.inputs[scalar_key(in.first)] = parse_value(in.second);
        }
      } else {
        syntax_error(op.second.Mark(), "operation must be a scalar or mapping");
      }
      def.operations[op_name] = std::move(operation);
    }
    out[iface] = std::move(def);
  }
  return out;
}

NodeTypeDefinition parse_node_type(const std::string& name, const YAML::Node& node) {
  require_map(node, "node type '" + name + "'");
  check_keys(node,
             {"derived_from", "description", "properties", "capabilities", "artifacts",
              "interfaces"},
             "node type '" + name + "'");
  NodeTypeDefinition def;
  def.name = name;
  if (node["derived_from"]) def.derived_from = node["derived_from"].Scalar();
  if (node["properties"]) {
    require_map(node["properties"], "properties of '" + name + "'");
    for (const auto& kv : node["properties"])
      def.properties[scalar_key(kv.first)] = parse_property_definition(kv.second);
  }
  if (node["capabilities"]) {
    require_map(node["capabilities"], "capabilities of '" + name + "'");
    for (const auto& kv : node["capabilities"]) {
      const std::string cap_name = scalar_key(kv.first);
      require_map(kv.second, "capability '" + cap_name + "'");
      check_keys(kv.second, {"type", "properties"}, "capability '" + cap_name + "'");
      CapabilityDefinition cap;
      if (kv.second["type"]) cap.type = kv.second["type"].Scalar();
      if (kv.second["properties"]) {
        require_map(kv.second["properties"], "capability properties");
        for (const auto& pkv : kv.second["properties"])
          cap.properties[scalar_key(pkv.first)] = parse_property_definition(pkv.second);
      }
      def.capabilities[cap_name] = std::move(cap);
    }
  }
  if (node["artifacts"]) def.artifacts = parse_artifacts(node["artifacts"]);
  if (node["interfaces"]) def.interfaces = parse_interfaces(node["interfaces"]);
  return def;
}

NodeTemplate parse_node_template(const std::string& name, const YAML::Node& node) {
  require_map(node, "node template '" + name + "'");
  check_keys(node,
             {"type", "description", "properties", "capabilities", "requirements",
              "artifacts", "interfaces"},
             "node template '" + name + "'");
  NodeTemplate tmpl;
  tmpl.name = name;
  if (!node["type"]) syntax_error(node.Mark(), "node template '" + name + "' has no type");
  tmpl.type_name = node["type"].Scalar();
  if (node["properties"]) {
    require_map(node["properties"], "properties of '" + name + "'");
    for (const auto& kv : node["properties"])
      tmpl.properties[scalar_key(kv.first)] = parse_value(kv.second);
  }
  if (node["capabilities"]) {
    require_map(node["capabilities"], "capabilities of '" + name + "'");
    for (const auto& kv : node["capabilities"]) {
      const std::string cap_name = scalar_key(kv.first);
      require_map(kv.second, "capability '" + cap_name + "'");
      check_keys(kv.second, {"properties"}, "capability assignment '" + cap_name + "'");
      CapabilityAssignment cap;
      if (kv.second["properties"]) {
        require_map(kv.second["properties"], "capability properties");
        for (const auto& pkv : kv.second["properties"])
          cap.properties[scalar_key(pkv.first)] = parse_value(pkv.second);
      }
      tmpl.capabilities[cap_name] = std::move(cap);
    }
  }
  if (node["requirements"]) {
    require_sequence(node["requirements"], "requirements of '" + name + "'");
    for (const auto& item : node["requirements"]) {
      if (!item.IsMap() || item.size() != 1)
        syntax_error(item.Mark(), "requirement must be a single-entry mapping");
      const auto kv = *item.begin();
      RequirementAssignment req;
      req.name = scalar_key(kv.first);
      if (kv.second.IsScalar()) {
        req.target = kv.second.Scalar();
      } else if (kv.second.IsMap()) {
        check_keys(kv.second, {"node"}, "requirement '" + req.name + "'");
        if (!kv.second["node"])
          syntax_error(kv.second.Mark(), "requirement '" + req.name + "' names no node");
        req.target = kv.second["node"].Scalar();
      } else {
        syntax_error(kv.second.Mark(), "requirement target must be a node name");
      }
      tmpl.requirements.push_back(std::move(req));
    }
  }
  if (node["artifacts"]) tmpl.artifacts = parse_artifacts(node["artifacts"]);
  if (node["interfaces"]) tmpl.interfaces = parse_interfaces(node["interfaces"]);
  return tmpl;
}

YAML::Node load_document(const std::string& text) {
  try {
    return YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    syntax_error(e.mark, e.msg);
  }
}

std::string parse_version(const YAML::Node& root) {
  if (!root["tosca_definitions_version"])
    syntax_error(root.Mark(), "missing tosca_definitions_version");
  const std::string version = root["tosca_definitions_version"].Scalar();
  if (version != kSupportedVersion)
    throw Error(Errc::unsupported_version,
                "unsupported tosca_definitions_version '" + version + "' (expected " +
                    std::string(kSupportedVersion) + ")",
                version);
  return version;
}

}  // namespace

ServiceTemplate parse_service_template(const std::string& text) {
  const YAML::Node root = load_document(text);
  require_map(root, "document root");
  check_keys(root,
             {"tosca_definitions_version", "description", "imports", "node_types",
              "topology_template"},
             "document root");

  ServiceTemplate tmpl;
  tmpl.definitions_version = parse_version(root);
  if (root["description"]) tmpl.description = root["description"].Scalar();

  if (root["imports"]) {
    require_sequence(root["imports"], "imports");
    for (const auto& item : root["imports"]) {
      ImportReference ref;
      if (item.IsScalar()) {
        ref.name = ref.reference = item.Scalar();
      } else if (item.IsMap() && item.size() == 1) {
        const auto kv = *item.begin();
        ref.name = scalar_key(kv.first);
        if (!kv.second.IsScalar())
          syntax_error(kv.second.Mark(), "import reference must be a scalar");
        ref.reference = kv.second.Scalar();
      } else {
        syntax_error(item.Mark(), "import must be a scalar or single-entry mapping");
      }
      tmpl.imports.push_back(std::move(ref));
    }
  }

  if (root["node_types"]) {
    require_map(root["node_types"], "node_types");
    for (const auto& kv : root["node_types"]) {
      const std::string name = scalar_key(kv.first);
      if (tmpl.node_types.count(name))
        syntax_error(kv.first.Mark(), "duplicate node type '" + name + "'");
      tmpl.node_types[name] = parse_node_type(name, kv.second);
    }
  }

  if (root["topology_template"]) {
    const YAML::Node topo = root["topology_template"];
    require_map(topo, "topology_template");
    check_keys(topo, {"description", "inputs", "node_templates", "outputs"},
               "topology_template");

    if (topo["inputs"]) {
      require_map(topo["inputs"], "inputs");
      for (const auto& kv : topo["inputs"]) {
        const std::string name = scalar_key(kv.first);
        require_map(kv.second, "input '" + name + "'");
        check_keys(kv.second, {"type", "description", "default"}, "input '" + name + "'");
        InputDefinition def;
        if (kv.second["type"]) def.type = kv.second["type"].Scalar();
        if (kv.second["description"]) def.description = kv.second["description"].Scalar();
        if (kv.second["default"]) def.default_value = parse_value(kv.second["default"]);
        tmpl.topology.inputs[name] = std::move(def);
      }
    }

    if (topo["node_templates"]) {
      require_map(topo["node_templates"], "node_templates");
      for (const auto& kv : topo["node_templates"]) {
        const std::string name = scalar_key(kv.first);
        if (tmpl.topology.node_templates.count(name))
          throw Error(Errc::duplicate_node,
                      "line " + std::to_string(kv.first.Mark().line + 1) +
                          ": duplicate node template '" + name + "'",
                      name);
        tmpl.topology.node_templates[name] = parse_node_template(name, kv.second);
      }
    }

    if (topo["outputs"]) {
      require_map(topo["outputs"], "outputs");
      for (const auto& kv : topo["outputs"]) {
        const std::string name = scalar_key(kv.first);
        require_map(kv.second, "output '" + name + "'");
        check_keys(kv.second, {"description", "value"}, "output '" + name + "'");
        OutputDefinition def;
        if (kv.second["description"]) def.description = kv.second["description"].Scalar();
        if (!kv.second["value"])
          syntax_error(kv.second.Mark(), "output '" + name + "' has no value");
        def.value = parse_value(kv.second["value"]);
        tmpl.topology.outputs[name] = std::move(def);
      }
    }
  }

  return tmpl;
}

std::map<std::string, NodeTypeDefinition> parse_type_library(const std::string& text) {
  const YAML::Node root = load_document(text);
  require_map(root, "document root");
  check_keys(root, {"tosca_definitions_version", "description", "node_types"},
             "document root");
  parse_version(root);

  std::map<std::string, NodeTypeDefinition> out;
  if (root["node_types"]) {
    require_map(root["node_types"], "node_types");
    for (const auto& kv : root["node_types"]) {
      const std::string name = scalar_key(kv.first);
      if (out.count(name)) syntax_error(kv.first.Mark(), "duplicate node type '" + name + "'");
      out[name] = parse_node_type(name, kv.second);
    }
  }
  return out;
}

namespace {

PropertyDefinition prop(std::string type, bool required, std::optional<Value> def,
                        std::vector<ConstraintClause> constraints = {}) {
  PropertyDefinition p;
  p.type = std::move(type);
  p.required = required;
  p.default_value = std::move(def);
  p.constraints = std::move(constraints);
  return p;
}

}  // namespace

TypeRegistry builtin_types() {
  TypeRegistry registry;

  NodeTypeDefinition root;
  root.name = "tosca.nodes.Root";
  registry.add(root);

  NodeTypeDefinition compute;
  compute.name = "tosca.nodes.Compute";
  compute.derived_from = "tosca.nodes.Root";
  CapabilityDefinition host;
  host.type = "tosca.capabilities.Container";
  host.properties["num_cpus"] =
      prop("integer", false, Value(std::int64_t{1}),
           {{ConstraintKind::greater_or_equal, Value(std::int64_t{1})}});
  host.properties["mem_size"] =
      prop("scalar-unit.size", false, Value(*ScalarSize::parse("1 GB")));
  host.properties["disk_size"] =
      prop("scalar-unit.size", false, Value(*ScalarSize::parse("10 GB")));
  compute.capabilities["host"] = std::move(host);

  CapabilityDefinition os;
  os.type = "tosca.capabilities.OperatingSystem";
  os.properties["architecture"] = prop("string", false, Value("x86_64"));
  os.properties["type"] = prop("string", false, std::nullopt);
  os.properties["distribution"] = prop("string", false, std::nullopt);
  os.properties["version"] = prop("version", false, std::nullopt);
  compute.capabilities["os"] = std::move(os);

  CapabilityDefinition endpoint;
  endpoint.type = "tosca.capabilities.Endpoint";
  endpoint.properties["network_name"] =
      prop("string", false, Value("PRIVATE"),
           {{ConstraintKind::valid_values, Value(ValueList{Value("PUBLIC"), Value("PRIVATE")})}});
  endpoint.properties["dns_name"] = prop("string", false, std::nullopt);
  compute.capabilities["endpoint"] = std::move(endpoint);

  CapabilityDefinition scalable;
  scalable.type = "tosca.capabilities.Scalable";
  scalable.properties["count"] = prop("integer", false, Value(std::int64_t{1}));
  scalable.properties["min_instances"] = prop("integer", false, Value(std::int64_t{1}));
  scalable.properties["max_instances"] = prop("integer", false, Value(std::int64_t{1}));
  compute.capabilities["scalable"] = std::move(scalable);
  registry.add(std::move(compute));

  NodeTypeDefinition software;
  software.name = "tosca.nodes.SoftwareComponent";
  software.derived_from = "tosca.nodes.Root";
  software.properties["component_version"] = prop("version", false, std::nullopt);
  registry.add(std::move(software));

  return registry;
}

void ImportResolver::add_search_dir(std::filesystem::path dir) {
  dirs_.push_back(std::move(dir));
}

void ImportResolver::add_mapping(std::string reference, std::filesystem::path file) {
  table_[std::move(reference)] = std::move(file);
}

std::optional<std::filesystem::path> ImportResolver::resolve(
    const std::string& reference) const {
  if (auto it = table_.find(reference); it != table_.end()) return it->second;
  const std::filesystem::path ref(reference);
  for (const auto& dir : dirs_) {
    std::error_code ec;
    if (std::filesystem::is_regular_file(dir / ref, ec)) return dir / ref;
    if (std::filesystem::is_regular_file(dir / ref.filename(), ec))
      return dir / ref.filename();
  }
  return std::nullopt;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot read " + path.string(), path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TypeRegistry resolve_imports(const ServiceTemplate& tmpl, const ImportResolver& resolver,
                             std::vector<std::string>* warnings) {
  TypeRegistry registry = builtin_types();
  std::set<std::string> builtin_names;
  for (const auto& [name, def] : registry.all()) builtin_names.insert(name);

  auto warn = [&](std::string message) {
    if (warnings != nullptr) warnings->push_back(std::move(message));
  };

  auto merge_definition = [&](const std::string& origin, const NodeTypeDefinition& def) {
    const NodeTypeDefinition* existing = registry.find(def.name);
    if (existing == nullptr) {
      registry.add(def);
      return;
    }
    if (*existing == def) {
      warn("duplicate identical definition of " + def.name + " from " + origin);
      return;
    }
    if (builtin_names.count(def.name)) {
      warn(origin + " shadows built-in type " + def.name);
      registry.add(def);
      return;
    }
    throw Error(Errc::duplicate_type_conflict,
                origin + " redefines " + def.name + " with a different structure", def.name);
  };

  for (const auto& import : tmpl.imports) {
    auto path = resolver.resolve(import.reference);
    if (!path)
      throw Error(Errc::unresolved_import, "cannot resolve import " + import.reference,
                  import.reference);
    const auto library = parse_type_library(read_file(*path));
    for (const auto& [name, def] : library) merge_definition(import.reference, def);
  }

  for (const auto& [name, def] : tmpl.node_types) merge_definition("template", def);

  return registry;
}

}  // namespace stratus::tosca
