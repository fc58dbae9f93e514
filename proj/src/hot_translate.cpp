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

#include "stratus/hot/translate.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "stratus/error.hpp"

namespace stratus::hot {

const FlavorEntry* FlavorCatalog::find(const std::string& name) const {
  for (const auto& entry : entries)
    if (entry.name == name) return &entry;
  return nullptr;
}

const ImageEntry* ImageCatalog::find(const std::string& name) const {
  for (const auto& entry : entries)
    if (entry.name == name) return &entry;
  return nullptr;
}

FlavorCatalog default_flavor_catalog() {
  auto size = [](const char* text) { return *ScalarSize::parse(text); };
  return {{
      {"m1.tiny", 1, size("512 MB"), size("1 GB")},
      {"m1.small", 1, size("2 GB"), size("20 GB")},
      {"m1.medium", 2, size("4 GB"), size("40 GB")},
      {"m1.large", 4, size("8 GB"), size("80 GB")},
      {"m1.xlarge", 8, size("16 GB"), size("160 GB")},
  }};
}

ImageCatalog default_image_catalog() {
  return {{
      {"rhel-6.5-test-image", "x86_64", "linux", "rhel", "6.5"},
      {"ubuntu-14.04-vanilla", "x86_64", "linux", "ubuntu", "14.04"},
  }};
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot read " + path.string(), path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

YAML::Node load_yaml(const std::string& text, const char* what) {
  try {
    YAML::Node root = YAML::Load(text);
    if (!root.IsMap()) throw Error(Errc::bad_config, std::string(what) + " must be a mapping");
    return root;
  } catch (const YAML::ParserException& e) {
    throw Error(Errc::bad_config, std::string(what) + ": " + e.msg);
  }
}

ScalarSize scalar_size_field(const YAML::Node& node, const char* key) {
  if (!node[key]) throw Error(Errc::bad_config, std::string("missing ") + key);
  auto size = ScalarSize::parse(node[key].Scalar());
  if (!size)
    throw Error(Errc::bad_config, std::string(key) + ": not a size: " + node[key].Scalar());
  return *size;
}

}  // namespace

FlavorCatalog parse_flavor_catalog(const std::string& text) {
  const YAML::Node root = load_yaml(text, "flavor catalog");
  if (!root["flavors"] || !root["flavors"].IsSequence())
    throw Error(Errc::bad_config, "flavor catalog needs a 'flavors' sequence");
  FlavorCatalog catalog;
  std::set<std::string> names;
  for (const auto& item : root["flavors"]) {
    FlavorEntry entry;
    if (!item["name"]) throw Error(Errc::bad_config, "flavor entry without name");
    entry.name = item["name"].Scalar();
    if (!names.insert(entry.name).second)
      throw Error(Errc::bad_config, "duplicate flavor " + entry.name, entry.name);
    if (!item["vcpus"]) throw Error(Errc::bad_config, "flavor entry without vcpus");
    entry.vcpus = item["vcpus"].as<std::int64_t>();
    entry.mem = scalar_size_field(item, "mem");
    entry.disk = scalar_size_field(item, "disk");
    catalog.entries.push_back(std::move(entry));
  }
  return catalog;
}

ImageCatalog parse_image_catalog(const std::string& text) {
  const YAML::Node root = load_yaml(text, "image catalog");
  if (!root["images"] || !root["images"].IsSequence())
    throw Error(Errc::bad_config, "image catalog needs an 'images' sequence");
  ImageCatalog catalog;
  std::set<std::string> names;
  for (const auto& item : root["images"]) {
    ImageEntry entry;
    if (!item["name"]) throw Error(Errc::bad_config, "image entry without name");
    entry.name = item["name"].Scalar();
    if (!names.insert(entry.name).second)
      throw Error(Errc::bad_config, "duplicate image " + entry.name, entry.name);
    if (item["architecture"]) entry.architecture = item["architecture"].Scalar();
    if (item["type"]) entry.type = item["type"].Scalar();
    if (item["distribution"]) entry.distribution = item["distribution"].Scalar();
    if (item["version"]) entry.version = item["version"].Scalar();
    catalog.entries.push_back(std::move(entry));
  }
  return catalog;
}

FlavorCatalog load_flavor_catalog(const std::filesystem::path& path) {
  return parse_flavor_catalog(read_file(path));
}

ImageCatalog load_image_catalog(const std::filesystem::path& path) {
  return parse_image_catalog(read_file(path));
}

namespace {

ScalarSize to_size(const Value& value, const std::string& what) {
  if (value.is_size()) return value.as_size();
  if (value.is_int() && value.as_int() >= 0)
    return ScalarSize::from_bytes(static_cast<std::uint64_t>(value.as_int()));
  throw Error(Errc::incompatible_operand, what + " must be a size, got " +
                                              std::string(value.type_name()));
}

std::optional<std::string> os_field(const tosca::ResolvedNode& node, const char* key) {
  const Value* value = node.capability_property("os", key);
  if (value == nullptr || value->is_null()) return std::nullopt;
  return value->scalar_string();
}

bool ascii_iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i])))
      return false;
  }
  return true;
}

}  // namespace

HostRequirements host_requirements(const tosca::ResolvedNode& node) {
  HostRequirements req;
  req.mem_size = ScalarSize::from_bytes(0);
  req.disk_size = ScalarSize::from_bytes(0);
  if (const Value* v = node.capability_property("host", "num_cpus"); v && v->is_int())
    req.num_cpus = v->as_int();
  if (const Value* v = node.capability_property("host", "mem_size"))
    req.mem_size = to_size(*v, node.name + ".host.mem_size");
  if (const Value* v = node.capability_property("host", "disk_size"))
    req.disk_size = to_size(*v, node.name + ".host.disk_size");
  return req;
}

OsRequirements os_requirements(const tosca::ResolvedNode& node) {
  OsRequirements req;
  req.image = os_field(node, "image");
  req.architecture = os_field(node, "architecture");
  req.type = os_field(node, "type");
  req.distribution = os_field(node, "distribution");
  req.version = os_field(node, "version");
  return req;
}

std::string map_flavor(const HostRequirements& host, const FlavorCatalog& catalog) {
  std::vector<const FlavorEntry*> ordered;
  ordered.reserve(catalog.entries.size());
  for (const auto& entry : catalog.entries) ordered.push_back(&entry);
  std::sort(ordered.begin(), ordered.end(), [](const FlavorEntry* a, const FlavorEntry* b) {
    return std::tie(a->vcpus, a->mem, a->disk, a->name) <
           std::tie(b->vcpus, b->mem, b->disk, b->name);
  });
  for (const FlavorEntry* entry : ordered) {
    if (entry->vcpus >= host.num_cpus && entry->mem >= host.mem_size &&
        entry->disk >= host.disk_size)
      return entry->name;
  }
  throw Error(Errc::no_matching_flavor,
              "no flavor offers " + std::to_string(host.num_cpus) + " cpus, " +
                  host.mem_size.str() + " memory, " + host.disk_size.str() + " disk");
}

std::string map_image(const OsRequirements& os, const ImageCatalog& catalog) {
  if (os.image) return *os.image;

  std::vector<const ImageEntry*> matches;
  for (const auto& entry : catalog.entries) {
    if (os.architecture && entry.architecture != *os.architecture) continue;
    if (os.type && entry.type != *os.type) continue;
    if (os.distribution && !ascii_iequals(entry.distribution, *os.distribution)) continue;
    if (os.version && entry.version != *os.version) continue;
    matches.push_back(&entry);
  }

  auto describe = [&] {
    std::string out;
    auto add = [&](const char* key, const std::optional<std::string>& v) {
      if (!v) return;
      if (!out.empty()) out += "/";
      out += *v;
      (void)key;
    };
    add("architecture", os.architecture);
    add("type", os.type);
    add("distribution", os.distribution);
    add("version", os.version);
    return out.empty() ? std::string("unconstrained os") : out;
  };

  if (matches.empty())
    throw Error(Errc::no_matching_image, "no image matches " + describe());
  if (matches.size() > 1) {
    std::string names;
    for (const auto* m : matches) {
      if (!names.empty()) names += ", ";
      names += m->name;
    }
    throw Error(Errc::ambiguous_image, "multiple images match " + describe() + ": " + names);
  }
  return matches[0]->name;
}

namespace {

Value hot_eval(const Value& value, tosca::EvalContext ctx);

std::string self_resolved(const std::string& name, const tosca::EvalContext& ctx) {
  if (name != "SELF") return name;
  if (ctx.self.empty())
    throw Error(Errc::unknown_reference, "SELF used outside a node context");
  return ctx.self;
}

// Chases get_input/get_property chains; a terminal get_attribute becomes a
// HOT-style {get_attr: [node, attribute]} reference resolved at runtime.
Value hot_eval_function(FunctionExpr fn, tosca::EvalContext ctx) {
  for (int depth = 0; depth < 32; ++depth) {
    if (fn.kind == FunctionKind::get_attribute) {
      if (fn.args.size() != 2)
        throw Error(Errc::unknown_reference, "get_attribute expects [node, attribute]");
      ValueList args{Value(self_resolved(fn.args[0], ctx)), Value(fn.args[1])};
      return Value(ValueMap{{"get_attr", Value(std::move(args))}});
    }
    if (fn.kind == FunctionKind::get_input)
      return hot_eval(tosca::evaluate_function(fn, ctx), ctx);

    if (fn.args.size() != 2)
      throw Error(Errc::unknown_reference, "get_property expects [node, property]");
    const std::string node = self_resolved(fn.args[0], ctx);
    if (ctx.nodes == nullptr || !ctx.nodes->has_node(node))
      throw Error(Errc::unknown_reference, "unknown node " + node, node);
    std::optional<Value> raw = ctx.nodes->property(node, fn.args[1]);
    if (!raw)
      throw Error(Errc::unknown_reference, "node " + node + " has no property " + fn.args[1],
                  node);
    ctx.self = node;
    if (raw->is_function()) {
      fn = raw->as_function();
      continue;
    }
    return hot_eval(*raw, ctx);
  }
  throw Error(Errc::unknown_reference, "property expression recursion limit exceeded");
}

Value hot_eval(const Value& value, tosca::EvalContext ctx) {
  if (value.is_function()) return hot_eval_function(value.as_function(), ctx);
  if (value.is_size()) return Value(value.as_size().str());
  if (value.is_list()) {
    ValueList out;
    out.reserve(value.as_list().size());
    for (const auto& item : value.as_list()) out.push_back(hot_eval(item, ctx));
    return Value(std::move(out));
  }
  if (value.is_map()) {
    ValueMap out;
    for (const auto& [key, item] : value.as_map()) out[key] = hot_eval(item, ctx);
    return Value(std::move(out));
  }
  return value;
}

std::string instance_resource_name(const std::string& node, size_t index) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "%03zu", index);
  return node + "-" + buf;
}

}  // namespace

HotDocument translate(const tosca::TopologyGraph& graph, const FlavorCatalog& flavors,
                      const ImageCatalog& images, const TranslateOptions& options) {
  HotDocument doc;
  tosca::GraphSource source(graph);
  tosca::EvalContext ctx;
  ctx.nodes = &source;
  ctx.input_definitions = &graph.inputs;
  ctx.inputs = &options.inputs;

  // Software with contextualization steps must land on some server.
  for (const auto& [name, node] : graph.nodes) {
    if (node.is_compute() || graph.compute_host(name)) continue;
    for (const auto& [iname, iface] : node.interfaces)
      for (const auto& [op, def] : iface.operations)
        if (!def.implementation.empty())
          throw Error(Errc::untranslatable_node,
                      "node " + name + " has lifecycle steps but no compute host", name);
  }

  // Resource names per compute node, honoring overrides and scalable count.
  std::map<std::string, std::vector<std::string>> resource_names;
  for (const auto& [name, node] : graph.nodes) {
    if (!node.is_compute()) continue;
    const NodeOverride* over = nullptr;
    if (auto it = options.overrides.find(name); it != options.overrides.end())
      over = &it->second;
    if (over != nullptr && over->instance_names.has_value()) {
      resource_names[name] = *over->instance_names;
    } else {
      const auto count = tosca::scaling_bounds(graph, name).count;
      std::vector<std::string> names;
      if (count == 1) {
        names.push_back(name);
      } else {
        for (std::int64_t i = 0; i < count; ++i)
          names.push_back(instance_resource_name(name, static_cast<size_t>(i)));
      }
      resource_names[name] = std::move(names);
    }
  }

  for (const auto& [name, node] : graph.nodes) {
    if (!node.is_compute()) continue;
    const NodeOverride* over = nullptr;
    if (auto it = options.overrides.find(name); it != options.overrides.end())
      over = &it->second;

    ValueMap properties;
    properties["flavor"] = over != nullptr && over->flavor
                               ? *over->flavor
                               : map_flavor(host_requirements(node), flavors);
    properties["image"] = over != nullptr && over->image
                              ? *over->image
                              : map_image(os_requirements(node), images);
    properties["user_data_format"] = "SOFTWARE_CONFIG";

    if (const Value* network = node.capability_property("endpoint", "network_name")) {
      if (network->is_string() && network->as_string() == "PUBLIC")
        properties["network"] = "PUBLIC";
    }

    if (over == nullptr || !over->drop_tasks) {
      const auto tasks = tosca::config_tasks(graph, name);
      if (!tasks.empty()) {
        ValueList list;
        for (const auto& task : tasks) {
          ValueMap entry;
          entry["node"] = task.node;
          entry["operation"] = task.operation;
          entry["implementation"] = task.implementation;
          if (!task.inputs.empty()) {
            ValueMap inputs;
            tosca::EvalContext task_ctx = ctx;
            task_ctx.self = task.node;
            for (const auto& [key, raw] : task.inputs)
              inputs[key] = hot_eval(raw, task_ctx);
            entry["inputs"] = Value(std::move(inputs));
          }
          list.push_back(Value(std::move(entry)));
        }
        properties["user_data"] = Value(ValueMap{{"tasks", Value(std::move(list))}});
      }
    }

    // DependsOn edges lift to the servers hosting both endpoints.
    std::set<std::string> deps;
    for (const auto& edge : graph.edges) {
      auto src = graph.compute_host(edge.source);
      auto dst = graph.compute_host(edge.target);
      if (!src || !dst || *src != name || *dst == name) continue;
      for (const auto& target_resource : resource_names[*dst]) deps.insert(target_resource);
    }

    HotResource resource;
    resource.type = "OS::Nova::Server";
    resource.properties = std::move(properties);
    resource.depends_on.assign(deps.begin(), deps.end());
    for (const auto& resource_name : resource_names[name])
      doc.resources[resource_name] = resource;
  }

  for (const auto& [name, output] : graph.outputs) {
    ValueMap entry;
    if (!output.description.empty()) entry["description"] = output.description;
    entry["value"] = hot_eval(output.value, ctx);
    doc.outputs[name] = Value(std::move(entry));
  }

  return doc;
}

}  // namespace stratus::hot
