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

#include "stratus/hot/hot.hpp"

#include <yaml-cpp/yaml.h>

#include "stratus/error.hpp"

namespace stratus::hot {

namespace {

void emit_section(std::string& out, std::string_view key, const ValueMap& map) {
  out += key;
  if (map.empty()) {
    out += ": {}\n";
    return;
  }
  out += ":\n";
  emit_yaml(out, Value(map), 1);
}

}  // namespace

std::string serialize_hot(const HotDocument& doc) {
  std::string out;
  out += "heat_template_version: " + doc.heat_template_version + "\n";
  emit_section(out, "parameters", doc.parameters);

  if (doc.resources.empty()) {
    out += "resources: {}\n";
  } else {
    out += "resources:\n";
    for (const auto& [name, res] : doc.resources) {
      out += "  " + name + ":\n";
      out += "    type: " + res.type + "\n";
      if (!res.properties.empty()) {
        out += "    properties:\n";
        emit_yaml(out, Value(res.properties), 3);
      }
      if (!res.depends_on.empty()) {
        out += "    depends_on:\n";
        for (const auto& dep : res.depends_on) out += "      - " + dep + "\n";
      }
    }
  }

  emit_section(out, "outputs", doc.outputs);
  return out;
}

namespace {

Value yaml_to_value(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Null:
      return Value();
    case YAML::NodeType::Scalar:
      return Value::from_scalar(node.Scalar(), node.Tag() == "!");
    case YAML::NodeType::Sequence: {
      ValueList list;
      for (const auto& item : node) list.push_back(yaml_to_value(item));
      return Value(std::move(list));
    }
    case YAML::NodeType::Map: {
      ValueMap map;
      for (const auto& kv : node) map[kv.first.Scalar()] = yaml_to_value(kv.second);
      return Value(std::move(map));
    }
    default:
      throw Error(Errc::syntax_error, "unsupported YAML node in HOT document");
  }
}

}  // namespace

HotDocument parse_hot(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw Error(Errc::syntax_error, "line " + std::to_string(e.mark.line + 1) + ", column " +
                                        std::to_string(e.mark.column + 1) + ": " + e.msg);
  }
  if (!root.IsMap()) throw Error(Errc::syntax_error, "HOT document root must be a mapping");

  HotDocument doc;
  if (!root["heat_template_version"])
    throw Error(Errc::syntax_error, "missing heat_template_version");
  doc.heat_template_version = root["heat_template_version"].Scalar();

  if (root["parameters"] && root["parameters"].IsMap())
    doc.parameters = yaml_to_value(root["parameters"]).as_map();
  if (root["outputs"] && root["outputs"].IsMap())
    doc.outputs = yaml_to_value(root["outputs"]).as_map();

  if (root["resources"] && root["resources"].IsMap()) {
    for (const auto& kv : root["resources"]) {
      const std::string name = kv.first.Scalar();
      if (!kv.second.IsMap() || !kv.second["type"])
        throw Error(Errc::syntax_error, "resource " + name + " has no type");
      HotResource res;
      res.type = kv.second["type"].Scalar();
      if (kv.second["properties"] && kv.second["properties"].IsMap())
        res.properties = yaml_to_value(kv.second["properties"]).as_map();
      if (kv.second["depends_on"]) {
        if (kv.second["depends_on"].IsScalar()) {
          res.depends_on.push_back(kv.second["depends_on"].Scalar());
        } else if (kv.second["depends_on"].IsSequence()) {
          for (const auto& dep : kv.second["depends_on"])
            res.depends_on.push_back(dep.Scalar());
        }
      }
      doc.resources[name] = std::move(res);
    }
  }
  return doc;
}

}  // namespace stratus::hot
