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
// TOSCA Simple Profile YAML ingestion: strict-mode document parsing, the
// shipped normative base types, and local-only import resolution.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stratus/tosca/model.hpp"

namespace stratus::tosca {

// Strict structural parse: unknown keys are rejected, duplicate node template
// names are a hard error, every failure carries a line/column. No semantic
// validation beyond the definitions_version check.
ServiceTemplate parse_service_template(const std::string& text);

// A definitions-only document (version header plus node_types).
std::map<std::string, NodeTypeDefinition> parse_type_library(const std::string& text);

// Normative base types shipped in code: tosca.nodes.Root, tosca.nodes.Compute
// (host/os/endpoint/scalable capabilities with defaults), and
// tosca.nodes.SoftwareComponent.
TypeRegistry builtin_types();

/// Maps import references to local files. Explicit table entries win; search
/// directories are then tried with the full reference and its basename. No
/// network access ever happens.
class ImportResolver {
 public:
  void add_search_dir(std::filesystem::path dir);
  void add_mapping(std::string reference, std::filesystem::path file);

  std::optional<std::filesystem::path> resolve(const std::string& reference) const;

 private:
  std::vector<std::filesystem::path> dirs_;
  std::map<std::string, std::filesystem::path> table_;
};

// Built-in types, then each import in declaration order, then template-local
// node_types. Identical redefinitions and shadowed built-ins produce warnings;
// structurally different redefinitions of a custom type are an error.
TypeRegistry resolve_imports(const ServiceTemplate& tmpl, const ImportResolver& resolver,
                             std::vector<std::string>* warnings = nullptr);

}  // namespace stratus::tosca
