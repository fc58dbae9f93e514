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
// Heat Orchestration Template document model with a canonical, byte-stable
// serializer and a structural parser for round-trip checks.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "stratus/value.hpp"

namespace stratus::hot {

inline constexpr std::string_view kHeatTemplateVersion = "2013-05-23";

struct HotResource {
  std::string type;  // e.g. "OS::Nova::Server"
  ValueMap properties;
  std::vector<std::string> depends_on;

  bool operator==(const HotResource&) const = default;
};

struct HotDocument {
  std::string heat_template_version{kHeatTemplateVersion};
  ValueMap parameters;
  std::map<std::string, HotResource> resources;
  ValueMap outputs;

  bool operator==(const HotDocument&) const = default;
};

// Canonical rendering: fixed top-level order (heat_template_version,
// parameters, resources, outputs), resource keys type / properties /
// depends_on, sorted map keys, two-space indentation. Byte-stable.
std::string serialize_hot(const HotDocument& doc);

// Structural inverse of serialize_hot; accepts any YAML with the same shape.
HotDocument parse_hot(const std::string& text);

}  // namespace stratus::hot
