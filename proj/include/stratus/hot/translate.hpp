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
// TOSCA topology to HOT translation: best-fit flavor mapping, image metadata
// matching, and folding of hosted software nodes into server user_data.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "stratus/hot/hot.hpp"
#include "stratus/tosca/graph.hpp"

namespace stratus::hot {

struct FlavorEntry {
  std::string name;
  std::int64_t vcpus = 1;
  ScalarSize mem;
  ScalarSize disk;

  bool operator==(const FlavorEntry&) const = default;
};

struct FlavorCatalog {
  std::vector<FlavorEntry> entries;

  const FlavorEntry* find(const std::string& name) const;
  bool operator==(const FlavorCatalog&) const = default;
};

struct ImageEntry {
  std::string name;
  std::string architecture;
  std::string type;
  std::string distribution;
  std::string version;

  bool operator==(const ImageEntry&) const = default;
};

struct ImageCatalog {
  std::vector<ImageEntry> entries;

  const ImageEntry* find(const std::string& name) const;
  bool contains(const std::string& name) const { return find(name) != nullptr; }
  bool operator==(const ImageCatalog&) const = default;
};

// The shipped defaults reproduce the (2 cpus, 512 MB, 10 GB) → m1.medium
// mapping and carry base images for RHEL 6.5 and Ubuntu 14.04.
FlavorCatalog default_flavor_catalog();
ImageCatalog default_image_catalog();

FlavorCatalog parse_flavor_catalog(const std::string& text);
ImageCatalog parse_image_catalog(const std::string& text);
FlavorCatalog load_flavor_catalog(const std::filesystem::path& path);
ImageCatalog load_image_catalog(const std::filesystem::path& path);

struct HostRequirements {
  std::int64_t num_cpus = 1;
  ScalarSize mem_size;
  ScalarSize disk_size;

  bool operator==(const HostRequirements&) const = default;
};

struct OsRequirements {
  std::optional<std::string> image;  // explicit image name wins over metadata
  std::optional<std::string> architecture;
  std::optional<std::string> type;
  std::optional<std::string> distribution;
  std::optional<std::string> version;

  bool operator==(const OsRequirements&) const = default;
};

HostRequirements host_requirements(const tosca::ResolvedNode& node);
OsRequirements os_requirements(const tosca::ResolvedNode& node);

// Minimal entry under the catalog's total order (vcpus, mem bytes, disk
// bytes, name) satisfying every dimension. Throws NoMatchingFlavor.
std::string map_flavor(const HostRequirements& host, const FlavorCatalog& catalog);

// Explicit image name verbatim; otherwise the unique metadata match
// (distribution case-insensitive). Throws NoMatchingImage / AmbiguousImage.
std::string map_image(const OsRequirements& os, const ImageCatalog& catalog);

/// Per-compute-node translation adjustments supplied by the orchestrator:
/// decided image/flavor, the preconfigured procedure's task drop, and exact
/// resource names for scale-out stacks.
struct NodeOverride {
  std::optional<std::string> image;
  std::optional<std::string> flavor;
  bool drop_tasks = false;
  // nullopt keeps the default naming scheme; an empty list yields no resources
  std::optional<std::vector<std::string>> instance_names;
};

struct TranslateOptions {
  std::map<std::string, NodeOverride> overrides;
  ValueMap inputs;
};

// Compute nodes become OS::Nova::Server resources with user_data_format
// SOFTWARE_CONFIG; hosted software folds into user_data as an ordered task
// list with evaluated inputs (unresolvable attributes become get_attr
// references); DependsOn edges lift to the hosting servers' depends_on.
HotDocument translate(const tosca::TopologyGraph& graph, const FlavorCatalog& flavors,
                      const ImageCatalog& images, const TranslateOptions& options = {});

}  // namespace stratus::hot
