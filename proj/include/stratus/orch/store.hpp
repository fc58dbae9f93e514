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

#pragma once

#include <filesystem>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "stratus/value.hpp"

namespace stratus::orch {

/// Lossless Value -> JSON: sizes and intrinsic functions are tagged so the
/// round trip through the store preserves them exactly.
std::string value_to_json_text(const Value& value);
Value value_from_json_text(const std::string& text);

/// Human-facing JSON: sizes render as their canonical strings, functions as
/// single-key objects. Used for porcelain output and script assertions.
std::string value_to_plain_json_text(const Value& value);

/// Durable state directory: one JSON document per deployment plus a world
/// document for everything that is not deployment-scoped (clock, simulator
/// state, job queues). Writes go through a temp file and an atomic rename so
/// a crash never leaves a half-written record behind.
class DeploymentStore {
 public:
  explicit DeploymentStore(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }

  void save(const std::string& id, const std::string& json_text);
  std::optional<std::string> load(const std::string& id) const;
  std::vector<std::string> list_ids() const;

  void save_world(const std::string& json_text);
  std::optional<std::string> load_world() const;

 private:
  void write_atomic(const std::filesystem::path& target, const std::string& text);

  std::filesystem::path dir_;
  mutable std::shared_mutex mutex_;
};

}  // namespace stratus::orch
