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
// One self-contained universe: simulated providers, the orchestrator on top
// of them, and the elasticity manager on top of that, advanced together on a
// shared logical clock and optionally persisted to a state directory.

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stratus/elastic/manager.hpp"
#include "stratus/orch/orchestrator.hpp"
#include "stratus/orch/store.hpp"
#include "stratus/sim/cloud.hpp"

namespace stratus {

struct WorldOptions {
  std::vector<sim::ProviderConfig> providers;
  tosca::ImportResolver resolver;
  std::string auth_token;
  std::optional<std::filesystem::path> state_dir;
};

class World {
 public:
  explicit World(WorldOptions options);

  // orchestrator and manager hold references into this object
  World(const World&) = delete;
  World& operator=(const World&) = delete;

  sim::Cloud& cloud() { return cloud_; }
  orch::Orchestrator& orchestrator() { return orchestrator_; }
  elastic::Manager& elasticity() { return elasticity_; }

  /// Advance the logical clock: per tick the simulator steps first, then the
  /// orchestrator pumps deployment state machines, then the elasticity
  /// manager schedules jobs and takes its scaling decision. Returns every
  /// simulator event the ticks produced, in order.
  std::vector<sim::Event> tick(int n = 1);

  /// Persist everything to the state directory. No-op for in-memory worlds.
  void save();

 private:
  static sim::Cloud make_cloud(const WorldOptions& options,
                               const std::unique_ptr<orch::DeploymentStore>& store);

  std::unique_ptr<orch::DeploymentStore> store_;
  sim::Cloud cloud_;
  orch::Orchestrator orchestrator_;
  elastic::Manager elasticity_;
};

}  // namespace stratus
