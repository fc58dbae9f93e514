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

#include "stratus/world.hpp"

#include "json.hpp"
#include "stratus/error.hpp"

namespace stratus {

using nlohmann::json;

sim::Cloud World::make_cloud(const WorldOptions& options,
                             const std::unique_ptr<orch::DeploymentStore>& store) {
  if (store) {
    if (auto text = store->load_world()) {
      try {
        auto doc = json::parse(*text);
        return sim::Cloud::restore_json(doc.at("cloud").dump());
      } catch (const json::exception& ex) {
        throw Error(Errc::store_unavailable, std::string("corrupt world state: ") + ex.what());
      }
    }
  }
  return sim::Cloud(options.providers);
}

World::World(WorldOptions options)
    : store_(options.state_dir
                 ? std::make_unique<orch::DeploymentStore>(*options.state_dir)
                 : nullptr),
      cloud_(make_cloud(options, store_)),
      orchestrator_(cloud_, std::move(options.resolver), options.auth_token),
      elasticity_(orchestrator_) {
  if (!store_) return;
  for (const auto& id : store_->list_ids()) {
    if (auto text = store_->load(id)) {
      orchestrator_.adopt(orch::deployment_from_json(*text));
    }
  }
  if (auto text = store_->load_world()) {
    try {
      auto doc = json::parse(*text);
      if (doc.contains("elastic")) elasticity_.restore_json(doc.at("elastic").dump());
    } catch (const json::exception& ex) {
      throw Error(Errc::store_unavailable, std::string("corrupt world state: ") + ex.what());
    }
  }
}

std::vector<sim::Event> World::tick(int n) {
  std::vector<sim::Event> events;
  for (int i = 0; i < n; ++i) {
    cloud_.tick(1);
    orchestrator_.process_tick();
    elasticity_.process_tick();
    auto batch = cloud_.drain_events();
    events.insert(events.end(), batch.begin(), batch.end());
  }
  return events;
}

void World::save() {
  if (!store_) return;
  for (const auto& id : orchestrator_.deployment_ids()) {
    store_->save(id, orch::deployment_to_json(orchestrator_.deployment(id)));
  }
  json doc;
  doc["cloud"] = json::parse(cloud_.snapshot_json());
  doc["elastic"] = json::parse(elasticity_.snapshot_json());
  store_->save_world(doc.dump(2));
}

}  // namespace stratus
