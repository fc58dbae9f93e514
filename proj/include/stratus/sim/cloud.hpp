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
// Deterministic simulated cloud. Two backend styles: Heat-like providers
// consume HOT documents; IM-like providers consume instance groups and run
// the master-node contextualization procedure (agent install on one public
// node gates everyone else's configuration). All progress happens on an
// explicit logical clock; there is no wall clock and no randomness.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stratus/hot/translate.hpp"
#include "stratus/tosca/graph.hpp"

namespace stratus::sim {

enum class BackendKind { heat_like, im_like };

std::string_view backend_kind_name(BackendKind kind);
std::optional<BackendKind> backend_kind_from(std::string_view name);

enum class InstanceState { BOOTING, CONTEXTUALIZING, RUNNING, TERMINATED };

std::string_view instance_state_name(InstanceState state);

struct ProviderConfig {
  std::string id;
  BackendKind backend = BackendKind::heat_like;
  int sla_rank = 0;
  std::int64_t max_vms = 0;
  std::int64_t max_vcpus = 0;
  ScalarSize max_mem;
  std::string public_pool;     // dotted-quad/prefix, e.g. "198.51.100.0/28"
  std::string private_subnet;  // e.g. "10.0.0.0/24"
  int boot_ticks = 3;
  int agent_ticks = 2;
  int task_ticks = 2;
  std::string runtime = "vm";  // vm | container, surfaced on instances
  hot::FlavorCatalog flavors;
  hot::ImageCatalog images;

  bool operator==(const ProviderConfig&) const = default;
};

std::vector<ProviderConfig> parse_providers(const std::string& text);
std::vector<ProviderConfig> load_providers(const std::filesystem::path& path);

struct Event {
  long tick = 0;
  std::string provider;
  std::string instance;
  std::string old_state;  // "-" for creation
  std::string new_state;

  // Line-oriented record: "tick provider instance old_state new_state".
  std::string line() const;

  bool operator==(const Event&) const = default;
};

struct SimInstance {
  std::string id;  // "<deployment>/<node>-NNN"
  std::string provider;
  std::string group;       // owning stack or infrastructure id
  std::string deployment;  // orchestrator deployment id
  std::string node;        // topology node template name
  std::int64_t index = 0;
  std::string flavor;
  std::string image;
  std::int64_t vcpus = 0;
  std::uint64_t mem_bytes = 0;
  InstanceState state = InstanceState::BOOTING;
  int boot_remaining = 0;
  int config_remaining = 0;
  int tasks = 0;
  bool wants_public = false;
  bool is_master = false;
  std::string runtime;
  std::optional<std::string> public_address;
  std::string private_address;
  long created_tick = 0;
  std::vector<std::string> overlays;
};

/// Request for one instance, used by IM-style deploys and scale additions.
struct InstanceSpec {
  std::string node;
  std::int64_t index = 0;
  std::string flavor;
  std::string image;
  int tasks = 0;
  bool wants_public = false;
  std::vector<std::string> overlays;
};

struct Usage {
  std::int64_t vms = 0;
  std::int64_t vcpus = 0;
  std::uint64_t mem_bytes = 0;
};

class Cloud {
 public:
  Cloud() = default;
  explicit Cloud(std::vector<ProviderConfig> providers);

  long now() const { return clock_; }
  std::vector<std::string> provider_ids() const;  // sorted
  const ProviderConfig& provider(const std::string& id) const;

  Usage usage(const std::string& provider_id) const;
  bool fits(const std::string& provider_id, const Usage& request) const;

  // All-or-nothing: either every server is admitted or nothing is created.
  std::string create_stack(const std::string& provider_id, const std::string& deployment,
                           const hot::HotDocument& doc,
                           const std::vector<std::string>& overlays = {});

  std::string deploy_graph(const std::string& provider_id, const std::string& deployment,
                           const std::vector<InstanceSpec>& specs);
  // Module-contract convenience: derives instance specs from the graph using
  // the provider's own catalogs (always the configure-everything path).
  std::string deploy_graph(const std::string& provider_id, const std::string& deployment,
                           const tosca::TopologyGraph& graph);

  void add_instances(const std::string& group_id, const std::vector<InstanceSpec>& specs);

  void register_image(const std::string& provider_id, const hot::ImageEntry& entry);

  std::vector<Event> tick(int n = 1);
  // Every event since the last drain, including creations and terminations.
  std::vector<Event> drain_events();

  void terminate(const std::string& instance_id);
  void attach_overlay(const std::string& instance_id, const std::string& overlay_id);
  // True when both live on the same provider or share an overlay network.
  bool reachable(const std::string& a, const std::string& b) const;

  const SimInstance* find_instance(const std::string& id) const;
  std::vector<const SimInstance*> instances_of_deployment(const std::string& deployment,
                                                          bool include_terminated = false) const;
  std::vector<const SimInstance*> instances_of_group(const std::string& group_id) const;
  bool group_ready(const std::string& group_id) const;  // all instances RUNNING

  std::string snapshot_json() const;
  static Cloud restore_json(const std::string& text);

 private:
  struct Group {
    std::string id;
    std::string provider;
    std::string deployment;
    BackendKind kind = BackendKind::heat_like;
    bool needs_config = false;
    bool master_started = false;
    int agent_remaining = 0;
    std::string master_id;
  };

  struct AddressCursor {
    std::int64_t next_public = 0;
    std::int64_t next_private = 0;
  };

  ProviderConfig& provider_mut(const std::string& id);
  std::string new_group_id(BackendKind kind);
  void emit(const std::string& provider, const std::string& instance,
            const std::string& old_state, InstanceState new_state);
  std::string alloc_public(const ProviderConfig& provider);
  std::string alloc_private(const ProviderConfig& provider);
  void admit_or_throw(const ProviderConfig& provider, const std::vector<InstanceSpec>& specs);
  SimInstance& create_instance(Group& group, const InstanceSpec& spec, bool make_master);
  void step_one_tick();

  std::map<std::string, ProviderConfig> providers_;
  std::map<std::string, SimInstance> instances_;
  std::map<std::string, Group> groups_;
  std::map<std::string, AddressCursor> cursors_;
  std::vector<Event> buffer_;
  long clock_ = 0;
  std::int64_t group_counter_ = 0;
};

}  // namespace stratus::sim
