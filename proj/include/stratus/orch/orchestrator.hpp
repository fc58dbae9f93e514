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
// Deployment lifecycle on top of the simulated providers: validate, pick a
// provider, translate or fold the topology for the provider's backend style,
// then drive the state machine from the logical clock. Scale-out re-selects a
// provider per added instance and stitches cross-provider instances together
// with a deployment-scoped overlay network.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stratus/sim/cloud.hpp"
#include "stratus/tosca/graph.hpp"
#include "stratus/tosca/parser.hpp"

namespace stratus::orch {

enum class DeploymentState {
  SUBMITTED,
  PLANNING,
  PROVISIONING,
  CONFIGURING,
  RUNNING,
  SCALING,
  FAILED,
  DELETED,
};

std::string_view state_name(DeploymentState state);
std::optional<DeploymentState> state_from(std::string_view name);
bool transition_allowed(DeploymentState from, DeploymentState to);

struct TransitionRecord {
  long tick = 0;
  long seq = 0;  // strictly increasing per deployment
  std::string from;
  std::string to;
  std::string note;

  bool operator==(const TransitionRecord&) const = default;
};

/// Planning outcome for one compute node of the topology.
struct NodeAssignment {
  std::string node;
  std::string flavor;
  std::string image;
  bool preconfigured = false;  // image already carries the software
  std::vector<tosca::ConfigTask> tasks;
  bool wants_public = false;
  std::int64_t initial_count = 1;
};

struct ClusterBinding {
  std::string cluster_node;
  std::string front_end;
  std::string worker;
  std::string worker_host;  // compute node that grows and shrinks
  std::int64_t slots_per_slave = 1;
  int idle_threshold = 5;
  std::int64_t min_instances = 0;
  std::int64_t max_instances = 1;
};

struct DeploymentPlan {
  std::string provider;
  std::map<std::string, NodeAssignment> assignments;  // keyed by compute node
  std::optional<ClusterBinding> cluster;
};

struct Deployment {
  std::string id;
  DeploymentState state = DeploymentState::SUBMITTED;
  std::string template_text;
  ValueMap inputs;
  std::string overlay;
  DeploymentPlan plan;
  std::map<std::string, std::int64_t> next_index;  // per compute node
  std::map<std::string, std::string> groups;       // provider id -> group id
  std::vector<TransitionRecord> log;
  std::string failure_reason;
  long next_seq = 1;
};

/// Provider choice for a whole topology: keep providers whose catalogs can
/// satisfy every node and whose free quota fits the entire initial request,
/// then prefer (1) catalogs already holding the requested image, (2) lower
/// sla_rank, (3) lexicographically smaller id.
std::string select_provider(const tosca::TopologyGraph& graph,
                            const std::map<std::string, std::int64_t>& counts,
                            const sim::Cloud& cloud,
                            const std::optional<std::string>& needed_image);

/// Per-instance re-selection used during scale-out. The original flavor and
/// image names are kept; candidates must offer both, plus quota headroom on
/// top of `reserved`. Preference order is sla_rank, then id.
std::string select_provider_for_instance(const std::string& flavor, const std::string& image,
                                         const sim::Cloud& cloud,
                                         const std::map<std::string, sim::Usage>& reserved);

class Orchestrator {
 public:
  Orchestrator(sim::Cloud& cloud, tosca::ImportResolver resolver, std::string auth_token = "");

  sim::Cloud& cloud() { return cloud_; }

  std::string submit(const std::string& template_text, const ValueMap& inputs,
                     const std::string& token = "");
  const Deployment& deployment(const std::string& id) const;
  std::vector<std::string> deployment_ids() const;
  ValueMap outputs(const std::string& id) const;
  void scale(const std::string& id, const std::string& node, std::int64_t target,
             const std::vector<std::string>& victims = {}, const std::string& token = "");
  void remove(const std::string& id, const std::string& token = "");

  /// One pump pass: advances every deployment's state machine as far as the
  /// current simulator state allows. Run once per logical tick, after the
  /// simulator itself has ticked.
  void process_tick();

  const tosca::TopologyGraph& graph_of(const std::string& id) const;
  std::vector<const sim::SimInstance*> instances(const std::string& id) const;
  std::int64_t live_count(const std::string& id, const std::string& compute_node) const;

  /// Re-attach a deployment loaded from the state store.
  void adopt(Deployment record);

 private:
  Deployment& require(const std::string& id);
  const Deployment& require(const std::string& id) const;
  void check_token(const std::string& token) const;
  void transition(Deployment& dep, DeploymentState to, const std::string& note = "");
  void fail(Deployment& dep, const std::string& reason);
  void plan_and_execute(Deployment& dep);
  std::string resolve_compute(const Deployment& dep, const std::string& node) const;

  sim::Cloud& cloud_;
  tosca::ImportResolver resolver_;
  std::string auth_token_;
  std::map<std::string, Deployment> deployments_;
  mutable std::map<std::string, tosca::TopologyGraph> graphs_;
  std::int64_t counter_ = 0;
};

// JSON (de)serialization used by the state store and the persistence layer.
std::string deployment_to_json(const Deployment& dep);
Deployment deployment_from_json(const std::string& text);

}  // namespace stratus::orch
