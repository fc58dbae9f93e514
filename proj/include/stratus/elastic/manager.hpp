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
// Workload-driven elasticity for deployments that declare an elastic cluster:
// a toy batch queue per cluster plus the power-management decision loop that
// grows the worker group for pending jobs and shrinks it again once workers
// sit idle past a threshold.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stratus/orch/orchestrator.hpp"

namespace stratus::elastic {

enum class JobState { PENDING, RUNNING, DONE };

std::string_view job_state_name(JobState state);

struct Job {
  std::string id;  // "j-NNNN"
  std::string deployment;
  std::int64_t slots = 1;
  int duration = 1;   // ticks of work once started
  int remaining = 0;  // ticks left while RUNNING
  JobState state = JobState::PENDING;
  std::string instance;  // assigned worker instance, empty while pending
  long submitted_tick = 0;
  long started_tick = 0;
  long finished_tick = 0;
};

enum class DecisionKind { none, grow, shrink };

struct ScalingDecision {
  DecisionKind kind = DecisionKind::none;
  std::int64_t target = 0;
  std::vector<std::string> victims;  // shrink only: longest idle first
  std::string reason;
};

/// Everything the decision function looks at, divorced from live objects so
/// the policy is a pure function of its inputs.
struct SlaveView {
  std::string id;
  bool running = false;  // instance state is RUNNING
  std::int64_t used_slots = 0;
  long idle_ticks = 0;
};

struct ClusterView {
  std::int64_t current = 0;  // live worker instances, any state
  std::int64_t min_instances = 0;
  std::int64_t max_instances = 0;
  std::int64_t slots_per_slave = 1;
  int idle_threshold = 5;
  std::int64_t pending_slots = 0;
  bool scaling_in_progress = false;
  std::vector<SlaveView> slaves;  // sorted by instance id
};

/// One decision per tick: grow to cover pending slots (capped at
/// max_instances, with reason "at max_instances" when already there), else
/// shrink by releasing workers idle at least idle_threshold ticks, never below
/// min_instances or below the busy count. No decision while a previous scale
/// is still in flight.
ScalingDecision clues_tick(const ClusterView& view);

struct ClusterStatus {
  long tick = 0;
  std::int64_t slaves = 0;
  std::int64_t pending = 0;
  std::int64_t running = 0;
};

class Manager {
 public:
  explicit Manager(orch::Orchestrator& orchestrator);

  std::string submit_job(const std::string& deployment_id, std::int64_t slots, int duration);
  std::vector<Job> jobs(const std::string& deployment_id) const;
  ClusterStatus status(const std::string& deployment_id) const;

  /// Per tick and per cluster: progress running jobs, schedule pending ones
  /// onto free slots, bump idle counters, then take and apply one scaling
  /// decision. Run after the orchestrator's own tick processing.
  void process_tick();

  std::string snapshot_json() const;
  void restore_json(const std::string& text);

 private:
  struct ClusterState {
    std::map<std::string, Job> jobs;
    std::map<std::string, long> idle;  // instance id -> consecutive idle ticks
    std::string last_error;            // absorbed scale failure, retried next tick
  };

  const orch::ClusterBinding& binding_of(const std::string& deployment_id) const;
  std::vector<const sim::SimInstance*> workers_of(const std::string& deployment_id,
                                                  const orch::ClusterBinding& binding) const;
  std::int64_t used_slots(const ClusterState& state, const std::string& instance_id) const;

  orch::Orchestrator& orchestrator_;
  std::map<std::string, ClusterState> clusters_;
  std::int64_t job_counter_ = 0;
};

}  // namespace stratus::elastic
