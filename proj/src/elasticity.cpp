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

#include "stratus/elastic/manager.hpp"

#include <algorithm>
#include <cstdio>

#include "json.hpp"
#include "stratus/error.hpp"

namespace stratus::elastic {

namespace {

using nlohmann::json;

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

}  // namespace

std::string_view job_state_name(JobState state) {
  switch (state) {
    case JobState::PENDING:
      return "PENDING";
    case JobState::RUNNING:
      return "RUNNING";
    case JobState::DONE:
      return "DONE";
  }
  return "?";
}

ScalingDecision clues_tick(const ClusterView& view) {
  ScalingDecision decision;
  if (view.scaling_in_progress) {
    decision.reason = "scaling in progress";
    return decision;
  }
  if (view.pending_slots > 0) {
    const auto needed = ceil_div(view.pending_slots, std::max<std::int64_t>(1, view.slots_per_slave));
    if (view.current < view.max_instances) {
      decision.kind = DecisionKind::grow;
      decision.target = std::min(view.current + needed, view.max_instances);
      decision.reason = "pending_slots=" + std::to_string(view.pending_slots);
      return decision;
    }
    decision.reason = "at max_instances";
    return decision;
  }
  // shrink: workers that are up, empty, and idle long enough
  std::vector<const SlaveView*> eligible;
  for (const auto& slave : view.slaves) {
    if (slave.running && slave.used_slots == 0 && slave.idle_ticks >= view.idle_threshold) {
      eligible.push_back(&slave);
    }
  }
  const auto target =
      std::max(view.min_instances, view.current - static_cast<std::int64_t>(eligible.size()));
  const auto removals = view.current - target;
  if (removals <= 0) return decision;
  std::sort(eligible.begin(), eligible.end(), [](const SlaveView* a, const SlaveView* b) {
    if (a->idle_ticks != b->idle_ticks) return a->idle_ticks > b->idle_ticks;
    return a->id > b->id;  // newest instance id breaks ties
  });
  decision.kind = DecisionKind::shrink;
  decision.target = target;
  for (std::int64_t i = 0; i < removals; ++i) {
    decision.victims.push_back(eligible[static_cast<std::size_t>(i)]->id);
  }
  decision.reason = "idle_workers=" + std::to_string(eligible.size());
  return decision;
}

Manager::Manager(orch::Orchestrator& orchestrator) : orchestrator_(orchestrator) {}

const orch::ClusterBinding& Manager::binding_of(const std::string& deployment_id) const {
  const auto& dep = orchestrator_.deployment(deployment_id);
  if (!dep.plan.cluster) {
    throw Error(Errc::unknown_cluster, "deployment " + deployment_id + " has no elastic cluster",
                deployment_id);
  }
  return *dep.plan.cluster;
}

std::vector<const sim::SimInstance*> Manager::workers_of(
    const std::string& deployment_id, const orch::ClusterBinding& binding) const {
  std::vector<const sim::SimInstance*> workers;
  for (const auto* inst : orchestrator_.instances(deployment_id)) {
    if (inst->node == binding.worker_host) workers.push_back(inst);
  }
  std::sort(workers.begin(), workers.end(),
            [](const auto* a, const auto* b) { return a->id < b->id; });
  return workers;
}

std::int64_t Manager::used_slots(const ClusterState& state, const std::string& instance_id) const {
  std::int64_t used = 0;
  for (const auto& [id, job] : state.jobs) {
    if (job.state == JobState::RUNNING && job.instance == instance_id) used += job.slots;
  }
  return used;
}

std::string Manager::submit_job(const std::string& deployment_id, std::int64_t slots,
                                int duration) {
  const auto& dep = orchestrator_.deployment(deployment_id);
  if (dep.state == orch::DeploymentState::DELETED || dep.state == orch::DeploymentState::FAILED) {
    throw Error(Errc::invalid_state,
                "deployment " + deployment_id + " is " + std::string(state_name(dep.state)),
                deployment_id);
  }
  const auto& binding = binding_of(deployment_id);
  if (slots < 1) throw Error(Errc::out_of_bounds, "job slots must be positive");
  if (duration < 1) throw Error(Errc::out_of_bounds, "job duration must be positive");
  if (slots > binding.slots_per_slave) {
    throw Error(Errc::slots_exceed_capacity,
                "job needs " + std::to_string(slots) + " slot(s), workers provide " +
                    std::to_string(binding.slots_per_slave),
                deployment_id);
  }
  auto& state = clusters_[deployment_id];
  char buf[16];
  std::snprintf(buf, sizeof(buf), "j-%04lld", static_cast<long long>(++job_counter_));
  Job job;
  job.id = buf;
  job.deployment = deployment_id;
  job.slots = slots;
  job.duration = duration;
  job.submitted_tick = orchestrator_.cloud().now();

  // a worker with a free slot picks the job up immediately
  for (const auto* worker : workers_of(deployment_id, binding)) {
    if (worker->state != sim::InstanceState::RUNNING) continue;
    if (used_slots(state, worker->id) + slots > binding.slots_per_slave) continue;
    job.state = JobState::RUNNING;
    job.instance = worker->id;
    job.remaining = duration;
    job.started_tick = job.submitted_tick;
    state.idle[worker->id] = 0;
    break;
  }
  auto [it, _] = state.jobs.emplace(job.id, std::move(job));
  return it->first;
}

std::vector<Job> Manager::jobs(const std::string& deployment_id) const {
  binding_of(deployment_id);
  std::vector<Job> out;
  if (auto it = clusters_.find(deployment_id); it != clusters_.end()) {
    for (const auto& [id, job] : it->second.jobs) out.push_back(job);
  }
  return out;
}

ClusterStatus Manager::status(const std::string& deployment_id) const {
  const auto& binding = binding_of(deployment_id);
  ClusterStatus status;
  status.tick = orchestrator_.cloud().now();
  status.slaves = static_cast<std::int64_t>(workers_of(deployment_id, binding).size());
  if (auto it = clusters_.find(deployment_id); it != clusters_.end()) {
    for (const auto& [id, job] : it->second.jobs) {
      if (job.state == JobState::PENDING) ++status.pending;
      if (job.state == JobState::RUNNING) ++status.running;
    }
  }
  return status;
}

void Manager::process_tick() {
  const long now = orchestrator_.cloud().now();
  for (const auto& deployment_id : orchestrator_.deployment_ids()) {
    const auto& dep = orchestrator_.deployment(deployment_id);
    if (!dep.plan.cluster) continue;
    if (dep.state != orch::DeploymentState::RUNNING &&
        dep.state != orch::DeploymentState::SCALING) {
      continue;
    }
    const auto& binding = *dep.plan.cluster;
    auto& state = clusters_[deployment_id];
    const auto workers = workers_of(deployment_id, binding);

    // jobs whose worker disappeared go back to the queue
    for (auto& [id, job] : state.jobs) {
      if (job.state != JobState::RUNNING) continue;
      const auto* inst = orchestrator_.cloud().find_instance(job.instance);
      if (inst == nullptr || inst->state == sim::InstanceState::TERMINATED) {
        job.state = JobState::PENDING;
        job.instance.clear();
        job.remaining = 0;
      }
    }
    // progress running work
    for (auto& [id, job] : state.jobs) {
      if (job.state != JobState::RUNNING) continue;
      if (--job.remaining <= 0) {
        job.state = JobState::DONE;
        job.finished_tick = now;
      }
    }
    // schedule pending jobs in submission order onto the lowest free worker
    for (auto& [id, job] : state.jobs) {
      if (job.state != JobState::PENDING) continue;
      for (const auto* worker : workers) {
        if (worker->state != sim::InstanceState::RUNNING) continue;
        if (used_slots(state, worker->id) + job.slots > binding.slots_per_slave) continue;
        job.state = JobState::RUNNING;
        job.instance = worker->id;
        job.remaining = job.duration;
        job.started_tick = now;
        state.idle[worker->id] = 0;
        break;
      }
    }
    // idle bookkeeping
    std::map<std::string, long> idle;
    for (const auto* worker : workers) {
      long ticks = 0;
      if (worker->state == sim::InstanceState::RUNNING && used_slots(state, worker->id) == 0) {
        if (auto it = state.idle.find(worker->id); it != state.idle.end()) ticks = it->second;
        ++ticks;
      }
      idle[worker->id] = ticks;
    }
    state.idle = std::move(idle);

    if (dep.state == orch::DeploymentState::SCALING) continue;

    ClusterView view;
    view.current = static_cast<std::int64_t>(workers.size());
    view.min_instances = binding.min_instances;
    view.max_instances = binding.max_instances;
    view.slots_per_slave = binding.slots_per_slave;
    view.idle_threshold = binding.idle_threshold;
    for (const auto& [id, job] : state.jobs) {
      if (job.state == JobState::PENDING) view.pending_slots += job.slots;
    }
    for (const auto* worker : workers) {
      SlaveView slave;
      slave.id = worker->id;
      slave.running = worker->state == sim::InstanceState::RUNNING;
      slave.used_slots = used_slots(state, worker->id);
      slave.idle_ticks = state.idle[worker->id];
      view.slaves.push_back(std::move(slave));
    }
    const auto decision = clues_tick(view);
    if (decision.kind == DecisionKind::none) {
      state.last_error.clear();
      continue;
    }
    try {
      orchestrator_.scale(deployment_id, binding.worker_host, decision.target, decision.victims);
      state.last_error.clear();
    } catch (const Error& ex) {
      if (ex.code() != Errc::no_capable_provider) throw;
      state.last_error = ex.what();  // retried on a later tick
    }
  }
}

std::string Manager::snapshot_json() const {
  json doc;
  doc["job_counter"] = job_counter_;
  json clusters = json::object();
  for (const auto& [deployment_id, state] : clusters_) {
    json jobs = json::array();
    for (const auto& [id, job] : state.jobs) {
      jobs.push_back({{"id", job.id},
                      {"deployment", job.deployment},
                      {"slots", job.slots},
                      {"duration", job.duration},
                      {"remaining", job.remaining},
                      {"state", std::string(job_state_name(job.state))},
                      {"instance", job.instance},
                      {"submitted_tick", job.submitted_tick},
                      {"started_tick", job.started_tick},
                      {"finished_tick", job.finished_tick}});
    }
    clusters[deployment_id] = {{"jobs", std::move(jobs)},
                               {"idle", state.idle},
                               {"last_error", state.last_error}};
  }
  doc["clusters"] = std::move(clusters);
  return doc.dump();
}

void Manager::restore_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& ex) {
    throw Error(Errc::store_unavailable, std::string("corrupt job state: ") + ex.what());
  }
  clusters_.clear();
  job_counter_ = doc.at("job_counter").get<std::int64_t>();
  for (auto it = doc.at("clusters").begin(); it != doc.at("clusters").end(); ++it) {
    ClusterState state;
    state.last_error = it.value().at("last_error").get<std::string>();
    state.idle = it.value().at("idle").get<std::map<std::string, long>>();
    for (const auto& item : it.value().at("jobs")) {
      Job job;
      job.id = item.at("id").get<std::string>();
      job.deployment = item.at("deployment").get<std::string>();
      job.slots = item.at("slots").get<std::int64_t>();
      job.duration = item.at("duration").get<int>();
      job.remaining = item.at("remaining").get<int>();
      const auto name = item.at("state").get<std::string>();
      job.state = name == "PENDING" ? JobState::PENDING
                  : name == "RUNNING" ? JobState::RUNNING
                                      : JobState::DONE;
      job.instance = item.at("instance").get<std::string>();
      job.submitted_tick = item.at("submitted_tick").get<long>();
      job.started_tick = item.at("started_tick").get<long>();
      job.finished_tick = item.at("finished_tick").get<long>();
      state.jobs.emplace(job.id, std::move(job));
    }
    clusters_.emplace(it.key(), std::move(state));
  }
}

}  // namespace stratus::elastic
