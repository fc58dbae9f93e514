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

#include "stratus/orch/orchestrator.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>

#include "stratus/error.hpp"
#include "stratus/hot/translate.hpp"

namespace stratus::orch {

std::string_view state_name(DeploymentState state) {
  switch (state) {
    case DeploymentState::SUBMITTED:
      return "SUBMITTED";
    case DeploymentState::PLANNING:
      return "PLANNING";
    case DeploymentState::PROVISIONING:
      return "PROVISIONING";
    case DeploymentState::CONFIGURING:
      return "CONFIGURING";
    case DeploymentState::RUNNING:
      return "RUNNING";
    case DeploymentState::SCALING:
      return "SCALING";
    case DeploymentState::FAILED:
      return "FAILED";
    case DeploymentState::DELETED:
      return "DELETED";
  }
  return "?";
}

std::optional<DeploymentState> state_from(std::string_view name) {
  for (auto state :
       {DeploymentState::SUBMITTED, DeploymentState::PLANNING, DeploymentState::PROVISIONING,
        DeploymentState::CONFIGURING, DeploymentState::RUNNING, DeploymentState::SCALING,
        DeploymentState::FAILED, DeploymentState::DELETED}) {
    if (state_name(state) == name) return state;
  }
  return std::nullopt;
}

bool transition_allowed(DeploymentState from, DeploymentState to) {
  if (to == DeploymentState::FAILED) {
    return from != DeploymentState::FAILED && from != DeploymentState::DELETED;
  }
  switch (from) {
    case DeploymentState::SUBMITTED:
      return to == DeploymentState::PLANNING;
    case DeploymentState::PLANNING:
      return to == DeploymentState::PROVISIONING;
    case DeploymentState::PROVISIONING:
      return to == DeploymentState::CONFIGURING;
    case DeploymentState::CONFIGURING:
      return to == DeploymentState::RUNNING;
    case DeploymentState::RUNNING:
      return to == DeploymentState::SCALING || to == DeploymentState::DELETED;
    case DeploymentState::SCALING:
      return to == DeploymentState::RUNNING;
    case DeploymentState::FAILED:
      return to == DeploymentState::DELETED;
    default:
      return false;
  }
}

namespace {

struct NodeNeed {
  std::string flavor;
  std::int64_t vcpus = 0;
  std::uint64_t mem_bytes = 0;
  std::string image;
};

// Can this provider satisfy one node of the topology? Returns the flavor and
// image decision its catalogs produce, or nullopt when they cannot.
std::optional<NodeNeed> node_need(const tosca::ResolvedNode& node,
                                  const sim::ProviderConfig& cfg) {
  NodeNeed need;
  try {
    const auto host = hot::host_requirements(node);
    need.flavor = hot::map_flavor(host, cfg.flavors);
    auto os = hot::os_requirements(node);
    if (os.image && cfg.images.contains(*os.image)) {
      need.image = *os.image;
    } else {
      os.image.reset();
      need.image = hot::map_image(os, cfg.images);
    }
  } catch (const Error&) {
    return std::nullopt;
  }
  const auto* entry = cfg.flavors.find(need.flavor);
  need.vcpus = entry->vcpus;
  need.mem_bytes = entry->mem.bytes();
  return need;
}

}  // namespace

std::string select_provider(const tosca::TopologyGraph& graph,
                            const std::map<std::string, std::int64_t>& counts,
                            const sim::Cloud& cloud,
                            const std::optional<std::string>& needed_image) {
  struct Candidate {
    bool lacks_image;
    int rank;
    std::string id;
  };
  std::vector<Candidate> candidates;
  for (const auto& id : cloud.provider_ids()) {
    const auto& cfg = cloud.provider(id);
    sim::Usage request;
    bool capable = true;
    for (const auto& [node, count] : counts) {
      const auto need = node_need(graph.nodes.at(node), cfg);
      if (!need) {
        capable = false;
        break;
      }
      request.vms += count;
      request.vcpus += need->vcpus * count;
      request.mem_bytes += need->mem_bytes * static_cast<std::uint64_t>(count);
    }
    if (!capable || !cloud.fits(id, request)) continue;
    const bool has_image = needed_image && cfg.images.contains(*needed_image);
    candidates.push_back({!has_image, cfg.sla_rank, id});
  }
  if (candidates.empty()) {
    throw Error(Errc::no_capable_provider, "no provider can host the request");
  }
  auto best = std::min_element(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    return std::tie(a.lacks_image, a.rank, a.id) < std::tie(b.lacks_image, b.rank, b.id);
  });
  return best->id;
}

std::string select_provider_for_instance(const std::string& flavor, const std::string& image,
                                         const sim::Cloud& cloud,
                                         const std::map<std::string, sim::Usage>& reserved) {
  struct Candidate {
    int rank;
    std::string id;
  };
  std::vector<Candidate> order;
  for (const auto& id : cloud.provider_ids()) {
    order.push_back({cloud.provider(id).sla_rank, id});
  }
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    return std::tie(a.rank, a.id) < std::tie(b.rank, b.id);
  });
  for (const auto& candidate : order) {
    const auto& cfg = cloud.provider(candidate.id);
    const auto* entry = cfg.flavors.find(flavor);
    if (entry == nullptr || !cfg.images.contains(image)) continue;
    sim::Usage request{1, entry->vcpus, entry->mem.bytes()};
    if (auto it = reserved.find(candidate.id); it != reserved.end()) {
      request.vms += it->second.vms;
      request.vcpus += it->second.vcpus;
      request.mem_bytes += it->second.mem_bytes;
    }
    if (cloud.fits(candidate.id, request)) return candidate.id;
  }
  throw Error(Errc::no_capable_provider,
              "no provider offers flavor " + flavor + " and image " + image +
                  " with free capacity");
}

Orchestrator::Orchestrator(sim::Cloud& cloud, tosca::ImportResolver resolver,
                           std::string auth_token)
    : cloud_(cloud), resolver_(std::move(resolver)), auth_token_(std::move(auth_token)) {}

void Orchestrator::check_token(const std::string& token) const {
  if (!auth_token_.empty() && token != auth_token_) {
    throw Error(Errc::auth_failed, "authentication token rejected");
  }
}

Deployment& Orchestrator::require(const std::string& id) {
  auto it = deployments_.find(id);
  if (it == deployments_.end()) {
    throw Error(Errc::unknown_deployment, "unknown deployment " + id, id);
  }
  return it->second;
}

const Deployment& Orchestrator::require(const std::string& id) const {
  auto it = deployments_.find(id);
  if (it == deployments_.end()) {
    throw Error(Errc::unknown_deployment, "unknown deployment " + id, id);
  }
  return it->second;
}

void Orchestrator::transition(Deployment& dep, DeploymentState to, const std::string& note) {
  if (!transition_allowed(dep.state, to)) {
    throw Error(Errc::invalid_state, "deployment " + dep.id + " cannot move " +
                                         std::string(state_name(dep.state)) + " -> " +
                                         std::string(state_name(to)),
                dep.id);
  }
  TransitionRecord record;
  record.tick = cloud_.now();
  record.seq = dep.next_seq++;
  record.from = state_name(dep.state);
  record.to = state_name(to);
  record.note = note;
  dep.log.push_back(std::move(record));
  dep.state = to;
}

void Orchestrator::fail(Deployment& dep, const std::string& reason) {
  if (dep.state == DeploymentState::FAILED || dep.state == DeploymentState::DELETED) return;
  dep.failure_reason = reason;
  transition(dep, DeploymentState::FAILED, reason);
}

std::string Orchestrator::submit(const std::string& template_text, const ValueMap& inputs,
                                 const std::string& token) {
  check_token(token);
  auto tmpl = tosca::parse_service_template(template_text);
  auto registry = tosca::resolve_imports(tmpl, resolver_);
  auto graph = tosca::build_graph(tmpl, registry);
  auto report = tosca::validate(graph);
  if (!report.ok()) {
    std::string message =
        "validation failed (" + std::to_string(report.errors.size()) + " error(s))";
    for (const auto& finding : report.errors) {
      message += "; " + finding.node + ": " + finding.message;
    }
    throw Error(Errc::validation_failed, message);
  }
  for (const auto& [key, value] : inputs) {
    if (!graph.inputs.contains(key)) {
      throw Error(Errc::unknown_reference, "undeclared input " + key, key);
    }
  }
  for (const auto& [name, def] : graph.inputs) {
    if (!inputs.contains(name) && !def.default_value.has_value()) {
      throw Error(Errc::validation_failed, "input " + name + " requires a value", name);
    }
  }

  char buf[16];
  std::snprintf(buf, sizeof(buf), "d-%04lld", static_cast<long long>(++counter_));
  Deployment dep;
  dep.id = buf;
  dep.template_text = template_text;
  dep.inputs = inputs;
  dep.overlay = "net-" + dep.id;
  TransitionRecord record;
  record.tick = cloud_.now();
  record.seq = dep.next_seq++;
  record.from = "-";
  record.to = state_name(DeploymentState::SUBMITTED);
  dep.log.push_back(std::move(record));
  graphs_.emplace(dep.id, std::move(graph));
  auto [it, _] = deployments_.emplace(dep.id, std::move(dep));
  return it->first;
}

const Deployment& Orchestrator::deployment(const std::string& id) const { return require(id); }

std::vector<std::string> Orchestrator::deployment_ids() const {
  std::vector<std::string> ids;
  ids.reserve(deployments_.size());
  for (const auto& [id, dep] : deployments_) ids.push_back(id);
  return ids;
}

const tosca::TopologyGraph& Orchestrator::graph_of(const std::string& id) const {
  auto it = graphs_.find(id);
  if (it != graphs_.end()) return it->second;
  const auto& dep = require(id);
  auto tmpl = tosca::parse_service_template(dep.template_text);
  auto registry = tosca::resolve_imports(tmpl, resolver_);
  auto [inserted, _] = graphs_.emplace(id, tosca::build_graph(tmpl, registry));
  return inserted->second;
}

std::vector<const sim::SimInstance*> Orchestrator::instances(const std::string& id) const {
  require(id);
  return cloud_.instances_of_deployment(id);
}

std::int64_t Orchestrator::live_count(const std::string& id, const std::string& compute_node) const {
  std::int64_t count = 0;
  for (const auto* inst : cloud_.instances_of_deployment(id)) {
    if (inst->node == compute_node) ++count;
  }
  return count;
}

void Orchestrator::plan_and_execute(Deployment& dep) {
  const auto& graph = graph_of(dep.id);

  std::map<std::string, std::int64_t> counts;
  std::optional<std::string> needed_image;
  for (const auto& [name, node] : graph.nodes) {
    if (!node.is_compute()) continue;
    const auto bounds = tosca::scaling_bounds(graph, name);
    counts[name] = bounds.elastic ? bounds.min_instances : bounds.count;
    if (!needed_image) {
      if (auto os = hot::os_requirements(node); os.image) needed_image = os.image;
    }
  }

  DeploymentPlan plan;
  plan.provider = select_provider(graph, counts, cloud_, needed_image);
  const auto& cfg = cloud_.provider(plan.provider);

  for (const auto& [name, count] : counts) {
    const auto& node = graph.nodes.at(name);
    NodeAssignment assignment;
    assignment.node = name;
    assignment.flavor = hot::map_flavor(hot::host_requirements(node), cfg.flavors);
    auto os = hot::os_requirements(node);
    if (os.image && cfg.images.contains(*os.image)) {
      assignment.image = *os.image;
      assignment.preconfigured = true;
    } else {
      os.image.reset();
      assignment.image = hot::map_image(os, cfg.images);
      assignment.preconfigured = false;
      assignment.tasks = tosca::config_tasks(graph, name);
    }
    if (const auto* net = node.capability_property("endpoint", "network_name")) {
      assignment.wants_public = net->is_string() && net->as_string() == "PUBLIC";
    }
    assignment.initial_count = count;
    plan.assignments.emplace(name, std::move(assignment));
  }

  // Elastic-cluster binding, when the topology declares one.
  for (const auto& [name, node] : graph.nodes) {
    if (!node.derives_from("tosca.nodes.indigo.ElasticCluster")) continue;
    ClusterBinding binding;
    binding.cluster_node = name;
    for (const auto& req : node.requirements) {
      if (req.name == "lrms") binding.front_end = req.target;
      if (req.name == "wn") binding.worker = req.target;
    }
    if (binding.worker.empty()) continue;
    auto host = graph.compute_host(binding.worker);
    if (!host) continue;
    binding.worker_host = *host;
    const auto bounds = tosca::scaling_bounds(graph, *host);
    binding.min_instances = bounds.min_instances;
    binding.max_instances = bounds.max_instances;
    if (auto it = node.properties.find("slots_per_slave");
        it != node.properties.end() && it->second.is_int()) {
      binding.slots_per_slave = it->second.as_int();
    }
    if (auto it = node.properties.find("idle_threshold");
        it != node.properties.end() && it->second.is_int()) {
      binding.idle_threshold = static_cast<int>(it->second.as_int());
    }
    plan.cluster = std::move(binding);
    break;
  }

  dep.plan = std::move(plan);
  for (const auto& [name, assignment] : dep.plan.assignments) {
    dep.next_index[name] = assignment.initial_count;
  }

  if (cfg.backend == sim::BackendKind::heat_like) {
    hot::TranslateOptions options;
    options.inputs = dep.inputs;
    for (const auto& [name, assignment] : dep.plan.assignments) {
      hot::NodeOverride over;
      over.image = assignment.image;
      over.flavor = assignment.flavor;
      over.drop_tasks = assignment.preconfigured;
      std::vector<std::string> names;
      for (std::int64_t i = 0; i < assignment.initial_count; ++i) {
        char suffix[16];
        std::snprintf(suffix, sizeof(suffix), "-%03lld", static_cast<long long>(i));
        names.push_back(name + suffix);
      }
      over.instance_names = std::move(names);
      options.overrides.emplace(name, std::move(over));
    }
    auto doc = hot::translate(graph, cfg.flavors, cfg.images, options);
    dep.groups[dep.plan.provider] = cloud_.create_stack(dep.plan.provider, dep.id, doc,
                                                        {dep.overlay});
  } else {
    std::vector<sim::InstanceSpec> specs;
    for (const auto& [name, assignment] : dep.plan.assignments) {
      sim::InstanceSpec spec;
      spec.node = name;
      spec.flavor = assignment.flavor;
      spec.image = assignment.image;
      spec.tasks = static_cast<int>(assignment.tasks.size());
      spec.wants_public = assignment.wants_public;
      spec.overlays = {dep.overlay};
      for (std::int64_t i = 0; i < assignment.initial_count; ++i) {
        spec.index = i;
        specs.push_back(spec);
      }
    }
    dep.groups[dep.plan.provider] = cloud_.deploy_graph(dep.plan.provider, dep.id, specs);
  }
}

void Orchestrator::process_tick() {
  for (auto& [id, dep] : deployments_) {
    bool again = true;
    while (again) {
      again = false;
      switch (dep.state) {
        case DeploymentState::SUBMITTED:
          transition(dep, DeploymentState::PLANNING);
          again = true;
          break;
        case DeploymentState::PLANNING:
          try {
            plan_and_execute(dep);
            transition(dep, DeploymentState::PROVISIONING, "provider=" + dep.plan.provider);
            again = true;
          } catch (const Error& ex) {
            fail(dep, ex.what());
          }
          break;
        case DeploymentState::PROVISIONING: {
          bool booting = false;
          for (const auto* inst : cloud_.instances_of_deployment(id)) {
            booting |= inst->state == sim::InstanceState::BOOTING;
          }
          if (!booting) {
            transition(dep, DeploymentState::CONFIGURING);
            again = true;
          }
          break;
        }
        case DeploymentState::CONFIGURING:
        case DeploymentState::SCALING: {
          bool all_running = true;
          for (const auto* inst : cloud_.instances_of_deployment(id)) {
            all_running &= inst->state == sim::InstanceState::RUNNING;
          }
          if (all_running) transition(dep, DeploymentState::RUNNING);
          break;
        }
        default:
          break;
      }
    }
  }
}

std::string Orchestrator::resolve_compute(const Deployment& dep, const std::string& node) const {
  if (dep.plan.assignments.contains(node)) return node;
  const auto& graph = graph_of(dep.id);
  if (graph.nodes.contains(node)) {
    if (auto host = graph.compute_host(node); host && dep.plan.assignments.contains(*host)) {
      return *host;
    }
  }
  throw Error(Errc::unknown_reference, "no scalable node " + node + " in deployment " + dep.id,
              node);
}

void Orchestrator::scale(const std::string& id, const std::string& node, std::int64_t target,
                         const std::vector<std::string>& victims, const std::string& token) {
  check_token(token);
  auto& dep = require(id);
  if (dep.state != DeploymentState::RUNNING) {
    throw Error(Errc::invalid_state,
                "deployment " + id + " is " + std::string(state_name(dep.state)) +
                    ", scaling requires RUNNING",
                id);
  }
  const auto compute = resolve_compute(dep, node);
  const auto& graph = graph_of(id);
  const auto bounds = tosca::scaling_bounds(graph, compute);
  if (target < bounds.min_instances || target > bounds.max_instances) {
    throw Error(Errc::out_of_bounds,
                "target " + std::to_string(target) + " outside [" +
                    std::to_string(bounds.min_instances) + ", " +
                    std::to_string(bounds.max_instances) + "] for " + compute,
                compute);
  }
  const auto current = live_count(id, compute);
  if (target == current) return;

  const auto& assignment = dep.plan.assignments.at(compute);
  const std::string note =
      "node=" + compute + " " + std::to_string(current) + "->" + std::to_string(target);

  if (target > current) {
    // plan every placement before creating anything
    std::map<std::string, sim::Usage> reserved;
    std::vector<std::pair<std::string, std::int64_t>> placements;
    std::int64_t next = dep.next_index.at(compute);
    for (std::int64_t i = 0; i < target - current; ++i) {
      const auto provider =
          select_provider_for_instance(assignment.flavor, assignment.image, cloud_, reserved);
      const auto* entry = cloud_.provider(provider).flavors.find(assignment.flavor);
      auto& usage = reserved[provider];
      usage.vms += 1;
      usage.vcpus += entry->vcpus;
      usage.mem_bytes += entry->mem.bytes();
      placements.emplace_back(provider, next++);
    }
    std::map<std::string, std::vector<sim::InstanceSpec>> batches;
    for (const auto& [provider, index] : placements) {
      sim::InstanceSpec spec;
      spec.node = compute;
      spec.index = index;
      spec.flavor = assignment.flavor;
      spec.image = assignment.image;
      spec.tasks = static_cast<int>(assignment.tasks.size());
      spec.wants_public = assignment.wants_public;
      spec.overlays = {dep.overlay};
      batches[provider].push_back(std::move(spec));
    }
    for (const auto& [provider, specs] : batches) {
      if (auto it = dep.groups.find(provider); it != dep.groups.end()) {
        cloud_.add_instances(it->second, specs);
        continue;
      }
      const auto& cfg = cloud_.provider(provider);
      std::string group;
      if (cfg.backend == sim::BackendKind::heat_like) {
        hot::TranslateOptions options;
        options.inputs = dep.inputs;
        for (const auto& [name, other] : dep.plan.assignments) {
          hot::NodeOverride over;
          over.image = other.image;
          over.flavor = other.flavor;
          over.drop_tasks = other.preconfigured;
          over.instance_names = std::vector<std::string>{};
          options.overrides.emplace(name, std::move(over));
        }
        auto& mine = options.overrides.at(compute);
        std::vector<std::string> names;
        for (const auto& spec : specs) {
          char suffix[16];
          std::snprintf(suffix, sizeof(suffix), "-%03lld", static_cast<long long>(spec.index));
          names.push_back(compute + suffix);
        }
        mine.instance_names = std::move(names);
        auto doc = hot::translate(graph, cfg.flavors, cfg.images, options);
        group = cloud_.create_stack(provider, id, doc, {dep.overlay});
      } else {
        group = cloud_.deploy_graph(provider, id, specs);
      }
      dep.groups.emplace(provider, std::move(group));
    }
    dep.next_index[compute] = next;
  } else {
    const auto removals = current - target;
    std::vector<std::string> chosen;
    if (victims.empty()) {
      // default policy: newest instances go first
      std::vector<const sim::SimInstance*> live;
      for (const auto* inst : cloud_.instances_of_deployment(id)) {
        if (inst->node == compute) live.push_back(inst);
      }
      std::sort(live.begin(), live.end(),
                [](const auto* a, const auto* b) { return a->index > b->index; });
      for (std::int64_t i = 0; i < removals; ++i) chosen.push_back(live[static_cast<std::size_t>(i)]->id);
    } else {
      if (static_cast<std::int64_t>(victims.size()) != removals) {
        throw Error(Errc::invalid_state,
                    "expected " + std::to_string(removals) + " victim(s), got " +
                        std::to_string(victims.size()),
                    id);
      }
      for (const auto& victim : victims) {
        const auto full = victim.find('/') == std::string::npos ? id + "/" + victim : victim;
        const auto* inst = cloud_.find_instance(full);
        if (inst == nullptr || inst->deployment != id || inst->node != compute ||
            inst->state == sim::InstanceState::TERMINATED) {
          throw Error(Errc::unknown_instance, "victim " + full + " is not a live " + compute +
                                                  " instance of " + id,
                      full);
        }
        chosen.push_back(full);
      }
    }
    for (const auto& victim : chosen) cloud_.terminate(victim);
  }
  transition(dep, DeploymentState::SCALING, note);
}

ValueMap Orchestrator::outputs(const std::string& id) const {
  const auto& dep = require(id);
  if (dep.state != DeploymentState::RUNNING) {
    throw Error(Errc::attribute_unavailable,
                "deployment " + id + " is " + std::string(state_name(dep.state)) +
                    ", outputs require RUNNING",
                id);
  }
  const auto& graph = graph_of(id);
  tosca::AttributeStore runtime;
  for (const auto& [name, assignment] : dep.plan.assignments) {
    std::vector<const sim::SimInstance*> live;
    for (const auto* inst : cloud_.instances_of_deployment(id)) {
      if (inst->node == name) live.push_back(inst);
    }
    std::sort(live.begin(), live.end(),
              [](const auto* a, const auto* b) { return a->index < b->index; });
    ValueList pubs;
    ValueList privs;
    for (const auto* inst : live) {
      if (inst->public_address) pubs.emplace_back(*inst->public_address);
      privs.emplace_back(inst->private_address);
    }
    runtime.set(name, "public_address", Value(std::move(pubs)));
    runtime.set(name, "private_address", Value(std::move(privs)));
  }
  tosca::GraphSource source(graph);
  tosca::EvalContext ctx;
  ctx.nodes = &source;
  ctx.input_definitions = &graph.inputs;
  ctx.inputs = &dep.inputs;
  ctx.runtime = &runtime;
  ValueMap result;
  for (const auto& [name, def] : graph.outputs) {
    result.emplace(name, tosca::evaluate_value(def.value, ctx));
  }
  return result;
}

void Orchestrator::remove(const std::string& id, const std::string& token) {
  check_token(token);
  auto& dep = require(id);
  if (dep.state == DeploymentState::DELETED) {
    throw Error(Errc::unknown_deployment, "deployment " + id + " already deleted", id);
  }
  if (dep.state != DeploymentState::RUNNING && dep.state != DeploymentState::FAILED) {
    throw Error(Errc::invalid_state,
                "deployment " + id + " is " + std::string(state_name(dep.state)) +
                    ", delete requires RUNNING or FAILED",
                id);
  }
  for (const auto* inst : cloud_.instances_of_deployment(id)) cloud_.terminate(inst->id);
  transition(dep, DeploymentState::DELETED);
}

void Orchestrator::adopt(Deployment record) {
  const auto& id = record.id;
  if (id.size() > 2 && id.rfind("d-", 0) == 0) {
    const auto numeric = std::strtoll(id.c_str() + 2, nullptr, 10);
    counter_ = std::max(counter_, static_cast<std::int64_t>(numeric));
  }
  deployments_[id] = std::move(record);
}

}  // namespace stratus::orch
