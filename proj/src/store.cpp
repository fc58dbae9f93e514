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

#include "stratus/orch/store.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "stratus/error.hpp"
#include "stratus/orch/orchestrator.hpp"

namespace stratus::orch {

namespace {

using nlohmann::json;

json value_to_json(const Value& value) {
  if (value.is_null()) return nullptr;
  if (value.is_bool()) return value.as_bool();
  if (value.is_int()) return value.as_int();
  if (value.is_float()) return value.as_float();
  if (value.is_string()) return value.as_string();
  if (value.is_size()) return json{{"$size", value.as_size().str()}};
  if (value.is_function()) {
    const auto& fn = value.as_function();
    return json{{"$fn", std::string(function_kind_name(fn.kind))}, {"$args", fn.args}};
  }
  if (value.is_list()) {
    json list = json::array();
    for (const auto& item : value.as_list()) list.push_back(value_to_json(item));
    return list;
  }
  json object = json::object();
  for (const auto& [key, item] : value.as_map()) object[key] = value_to_json(item);
  return object;
}

Value value_from_json(const json& node) {
  switch (node.type()) {
    case json::value_t::null:
      return Value();
    case json::value_t::boolean:
      return Value(node.get<bool>());
    case json::value_t::number_integer:
    case json::value_t::number_unsigned:
      return Value(node.get<std::int64_t>());
    case json::value_t::number_float:
      return Value(node.get<double>());
    case json::value_t::string:
      return Value(node.get<std::string>());
    case json::value_t::array: {
      ValueList list;
      for (const auto& item : node) list.push_back(value_from_json(item));
      return Value(std::move(list));
    }
    case json::value_t::object: {
      if (node.size() == 1 && node.contains("$size")) {
        auto parsed = ScalarSize::parse(node.at("$size").get<std::string>());
        if (!parsed) throw Error(Errc::store_unavailable, "corrupt size in store record");
        return Value(*parsed);
      }
      if (node.size() == 2 && node.contains("$fn") && node.contains("$args")) {
        auto kind = function_kind_from(node.at("$fn").get<std::string>());
        if (!kind) throw Error(Errc::store_unavailable, "corrupt function in store record");
        FunctionExpr fn;
        fn.kind = *kind;
        fn.args = node.at("$args").get<std::vector<std::string>>();
        return Value(std::move(fn));
      }
      ValueMap map;
      for (auto it = node.begin(); it != node.end(); ++it) {
        map.emplace(it.key(), value_from_json(it.value()));
      }
      return Value(std::move(map));
    }
    default:
      return Value();
  }
}

json value_to_plain_json(const Value& value) {
  if (value.is_size()) return value.as_size().str();
  if (value.is_function()) {
    const auto& fn = value.as_function();
    return json{{std::string(function_kind_name(fn.kind)), fn.args}};
  }
  if (value.is_list()) {
    json list = json::array();
    for (const auto& item : value.as_list()) list.push_back(value_to_plain_json(item));
    return list;
  }
  if (value.is_map()) {
    json object = json::object();
    for (const auto& [key, item] : value.as_map()) object[key] = value_to_plain_json(item);
    return object;
  }
  return value_to_json(value);
}

}  // namespace

std::string value_to_json_text(const Value& value) { return value_to_json(value).dump(); }

Value value_from_json_text(const std::string& text) {
  try {
    return value_from_json(json::parse(text));
  } catch (const json::exception& ex) {
    throw Error(Errc::store_unavailable, std::string("corrupt value in store record: ") + ex.what());
  }
}

std::string value_to_plain_json_text(const Value& value) {
  return value_to_plain_json(value).dump();
}

DeploymentStore::DeploymentStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) {
    throw Error(Errc::store_unavailable, "cannot create state directory " + dir_.string());
  }
}

void DeploymentStore::write_atomic(const std::filesystem::path& target, const std::string& text) {
  const auto tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error(Errc::store_unavailable, "cannot write " + tmp);
    out << text;
    if (!out.flush()) throw Error(Errc::store_unavailable, "cannot write " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) throw Error(Errc::store_unavailable, "cannot replace " + target.string());
}

void DeploymentStore::save(const std::string& id, const std::string& json_text) {
  std::unique_lock lock(mutex_);
  write_atomic(dir_ / (id + ".json"), json_text);
}

std::optional<std::string> DeploymentStore::load(const std::string& id) const {
  std::shared_lock lock(mutex_);
  std::ifstream in(dir_ / (id + ".json"));
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> DeploymentStore::list_ids() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> ids;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir_, ec)) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename().string();
    if (name.size() > 5 && name.rfind(".json") == name.size() - 5 && name.rfind("d-", 0) == 0) {
      ids.push_back(name.substr(0, name.size() - 5));
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

void DeploymentStore::save_world(const std::string& json_text) {
  std::unique_lock lock(mutex_);
  write_atomic(dir_ / "world.json", json_text);
}

std::optional<std::string> DeploymentStore::load_world() const {
  std::shared_lock lock(mutex_);
  std::ifstream in(dir_ / "world.json");
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

namespace {

json task_to_json(const tosca::ConfigTask& task) {
  return json{{"node", task.node},
              {"operation", task.operation},
              {"implementation", task.implementation},
              {"inputs", json::parse(value_to_json_text(Value(task.inputs)))}};
}

tosca::ConfigTask task_from_json(const json& node) {
  tosca::ConfigTask task;
  task.node = node.at("node").get<std::string>();
  task.operation = node.at("operation").get<std::string>();
  task.implementation = node.at("implementation").get<std::string>();
  auto inputs = value_from_json_text(node.at("inputs").dump());
  if (inputs.is_map()) task.inputs = inputs.as_map();
  return task;
}

}  // namespace

std::string deployment_to_json(const Deployment& dep) {
  json doc;
  doc["id"] = dep.id;
  doc["state"] = std::string(state_name(dep.state));
  doc["template"] = dep.template_text;
  doc["inputs"] = json::parse(value_to_json_text(Value(dep.inputs)));
  doc["overlay"] = dep.overlay;
  doc["failure_reason"] = dep.failure_reason;
  doc["next_seq"] = dep.next_seq;
  json plan;
  plan["provider"] = dep.plan.provider;
  json assignments = json::array();
  for (const auto& [node, assignment] : dep.plan.assignments) {
    json tasks = json::array();
    for (const auto& task : assignment.tasks) tasks.push_back(task_to_json(task));
    assignments.push_back({{"node", assignment.node},
                           {"flavor", assignment.flavor},
                           {"image", assignment.image},
                           {"preconfigured", assignment.preconfigured},
                           {"wants_public", assignment.wants_public},
                           {"initial_count", assignment.initial_count},
                           {"tasks", std::move(tasks)}});
  }
  plan["assignments"] = std::move(assignments);
  if (dep.plan.cluster) {
    const auto& c = *dep.plan.cluster;
    plan["cluster"] = {{"cluster_node", c.cluster_node},
                       {"front_end", c.front_end},
                       {"worker", c.worker},
                       {"worker_host", c.worker_host},
                       {"slots_per_slave", c.slots_per_slave},
                       {"idle_threshold", c.idle_threshold},
                       {"min_instances", c.min_instances},
                       {"max_instances", c.max_instances}};
  }
  doc["plan"] = std::move(plan);
  doc["next_index"] = dep.next_index;
  doc["groups"] = dep.groups;
  json log = json::array();
  for (const auto& record : dep.log) {
    log.push_back({{"tick", record.tick},
                   {"seq", record.seq},
                   {"from", record.from},
                   {"to", record.to},
                   {"note", record.note}});
  }
  doc["log"] = std::move(log);
  return doc.dump(2);
}

Deployment deployment_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& ex) {
    throw Error(Errc::store_unavailable, std::string("corrupt deployment record: ") + ex.what());
  }
  Deployment dep;
  dep.id = doc.at("id").get<std::string>();
  auto state = state_from(doc.at("state").get<std::string>());
  if (!state) throw Error(Errc::store_unavailable, "corrupt deployment state");
  dep.state = *state;
  dep.template_text = doc.at("template").get<std::string>();
  auto inputs = value_from_json_text(doc.at("inputs").dump());
  if (inputs.is_map()) dep.inputs = inputs.as_map();
  dep.overlay = doc.at("overlay").get<std::string>();
  dep.failure_reason = doc.at("failure_reason").get<std::string>();
  dep.next_seq = doc.at("next_seq").get<long>();
  const auto& plan = doc.at("plan");
  dep.plan.provider = plan.at("provider").get<std::string>();
  for (const auto& item : plan.at("assignments")) {
    NodeAssignment assignment;
    assignment.node = item.at("node").get<std::string>();
    assignment.flavor = item.at("flavor").get<std::string>();
    assignment.image = item.at("image").get<std::string>();
    assignment.preconfigured = item.at("preconfigured").get<bool>();
    assignment.wants_public = item.at("wants_public").get<bool>();
    assignment.initial_count = item.at("initial_count").get<std::int64_t>();
    for (const auto& task : item.at("tasks")) assignment.tasks.push_back(task_from_json(task));
    dep.plan.assignments.emplace(assignment.node, std::move(assignment));
  }
  if (plan.contains("cluster")) {
    const auto& c = plan.at("cluster");
    ClusterBinding binding;
    binding.cluster_node = c.at("cluster_node").get<std::string>();
    binding.front_end = c.at("front_end").get<std::string>();
    binding.worker = c.at("worker").get<std::string>();
    binding.worker_host = c.at("worker_host").get<std::string>();
    binding.slots_per_slave = c.at("slots_per_slave").get<std::int64_t>();
    binding.idle_threshold = c.at("idle_threshold").get<int>();
    binding.min_instances = c.at("min_instances").get<std::int64_t>();
    binding.max_instances = c.at("max_instances").get<std::int64_t>();
    dep.plan.cluster = std::move(binding);
  }
  dep.next_index = doc.at("next_index").get<std::map<std::string, std::int64_t>>();
  dep.groups = doc.at("groups").get<std::map<std::string, std::string>>();
  for (const auto& item : doc.at("log")) {
    TransitionRecord record;
    record.tick = item.at("tick").get<long>();
    record.seq = item.at("seq").get<long>();
    record.from = item.at("from").get<std::string>();
    record.to = item.at("to").get<std::string>();
    record.note = item.at("note").get<std::string>();
    dep.log.push_back(std::move(record));
  }
  return dep;
}

}  // namespace stratus::orch
