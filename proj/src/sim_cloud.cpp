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

#include "stratus/sim/cloud.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "json.hpp"
#include "stratus/error.hpp"

namespace stratus::sim {

namespace {

using nlohmann::json;

std::string three_digits(std::int64_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%03lld", static_cast<long long>(index));
  return buf;
}

// "a.b.c.d/p" -> (base address, prefix length)
std::pair<std::uint32_t, int> parse_cidr(const std::string& text) {
  std::uint32_t base = 0;
  int prefix = 0;
  const char* p = text.data();
  const char* end = p + text.size();
  for (int octet = 0; octet < 4; ++octet) {
    unsigned value = 0;
    auto [next, ec] = std::from_chars(p, end, value);
    if (ec != std::errc() || value > 255) {
      throw Error(Errc::bad_config, "invalid address block '" + text + "'", text);
    }
    base = (base << 8) | value;
    p = next;
    if (octet < 3) {
      if (p == end || *p != '.') {
        throw Error(Errc::bad_config, "invalid address block '" + text + "'", text);
      }
      ++p;
    }
  }
  if (p == end || *p != '/') {
    throw Error(Errc::bad_config, "invalid address block '" + text + "'", text);
  }
  ++p;
  auto [next, ec] = std::from_chars(p, end, prefix);
  if (ec != std::errc() || next != end || prefix < 0 || prefix > 32) {
    throw Error(Errc::bad_config, "invalid address block '" + text + "'", text);
  }
  return {base, prefix};
}

std::int64_t cidr_capacity(int prefix) {
  if (prefix >= 31) return prefix == 32 ? 1 : 2;
  return (std::int64_t{1} << (32 - prefix)) - 2;
}

std::string format_address(std::uint32_t value) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%u.%u.%u.%u", (value >> 24) & 0xff, (value >> 16) & 0xff,
                (value >> 8) & 0xff, value & 0xff);
  return buf;
}

// nth usable host address of the block, skipping the network address
std::string nth_address(const std::string& block, std::int64_t n) {
  auto [base, prefix] = parse_cidr(block);
  return format_address(base + 1 + static_cast<std::uint32_t>(n));
}

ScalarSize node_as_size(const YAML::Node& node, const std::string& what) {
  if (node.IsScalar()) {
    if (auto parsed = ScalarSize::parse(node.Scalar())) return *parsed;
    // bare integers are taken as bytes
    std::int64_t raw = 0;
    auto text = node.Scalar();
    auto [next, ec] = std::from_chars(text.data(), text.data() + text.size(), raw);
    if (ec == std::errc() && next == text.data() + text.size()) {
      return ScalarSize::from_bytes(static_cast<std::uint64_t>(raw));
    }
  }
  throw Error(Errc::bad_config, what + " must be a size such as '8 GB'", what);
}

hot::FlavorCatalog parse_flavor_list(const YAML::Node& node) {
  hot::FlavorCatalog catalog;
  for (const auto& item : node) {
    hot::FlavorEntry entry;
    entry.name = item["name"].as<std::string>();
    entry.vcpus = item["vcpus"].as<std::int64_t>();
    entry.mem = node_as_size(item["mem"], "flavor mem");
    entry.disk = node_as_size(item["disk"], "flavor disk");
    catalog.entries.push_back(std::move(entry));
  }
  return catalog;
}

hot::ImageCatalog parse_image_list(const YAML::Node& node) {
  hot::ImageCatalog catalog;
  const auto defaults = hot::default_image_catalog();
  for (const auto& item : node) {
    hot::ImageEntry entry;
    if (item.IsScalar()) {
      entry.name = item.Scalar();
      if (const auto* known = defaults.find(entry.name)) entry = *known;
    } else {
      entry.name = item["name"].as<std::string>();
      if (item["architecture"]) entry.architecture = item["architecture"].as<std::string>();
      if (item["type"]) entry.type = item["type"].as<std::string>();
      if (item["distribution"]) entry.distribution = item["distribution"].as<std::string>();
      if (item["version"]) entry.version = item["version"].as<std::string>();
    }
    catalog.entries.push_back(std::move(entry));
  }
  return catalog;
}

}  // namespace

std::string_view backend_kind_name(BackendKind kind) {
  return kind == BackendKind::heat_like ? "heat_like" : "im_like";
}

std::optional<BackendKind> backend_kind_from(std::string_view name) {
  if (name == "heat_like") return BackendKind::heat_like;
  if (name == "im_like") return BackendKind::im_like;
  return std::nullopt;
}

std::string_view instance_state_name(InstanceState state) {
  switch (state) {
    case InstanceState::BOOTING:
      return "BOOTING";
    case InstanceState::CONTEXTUALIZING:
      return "CONTEXTUALIZING";
    case InstanceState::RUNNING:
      return "RUNNING";
    case InstanceState::TERMINATED:
      return "TERMINATED";
  }
  return "?";
}

std::vector<ProviderConfig> parse_providers(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& ex) {
    throw Error(Errc::bad_config, std::string("provider config: ") + ex.what());
  }
  if (!root.IsMap() || !root["providers"] || !root["providers"].IsSequence()) {
    throw Error(Errc::bad_config, "provider config must contain a 'providers' list");
  }
  std::vector<ProviderConfig> result;
  for (const auto& item : root["providers"]) {
    ProviderConfig cfg;
    if (!item["id"]) throw Error(Errc::bad_config, "provider entry missing 'id'");
    cfg.id = item["id"].as<std::string>();
    if (item["backend"]) {
      auto kind = backend_kind_from(item["backend"].as<std::string>());
      if (!kind) {
        throw Error(Errc::bad_config, "provider " + cfg.id + ": unknown backend kind", cfg.id);
      }
      cfg.backend = *kind;
    }
    cfg.sla_rank = item["sla_rank"] ? item["sla_rank"].as<int>() : 0;
    cfg.max_vms = item["max_vms"] ? item["max_vms"].as<std::int64_t>() : 16;
    cfg.max_vcpus = item["max_vcpus"] ? item["max_vcpus"].as<std::int64_t>() : 64;
    cfg.max_mem = item["max_mem"] ? node_as_size(item["max_mem"], "max_mem")
                                  : *ScalarSize::parse("128 GiB");
    cfg.public_pool =
        item["public_pool"] ? item["public_pool"].as<std::string>() : std::string("192.0.2.0/24");
    cfg.private_subnet = item["private_subnet"] ? item["private_subnet"].as<std::string>()
                                                : std::string("10.0.0.0/16");
    parse_cidr(cfg.public_pool);
    parse_cidr(cfg.private_subnet);
    if (item["boot_ticks"]) cfg.boot_ticks = item["boot_ticks"].as<int>();
    if (item["agent_ticks"]) cfg.agent_ticks = item["agent_ticks"].as<int>();
    if (item["task_ticks"]) cfg.task_ticks = item["task_ticks"].as<int>();
    if (item["runtime"]) {
      cfg.runtime = item["runtime"].as<std::string>();
      if (cfg.runtime != "vm" && cfg.runtime != "container") {
        throw Error(Errc::bad_config, "provider " + cfg.id + ": runtime must be vm or container",
                    cfg.id);
      }
    }
    cfg.flavors = item["flavors"] ? parse_flavor_list(item["flavors"])
                                  : hot::default_flavor_catalog();
    cfg.images = item["images"] ? parse_image_list(item["images"]) : hot::default_image_catalog();
    result.push_back(std::move(cfg));
  }
  return result;
}

std::vector<ProviderConfig> load_providers(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot read provider config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_providers(buf.str());
}

std::string Event::line() const {
  std::string out;
  out += std::to_string(tick);
  out += ' ';
  out += provider;
  out += ' ';
  out += instance;
  out += ' ';
  out += old_state;
  out += ' ';
  out += new_state;
  return out;
}

Cloud::Cloud(std::vector<ProviderConfig> providers) {
  for (auto& cfg : providers) {
    auto id = cfg.id;
    if (!providers_.emplace(id, std::move(cfg)).second) {
      throw Error(Errc::bad_config, "duplicate provider id " + id, id);
    }
    cursors_.emplace(id, AddressCursor{});
  }
}

std::vector<std::string> Cloud::provider_ids() const {
  std::vector<std::string> out;
  out.reserve(providers_.size());
  for (const auto& [id, cfg] : providers_) out.push_back(id);
  return out;
}

const ProviderConfig& Cloud::provider(const std::string& id) const {
  auto it = providers_.find(id);
  if (it == providers_.end()) throw Error(Errc::unknown_provider, "unknown provider " + id, id);
  return it->second;
}

ProviderConfig& Cloud::provider_mut(const std::string& id) {
  auto it = providers_.find(id);
  if (it == providers_.end()) throw Error(Errc::unknown_provider, "unknown provider " + id, id);
  return it->second;
}

Usage Cloud::usage(const std::string& provider_id) const {
  provider(provider_id);
  Usage total;
  for (const auto& [id, inst] : instances_) {
    if (inst.provider != provider_id || inst.state == InstanceState::TERMINATED) continue;
    total.vms += 1;
    total.vcpus += inst.vcpus;
    total.mem_bytes += inst.mem_bytes;
  }
  return total;
}

bool Cloud::fits(const std::string& provider_id, const Usage& request) const {
  const auto& cfg = provider(provider_id);
  const auto used = usage(provider_id);
  return used.vms + request.vms <= cfg.max_vms && used.vcpus + request.vcpus <= cfg.max_vcpus &&
         used.mem_bytes + request.mem_bytes <= cfg.max_mem.bytes();
}

std::string Cloud::new_group_id(BackendKind kind) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04lld", static_cast<long long>(++group_counter_));
  return std::string(kind == BackendKind::heat_like ? "stk-" : "inf-") + buf;
}

void Cloud::emit(const std::string& provider, const std::string& instance,
                 const std::string& old_state, InstanceState new_state) {
  buffer_.push_back(Event{clock_, provider, instance, old_state,
                          std::string(instance_state_name(new_state))});
}

std::string Cloud::alloc_public(const ProviderConfig& cfg) {
  auto& cursor = cursors_[cfg.id];
  auto [base, prefix] = parse_cidr(cfg.public_pool);
  if (cursor.next_public >= cidr_capacity(prefix)) {
    throw Error(Errc::no_public_address, "public address pool exhausted on " + cfg.id, cfg.id);
  }
  return nth_address(cfg.public_pool, cursor.next_public++);
}

std::string Cloud::alloc_private(const ProviderConfig& cfg) {
  auto& cursor = cursors_[cfg.id];
  auto [base, prefix] = parse_cidr(cfg.private_subnet);
  if (cursor.next_private >= cidr_capacity(prefix)) {
    throw Error(Errc::backend_rejected, "private address pool exhausted on " + cfg.id, cfg.id);
  }
  return nth_address(cfg.private_subnet, cursor.next_private++);
}

void Cloud::admit_or_throw(const ProviderConfig& cfg, const std::vector<InstanceSpec>& specs) {
  Usage request;
  std::int64_t publics = 0;
  for (const auto& spec : specs) {
    const auto* flavor = cfg.flavors.find(spec.flavor);
    if (!flavor) {
      throw Error(Errc::no_such_flavor, "provider " + cfg.id + " has no flavor " + spec.flavor,
                  spec.flavor);
    }
    if (!cfg.images.contains(spec.image)) {
      throw Error(Errc::no_such_image, "provider " + cfg.id + " has no image " + spec.image,
                  spec.image);
    }
    request.vms += 1;
    request.vcpus += flavor->vcpus;
    request.mem_bytes += flavor->mem.bytes();
    if (spec.wants_public) ++publics;
  }
  const auto used = usage(cfg.id);
  if (used.vms + request.vms > cfg.max_vms || used.vcpus + request.vcpus > cfg.max_vcpus ||
      used.mem_bytes + request.mem_bytes > cfg.max_mem.bytes()) {
    std::string detail = "provider " + cfg.id + " cannot admit " +
                         std::to_string(request.vms) + " instance(s):";
    if (used.vms + request.vms > cfg.max_vms) {
      detail += " vms " + std::to_string(used.vms) + "+" + std::to_string(request.vms) + ">" +
                std::to_string(cfg.max_vms);
    }
    if (used.vcpus + request.vcpus > cfg.max_vcpus) {
      detail += " vcpus " + std::to_string(used.vcpus) + "+" + std::to_string(request.vcpus) +
                ">" + std::to_string(cfg.max_vcpus);
    }
    if (used.mem_bytes + request.mem_bytes > cfg.max_mem.bytes()) {
      detail += " mem " + ScalarSize::from_bytes(used.mem_bytes + request.mem_bytes).str() + ">" +
                cfg.max_mem.str();
    }
    throw Error(Errc::quota_exceeded, detail, cfg.id);
  }
  auto [pub_base, pub_prefix] = parse_cidr(cfg.public_pool);
  if (cursors_[cfg.id].next_public + publics > cidr_capacity(pub_prefix)) {
    throw Error(Errc::no_public_address, "public address pool exhausted on " + cfg.id, cfg.id);
  }
  auto [priv_base, priv_prefix] = parse_cidr(cfg.private_subnet);
  if (cursors_[cfg.id].next_private + static_cast<std::int64_t>(specs.size()) >
      cidr_capacity(priv_prefix)) {
    throw Error(Errc::backend_rejected, "private address pool exhausted on " + cfg.id, cfg.id);
  }
}

SimInstance& Cloud::create_instance(Group& group, const InstanceSpec& spec, bool make_master) {
  const auto& cfg = provider(group.provider);
  const auto* flavor = cfg.flavors.find(spec.flavor);
  SimInstance inst;
  inst.id = group.deployment + "/" + spec.node + "-" + three_digits(spec.index);
  inst.provider = group.provider;
  inst.group = group.id;
  inst.deployment = group.deployment;
  inst.node = spec.node;
  inst.index = spec.index;
  inst.flavor = spec.flavor;
  inst.image = spec.image;
  inst.vcpus = flavor->vcpus;
  inst.mem_bytes = flavor->mem.bytes();
  inst.state = InstanceState::BOOTING;
  inst.boot_remaining = cfg.boot_ticks;
  inst.tasks = spec.tasks;
  inst.wants_public = spec.wants_public;
  inst.is_master = make_master;
  inst.runtime = cfg.runtime;
  inst.private_address = alloc_private(cfg);
  if (spec.wants_public || make_master) inst.public_address = alloc_public(cfg);
  inst.created_tick = clock_;
  inst.overlays = spec.overlays;
  auto [it, inserted] = instances_.emplace(inst.id, std::move(inst));
  if (!inserted) {
    throw Error(Errc::backend_rejected, "instance id collision: " + it->first, it->first);
  }
  emit(group.provider, it->first, "-", InstanceState::BOOTING);
  return it->second;
}

std::string Cloud::create_stack(const std::string& provider_id, const std::string& deployment,
                                const hot::HotDocument& doc,
                                const std::vector<std::string>& overlays) {
  const auto& cfg = provider(provider_id);
  std::vector<InstanceSpec> specs;
  for (const auto& [name, resource] : doc.resources) {
    if (resource.type != "OS::Nova::Server") {
      throw Error(Errc::backend_rejected, "unsupported resource type " + resource.type, name);
    }
    InstanceSpec spec;
    spec.overlays = overlays;
    // resource names may carry an explicit -NNN index; otherwise index 0
    spec.node = name;
    spec.index = 0;
    if (name.size() > 4 && name[name.size() - 4] == '-' &&
        std::isdigit(static_cast<unsigned char>(name[name.size() - 3])) &&
        std::isdigit(static_cast<unsigned char>(name[name.size() - 2])) &&
        std::isdigit(static_cast<unsigned char>(name[name.size() - 1]))) {
      spec.node = name.substr(0, name.size() - 4);
      spec.index = std::stoll(name.substr(name.size() - 3));
    }
    auto fetch_scalar = [&](const char* key) -> std::string {
      auto it = resource.properties.find(key);
      if (it == resource.properties.end() || !it->second.is_string()) {
        throw Error(Errc::backend_rejected,
                    "server " + name + " needs a scalar '" + key + "' property", name);
      }
      return it->second.as_string();
    };
    spec.flavor = fetch_scalar("flavor");
    spec.image = fetch_scalar("image");
    if (auto it = resource.properties.find("network"); it != resource.properties.end()) {
      spec.wants_public = it->second.is_string() && it->second.as_string() == "PUBLIC";
    }
    if (auto it = resource.properties.find("user_data"); it != resource.properties.end()) {
      if (it->second.is_map()) {
        auto tasks = it->second.as_map().find("tasks");
        if (tasks != it->second.as_map().end() && tasks->second.is_list()) {
          spec.tasks = static_cast<int>(tasks->second.as_list().size());
        }
      }
    }
    specs.push_back(std::move(spec));
  }
  admit_or_throw(cfg, specs);
  Group group;
  group.id = new_group_id(BackendKind::heat_like);
  group.provider = provider_id;
  group.deployment = deployment;
  group.kind = BackendKind::heat_like;
  for (const auto& spec : specs) {
    if (spec.tasks > 0) group.needs_config = true;
  }
  auto [it, _] = groups_.emplace(group.id, std::move(group));
  for (const auto& spec : specs) create_instance(it->second, spec, false);
  return it->first;
}

std::string Cloud::deploy_graph(const std::string& provider_id, const std::string& deployment,
                                const std::vector<InstanceSpec>& specs) {
  const auto& cfg = provider(provider_id);
  admit_or_throw(cfg, specs);
  Group group;
  group.id = new_group_id(cfg.backend);
  group.provider = provider_id;
  group.deployment = deployment;
  group.kind = cfg.backend;
  for (const auto& spec : specs) {
    if (spec.tasks > 0) group.needs_config = true;
  }

  // IM-style contextualization wants a master: the lexicographically first
  // public-facing instance, or failing that the first instance overall, which
  // is then given an address from the public pool.
  std::size_t master_slot = specs.size();
  if (group.kind == BackendKind::im_like && group.needs_config && !specs.empty()) {
    std::vector<std::size_t> order(specs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      auto key = [&](std::size_t i) {
        return specs[i].node + "-" + three_digits(specs[i].index);
      };
      return key(a) < key(b);
    });
    master_slot = order.front();
    for (auto i : order) {
      if (specs[i].wants_public) {
        master_slot = i;
        break;
      }
    }
  }

  auto [it, _] = groups_.emplace(group.id, std::move(group));
  for (std::size_t i = 0; i < specs.size(); ++i) {
    auto& inst = create_instance(it->second, specs[i], i == master_slot);
    if (i == master_slot) it->second.master_id = inst.id;
  }
  return it->first;
}

std::string Cloud::deploy_graph(const std::string& provider_id, const std::string& deployment,
                                const tosca::TopologyGraph& graph) {
  const auto& cfg = provider(provider_id);
  std::vector<InstanceSpec> specs;
  for (const auto& [name, node] : graph.nodes) {
    if (!node.is_compute()) continue;
    const auto bounds = tosca::scaling_bounds(graph, name);
    const auto host = hot::host_requirements(node);
    const auto os = hot::os_requirements(node);
    InstanceSpec spec;
    spec.node = name;
    spec.flavor = hot::map_flavor(host, cfg.flavors);
    if (os.image && cfg.images.contains(*os.image)) {
      spec.image = *os.image;
    } else {
      spec.image = hot::map_image(os, cfg.images);
    }
    spec.tasks = static_cast<int>(tosca::config_tasks(graph, name).size());
    if (const auto* net = node.capability_property("endpoint", "network_name")) {
      spec.wants_public = net->is_string() && net->as_string() == "PUBLIC";
    }
    for (std::int64_t i = 0; i < bounds.count; ++i) {
      spec.index = i;
      specs.push_back(spec);
    }
  }
  return deploy_graph(provider_id, deployment, specs);
}

void Cloud::add_instances(const std::string& group_id, const std::vector<InstanceSpec>& specs) {
  auto it = groups_.find(group_id);
  if (it == groups_.end()) {
    throw Error(Errc::unknown_instance, "unknown group " + group_id, group_id);
  }
  auto& group = it->second;
  const auto& cfg = provider(group.provider);
  bool adds_tasks = false;
  for (const auto& spec : specs) adds_tasks |= spec.tasks > 0;
  if (adds_tasks && group.kind == BackendKind::im_like && !group.needs_config) {
    throw Error(Errc::backend_rejected,
                "infrastructure " + group_id + " has no contextualization master", group_id);
  }
  admit_or_throw(cfg, specs);
  for (const auto& spec : specs) create_instance(group, spec, false);
}

void Cloud::register_image(const std::string& provider_id, const hot::ImageEntry& entry) {
  auto& cfg = provider_mut(provider_id);
  if (cfg.images.contains(entry.name)) {
    throw Error(Errc::duplicate_image,
                "image " + entry.name + " already registered on " + provider_id, entry.name);
  }
  cfg.images.entries.push_back(entry);
}

std::vector<Event> Cloud::tick(int n) {
  const std::size_t mark = buffer_.size();
  for (int i = 0; i < n; ++i) step_one_tick();
  return std::vector<Event>(buffer_.begin() + static_cast<std::ptrdiff_t>(mark), buffer_.end());
}

void Cloud::step_one_tick() {
  ++clock_;
  for (const auto& provider_id : provider_ids()) {
    const auto& cfg = providers_.at(provider_id);
    // countdowns first
    for (auto& [id, inst] : instances_) {
      if (inst.provider != provider_id) continue;
      if (inst.state == InstanceState::CONTEXTUALIZING) {
        if (--inst.config_remaining <= 0) {
          inst.state = InstanceState::RUNNING;
          emit(provider_id, id, "CONTEXTUALIZING", InstanceState::RUNNING);
        }
      } else if (inst.state == InstanceState::BOOTING && inst.boot_remaining > 0) {
        --inst.boot_remaining;
      }
    }
    // then group-level transitions
    for (auto& [gid, group] : groups_) {
      if (group.provider != provider_id) continue;
      std::vector<SimInstance*> members;
      for (auto& [id, inst] : instances_) {
        if (inst.group == gid && inst.state != InstanceState::TERMINATED) {
          members.push_back(&inst);
        }
      }
      auto begin_config = [&](SimInstance& inst, int extra) {
        const int total = extra + cfg.task_ticks * inst.tasks;
        if (total <= 0) {
          inst.state = InstanceState::RUNNING;
          emit(provider_id, inst.id, "BOOTING", InstanceState::RUNNING);
          return;
        }
        inst.state = InstanceState::CONTEXTUALIZING;
        inst.config_remaining = total;
        emit(provider_id, inst.id, "BOOTING", InstanceState::CONTEXTUALIZING);
      };
      const bool gated = group.kind == BackendKind::im_like && group.needs_config;
      if (!gated) {
        for (auto* inst : members) {
          if (inst->state == InstanceState::BOOTING && inst->boot_remaining == 0) {
            begin_config(*inst, 0);
          }
        }
        continue;
      }
      if (!group.master_started) {
        bool all_booted = !members.empty();
        for (auto* inst : members) {
          if (inst->state == InstanceState::BOOTING && inst->boot_remaining > 0) {
            all_booted = false;
          }
        }
        if (all_booted) {
          for (auto* inst : members) {
            if (inst->id == group.master_id && inst->state == InstanceState::BOOTING) {
              begin_config(*inst, cfg.agent_ticks);
            }
          }
          group.master_started = true;
          group.agent_remaining = cfg.agent_ticks;
        }
        continue;
      }
      if (group.agent_remaining > 0) {
        if (--group.agent_remaining > 0) continue;
      }
      // agent installed: everything else configures as soon as it is booted
      for (auto* inst : members) {
        if (inst->id == group.master_id) continue;
        if (inst->state == InstanceState::BOOTING && inst->boot_remaining == 0) {
          begin_config(*inst, 0);
        }
      }
    }
  }
}

std::vector<Event> Cloud::drain_events() {
  std::vector<Event> out;
  out.swap(buffer_);
  return out;
}

void Cloud::terminate(const std::string& instance_id) {
  auto it = instances_.find(instance_id);
  if (it == instances_.end() || it->second.state == InstanceState::TERMINATED) {
    throw Error(Errc::unknown_instance, "unknown instance " + instance_id, instance_id);
  }
  auto& inst = it->second;
  const std::string old(instance_state_name(inst.state));
  inst.state = InstanceState::TERMINATED;
  emit(inst.provider, instance_id, old, InstanceState::TERMINATED);
}

void Cloud::attach_overlay(const std::string& instance_id, const std::string& overlay_id) {
  auto it = instances_.find(instance_id);
  if (it == instances_.end() || it->second.state == InstanceState::TERMINATED) {
    throw Error(Errc::unknown_instance, "unknown instance " + instance_id, instance_id);
  }
  auto& overlays = it->second.overlays;
  if (std::find(overlays.begin(), overlays.end(), overlay_id) == overlays.end()) {
    overlays.push_back(overlay_id);
  }
}

bool Cloud::reachable(const std::string& a, const std::string& b) const {
  const auto* lhs = find_instance(a);
  const auto* rhs = find_instance(b);
  if (!lhs || !rhs) {
    throw Error(Errc::unknown_instance, "unknown instance " + std::string(lhs ? b : a),
                lhs ? b : a);
  }
  if (lhs->provider == rhs->provider) return true;
  for (const auto& overlay : lhs->overlays) {
    if (std::find(rhs->overlays.begin(), rhs->overlays.end(), overlay) != rhs->overlays.end()) {
      return true;
    }
  }
  return false;
}

const SimInstance* Cloud::find_instance(const std::string& id) const {
  auto it = instances_.find(id);
  return it == instances_.end() ? nullptr : &it->second;
}

std::vector<const SimInstance*> Cloud::instances_of_deployment(const std::string& deployment,
                                                               bool include_terminated) const {
  std::vector<const SimInstance*> out;
  for (const auto& [id, inst] : instances_) {
    if (inst.deployment != deployment) continue;
    if (!include_terminated && inst.state == InstanceState::TERMINATED) continue;
    out.push_back(&inst);
  }
  return out;
}

std::vector<const SimInstance*> Cloud::instances_of_group(const std::string& group_id) const {
  std::vector<const SimInstance*> out;
  for (const auto& [id, inst] : instances_) {
    if (inst.group == group_id && inst.state != InstanceState::TERMINATED) out.push_back(&inst);
  }
  return out;
}

bool Cloud::group_ready(const std::string& group_id) const {
  for (const auto& [id, inst] : instances_) {
    if (inst.group != group_id || inst.state == InstanceState::TERMINATED) continue;
    if (inst.state != InstanceState::RUNNING) return false;
  }
  return true;
}

namespace {

json catalog_to_json(const hot::FlavorCatalog& catalog) {
  json list = json::array();
  for (const auto& entry : catalog.entries) {
    list.push_back({{"name", entry.name},
                    {"vcpus", entry.vcpus},
                    {"mem", entry.mem.bytes()},
                    {"disk", entry.disk.bytes()}});
  }
  return list;
}

json catalog_to_json(const hot::ImageCatalog& catalog) {
  json list = json::array();
  for (const auto& entry : catalog.entries) {
    list.push_back({{"name", entry.name},
                    {"architecture", entry.architecture},
                    {"type", entry.type},
                    {"distribution", entry.distribution},
                    {"version", entry.version}});
  }
  return list;
}

hot::FlavorCatalog flavors_from_json(const json& list) {
  hot::FlavorCatalog catalog;
  for (const auto& item : list) {
    hot::FlavorEntry entry;
    entry.name = item.at("name").get<std::string>();
    entry.vcpus = item.at("vcpus").get<std::int64_t>();
    entry.mem = ScalarSize::from_bytes(item.at("mem").get<std::uint64_t>());
    entry.disk = ScalarSize::from_bytes(item.at("disk").get<std::uint64_t>());
    catalog.entries.push_back(std::move(entry));
  }
  return catalog;
}

hot::ImageCatalog images_from_json(const json& list) {
  hot::ImageCatalog catalog;
  for (const auto& item : list) {
    hot::ImageEntry entry;
    entry.name = item.at("name").get<std::string>();
    entry.architecture = item.at("architecture").get<std::string>();
    entry.type = item.at("type").get<std::string>();
    entry.distribution = item.at("distribution").get<std::string>();
    entry.version = item.at("version").get<std::string>();
    catalog.entries.push_back(std::move(entry));
  }
  return catalog;
}

}  // namespace

std::string Cloud::snapshot_json() const {
  json doc;
  doc["clock"] = clock_;
  doc["group_counter"] = group_counter_;
  json providers = json::array();
  for (const auto& [id, cfg] : providers_) {
    providers.push_back({{"id", cfg.id},
                         {"backend", std::string(backend_kind_name(cfg.backend))},
                         {"sla_rank", cfg.sla_rank},
                         {"max_vms", cfg.max_vms},
                         {"max_vcpus", cfg.max_vcpus},
                         {"max_mem", cfg.max_mem.bytes()},
                         {"public_pool", cfg.public_pool},
                         {"private_subnet", cfg.private_subnet},
                         {"boot_ticks", cfg.boot_ticks},
                         {"agent_ticks", cfg.agent_ticks},
                         {"task_ticks", cfg.task_ticks},
                         {"runtime", cfg.runtime},
                         {"flavors", catalog_to_json(cfg.flavors)},
                         {"images", catalog_to_json(cfg.images)}});
  }
  doc["providers"] = providers;
  json cursors = json::object();
  for (const auto& [id, cursor] : cursors_) {
    cursors[id] = {{"next_public", cursor.next_public}, {"next_private", cursor.next_private}};
  }
  doc["cursors"] = cursors;
  json groups = json::array();
  for (const auto& [id, group] : groups_) {
    groups.push_back({{"id", group.id},
                      {"provider", group.provider},
                      {"deployment", group.deployment},
                      {"kind", std::string(backend_kind_name(group.kind))},
                      {"needs_config", group.needs_config},
                      {"master_started", group.master_started},
                      {"agent_remaining", group.agent_remaining},
                      {"master_id", group.master_id}});
  }
  doc["groups"] = groups;
  json instances = json::array();
  for (const auto& [id, inst] : instances_) {
    json entry = {{"id", inst.id},
                  {"provider", inst.provider},
                  {"group", inst.group},
                  {"deployment", inst.deployment},
                  {"node", inst.node},
                  {"index", inst.index},
                  {"flavor", inst.flavor},
                  {"image", inst.image},
                  {"vcpus", inst.vcpus},
                  {"mem_bytes", inst.mem_bytes},
                  {"state", std::string(instance_state_name(inst.state))},
                  {"boot_remaining", inst.boot_remaining},
                  {"config_remaining", inst.config_remaining},
                  {"tasks", inst.tasks},
                  {"wants_public", inst.wants_public},
                  {"is_master", inst.is_master},
                  {"runtime", inst.runtime},
                  {"private_address", inst.private_address},
                  {"created_tick", inst.created_tick},
                  {"overlays", inst.overlays}};
    if (inst.public_address) entry["public_address"] = *inst.public_address;
    instances.push_back(std::move(entry));
  }
  doc["instances"] = instances;
  return doc.dump();
}

Cloud Cloud::restore_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& ex) {
    throw Error(Errc::store_unavailable, std::string("corrupt cloud snapshot: ") + ex.what());
  }
  Cloud cloud;
  cloud.clock_ = doc.at("clock").get<long>();
  cloud.group_counter_ = doc.at("group_counter").get<std::int64_t>();
  for (const auto& item : doc.at("providers")) {
    ProviderConfig cfg;
    cfg.id = item.at("id").get<std::string>();
    cfg.backend = *backend_kind_from(item.at("backend").get<std::string>());
    cfg.sla_rank = item.at("sla_rank").get<int>();
    cfg.max_vms = item.at("max_vms").get<std::int64_t>();
    cfg.max_vcpus = item.at("max_vcpus").get<std::int64_t>();
    cfg.max_mem = ScalarSize::from_bytes(item.at("max_mem").get<std::uint64_t>());
    cfg.public_pool = item.at("public_pool").get<std::string>();
    cfg.private_subnet = item.at("private_subnet").get<std::string>();
    cfg.boot_ticks = item.at("boot_ticks").get<int>();
    cfg.agent_ticks = item.at("agent_ticks").get<int>();
    cfg.task_ticks = item.at("task_ticks").get<int>();
    cfg.runtime = item.at("runtime").get<std::string>();
    cfg.flavors = flavors_from_json(item.at("flavors"));
    cfg.images = images_from_json(item.at("images"));
    cloud.providers_.emplace(cfg.id, std::move(cfg));
  }
  for (auto it = doc.at("cursors").begin(); it != doc.at("cursors").end(); ++it) {
    AddressCursor cursor;
    cursor.next_public = it.value().at("next_public").get<std::int64_t>();
    cursor.next_private = it.value().at("next_private").get<std::int64_t>();
    cloud.cursors_.emplace(it.key(), cursor);
  }
  for (const auto& item : doc.at("groups")) {
    Group group;
    group.id = item.at("id").get<std::string>();
    group.provider = item.at("provider").get<std::string>();
    group.deployment = item.at("deployment").get<std::string>();
    group.kind = *backend_kind_from(item.at("kind").get<std::string>());
    group.needs_config = item.at("needs_config").get<bool>();
    group.master_started = item.at("master_started").get<bool>();
    group.agent_remaining = item.at("agent_remaining").get<int>();
    group.master_id = item.at("master_id").get<std::string>();
    cloud.groups_.emplace(group.id, std::move(group));
  }
  for (const auto& item : doc.at("instances")) {
    SimInstance inst;
    inst.id = item.at("id").get<std::string>();
    inst.provider = item.at("provider").get<std::string>();
    inst.group = item.at("group").get<std::string>();
    inst.deployment = item.at("deployment").get<std::string>();
    inst.node = item.at("node").get<std::string>();
    inst.index = item.at("index").get<std::int64_t>();
    inst.flavor = item.at("flavor").get<std::string>();
    inst.image = item.at("image").get<std::string>();
    inst.vcpus = item.at("vcpus").get<std::int64_t>();
    inst.mem_bytes = item.at("mem_bytes").get<std::uint64_t>();
    const auto state = item.at("state").get<std::string>();
    if (state == "BOOTING") inst.state = InstanceState::BOOTING;
    else if (state == "CONTEXTUALIZING") inst.state = InstanceState::CONTEXTUALIZING;
    else if (state == "RUNNING") inst.state = InstanceState::RUNNING;
    else inst.state = InstanceState::TERMINATED;
    inst.boot_remaining = item.at("boot_remaining").get<int>();
    inst.config_remaining = item.at("config_remaining").get<int>();
    inst.tasks = item.at("tasks").get<int>();
    inst.wants_public = item.at("wants_public").get<bool>();
    inst.is_master = item.at("is_master").get<bool>();
    inst.runtime = item.at("runtime").get<std::string>();
    if (item.contains("public_address")) {
      inst.public_address = item.at("public_address").get<std::string>();
    }
    inst.private_address = item.at("private_address").get<std::string>();
    inst.created_tick = item.at("created_tick").get<long>();
    inst.overlays = item.at("overlays").get<std::vector<std::string>>();
    cloud.instances_.emplace(inst.id, std::move(inst));
  }
  return cloud;
}

}  // namespace stratus::sim
