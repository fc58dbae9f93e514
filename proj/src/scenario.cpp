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

#include "stratus/scenario.hpp"

#include <fstream>
#include <memory>
#include <sstream>

#include "stratus/error.hpp"
#include "stratus/orch/store.hpp"
#include "stratus/world.hpp"

namespace stratus {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream in(line);
  std::string token;
  while (in >> token) tokens.push_back(token);
  return tokens;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct Runner {
  std::filesystem::path base;
  std::vector<sim::ProviderConfig> providers;
  tosca::ImportResolver resolver;
  std::unique_ptr<World> world;
  std::map<std::string, std::string> aliases;
  std::string out;
  int line_no = 0;
  bool have_providers = false;

  std::filesystem::path resolve_path(const std::string& ref) const {
    std::filesystem::path p(ref);
    return p.is_absolute() ? p : base / p;
  }

  [[noreturn]] void bail(const std::string& message) const {
    throw Error(Errc::bad_scenario, "line " + std::to_string(line_no) + ": " + message);
  }

  [[noreturn]] void failed(const std::string& message) const {
    throw Error(Errc::assert_failed,
                "line " + std::to_string(line_no) + ": assertion failed: " + message);
  }

  World& require_world() {
    if (!world) {
      if (!have_providers) bail("a 'providers' step must come first");
      WorldOptions options;
      options.providers = providers;
      options.resolver = resolver;
      world = std::make_unique<World>(std::move(options));
    }
    return *world;
  }

  const std::string& deployment_of(const std::string& alias) const {
    auto it = aliases.find(alias);
    if (it == aliases.end()) {
      throw Error(Errc::bad_scenario,
                  "line " + std::to_string(line_no) + ": unknown alias " + alias, alias);
    }
    return it->second;
  }

  std::int64_t to_int(const std::string& text) const {
    try {
      std::size_t used = 0;
      const auto value = std::stoll(text, &used);
      if (used == text.size()) return value;
    } catch (const std::exception&) {
    }
    bail("expected an integer, got '" + text + "'");
  }

  void print_events(const std::vector<sim::Event>& events) {
    for (const auto& event : events) {
      out += event.line();
      out += '\n';
    }
  }

  std::string full_instance(const std::string& dep, const std::string& name) const {
    return name.find('/') == std::string::npos ? dep + "/" + name : name;
  }

  void expect(const std::string& what, const std::string& got, const std::string& want) {
    if (got != want) failed(what + ": expected " + want + ", got " + got);
    out += "ok\n";
  }

  void run_assert(const std::vector<std::string>& tokens);
  void step(const std::string& raw);
};

void Runner::run_assert(const std::vector<std::string>& tokens) {
  if (tokens.size() < 3) bail("assert needs an alias and a check");
  auto& w = require_world();
  const auto& dep_id = deployment_of(tokens[1]);
  const auto& check = tokens[2];
  const auto& dep = w.orchestrator().deployment(dep_id);
  if (check == "state") {
    if (tokens.size() != 4) bail("usage: assert <alias> state <STATE>");
    expect("state of " + dep_id, std::string(orch::state_name(dep.state)), tokens[3]);
  } else if (check == "slaves") {
    if (tokens.size() != 4) bail("usage: assert <alias> slaves <count>");
    if (!dep.plan.cluster) failed(dep_id + " has no elastic cluster");
    const auto count = w.orchestrator().live_count(dep_id, dep.plan.cluster->worker_host);
    expect("slaves of " + dep_id, std::to_string(count), tokens[3]);
  } else if (check == "instances") {
    if (tokens.size() != 4) bail("usage: assert <alias> instances <count>");
    const auto count = w.orchestrator().instances(dep_id).size();
    expect("instances of " + dep_id, std::to_string(count), tokens[3]);
  } else if (check == "jobs-done") {
    if (tokens.size() != 4) bail("usage: assert <alias> jobs-done <count>");
    std::int64_t done = 0;
    for (const auto& job : w.elasticity().jobs(dep_id)) {
      if (job.state == elastic::JobState::DONE) ++done;
    }
    expect("done jobs of " + dep_id, std::to_string(done), tokens[3]);
  } else if (check == "tasks") {
    if (tokens.size() != 5) bail("usage: assert <alias> tasks <node> <count>");
    auto it = dep.plan.assignments.find(tokens[3]);
    if (it == dep.plan.assignments.end()) failed("no assignment for node " + tokens[3]);
    expect("tasks of " + tokens[3], std::to_string(it->second.tasks.size()), tokens[4]);
  } else if (check == "preconfigured") {
    if (tokens.size() != 5) bail("usage: assert <alias> preconfigured <node> <bool>");
    auto it = dep.plan.assignments.find(tokens[3]);
    if (it == dep.plan.assignments.end()) failed("no assignment for node " + tokens[3]);
    expect("preconfigured " + tokens[3], it->second.preconfigured ? "true" : "false", tokens[4]);
  } else if (check == "placed") {
    if (tokens.size() != 5) bail("usage: assert <alias> placed <instance> <provider>");
    const auto* inst = w.cloud().find_instance(full_instance(dep_id, tokens[3]));
    if (inst == nullptr) failed("no instance " + tokens[3]);
    expect("provider of " + tokens[3], inst->provider, tokens[4]);
  } else if (check == "master") {
    if (tokens.size() != 4) bail("usage: assert <alias> master <instance>");
    std::string master;
    for (const auto* inst : w.orchestrator().instances(dep_id)) {
      if (inst->is_master) {
        if (!master.empty()) failed("more than one master in " + dep_id);
        master = inst->id;
      }
    }
    expect("master of " + dep_id, master, full_instance(dep_id, tokens[3]));
  } else if (check == "reachable") {
    if (tokens.size() != 5) bail("usage: assert <alias> reachable <a> <b>");
    const bool ok =
        w.cloud().reachable(full_instance(dep_id, tokens[3]), full_instance(dep_id, tokens[4]));
    expect("reachable " + tokens[3] + " " + tokens[4], ok ? "true" : "false", "true");
  } else if (check == "output") {
    if (tokens.size() < 5) bail("usage: assert <alias> output <name> <json>");
    const auto values = w.orchestrator().outputs(dep_id);
    auto it = values.find(tokens[3]);
    if (it == values.end()) failed("no output " + tokens[3]);
    std::string want = tokens[4];
    for (std::size_t i = 5; i < tokens.size(); ++i) want += " " + tokens[i];
    expect("output " + tokens[3], orch::value_to_plain_json_text(it->second), want);
  } else {
    bail("unknown assert check '" + check + "'");
  }
}

void Runner::step(const std::string& raw) {
  const auto tokens = tokenize(raw);
  if (tokens.empty() || tokens[0][0] == '#') return;
  out += "> ";
  out += raw;
  out += '\n';
  const auto& verb = tokens[0];
  if (verb == "providers") {
    if (tokens.size() != 2) bail("usage: providers <file>");
    if (world) bail("providers must precede all other steps");
    providers = sim::load_providers(resolve_path(tokens[1]));
    have_providers = true;
  } else if (verb == "types") {
    if (tokens.size() != 2) bail("usage: types <dir>");
    if (world) bail("types must precede submit steps");
    resolver.add_search_dir(resolve_path(tokens[1]));
  } else if (verb == "submit") {
    if (tokens.size() < 3) bail("usage: submit <alias> <template> [key=value ...]");
    ValueMap inputs;
    for (std::size_t i = 3; i < tokens.size(); ++i) {
      const auto eq = tokens[i].find('=');
      if (eq == std::string::npos) bail("inputs must look like key=value");
      inputs[tokens[i].substr(0, eq)] = Value::from_scalar(tokens[i].substr(eq + 1), false);
    }
    auto& w = require_world();
    const auto id = w.orchestrator().submit(read_file(resolve_path(tokens[2])), inputs);
    aliases[tokens[1]] = id;
    out += "submitted " + id + "\n";
  } else if (verb == "tick") {
    if (tokens.size() != 2) bail("usage: tick <n>");
    print_events(require_world().tick(static_cast<int>(to_int(tokens[1]))));
  } else if (verb == "watch") {
    if (tokens.size() != 3) bail("usage: watch <alias> <n>");
    auto& w = require_world();
    const auto& dep_id = deployment_of(tokens[1]);
    const auto n = to_int(tokens[2]);
    for (std::int64_t i = 0; i < n; ++i) {
      w.tick(1);
      const auto status = w.elasticity().status(dep_id);
      out += std::to_string(status.tick) + " " + std::to_string(status.slaves) + " " +
             std::to_string(status.pending) + " " + std::to_string(status.running) + "\n";
    }
  } else if (verb == "jobs") {
    if (tokens.size() != 5) bail("usage: jobs <alias> <count> <slots> <duration>");
    auto& w = require_world();
    const auto& dep_id = deployment_of(tokens[1]);
    const auto count = to_int(tokens[2]);
    const auto slots = to_int(tokens[3]);
    const auto duration = static_cast<int>(to_int(tokens[4]));
    std::string ids;
    for (std::int64_t i = 0; i < count; ++i) {
      if (!ids.empty()) ids += ' ';
      ids += w.elasticity().submit_job(dep_id, slots, duration);
    }
    out += "jobs " + ids + "\n";
    print_events(w.cloud().drain_events());
  } else if (verb == "scale") {
    if (tokens.size() != 4) bail("usage: scale <alias> <node> <target>");
    auto& w = require_world();
    w.orchestrator().scale(deployment_of(tokens[1]), tokens[2], to_int(tokens[3]));
    print_events(w.cloud().drain_events());
  } else if (verb == "register-image") {
    if (tokens.size() < 3) bail("usage: register-image <provider> <name> [key=value ...]");
    hot::ImageEntry entry;
    entry.name = tokens[2];
    for (std::size_t i = 3; i < tokens.size(); ++i) {
      const auto eq = tokens[i].find('=');
      if (eq == std::string::npos) bail("metadata must look like key=value");
      const auto key = tokens[i].substr(0, eq);
      const auto value = tokens[i].substr(eq + 1);
      if (key == "architecture") entry.architecture = value;
      else if (key == "type") entry.type = value;
      else if (key == "distribution") entry.distribution = value;
      else if (key == "version") entry.version = value;
      else bail("unknown image metadata key '" + key + "'");
    }
    require_world().cloud().register_image(tokens[1], entry);
  } else if (verb == "outputs") {
    if (tokens.size() != 2) bail("usage: outputs <alias>");
    auto& w = require_world();
    for (const auto& [name, value] : w.orchestrator().outputs(deployment_of(tokens[1]))) {
      out += name + " = " + orch::value_to_plain_json_text(value) + "\n";
    }
  } else if (verb == "status") {
    if (tokens.size() != 2) bail("usage: status <alias>");
    const auto& dep_id = deployment_of(tokens[1]);
    const auto& dep = require_world().orchestrator().deployment(dep_id);
    out += dep_id + " " + std::string(orch::state_name(dep.state)) + "\n";
  } else if (verb == "delete") {
    if (tokens.size() != 2) bail("usage: delete <alias>");
    auto& w = require_world();
    w.orchestrator().remove(deployment_of(tokens[1]));
    print_events(w.cloud().drain_events());
  } else if (verb == "assert") {
    run_assert(tokens);
  } else {
    bail("unknown step '" + verb + "'");
  }
}

}  // namespace

std::string run_scenario(const std::string& text, const std::filesystem::path& base_dir) {
  Runner runner;
  runner.base = base_dir;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    ++runner.line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    try {
      runner.step(line);
    } catch (const Error& ex) {
      if (ex.code() == Errc::bad_scenario || ex.code() == Errc::assert_failed) throw;
      throw Error(ex.code(), "line " + std::to_string(runner.line_no) + ": " + ex.what(),
                  ex.subject());
    }
  }
  return runner.out;
}

std::string run_scenario_file(const std::filesystem::path& path) {
  return run_scenario(read_file(path), path.parent_path());
}

}  // namespace stratus
