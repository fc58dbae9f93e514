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
// Command-line front end: template validation and translation offline, plus
// the full deployment lifecycle against a persisted simulated world.

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "stratus/error.hpp"
#include "stratus/hot/hot.hpp"
#include "stratus/hot/translate.hpp"
#include "stratus/orch/store.hpp"
#include "stratus/scenario.hpp"
#include "stratus/tosca/graph.hpp"
#include "stratus/world.hpp"

namespace {

using namespace stratus;

struct GlobalOpts {
  std::string providers_path;
  std::string state_dir;
  std::vector<std::string> types_dirs;
  std::string token;
  bool porcelain = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

tosca::ImportResolver make_resolver(const GlobalOpts& opts) {
  tosca::ImportResolver resolver;
  resolver.add_search_dir(std::filesystem::current_path());
  for (const auto& dir : opts.types_dirs) resolver.add_search_dir(dir);
  return resolver;
}

std::unique_ptr<World> make_world(const GlobalOpts& opts) {
  if (opts.state_dir.empty()) {
    throw Error(Errc::bad_config, "a state directory is required (--state-dir or STRATUS_STATE_DIR)");
  }
  WorldOptions options;
  if (!opts.providers_path.empty()) options.providers = sim::load_providers(opts.providers_path);
  options.resolver = make_resolver(opts);
  options.auth_token = opts.token;
  options.state_dir = opts.state_dir;
  return std::make_unique<World>(std::move(options));
}

ValueMap parse_inputs(const std::vector<std::string>& pairs) {
  ValueMap inputs;
  for (const auto& pair : pairs) {
    const auto eq = pair.find('=');
    if (eq == std::string::npos) {
      throw Error(Errc::bad_config, "inputs must look like key=value: " + pair);
    }
    inputs[pair.substr(0, eq)] = Value::from_scalar(pair.substr(eq + 1), false);
  }
  return inputs;
}

void print_events(const std::vector<sim::Event>& events) {
  for (const auto& event : events) std::cout << event.line() << "\n";
}

int cmd_validate(const GlobalOpts& opts, const std::string& path) {
  const auto report = tosca::validate_document(read_file(path), make_resolver(opts));
  const char* sep = opts.porcelain ? "\t" : ": ";
  for (const auto& finding : report.warnings) {
    std::cout << "warning" << sep << finding.node << sep << finding.rule << sep << finding.message
              << "\n";
  }
  for (const auto& finding : report.errors) {
    std::cout << "error" << sep << finding.node << sep << finding.rule << sep << finding.message
              << "\n";
  }
  if (!report.ok()) {
    throw Error(Errc::validation_failed,
                path + ": " + std::to_string(report.errors.size()) + " error(s)");
  }
  if (!opts.porcelain) std::cout << "OK " << path << "\n";
  return 0;
}

int cmd_translate(const GlobalOpts& opts, const std::string& path, const std::string& flavor_path,
                  const std::string& image_path, const std::vector<std::string>& input_pairs,
                  const std::string& out_path) {
  const auto text = read_file(path);
  const auto resolver = make_resolver(opts);
  auto tmpl = tosca::parse_service_template(text);
  auto registry = tosca::resolve_imports(tmpl, resolver);
  auto graph = tosca::build_graph(tmpl, registry);
  const auto report = tosca::validate(graph);
  if (!report.ok()) {
    std::string message = path + ": " + std::to_string(report.errors.size()) + " error(s)";
    for (const auto& finding : report.errors) {
      message += "; " + finding.node + ": " + finding.message;
    }
    throw Error(Errc::validation_failed, message);
  }
  const auto flavors =
      flavor_path.empty() ? hot::default_flavor_catalog() : hot::load_flavor_catalog(flavor_path);
  const auto images =
      image_path.empty() ? hot::default_image_catalog() : hot::load_image_catalog(image_path);
  hot::TranslateOptions options;
  options.inputs = parse_inputs(input_pairs);
  const auto hot_text = hot::serialize_hot(hot::translate(graph, flavors, images, options));
  if (out_path.empty()) {
    std::cout << hot_text;
  } else {
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) throw Error(Errc::io_error, "cannot write " + out_path);
    out << hot_text;
  }
  return 0;
}

int cmd_status(const GlobalOpts& opts, const std::string& id, bool with_log) {
  auto world = make_world(opts);
  const auto& dep = world->orchestrator().deployment(id);
  const char* sep = opts.porcelain ? "\t" : " ";
  std::cout << "deployment" << sep << dep.id << sep << orch::state_name(dep.state) << sep
            << (dep.plan.provider.empty() ? "-" : dep.plan.provider) << "\n";
  if (!dep.failure_reason.empty()) std::cout << "failure" << sep << dep.failure_reason << "\n";
  for (const auto* inst : world->orchestrator().instances(id)) {
    std::cout << "instance" << sep << inst->id << sep << sim::instance_state_name(inst->state)
              << sep << inst->provider << sep << inst->flavor << sep << inst->image << sep
              << (inst->public_address ? *inst->public_address : "-") << sep
              << inst->private_address << sep << inst->runtime << "\n";
  }
  if (with_log) {
    for (const auto& record : dep.log) {
      std::cout << "log" << sep << record.seq << sep << record.tick << sep << record.from << sep
                << record.to << sep << (record.note.empty() ? "-" : record.note) << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TOSCA orchestration against simulated heterogeneous clouds"};
  app.require_subcommand(1);

  GlobalOpts opts;
  app.add_option("--providers", opts.providers_path, "Provider config YAML")
      ->envname("STRATUS_PROVIDERS");
  app.add_option("--state-dir", opts.state_dir, "State directory for persisted worlds")
      ->envname("STRATUS_STATE_DIR");
  app.add_option("--types", opts.types_dirs, "Import search directory (repeatable)")
      ->envname("STRATUS_TYPES");
  app.add_option("--token", opts.token, "Authentication token")->envname("STRATUS_AUTH_TOKEN");
  app.add_flag("--porcelain", opts.porcelain, "Tab-separated machine-readable output");

  int rc = 0;
  const auto run = [&rc](auto&& fn) { return [&rc, fn]() { rc = fn(); }; };

  // validate
  std::string tmpl_path;
  auto* validate = app.add_subcommand("validate", "Validate a TOSCA template");
  validate->add_option("template", tmpl_path, "Template file")->required();
  validate->callback(run([&]() { return cmd_validate(opts, tmpl_path); }));

  // translate
  std::string flavor_path, image_path, out_path;
  std::vector<std::string> input_pairs;
  auto* translate = app.add_subcommand("translate", "Translate a TOSCA template to HOT");
  translate->add_option("template", tmpl_path, "Template file")->required();
  translate->add_option("--flavor-catalog", flavor_path, "Flavor catalog YAML");
  translate->add_option("--image-catalog", image_path, "Image catalog YAML");
  translate->add_option("--input", input_pairs, "Template input key=value (repeatable)");
  translate->add_option("-o,--output", out_path, "Write the HOT document here");
  translate->callback(run([&]() {
    return cmd_translate(opts, tmpl_path, flavor_path, image_path, input_pairs, out_path);
  }));

  // submit
  auto* submit = app.add_subcommand("submit", "Submit a deployment");
  submit->add_option("template", tmpl_path, "Template file")->required();
  submit->add_option("--input", input_pairs, "Template input key=value (repeatable)");
  submit->callback(run([&]() {
    auto world = make_world(opts);
    const auto id =
        world->orchestrator().submit(read_file(tmpl_path), parse_inputs(input_pairs), opts.token);
    world->save();
    std::cout << id << "\n";
    return 0;
  }));

  // status
  std::string dep_id;
  bool with_log = false;
  auto* status = app.add_subcommand("status", "Show a deployment");
  status->add_option("id", dep_id, "Deployment id")->required();
  status->add_flag("--log", with_log, "Include the transition log");
  status->callback(run([&]() { return cmd_status(opts, dep_id, with_log); }));

  // outputs
  auto* outputs = app.add_subcommand("outputs", "Resolve deployment outputs");
  outputs->add_option("id", dep_id, "Deployment id")->required();
  outputs->callback(run([&]() {
    auto world = make_world(opts);
    for (const auto& [name, value] : world->orchestrator().outputs(dep_id)) {
      if (opts.porcelain) {
        std::cout << name << "\t" << orch::value_to_plain_json_text(value) << "\n";
      } else {
        std::cout << name << " = " << orch::value_to_plain_json_text(value) << "\n";
      }
    }
    return 0;
  }));

  // scale
  std::string node;
  std::int64_t target = 0;
  std::vector<std::string> victims;
  auto* scale = app.add_subcommand("scale", "Scale a node to a target instance count");
  scale->add_option("id", dep_id, "Deployment id")->required();
  scale->add_option("node", node, "Node template name")->required();
  scale->add_option("target", target, "Target instance count")->required();
  scale->add_option("--victim", victims, "Instance to remove when shrinking (repeatable)");
  scale->callback(run([&]() {
    auto world = make_world(opts);
    world->orchestrator().scale(dep_id, node, target, victims, opts.token);
    world->save();
    print_events(world->cloud().drain_events());
    return 0;
  }));

  // delete
  auto* del = app.add_subcommand("delete", "Delete a deployment");
  del->add_option("id", dep_id, "Deployment id")->required();
  del->callback(run([&]() {
    auto world = make_world(opts);
    world->orchestrator().remove(dep_id, opts.token);
    world->save();
    print_events(world->cloud().drain_events());
    return 0;
  }));

  // tick
  int ticks = 1;
  auto* tick = app.add_subcommand("tick", "Advance the logical clock");
  tick->add_option("n", ticks, "Number of ticks (default 1)");
  tick->callback(run([&]() {
    auto world = make_world(opts);
    print_events(world->tick(ticks));
    world->save();
    return 0;
  }));

  // providers list
  auto* providers = app.add_subcommand("providers", "Provider operations");
  providers->require_subcommand(1);
  auto* providers_list = providers->add_subcommand("list", "List providers and quota usage");
  providers_list->callback(run([&]() {
    auto world = make_world(opts);
    const char* sep = opts.porcelain ? "\t" : " ";
    for (const auto& id : world->cloud().provider_ids()) {
      const auto& cfg = world->cloud().provider(id);
      const auto used = world->cloud().usage(id);
      std::cout << "provider" << sep << id << sep << sim::backend_kind_name(cfg.backend) << sep
                << "rank=" << cfg.sla_rank << sep << "vms=" << used.vms << "/" << cfg.max_vms
                << sep << "vcpus=" << used.vcpus << "/" << cfg.max_vcpus << sep
                << "mem=" << ScalarSize::from_bytes(used.mem_bytes).str() << "/"
                << cfg.max_mem.str() << sep << "runtime=" << cfg.runtime << sep
                << "images=" << cfg.images.entries.size() << "\n";
    }
    return 0;
  }));

  // images register
  std::string provider_id, image_name;
  hot::ImageEntry image_entry;
  auto* images = app.add_subcommand("images", "Image catalog operations");
  images->require_subcommand(1);
  auto* images_register = images->add_subcommand("register", "Register an image on a provider");
  images_register->add_option("provider", provider_id, "Provider id")->required();
  images_register->add_option("name", image_name, "Image name")->required();
  images_register->add_option("--architecture", image_entry.architecture, "Architecture");
  images_register->add_option("--type", image_entry.type, "OS type");
  images_register->add_option("--distribution", image_entry.distribution, "OS distribution");
  images_register->add_option("--version", image_entry.version, "OS version");
  images_register->callback(run([&]() {
    auto world = make_world(opts);
    image_entry.name = image_name;
    world->cloud().register_image(provider_id, image_entry);
    world->save();
    std::cout << "registered " << image_name << " on " << provider_id << "\n";
    return 0;
  }));

  // jobs
  std::int64_t job_slots = 1;
  int job_duration = 4;
  int job_count = 1;
  auto* jobs = app.add_subcommand("jobs", "Cluster job queue operations");
  jobs->require_subcommand(1);
  auto* jobs_submit = jobs->add_subcommand("submit", "Queue batch jobs on a cluster");
  jobs_submit->add_option("id", dep_id, "Deployment id")->required();
  jobs_submit->add_option("--slots", job_slots, "Slots per job (default 1)");
  jobs_submit->add_option("--duration", job_duration, "Work ticks per job (default 4)");
  jobs_submit->add_option("--count", job_count, "Number of jobs (default 1)");
  jobs_submit->callback(run([&]() {
    auto world = make_world(opts);
    for (int i = 0; i < job_count; ++i) {
      std::cout << world->elasticity().submit_job(dep_id, job_slots, job_duration) << "\n";
    }
    world->save();
    return 0;
  }));
  auto* jobs_list = jobs->add_subcommand("list", "List a cluster's jobs");
  jobs_list->add_option("id", dep_id, "Deployment id")->required();
  jobs_list->callback(run([&]() {
    auto world = make_world(opts);
    const char* sep = opts.porcelain ? "\t" : " ";
    for (const auto& job : world->elasticity().jobs(dep_id)) {
      std::cout << "job" << sep << job.id << sep << elastic::job_state_name(job.state) << sep
                << "slots=" << job.slots << sep << "remaining=" << job.remaining << sep
                << (job.instance.empty() ? "-" : job.instance) << "\n";
    }
    return 0;
  }));

  // cluster watch
  int watch_ticks = 10;
  auto* cluster = app.add_subcommand("cluster", "Elastic cluster operations");
  cluster->require_subcommand(1);
  auto* cluster_watch =
      cluster->add_subcommand("watch", "Advance the clock, reporting cluster counters per tick");
  cluster_watch->add_option("id", dep_id, "Deployment id")->required();
  cluster_watch->add_option("--ticks", watch_ticks, "Ticks to watch (default 10)");
  cluster_watch->callback(run([&]() {
    auto world = make_world(opts);
    for (int i = 0; i < watch_ticks; ++i) {
      world->tick(1);
      const auto s = world->elasticity().status(dep_id);
      std::cout << s.tick << " " << s.slaves << " " << s.pending << " " << s.running << "\n";
    }
    world->save();
    return 0;
  }));

  // scenario run
  std::string scenario_path;
  auto* scenario = app.add_subcommand("scenario", "Scripted end-to-end runs");
  scenario->require_subcommand(1);
  auto* scenario_run = scenario->add_subcommand("run", "Run a scenario script");
  scenario_run->add_option("file", scenario_path, "Scenario file")->required();
  scenario_run->callback(run([&]() {
    std::cout << run_scenario_file(scenario_path);
    return 0;
  }));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    if (ex.get_exit_code() == 0) return app.exit(ex);
    app.exit(ex);
    return 2;
  } catch (const Error& ex) {
    std::cerr << "error: " << ex.what() << " [" << errc_name(ex.code()) << "]\n";
    return errc_exit_code(ex.code());
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 3;
  }
  return rc;
}
