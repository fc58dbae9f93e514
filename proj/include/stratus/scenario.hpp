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
// Line-oriented scenario scripts: a fresh in-memory world per run, one step
// per line, byte-stable output. Used for replayable end-to-end flows and the
// golden files under tests/.
//
//   providers <file>            configure the simulated providers (required first)
//   types <dir>                 add an import search directory
//   submit <alias> <template> [key=value ...]
//   tick <n>                    advance the clock, print simulator events
//   watch <alias> <n>           advance, printing "tick slaves pending running"
//   jobs <alias> <count> <slots> <duration>
//   scale <alias> <node> <target>
//   register-image <provider> <name> [key=value ...]
//   outputs <alias>
//   status <alias>
//   delete <alias>
//   assert <alias> <check> ...
//
// Relative paths resolve against the scenario file's directory.

#pragma once

#include <filesystem>
#include <string>

namespace stratus {

std::string run_scenario(const std::string& text, const std::filesystem::path& base_dir);
std::string run_scenario_file(const std::filesystem::path& path);

}  // namespace stratus
