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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stratus {

enum class Errc {
  // template / model
  syntax_error,
  unsupported_version,
  unknown_type,
  cyclic_derivation,
  incompatible_operand,
  unknown_reference,
  attribute_unavailable,
  unresolved_import,
  duplicate_type_conflict,
  duplicate_node,
  dangling_requirement,
  cyclic_topology,
  validation_failed,
  // translation
  no_matching_flavor,
  no_matching_image,
  ambiguous_image,
  untranslatable_node,
  // simulator
  quota_exceeded,
  no_such_image,
  no_such_flavor,
  duplicate_image,
  no_public_address,
  unknown_instance,
  unknown_provider,
  // orchestrator
  auth_failed,
  store_unavailable,
  no_capable_provider,
  backend_rejected,
  out_of_bounds,
  unknown_deployment,
  invalid_state,
  // elasticity
  unknown_cluster,
  slots_exceed_capacity,
  // cli / scenario
  bad_config,
  bad_scenario,
  assert_failed,
  io_error,
};

std::string_view errc_name(Errc code);

// Exit-code classes used by the CLI: 2 user/validation, 3 backend, 4 unknown entity.
int errc_exit_code(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}
  Error(Errc code, std::string message, std::string subject)
      : std::runtime_error(std::move(message)),
        code_(code),
        subject_(std::move(subject)) {}

  Errc code() const { return code_; }

  // The entity the error is about (node name, provider id, ...). May be empty.
  const std::string& subject() const { return subject_; }

 private:
  Errc code_;
  std::string subject_;
};

}  // namespace stratus
