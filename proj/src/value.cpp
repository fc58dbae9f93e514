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

#include "stratus/value.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <stdexcept>

#include "stratus/error.hpp"

namespace stratus {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::syntax_error: return "SyntaxError";
    case Errc::unsupported_version: return "UnsupportedVersion";
    case Errc::unknown_type: return "UnknownType";
    case Errc::cyclic_derivation: return "CyclicDerivation";
    case Errc::incompatible_operand: return "IncompatibleOperand";
    case Errc::unknown_reference: return "UnknownReference";
    case Errc::attribute_unavailable: return "AttributeUnavailable";
    case Errc::unresolved_import: return "UnresolvedImport";
    case Errc::duplicate_type_conflict: return "DuplicateTypeConflict";
    case Errc::duplicate_node: return "DuplicateNode";
    case Errc::dangling_requirement: return "DanglingRequirement";
    case Errc::cyclic_topology: return "CyclicTopology";
    case Errc::validation_failed: return "ValidationFailed";
    case Errc::no_matching_flavor: return "NoMatchingFlavor";
    case Errc::no_matching_image: return "NoMatchingImage";
    case Errc::ambiguous_image: return "AmbiguousImage";
    case Errc::untranslatable_node: return "UntranslatableNode";
    case Errc::quota_exceeded: return "QuotaExceeded";
    case Errc::no_such_image: return "NoSuchImage";
    case Errc::no_such_flavor: return "NoSuchFlavor";
    case Errc::duplicate_image: return "DuplicateImage";
    case Errc::no_public_address: return "NoPublicAddressAvailable";
    case Errc::unknown_instance: return "UnknownInstance";
    case Errc::unknown_provider: return "UnknownProvider";
    case Errc::auth_failed: return "AuthFailed";
    case Errc::store_unavailable: return "StoreUnavailable";
    case Errc::no_capable_provider: return "NoCapableProvider";
    case Errc::backend_rejected: return "BackendRejected";
    case Errc::out_of_bounds: return "OutOfBounds";
    case Errc::unknown_deployment: return "UnknownDeployment";
    case Errc::invalid_state: return "InvalidState";
    case Errc::unknown_cluster: return "UnknownCluster";
    case Errc::slots_exceed_capacity: return "SlotsExceedSlaveCapacity";
    case Errc::bad_config: return "BadConfig";
    case Errc::bad_scenario: return "BadScenario";
    case Errc::assert_failed: return "AssertFailed";
    case Errc::io_error: return "IoError";
  }
  return "Error";
}

int errc_exit_code(Errc code) {
  switch (code) {
    case Errc::no_such_image:
    case Errc::no_such_flavor:
    case Errc::unknown_instance:
    case Errc::unknown_provider:
    case Errc::unknown_deployment:
    case Errc::unknown_cluster:
      return 4;
    case Errc::quota_exceeded:
    case Errc::no_public_address:
    case Errc::auth_failed:
    case Errc::store_unavailable:
    case Errc::no_capable_provider:
    case Errc::backend_rejected:
    case Errc::attribute_unavailable:
    case Errc::io_error:
      return 3;
    default:
      return 2;
  }
}

namespace {

struct Unit {
  std::string_view suffix;
  std::uint64_t factor;
};

// Longest suffixes first so "KiB" is not matched as "B".
constexpr std::array<Unit, 9> kUnits = {{
    {"KiB", 1024ull},
    {"MiB", 1024ull * 1024},
    {"GiB", 1024ull * 1024 * 1024},
    {"TiB", 1024ull * 1024 * 1024 * 1024},
    {"kB", 1000ull},
    {"MB", 1000ull * 1000},
    {"GB", 1000ull * 1000 * 1000},
    {"TB", 1000ull * 1000 * 1000 * 1000},
    {"B", 1ull},
}};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string format_double(double d) {
  std::array<char, 64> buf;
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), d);
  if (ec != std::errc()) throw Error(Errc::io_error, "cannot format float");
  return std::string(buf.data(), ptr);
}

}  // namespace

ScalarSize ScalarSize::from_bytes(std::uint64_t bytes) {
  ScalarSize s;
  s.bytes_ = bytes;
  s.text_ = canonical(bytes);
  return s;
}

std::string ScalarSize::canonical(std::uint64_t bytes) {
  // Largest decimal unit that divides evenly, bytes otherwise.
  for (auto unit : {kUnits[7], kUnits[6], kUnits[5], kUnits[4]}) {
    if (bytes >= unit.factor && bytes % unit.factor == 0)
      return std::to_string(bytes / unit.factor) + " " + std::string(unit.suffix);
  }
  return std::to_string(bytes) + " B";
}

std::optional<ScalarSize> ScalarSize::parse(std::string_view text) {
  std::string_view body = trim(text);
  const Unit* unit = nullptr;
  for (const auto& u : kUnits) {
    if (body.size() > u.suffix.size() && body.ends_with(u.suffix)) {
      unit = &u;
      body.remove_suffix(u.suffix.size());
      break;
    }
  }
  if (unit == nullptr) return std::nullopt;
  // Exactly one space separates magnitude and unit.
  if (body.empty() || body.back() != ' ') return std::nullopt;
  body.remove_suffix(1);
  std::string_view number = body;
  if (number.empty() || number != trim(number)) return std::nullopt;
  double magnitude = 0;
  auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), magnitude);
  if (ec != std::errc() || ptr != number.data() + number.size()) return std::nullopt;
  if (magnitude < 0) return std::nullopt;
  ScalarSize s;
  s.bytes_ = static_cast<std::uint64_t>(magnitude * static_cast<double>(unit->factor) + 0.5);
  s.text_ = std::string(trim(text));
  return s;
}

std::string_view function_kind_name(FunctionKind kind) {
  switch (kind) {
    case FunctionKind::get_input: return "get_input";
    case FunctionKind::get_property: return "get_property";
    case FunctionKind::get_attribute: return "get_attribute";
  }
  return "get_input";
}

std::optional<FunctionKind> function_kind_from(std::string_view name) {
  if (name == "get_input") return FunctionKind::get_input;
  if (name == "get_property") return FunctionKind::get_property;
  if (name == "get_attribute") return FunctionKind::get_attribute;
  return std::nullopt;
}

Value Value::from_scalar(const std::string& raw, bool quoted) {
  if (quoted) return Value(raw);
  if (raw == "null" || raw == "~" || raw.empty()) return Value();
  if (raw == "true") return Value(true);
  if (raw == "false") return Value(false);
  {
    std::int64_t i = 0;
    auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), i);
    if (ec == std::errc() && ptr == raw.data() + raw.size()) return Value(i);
  }
  {
    double d = 0;
    auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), d);
    if (ec == std::errc() && ptr == raw.data() + raw.size()) return Value(d);
  }
  if (auto size = ScalarSize::parse(raw)) return Value(*size);
  return Value(raw);
}

std::string_view Value::type_name() const {
  switch (v_.index()) {
    case 0: return "null";
    case 1: return "boolean";
    case 2: return "integer";
    case 3: return "float";
    case 4: return "string";
    case 5: return "scalar-unit.size";
    case 6: return "function";
    case 7: return "list";
    case 8: return "map";
  }
  return "null";
}

std::string Value::scalar_string() const {
  if (is_null()) return "null";
  if (is_bool()) return as_bool() ? "true" : "false";
  if (is_int()) return std::to_string(as_int());
  if (is_float()) return format_double(as_float());
  if (is_string()) return as_string();
  if (is_size()) return as_size().str();
  if (is_function()) {
    std::string out(function_kind_name(as_function().kind));
    for (const auto& a : as_function().args) out += " " + a;
    return out;
  }
  throw Error(Errc::incompatible_operand, "not a scalar: " + std::string(type_name()));
}

bool Value::contains_function() const {
  if (is_function()) return true;
  if (is_list()) {
    return std::any_of(as_list().begin(), as_list().end(),
                       [](const Value& v) { return v.contains_function(); });
  }
  if (is_map()) {
    return std::any_of(as_map().begin(), as_map().end(),
                       [](const auto& kv) { return kv.second.contains_function(); });
  }
  return false;
}

namespace {

bool plain_scalar_safe(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' ||
              c == '/' || c == ':' || c == '-' || c == ' ';
    if (!ok) return false;
  }
  if (s.front() == ' ' || s.back() == ' ' || s.front() == '-') return false;
  if (s.find(": ") != std::string::npos || s.ends_with(":")) return false;
  // Would re-parse as a different type; quote to keep it a string.
  const Value sniffed = Value::from_scalar(s, false);
  return sniffed.is_string();
}

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    out += c;
    if (c == '\'') out += '\'';
  }
  out += '\'';
  return out;
}

std::string scalar_yaml(const Value& v) {
  if (v.is_string()) {
    return plain_scalar_safe(v.as_string()) ? v.as_string() : quote(v.as_string());
  }
  if (v.is_size()) return quote(v.as_size().str());
  return v.scalar_string();
}

void indent_to(std::string& out, int indent) { out.append(static_cast<size_t>(indent) * 2, ' '); }

}  // namespace

void emit_yaml(std::string& out, const Value& value, int indent) {
  if (value.is_map()) {
    if (value.as_map().empty()) {
      out += "{}\n";
      return;
    }
    for (const auto& [key, child] : value.as_map()) {
      indent_to(out, indent);
      out += plain_scalar_safe(key) ? key : quote(key);
      out += ":";
      if (child.is_map() && !child.as_map().empty()) {
        out += "\n";
        emit_yaml(out, child, indent + 1);
      } else if (child.is_list() && !child.as_list().empty()) {
        out += "\n";
        emit_yaml(out, child, indent + 1);
      } else if (child.is_map() || child.is_list()) {
        out += child.is_map() ? " {}\n" : " []\n";
      } else {
        out += " " + scalar_yaml(child) + "\n";
      }
    }
    return;
  }
  if (value.is_list()) {
    if (value.as_list().empty()) {
      out += "[]\n";
      return;
    }
    for (const auto& item : value.as_list()) {
      indent_to(out, indent);
      out += "-";
      if (item.is_map() && !item.as_map().empty()) {
        // First key inline with the dash, remaining keys below.
        out += " ";
        bool first = true;
        for (const auto& [key, child] : item.as_map()) {
          if (!first) indent_to(out, indent + 1);
          first = false;
          out += plain_scalar_safe(key) ? key : quote(key);
          out += ":";
          if ((child.is_map() && !child.as_map().empty()) ||
              (child.is_list() && !child.as_list().empty())) {
            out += "\n";
            emit_yaml(out, child, indent + 2);
          } else if (child.is_map() || child.is_list()) {
            out += child.is_map() ? " {}\n" : " []\n";
          } else {
            out += " " + scalar_yaml(child) + "\n";
          }
        }
      } else if (item.is_list() && !item.as_list().empty()) {
        out += "\n";
        emit_yaml(out, item, indent + 1);
      } else if (item.is_map() || item.is_list()) {
        out += item.is_map() ? " {}\n" : " []\n";
      } else {
        out += " " + scalar_yaml(item) + "\n";
      }
    }
    return;
  }
  indent_to(out, indent);
  out += scalar_yaml(value) + "\n";
}

std::string to_yaml(const Value& value) {
  std::string out;
  emit_yaml(out, value, 0);
  return out;
}

}  // namespace stratus
