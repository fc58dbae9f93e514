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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace stratus {

/// A storage size with canonical byte count and the spelling it was parsed
/// from. Decimal units (kB, MB, GB, TB) are powers of 1000, binary units
/// (KiB, MiB, GiB, TiB) powers of 1024.
class ScalarSize {
 public:
  ScalarSize() = default;

  static ScalarSize from_bytes(std::uint64_t bytes);

  // Returns nullopt when the text is not a size literal ("<number> <unit>").
  static std::optional<ScalarSize> parse(std::string_view text);

  std::uint64_t bytes() const { return bytes_; }

  // The literal as written, or a canonical rendering for computed sizes.
  const std::string& str() const { return text_; }

  static std::string canonical(std::uint64_t bytes);

  bool operator==(const ScalarSize& other) const { return bytes_ == other.bytes_; }
  auto operator<=>(const ScalarSize& other) const { return bytes_ <=> other.bytes_; }

 private:
  std::uint64_t bytes_ = 0;
  std::string text_ = "0 B";
};

enum class FunctionKind { get_input, get_property, get_attribute };

std::string_view function_kind_name(FunctionKind kind);
std::optional<FunctionKind> function_kind_from(std::string_view name);

/// An unevaluated TOSCA intrinsic, e.g. {get_attribute: [master_server, public_address]}.
struct FunctionExpr {
  FunctionKind kind = FunctionKind::get_input;
  std::vector<std::string> args;

  bool operator==(const FunctionExpr&) const = default;
};

class Value;
using ValueList = std::vector<Value>;
using ValueMap = std::map<std::string, Value>;

/// Closed value union used throughout the model: null, bool, integer, float,
/// string, ScalarSize, list, map, or an unevaluated FunctionExpr.
class Value {
 public:
  Value() = default;
  Value(bool b) : v_(b) {}
  Value(std::int64_t i) : v_(i) {}
  Value(int i) : v_(static_cast<std::int64_t>(i)) {}
  Value(double d) : v_(d) {}
  Value(const char* s) : v_(std::string(s)) {}
  Value(std::string s) : v_(std::move(s)) {}
  Value(ScalarSize s) : v_(std::move(s)) {}
  Value(FunctionExpr f) : v_(std::move(f)) {}
  Value(ValueList l) : v_(std::move(l)) {}
  Value(ValueMap m) : v_(std::move(m)) {}

  bool is_null() const { return std::holds_alternative<std::monostate>(v_); }
  bool is_bool() const { return std::holds_alternative<bool>(v_); }
  bool is_int() const { return std::holds_alternative<std::int64_t>(v_); }
  bool is_float() const { return std::holds_alternative<double>(v_); }
  bool is_string() const { return std::holds_alternative<std::string>(v_); }
  bool is_size() const { return std::holds_alternative<ScalarSize>(v_); }
  bool is_function() const { return std::holds_alternative<FunctionExpr>(v_); }
  bool is_list() const { return std::holds_alternative<ValueList>(v_); }
  bool is_map() const { return std::holds_alternative<ValueMap>(v_); }
  bool is_number() const { return is_int() || is_float(); }

  bool as_bool() const { return std::get<bool>(v_); }
  std::int64_t as_int() const { return std::get<std::int64_t>(v_); }
  double as_float() const { return std::get<double>(v_); }
  const std::string& as_string() const { return std::get<std::string>(v_); }
  const ScalarSize& as_size() const { return std::get<ScalarSize>(v_); }
  const FunctionExpr& as_function() const { return std::get<FunctionExpr>(v_); }
  const ValueList& as_list() const { return std::get<ValueList>(v_); }
  const ValueMap& as_map() const { return std::get<ValueMap>(v_); }
  ValueList& as_list() { return std::get<ValueList>(v_); }
  ValueMap& as_map() { return std::get<ValueMap>(v_); }

  double as_number() const { return is_int() ? static_cast<double>(as_int()) : as_float(); }

  // Scalar from YAML plain/quoted text: bools, integers, floats and size
  // literals are sniffed from plain scalars; quoted scalars stay strings.
  static Value from_scalar(const std::string& raw, bool quoted);

  std::string_view type_name() const;

  // Canonical text for scalar comparison and porcelain output (shortest
  // round-trip float form; sizes render their literal).
  std::string scalar_string() const;

  // True if this value or any nested element is a FunctionExpr.
  bool contains_function() const;

  bool operator==(const Value&) const = default;

 private:
  std::variant<std::monostate, bool, std::int64_t, double, std::string,
               ScalarSize, FunctionExpr, ValueList, ValueMap>
      v_;
};

/// Canonical single-document YAML rendering of a value tree: two-space
/// indentation, sorted map keys, flow style for empty containers. Used by the
/// HOT serializer and porcelain output; byte-stable by construction.
void emit_yaml(std::string& out, const Value& value, int indent);

std::string to_yaml(const Value& value);

}  // namespace stratus
