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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdint>
#include <random>
#include <string>

#include "stratus/error.hpp"
#include "stratus/value.hpp"

using namespace stratus;

TEST_CASE("size literals parse to exact byte counts") {
  struct Row {
    const char* text;
    std::uint64_t bytes;
  };
  // Decimal units are powers of 1000, binary units powers of 1024.
  const Row rows[] = {
      {"1 B", 1},
      {"1 kB", 1000},
      {"1 KiB", 1024},
      {"1 MB", 1000u * 1000},
      {"1 MiB", 1024u * 1024},
      {"1 GB", 1000ull * 1000 * 1000},
      {"1 GiB", 1024ull * 1024 * 1024},
      {"2 TB", 2000ull * 1000 * 1000 * 1000},
      {"1 TiB", 1024ull * 1024 * 1024 * 1024},
      {"512 MB", 512000000ull},
      {"10 GB", 10000000000ull},
      {"1.5 GB", 1500000000ull},
      {"0.5 KiB", 512},
      {"0 B", 0},
  };
  for (const auto& row : rows) {
    CAPTURE(row.text);
    auto parsed = ScalarSize::parse(row.text);
    REQUIRE(parsed.has_value());
    CHECK(parsed->bytes() == row.bytes);
    CHECK(parsed->str() == row.text);
  }
}

TEST_CASE("size literals require a single space before a known unit") {
  const char* bad[] = {
      "12",      // no unit
      "10GB",    // missing space
      "10  GB",  // two spaces
      "-1 GB",   // negative
      "GB",      // no magnitude
      " GB",     // still no magnitude
      "10 XB",   // unknown unit
      "10 gb",   // unit case matters
      "1 0 GB",  // magnitude is not a number
      "",
  };
  for (const char* text : bad) {
    CAPTURE(text);
    CHECK_FALSE(ScalarSize::parse(text).has_value());
  }
}

TEST_CASE("size parse trims surrounding whitespace but keeps the spelling") {
  auto parsed = ScalarSize::parse("  4 GB \n");
  REQUIRE(parsed.has_value());
  CHECK(parsed->bytes() == 4000000000ull);
  CHECK(parsed->str() == "4 GB");
}

TEST_CASE("sizes compare by byte count regardless of spelling") {
  auto decimal = ScalarSize::parse("1 kB");
  auto binary = ScalarSize::parse("1 KiB");
  REQUIRE(decimal);
  REQUIRE(binary);
  CHECK(*decimal < *binary);
  CHECK(*ScalarSize::parse("1024 B") == *binary);
  CHECK(*ScalarSize::parse("2 GB") > *ScalarSize::parse("1 GiB"));
}

TEST_CASE("canonical rendering picks the largest even decimal unit") {
  CHECK(ScalarSize::canonical(0) == "0 B");
  CHECK(ScalarSize::canonical(999) == "999 B");
  CHECK(ScalarSize::canonical(1000) == "1 kB");
  CHECK(ScalarSize::canonical(1024) == "1024 B");
  CHECK(ScalarSize::canonical(1500000000) == "1500 MB");
  CHECK(ScalarSize::canonical(2000000000000) == "2 TB");
  CHECK(ScalarSize::canonical(512000000) == "512 MB");
  CHECK(ScalarSize::from_bytes(1073741824).str() == "1073741824 B");
}

TEST_CASE("plain scalars sniff into typed values") {
  CHECK(Value::from_scalar("true", false).is_bool());
  CHECK(Value::from_scalar("false", false).as_bool() == false);
  CHECK(Value::from_scalar("null", false).is_null());
  CHECK(Value::from_scalar("~", false).is_null());
  CHECK(Value::from_scalar("", false).is_null());

  Value i = Value::from_scalar("512", false);
  REQUIRE(i.is_int());
  CHECK(i.as_int() == 512);

  Value f = Value::from_scalar("14.04", false);
  REQUIRE(f.is_float());
  CHECK(f.as_float() == doctest::Approx(14.04));

  Value size = Value::from_scalar("10 GB", false);
  REQUIRE(size.is_size());
  CHECK(size.as_size().bytes() == 10000000000ull);

  Value s = Value::from_scalar("PUBLIC", false);
  REQUIRE(s.is_string());
  CHECK(s.as_string() == "PUBLIC");
}

TEST_CASE("quoted scalars always stay strings") {
  CHECK(Value::from_scalar("true", true).is_string());
  CHECK(Value::from_scalar("512", true).is_string());
  CHECK(Value::from_scalar("14.04", true).is_string());
  CHECK(Value::from_scalar("10 GB", true).is_string());
  CHECK(Value::from_scalar("", true).is_string());
}

TEST_CASE("scalar_string renders floats in shortest round-trip form") {
  CHECK(Value(6.5).scalar_string() == "6.5");
  CHECK(Value::from_scalar("14.04", false).scalar_string() == "14.04");
  CHECK(Value(static_cast<std::int64_t>(42)).scalar_string() == "42");
  CHECK(Value(true).scalar_string() == "true");
  CHECK(Value().scalar_string() == "null");
  CHECK(Value("hello").scalar_string() == "hello");
  CHECK(Value(*ScalarSize::parse("2 GB")).scalar_string() == "2 GB");
  CHECK_THROWS_AS(Value(ValueList{}).scalar_string(), Error);
}

TEST_CASE("contains_function sees through nesting") {
  Value plain(ValueMap{{"a", Value(1)}, {"b", Value(ValueList{Value("x")})}});
  CHECK_FALSE(plain.contains_function());

  FunctionExpr fn{FunctionKind::get_attribute, {"master_server", "public_address"}};
  Value nested(ValueMap{{"outer", Value(ValueList{Value(ValueMap{{"ip", Value(fn)}})})}});
  CHECK(nested.contains_function());
  CHECK(Value(fn).contains_function());
}

TEST_CASE("yaml rendering sorts keys and uses flow style for empty containers") {
  Value doc(ValueMap{
      {"zeta", Value(1)},
      {"alpha", Value(ValueMap{})},
      {"mid", Value(ValueList{})},
  });
  CHECK(to_yaml(doc) ==
        "alpha: {}\n"
        "mid: []\n"
        "zeta: 1\n");
}

TEST_CASE("yaml rendering quotes strings that would re-parse as another type") {
  Value doc(ValueMap{
      {"version", Value("14.04")},
      {"flag", Value("true")},
      {"name", Value("ubuntu-14.04-vanilla")},
      {"size", Value(*ScalarSize::parse("10 GB"))},
      {"empty", Value(std::string())},
      {"colon", Value("a: b")},
      {"dash", Value("-lead")},
      {"apos", Value("it's")},
  });
  CHECK(to_yaml(doc) ==
        "apos: 'it''s'\n"
        "colon: 'a: b'\n"
        "dash: '-lead'\n"
        "empty: ''\n"
        "flag: 'true'\n"
        "name: ubuntu-14.04-vanilla\n"
        "size: '10 GB'\n"
        "version: '14.04'\n");
}

TEST_CASE("yaml rendering inlines the first key of mapping list items") {
  Value tasks(ValueList{
      Value(ValueMap{{"name", Value("install")}, {"order", Value(1)}}),
      Value(ValueMap{{"name", Value("configure")},
                     {"inputs", Value(ValueMap{{"app", Value("powerfit")}})}}),
  });
  Value doc(ValueMap{{"tasks", tasks}});
  CHECK(to_yaml(doc) ==
        "tasks:\n"
        "  - name: install\n"
        "    order: 1\n"
        "  - inputs:\n"
        "      app: powerfit\n"
        "    name: configure\n");
}

TEST_CASE("yaml rendering of nested lists and scalars") {
  Value doc(ValueMap{{"grid", Value(ValueList{
                                  Value(ValueList{Value(1), Value(2)}),
                                  Value(ValueList{}),
                              })}});
  CHECK(to_yaml(doc) ==
        "grid:\n"
        "  -\n"
        "    - 1\n"
        "    - 2\n"
        "  - []\n");
  CHECK(to_yaml(Value(7)) == "7\n");
  CHECK(to_yaml(Value(ValueList{Value("a"), Value("b")})) == "- a\n- b\n");
}

namespace {

// Uniform random value trees; depth limits keep them small.
Value random_value(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 7 : 5);
  switch (pick(rng)) {
    case 0: return Value();
    case 1: return Value(std::uniform_int_distribution<int>(0, 1)(rng) == 1);
    case 2: return Value(static_cast<std::int64_t>(
                 std::uniform_int_distribution<int>(-1000, 1000)(rng)));
    case 3: return Value(std::uniform_int_distribution<int>(0, 100)(rng) / 8.0);
    case 4: {
      static const char* words[] = {"alpha", "14.04", "true", "a: b", "-x", "", "plain one"};
      return Value(words[std::uniform_int_distribution<int>(0, 6)(rng)]);
    }
    case 5: return Value(ScalarSize::from_bytes(
                 static_cast<std::uint64_t>(std::uniform_int_distribution<int>(0, 1 << 20)(rng))));
    case 6: {
      ValueList list;
      int n = std::uniform_int_distribution<int>(0, 3)(rng);
      for (int i = 0; i < n; ++i) list.push_back(random_value(rng, depth - 1));
      return Value(std::move(list));
    }
    default: {
      ValueMap map;
      int n = std::uniform_int_distribution<int>(0, 3)(rng);
      for (int i = 0; i < n; ++i)
        map["k" + std::to_string(std::uniform_int_distribution<int>(0, 9)(rng))] =
            random_value(rng, depth - 1);
      return Value(std::move(map));
    }
  }
}

}  // namespace

TEST_CASE("yaml rendering is deterministic over random value trees") {
  std::mt19937 rng(20260825);
  for (int i = 0; i < 200; ++i) {
    Value tree = random_value(rng, 3);
    Value copy = tree;
    CHECK(to_yaml(tree) == to_yaml(copy));
    CHECK(tree == copy);
  }
}

TEST_CASE("error codes map to stable names and exit classes") {
  CHECK(errc_name(Errc::no_public_address) == "NoPublicAddressAvailable");
  CHECK(errc_name(Errc::slots_exceed_capacity) == "SlotsExceedSlaveCapacity");
  CHECK(errc_name(Errc::quota_exceeded) == "QuotaExceeded");
  CHECK(errc_name(Errc::validation_failed) == "ValidationFailed");

  CHECK(errc_exit_code(Errc::unknown_deployment) == 4);
  CHECK(errc_exit_code(Errc::no_such_flavor) == 4);
  CHECK(errc_exit_code(Errc::quota_exceeded) == 3);
  CHECK(errc_exit_code(Errc::no_capable_provider) == 3);
  CHECK(errc_exit_code(Errc::attribute_unavailable) == 3);
  CHECK(errc_exit_code(Errc::validation_failed) == 2);
  CHECK(errc_exit_code(Errc::bad_scenario) == 2);
}

TEST_CASE("errors carry a subject for the entity they are about") {
  Error e(Errc::unknown_reference, "node web has no property foo", "web");
  CHECK(e.code() == Errc::unknown_reference);
  CHECK(e.subject() == "web");
  CHECK(std::string(e.what()) == "node web has no property foo");
}
