#include "doctest.h"

#include <cstdio>
#include <fstream>

#include "clo/alg_io.hpp"
#include "clo/constructions.hpp"

using namespace clo;

namespace {

std::string data_path(const std::string& name) {
  return std::string(CLO_DATA_DIR) + "/" + name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("bundled algebras load and validate") {
  Algebra u1 = load_algebra_file(data_path("u1.alg"));
  CHECK(is_isomorphic(u1, builtin("u1")));

  Algebra gap = load_algebra_file(data_path("gap.alg"));
  CHECK(is_isomorphic(gap, builtin("gap")));
  CHECK(gap.name_of(gap.mul(gap.omega(gap.require_index("lr")),
                            gap.omegastar(gap.require_index("lr")))) == "g");

  Algebra d2 = load_algebra_file(data_path("delta2.alg"));
  CHECK(is_isomorphic(d2, builtin("delta:2")));
}

TEST_CASE("save and load round trip is byte stable") {
  for (const char* name :
       {"u1.alg", "gap.alg", "delta2.alg", "delta3.alg", "omega_chain2.alg"}) {
    std::string text = slurp(data_path(name));
    Algebra a = load_algebra_text(text);
    INFO(name);
    CHECK(save_algebra_text(a) == text);
  }
}

TEST_CASE("materialized shuffles reload equal") {
  // a rule-backed table is written entry by entry
  SnAlgebra sn = build_sn({"a"}, 2);
  std::string text = save_algebra_text(sn.algebra);
  Algebra back = load_algebra_text(text);
  CHECK(is_isomorphic(back, sn.algebra));
  CHECK(save_algebra_text(back) == text);
}

TEST_CASE("schema errors carry a location") {
  CHECK_THROWS_AS(load_algebra_text("not json"), SchemaError);
  CHECK_THROWS_AS(load_algebra_text("{}"), SchemaError);
  CHECK_THROWS_AS(
      load_algebra_text(R"({"name":"x","elements":["1","0"],"unit":"2",
        "product":[["1","0"],["0","0"]],"omega":["1","0"],
        "omegastar":["1","0"]})"),
      SchemaError);
  CHECK_THROWS_AS(
      load_algebra_text(R"({"name":"x","elements":["1","0"],"unit":"1",
        "product":[["1","0"]],"omega":["1","0"],"omegastar":["1","0"]})"),
      SchemaError);
}

TEST_CASE("axiom violations are reported with a witness") {
  // (a.a).a = b.a = a but a.(a.a) = a.b = 1
  std::string text = R"({
    "name": "broken",
    "elements": ["1", "a", "b"],
    "unit": "1",
    "product": [["1","a","b"],["a","b","1"],["b","a","a"]],
    "omega": ["1","a","b"],
    "omegastar": ["1","a","b"],
    "shuffle": {"default": "b"}
  })";
  try {
    load_algebra_text(text);
    FAIL("expected a validation error");
  } catch (const Error& e) {
    std::string what = e.what();
    CHECK(what.find("associativity") != std::string::npos);
    CHECK(what.find("a") != std::string::npos);
  }
  CHECK_NOTHROW(load_algebra_text(text, false));
}

TEST_CASE("shuffle entries for the unit subset must be the unit") {
  std::string text = R"({
    "name": "x", "elements": ["1","0"], "unit": "1",
    "product": [["1","0"],["0","0"]],
    "omega": ["1","0"], "omegastar": ["1","0"],
    "shuffle": {"default": "0", "entries": [{"subset": ["1"], "value": "0"}]}
  })";
  CHECK_THROWS_AS(load_algebra_text(text, false), SchemaError);
}
