#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>

#include "arxtrail/arxtrail.h"

using nlohmann::json;

namespace {
struct Ctx {
  arxt_context* c = nullptr;
  Ctx() { REQUIRE(arxt_context_new(nullptr, &c) == ARXT_OK); }
  ~Ctx() { arxt_context_free(c); }
};

std::string take(char* s) {
  std::string out = s ? s : "";
  arxt_string_free(s);
  return out;
}

std::string fixture(const std::string& rel) { return std::string(ARXTRAIL_SOURCE_DIR) + "/fixtures/" + rel; }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
}  // namespace

TEST_CASE("status names and version") {
  CHECK(std::string(arxt_version()).size() > 0);
  CHECK(std::string(arxt_status_name(ARXT_OK)) == "ok");
  CHECK(std::string(arxt_status_name(ARXT_E_PARSE)) == "parse error");
}

TEST_CASE("single addition") {
  Ctx ctx;
  int valid = 0;
  unsigned w = 0;
  REQUIRE(arxt_xdp(ctx.c, 6, "0b000000", "0b001100", "0b010100", &valid, &w) == ARXT_OK);
  CHECK(valid == 1);
  CHECK(w == 3);
  REQUIRE(arxt_xdp(ctx.c, 4, "0x0", "0x0", "0x1", &valid, &w) == ARXT_OK);
  CHECK(valid == 0);
  CHECK(arxt_xdp(ctx.c, 4, "0x10", "0x0", "0x0", &valid, &w) == ARXT_E_PARSE);
  CHECK(std::string(arxt_last_error(ctx.c)).size() > 0);
  CHECK(arxt_xdp(ctx.c, 4, nullptr, "0x0", "0x0", &valid, &w) == ARXT_E_INVALID_ARGUMENT);

  char* csv = nullptr;
  REQUIRE(arxt_hist_csv(ctx.c, 6, "0b010000", "0b010000", "0b000000", &csv) == ARXT_OK);
  std::string text = take(csv);
  CHECK(text.find("\n15,0\n") != std::string::npos);
  CHECK(text.find("\n47,0\n") != std::string::npos);
}

TEST_CASE("CMA counting through the C API") {
  Ctx ctx;
  char* out = nullptr;
  const std::string spec = slurp(fixture("cma/example_lower.json"));
  for (int method : {1, 2}) {
    REQUIRE(arxt_cma(ctx.c, spec.c_str(), 1, method, &out) == ARXT_OK);
    json j = json::parse(take(out));
    CHECK(j.at("status") == "ValidConfirmed");
    CHECK(j.at("probability").at("conditional_log2").get<double>() == doctest::Approx(-1.5406));
  }
  CHECK(arxt_cma(ctx.c, "{", 1, 0, &out) == ARXT_E_PARSE);
  REQUIRE(arxt_conflict(ctx.c, slurp(fixture("cma/speck64_128_invalid_m8_m11.json")).c_str(), &out) == ARXT_OK);
  CHECK(take(out).find("0x00000800") != std::string::npos);
}

TEST_CASE("trail handles") {
  Ctx ctx;
  arxt_trail* t = nullptr;
  REQUIRE(arxt_trail_load(ctx.c, fixture("trails/toy_chaskey32_r5.json").c_str(), &t) == ARXT_OK);
  CHECK(arxt_trail_rounds(t) == 5);
  char* out = nullptr;
  REQUIRE(arxt_trail_check(ctx.c, t, &out) == ARXT_OK);
  CHECK(json::parse(take(out)).at("consistent") == true);
  REQUIRE(arxt_verify(ctx.c, t, 1, &out) == ARXT_OK);
  json v = json::parse(take(out));
  CHECK(v.at("status") == "valid");
  CHECK(v.at("independence_weight").get<double>() == doctest::Approx(27));
  CHECK(v.at("refined_weight").get<double>() == doctest::Approx(25));
  REQUIRE(arxt_trail_json(ctx.c, t, &out) == ARXT_OK);
  arxt_trail* back = nullptr;
  CHECK(arxt_trail_parse(ctx.c, take(out).c_str(), &back) == ARXT_OK);
  arxt_trail_free(back);
  arxt_trail_free(t);
  CHECK(arxt_trail_load(ctx.c, "/nonexistent.json", &t) == ARXT_E_IO);
}

TEST_CASE("search and export") {
  Ctx ctx;
  int lines = 0;
  arxt_context_set_log(
      ctx.c, [](const char*, void* user) { ++*static_cast<int*>(user); }, &lines);
  char* out = nullptr;
  REQUIRE(arxt_search(ctx.c, R"({"cipher": "toy-speck-14", "rounds": 2})", &out) == ARXT_OK);
  json r = json::parse(take(out));
  CHECK(r.at("found") == true);
  CHECK(lines > 0);
  CHECK(arxt_search(ctx.c, R"({"cipher": "unknown", "rounds": 2})", &out) == ARXT_E_INVALID_ARGUMENT);

  REQUIRE(arxt_export_cnf(ctx.c, R"({"model": "xdp", "n": 4, "dx": "0x1", "dy": "0x1", "dz": "0x0"})", &out) == ARXT_OK);
  CHECK(take(out).find("p cnf") != std::string::npos);
}

TEST_CASE("configuration keys") {
  Ctx ctx;
  CHECK(arxt_context_set(ctx.c, "jobs", "2") == ARXT_OK);
  CHECK(arxt_context_set(ctx.c, "no_such_key", "1") == ARXT_E_INVALID_ARGUMENT);
  CHECK(arxt_context_set(ctx.c, "sat", "/nonexistent/solver") == ARXT_OK);
  char* out = nullptr;
  REQUIRE(arxt_context_config_json(ctx.c, &out) == ARXT_OK);
  CHECK(json::parse(take(out)).at("sat").at("command") == "/nonexistent/solver");
  arxt_trail* t = nullptr;
  REQUIRE(arxt_trail_load(ctx.c, fixture("trails/toy_chaskey32_r5.json").c_str(), &t) == ARXT_OK);
  CHECK(arxt_verify(ctx.c, t, 0, &out) == ARXT_E_SOLVER_MISSING);
  arxt_trail_free(t);
}
