#include <doctest.h>

#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "pop.h"

namespace {

std::string data(const std::string& name) { return std::string(POP_DATA_DIR) + "/" + name; }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::string take(char* p) {
  std::string s = p ? p : "";
  pop_string_free(p);
  return s;
}

}  // namespace

TEST_SUITE("capi") {
  TEST_CASE("status names and version") {
    CHECK(std::string(pop_status_name(POP_OK)) == "ok");
    CHECK(std::string(pop_status_name(POP_INFEASIBLE)) == "infeasible");
    CHECK(std::strlen(pop_version()) > 0);
  }

  TEST_CASE("instance handles") {
    pop_instance* in = nullptr;
    CHECK(pop_instance_load_file("/nonexistent.json", &in) == POP_IO);
    CHECK(in == nullptr);
    CHECK(std::string(pop_last_error()).find("nonexistent") != std::string::npos);
    CHECK(pop_instance_load_json("{", &in) == POP_VALIDATION);
    CHECK(pop_instance_load_file(nullptr, &in) == POP_INVALID_ARGUMENT);

    REQUIRE(pop_instance_load_file(data("smopop_s36.json").c_str(), &in) == POP_OK);
    char* out = nullptr;
    REQUIRE(pop_instance_info(in, &out) == POP_OK);
    const auto info = nlohmann::json::parse(take(out));
    CHECK(info.at("phi_set").size() == 7);

    CHECK(pop_front(in, "0.65", POP_FORMAT_JSON, &out) == POP_OK);
    CHECK(nlohmann::json::parse(take(out)).at("count").get<int>() > 0);
    CHECK(pop_front(in, "0.75", POP_FORMAT_TEXT, &out) == POP_INFEASIBLE);
    CHECK(take(out).find("infeasible") != std::string::npos);
    CHECK(pop_front(in, "0.5", POP_FORMAT_TEXT, &out) == POP_INVALID_ARGUMENT);
    CHECK(pop_rho_text(in, "g1", &out) == POP_OK);
    CHECK(take(out).find("60") != std::string::npos);
    CHECK(pop_rho_text(in, "nope", &out) == POP_NOT_FOUND);
    pop_instance_free(in);
  }

  TEST_CASE("validation diagnostics") {
    char* out = nullptr;
    CHECK(pop_validate_file(data("mopop_s32.json").c_str(), &out) == POP_OK);
    CHECK(nlohmann::json::parse(take(out)).size() == 1);
    auto doc = nlohmann::json::parse(slurp(data("mopop_s32.json")));
    doc["budget"] = -1;
    CHECK(pop_validate_json(doc.dump().c_str(), &out) == POP_VALIDATION);
    CHECK(take(out).find("negative-budget") != std::string::npos);
    pop_instance* in = nullptr;
    CHECK(pop_instance_load_json(doc.dump().c_str(), &in) == POP_VALIDATION);
  }

  TEST_CASE("session round trip") {
    pop_instance* in = nullptr;
    REQUIRE(pop_instance_load_file(data("case_study_s5.json").c_str(), &in) == POP_OK);
    pop_session* s = nullptr;
    CHECK(pop_session_create(in, R"({"mode":"bogus"})", &s) == POP_INVALID_ARGUMENT);
    REQUIRE(pop_session_create(in, nullptr, &s) == POP_OK);
    pop_instance_free(in);  // the session keeps its own copy

    char* out = nullptr;
    CHECK(pop_session_accept(s, "1.1", &out) == POP_STATE);
    REQUIRE(pop_session_generate(s, &out) == POP_OK);
    const auto cands = nlohmann::json::parse(take(out)).at("candidates");
    nlohmann::json labels;
    for (const auto& c : cands) labels[c.at("id").get<std::string>()] = "good";
    labels["c1"] = "other";
    REQUIRE(pop_session_classify(s, labels.dump().c_str(), &out) == POP_OK);
    const auto rules = nlohmann::json::parse(take(out)).at("rules").at("rules");
    REQUIRE_FALSE(rules.empty());
    CHECK(pop_session_accept(s, "nope", &out) == POP_NOT_FOUND);
    REQUIRE(pop_session_accept(s, rules[0].at("id").get<std::string>().c_str(), &out) == POP_OK);
    pop_string_free(out);

    char* saved = nullptr;
    REQUIRE(pop_session_save(s, nullptr, &saved) == POP_OK);
    pop_session* back = nullptr;
    REQUIRE(pop_session_load_json(saved, &back) == POP_OK);
    pop_string_free(saved);
    char* a = nullptr;
    char* b = nullptr;
    pop_session_state(s, &a);
    pop_session_state(back, &b);
    CHECK(take(a) == take(b));

    CHECK(pop_session_status(s, &out) == POP_OK);
    const auto status = take(out);
    CHECK((status == "converged" || status == "awaiting_classification"));
    pop_session_free(s);
    pop_session_free(back);
  }

  TEST_CASE("simulation through the C interface") {
    pop_instance* in = nullptr;
    REQUIRE(pop_instance_load_file(data("case_study_s5.json").c_str(), &in) == POP_OK);
    pop_session* s = nullptr;
    REQUIRE(pop_session_create(in, nullptr, &s) == POP_OK);
    char* report = nullptr;
    char* result = nullptr;
    REQUIRE(pop_session_simulate(s, nullptr, &report, &result) == POP_OK);
    CHECK(take(report).find("status: converged") != std::string::npos);
    CHECK(nlohmann::json::parse(take(result)).at("status") == "converged");
    pop_session_free(s);
    pop_instance_free(in);
  }
}
