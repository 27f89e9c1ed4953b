#include <doctest.h>

#include <json.hpp>

#include "endoring/corpus.hpp"
#include "endoring/report.hpp"

using namespace endoring;

namespace {

SessionConfig config(std::string command, std::vector<std::string> inputs) {
  SessionConfig cfg;
  cfg.command = std::move(command);
  cfg.inputs = std::move(inputs);
  cfg.samples = 20;
  return cfg;
}

}  // namespace

TEST_CASE("parse_levels") {
  CHECK(parse_levels("2,4,6") == std::vector<unsigned>{2, 4, 6});
  CHECK_THROWS_AS(parse_levels("4,2"), UsageError);
  CHECK_THROWS_AS(parse_levels("x"), UsageError);
  CHECK_THROWS_AS(parse_levels(""), UsageError);
}

TEST_CASE("report shape") {
  RunResult r = run(config("check", {corpus_files().at(0)}));
  REQUIRE(r.exit_code == 0);
  auto j = nlohmann::json::parse(r.report);
  CHECK(j["command"] == "check");
  CHECK(j["version"] == kVersion);
  CHECK(j["seed"].is_number_unsigned());
  CHECK(j["inputs"].size() == 1);
  CHECK(j.contains("results"));
}

TEST_CASE("reports are deterministic") {
  for (const char* cmd : {"analyze", "check", "decompose", "oracle"}) {
    CAPTURE(cmd);
    SessionConfig cfg = config(cmd, corpus_files());
    RunResult a = run(cfg);
    RunResult b = run(cfg);
    CHECK(a.exit_code == 0);
    CHECK(a.report == b.report);
  }
}

TEST_CASE("missing file is a usage error") {
  RunResult r = run(config("check", {"/nonexistent/file.txt"}));
  CHECK(r.exit_code == 1);
  CHECK_FALSE(r.error.empty());
}

TEST_CASE("unknown --only target is a usage error") {
  SessionConfig cfg = config("check", {corpus_files().at(0)});
  cfg.only = "no_such_endo";
  CHECK(run(cfg).exit_code == 1);
}

TEST_CASE("wrong verdict injection yields a contradiction") {
  SessionConfig cfg = config("check", {corpus_files().at(0)});
  cfg.only = "z2_identity";
  cfg.inject_wrong_verdict = true;
  CHECK(run(cfg).exit_code == 2);
}

TEST_CASE("defect command on matrices") {
  Document d = parse("matrix M over F_2 { [1, 1] [0, 1] }");
  RunResult r = run_documents(config("defect", {}), {"inline"}, {d});
  REQUIRE(r.exit_code == 0);
  auto j = nlohmann::json::parse(r.report);
  CHECK(j["results"].dump().find("\"defect\":1") != std::string::npos);
}
