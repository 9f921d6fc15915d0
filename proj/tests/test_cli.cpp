#include <doctest.h>

#include <json.hpp>
#include <set>
#include <sstream>

#include "cli.hpp"
#include "support.hpp"

using namespace socel;
using namespace socel::testing;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome tool(std::vector<std::string> args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  const int code = cli::run(args, in, out, err);
  return {code, out.str(), err.str()};
}

std::string fx(const std::string& name) { return std::string(SOCEL_SOURCE_DIR) + "/fixtures/" + name; }

std::multiset<std::string> lines(const std::string& text) {
  std::multiset<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.insert(l);
  return out;
}

}  // namespace

TEST_CASE("run: engines agree on every fixture") {
  struct Case {
    std::string schema, query, stream;
  };
  const std::vector<Case> cases{
      {"schema.json", "freeze_threshold.cel", "sensor_stream.jsonl"},
      {"schema.json", "freeze_renamed_threshold.cel", "sensor_stream.jsonl"},
      {"witness_schema.json", "witness_skip.cel", "witness.jsonl"},
      {"witness_schema.json", "witness_contiguous.cel", "witness.jsonl"},
  };
  for (const auto& c : cases) {
    std::multiset<std::string> reference;
    for (const char* engine : {"oracle", "naive", "incremental"}) {
      Outcome r = tool({"run", "--schema", fx(c.schema), "-q", fx(c.query), "-s", fx(c.stream), "--engine", engine});
      REQUIRE_MESSAGE(r.code == 0, r.err);
      auto got = lines(r.out);
      CHECK_MESSAGE(std::set<std::string>(got.begin(), got.end()).size() == got.size(), c.query, " ", engine);
      if (reference.empty()) {
        reference = got;
      } else {
        CHECK_MESSAGE(got == reference, c.query, " ", engine);
      }
    }
  }
  Outcome r = tool({"run", "--schema", fx("schema.json"), "-q", fx("freeze_threshold.cel"), "-s", fx("sensor_stream.jsonl")});
  CHECK(r.out.find(R"({"at":9,"event":{"H":[4,6,7,9],"HH":[9],"HS":[4,6,7],"T":[3]}})") != std::string::npos);
}

TEST_CASE("run: automaton input") {
  Outcome naive = tool({"run", "--schema", fx("schema.json"), "--automaton", fx("h_then_t.json"), "-s",
                        fx("sensor_stream.jsonl"), "--engine", "naive"});
  Outcome inc = tool({"run", "--schema", fx("schema.json"), "--automaton", fx("h_then_t.json"), "-s",
                      fx("sensor_stream.jsonl")});
  REQUIRE(naive.code == 0);
  REQUIRE(inc.code == 0);
  CHECK(lines(naive.out) == lines(inc.out));
  CHECK(naive.out.rfind("{\"at\":3,\"event\":{\"H\":[1]}}\n{\"at\":3,\"event\":{\"H\":[2]}}\n", 0) == 0);
  CHECK(tool({"run", "--schema", fx("schema.json"), "--automaton", fx("h_then_t.json"), "--engine", "oracle"}).code == 1);
}

TEST_CASE("run: focel dialect") {
  const std::vector<std::string> base{"run", "--schema", fx("schema.json"), "--dialect", "focel", "-e",
                                      "(T AS x ; (H AS y)+) FILTER x.value < 0", "-s", fx("sensor_stream.jsonl")};
  auto with = [&](const char* engine) {
    auto args = base;
    args.insert(args.end(), {"--engine", engine});
    return tool(args);
  };
  Outcome oracle = with("oracle"), inc = with("incremental");
  REQUIRE(oracle.code == 0);
  REQUIRE(inc.code == 0);
  CHECK(lines(oracle.out) == lines(inc.out));
  CHECK(oracle.out.find(R"({"at":2,"match":[0,1,2]})") != std::string::npos);
}

TEST_CASE("run: exit codes and diagnostics") {
  Outcome empty = tool({"run", "--schema", fx("schema.json"), "-e", "T"}, "");
  CHECK(empty.code == cli::kOk);
  CHECK(empty.out.empty());

  Outcome bad_line = tool({"run", "--schema", fx("schema.json"), "-e", "T"}, "{\"type\":\"T\",\"value\":1}\n{oops\n");
  CHECK(bad_line.code == cli::kStreamError);
  CHECK(bad_line.err.find("line 2") != std::string::npos);
  CHECK(bad_line.out == "{\"at\":0,\"event\":{\"T\":[0]}}\n");

  CHECK(tool({"run", "--schema", fx("schema.json"), "-e", "T"}, "{\"type\":\"Z\",\"value\":1}\n").code ==
        cli::kStreamError);
  CHECK(tool({"run", "--schema", fx("schema.json"), "-e", "T ; Q"}).code == cli::kQueryError);
  CHECK(tool({"run", "--schema", fx("schema.json"), "-q", fx("freeze.cel")}).code == cli::kQueryError);
  CHECK(tool({"run", "--schema", fx("missing.json"), "-e", "T"}).code == cli::kQueryError);
  CHECK(tool({"run", "--schema", fx("schema.json"), "-e", "T", "-s", fx("missing.jsonl")}).code ==
        cli::kStreamError);
  CHECK(tool({"run", "--schema", fx("schema.json"), "-e", "T", "--semantics", "star"}).code == cli::kQueryError);
  CHECK(tool({"frobnicate"}).code == cli::kQueryError);
  CHECK(tool({"--help"}).code == cli::kOk);

  Outcome stats = tool({"run", "--schema", fx("schema.json"), "-e", "T", "--stats"}, "{\"type\":\"T\",\"value\":1}\n");
  auto j = nlohmann::json::parse(stats.err);
  CHECK(j["events"] == 1);
  CHECK(j["outputs"] == 1);
}

TEST_CASE("check-equiv verdicts") {
  const std::vector<std::string> base{"check-equiv", "--schema", fx("witness_schema.json"), "--alphabet",
                                      fx("alphabet_xrt.jsonl"), "--bound", "4"};
  auto with = [&](std::vector<std::string> extra) {
    auto args = base;
    args.insert(args.end(), extra.begin(), extra.end());
    return tool(args);
  };
  Outcome differ = with({"-q", fx("witness_skip.cel"), "--query2", fx("witness_contiguous.cel")});
  CHECK(differ.code == 0);
  CHECK(differ.out.rfind("not equivalent\nwitness: R:0,X:0,T:0 at n=2", 0) == 0);
  CHECK(with({"-e", "R ; T", "--expr2", "R ; T"}).out.rfind("equivalent within bound 4", 0) == 0);
  CHECK(with({"-e", "(R ; T+) IN A OR X", "--against", "compiled"}).out.rfind("equivalent", 0) == 0);
  CHECK(with({"-e", "(R ; T+) IN A OR X", "--against", "engine"}).out.rfind("equivalent", 0) == 0);
  CHECK(with({"-e", "R : T", "--expr2", "STRICT(R ; T)"}).out.rfind("equivalent", 0) == 0);
  CHECK(with({"-q", fx("witness_binary.cel"), "--against", "compiled"}).code == cli::kQueryError);
  auto huge = base;
  huge[6] = "40";
  huge.insert(huge.end(), {"-e", "R", "--expr2", "R"});
  CHECK(tool(huge).code == cli::kCapacity);
}

TEST_CASE("compile, rewrite, translate") {
  Outcome c = tool({"compile", "--schema", fx("schema.json"), "-e", "T", "--semantics", "star"});
  REQUIRE(c.code == 0);
  Ucea a = Ucea::from_json(c.out);
  CHECK(a.delta.size() == 1);
  CHECK(tool({"compile", "--schema", fx("schema.json"), "-e", "T ; H", "--format", "dot"}).out.rfind("digraph", 0) ==
        0);
  CHECK(tool({"rewrite", "--schema", fx("witness_schema.json"), "-e", "STRICT(R ; T)", "--rule", "strict"}).out ==
        "R : T\n");
  CHECK(tool({"rewrite", "--schema", fx("witness_schema.json"), "-e", "R : T", "--rule", "contiguous"}).out ==
        "STRICT(R ; T)\n");
  CHECK(tool({"rewrite", "--schema", fx("witness_schema.json"), "-e", "R UNLESS T", "--rule", "and-all"}).code ==
        cli::kQueryError);
  CHECK(tool({"translate", "--schema", fx("schema.json"), "--dialect", "focel", "-e", "T AS x FILTER x.value < 0"})
            .out == "T FILTER T.value < 0\n");
  CHECK(tool({"translate", "--schema", fx("schema.json"), "-e", "T FILTER T.value < 0"}).out ==
        "T AS x1 FILTER x1.value < 0\n");
}

TEST_CASE("bench report") {
  Outcome b = tool({"bench", "--lengths", "0,2000", "--samples", "10"});
  REQUIRE(b.code == 0);
  auto j = nlohmann::json::parse(b.out);
  REQUIRE(j["runs"].size() == 2);
  CHECK(j["runs"][0]["events"] == 0);
  CHECK(j["runs"][0]["enumeration"]["calls"] == 0);
  CHECK(j["runs"][1]["ops"]["total"].get<std::uint64_t>() > 0);
  CHECK(j["runs"][1]["enumeration"]["calls"] == 10);
}
