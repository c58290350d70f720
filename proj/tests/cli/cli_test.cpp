#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <json.hpp>
#include <string>

#include "ruleagg/io.hpp"

namespace fs = std::filesystem;
using ruleagg::read_file;
using ruleagg::write_file;

namespace {

const fs::path kWork = RULEAGG_TEST_WORKDIR;

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome cli(const std::string& args) {
  const auto out = kWork / "stdout.txt";
  const auto err = kWork / "stderr.txt";
  const std::string cmd =
      std::string("'") + RULEAGG_CLI_PATH + "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  Outcome o;
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  o.out = read_file(out);
  o.err = read_file(err);
  return o;
}

std::string p(const fs::path& path) { return "'" + path.string() + "'"; }

fs::path fresh(const std::string& name) {
  const auto dir = kWork / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const char* kContinuousSchema =
    R"({"features":[{"name":"x","kind":"continuous"},{"name":"a","kind":"categorical","values":["0","1"]}],"classes":["neg","pos"]})";

}  // namespace

TEST_CASE("preprocess writes four interior edges and is byte-deterministic") {
  fs::create_directories(kWork);
  const auto dir = fresh("preprocess");
  write_file(dir / "schema.json", kContinuousSchema);
  write_file(dir / "train.csv", "instance_id,x,a\nt1,0,0\nt2,10,1\nt3,3.3,1\n");
  REQUIRE(cli("preprocess --schema " + p(dir / "schema.json") + " --train " + p(dir / "train.csv") + " --out " +
              p(dir / "s1.json"))
              .code == 0);
  REQUIRE(cli("preprocess --schema " + p(dir / "schema.json") + " --train " + p(dir / "train.csv") + " --out " +
              p(dir / "s2.json"))
              .code == 0);
  const auto s1 = read_file(dir / "s1.json");
  CHECK(s1 == read_file(dir / "s2.json"));
  const auto j = nlohmann::json::parse(s1);
  CHECK(j["features"][0]["edges"] == nlohmann::json::array({2.0, 4.0, 6.0, 8.0}));
}

TEST_CASE("missing column exits 2 and names the column") {
  const auto dir = fresh("missing");
  write_file(dir / "schema.json", kContinuousSchema);
  write_file(dir / "train.csv", "instance_id,a\nt1,0\n");
  const auto o = cli("preprocess --schema " + p(dir / "schema.json") + " --train " + p(dir / "train.csv"));
  CHECK(o.code == 2);
  CHECK(o.err.find("'x'") != std::string::npos);
  const auto j = cli("--json-errors preprocess --schema " + p(dir / "schema.json") + " --train " + p(dir / "train.csv"));
  CHECK(j.code == 2);
  const auto doc = nlohmann::json::parse(j.err);
  CHECK(doc["exit_code"] == 2);
  CHECK(doc["error"].get<std::string>().find("'x'") != std::string::npos);
}

TEST_CASE("bad flags exit 2") {
  CHECK(cli("run --mode sideways").code == 2);
  CHECK(cli("frobnicate").code == 2);
  CHECK(cli("--version").code == 0);
}

TEST_CASE("stages run one by one reproduce the full run") {
  const auto dir = fresh("stages");
  REQUIRE(cli("synth --kind single-rule --n 800 --seed 3 --out " + p(dir)).code == 0);
  const std::string data = " --schema " + p(dir / "schema.json") + " --train " + p(dir / "train.csv") + " --dev " +
                           p(dir / "dev.csv") + " --test " + p(dir / "test.csv");
  const auto full = cli("run" + data + " --use-reference-models --seed 3 --out " + p(dir / "full"));
  REQUIRE_MESSAGE(full.code == 0, full.err);
  CHECK(full.out.find("test auc") != std::string::npos);

  const auto schema = " --schema " + p(dir / "full" / "schema.json");
  REQUIRE(cli("itemize" + schema + " --explanations " + p(dir / "full" / "explanations.jsonl") + " --predictions " +
              p(dir / "full" / "predictions.jsonl") + " --data " + p(dir / "dev.csv") + " --out " +
              p(dir / "transactions.jsonl"))
              .code == 0);
  CHECK(read_file(dir / "transactions.jsonl") == read_file(dir / "full" / "transactions.jsonl"));
  REQUIRE(cli("mine" + schema + " --transactions " + p(dir / "transactions.jsonl") + " --out " + p(dir / "mined.json"))
              .code == 0);
  REQUIRE(cli("filter" + schema + " --rules " + p(dir / "mined.json") + " --out " + p(dir / "rules.json")).code == 0);
  CHECK(read_file(dir / "rules.json") == read_file(dir / "full" / "rules.json"));
  REQUIRE(cli("evaluate" + schema + " --rules " + p(dir / "rules.json") + " --dev " + p(dir / "dev.csv") + " --test " +
              p(dir / "test.csv") + " --predictions " + p(dir / "full" / "predictions.jsonl") + " --out " +
              p(dir / "report.json"))
              .code == 0);
  CHECK(read_file(dir / "report.json") == read_file(dir / "full" / "report.json"));
}

TEST_CASE("mode switch changes orientation only") {
  const auto dir = fresh("modes");
  REQUIRE(cli("synth --kind mofn --seed 2 --out " + p(dir)).code == 0);
  const std::string base = "run --schema " + p(dir / "schema.json") + " --train " + p(dir / "train.csv") + " --dev " +
                           p(dir / "dev.csv") + " --test " + p(dir / "test.csv") +
                           " --use-reference-models --seed 2 --confidence-grid 0.4,0.6,0.8,1.0";
  REQUIRE(cli(base + " --mode characteristic --out " + p(dir / "chr")).code == 0);
  REQUIRE(cli(base + " --mode discriminative --out " + p(dir / "dis")).code == 0);
  CHECK(read_file(dir / "chr" / "transactions.jsonl") == read_file(dir / "dis" / "transactions.jsonl"));
  for (const auto& [sub, mode] : {std::pair{"chr", "characteristic"}, std::pair{"dis", "discriminative"}}) {
    const auto rules = nlohmann::json::parse(read_file(dir / sub / "rules.json"));
    REQUIRE_FALSE(rules.empty());
    for (const auto& r : rules) {
      CHECK(r["mode"] == mode);
      const auto& cls_side = std::string(mode) == "characteristic" ? r["antecedent"] : r["consequent"];
      CHECK(cls_side.size() == 1);
    }
  }
}

TEST_CASE("flags override the config file") {
  const auto dir = fresh("config");
  REQUIRE(cli("synth --kind single-rule --n 400 --seed 1 --out " + p(dir)).code == 0);
  write_file(dir / "config.json",
             R"({"schema":"schema.json","train":"train.csv","dev":"dev.csv","test":"test.csv","output_dir":"out",
                 "use_reference_models":true,"seed":1,"mining":{"mode":"discriminative","min_support":8}})");
  REQUIRE(cli("run --config " + p(dir / "config.json") + " --mode characteristic").code == 0);
  const auto manifest = nlohmann::json::parse(read_file(dir / "out" / "manifest.json"));
  CHECK(manifest["config"]["mining"]["mode"] == "characteristic");
  CHECK(manifest["config"]["mining"]["min_support"] == 8);
  CHECK(manifest["seed"] == 1);
}

TEST_CASE("a stage that cannot produce a result exits 3") {
  const auto dir = fresh("stagefail");
  REQUIRE(cli("synth --kind single-rule --n 300 --seed 1 --out " + p(dir)).code == 0);
  const auto o = cli("--json-errors run --schema " + p(dir / "schema.json") + " --train " + p(dir / "train.csv") +
                     " --dev " + p(dir / "dev.csv") + " --test " + p(dir / "test.csv") +
                     " --use-reference-models --score-threshold 100 --out " + p(dir / "out"));
  CHECK(o.code == 3);
  const auto doc = nlohmann::json::parse(o.err);
  CHECK(doc["stage"] == "itemize");
}
