#include "doctest.h"
#include "support.hpp"

#include "sessionscreen/cli.hpp"
#include "sessionscreen/corpus.hpp"
#include "sessionscreen/serialize.hpp"
#include "sessionscreen/textproc.hpp"

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

using namespace sessionscreen;
using testing_support::TempDir;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Run r;
  r.code = dispatch(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string str(const fs::path& p) { return p.string(); }

void check_manifest(const fs::path& dir, const std::string& command) {
  const auto m = nlohmann::json::parse(read_file(dir / "manifest.json"));
  CHECK(m.at("tool") == "sessionscreen");
  CHECK(m.at("version") == kToolVersion);
  CHECK(m.at("command") == command);
  CHECK(m.contains("seed"));
  CHECK(m.contains("config"));
  CHECK(m.at("created_at").get<std::string>().size() == 20);
  for (const auto& [role, input] : m.at("inputs").items()) {
    CAPTURE(role);
    CHECK(input.at("sha256") == file_sha256(input.at("path").get<std::string>()));
  }
  CHECK_FALSE(m.at("outputs").empty());
  for (const auto& [role, name] : m.at("outputs").items()) {
    CAPTURE(role);
    CHECK(fs::exists(dir / name.get<std::string>()));
  }
}

void write_text(const fs::path& p, const std::string& text) { write_file_atomic(p, text); }

}  // namespace

TEST_CASE("full pipeline through the command line") {
  TempDir tmp("cli");
  const auto data = tmp / "data";
  REQUIRE(cli({"synth", "--sessions", "80", "--seed", "4", "--out", str(data)}).code == 0);
  check_manifest(data, "synth");
  CHECK(nlohmann::json::parse(read_file(data / "manifest.json")).at("seed") == 4);

  const auto sel = tmp / "sel";
  const auto s = cli({"select", "--corpus", str(data / "corpus.jsonl"), "--out", str(sel)});
  REQUIRE(s.code == 0);
  check_manifest(sel, "select");
  const auto corpus = load_corpus(data / "corpus.jsonl");
  std::string expected;
  for (const auto& x : select_sessions(corpus, default_lexicon(), SelectionCriteria{})) expected += x.session_id + "\n";
  CHECK(read_file(sel / "selected_ids.txt") == expected);

  const auto agg = tmp / "agg";
  REQUIRE(cli({"aggregate", "--labels", str(data / "labels.csv"), "--out", str(agg)}).code == 0);
  check_manifest(agg, "aggregate");
  CHECK(read_file(agg / "aggregated.csv").starts_with("session_id,"));

  const auto cfg = tmp / "exp.json";
  write_text(cfg, R"({"k_folds": 4, "svd_components": 20, "kpca_components": 5})");
  const auto feat = tmp / "feat";
  REQUIRE(cli({"featurize", "--corpus", str(sel / "selected.jsonl"), "--config", str(cfg), "--out", str(feat)}).code == 0);
  check_manifest(feat, "featurize");

  const auto ev = tmp / "eval";
  const auto e = cli({"evaluate", "--config", str(cfg), "--experiment", "all", "--corpus", str(data / "corpus.jsonl"),
                      "--labels", str(data / "labels.csv"), "--out", str(ev)});
  REQUIRE(e.code == 0);
  CHECK(e.out.find("svm_full: mean accuracy") != std::string::npos);
  check_manifest(ev, "evaluate");
  for (const char* name : {"nb_meta", "nb_meta_image", "svm_text", "svm_text_svd", "svm_full"}) {
    CHECK(fs::exists(ev / (std::string("report_") + name + ".json")));
    CHECK(fs::exists(ev / (std::string("folds_") + name + ".csv")));
    CHECK(fs::exists(ev / (std::string("model_") + name + ".json")));
  }

  const auto an = tmp / "an";
  REQUIRE(cli({"analyze", "--corpus", str(data / "corpus.jsonl"), "--labels", str(data / "labels.csv"), "--out", str(an)})
              .code == 0);
  check_manifest(an, "analyze");
  CHECK(fs::exists(an / "correlations.csv"));
  CHECK(fs::exists(an / "temporal_sweep.csv"));

  const auto table = tmp / "table.txt";
  const auto r = cli({"report", "--run", str(ev), "--out", str(table)});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("Accuracy") != std::string::npos);
  CHECK(r.out.find("Baseline") != std::string::npos);
  CHECK(read_file(table) == r.out);

  SUBCASE("reruns produce identical bytes") {
    const auto data2 = tmp / "data2";
    REQUIRE(cli({"synth", "--sessions", "80", "--seed", "4", "--out", str(data2)}).code == 0);
    CHECK(read_file(data2 / "corpus.jsonl") == read_file(data / "corpus.jsonl"));
    CHECK(read_file(data2 / "labels.csv") == read_file(data / "labels.csv"));
    const auto ev2 = tmp / "eval2";
    REQUIRE(cli({"evaluate", "--config", str(cfg), "--experiment", "svm_full", "--corpus", str(data2 / "corpus.jsonl"),
                 "--labels", str(data2 / "labels.csv"), "--out", str(ev2)})
                .code == 0);
    CHECK(read_file(ev2 / "report_svm_full.json") == read_file(ev / "report_svm_full.json"));
    CHECK(read_file(ev2 / "model_svm_full.json") == read_file(ev / "model_svm_full.json"));
  }
}

TEST_CASE("usage errors exit with status 2") {
  TempDir tmp("cli_usage");
  CHECK(cli({}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"select", "--out", str(tmp / "x")}).code == 2);
  CHECK(cli({"synth", "--out", str(tmp / "x"), "--bogus", "1"}).code == 2);
  CHECK(cli({"select", "--corpus", str(tmp / "missing.jsonl"), "--out", str(tmp / "x")}).code == 2);
  CHECK(cli({"--version"}).code == 0);
}

TEST_CASE("module errors exit with status 1") {
  TempDir tmp("cli_errors");
  const auto bad_corpus = tmp / "bad.jsonl";
  write_text(bad_corpus, "{\"session_id\": \"a\"}\nnot json\n");
  const auto r = cli({"select", "--corpus", str(bad_corpus), "--out", str(tmp / "x")});
  CHECK(r.code == 1);
  CHECK(r.err.find("error:") != std::string::npos);

  REQUIRE(cli({"synth", "--sessions", "20", "--out", str(tmp / "d")}).code == 0);
  const auto bad_cfg = tmp / "cfg.json";
  write_text(bad_cfg, R"({"k_folds": 1})");
  CHECK(cli({"evaluate", "--config", str(bad_cfg), "--corpus", str(tmp / "d" / "corpus.jsonl"), "--labels",
             str(tmp / "d" / "labels.csv"), "--out", str(tmp / "e")})
            .code == 1);
  CHECK(cli({"report", "--run", str(tmp / "nowhere")}).code == 1);
  CHECK(cli({"synth", "--sessions", "0", "--out", str(tmp / "z")}).code == 1);
}

TEST_CASE("seed falls back to the environment") {
  TempDir tmp("cli_seed");
  ::setenv("SESSION_SCREEN_SEED", "21", 1);
  REQUIRE(cli({"synth", "--sessions", "10", "--out", str(tmp / "env")}).code == 0);
  REQUIRE(cli({"synth", "--sessions", "10", "--seed", "5", "--out", str(tmp / "flag")}).code == 0);
  ::setenv("SESSION_SCREEN_SEED", "oops", 1);
  CHECK(cli({"synth", "--sessions", "10", "--out", str(tmp / "bad")}).code == 1);
  ::unsetenv("SESSION_SCREEN_SEED");
  REQUIRE(cli({"synth", "--sessions", "10", "--seed", "21", "--out", str(tmp / "explicit")}).code == 0);
  REQUIRE(cli({"synth", "--sessions", "10", "--out", str(tmp / "default")}).code == 0);

  auto seed_of = [&](const char* d) {
    return nlohmann::json::parse(read_file(tmp / d / "manifest.json")).at("seed").get<std::uint64_t>();
  };
  CHECK(seed_of("env") == 21);
  CHECK(seed_of("flag") == 5);
  CHECK(seed_of("default") == 1);
  CHECK(read_file(tmp / "env" / "corpus.jsonl") == read_file(tmp / "explicit" / "corpus.jsonl"));
  CHECK(read_file(tmp / "env" / "corpus.jsonl") != read_file(tmp / "default" / "corpus.jsonl"));
}
