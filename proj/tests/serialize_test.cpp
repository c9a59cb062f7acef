#include "doctest.h"
#include "support.hpp"

#include "sessionscreen/error.hpp"
#include "sessionscreen/eval.hpp"
#include "sessionscreen/serialize.hpp"
#include "sessionscreen/synth.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>

using namespace sessionscreen;
using testing_support::TempDir;

TEST_CASE("sha256 known vectors") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
        "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST_CASE("atomic writes and reads") {
  TempDir dir("serialize");
  const auto path = dir / "out.txt";
  write_file_atomic(path, "first\n");
  write_file_atomic(path, std::string("second\0line\n", 12));
  CHECK(read_file(path) == std::string("second\0line\n", 12));
  CHECK(file_sha256(path) == sha256_hex(std::string("second\0line\n", 12)));
  int entries = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir.path())) {
    ++entries;
    CHECK(e.path().filename() == "out.txt");
  }
  CHECK(entries == 1);
  CHECK_THROWS_AS(read_file(dir / "missing.txt"), Error);
  CHECK_THROWS_AS(file_sha256(dir / "missing.txt"), Error);
}

TEST_CASE("model bundles round-trip for every experiment") {
  SynthConfig sc;
  sc.n_sessions = 60;
  sc.seed = 5;
  const auto corpus = generate_corpus(sc);
  const auto records = generate_labels(corpus.sessions, corpus.true_classes, sc);
  for (auto kind : kAllExperiments) {
    CAPTURE(to_string(kind));
    ExperimentConfig cfg;
    cfg.experiment = kind;
    cfg.svd_components = 10;
    cfg.kpca_components = 5;
    const auto data = prepare_data(cfg, corpus.sessions, records, default_lexicon());
    const auto model = fit_pipeline(cfg, data.sessions, data.labels, default_stoplist());
    const std::string json = pipeline_to_json(model);
    const auto back = pipeline_from_json(json);
    CHECK(pipeline_to_json(back) == json);
    CHECK(back.experiment == kind);
    CHECK(predict_pipeline(back, cfg, data.sessions, default_stoplist()) ==
          predict_pipeline(model, cfg, data.sessions, default_stoplist()));
  }
}

TEST_CASE("malformed model bundles are rejected") {
  SynthConfig sc;
  sc.n_sessions = 40;
  const auto corpus = generate_corpus(sc);
  const auto records = generate_labels(corpus.sessions, corpus.true_classes, sc);
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::nb_meta;
  const auto data = prepare_data(cfg, corpus.sessions, records, default_lexicon());
  const auto j = nlohmann::json::parse(pipeline_to_json(fit_pipeline(cfg, data.sessions, data.labels, default_stoplist())));

  CHECK_THROWS_AS(pipeline_from_json("not json"), ParseError);
  auto wrong_format = j;
  wrong_format["format"] = "something-else";
  CHECK_THROWS_AS(pipeline_from_json(wrong_format.dump()), ParseError);
  auto wrong_version = j;
  wrong_version["version"] = kModelFormatVersion + 1;
  CHECK_THROWS_AS(pipeline_from_json(wrong_version.dump()), ParseError);
}
