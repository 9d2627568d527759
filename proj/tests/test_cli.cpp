#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include <json.hpp>

#include "gencl/cli.hpp"
#include "gencl/config.hpp"
#include "gencl/io.hpp"
#include "helpers.hpp"

using namespace gencl;

namespace {

std::string base_config(const std::string& workdir) {
  nlohmann::json doc = {
      {"concepts", {{{"name", "dog"}}, {{"name", "guitar"}}, {{"name", "bus"}}}},
      {"hirpg", {{"k", 3}, {"d", 2}, {"n", 10}, {"seed", 42}}},
      {"generators",
       {{{"generator_id", "genA"}, {"kind", "mock"}, {"seed", 7}},
        {{"generator_id", "genB"}, {"kind", "mock"}, {"seed", 8}}}},
      {"selection", {{"tau", 0.5}, {"L", 5.0}, {"seed", 5}}},
      {"learner",
       {{"learning_rate", 0.5},
        {"batch_size", 16},
        {"iterations_per_sample", 2.0},
        {"seed", 9}}},
      {"memory", {{"capacity", 64}, {"seed", 3}}},
      {"eval_every", 5},
      {"feature_dim", 16},
      {"paths", {{"workdir", workdir}}},
  };
  return doc.dump(2);
}

std::string write_config(const test::TempDir& dir, const std::string& text) {
  std::string path = dir.file("config.json");
  io::atomic_write(path, text);
  return path;
}

}  // namespace

// ============================================================================
// load_config
// ============================================================================

TEST_CASE("a valid config parses with defaults applied") {
  test::TempDir dir("cfg_ok");
  auto cfg = config::load_config(write_config(dir, base_config(dir.str())));
  CHECK(cfg.concepts.size() == 3);
  CHECK(cfg.concepts[0].concept_id == "dog");
  CHECK(cfg.hirpg.branching_k == 3);
  CHECK(cfg.selection.tau == 0.5);
  CHECK(cfg.selection.strategy == conan::Strategy::conan);
  CHECK(cfg.learner.replay_fraction == 0.5);
  CHECK(cfg.llm.kind == "mock");
  CHECK(cfg.memory_capacity == 64);
}

TEST_CASE("a negative tau is reported at /selection/tau") {
  test::TempDir dir("cfg_tau");
  auto doc = nlohmann::json::parse(base_config(dir.str()));
  doc["selection"]["tau"] = -1.0;
  try {
    config::load_config(write_config(dir, doc.dump()));
    FAIL("expected config error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::config);
    CHECK(std::string(e.what()).find("/selection/tau") != std::string::npos);
  }
}

TEST_CASE("unknown fields are rejected with their path") {
  test::TempDir dir("cfg_unknown");
  auto doc = nlohmann::json::parse(base_config(dir.str()));
  doc["selection"]["temperature"] = 1.0;
  try {
    config::load_config(write_config(dir, doc.dump()));
    FAIL("expected config error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("/selection/temperature") != std::string::npos);
  }
}

TEST_CASE("a missing file is an i/o error") {
  try {
    config::load_config("/nonexistent/gencl.json");
    FAIL("expected io error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::io);
  }
}

TEST_CASE("mock generators must carry a seed") {
  test::TempDir dir("cfg_seed");
  auto doc = nlohmann::json::parse(base_config(dir.str()));
  doc["generators"][0].erase("seed");
  try {
    config::load_config(write_config(dir, doc.dump()));
    FAIL("expected config error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("/generators/0/seed") != std::string::npos);
  }
}

TEST_CASE("the manifest records every seed") {
  test::TempDir dir("cfg_manifest");
  auto cfg = config::load_config(write_config(dir, base_config(dir.str())));
  auto manifest = nlohmann::json::parse(config::manifest_json(cfg));
  CHECK(manifest["hirpg"]["seed"] == 42);
  CHECK(manifest["selection"]["seed"] == 5);
  CHECK(manifest["learner"]["seed"] == 9);
  CHECK(manifest["memory"]["seed"] == 3);
  CHECK(manifest["derived_seeds"].contains("tree_seed/dog"));
  CHECK(manifest["derived_seeds"].contains("replay_seed"));
}

// ============================================================================
// run_command
// ============================================================================

TEST_CASE("prompts writes its file and exits 0") {
  test::TempDir dir("cli_prompts");
  std::string config_path = write_config(dir, base_config(dir.str()));
  CHECK(cli::run_command({"prompts", "--config", config_path}) == 0);

  auto trees = nlohmann::json::parse(io::read_file(dir.file("prompts.json")));
  REQUIRE(trees.is_array());
  REQUIRE(trees.size() == 3);
  CHECK(trees[0]["concept"] == "dog");
  CHECK(trees[0]["nodes"].size() == 13);  // complete (3,2) tree
  CHECK(trees[0]["nodes"][0]["text"] == "A photo of dog");
}

TEST_CASE("unknown subcommands exit 1") {
  CHECK(cli::run_command({"frobnicate"}) == 1);
  CHECK(cli::run_command({}) == 1);
}

TEST_CASE("config validation failures exit 1") {
  test::TempDir dir("cli_badcfg");
  auto doc = nlohmann::json::parse(base_config(dir.str()));
  doc["selection"]["tau"] = -1.0;
  std::string config_path = write_config(dir, doc.dump());
  CHECK(cli::run_command({"prompts", "--config", config_path}) == 1);
}

TEST_CASE("select on an imbalanced features file exits 2") {
  test::TempDir dir("cli_imbalance");
  std::string config_path = write_config(dir, base_config(dir.str()));

  // Two generators with unequal counts.
  std::vector<GeneratedSample> samples;
  for (int i = 0; i < 4; ++i) {
    samples.push_back(test::make_sample("ga:c:" + std::to_string(i), "c", "ga",
                                        {double(i), 1.0}));
  }
  samples.push_back(test::make_sample("gb:c:0", "c", "gb", {0.0, 2.0}));
  io::atomic_write(dir.file("features.jsonl"), io::features_to_jsonl(samples));

  CHECK(cli::run_command({"select", "--config", config_path}) == 2);
}

TEST_CASE("generate then select produce coherent files") {
  test::TempDir dir("cli_pipeline");
  std::string config_path = write_config(dir, base_config(dir.str()));

  REQUIRE(cli::run_command({"generate", "--config", config_path}) == 0);
  auto samples = io::features_from_jsonl(io::read_file(dir.file("features.jsonl")));
  CHECK(samples.size() == 3 * 2 * 10);  // concepts x generators x prompts

  REQUIRE(cli::run_command({"select", "--config", config_path}) == 0);
  auto coreset = nlohmann::json::parse(io::read_file(dir.file("coreset.json")));
  CHECK(coreset["strategy"] == "conan");
  CHECK(coreset["selected"].size() == 30);  // |U_i| = 30

  auto scores = io::scores_from_jsonl(io::read_file(dir.file("scores.jsonl")));
  CHECK(scores.size() == samples.size());
}

TEST_CASE("every stage is idempotent: byte-identical files on re-run") {
  test::TempDir dir("cli_idempotent");
  std::string config_path = write_config(dir, base_config(dir.str()));

  REQUIRE(cli::run_command({"generate", "--config", config_path}) == 0);
  std::string features_once = io::read_file(dir.file("features.jsonl"));
  REQUIRE(cli::run_command({"generate", "--config", config_path}) == 0);
  CHECK(io::read_file(dir.file("features.jsonl")) == features_once);

  REQUIRE(cli::run_command({"select", "--config", config_path}) == 0);
  std::string coreset_once = io::read_file(dir.file("coreset.json"));
  REQUIRE(cli::run_command({"select", "--config", config_path}) == 0);
  CHECK(io::read_file(dir.file("coreset.json")) == coreset_once);
}

TEST_CASE("stream runs offline on mocks and writes all three files") {
  test::TempDir dir("cli_stream");
  std::string config_path = write_config(dir, base_config(dir.str()));
  REQUIRE(cli::run_command({"stream", "--config", config_path}) == 0);

  auto series = io::metrics_from_csv(io::read_file(dir.file("metrics.csv")));
  CHECK(!series.points.empty());
  auto manifest = nlohmann::json::parse(io::read_file(dir.file("run_manifest.json")));
  CHECK(manifest["selection"]["seed"] == 5);
  auto coresets = nlohmann::json::parse(io::read_file(dir.file("coreset.json")));
  CHECK(coresets.is_array());
  CHECK(coresets.size() == 3);
}

TEST_CASE("the --strategy flag overrides the configured strategy") {
  test::TempDir dir("cli_strategy");
  std::string config_path = write_config(dir, base_config(dir.str()));
  REQUIRE(cli::run_command({"generate", "--config", config_path}) == 0);
  REQUIRE(cli::run_command({"select", "--config", config_path, "--strategy", "ews"}) == 0);
  auto coreset = nlohmann::json::parse(io::read_file(dir.file("coreset.json")));
  CHECK(coreset["strategy"] == "ews");
}

TEST_CASE("eval computes requested metrics and nulls the rest") {
  test::TempDir dir("cli_eval");

  metrics::MetricSeries series;
  series.points = {{5, 0.5}, {10, 0.7}};
  io::atomic_write(dir.file("metrics.csv"), io::metrics_to_csv(series));

  std::ofstream preds(dir.file("predictions.jsonl"));
  preds << R"({"prediction":"a","label":"a"})" << "\n"
        << R"({"prediction":"b","label":"a"})" << "\n";
  preds.close();

  std::ofstream caps(dir.file("captions.jsonl"));
  caps << R"({"candidate":"a red bike","references":["a red bike"]})" << "\n";
  caps.close();

  std::string report_path = dir.file("eval_report.json");
  REQUIRE(cli::run_command({"eval", "--metrics", dir.file("metrics.csv"),
                            "--predictions", dir.file("predictions.jsonl"),
                            "--captions", dir.file("captions.jsonl"), "--report",
                            report_path}) == 0);

  auto report = nlohmann::json::parse(io::read_file(report_path));
  CHECK(report["a_auc"] == doctest::Approx(0.6));
  CHECK(report["a_last"] == doctest::Approx(0.7));
  CHECK(report["coverage"].is_null());
  CHECK(report["macro_f1"] == doctest::Approx(1.0 / 3.0));
  CHECK(report["cider"] == doctest::Approx(1.0));
}
