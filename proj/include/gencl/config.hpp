#pragma once

/**
 * Run configuration: one JSON file drives every pipeline stage so a run is
 * reproducible from its manifest. Parsing is strict — unknown fields and
 * invariant violations are reported with a JSON-pointer-style path.
 */

#include <optional>
#include <string>
#include <vector>

#include "gencl/conan.hpp"
#include "gencl/core.hpp"
#include "gencl/hirpg.hpp"
#include "gencl/stream.hpp"

namespace gencl::config {

struct GeneratorSpec {
  std::string generator_id;
  std::string kind;  // "mock" | "http"
  std::optional<std::string> endpoint;
  uint64_t seed = 0;
  double noise_sigma = 0.3;
  double offset_norm = 0.5;
};

struct LlmSpec {
  std::string kind = "mock";  // "mock" | "http"
  uint64_t seed = 0;
  std::string base_url;       // http only
  std::string model = "gpt-4o";
};

struct Paths {
  std::string workdir = ".";
  std::string prompts = "prompts.json";
  std::string features = "features.jsonl";
  std::string coreset = "coreset.json";
  std::string metrics = "metrics.csv";
};

struct RunConfig {
  std::vector<Concept> concepts;
  hirpg::HirpgConfig hirpg;
  bool vanilla_prompts = false;
  LlmSpec llm;
  std::vector<GeneratorSpec> generators;
  conan::SelectionConfig selection;
  stream::LearnerConfig learner;
  size_t memory_capacity = 0;
  uint64_t memory_seed = 0;
  size_t eval_every = 1;
  size_t feature_dim = 16;
  Paths paths;
};

/// Parses and validates; throws Error(config) / Error(io) with the violating
/// field's path in the message.
RunConfig load_config(const std::string& path);

RunConfig parse_config(const std::string& json_text);

/// run_manifest.json: the full effective configuration plus every derived
/// seed, sufficient to replay the run.
std::string manifest_json(const RunConfig& config);

}  // namespace gencl::config
