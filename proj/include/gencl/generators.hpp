#pragma once

/**
 * Sample generators and candidate-pool assembly.
 *
 * A generator turns (concept, prompt) into a feature-vector sample. The mock
 * generator is a seeded synthetic model standing in for the full T2I +
 * feature-extraction path: per-concept centroid, per-generator offset,
 * Gaussian noise. Real deployments plug a feature-producing service behind
 * the same interface; features are first-class inputs everywhere downstream.
 */

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gencl/core.hpp"

namespace gencl::generators {

class Generator {
 public:
  virtual ~Generator() = default;
  virtual const std::string& id() const = 0;
  /// Must be safe to call concurrently.
  virtual GeneratedSample generate(const Concept& cls,
                                   const std::string& prompt_id,
                                   const std::string& prompt_text) const = 0;
};

struct MockGeneratorConfig {
  std::string generator_id;
  size_t dim = 16;
  uint64_t seed = 0;
  double noise_sigma = 0.3;
  double offset_norm = 0.5;
};

/// feature = centroid(concept) + offset(generator) + noise, where the
/// centroid has entries in [-1, 1], the offset has the configured norm, and
/// the noise is isotropic Gaussian keyed by (concept, prompt, generator,
/// seed). Pure function of its inputs.
FeatureVector mock_feature_generate(const Concept& cls,
                                    const std::string& prompt_id,
                                    const std::string& generator_id,
                                    uint64_t seed,
                                    const MockGeneratorConfig& config);

class MockGenerator : public Generator {
 public:
  explicit MockGenerator(MockGeneratorConfig config) : config_(std::move(config)) {}

  const std::string& id() const override { return config_.generator_id; }

  GeneratedSample generate(const Concept& cls, const std::string& prompt_id,
                           const std::string& prompt_text) const override;

  const MockGeneratorConfig& config() const { return config_; }

 private:
  MockGeneratorConfig config_;
};

/**
 * Generator backed by an external feature service: POST {endpoint}/generate
 * with {"concept","prompt_id","prompt"}, reply {"feature":[...]}. Stands in
 * for a real T2I + feature-extraction deployment.
 */
class HttpFeatureGenerator : public Generator {
 public:
  HttpFeatureGenerator(std::string generator_id, std::string endpoint,
                       double timeout_seconds = 60.0)
      : id_(std::move(generator_id)),
        endpoint_(std::move(endpoint)),
        timeout_seconds_(timeout_seconds) {}

  const std::string& id() const override { return id_; }

  GeneratedSample generate(const Concept& cls, const std::string& prompt_id,
                           const std::string& prompt_text) const override;

 private:
  std::string id_;
  std::string endpoint_;
  double timeout_seconds_;
};

/// One sample per prompt, ids "{generator}:{concept}:{prompt_id}", merged in
/// prompt order regardless of scheduling.
std::vector<GeneratedSample> generate_samples(
    const Generator& generator,
    const std::vector<std::pair<std::string, std::string>>& prompts,
    const Concept& cls);

/// Concatenates per-generator sample lists in generator order after checking
/// the equal-count and uniform-dimension contracts.
CandidatePool assemble_pool(
    const std::vector<std::pair<std::string, std::vector<GeneratedSample>>>&
        per_generator);

}  // namespace gencl::generators
