#include "gencl/generators.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <set>

#include <httplib.h>
#include <json.hpp>

namespace gencl {

std::vector<std::string> validate_pool(const CandidatePool& pool) {
  std::vector<std::string> violations;

  std::map<std::string, size_t> counts;
  for (const auto& id : pool.generator_ids) counts[id] = 0;
  std::set<std::string> sample_ids;
  bool dims_ok = true;
  bool finite_ok = true;
  for (const auto& sample : pool.samples) {
    auto it = counts.find(sample.generator_id);
    if (it == counts.end()) {
      violations.push_back("sample " + sample.sample_id +
                           " references unknown generator " + sample.generator_id);
    } else {
      ++it->second;
    }
    if (!sample_ids.insert(sample.sample_id).second) {
      violations.push_back("sample_id not unique: " + sample.sample_id);
    }
    if (sample.feature.size() != pool.dim) dims_ok = false;
    for (double v : sample.feature)
      if (!std::isfinite(v)) finite_ok = false;
  }

  size_t expected = counts.empty() ? 0 : counts.begin()->second;
  for (const auto& [id, count] : counts) {
    if (count != expected) {
      violations.push_back("per-generator sample counts are not all equal");
      break;
    }
  }
  if (!dims_ok) violations.push_back("feature dim differs from pool dim");
  if (!finite_ok) violations.push_back("feature contains non-finite values");
  return violations;
}

namespace generators {

namespace {

FeatureVector concept_centroid(const std::string& concept_id, uint64_t seed,
                               size_t dim) {
  Rng rng(hash_combine(hash_combine(splitmix64(seed), fnv1a64("centroid")),
                       fnv1a64(concept_id)));
  FeatureVector c(dim);
  for (double& v : c) v = 2.0 * rng.next_double() - 1.0;
  return c;
}

FeatureVector generator_offset(const std::string& generator_id, uint64_t seed,
                               size_t dim, double norm) {
  Rng rng(hash_combine(hash_combine(splitmix64(seed), fnv1a64("offset")),
                       fnv1a64(generator_id)));
  FeatureVector o(dim);
  double sq = 0.0;
  for (double& v : o) {
    v = rng.next_gaussian();
    sq += v * v;
  }
  double scale = sq > 0.0 ? norm / std::sqrt(sq) : 0.0;
  for (double& v : o) v *= scale;
  return o;
}

}  // namespace

FeatureVector mock_feature_generate(const Concept& cls,
                                    const std::string& prompt_id,
                                    const std::string& generator_id,
                                    uint64_t seed,
                                    const MockGeneratorConfig& config) {
  FeatureVector feature = concept_centroid(cls.concept_id, seed, config.dim);
  FeatureVector offset =
      generator_offset(generator_id, seed, config.dim, config.offset_norm);

  uint64_t noise_key = splitmix64(seed);
  noise_key = hash_combine(noise_key, fnv1a64(cls.concept_id));
  noise_key = hash_combine(noise_key, fnv1a64(prompt_id));
  noise_key = hash_combine(noise_key, fnv1a64(generator_id));
  Rng noise(noise_key);

  for (size_t i = 0; i < config.dim; ++i) {
    feature[i] += offset[i] + config.noise_sigma * noise.next_gaussian();
  }
  return feature;
}

GeneratedSample MockGenerator::generate(const Concept& cls,
                                        const std::string& prompt_id,
                                        const std::string& prompt_text) const {
  (void)prompt_text;  // the synthetic model keys on the prompt id only
  GeneratedSample sample;
  sample.sample_id = config_.generator_id + ":" + cls.concept_id + ":" + prompt_id;
  sample.concept_id = cls.concept_id;
  sample.generator_id = config_.generator_id;
  sample.prompt_id = prompt_id;
  sample.feature = mock_feature_generate(cls, prompt_id, config_.generator_id,
                                         config_.seed, config_);
  return sample;
}

GeneratedSample HttpFeatureGenerator::generate(const Concept& cls,
                                               const std::string& prompt_id,
                                               const std::string& prompt_text) const {
  httplib::Client client(endpoint_);
  client.set_connection_timeout(
      std::chrono::milliseconds(static_cast<int64_t>(timeout_seconds_ * 1000)));
  client.set_read_timeout(
      std::chrono::milliseconds(static_cast<int64_t>(timeout_seconds_ * 1000)));

  nlohmann::json body = {{"concept", cls.concept_id},
                         {"prompt_id", prompt_id},
                         {"prompt", prompt_text}};
  auto result = client.Post("/generate", body.dump(), "application/json");
  if (!result || result->status < 200 || result->status >= 300) {
    throw Error(ErrorCode::generation,
                "generator " + id_ + ": feature service failed on prompt " +
                    prompt_id +
                    (result ? " (HTTP " + std::to_string(result->status) + ")"
                            : " (transport failure)"));
  }
  nlohmann::json parsed = nlohmann::json::parse(result->body, nullptr, false);
  if (parsed.is_discarded() || !parsed.count("feature")) {
    throw Error(ErrorCode::generation,
                "generator " + id_ + ": bad feature-service reply for prompt " +
                    prompt_id);
  }

  GeneratedSample sample;
  sample.sample_id = id_ + ":" + cls.concept_id + ":" + prompt_id;
  sample.concept_id = cls.concept_id;
  sample.generator_id = id_;
  sample.prompt_id = prompt_id;
  sample.feature = parsed.at("feature").get<FeatureVector>();
  return sample;
}

std::vector<GeneratedSample> generate_samples(
    const Generator& generator,
    const std::vector<std::pair<std::string, std::string>>& prompts,
    const Concept& cls) {
  if (prompts.empty()) {
    throw Error(ErrorCode::invalid_argument, "generate_samples: empty prompt list");
  }
  std::vector<GeneratedSample> samples(prompts.size());

#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < static_cast<long long>(prompts.size()); ++i) {
    const auto& [prompt_id, text] = prompts[static_cast<size_t>(i)];
    try {
      samples[static_cast<size_t>(i)] = generator.generate(cls, prompt_id, text);
    } catch (const std::exception& e) {
      // Re-thrown outside the parallel region via the empty-id sentinel.
      samples[static_cast<size_t>(i)].sample_id.clear();
      samples[static_cast<size_t>(i)].prompt_id = prompt_id;
      samples[static_cast<size_t>(i)].payload_ref = e.what();
    }
  }
  for (const auto& sample : samples) {
    if (sample.sample_id.empty()) {
      throw Error(ErrorCode::generation,
                  "generator " + generator.id() + " failed on prompt " +
                      sample.prompt_id + ": " +
                      sample.payload_ref.value_or("unknown failure"));
    }
  }
  return samples;
}

CandidatePool assemble_pool(
    const std::vector<std::pair<std::string, std::vector<GeneratedSample>>>&
        per_generator) {
  if (per_generator.empty()) {
    throw Error(ErrorCode::invalid_argument, "assemble_pool: no generator lists");
  }

  size_t expected = per_generator.front().second.size();
  for (const auto& [id, samples] : per_generator) {
    if (samples.size() != expected) {
      std::string counts;
      for (const auto& [gid, list] : per_generator) {
        if (!counts.empty()) counts += ", ";
        counts += gid + "=" + std::to_string(list.size());
      }
      throw Error(ErrorCode::pool_imbalance,
                  "per-generator counts differ: " + counts);
    }
  }

  CandidatePool pool;
  size_t dim = 0;
  for (const auto& [id, samples] : per_generator) {
    pool.generator_ids.push_back(id);
    for (const auto& sample : samples) {
      if (dim == 0) dim = sample.feature.size();
      if (sample.feature.size() != dim) {
        throw Error(ErrorCode::dimension_mismatch,
                    "sample " + sample.sample_id + " has dim " +
                        std::to_string(sample.feature.size()) + ", pool dim " +
                        std::to_string(dim));
      }
      pool.samples.push_back(sample);
    }
  }
  pool.dim = dim;
  return pool;
}

}  // namespace generators
}  // namespace gencl
