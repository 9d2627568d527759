#pragma once

// Shared fixtures for the test binaries: scripted chat backends, synthetic
// pools, and a temp-dir guard for the file-based stages.

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "gencl/chat.hpp"
#include "gencl/core.hpp"
#include "gencl/generators.hpp"

namespace gencl::test {

/// Replays canned responses in order; throws the configured error first if
/// failures_before_success > 0.
class ScriptedChatBackend : public chat::ChatBackend {
 public:
  explicit ScriptedChatBackend(std::vector<std::string> responses,
                               size_t failures_before_success = 0)
      : responses_(std::move(responses)), failures_(failures_before_success) {}

  std::string complete(const chat::ChatRequest&) const override {
    if (failures_ > 0) {
      --failures_;
      throw Error(ErrorCode::backend_network, "scripted transport failure");
    }
    if (next_ >= responses_.size()) {
      throw Error(ErrorCode::backend_protocol, "script exhausted");
    }
    return responses_[next_++];
  }

  size_t calls_served() const { return next_; }

 private:
  std::vector<std::string> responses_;
  mutable size_t failures_;
  mutable size_t next_ = 0;
};

inline GeneratedSample make_sample(const std::string& sample_id,
                                   const std::string& concept_id,
                                   const std::string& generator_id,
                                   FeatureVector feature) {
  GeneratedSample s;
  s.sample_id = sample_id;
  s.concept_id = concept_id;
  s.generator_id = generator_id;
  s.prompt_id = sample_id;
  s.feature = std::move(feature);
  return s;
}

/// Pool of `per_class` samples per class around per-class integer-offset
/// centroids, Gaussian noise from the given sigma, one generator.
inline CandidatePool make_gaussian_pool(size_t classes, size_t per_class,
                                        size_t dim, double sigma, uint64_t seed) {
  Rng rng(seed);
  std::vector<std::pair<std::string, std::vector<GeneratedSample>>> lists(1);
  lists[0].first = "g0";
  for (size_t c = 0; c < classes; ++c) {
    std::string class_id = "class" + std::to_string(c);
    for (size_t i = 0; i < per_class; ++i) {
      FeatureVector x(dim);
      for (size_t k = 0; k < dim; ++k) {
        x[k] = static_cast<double>((c + 1) * ((k % classes == c) ? 2 : 0)) +
               sigma * rng.next_gaussian();
      }
      lists[0].second.push_back(make_sample(
          "g0:" + class_id + ":p" + std::to_string(i), class_id, "g0", x));
    }
  }
  return generators::assemble_pool(lists);
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("gencl_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string str() const { return path_.string(); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace gencl::test
