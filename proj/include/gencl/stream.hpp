#pragma once

/**
 * The orchestration loop: a concept stream drives prompt-tree construction,
 * per-generator sample generation, coreset selection, and experience-replay
 * training of a pluggable learner, with periodic evaluation.
 *
 * The loop itself is single-threaded by contract (stream order defines the
 * experiment); generation and scoring parallelize internally.
 */

#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <vector>

#include "gencl/chat.hpp"
#include "gencl/conan.hpp"
#include "gencl/core.hpp"
#include "gencl/generators.hpp"
#include "gencl/hirpg.hpp"
#include "gencl/metrics.hpp"
#include "gencl/rmd.hpp"

namespace gencl::stream {

// ============================================================================
// Episodic memory (reservoir)
// ============================================================================

struct EpisodicMemory {
  size_t capacity = 0;
  std::vector<GeneratedSample> slots;
  size_t seen_count = 0;
  Rng rng{0};

  explicit EpisodicMemory(size_t cap = 0, uint64_t seed = 0)
      : capacity(cap), rng(seed) {}
};

/// Classic reservoir step: append while below capacity, afterwards replace a
/// uniformly chosen slot with probability capacity / seen_count.
void reservoir_update(EpisodicMemory& memory, const GeneratedSample& sample);

// ============================================================================
// Learner
// ============================================================================

struct LearnerConfig {
  double learning_rate = 0.1;
  size_t batch_size = 16;
  double iterations_per_sample = 1.0;
  double replay_fraction = 0.5;
  uint64_t seed = 0;
};

using LabeledFeature = std::pair<FeatureVector, std::string>;

/**
 * Multinomial logistic regression over feature vectors: one weight row plus
 * bias per class, rows zero-initialized when a class first appears. The
 * reference learner for the replay loop; heavier backbones sit behind the
 * same three calls (register classes, train step, evaluate).
 */
class LinearLearner {
 public:
  explicit LinearLearner(size_t feature_dim) : dim_(feature_dim) {}

  size_t feature_dim() const { return dim_; }
  size_t class_count() const { return class_ids_.size(); }
  const std::vector<std::string>& class_ids() const { return class_ids_; }

  /// Adds a zero-initialized head row on first sight of a class.
  void register_class(const std::string& class_id);

  /// Mean cross-entropy loss of the batch (pre-step), then one SGD step.
  double train_step(const std::vector<LabeledFeature>& batch, double learning_rate);

  /// Loss only, no update; gradient checks diff this against the step.
  double loss(const std::vector<LabeledFeature>& batch) const;

  /// Argmax class, ties broken by lowest class index.
  std::string predict(const FeatureVector& x) const;

  /// Fraction correct; labels outside the registered classes count as errors.
  double evaluate(const std::vector<LabeledFeature>& test_set) const;

  const std::vector<std::vector<double>>& weights() const { return weights_; }
  std::vector<std::vector<double>>& mutable_weights() { return weights_; }

 private:
  std::vector<double> logits(const FeatureVector& x) const;

  size_t dim_;
  std::vector<std::string> class_ids_;           // first-seen order
  std::map<std::string, size_t> class_index_;
  std::vector<std::vector<double>> weights_;     // per class: dim_ + 1 (bias last)
};

// ============================================================================
// GenCL loop
// ============================================================================

struct GenclComponents {
  const chat::ChatBackend* llm = nullptr;
  std::vector<const generators::Generator*> generator_pool;
  hirpg::HirpgConfig hirpg;
  bool vanilla_prompts = false;  // flat baseline instead of the tree
  conan::SelectionConfig selection;
  LearnerConfig learner;
  size_t memory_capacity = 0;
  uint64_t memory_seed = 0;
};

struct GenclResult {
  LinearLearner learner;
  metrics::MetricSeries series;
  EpisodicMemory memory;
  std::vector<conan::Coreset> coresets;       // one per concept, stream order
  std::vector<std::string> streamed_sample_ids;
};

/**
 * Runs the full loop: per concept, build prompts, generate one sample set
 * per generator, pool them, score against the streaming statistics registry
 * (updated with the pool first), select the coreset, then stream it
 * sample-by-sample through replay training and reservoir updates. Every
 * eval_every streamed samples the learner is evaluated on the union of
 * seen-concept test sets. Deterministic given the component seeds.
 */
GenclResult run_gencl(const std::vector<Concept>& concept_stream,
                      const GenclComponents& components,
                      const std::map<std::string, std::vector<LabeledFeature>>& eval_sets,
                      size_t eval_every);

}  // namespace gencl::stream
