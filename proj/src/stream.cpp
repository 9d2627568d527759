#include "gencl/stream.hpp"

#include <algorithm>
#include <cmath>

namespace gencl::stream {

void reservoir_update(EpisodicMemory& memory, const GeneratedSample& sample) {
  ++memory.seen_count;
  if (memory.capacity == 0) return;
  if (memory.slots.size() < memory.capacity) {
    memory.slots.push_back(sample);
    return;
  }
  size_t j = memory.rng.next_index(memory.seen_count);
  if (j < memory.capacity) memory.slots[j] = sample;
}

// ============================================================================
// LinearLearner
// ============================================================================

void LinearLearner::register_class(const std::string& class_id) {
  if (class_index_.count(class_id)) return;
  class_index_[class_id] = class_ids_.size();
  class_ids_.push_back(class_id);
  weights_.push_back(std::vector<double>(dim_ + 1, 0.0));
}

std::vector<double> LinearLearner::logits(const FeatureVector& x) const {
  std::vector<double> out(weights_.size(), 0.0);
  for (size_t c = 0; c < weights_.size(); ++c) {
    double z = weights_[c][dim_];  // bias
    for (size_t i = 0; i < dim_; ++i) z += weights_[c][i] * x[i];
    out[c] = z;
  }
  return out;
}

namespace {

void softmax_inplace(std::vector<double>& z) {
  double top = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - top);
    sum += v;
  }
  for (double& v : z) v /= sum;
}

}  // namespace

double LinearLearner::loss(const std::vector<LabeledFeature>& batch) const {
  if (batch.empty()) {
    throw Error(ErrorCode::invalid_argument, "learner: empty batch");
  }
  double total = 0.0;
  for (const auto& [x, label] : batch) {
    if (x.size() != dim_) {
      throw Error(ErrorCode::dimension_mismatch, "learner: feature dim mismatch");
    }
    auto it = class_index_.find(label);
    if (it == class_index_.end()) {
      throw Error(ErrorCode::missing_class, "learner: unregistered class " + label);
    }
    std::vector<double> p = logits(x);
    softmax_inplace(p);
    total += -std::log(std::max(p[it->second], 1e-300));
  }
  return total / static_cast<double>(batch.size());
}

double LinearLearner::train_step(const std::vector<LabeledFeature>& batch,
                                 double learning_rate) {
  double pre_loss = loss(batch);

  std::vector<std::vector<double>> grad(weights_.size(),
                                        std::vector<double>(dim_ + 1, 0.0));
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  for (const auto& [x, label] : batch) {
    std::vector<double> p = logits(x);
    softmax_inplace(p);
    size_t y = class_index_.at(label);
    for (size_t c = 0; c < weights_.size(); ++c) {
      double coeff = (p[c] - (c == y ? 1.0 : 0.0)) * inv_b;
      for (size_t i = 0; i < dim_; ++i) grad[c][i] += coeff * x[i];
      grad[c][dim_] += coeff;
    }
  }
  for (size_t c = 0; c < weights_.size(); ++c)
    for (size_t i = 0; i <= dim_; ++i) weights_[c][i] -= learning_rate * grad[c][i];
  return pre_loss;
}

std::string LinearLearner::predict(const FeatureVector& x) const {
  std::vector<double> z = logits(x);
  size_t best = 0;
  for (size_t c = 1; c < z.size(); ++c) {
    if (z[c] > z[best]) best = c;  // ties keep the lowest class index
  }
  return class_ids_[best];
}

double LinearLearner::evaluate(const std::vector<LabeledFeature>& test_set) const {
  if (test_set.empty()) {
    throw Error(ErrorCode::invalid_argument, "evaluate: empty test set");
  }
  if (class_ids_.empty()) return 0.0;
  size_t correct = 0;
  for (const auto& [x, label] : test_set) {
    if (predict(x) == label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test_set.size());
}

// ============================================================================
// GenCL loop
// ============================================================================

namespace {

/// Builds one replay batch: the most recent stream samples for the fresh
/// share, uniform draws from episodic memory for the rest. With an empty
/// memory the batch is entirely fresh.
std::vector<LabeledFeature> compose_batch(const std::deque<GeneratedSample>& recent,
                                          const EpisodicMemory& memory,
                                          const LearnerConfig& config, Rng& replay_rng) {
  size_t replay_quota = memory.slots.empty()
                            ? 0
                            : static_cast<size_t>(std::llround(
                                  config.replay_fraction *
                                  static_cast<double>(config.batch_size)));
  size_t fresh_quota = config.batch_size - replay_quota;

  std::vector<LabeledFeature> batch;
  batch.reserve(config.batch_size);
  for (size_t i = 0; i < fresh_quota; ++i) {
    const auto& sample = recent[i % recent.size()];  // newest first
    batch.push_back({sample.feature, sample.concept_id});
  }
  for (size_t i = 0; i < replay_quota; ++i) {
    const auto& sample = memory.slots[replay_rng.next_index(memory.slots.size())];
    batch.push_back({sample.feature, sample.concept_id});
  }
  return batch;
}

}  // namespace

GenclResult run_gencl(const std::vector<Concept>& concept_stream,
                      const GenclComponents& components,
                      const std::map<std::string, std::vector<LabeledFeature>>& eval_sets,
                      size_t eval_every) {
  if (eval_every < 1) {
    throw Error(ErrorCode::invalid_argument, "run_gencl: eval_every must be >= 1");
  }
  if (!components.llm || components.generator_pool.empty()) {
    throw Error(ErrorCode::invalid_argument,
                "run_gencl: llm and at least one generator are required");
  }
  for (const auto& cls : concept_stream) {
    if (!eval_sets.count(cls.concept_id)) {
      throw Error(ErrorCode::invalid_argument,
                  "run_gencl: no eval data for concept " + cls.concept_id);
    }
  }

  GenclResult result{LinearLearner(0), {}, EpisodicMemory(components.memory_capacity,
                                                          components.memory_seed),
                     {}, {}};
  result.series.eval_every = eval_every;

  rmd::StatsRegistry registry;
  std::deque<GeneratedSample> recent;
  std::vector<LabeledFeature> seen_eval;
  bool learner_ready = false;

  Rng replay_rng(hash_combine(splitmix64(components.learner.seed), fnv1a64("replay")));
  double step_budget = 0.0;
  size_t streamed = 0;

  for (const auto& cls : concept_stream) {
    // psi: diverse prompts for the concept.
    std::vector<std::pair<std::string, std::string>> prompts;
    if (components.vanilla_prompts) {
      auto texts = hirpg::flat_generate(cls.name, components.hirpg.prompt_budget_n,
                                        *components.llm);
      for (size_t i = 0; i < texts.size(); ++i) {
        prompts.emplace_back("flat." + std::to_string(i), texts[i]);
      }
    } else {
      hirpg::HirpgConfig tree_config = components.hirpg;
      tree_config.seed = hash_combine(splitmix64(components.hirpg.seed),
                                      fnv1a64(cls.concept_id));
      auto tree = hirpg::build_tree(cls.name, tree_config, *components.llm);
      prompts = hirpg::sample_prompt_nodes(tree, tree_config.prompt_budget_n,
                                           tree_config.seed);
    }

    // G: one equally sized sample set per generator.
    std::vector<std::pair<std::string, std::vector<GeneratedSample>>> per_generator;
    for (const auto* generator : components.generator_pool) {
      per_generator.emplace_back(
          generator->id(), generators::generate_samples(*generator, prompts, cls));
    }
    CandidatePool pool = generators::assemble_pool(per_generator);

    // Delta: streaming statistics absorb the pool, then the pool is scored
    // and the coreset drawn.
    for (const auto& sample : pool.samples) {
      rmd::registry_update(registry, sample.concept_id, sample.feature);
    }
    auto scores = rmd::score_pool(pool, rmd::make_scoring_context(registry));
    conan::Coreset coreset = conan::select(pool, scores, components.selection);
    if (coreset.sample_ids.empty()) {
      throw Error(ErrorCode::pipeline,
                  "run_gencl: empty coreset for concept " + cls.concept_id);
    }
    result.coresets.push_back(coreset);

    std::map<std::string, const GeneratedSample*> by_id;
    for (const auto& sample : pool.samples) by_id[sample.sample_id] = &sample;

    if (!learner_ready) {
      result.learner = LinearLearner(pool.dim);
      learner_ready = true;
    }
    result.learner.register_class(cls.concept_id);
    for (const auto& [feature, label] : eval_sets.at(cls.concept_id)) {
      seen_eval.push_back({feature, label});
    }

    // f_theta: stream the coreset sample-by-sample with experience replay.
    for (const auto& sample_id : coreset.sample_ids) {
      const GeneratedSample& incoming = *by_id.at(sample_id);
      recent.push_front(incoming);
      while (recent.size() > components.learner.batch_size) recent.pop_back();
      result.streamed_sample_ids.push_back(sample_id);
      ++streamed;

      step_budget += components.learner.iterations_per_sample;
      while (step_budget >= 1.0) {
        auto batch = compose_batch(recent, result.memory, components.learner,
                                   replay_rng);
        result.learner.train_step(batch, components.learner.learning_rate);
        step_budget -= 1.0;
      }

      reservoir_update(result.memory, incoming);

      if (streamed % eval_every == 0) {
        double accuracy = result.learner.evaluate(seen_eval);
        result.series.points.push_back({streamed, accuracy});
      }
    }
  }
  return result;
}

}  // namespace gencl::stream
