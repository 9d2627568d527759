#pragma once

/**
 * Evaluation metrics: anytime accuracy (A_AUC / A_last), coverage of real
 * samples by generated samples, macro-averaged F1 over supplied predictions,
 * and the TF-IDF n-gram consensus score for sentences.
 *
 * All pure functions; coverage carries the OpenMP kernel, with the serial
 * route in gencl::reference.
 */

#include <cstddef>
#include <string>
#include <vector>

#include "gencl/core.hpp"

namespace gencl::metrics {

struct MetricSeries {
  size_t eval_every = 1;  // stream samples between evaluation points
  std::vector<std::pair<size_t, double>> points;  // (step, accuracy)
};

/// Normalized area under the accuracy curve: the per-point sum scaled by
/// total steps, so constant accuracy a yields a.
double a_auc(const MetricSeries& series);

/// Accuracy of the final point.
double a_last(const MetricSeries& series);

/// Fraction of real samples whose closed k-NN ball (radius measured among
/// the real samples, excluding self) contains at least one generated sample.
double coverage(const std::vector<FeatureVector>& real_feats,
                const std::vector<FeatureVector>& gen_feats, size_t k);

/// Unweighted mean of per-class F1 over the classes present in labels;
/// a class with precision + recall == 0 contributes 0.
double macro_f1(const std::vector<std::string>& predictions,
                const std::vector<std::string>& labels);

struct TokenizedSentence {
  std::vector<std::string> tokens;
};

/// Lowercase, split on whitespace, strip ASCII punctuation.
TokenizedSentence tokenize(const std::string& sentence);

/**
 * TF-IDF n-gram cosine consensus, averaged over n = 1..n_max and over
 * references. IDF is ln(|corpus| / df) over the supplied references with df
 * clamped to at least 1; with a single reference that formula degenerates to
 * all-zero weights, so the vectors fall back to raw term frequencies. A zero
 * vector on either side contributes cosine 0.
 */
double cider(const TokenizedSentence& candidate,
             const std::vector<TokenizedSentence>& references, size_t n_max = 4);

}  // namespace gencl::metrics
