#pragma once

/**
 * Streaming and batch estimation of class-wise / class-agnostic feature
 * statistics, and the relative Mahalanobis distance (RMD) score built on
 * them.
 *
 * Statistics follow the simple-moving-average recurrences
 *   mu'    = (N mu + x) / (N + 1)
 *   Sigma' = (N Sigma + Delta Delta_new^T) / (N + 1)
 * which reproduce the population (divide-by-N) covariance exactly, so batch
 * oracles use the population convention too.
 *
 * Scoring convention: m_cls and m_agn are positive squared distances and
 * rmd = m_cls - m_agn, so a sample far from its class prototype but close to
 * the global prototype scores high (hard to classify).
 */

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gencl/core.hpp"
#include "gencl/linalg.hpp"

namespace gencl::rmd {

struct RunningStats {
  size_t count = 0;
  FeatureVector mean;     // empty until the first update
  linalg::Matrix cov;     // population convention; zero while count <= 1

  size_t dim() const { return mean.size(); }
};

/// One SMA update step; returns the advanced statistics.
RunningStats stats_update(const RunningStats& stats, const FeatureVector& x);

/// In-place variant used by the streaming paths.
void stats_update_inplace(RunningStats& stats, const FeatureVector& x);

struct StatsRegistry {
  std::map<std::string, RunningStats> per_class;
  RunningStats agnostic;
  size_t dim = 0;
  double ridge_epsilon = 1e-6;
};

/// Folds every (class, feature) pair in input order; the agnostic
/// accumulator sees all samples.
StatsRegistry batch_stats(
    const std::vector<std::pair<std::string, FeatureVector>>& samples,
    double ridge_epsilon = 1e-6);

/// Streaming insert used by the continual-learning loop.
void registry_update(StatsRegistry& registry, const std::string& class_id,
                     const FeatureVector& x);

/// Unweighted elementwise mean of per-class covariances over classes with
/// N >= 2. Throws Error(degenerate_stats) when no class qualifies.
linalg::Matrix shared_class_covariance(const StatsRegistry& registry);

/// Inverse of (Sigma + eps tr(Sigma)/d I), or of (Sigma + eps I) when the
/// trace is zero. Symmetric solve; input must be symmetric within tolerance.
linalg::Matrix regularized_inverse(const linalg::Matrix& sigma, double epsilon);

/// (x - mean)^T sigma_inv (x - mean), clamping tiny negatives to zero.
double mahalanobis_sq(const FeatureVector& x, const FeatureVector& mean,
                      const linalg::Matrix& sigma_inv);

struct RmdScore {
  std::string sample_id;
  std::string class_id;
  double m_cls = 0.0;
  double m_agn = 0.0;
  double rmd = 0.0;
};

/// Frozen view of a registry with the two ridge inverses precomputed;
/// scoring against it is read-only and parallel-safe.
struct ScoringContext {
  std::map<std::string, FeatureVector> class_means;
  FeatureVector agnostic_mean;
  linalg::Matrix shared_inverse;    // averaged class covariance, ridge-inverted
  linalg::Matrix agnostic_inverse;  // agnostic covariance, ridge-inverted
};

ScoringContext make_scoring_context(const StatsRegistry& registry);

RmdScore rmd_score(const GeneratedSample& sample, const ScoringContext& context);
RmdScore rmd_score(const GeneratedSample& sample, const StatsRegistry& registry);

/// Scores every pool sample (OpenMP over samples); output order follows the
/// pool, so the result is identical at any thread count.
std::vector<RmdScore> score_pool(const CandidatePool& pool,
                                 const ScoringContext& context);

}  // namespace gencl::rmd
