#include "gencl/rmd.hpp"

#include <cmath>

namespace gencl::rmd {

void stats_update_inplace(RunningStats& stats, const FeatureVector& x) {
  if (stats.count == 0) {
    stats.mean = x;
    stats.cov = linalg::Matrix(x.size());
    stats.count = 1;
    return;
  }
  if (x.size() != stats.dim()) {
    throw Error(ErrorCode::dimension_mismatch,
                "stats_update: x has dim " + std::to_string(x.size()) +
                    ", stats dim " + std::to_string(stats.dim()));
  }

  const size_t d = stats.dim();
  const double n = static_cast<double>(stats.count);

  FeatureVector delta(d), delta_new(d);
  for (size_t i = 0; i < d; ++i) delta[i] = x[i] - stats.mean[i];
  for (size_t i = 0; i < d; ++i) stats.mean[i] = (n * stats.mean[i] + x[i]) / (n + 1.0);
  for (size_t i = 0; i < d; ++i) delta_new[i] = x[i] - stats.mean[i];

  // delta and delta_new are parallel, so the symmetrized outer product is
  // the exact update; writing it symmetrically keeps the matrix symmetric
  // to the last bit.
  for (size_t i = 0; i < d; ++i) {
    for (size_t j = i; j < d; ++j) {
      double outer = 0.5 * (delta[i] * delta_new[j] + delta[j] * delta_new[i]);
      double v = (n * stats.cov(i, j) + outer) / (n + 1.0);
      stats.cov(i, j) = v;
      stats.cov(j, i) = v;
    }
  }
  ++stats.count;
}

RunningStats stats_update(const RunningStats& stats, const FeatureVector& x) {
  RunningStats next = stats;
  stats_update_inplace(next, x);
  return next;
}

StatsRegistry batch_stats(
    const std::vector<std::pair<std::string, FeatureVector>>& samples,
    double ridge_epsilon) {
  if (samples.empty()) {
    throw Error(ErrorCode::invalid_argument, "batch_stats: empty input");
  }
  StatsRegistry registry;
  registry.ridge_epsilon = ridge_epsilon;
  registry.dim = samples.front().second.size();
  for (const auto& [class_id, x] : samples) {
    registry_update(registry, class_id, x);
  }
  return registry;
}

void registry_update(StatsRegistry& registry, const std::string& class_id,
                     const FeatureVector& x) {
  if (registry.dim == 0) registry.dim = x.size();
  if (x.size() != registry.dim) {
    throw Error(ErrorCode::dimension_mismatch,
                "registry_update: x has dim " + std::to_string(x.size()) +
                    ", registry dim " + std::to_string(registry.dim));
  }
  stats_update_inplace(registry.per_class[class_id], x);
  stats_update_inplace(registry.agnostic, x);
}

linalg::Matrix shared_class_covariance(const StatsRegistry& registry) {
  size_t eligible = 0;
  linalg::Matrix sum(registry.dim);
  for (const auto& [class_id, stats] : registry.per_class) {
    if (stats.count < 2) continue;
    ++eligible;
    for (size_t i = 0; i < registry.dim; ++i)
      for (size_t j = 0; j < registry.dim; ++j) sum(i, j) += stats.cov(i, j);
  }
  if (eligible == 0) {
    throw Error(ErrorCode::degenerate_stats,
                "shared_class_covariance: no class has N >= 2");
  }
  for (size_t i = 0; i < registry.dim; ++i)
    for (size_t j = 0; j < registry.dim; ++j) sum(i, j) /= static_cast<double>(eligible);
  return sum;
}

linalg::Matrix regularized_inverse(const linalg::Matrix& sigma, double epsilon) {
  if (linalg::asymmetry(sigma) > 1e-9) {
    throw Error(ErrorCode::invalid_argument,
                "regularized_inverse: matrix is not symmetric");
  }
  const size_t d = sigma.size();
  double tr = linalg::trace(sigma);
  double ridge = tr > 0.0 ? epsilon * tr / static_cast<double>(d) : epsilon;

  linalg::Matrix ridged = sigma;
  for (size_t i = 0; i < d; ++i) ridged(i, i) += ridge;

  linalg::Matrix inverse;
  if (!linalg::cholesky_inverse(ridged, inverse)) {
    throw Error(ErrorCode::degenerate_stats,
                "regularized_inverse: ridge matrix is not positive definite");
  }
  return inverse;
}

double mahalanobis_sq(const FeatureVector& x, const FeatureVector& mean,
                      const linalg::Matrix& sigma_inv) {
  if (x.size() != mean.size() || x.size() != sigma_inv.size()) {
    throw Error(ErrorCode::dimension_mismatch,
                "mahalanobis_sq: dimensions disagree");
  }
  double q = linalg::quadratic_form(sigma_inv, x, mean);
  if (q < 0.0) {
    if (q < -1e-9) {
      throw Error(ErrorCode::degenerate_stats,
                  "mahalanobis_sq: quadratic form is negative beyond tolerance");
    }
    q = 0.0;
  }
  return q;
}

ScoringContext make_scoring_context(const StatsRegistry& registry) {
  if (registry.agnostic.count < 2) {
    throw Error(ErrorCode::degenerate_stats,
                "scoring context requires at least two samples overall");
  }
  ScoringContext context;
  for (const auto& [class_id, stats] : registry.per_class) {
    context.class_means[class_id] = stats.mean;
  }
  context.agnostic_mean = registry.agnostic.mean;
  context.shared_inverse =
      regularized_inverse(shared_class_covariance(registry), registry.ridge_epsilon);
  context.agnostic_inverse =
      regularized_inverse(registry.agnostic.cov, registry.ridge_epsilon);
  return context;
}

RmdScore rmd_score(const GeneratedSample& sample, const ScoringContext& context) {
  auto it = context.class_means.find(sample.concept_id);
  if (it == context.class_means.end()) {
    throw Error(ErrorCode::missing_class,
                "rmd_score: class " + sample.concept_id + " not in registry");
  }
  RmdScore score;
  score.sample_id = sample.sample_id;
  score.class_id = sample.concept_id;
  score.m_cls = mahalanobis_sq(sample.feature, it->second, context.shared_inverse);
  score.m_agn =
      mahalanobis_sq(sample.feature, context.agnostic_mean, context.agnostic_inverse);
  score.rmd = score.m_cls - score.m_agn;
  return score;
}

RmdScore rmd_score(const GeneratedSample& sample, const StatsRegistry& registry) {
  if (!registry.per_class.count(sample.concept_id)) {
    throw Error(ErrorCode::missing_class,
                "rmd_score: class " + sample.concept_id + " not in registry");
  }
  return rmd_score(sample, make_scoring_context(registry));
}

std::vector<RmdScore> score_pool(const CandidatePool& pool,
                                 const ScoringContext& context) {
  std::vector<RmdScore> scores(pool.samples.size());
  std::exception_ptr failure;

#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(pool.samples.size()); ++i) {
    try {
      scores[static_cast<size_t>(i)] =
          rmd_score(pool.samples[static_cast<size_t>(i)], context);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return scores;
}

}  // namespace gencl::rmd
