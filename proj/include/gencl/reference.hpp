#pragma once

/**
 * Serial reference implementations kept alongside the production kernels.
 *
 * These recompute the same quantities through a different route: one-shot
 * batch sums instead of streaming recurrences, Gauss-Jordan inverses instead
 * of Cholesky solves, plain single-threaded loops instead of OpenMP. Tests
 * compare the two paths; the benchmark tool times them against each other.
 */

#include <string>
#include <utility>
#include <vector>

#include "gencl/core.hpp"
#include "gencl/linalg.hpp"
#include "gencl/rmd.hpp"

namespace gencl::reference {

/// One-shot population mean and covariance by direct summation.
void batch_mean_cov(const std::vector<FeatureVector>& samples,
                    FeatureVector& mean, linalg::Matrix& cov);

/// Dense inverse via Gauss-Jordan elimination with partial pivoting.
linalg::Matrix gauss_jordan_inverse(const linalg::Matrix& a);

/// Full RMD scoring pipeline, serial, recomputed from the raw samples:
/// class means, averaged class covariance, agnostic statistics, ridge
/// inverses, quadratic forms. Matches rmd::score_pool over a registry built
/// from the same samples.
std::vector<rmd::RmdScore> score_pool(const CandidatePool& pool,
                                      double ridge_epsilon);

/// Serial O(n^2) coverage: fraction of real points whose k-NN ball (radius
/// from the real set excluding self, closed) contains a generated point.
double coverage(const std::vector<FeatureVector>& real_feats,
                const std::vector<FeatureVector>& gen_feats, size_t k);

}  // namespace gencl::reference
