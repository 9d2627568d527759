#include "gencl/reference.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace gencl::reference {

void batch_mean_cov(const std::vector<FeatureVector>& samples,
                    FeatureVector& mean, linalg::Matrix& cov) {
  if (samples.empty()) {
    throw Error(ErrorCode::invalid_argument, "batch_mean_cov: empty input");
  }
  const size_t d = samples.front().size();
  const double n = static_cast<double>(samples.size());

  mean.assign(d, 0.0);
  for (const auto& x : samples)
    for (size_t i = 0; i < d; ++i) mean[i] += x[i];
  for (size_t i = 0; i < d; ++i) mean[i] /= n;

  cov = linalg::Matrix(d);
  for (const auto& x : samples) {
    for (size_t i = 0; i < d; ++i) {
      double di = x[i] - mean[i];
      for (size_t j = 0; j < d; ++j) cov(i, j) += di * (x[j] - mean[j]);
    }
  }
  for (size_t i = 0; i < d; ++i)
    for (size_t j = 0; j < d; ++j) cov(i, j) /= n;
}

linalg::Matrix gauss_jordan_inverse(const linalg::Matrix& a) {
  const size_t n = a.size();
  linalg::Matrix work = a;
  linalg::Matrix inv = linalg::Matrix::identity(n);

  for (size_t col = 0; col < n; ++col) {
    size_t pivot = col;
    for (size_t r = col + 1; r < n; ++r)
      if (std::fabs(work(r, col)) > std::fabs(work(pivot, col))) pivot = r;
    if (work(pivot, col) == 0.0) {
      throw Error(ErrorCode::degenerate_stats, "gauss_jordan_inverse: singular matrix");
    }
    if (pivot != col) {
      for (size_t j = 0; j < n; ++j) {
        std::swap(work(pivot, j), work(col, j));
        std::swap(inv(pivot, j), inv(col, j));
      }
    }
    double scale = work(col, col);
    for (size_t j = 0; j < n; ++j) {
      work(col, j) /= scale;
      inv(col, j) /= scale;
    }
    for (size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      double factor = work(r, col);
      if (factor == 0.0) continue;
      for (size_t j = 0; j < n; ++j) {
        work(r, j) -= factor * work(col, j);
        inv(r, j) -= factor * inv(col, j);
      }
    }
  }
  return inv;
}

std::vector<rmd::RmdScore> score_pool(const CandidatePool& pool,
                                      double ridge_epsilon) {
  const size_t d = pool.dim;

  std::map<std::string, std::vector<FeatureVector>> by_class;
  std::vector<FeatureVector> all;
  for (const auto& sample : pool.samples) {
    by_class[sample.concept_id].push_back(sample.feature);
    all.push_back(sample.feature);
  }

  std::map<std::string, FeatureVector> class_means;
  linalg::Matrix shared(d);
  size_t eligible = 0;
  for (const auto& [class_id, feats] : by_class) {
    FeatureVector mean;
    linalg::Matrix cov;
    batch_mean_cov(feats, mean, cov);
    class_means[class_id] = mean;
    if (feats.size() >= 2) {
      ++eligible;
      for (size_t i = 0; i < d; ++i)
        for (size_t j = 0; j < d; ++j) shared(i, j) += cov(i, j);
    }
  }
  if (eligible == 0) {
    throw Error(ErrorCode::degenerate_stats, "reference::score_pool: no class with N >= 2");
  }
  for (size_t i = 0; i < d; ++i)
    for (size_t j = 0; j < d; ++j) shared(i, j) /= static_cast<double>(eligible);

  FeatureVector agn_mean;
  linalg::Matrix agn_cov;
  batch_mean_cov(all, agn_mean, agn_cov);

  auto ridge_invert = [&](linalg::Matrix m) {
    double tr = linalg::trace(m);
    double ridge = tr > 0.0 ? ridge_epsilon * tr / static_cast<double>(d) : ridge_epsilon;
    for (size_t i = 0; i < d; ++i) m(i, i) += ridge;
    return gauss_jordan_inverse(m);
  };
  linalg::Matrix shared_inv = ridge_invert(shared);
  linalg::Matrix agn_inv = ridge_invert(agn_cov);

  std::vector<rmd::RmdScore> scores;
  scores.reserve(pool.samples.size());
  for (const auto& sample : pool.samples) {
    rmd::RmdScore score;
    score.sample_id = sample.sample_id;
    score.class_id = sample.concept_id;
    score.m_cls = std::max(
        0.0, linalg::quadratic_form(shared_inv, sample.feature,
                                    class_means.at(sample.concept_id)));
    score.m_agn =
        std::max(0.0, linalg::quadratic_form(agn_inv, sample.feature, agn_mean));
    score.rmd = score.m_cls - score.m_agn;
    scores.push_back(score);
  }
  return scores;
}

double coverage(const std::vector<FeatureVector>& real_feats,
                const std::vector<FeatureVector>& gen_feats, size_t k) {
  if (real_feats.size() <= k) {
    throw Error(ErrorCode::invalid_argument,
                "coverage: need more real samples than k");
  }
  auto sq_dist = [](const FeatureVector& a, const FeatureVector& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
      double diff = a[i] - b[i];
      s += diff * diff;
    }
    return s;
  };

  size_t covered = 0;
  for (size_t i = 0; i < real_feats.size(); ++i) {
    std::vector<double> dists;
    dists.reserve(real_feats.size() - 1);
    for (size_t j = 0; j < real_feats.size(); ++j) {
      if (j == i) continue;
      dists.push_back(sq_dist(real_feats[i], real_feats[j]));
    }
    std::nth_element(dists.begin(), dists.begin() + static_cast<long>(k - 1),
                     dists.end());
    double radius_sq = dists[k - 1];
    for (const auto& g : gen_feats) {
      if (sq_dist(real_feats[i], g) <= radius_sq) {
        ++covered;
        break;
      }
    }
  }
  return static_cast<double>(covered) / static_cast<double>(real_feats.size());
}

}  // namespace gencl::reference
