#include "gencl/conan.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gencl::conan {

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::conan: return "conan";
    case Strategy::ews: return "ews";
    case Strategy::k_highest_rmd: return "k_highest_rmd";
    case Strategy::k_lowest_rmd: return "k_lowest_rmd";
    case Strategy::inverse_conan: return "inverse_conan";
    case Strategy::moderate: return "moderate";
  }
  return "conan";
}

Strategy strategy_from_string(const std::string& name) {
  if (name == "conan") return Strategy::conan;
  if (name == "ews") return Strategy::ews;
  if (name == "k_highest_rmd") return Strategy::k_highest_rmd;
  if (name == "k_lowest_rmd") return Strategy::k_lowest_rmd;
  if (name == "inverse_conan") return Strategy::inverse_conan;
  if (name == "moderate") return Strategy::moderate;
  throw Error(ErrorCode::invalid_argument, "unknown strategy: " + name);
}

std::vector<rmd::RmdScore> truncate_scores(const std::vector<rmd::RmdScore>& scores,
                                           double l_percent) {
  std::vector<rmd::RmdScore> sorted = scores;
  std::sort(sorted.begin(), sorted.end(),
            [](const rmd::RmdScore& a, const rmd::RmdScore& b) {
              if (a.rmd != b.rmd) return a.rmd < b.rmd;
              return a.sample_id < b.sample_id;
            });
  size_t cut = static_cast<size_t>(
      std::floor(l_percent / 100.0 * static_cast<double>(sorted.size())));
  if (2 * cut >= sorted.size()) cut = sorted.size() / 2;

  std::vector<rmd::RmdScore> retained(sorted.begin() + static_cast<long>(cut),
                                      sorted.end() - static_cast<long>(cut));
  std::sort(retained.begin(), retained.end(),
            [](const rmd::RmdScore& a, const rmd::RmdScore& b) {
              return a.sample_id < b.sample_id;
            });
  return retained;
}

std::vector<double> zscore_normalize(const std::vector<double>& rmd_values) {
  if (rmd_values.empty()) {
    throw Error(ErrorCode::invalid_argument, "zscore_normalize: empty input");
  }
  const double n = static_cast<double>(rmd_values.size());
  double mean = std::accumulate(rmd_values.begin(), rmd_values.end(), 0.0) / n;
  double var = 0.0;
  for (double v : rmd_values) var += (v - mean) * (v - mean);
  double std_dev = std::sqrt(var / n);

  std::vector<double> out(rmd_values.size(), 0.0);
  if (std_dev < 1e-12) return out;
  for (size_t i = 0; i < rmd_values.size(); ++i) out[i] = (rmd_values[i] - mean) / std_dev;
  return out;
}

std::vector<double> selection_probs(const std::vector<double>& normalized,
                                    double tau) {
  if (normalized.empty()) {
    throw Error(ErrorCode::invalid_argument, "selection_probs: empty input");
  }
  if (tau <= 0.0) {
    throw Error(ErrorCode::invalid_argument, "selection_probs: tau must be > 0");
  }
  double top = *std::max_element(normalized.begin(), normalized.end());
  std::vector<double> probs(normalized.size());
  double sum = 0.0;
  for (size_t i = 0; i < normalized.size(); ++i) {
    probs[i] = std::exp((normalized[i] - top) / tau);
    sum += probs[i];
  }
  for (double& p : probs) p /= sum;
  return probs;
}

std::vector<size_t> weighted_sample_without_replacement(
    const std::vector<double>& probs, size_t k, uint64_t seed) {
  if (k > probs.size()) {
    throw Error(ErrorCode::invalid_argument,
                "weighted_sample_without_replacement: k exceeds item count");
  }
  for (double p : probs) {
    if (!(p > 0.0)) {
      throw Error(ErrorCode::invalid_argument,
                  "weighted_sample_without_replacement: probabilities must be positive");
    }
  }

  Rng rng(seed);
  std::vector<std::pair<double, size_t>> keyed(probs.size());
  for (size_t i = 0; i < probs.size(); ++i) {
    keyed[i] = {-std::log(rng.next_open_double()) / probs[i], i};
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<size_t> picked(k);
  for (size_t i = 0; i < k; ++i) picked[i] = keyed[i].second;
  return picked;
}

std::vector<size_t> largest_remainder_quotas(const std::vector<size_t>& weights,
                                             size_t total) {
  const double sum =
      static_cast<double>(std::accumulate(weights.begin(), weights.end(), size_t{0}));
  std::vector<size_t> quotas(weights.size(), 0);
  if (sum == 0.0) return quotas;

  std::vector<std::pair<double, size_t>> remainders;
  size_t assigned = 0;
  for (size_t i = 0; i < weights.size(); ++i) {
    double share = static_cast<double>(total) * static_cast<double>(weights[i]) / sum;
    quotas[i] = static_cast<size_t>(std::floor(share));
    assigned += quotas[i];
    remainders.push_back({share - std::floor(share), i});
  }
  std::sort(remainders.begin(), remainders.end(),
            [](const auto& a, const auto& b) {
              if (a.first != b.first) return a.first > b.first;
              return a.second < b.second;
            });
  for (size_t i = 0; assigned < total && i < remainders.size(); ++i, ++assigned) {
    ++quotas[remainders[i].second];
  }
  return quotas;
}

namespace {

struct ClassBucket {
  std::string class_id;
  std::vector<rmd::RmdScore> scores;
};

/// Groups scores by class (ascending class_id) after checking that every
/// pool sample has exactly one score.
std::vector<ClassBucket> bucket_by_class(const CandidatePool& pool,
                                         const std::vector<rmd::RmdScore>& scores) {
  std::map<std::string, const rmd::RmdScore*> by_id;
  for (const auto& s : scores) by_id[s.sample_id] = &s;

  std::map<std::string, std::vector<rmd::RmdScore>> grouped;
  for (const auto& sample : pool.samples) {
    auto it = by_id.find(sample.sample_id);
    if (it == by_id.end()) {
      throw Error(ErrorCode::invalid_argument,
                  "select: pool sample " + sample.sample_id + " has no score");
    }
    grouped[sample.concept_id].push_back(*it->second);
  }

  std::vector<ClassBucket> buckets;
  for (auto& [class_id, class_scores] : grouped) {
    buckets.push_back({class_id, std::move(class_scores)});
  }
  return buckets;
}

size_t effective_quota(const CandidatePool& pool, const SelectionConfig& config) {
  if (config.total_quota > 0) {
    if (config.total_quota > pool.samples.size()) {
      throw Error(ErrorCode::invalid_argument,
                  "select: total_quota exceeds pool size");
    }
    return config.total_quota;
  }
  // Default |V| = |U_i|: one generator's share of the pool.
  return pool.samples.size() / std::max<size_t>(1, pool.generator_ids.size());
}

Coreset probabilistic_select(const CandidatePool& pool,
                             const std::vector<rmd::RmdScore>& scores,
                             const SelectionConfig& config, bool invert) {
  auto buckets = bucket_by_class(pool, scores);
  size_t total_quota = effective_quota(pool, config);

  std::vector<size_t> class_counts;
  for (const auto& bucket : buckets) class_counts.push_back(bucket.scores.size());
  std::vector<size_t> quotas = largest_remainder_quotas(class_counts, total_quota);

  struct ClassResult {
    std::vector<std::string> ids;
    std::vector<double> probs;
  };
  std::vector<ClassResult> results(buckets.size());
  std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic)
  for (long long b = 0; b < static_cast<long long>(buckets.size()); ++b) {
    try {
      const auto& bucket = buckets[static_cast<size_t>(b)];
      size_t quota = quotas[static_cast<size_t>(b)];
      auto retained = truncate_scores(bucket.scores, config.trunc_percent_l);
      if (quota > retained.size()) {
        throw Error(ErrorCode::quota_infeasible,
                    "class " + bucket.class_id + ": quota " + std::to_string(quota) +
                        " exceeds " + std::to_string(retained.size()) +
                        " retained candidates");
      }
      std::vector<double> values;
      values.reserve(retained.size());
      for (const auto& s : retained) values.push_back(s.rmd);
      std::vector<double> probs = selection_probs(zscore_normalize(values), config.tau);
      if (invert) {
        double sum = 0.0;
        for (double& p : probs) {
          p = 1.0 / p;
          sum += p;
        }
        for (double& p : probs) p /= sum;
      }
      uint64_t class_seed = config.seed ^ fnv1a64(bucket.class_id);
      auto picked = weighted_sample_without_replacement(probs, quota, class_seed);

      auto& result = results[static_cast<size_t>(b)];
      for (size_t idx : picked) {
        result.ids.push_back(retained[idx].sample_id);
        result.probs.push_back(probs[idx]);
      }
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  Coreset coreset;
  coreset.strategy = invert ? Strategy::inverse_conan : Strategy::conan;
  coreset.probabilities.emplace();
  for (size_t b = 0; b < buckets.size(); ++b) {
    coreset.per_class_quota[buckets[b].class_id] = quotas[b];
    for (size_t i = 0; i < results[b].ids.size(); ++i) {
      coreset.sample_ids.push_back(results[b].ids[i]);
      (*coreset.probabilities)[results[b].ids[i]] = results[b].probs[i];
    }
  }
  return coreset;
}

Coreset rank_select(const CandidatePool& pool,
                    const std::vector<rmd::RmdScore>& scores,
                    const SelectionConfig& config, bool highest) {
  auto buckets = bucket_by_class(pool, scores);
  size_t total_quota = effective_quota(pool, config);

  std::vector<size_t> class_counts;
  for (const auto& bucket : buckets) class_counts.push_back(bucket.scores.size());
  std::vector<size_t> quotas = largest_remainder_quotas(class_counts, total_quota);

  Coreset coreset;
  coreset.strategy = highest ? Strategy::k_highest_rmd : Strategy::k_lowest_rmd;
  for (size_t b = 0; b < buckets.size(); ++b) {
    auto sorted = buckets[b].scores;
    std::sort(sorted.begin(), sorted.end(),
              [highest](const rmd::RmdScore& a, const rmd::RmdScore& b) {
                if (a.rmd != b.rmd) return highest ? a.rmd > b.rmd : a.rmd < b.rmd;
                return a.sample_id < b.sample_id;
              });
    size_t quota = quotas[b];
    if (quota > sorted.size()) {
      throw Error(ErrorCode::quota_infeasible,
                  "class " + buckets[b].class_id + ": quota exceeds candidates");
    }
    coreset.per_class_quota[buckets[b].class_id] = quota;
    for (size_t i = 0; i < quota; ++i) coreset.sample_ids.push_back(sorted[i].sample_id);
  }
  return coreset;
}

Coreset ews_select(const CandidatePool& pool, const SelectionConfig& config) {
  size_t total_quota = effective_quota(pool, config);

  std::map<std::string, std::vector<size_t>> by_generator;
  for (size_t i = 0; i < pool.samples.size(); ++i) {
    by_generator[pool.samples[i].generator_id].push_back(i);
  }

  std::vector<size_t> counts;
  for (const auto& gid : pool.generator_ids) counts.push_back(by_generator[gid].size());
  std::vector<size_t> quotas = largest_remainder_quotas(counts, total_quota);

  Coreset coreset;
  coreset.strategy = Strategy::ews;
  for (size_t g = 0; g < pool.generator_ids.size(); ++g) {
    auto& indices = by_generator[pool.generator_ids[g]];
    size_t quota = quotas[g];
    if (quota > indices.size()) {
      throw Error(ErrorCode::quota_infeasible,
                  "generator " + pool.generator_ids[g] + ": quota exceeds candidates");
    }
    Rng rng(config.seed ^ fnv1a64(pool.generator_ids[g]));
    for (size_t i = 0; i < quota; ++i) {
      size_t j = i + rng.next_index(indices.size() - i);
      std::swap(indices[i], indices[j]);
    }
    for (size_t i = 0; i < quota; ++i) {
      const auto& sample = pool.samples[indices[i]];
      coreset.sample_ids.push_back(sample.sample_id);
      ++coreset.per_class_quota[sample.concept_id];
    }
  }
  return coreset;
}

Coreset moderate_select(const CandidatePool& pool,
                        const std::vector<rmd::RmdScore>& scores,
                        const SelectionConfig& config) {
  auto buckets = bucket_by_class(pool, scores);
  size_t total_quota = effective_quota(pool, config);

  std::map<std::string, const GeneratedSample*> by_id;
  for (const auto& sample : pool.samples) by_id[sample.sample_id] = &sample;

  std::vector<size_t> class_counts;
  for (const auto& bucket : buckets) class_counts.push_back(bucket.scores.size());
  std::vector<size_t> quotas = largest_remainder_quotas(class_counts, total_quota);

  Coreset coreset;
  coreset.strategy = Strategy::moderate;
  for (size_t b = 0; b < buckets.size(); ++b) {
    const auto& bucket = buckets[b];
    size_t quota = quotas[b];
    if (quota > bucket.scores.size()) {
      throw Error(ErrorCode::quota_infeasible,
                  "class " + bucket.class_id + ": quota exceeds candidates");
    }

    FeatureVector mean(pool.dim, 0.0);
    for (const auto& s : bucket.scores) {
      const auto& feature = by_id.at(s.sample_id)->feature;
      for (size_t i = 0; i < pool.dim; ++i) mean[i] += feature[i];
    }
    for (double& v : mean) v /= static_cast<double>(bucket.scores.size());

    std::vector<std::pair<double, std::string>> dists;
    for (const auto& s : bucket.scores) {
      const auto& feature = by_id.at(s.sample_id)->feature;
      double sq = 0.0;
      for (size_t i = 0; i < pool.dim; ++i) {
        double diff = feature[i] - mean[i];
        sq += diff * diff;
      }
      dists.push_back({std::sqrt(sq), s.sample_id});
    }

    std::vector<double> sorted_d;
    for (const auto& [d, id] : dists) sorted_d.push_back(d);
    std::sort(sorted_d.begin(), sorted_d.end());
    size_t n = sorted_d.size();
    double median = (n % 2 == 1) ? sorted_d[n / 2]
                                 : 0.5 * (sorted_d[n / 2 - 1] + sorted_d[n / 2]);

    std::sort(dists.begin(), dists.end(),
              [median](const auto& a, const auto& b) {
                double da = std::fabs(a.first - median);
                double db = std::fabs(b.first - median);
                if (da != db) return da < db;
                return a.second < b.second;
              });
    coreset.per_class_quota[bucket.class_id] = quota;
    for (size_t i = 0; i < quota; ++i) coreset.sample_ids.push_back(dists[i].second);
  }
  return coreset;
}

}  // namespace

Coreset conan_select(const CandidatePool& pool,
                     const std::vector<rmd::RmdScore>& scores,
                     const SelectionConfig& config) {
  if (config.strategy != Strategy::conan) {
    throw Error(ErrorCode::invalid_argument, "conan_select: strategy must be conan");
  }
  if (config.tau <= 0.0) {
    throw Error(ErrorCode::invalid_argument, "conan_select: tau must be > 0");
  }
  if (config.trunc_percent_l < 0.0 || config.trunc_percent_l >= 50.0) {
    throw Error(ErrorCode::invalid_argument,
                "conan_select: truncation percent must be in [0, 50)");
  }
  return probabilistic_select(pool, scores, config, /*invert=*/false);
}

Coreset baseline_select(const CandidatePool& pool,
                        const std::vector<rmd::RmdScore>& scores,
                        const SelectionConfig& config) {
  switch (config.strategy) {
    case Strategy::ews:
      return ews_select(pool, config);
    case Strategy::k_highest_rmd:
      return rank_select(pool, scores, config, /*highest=*/true);
    case Strategy::k_lowest_rmd:
      return rank_select(pool, scores, config, /*highest=*/false);
    case Strategy::inverse_conan:
      return probabilistic_select(pool, scores, config, /*invert=*/true);
    case Strategy::moderate:
      return moderate_select(pool, scores, config);
    case Strategy::conan:
      break;
  }
  throw Error(ErrorCode::invalid_argument,
              "baseline_select: strategy must not be conan");
}

Coreset select(const CandidatePool& pool, const std::vector<rmd::RmdScore>& scores,
               const SelectionConfig& config) {
  if (config.strategy == Strategy::conan) return conan_select(pool, scores, config);
  return baseline_select(pool, scores, config);
}

}  // namespace gencl::conan
