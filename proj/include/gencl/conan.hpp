#pragma once

/**
 * Coreset selection over a scored candidate pool.
 *
 * The main strategy truncates per-class RMD outliers, Z-normalizes the
 * remaining scores, turns them into selection probabilities with a
 * temperature softmax, and samples each class quota without replacement.
 * The baseline strategies (equal-weight, k-highest / k-lowest RMD, inverse
 * probabilities, moderate) share the same quota arithmetic.
 *
 * Per-class pipelines are independent; each derives its RNG as
 * seed XOR hash(class_id), so parallel execution is bit-identical to
 * sequential.
 */

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gencl/core.hpp"
#include "gencl/rmd.hpp"

namespace gencl::conan {

enum class Strategy {
  conan,
  ews,
  k_highest_rmd,
  k_lowest_rmd,
  inverse_conan,
  moderate,
};

const char* to_string(Strategy s);
Strategy strategy_from_string(const std::string& name);

struct SelectionConfig {
  double tau = 0.5;
  double trunc_percent_l = 5.0;    // in [0, 50)
  size_t total_quota = 0;          // 0 = one generator's share of the pool
  uint64_t seed = 0;
  Strategy strategy = Strategy::conan;
};

struct Coreset {
  std::vector<std::string> sample_ids;  // draw order within each class
  std::map<std::string, size_t> per_class_quota;
  Strategy strategy = Strategy::conan;
  std::optional<std::map<std::string, double>> probabilities;
};

/// Removes the floor(L/100 * n) highest- and lowest-rmd entries of one
/// class, ties broken by ascending sample_id. Retained entries come back in
/// ascending sample_id order.
std::vector<rmd::RmdScore> truncate_scores(const std::vector<rmd::RmdScore>& scores,
                                           double l_percent);

/// (v - mean) / population-std; all zeros when the std collapses below 1e-12.
std::vector<double> zscore_normalize(const std::vector<double>& rmd_values);

/// Temperature softmax with max-subtraction; sums to 1.
std::vector<double> selection_probs(const std::vector<double>& normalized,
                                    double tau);

/// Weighted sampling without replacement via exponential-race keys
/// (key_i = -ln(u_i) / p_i, take the k smallest). Output in draw order.
std::vector<size_t> weighted_sample_without_replacement(
    const std::vector<double>& probs, size_t k, uint64_t seed);

/// Largest-remainder split of `total` proportionally to `weights`;
/// deterministic tie-break by descending remainder then ascending index.
std::vector<size_t> largest_remainder_quotas(const std::vector<size_t>& weights,
                                             size_t total);

/// The main probabilistic strategy. Every pool sample must be scored.
Coreset conan_select(const CandidatePool& pool,
                     const std::vector<rmd::RmdScore>& scores,
                     const SelectionConfig& config);

/// Dispatch for the non-conan strategies.
Coreset baseline_select(const CandidatePool& pool,
                        const std::vector<rmd::RmdScore>& scores,
                        const SelectionConfig& config);

/// conan_select or baseline_select per config.strategy.
Coreset select(const CandidatePool& pool, const std::vector<rmd::RmdScore>& scores,
               const SelectionConfig& config);

}  // namespace gencl::conan
