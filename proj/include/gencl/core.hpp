#pragma once

/**
 * Core vocabulary shared by every pipeline stage: error codes, the
 * deterministic RNG / hashing primitives all seeded components derive from,
 * and the sample data model (concepts, feature vectors, candidate pools).
 */

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gencl {

// ============================================================================
// Errors
// ============================================================================

enum class ErrorCode {
  invalid_argument,
  generation,
  format,
  backend_network,
  backend_protocol,
  backend_rate_limit,
  pool_imbalance,
  dimension_mismatch,
  missing_class,
  degenerate_stats,
  quota_infeasible,
  config,
  io,
  pipeline,
};

const char* to_string(ErrorCode code);

/// Single exception type for all domain errors; tests and the CLI dispatch
/// on the code, humans read the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::generation: return "generation error";
    case ErrorCode::format: return "format error";
    case ErrorCode::backend_network: return "backend error (network)";
    case ErrorCode::backend_protocol: return "backend error (protocol)";
    case ErrorCode::backend_rate_limit: return "backend error (rate-limit)";
    case ErrorCode::pool_imbalance: return "pool imbalance";
    case ErrorCode::dimension_mismatch: return "dimension mismatch";
    case ErrorCode::missing_class: return "missing class";
    case ErrorCode::degenerate_stats: return "degenerate statistics";
    case ErrorCode::quota_infeasible: return "quota infeasible";
    case ErrorCode::config: return "config error";
    case ErrorCode::io: return "i/o error";
    case ErrorCode::pipeline: return "pipeline error";
  }
  return "error";
}

// ============================================================================
// Hashing & RNG
// ============================================================================
// Everything stochastic in the pipeline draws from these primitives so that
// outputs are byte-identical across processes. std::hash and the std::
// distributions are implementation-defined and never used.

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline uint64_t hash_combine(uint64_t a, uint64_t b) {
  return splitmix64(a ^ splitmix64(b));
}

/// Deterministic splitmix64-backed stream.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    uint64_t x = state_;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  /// Uniform in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1); safe as a log argument.
  double next_open_double() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n). n must be > 0.
  size_t next_index(size_t n) {
    return static_cast<size_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  /// Standard normal via Box-Muller.
  double next_gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = next_open_double();
    double u2 = next_double();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * M_PI * u2;
    cached_ = r * std::sin(theta);
    have_cached_ = true;
    return r * std::cos(theta);
  }

 private:
  uint64_t state_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

// ============================================================================
// Sample data model
// ============================================================================

struct Concept {
  std::string concept_id;
  std::string name;
  size_t task_index = 0;
};

/// Fixed-length vector of finite doubles; the unit every statistics and
/// selection stage operates on.
using FeatureVector = std::vector<double>;

struct GeneratedSample {
  std::string sample_id;
  std::string concept_id;
  std::string generator_id;
  std::string prompt_id;
  FeatureVector feature;
  std::optional<std::string> payload_ref;
};

/// Union of per-generator sample sets, concatenated in generator order.
struct CandidatePool {
  std::vector<GeneratedSample> samples;
  std::vector<std::string> generator_ids;
  size_t dim = 0;
};

/// Re-checks every pool invariant; returns the violated predicates verbatim
/// (empty means valid).
std::vector<std::string> validate_pool(const CandidatePool& pool);

}  // namespace gencl
