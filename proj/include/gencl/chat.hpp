#pragma once

/**
 * Chat-completion backends.
 *
 * One interface, three implementations: a deterministic mock (pure function
 * of request + seed, offline), an OpenAI-compatible HTTP client, and a
 * recording decorator used by tests to inspect the negative-example lists
 * embedded in each request.
 */

#include <cstdint>
#include <mutex>
#include <string>
#include <vector>

#include "gencl/core.hpp"

namespace gencl::chat {

struct ChatRequest {
  std::string system_text;
  std::string user_text;
  double temperature = 0.7;
  int max_tokens = 256;
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  /// Must be safe to call from concurrent threads.
  virtual std::string complete(const ChatRequest& request) const = 0;
};

/// Validates the request (non-empty system text) and dispatches.
std::string chat_complete(const ChatRequest& request, const ChatBackend& backend);

// ============================================================================
// Deterministic mock
// ============================================================================

/**
 * Emits "A {style} of {concept} {qualifier}" with style and qualifier drawn
 * from fixed lexicons indexed by a 64-bit hash of (negatives, seed). The
 * result is guaranteed distinct from every negative after normalization
 * (falling back to appending the hash), and the concept is recovered from
 * the first negative, which is always the base or parent prompt.
 *
 * Concept names must not contain the lexicon's qualifier phrases; class
 * names and short visual concepts are fine.
 */
std::string mock_llm_generate(const std::string& system_prompt,
                              const std::vector<std::string>& negatives,
                              uint64_t seed);

class MockChatBackend : public ChatBackend {
 public:
  explicit MockChatBackend(uint64_t seed) : seed_(seed) {}

  std::string complete(const ChatRequest& request) const override;

  uint64_t seed() const { return seed_; }

 private:
  uint64_t seed_;
};

// ============================================================================
// HTTP backend (OpenAI-compatible)
// ============================================================================

struct HttpChatConfig {
  std::string base_url;            // e.g. "http://host:port" or with /v1
  std::string model = "gpt-4o";
  double timeout_seconds = 60.0;
  int rate_limit_retries = 3;      // exponential backoff, rate-limit only
  double backoff_initial_ms = 250.0;
};

/// Maps an HTTP (status, body) pair to the assistant text or throws Error
/// with category backend_protocol / backend_rate_limit. Split out so the
/// protocol handling is testable without sockets.
std::string interpret_chat_response(int status, const std::string& body);

/// Serializes the wire body {"model","messages":[...],"temperature"}.
std::string build_chat_body(const std::string& model, const ChatRequest& request);

class HttpChatBackend : public ChatBackend {
 public:
  explicit HttpChatBackend(HttpChatConfig config) : config_(std::move(config)) {}

  /// POST {base_url}/chat/completions, bearer token (if any) from the
  /// GENCL_LLM_API_KEY environment variable.
  std::string complete(const ChatRequest& request) const override;

 private:
  HttpChatConfig config_;
};

// ============================================================================
// Recording decorator
// ============================================================================

class RecordingChatBackend : public ChatBackend {
 public:
  struct Record {
    std::string system_text;
    std::string user_text;
    std::vector<std::string> negatives;  // parsed back out of system_text
  };

  explicit RecordingChatBackend(const ChatBackend& inner) : inner_(inner) {}

  std::string complete(const ChatRequest& request) const override;

  std::vector<Record> trace() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return trace_;
  }

 private:
  const ChatBackend& inner_;
  mutable std::mutex mutex_;
  mutable std::vector<Record> trace_;
};

}  // namespace gencl::chat
