#include "gencl/chat.hpp"

#include <array>
#include <chrono>
#include <cstdlib>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "gencl/prompts.hpp"

// httplib pulls in a lot; keep it out of the headers.
#define CPPHTTPLIB_OPENSSL_SUPPORT_DISABLED
#include <httplib.h>

namespace gencl::chat {

std::string chat_complete(const ChatRequest& request, const ChatBackend& backend) {
  if (request.system_text.empty()) {
    throw Error(ErrorCode::invalid_argument, "chat_complete: empty system_text");
  }
  return backend.complete(request);
}

// ============================================================================
// Mock
// ============================================================================

namespace {

const std::array<const char*, 8> kStyleAdjectives = {
    "grainy",   "vivid",  "minimalist", "cinematic",
    "vintage",  "surreal", "monochrome", "luminous"};

const std::array<const char*, 16> kStyles = {
    "photograph", "painting", "sketch",   "watercolor", "render",
    "portrait",   "illustration", "snapshot", "etching", "collage",
    "mural",      "diorama",  "hologram", "woodcut",    "mosaic",
    "lithograph"};

const std::array<const char*, 16> kLights = {
    "at dawn",
    "at dusk",
    "under neon light",
    "in soft daylight",
    "under moonlight",
    "in golden hour glow",
    "under studio lights",
    "in deep shadow",
    "in morning haze",
    "under a stormy sky",
    "in candlelight",
    "under fluorescent glare",
    "in backlit silhouette",
    "under scattered sunbeams",
    "in twilight tones",
    "under an overcast sky"};

const std::array<const char*, 16> kPlaces = {
    "on a mountain ridge",  "in a busy market",      "beside a quiet lake",
    "in an empty warehouse", "on a cobblestone street", "in a rain-soaked alley",
    "at a carnival ground", "in a botanical garden", "on a rooftop terrace",
    "inside a grand library", "at an abandoned station", "on a windswept beach",
    "in a snowy courtyard", "at a roadside diner",   "in a crowded subway",
    "on a desert plateau"};

const std::array<const char*, 8> kFramings = {
    "from a low angle",     "in extreme close-up",
    "from a bird's-eye view", "in wide framing",
    "with shallow depth of field", "in sharp profile",
    "seen from behind",     "at eye level"};

const std::array<const char*, 8> kPalettes = {
    "with a muted palette",   "with saturated colors", "in sepia tones",
    "with cool blue tones",   "in high contrast",      "with pastel hues",
    "in warm earth tones",    "with metallic sheen"};

uint64_t hash_negatives(const std::vector<std::string>& negatives, uint64_t seed) {
  uint64_t h = splitmix64(seed);
  for (const auto& negative : negatives) {
    h = hash_combine(h, fnv1a64(negative));
    h = hash_combine(h, negative.size());
  }
  return h;
}

/// Recovers the concept from a base prompt ("A photo of X") or a previously
/// mock-emitted phrase by cutting at the first known qualifier marker.
std::string extract_concept(const std::string& parent_text) {
  size_t of = parent_text.find(" of ");
  if (of == std::string::npos) return parent_text;
  size_t start = of + 4;

  size_t cut = parent_text.size();
  for (const char* light : kLights) {
    size_t at = parent_text.find(std::string(" ") + light, start);
    if (at != std::string::npos && at < cut) cut = at;
  }
  std::string subject = parent_text.substr(start, cut - start);
  while (!subject.empty() && subject.back() == ' ') subject.pop_back();
  return subject;
}

std::string compose_phrase(const std::string& subject, uint64_t h) {
  std::ostringstream out;
  out << "A " << kStyleAdjectives[h & 7] << ' ' << kStyles[(h >> 3) & 15]
      << " of " << subject << ' ' << kLights[(h >> 7) & 15] << ' '
      << kPlaces[(h >> 11) & 15] << ' ' << kFramings[(h >> 15) & 7] << ' '
      << kPalettes[(h >> 18) & 7];
  return out.str();
}

std::string to_hex(uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<size_t>(i)] = digits[v & 15];
    v >>= 4;
  }
  return s;
}

}  // namespace

std::string mock_llm_generate(const std::string& system_prompt,
                              const std::vector<std::string>& negatives,
                              uint64_t seed) {
  (void)system_prompt;  // the negatives already carry everything the mock uses
  std::string subject =
      negatives.empty() ? std::string("subject") : extract_concept(negatives[0]);

  uint64_t h = hash_negatives(negatives, seed);
  std::string text = compose_phrase(subject, h);

  std::vector<std::string> normalized;
  normalized.reserve(negatives.size());
  for (const auto& negative : negatives) normalized.push_back(prompts::normalize(negative));

  auto collides = [&](const std::string& candidate) {
    std::string norm = prompts::normalize(candidate);
    for (const auto& n : normalized)
      if (n == norm) return true;
    return false;
  };

  uint64_t tag = h;
  while (collides(text)) {
    tag = splitmix64(tag);
    text = compose_phrase(subject, h) + " (alt " + to_hex(tag) + ")";
  }
  return text;
}

std::string MockChatBackend::complete(const ChatRequest& request) const {
  auto vanilla = prompts::parse_vanilla_request(request.system_text);
  if (vanilla.count > 0) {
    std::ostringstream out;
    std::vector<std::string> emitted;
    for (size_t i = 0; i < vanilla.count; ++i) {
      uint64_t h = hash_combine(hash_combine(splitmix64(seed_), fnv1a64(request.system_text)), i);
      std::string line = compose_phrase(vanilla.concept_name, h);
      uint64_t tag = h;
      auto dup = [&](const std::string& cand) {
        for (const auto& e : emitted)
          if (prompts::normalize(e) == prompts::normalize(cand)) return true;
        return false;
      };
      while (dup(line)) {
        tag = splitmix64(tag);
        line = compose_phrase(vanilla.concept_name, h) + " (alt " + to_hex(tag) + ")";
      }
      emitted.push_back(line);
      out << line << "\n";
    }
    return out.str();
  }

  auto negatives = prompts::parse_negatives(request.system_text);
  return mock_llm_generate(request.system_text, negatives, seed_);
}

// ============================================================================
// HTTP
// ============================================================================

std::string build_chat_body(const std::string& model, const ChatRequest& request) {
  nlohmann::json body = {
      {"model", model},
      {"messages",
       {{{"role", "system"}, {"content", request.system_text}},
        {{"role", "user"}, {"content", request.user_text}}}},
      {"temperature", request.temperature},
  };
  return body.dump();
}

std::string interpret_chat_response(int status, const std::string& body) {
  if (status == 429) {
    throw Error(ErrorCode::backend_rate_limit, "HTTP 429 from chat endpoint");
  }
  if (status < 200 || status >= 300) {
    throw Error(ErrorCode::backend_protocol,
                "HTTP " + std::to_string(status) + " from chat endpoint");
  }
  nlohmann::json parsed = nlohmann::json::parse(body, nullptr, false);
  if (parsed.is_discarded()) {
    throw Error(ErrorCode::backend_protocol, "unparseable chat response body");
  }
  try {
    return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::backend_protocol,
                "chat response missing choices[0].message.content");
  }
}

std::string HttpChatBackend::complete(const ChatRequest& request) const {
  std::string body = build_chat_body(config_.model, request);

  int attempts = config_.rate_limit_retries + 1;
  double backoff_ms = config_.backoff_initial_ms;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    // One client per call; httplib clients are not thread-safe to share.
    httplib::Client client(config_.base_url);
    client.set_connection_timeout(std::chrono::milliseconds(
        static_cast<int64_t>(config_.timeout_seconds * 1000)));
    client.set_read_timeout(std::chrono::milliseconds(
        static_cast<int64_t>(config_.timeout_seconds * 1000)));

    httplib::Headers headers;
    if (const char* key = std::getenv("GENCL_LLM_API_KEY")) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    auto result = client.Post("/chat/completions", headers, body, "application/json");
    if (!result) {
      throw Error(ErrorCode::backend_network,
                  "transport failure: " + httplib::to_string(result.error()));
    }
    try {
      return interpret_chat_response(result->status, result->body);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::backend_rate_limit && attempt + 1 < attempts) {
        std::this_thread::sleep_for(
            std::chrono::milliseconds(static_cast<int64_t>(backoff_ms)));
        backoff_ms *= 2.0;
        continue;
      }
      throw;
    }
  }
  throw Error(ErrorCode::backend_rate_limit, "rate-limit retries exhausted");
}

// ============================================================================
// Recording
// ============================================================================

std::string RecordingChatBackend::complete(const ChatRequest& request) const {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    trace_.push_back({request.system_text, request.user_text,
                      prompts::parse_negatives(request.system_text)});
  }
  return inner_.complete(request);
}

}  // namespace gencl::chat
