#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "gencl/chat.hpp"
#include "gencl/generators.hpp"
#include "gencl/hirpg.hpp"
#include "gencl/io.hpp"
#include "gencl/prompts.hpp"
#include "helpers.hpp"

using namespace gencl;

// ============================================================================
// Mock chat backend
// ============================================================================

TEST_CASE("mock chat is a pure function of request and seed") {
  chat::MockChatBackend backend(42);
  chat::ChatRequest request;
  request.system_text = prompts::render_system_prompt({"A photo of dog"});
  request.user_text = "Reply with the new prompt only.";

  std::string first = chat::chat_complete(request, backend);
  std::string second = chat::chat_complete(request, backend);
  CHECK(first == second);

  chat::MockChatBackend same_seed(42);
  CHECK(chat::chat_complete(request, same_seed) == first);

  chat::MockChatBackend other_seed(43);
  CHECK(chat::chat_complete(request, other_seed) != first);
}

TEST_CASE("mock output never equals an embedded negative") {
  std::vector<std::string> negatives{"A photo of dog"};
  for (uint64_t seed = 0; seed < 20; ++seed) {
    std::string out = chat::mock_llm_generate("", negatives, seed);
    for (const auto& negative : negatives) {
      CHECK(prompts::normalize(out) != prompts::normalize(negative));
    }
    negatives.push_back(out);
  }
}

TEST_CASE("mock_llm_generate is deterministic") {
  std::vector<std::string> negatives{"A photo of guitar", "A vivid sketch of guitar"};
  CHECK(chat::mock_llm_generate("", negatives, 7) ==
        chat::mock_llm_generate("", negatives, 7));
}

TEST_CASE("all 57 responses within one (7,2) build are distinct") {
  chat::MockChatBackend backend(3);
  hirpg::HirpgConfig config{7, 2, 50, 3, 3};
  auto tree = hirpg::build_tree("dog", config, backend);
  REQUIRE(tree.nodes.size() == 57);
  std::set<std::string> normalized;
  for (const auto& node : tree.nodes) {
    normalized.insert(prompts::normalize(node.text));
  }
  CHECK(normalized.size() == 57);
}

TEST_CASE("chat_complete rejects an empty system text") {
  chat::MockChatBackend backend(1);
  chat::ChatRequest request;
  request.user_text = "hi";
  CHECK_THROWS_AS(chat::chat_complete(request, backend), Error);
}

// ============================================================================
// HTTP protocol handling
// ============================================================================

TEST_CASE("chat response interpretation maps statuses to error categories") {
  CHECK(chat::interpret_chat_response(
            200, R"({"choices":[{"message":{"content":"hello"}}]})") == "hello");

  auto code_of = [](int status, const std::string& body) {
    try {
      chat::interpret_chat_response(status, body);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::io;  // not reached
  };
  CHECK(code_of(500, "{}") == ErrorCode::backend_protocol);
  CHECK(code_of(429, "{}") == ErrorCode::backend_rate_limit);
  CHECK(code_of(200, "not json") == ErrorCode::backend_protocol);
  CHECK(code_of(200, R"({"choices":[]})") == ErrorCode::backend_protocol);
}

TEST_CASE("chat wire body carries model, roles, and temperature") {
  chat::ChatRequest request;
  request.system_text = "sys";
  request.user_text = "usr";
  request.temperature = 0.25;
  std::string body = chat::build_chat_body("test-model", request);
  CHECK(body.find("\"model\":\"test-model\"") != std::string::npos);
  CHECK(body.find("\"role\":\"system\"") != std::string::npos);
  CHECK(body.find("\"role\":\"user\"") != std::string::npos);
  CHECK(body.find("\"temperature\":0.25") != std::string::npos);
}

// ============================================================================
// Mock feature generator
// ============================================================================

TEST_CASE("mock features are deterministic") {
  Concept cls{"dog", "dog", 0};
  generators::MockGeneratorConfig config;
  config.generator_id = "gA";
  config.dim = 16;
  config.seed = 5;
  auto a = generators::mock_feature_generate(cls, "p1", "gA", 5, config);
  auto b = generators::mock_feature_generate(cls, "p1", "gA", 5, config);
  CHECK(a == b);
  REQUIRE(a.size() == 16);
}

TEST_CASE("two generators differ by their offsets on average") {
  // Mean over many prompts isolates o(gA) - o(gB); per-coordinate noise of
  // the mean difference is sigma * sqrt(2/n).
  Concept cls{"dog", "dog", 0};
  generators::MockGeneratorConfig config;
  config.dim = 8;
  config.seed = 11;
  const size_t n = 1000;

  FeatureVector mean_diff(config.dim, 0.0);
  for (size_t i = 0; i < n; ++i) {
    std::string prompt = "p" + std::to_string(i);
    auto a = generators::mock_feature_generate(cls, prompt, "gA", 11, config);
    auto b = generators::mock_feature_generate(cls, prompt, "gB", 11, config);
    for (size_t k = 0; k < config.dim; ++k) {
      mean_diff[k] += (a[k] - b[k]) / static_cast<double>(n);
    }
  }

  // Reconstruct the declared offset difference from noise-free calls.
  generators::MockGeneratorConfig noise_free = config;
  noise_free.noise_sigma = 0.0;
  auto pure_a = generators::mock_feature_generate(cls, "q", "gA", 11, noise_free);
  auto pure_b = generators::mock_feature_generate(cls, "q", "gB", 11, noise_free);

  double tolerance =
      4.0 * config.noise_sigma * std::sqrt(2.0 / static_cast<double>(n));
  for (size_t k = 0; k < config.dim; ++k) {
    CHECK(std::fabs(mean_diff[k] - (pure_a[k] - pure_b[k])) < tolerance);
  }
}

TEST_CASE("distinct concepts get distinct centroids") {
  generators::MockGeneratorConfig config;
  config.dim = 16;
  config.noise_sigma = 0.0;
  Concept dog{"dog", "dog", 0};
  Concept cat{"cat", "cat", 1};
  auto a = generators::mock_feature_generate(dog, "p", "g", 1, config);
  auto b = generators::mock_feature_generate(cat, "p", "g", 1, config);
  CHECK(a != b);
}

// ============================================================================
// generate_samples / assemble_pool
// ============================================================================

TEST_CASE("generate_samples yields one sample per prompt with unique ids") {
  generators::MockGeneratorConfig config;
  config.generator_id = "gA";
  config.dim = 8;
  config.seed = 2;
  generators::MockGenerator generator(config);
  Concept cls{"dog", "dog", 0};

  std::vector<std::pair<std::string, std::string>> prompts;
  for (size_t i = 0; i < 50; ++i) {
    prompts.emplace_back("p" + std::to_string(i), "text " + std::to_string(i));
  }
  auto samples = generators::generate_samples(generator, prompts, cls);
  REQUIRE(samples.size() == 50);
  std::set<std::string> ids;
  for (const auto& s : samples) ids.insert(s.sample_id);
  CHECK(ids.size() == 50);
  CHECK(samples.front().sample_id == "gA:dog:p0");

  auto again = generators::generate_samples(generator, prompts, cls);
  for (size_t i = 0; i < samples.size(); ++i) {
    CHECK(samples[i].feature == again[i].feature);
  }

  CHECK_THROWS_AS(generators::generate_samples(generator, {}, cls), Error);
}

TEST_CASE("assemble_pool validates equal counts and concatenates stably") {
  auto make_list = [](const std::string& gid, size_t n) {
    std::vector<GeneratedSample> list;
    for (size_t i = 0; i < n; ++i) {
      list.push_back(test::make_sample(gid + ":c:p" + std::to_string(i), "c", gid,
                                       FeatureVector{double(i), 0.0}));
    }
    return list;
  };

  auto pool = generators::assemble_pool(
      {{"g1", make_list("g1", 100)}, {"g2", make_list("g2", 100)}});
  CHECK(pool.samples.size() == 200);
  CHECK(pool.generator_ids == std::vector<std::string>{"g1", "g2"});
  // Stable: g1's samples first, in input order.
  for (size_t i = 0; i < 100; ++i) {
    CHECK(pool.samples[i].sample_id == "g1:c:p" + std::to_string(i));
  }

  try {
    generators::assemble_pool(
        {{"g1", make_list("g1", 100)}, {"g2", make_list("g2", 99)}});
    FAIL("expected pool imbalance");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::pool_imbalance);
    CHECK(std::string(e.what()).find("g2=99") != std::string::npos);
  }

  auto single = generators::assemble_pool({{"solo", make_list("solo", 5)}});
  CHECK(single.samples.size() == 5);
  CHECK(single.dim == 2);
}

TEST_CASE("validate_pool reports the exact violated predicate") {
  CandidatePool pool;
  pool.generator_ids = {"g1"};
  pool.dim = 2;
  pool.samples.push_back(test::make_sample("a", "c", "g1", {1.0, 2.0}));
  pool.samples.push_back(test::make_sample("a", "c", "g1", {1.0, 2.0}));
  auto violations = validate_pool(pool);
  REQUIRE(!violations.empty());
  CHECK(violations[0].find("sample_id not unique") != std::string::npos);

  CandidatePool ok;
  ok.generator_ids = {"g1"};
  ok.dim = 2;
  ok.samples.push_back(test::make_sample("a", "c", "g1", {1.0, 2.0}));
  CHECK(validate_pool(ok).empty());
}

// ============================================================================
// features.jsonl
// ============================================================================

TEST_CASE("feature file round-trips and rejects non-finite values") {
  std::vector<GeneratedSample> samples{
      test::make_sample("g:c:p0", "c", "g", {0.5, -1.25}),
      test::make_sample("g:c:p1", "c", "g", {3.0, 0.0}),
  };
  std::string text = io::features_to_jsonl(samples);
  auto parsed = io::features_from_jsonl(text);
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[0].feature == samples[0].feature);
  CHECK(parsed[1].sample_id == "g:c:p1");

  std::string bad =
      R"({"sample_id":"x","concept":"c","generator":"g","prompt_id":"p","feature":[1e999]})";
  CHECK_THROWS_AS(io::features_from_jsonl(bad), Error);
}
