#include "gencl/config.hpp"

#include <set>

#include <json.hpp>

#include "gencl/io.hpp"

namespace gencl::config {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& pointer, const std::string& reason) {
  throw Error(ErrorCode::config, "validation error at " + pointer + ": " + reason);
}

void require_keys(const json& object, const std::string& pointer,
                  const std::set<std::string>& known,
                  const std::set<std::string>& required) {
  if (!object.is_object()) fail(pointer, "expected an object");
  for (const auto& [key, value] : object.items()) {
    if (!known.count(key)) fail(pointer + "/" + key, "unknown field");
  }
  for (const auto& key : required) {
    if (!object.count(key)) fail(pointer + "/" + key, "missing required field");
  }
}

template <typename T>
T get_as(const json& object, const std::string& pointer, const std::string& key) {
  try {
    return object.at(key).get<T>();
  } catch (const json::exception&) {
    fail(pointer + "/" + key, "wrong type");
  }
}

template <typename T>
T get_or(const json& object, const std::string& pointer, const std::string& key,
         T fallback) {
  if (!object.count(key)) return fallback;
  return get_as<T>(object, pointer, key);
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json doc = json::parse(json_text, nullptr, false);
  if (doc.is_discarded()) {
    throw Error(ErrorCode::config, "config is not valid JSON");
  }

  require_keys(doc, "",
               {"concepts", "hirpg", "llm", "generators", "selection", "learner",
                "memory", "eval_every", "feature_dim", "paths"},
               {"concepts", "hirpg", "generators", "selection", "learner"});

  RunConfig config;

  // concepts
  const json& concepts = doc.at("concepts");
  if (!concepts.is_array() || concepts.empty()) {
    fail("/concepts", "expected a non-empty array");
  }
  std::set<std::string> seen_ids;
  for (size_t i = 0; i < concepts.size(); ++i) {
    std::string pointer = "/concepts/" + std::to_string(i);
    require_keys(concepts[i], pointer, {"id", "name", "task_index"}, {"name"});
    Concept cls;
    cls.name = get_as<std::string>(concepts[i], pointer, "name");
    if (cls.name.empty()) fail(pointer + "/name", "must be non-empty");
    cls.concept_id = get_or<std::string>(concepts[i], pointer, "id", cls.name);
    cls.task_index = get_or<size_t>(concepts[i], pointer, "task_index", i);
    if (!seen_ids.insert(cls.concept_id).second) {
      fail(pointer + "/id", "duplicate concept id " + cls.concept_id);
    }
    config.concepts.push_back(std::move(cls));
  }

  // hirpg
  const json& hirpg = doc.at("hirpg");
  require_keys(hirpg, "/hirpg", {"k", "d", "n", "retry_limit", "seed", "mode"},
               {"k", "d", "n", "seed"});
  config.hirpg.branching_k = get_as<size_t>(hirpg, "/hirpg", "k");
  config.hirpg.depth_d = get_as<size_t>(hirpg, "/hirpg", "d");
  config.hirpg.prompt_budget_n = get_as<size_t>(hirpg, "/hirpg", "n");
  config.hirpg.retry_limit = get_or<size_t>(hirpg, "/hirpg", "retry_limit", 3);
  config.hirpg.seed = get_as<uint64_t>(hirpg, "/hirpg", "seed");
  std::string mode = get_or<std::string>(hirpg, "/hirpg", "mode", "hirpg");
  if (mode == "vanilla") {
    config.vanilla_prompts = true;
  } else if (mode != "hirpg") {
    fail("/hirpg/mode", "must be \"hirpg\" or \"vanilla\"");
  }
  if (config.hirpg.branching_k < 1) fail("/hirpg/k", "must be >= 1");
  if (config.hirpg.prompt_budget_n < 1) fail("/hirpg/n", "must be >= 1");
  if (!config.vanilla_prompts) {
    try {
      hirpg::validate(config.hirpg);
    } catch (const Error& e) {
      fail("/hirpg/n", e.what());
    }
  }

  // llm (optional; defaults to the mock backend keyed off the hirpg seed)
  config.llm.seed = config.hirpg.seed;
  if (doc.count("llm")) {
    const json& llm = doc.at("llm");
    require_keys(llm, "/llm", {"kind", "seed", "base_url", "model"}, {});
    config.llm.kind = get_or<std::string>(llm, "/llm", "kind", "mock");
    if (config.llm.kind != "mock" && config.llm.kind != "http") {
      fail("/llm/kind", "must be \"mock\" or \"http\"");
    }
    config.llm.seed = get_or<uint64_t>(llm, "/llm", "seed", config.hirpg.seed);
    config.llm.base_url = get_or<std::string>(llm, "/llm", "base_url", "");
    config.llm.model = get_or<std::string>(llm, "/llm", "model", "gpt-4o");
    if (config.llm.kind == "http" && config.llm.base_url.empty()) {
      fail("/llm/base_url", "required for the http backend");
    }
  }

  // generators
  const json& generators = doc.at("generators");
  if (!generators.is_array() || generators.empty()) {
    fail("/generators", "expected a non-empty array");
  }
  std::set<std::string> generator_ids;
  for (size_t i = 0; i < generators.size(); ++i) {
    std::string pointer = "/generators/" + std::to_string(i);
    require_keys(generators[i], pointer,
                 {"generator_id", "kind", "endpoint", "seed", "noise_sigma",
                  "offset_norm"},
                 {"generator_id", "kind"});
    GeneratorSpec spec;
    spec.generator_id = get_as<std::string>(generators[i], pointer, "generator_id");
    spec.kind = get_as<std::string>(generators[i], pointer, "kind");
    if (spec.kind != "mock" && spec.kind != "http") {
      fail(pointer + "/kind", "must be \"mock\" or \"http\"");
    }
    if (generators[i].count("endpoint")) {
      spec.endpoint = get_as<std::string>(generators[i], pointer, "endpoint");
    }
    if (spec.kind == "http" && !spec.endpoint) {
      fail(pointer + "/endpoint", "required for http generators");
    }
    if (spec.kind == "mock" && !generators[i].count("seed")) {
      fail(pointer + "/seed", "required for mock generators");
    }
    spec.seed = get_or<uint64_t>(generators[i], pointer, "seed", 0);
    spec.noise_sigma = get_or<double>(generators[i], pointer, "noise_sigma", 0.3);
    spec.offset_norm = get_or<double>(generators[i], pointer, "offset_norm", 0.5);
    if (spec.noise_sigma < 0.0) fail(pointer + "/noise_sigma", "must be >= 0");
    if (!generator_ids.insert(spec.generator_id).second) {
      fail(pointer + "/generator_id", "duplicate generator id");
    }
    config.generators.push_back(std::move(spec));
  }

  // selection
  const json& selection = doc.at("selection");
  require_keys(selection, "/selection", {"strategy", "tau", "L", "quota", "seed"},
               {"seed"});
  config.selection.tau = get_or<double>(selection, "/selection", "tau", 0.5);
  if (config.selection.tau <= 0.0) fail("/selection/tau", "must be > 0");
  config.selection.trunc_percent_l = get_or<double>(selection, "/selection", "L", 5.0);
  if (config.selection.trunc_percent_l < 0.0 || config.selection.trunc_percent_l >= 50.0) {
    fail("/selection/L", "must be in [0, 50)");
  }
  config.selection.total_quota = get_or<size_t>(selection, "/selection", "quota", 0);
  config.selection.seed = get_as<uint64_t>(selection, "/selection", "seed");
  std::string strategy =
      get_or<std::string>(selection, "/selection", "strategy", "conan");
  try {
    config.selection.strategy = conan::strategy_from_string(strategy);
  } catch (const Error&) {
    fail("/selection/strategy", "unknown strategy " + strategy);
  }

  // learner
  const json& learner = doc.at("learner");
  require_keys(learner, "/learner",
               {"learning_rate", "batch_size", "iterations_per_sample",
                "replay_fraction", "seed"},
               {"seed"});
  config.learner.learning_rate =
      get_or<double>(learner, "/learner", "learning_rate", 0.1);
  if (config.learner.learning_rate <= 0.0) fail("/learner/learning_rate", "must be > 0");
  config.learner.batch_size = get_or<size_t>(learner, "/learner", "batch_size", 16);
  if (config.learner.batch_size < 1) fail("/learner/batch_size", "must be >= 1");
  config.learner.iterations_per_sample =
      get_or<double>(learner, "/learner", "iterations_per_sample", 1.0);
  if (config.learner.iterations_per_sample <= 0.0) {
    fail("/learner/iterations_per_sample", "must be > 0");
  }
  config.learner.replay_fraction =
      get_or<double>(learner, "/learner", "replay_fraction", 0.5);
  if (config.learner.replay_fraction < 0.0 || config.learner.replay_fraction > 1.0) {
    fail("/learner/replay_fraction", "must be in [0, 1]");
  }
  config.learner.seed = get_as<uint64_t>(learner, "/learner", "seed");

  // memory (optional)
  if (doc.count("memory")) {
    const json& memory = doc.at("memory");
    require_keys(memory, "/memory", {"capacity", "seed"}, {"capacity"});
    config.memory_capacity = get_as<size_t>(memory, "/memory", "capacity");
    config.memory_seed = get_or<uint64_t>(memory, "/memory", "seed", 0);
  }

  config.eval_every = get_or<size_t>(doc, "", "eval_every", 1);
  if (config.eval_every < 1) fail("/eval_every", "must be >= 1");
  config.feature_dim = get_or<size_t>(doc, "", "feature_dim", 16);
  if (config.feature_dim < 1) fail("/feature_dim", "must be >= 1");

  // paths (optional, defaults relative to workdir)
  if (doc.count("paths")) {
    const json& paths = doc.at("paths");
    require_keys(paths, "/paths",
                 {"workdir", "prompts", "features", "coreset", "metrics"}, {});
    config.paths.workdir = get_or<std::string>(paths, "/paths", "workdir", ".");
    config.paths.prompts = get_or<std::string>(paths, "/paths", "prompts", "prompts.json");
    config.paths.features =
        get_or<std::string>(paths, "/paths", "features", "features.jsonl");
    config.paths.coreset = get_or<std::string>(paths, "/paths", "coreset", "coreset.json");
    config.paths.metrics = get_or<std::string>(paths, "/paths", "metrics", "metrics.csv");
  }

  return config;
}

RunConfig load_config(const std::string& path) {
  return parse_config(io::read_file(path));
}

std::string manifest_json(const RunConfig& config) {
  json concepts = json::array();
  for (const auto& cls : config.concepts) {
    concepts.push_back({{"id", cls.concept_id},
                        {"name", cls.name},
                        {"task_index", cls.task_index}});
  }
  json generators = json::array();
  for (const auto& spec : config.generators) {
    json entry = {{"generator_id", spec.generator_id},
                  {"kind", spec.kind},
                  {"seed", spec.seed},
                  {"noise_sigma", spec.noise_sigma},
                  {"offset_norm", spec.offset_norm}};
    if (spec.endpoint) entry["endpoint"] = *spec.endpoint;
    generators.push_back(std::move(entry));
  }
  json derived = json::object();
  for (const auto& cls : config.concepts) {
    derived["tree_seed/" + cls.concept_id] =
        hash_combine(splitmix64(config.hirpg.seed), fnv1a64(cls.concept_id));
  }
  derived["replay_seed"] =
      hash_combine(splitmix64(config.learner.seed), fnv1a64("replay"));

  json doc = {
      {"concepts", std::move(concepts)},
      {"hirpg",
       {{"k", config.hirpg.branching_k},
        {"d", config.hirpg.depth_d},
        {"n", config.hirpg.prompt_budget_n},
        {"retry_limit", config.hirpg.retry_limit},
        {"seed", config.hirpg.seed},
        {"mode", config.vanilla_prompts ? "vanilla" : "hirpg"}}},
      {"llm",
       {{"kind", config.llm.kind},
        {"seed", config.llm.seed},
        {"model", config.llm.model}}},
      {"generators", std::move(generators)},
      {"selection",
       {{"strategy", conan::to_string(config.selection.strategy)},
        {"tau", config.selection.tau},
        {"L", config.selection.trunc_percent_l},
        {"quota", config.selection.total_quota},
        {"seed", config.selection.seed}}},
      {"learner",
       {{"learning_rate", config.learner.learning_rate},
        {"batch_size", config.learner.batch_size},
        {"iterations_per_sample", config.learner.iterations_per_sample},
        {"replay_fraction", config.learner.replay_fraction},
        {"seed", config.learner.seed}}},
      {"memory", {{"capacity", config.memory_capacity}, {"seed", config.memory_seed}}},
      {"eval_every", config.eval_every},
      {"feature_dim", config.feature_dim},
      {"derived_seeds", std::move(derived)},
  };
  return doc.dump(2);
}

}  // namespace gencl::config
