#include "gencl/cli.hpp"

#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "gencl/chat.hpp"
#include "gencl/config.hpp"
#include "gencl/core.hpp"
#include "gencl/generators.hpp"
#include "gencl/hirpg.hpp"
#include "gencl/io.hpp"
#include "gencl/metrics.hpp"
#include "gencl/rmd.hpp"
#include "gencl/stream.hpp"

namespace gencl::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CommonOptions {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<std::string> strategy;
  std::optional<std::string> out_dir;
};

config::RunConfig load_effective_config(const CommonOptions& options) {
  config::RunConfig cfg = config::load_config(options.config_path);
  if (options.seed) {
    uint64_t master = splitmix64(*options.seed);
    cfg.hirpg.seed = hash_combine(master, fnv1a64("hirpg"));
    cfg.llm.seed = hash_combine(master, fnv1a64("llm"));
    cfg.selection.seed = hash_combine(master, fnv1a64("selection"));
    cfg.learner.seed = hash_combine(master, fnv1a64("learner"));
    cfg.memory_seed = hash_combine(master, fnv1a64("memory"));
    for (auto& spec : cfg.generators) {
      spec.seed = hash_combine(master, fnv1a64("generator:" + spec.generator_id));
    }
  }
  if (options.strategy) {
    cfg.selection.strategy = conan::strategy_from_string(*options.strategy);
  }
  if (options.out_dir) cfg.paths.workdir = *options.out_dir;
  return cfg;
}

std::string resolve(const config::RunConfig& cfg, const std::string& path) {
  fs::path p(path);
  if (p.is_absolute()) return path;
  return (fs::path(cfg.paths.workdir) / p).string();
}

std::unique_ptr<chat::ChatBackend> make_llm(const config::RunConfig& cfg) {
  if (cfg.llm.kind == "http") {
    chat::HttpChatConfig http;
    http.base_url = cfg.llm.base_url;
    http.model = cfg.llm.model;
    return std::make_unique<chat::HttpChatBackend>(http);
  }
  return std::make_unique<chat::MockChatBackend>(cfg.llm.seed);
}

std::vector<std::unique_ptr<generators::Generator>> make_generators(
    const config::RunConfig& cfg) {
  std::vector<std::unique_ptr<generators::Generator>> out;
  for (const auto& spec : cfg.generators) {
    if (spec.kind == "mock") {
      generators::MockGeneratorConfig mock;
      mock.generator_id = spec.generator_id;
      mock.dim = cfg.feature_dim;
      mock.seed = spec.seed;
      mock.noise_sigma = spec.noise_sigma;
      mock.offset_norm = spec.offset_norm;
      out.push_back(std::make_unique<generators::MockGenerator>(mock));
    } else {
      out.push_back(std::make_unique<generators::HttpFeatureGenerator>(
          spec.generator_id, *spec.endpoint));
    }
  }
  return out;
}

/// Per-concept prompt set, seeded identically to the stream loop so the
/// file-based stages reproduce it.
std::vector<std::pair<std::string, std::string>> prompts_for(
    const config::RunConfig& cfg, const Concept& cls, const chat::ChatBackend& llm) {
  if (cfg.vanilla_prompts) {
    auto texts = hirpg::flat_generate(cls.name, cfg.hirpg.prompt_budget_n, llm);
    std::vector<std::pair<std::string, std::string>> out;
    for (size_t i = 0; i < texts.size(); ++i) {
      out.emplace_back("flat." + std::to_string(i), texts[i]);
    }
    return out;
  }
  hirpg::HirpgConfig tree_config = cfg.hirpg;
  tree_config.seed = hash_combine(splitmix64(cfg.hirpg.seed), fnv1a64(cls.concept_id));
  auto tree = hirpg::build_tree(cls.name, tree_config, llm);
  return hirpg::sample_prompt_nodes(tree, tree_config.prompt_budget_n,
                                    tree_config.seed);
}

int cmd_prompts(const CommonOptions& options) {
  config::RunConfig cfg = load_effective_config(options);
  auto llm = make_llm(cfg);

  json trees = json::array();
  for (const auto& cls : cfg.concepts) {
    if (cfg.vanilla_prompts) {
      auto texts = hirpg::flat_generate(cls.name, cfg.hirpg.prompt_budget_n, *llm);
      json nodes = json::array();
      for (size_t i = 0; i < texts.size(); ++i) {
        nodes.push_back({{"id", "flat." + std::to_string(i)},
                         {"parent", nullptr},
                         {"depth", 0},
                         {"text", texts[i]}});
      }
      trees.push_back({{"concept", cls.concept_id},
                       {"k", cfg.hirpg.branching_k},
                       {"d", cfg.hirpg.depth_d},
                       {"seed", cfg.hirpg.seed},
                       {"nodes", std::move(nodes)}});
    } else {
      hirpg::HirpgConfig tree_config = cfg.hirpg;
      tree_config.seed =
          hash_combine(splitmix64(cfg.hirpg.seed), fnv1a64(cls.concept_id));
      auto tree = hirpg::build_tree(cls.name, tree_config, *llm);
      trees.push_back(json::parse(hirpg::tree_to_json(tree)));
    }
  }

  std::string path = resolve(cfg, cfg.paths.prompts);
  io::atomic_write(path, trees.dump(2) + "\n");
  std::cout << "wrote " << path << "\n";
  return 0;
}

int cmd_generate(const CommonOptions& options) {
  config::RunConfig cfg = load_effective_config(options);
  auto llm = make_llm(cfg);
  auto generator_pool = make_generators(cfg);

  std::vector<GeneratedSample> all;
  for (const auto& cls : cfg.concepts) {
    auto prompts = prompts_for(cfg, cls, *llm);
    for (const auto& generator : generator_pool) {
      auto samples = generators::generate_samples(*generator, prompts, cls);
      all.insert(all.end(), samples.begin(), samples.end());
    }
  }

  std::string path = resolve(cfg, cfg.paths.features);
  io::atomic_write(path, io::features_to_jsonl(all));
  std::cout << "wrote " << path << " (" << all.size() << " samples)\n";
  return 0;
}

int cmd_select(const CommonOptions& options) {
  config::RunConfig cfg = load_effective_config(options);
  auto samples = io::features_from_jsonl(io::read_file(resolve(cfg, cfg.paths.features)));
  CandidatePool pool = io::pool_from_samples(std::move(samples));

  std::vector<std::pair<std::string, FeatureVector>> labeled;
  labeled.reserve(pool.samples.size());
  for (const auto& sample : pool.samples) {
    labeled.emplace_back(sample.concept_id, sample.feature);
  }
  rmd::StatsRegistry registry = rmd::batch_stats(labeled);
  auto scores = rmd::score_pool(pool, rmd::make_scoring_context(registry));
  conan::Coreset coreset = conan::select(pool, scores, cfg.selection);

  std::string scores_path = resolve(cfg, "scores.jsonl");
  io::atomic_write(scores_path, io::scores_to_jsonl(scores));
  std::string coreset_path = resolve(cfg, cfg.paths.coreset);
  io::atomic_write(coreset_path, io::coreset_to_json(coreset, cfg.selection) + "\n");
  std::cout << "wrote " << coreset_path << " (" << coreset.sample_ids.size()
            << " of " << pool.samples.size() << " samples) and " << scores_path
            << "\n";
  return 0;
}

int cmd_stream(const CommonOptions& options, size_t eval_size) {
  config::RunConfig cfg = load_effective_config(options);
  auto llm = make_llm(cfg);
  auto generator_pool = make_generators(cfg);

  stream::GenclComponents components;
  components.llm = llm.get();
  for (const auto& generator : generator_pool) {
    components.generator_pool.push_back(generator.get());
  }
  components.hirpg = cfg.hirpg;
  components.vanilla_prompts = cfg.vanilla_prompts;
  components.selection = cfg.selection;
  components.learner = cfg.learner;
  components.memory_capacity = cfg.memory_capacity;
  components.memory_seed = cfg.memory_seed;

  // Held-out features drawn from the first generator's synthetic model with
  // reserved prompt ids, so evaluation matches the training distribution.
  std::map<std::string, std::vector<stream::LabeledFeature>> eval_sets;
  if (cfg.generators.empty() || cfg.generators.front().kind != "mock") {
    throw Error(ErrorCode::pipeline,
                "stream: evaluation sets require a mock generator first in the pool");
  }
  generators::MockGeneratorConfig eval_model;
  eval_model.generator_id = cfg.generators.front().generator_id;
  eval_model.dim = cfg.feature_dim;
  eval_model.seed = cfg.generators.front().seed;
  eval_model.noise_sigma = cfg.generators.front().noise_sigma;
  eval_model.offset_norm = cfg.generators.front().offset_norm;
  for (const auto& cls : cfg.concepts) {
    auto& set = eval_sets[cls.concept_id];
    for (size_t i = 0; i < eval_size; ++i) {
      set.push_back({generators::mock_feature_generate(
                         cls, "eval:" + std::to_string(i),
                         eval_model.generator_id, eval_model.seed, eval_model),
                     cls.concept_id});
    }
  }

  stream::GenclResult result =
      stream::run_gencl(cfg.concepts, components, eval_sets, cfg.eval_every);

  std::string metrics_path = resolve(cfg, cfg.paths.metrics);
  io::atomic_write(metrics_path, io::metrics_to_csv(result.series));

  json coresets = json::array();
  for (size_t i = 0; i < result.coresets.size(); ++i) {
    coresets.push_back(
        json::parse(io::coreset_to_json(result.coresets[i], cfg.selection)));
  }
  std::string coreset_path = resolve(cfg, cfg.paths.coreset);
  io::atomic_write(coreset_path, coresets.dump(2) + "\n");

  std::string manifest_path = resolve(cfg, "run_manifest.json");
  io::atomic_write(manifest_path, config::manifest_json(cfg) + "\n");

  std::cout << "wrote " << metrics_path << ", " << coreset_path << ", "
            << manifest_path << "\n";
  if (!result.series.points.empty()) {
    std::cout << "a_auc=" << io::format_double(metrics::a_auc(result.series))
              << " a_last=" << io::format_double(metrics::a_last(result.series))
              << "\n";
  }
  return 0;
}

struct EvalInputs {
  std::string metrics_path;
  std::string real_path;
  std::string gen_path;
  size_t knn = 5;
  std::string predictions_path;
  std::string captions_path;
  std::string report_path = "eval_report.json";
};

int cmd_eval(const EvalInputs& inputs) {
  json report = {{"a_auc", nullptr},
                 {"a_last", nullptr},
                 {"coverage", nullptr},
                 {"macro_f1", nullptr},
                 {"cider", nullptr}};

  if (!inputs.metrics_path.empty()) {
    auto series = io::metrics_from_csv(io::read_file(inputs.metrics_path));
    report["a_auc"] = metrics::a_auc(series);
    report["a_last"] = metrics::a_last(series);
  }
  if (!inputs.real_path.empty() && !inputs.gen_path.empty()) {
    auto real = io::features_from_jsonl(io::read_file(inputs.real_path));
    auto gen = io::features_from_jsonl(io::read_file(inputs.gen_path));
    std::vector<FeatureVector> real_feats, gen_feats;
    for (auto& s : real) real_feats.push_back(std::move(s.feature));
    for (auto& s : gen) gen_feats.push_back(std::move(s.feature));
    report["coverage"] = metrics::coverage(real_feats, gen_feats, inputs.knn);
  }
  if (!inputs.predictions_path.empty()) {
    std::vector<std::string> predictions, labels;
    std::istringstream lines(io::read_file(inputs.predictions_path));
    std::string line;
    while (std::getline(lines, line)) {
      if (line.empty()) continue;
      json parsed = json::parse(line, nullptr, false);
      if (parsed.is_discarded() || !parsed.count("prediction") || !parsed.count("label")) {
        throw Error(ErrorCode::format, "predictions file: bad line: " + line);
      }
      predictions.push_back(parsed.at("prediction").get<std::string>());
      labels.push_back(parsed.at("label").get<std::string>());
    }
    report["macro_f1"] = metrics::macro_f1(predictions, labels);
  }
  if (!inputs.captions_path.empty()) {
    double total = 0.0;
    size_t count = 0;
    std::istringstream lines(io::read_file(inputs.captions_path));
    std::string line;
    while (std::getline(lines, line)) {
      if (line.empty()) continue;
      json parsed = json::parse(line, nullptr, false);
      if (parsed.is_discarded() || !parsed.count("candidate") ||
          !parsed.count("references")) {
        throw Error(ErrorCode::format, "captions file: bad line: " + line);
      }
      auto candidate = metrics::tokenize(parsed.at("candidate").get<std::string>());
      std::vector<metrics::TokenizedSentence> references;
      for (const auto& ref : parsed.at("references")) {
        references.push_back(metrics::tokenize(ref.get<std::string>()));
      }
      total += metrics::cider(candidate, references);
      ++count;
    }
    if (count == 0) {
      throw Error(ErrorCode::invalid_argument, "captions file: no entries");
    }
    report["cider"] = total / static_cast<double>(count);
  }

  io::atomic_write(inputs.report_path, report.dump(2) + "\n");
  std::cout << "wrote " << inputs.report_path << "\n";
  return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& argv) {
  CLI::App app{"name-only continual-learning data pipeline"};
  app.require_subcommand(1);

  CommonOptions options;
  size_t eval_size = 32;
  EvalInputs eval_inputs;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", options.config_path, "run config (JSON)");
    if (config_required) opt->required();
    sub->add_option("--seed", options.seed, "override every component seed");
    sub->add_option("--out", options.out_dir, "override the work directory");
  };

  CLI::App* prompts = app.add_subcommand("prompts", "build prompt trees");
  add_common(prompts, true);

  CLI::App* generate = app.add_subcommand("generate", "generate candidate samples");
  add_common(generate, true);

  CLI::App* select = app.add_subcommand("select", "score and select the coreset");
  add_common(select, true);
  select->add_option("--strategy", options.strategy,
                     "conan|ews|k_highest_rmd|k_lowest_rmd|inverse_conan|moderate");

  CLI::App* stream_cmd = app.add_subcommand("stream", "run the full loop");
  add_common(stream_cmd, true);
  stream_cmd->add_option("--strategy", options.strategy, "selection strategy");
  stream_cmd->add_option("--eval-size", eval_size, "held-out samples per concept");

  CLI::App* eval = app.add_subcommand("eval", "compute metrics from files");
  eval->add_option("--metrics", eval_inputs.metrics_path, "metrics.csv path");
  eval->add_option("--real", eval_inputs.real_path, "real features.jsonl");
  eval->add_option("--gen", eval_inputs.gen_path, "generated features.jsonl");
  eval->add_option("--knn", eval_inputs.knn, "coverage neighborhood size");
  eval->add_option("--predictions", eval_inputs.predictions_path,
                   "JSONL of {\"prediction\",\"label\"}");
  eval->add_option("--captions", eval_inputs.captions_path,
                   "JSONL of {\"candidate\",\"references\"}");
  eval->add_option("--report", eval_inputs.report_path, "output report path");

  std::vector<std::string> args(argv.rbegin(), argv.rend());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (prompts->parsed()) return cmd_prompts(options);
    if (generate->parsed()) return cmd_generate(options);
    if (select->parsed()) return cmd_select(options);
    if (stream_cmd->parsed()) return cmd_stream(options, eval_size);
    if (eval->parsed()) return cmd_eval(eval_inputs);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return (e.code() == ErrorCode::config || e.code() == ErrorCode::io) ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace gencl::cli
