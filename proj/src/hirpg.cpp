#include "gencl/hirpg.hpp"

#include <algorithm>
#include <cctype>
#include <exception>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "gencl/prompts.hpp"

namespace gencl::hirpg {

size_t node_count(size_t k, size_t d) {
  if (k == 1) return d + 1;
  size_t total = 0;
  size_t level = 1;
  for (size_t depth = 0; depth <= d; ++depth) {
    total += level;
    level *= k;
  }
  return total;
}

void validate(const HirpgConfig& config) {
  if (config.branching_k < 1) {
    throw Error(ErrorCode::invalid_argument, "hirpg: branching_k must be >= 1");
  }
  if (config.prompt_budget_n < 1) {
    throw Error(ErrorCode::invalid_argument, "hirpg: prompt_budget_n must be >= 1");
  }
  size_t capacity = node_count(config.branching_k, config.depth_d);
  if (config.prompt_budget_n > capacity) {
    throw Error(ErrorCode::invalid_argument,
                "hirpg: prompt budget " + std::to_string(config.prompt_budget_n) +
                    " exceeds tree capacity " + std::to_string(capacity));
  }
}

bool node_id_less(const std::string& a, const std::string& b) {
  size_t ia = 0, ib = 0;
  while (ia < a.size() && ib < b.size()) {
    size_t ea = a.find('.', ia);
    size_t eb = b.find('.', ib);
    if (ea == std::string::npos) ea = a.size();
    if (eb == std::string::npos) eb = b.size();
    unsigned long ca = std::stoul(a.substr(ia, ea - ia));
    unsigned long cb = std::stoul(b.substr(ib, eb - ib));
    if (ca != cb) return ca < cb;
    ia = ea + 1;
    ib = eb + 1;
  }
  return (ia >= a.size()) && (ib < b.size());
}

namespace {

std::string generate_child(const PromptNode& parent, size_t child_index,
                           const std::vector<std::string>& negatives,
                           const chat::ChatBackend& llm, size_t retry_limit) {
  chat::ChatRequest request;
  request.system_text = prompts::render_system_prompt(negatives);
  request.user_text = "Reply with the new prompt only.";

  std::string text;
  size_t attempts = retry_limit + 1;
  for (size_t attempt = 0;; ++attempt) {
    try {
      text = chat::chat_complete(request, llm);
      break;
    } catch (const Error& e) {
      if (attempt + 1 >= attempts) {
        throw Error(ErrorCode::generation,
                    "child " + std::to_string(child_index) + " of node " +
                        parent.node_id + " failed after " +
                        std::to_string(retry_limit) + " retries: " + e.what());
      }
    }
  }

  // Trim surrounding whitespace; backends may append a newline.
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!text.empty() && is_space(static_cast<unsigned char>(text.back()))) text.pop_back();
  size_t start = 0;
  while (start < text.size() && is_space(static_cast<unsigned char>(text[start]))) ++start;
  text = text.substr(start);

  // A duplicate of a negative is a soft failure: retry, then disambiguate.
  auto duplicates_negative = [&](const std::string& candidate) {
    std::string norm = prompts::normalize(candidate);
    for (const auto& negative : negatives)
      if (prompts::normalize(negative) == norm) return true;
    return false;
  };
  size_t dup_attempt = 0;
  while (duplicates_negative(text) && dup_attempt < retry_limit) {
    text = chat::chat_complete(request, llm);
    ++dup_attempt;
  }
  if (duplicates_negative(text)) {
    size_t suffix = 2;
    std::string base = text;
    while (duplicates_negative(text)) {
      text = base + " (" + std::to_string(suffix++) + ")";
    }
  }
  return text;
}

}  // namespace

std::vector<std::string> rpg_expand(const PromptNode& parent, size_t k,
                                    const chat::ChatBackend& llm,
                                    size_t retry_limit) {
  if (parent.text.empty()) {
    throw Error(ErrorCode::invalid_argument, "rpg_expand: parent text is empty");
  }
  if (k < 1) {
    throw Error(ErrorCode::invalid_argument, "rpg_expand: k must be >= 1");
  }

  std::vector<std::string> children;
  children.reserve(k);
  std::vector<std::string> negatives{parent.text};
  for (size_t child = 1; child <= k; ++child) {
    // negatives = parent + previously generated siblings: exactly `child` entries.
    std::string text = generate_child(parent, child, negatives, llm, retry_limit);
    children.push_back(text);
    negatives.push_back(text);
  }
  return children;
}

PromptTree build_tree(const std::string& concept_name, const HirpgConfig& config,
                      const chat::ChatBackend& llm) {
  validate(config);

  PromptTree tree;
  tree.concept_id = concept_name;
  tree.config = config;
  tree.nodes.reserve(node_count(config.branching_k, config.depth_d));

  PromptNode root;
  root.node_id = "0";
  root.concept_id = concept_name;
  root.depth = 0;
  root.text = prompts::base_prompt(concept_name);
  tree.nodes.push_back(root);

  std::vector<size_t> frontier{0};  // indices into tree.nodes at current depth
  for (size_t depth = 0; depth < config.depth_d; ++depth) {
    const size_t parents = frontier.size();
    std::vector<std::vector<std::string>> expanded(parents);
    std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic)
    for (long long p = 0; p < static_cast<long long>(parents); ++p) {
      try {
        expanded[static_cast<size_t>(p)] =
            rpg_expand(tree.nodes[frontier[static_cast<size_t>(p)]],
                       config.branching_k, llm, config.retry_limit);
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<size_t> next;
    next.reserve(parents * config.branching_k);
    for (size_t p = 0; p < parents; ++p) {
      const std::string parent_id = tree.nodes[frontier[p]].node_id;
      for (size_t child = 1; child <= config.branching_k; ++child) {
        PromptNode node;
        node.node_id = parent_id + "." + std::to_string(child);
        node.concept_id = concept_name;
        node.depth = depth + 1;
        node.parent_id = parent_id;
        node.child_index = child;
        node.text = expanded[p][child - 1];
        next.push_back(tree.nodes.size());
        tree.nodes.push_back(std::move(node));
      }
    }
    frontier = std::move(next);
  }

  std::sort(tree.nodes.begin(), tree.nodes.end(),
            [](const PromptNode& a, const PromptNode& b) {
              return node_id_less(a.node_id, b.node_id);
            });
  return tree;
}

std::vector<std::pair<std::string, std::string>> sample_prompt_nodes(
    const PromptTree& tree, size_t n, uint64_t seed) {
  if (n > tree.nodes.size()) {
    throw Error(ErrorCode::invalid_argument,
                "sample_prompts: requested " + std::to_string(n) + " of " +
                    std::to_string(tree.nodes.size()) + " nodes");
  }
  if (n < 1) {
    throw Error(ErrorCode::invalid_argument, "sample_prompts: n must be >= 1");
  }

  // Partial Fisher-Yates over node indices; nodes are already in path order.
  std::vector<size_t> indices(tree.nodes.size());
  std::iota(indices.begin(), indices.end(), 0);
  Rng rng(seed);
  for (size_t i = 0; i < n; ++i) {
    size_t j = i + rng.next_index(indices.size() - i);
    std::swap(indices[i], indices[j]);
  }
  indices.resize(n);
  std::sort(indices.begin(), indices.end());

  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(n);
  for (size_t idx : indices) {
    out.emplace_back(tree.nodes[idx].node_id, tree.nodes[idx].text);
  }
  return out;
}

std::vector<std::string> sample_prompts(const PromptTree& tree, size_t n,
                                        uint64_t seed) {
  std::vector<std::string> texts;
  for (auto& [id, text] : sample_prompt_nodes(tree, n, seed)) {
    texts.push_back(std::move(text));
  }
  return texts;
}

std::vector<std::string> flat_generate(const std::string& concept_name, size_t n,
                                       const chat::ChatBackend& llm) {
  if (n < 1) {
    throw Error(ErrorCode::invalid_argument, "flat_generate: n must be >= 1");
  }

  chat::ChatRequest request;
  request.system_text = prompts::render_vanilla_prompt(concept_name, n);
  request.user_text = "Reply with one prompt per line.";
  std::string response = chat::chat_complete(request, llm);

  std::vector<std::string> lines;
  std::istringstream stream(response);
  std::string line;
  std::string folded_concept = prompts::normalize(concept_name);
  while (std::getline(stream, line)) {
    // Strip list numbering ("3. ...") that chatty models tend to add.
    size_t at = 0;
    while (at < line.size() && std::isdigit(static_cast<unsigned char>(line[at]))) ++at;
    if (at > 0 && at + 1 < line.size() && line[at] == '.' && line[at + 1] == ' ') {
      line = line.substr(at + 2);
    }
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back())))
      line.pop_back();
    if (line.empty()) continue;
    lines.push_back(line);
  }

  if (lines.size() < n) {
    throw Error(ErrorCode::format,
                "flat_generate: expected " + std::to_string(n) +
                    " prompts, parsed " + std::to_string(lines.size()));
  }
  lines.resize(n);

  size_t missing = 0;
  for (const auto& prompt : lines) {
    if (prompts::normalize(prompt).find(folded_concept) == std::string::npos) ++missing;
  }
  if (missing > 0) {
    throw Error(ErrorCode::format,
                "flat_generate: " + std::to_string(missing) + " of " +
                    std::to_string(n) + " prompts are missing the concept token");
  }
  return lines;
}

std::string tree_to_json(const PromptTree& tree) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& node : tree.nodes) {
    nlohmann::json entry = {
        {"id", node.node_id},
        {"parent", node.parent_id ? nlohmann::json(*node.parent_id) : nlohmann::json()},
        {"depth", node.depth},
        {"text", node.text},
    };
    nodes.push_back(std::move(entry));
  }
  nlohmann::json doc = {
      {"concept", tree.concept_id},
      {"k", tree.config.branching_k},
      {"d", tree.config.depth_d},
      {"seed", tree.config.seed},
      {"nodes", std::move(nodes)},
  };
  return doc.dump(2);
}

PromptTree tree_from_json(const std::string& json_text) {
  nlohmann::json doc = nlohmann::json::parse(json_text, nullptr, false);
  if (doc.is_discarded()) {
    throw Error(ErrorCode::format, "prompts.json: unparseable JSON");
  }
  PromptTree tree;
  try {
    tree.concept_id = doc.at("concept").get<std::string>();
    tree.config.branching_k = doc.at("k").get<size_t>();
    tree.config.depth_d = doc.at("d").get<size_t>();
    tree.config.seed = doc.at("seed").get<uint64_t>();
    for (const auto& entry : doc.at("nodes")) {
      PromptNode node;
      node.node_id = entry.at("id").get<std::string>();
      if (!entry.at("parent").is_null()) {
        node.parent_id = entry.at("parent").get<std::string>();
        size_t dot = node.node_id.rfind('.');
        node.child_index = std::stoul(node.node_id.substr(dot + 1));
      }
      node.depth = entry.at("depth").get<size_t>();
      node.text = entry.at("text").get<std::string>();
      node.concept_id = tree.concept_id;
      tree.nodes.push_back(std::move(node));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::format, std::string("prompts.json: ") + e.what());
  }
  std::sort(tree.nodes.begin(), tree.nodes.end(),
            [](const PromptNode& a, const PromptNode& b) {
              return node_id_less(a.node_id, b.node_id);
            });
  return tree;
}

}  // namespace gencl::hirpg
