#pragma once

/**
 * Hierarchical recurrent prompt generation.
 *
 * Builds a complete K-ary tree of prompts per concept: every node's children
 * are generated one at a time, each conditioned on the parent plus the
 * previously generated siblings as negative examples, which bounds the
 * negatives list at K regardless of the total prompt budget.
 *
 * Sibling generation is inherently sequential; distinct parents at the same
 * depth expand in parallel. Node ordering is canonical (by path id), so the
 * result never depends on scheduling.
 */

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gencl/chat.hpp"
#include "gencl/core.hpp"

namespace gencl::hirpg {

struct HirpgConfig {
  size_t branching_k = 7;
  size_t depth_d = 2;
  size_t prompt_budget_n = 50;
  size_t retry_limit = 3;
  uint64_t seed = 0;
};

/// (K^(D+1) - 1) / (K - 1); D+1 when K == 1.
size_t node_count(size_t k, size_t d);

/// Throws Error(invalid_argument) when K < 1 or the budget exceeds the
/// closed-form node count.
void validate(const HirpgConfig& config);

struct PromptNode {
  std::string node_id;    // path-encoded: "0", "0.1", "0.1.3"
  std::string concept_id;
  size_t depth = 0;
  std::optional<std::string> parent_id;
  std::optional<size_t> child_index;  // 1-based among siblings, absent at root
  std::string text;
};

struct PromptTree {
  std::string concept_id;
  HirpgConfig config;
  std::vector<PromptNode> nodes;  // sorted by path id
};

/// Orders "0.2" before "0.10" (numeric per path component).
bool node_id_less(const std::string& a, const std::string& b);

/**
 * Generates the K children of one parent. Child k' (1-based) sees exactly
 * k' negatives: the parent followed by the k'-1 previous siblings. Backend
 * failures are retried up to retry_limit, then surface as Error(generation)
 * carrying the failing child index; duplicates of a negative are retried and
 * finally disambiguated with a numeric suffix.
 */
std::vector<std::string> rpg_expand(const PromptNode& parent, size_t k,
                                    const chat::ChatBackend& llm,
                                    size_t retry_limit = 3);

/// Breadth-complete tree; root text is the rendered base prompt.
PromptTree build_tree(const std::string& concept_name, const HirpgConfig& config,
                      const chat::ChatBackend& llm);

/// Uniform sample of N nodes without replacement (root included),
/// deterministic given seed; output ascending by node id.
std::vector<std::string> sample_prompts(const PromptTree& tree, size_t n,
                                        uint64_t seed);

/// Same draw as sample_prompts but returning (node_id, text) pairs for the
/// generation stage.
std::vector<std::pair<std::string, std::string>> sample_prompt_nodes(
    const PromptTree& tree, size_t n, uint64_t seed);

/**
 * Flat baseline: one request asking for N prompts at once, no recurrence and
 * no hierarchy. Every returned prompt must contain the concept token after
 * case-folding; short or non-conforming replies raise Error(format) with the
 * observed counts.
 */
std::vector<std::string> flat_generate(const std::string& concept_name, size_t n,
                                       const chat::ChatBackend& llm);

/// prompts.json object for one tree: {"concept","k","d","seed","nodes":[...]}
/// with nodes sorted by id.
std::string tree_to_json(const PromptTree& tree);
PromptTree tree_from_json(const std::string& json_text);

}  // namespace gencl::hirpg
