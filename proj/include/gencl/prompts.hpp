#pragma once

/**
 * Prompt templates and their inverse parsers.
 *
 * The chat wire contract carries only (system_text, user_text), so the
 * negative examples travel embedded in the rendered system prompt as a
 * numbered list. The mock backend and the recording wrapper both recover
 * them with parse_negatives(), which keeps every backend behind the same
 * interface.
 */

#include <string>
#include <vector>

namespace gencl::prompts {

/// "A photo of {concept}"
std::string base_prompt(const std::string& concept_name);

/// System prompt instructing the model to produce one new prompt that
/// does not overlap with the enumerated negatives. Pure function of input;
/// throws Error(invalid_argument) on an empty negatives list.
std::string render_system_prompt(const std::vector<std::string>& negatives);

/// One-shot request for `n` prompts, each required to contain the concept
/// word; the flat baseline mode uses this instead of the recurrent template.
std::string render_vanilla_prompt(const std::string& concept_name, size_t n);

/// Recovers the enumerated negatives from a rendered system prompt.
/// Returns an empty list for non-matching text (e.g. the vanilla template).
std::vector<std::string> parse_negatives(const std::string& system_text);

struct VanillaRequest {
  std::string concept_name;
  size_t count = 0;
};

/// Recovers (concept, count) from a rendered vanilla prompt, or count == 0
/// if the text is not a vanilla request.
VanillaRequest parse_vanilla_request(const std::string& system_text);

/// Lowercases and collapses runs of whitespace; the equality used for all
/// duplicate-prompt checks.
std::string normalize(const std::string& text);

}  // namespace gencl::prompts
