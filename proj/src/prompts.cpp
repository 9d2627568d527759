#include "gencl/prompts.hpp"

#include <cctype>
#include <sstream>

#include "gencl/core.hpp"

namespace gencl::prompts {

namespace {

constexpr const char* kSystemHead =
    "To generate images using a text-to-image generation model, I need to "
    "create a prompt. Keep the domain photorealistic and use different "
    "visual scenes and visual styles or different color profiles/ palettes. "
    "Here is a list of prompts that I have previously generated:";

constexpr const char* kSystemTail =
    "Please create a new prompt that does not overlap with these.";

}  // namespace

std::string base_prompt(const std::string& concept_name) {
  return "A photo of " + concept_name;
}

std::string render_system_prompt(const std::vector<std::string>& negatives) {
  if (negatives.empty()) {
    throw Error(ErrorCode::invalid_argument,
                "render_system_prompt: negatives list is empty");
  }
  std::ostringstream out;
  out << kSystemHead << "\n";
  for (size_t i = 0; i < negatives.size(); ++i) {
    out << (i + 1) << ". " << negatives[i] << "\n";
  }
  out << kSystemTail;
  return out.str();
}

std::string render_vanilla_prompt(const std::string& concept_name, size_t n) {
  std::ostringstream out;
  out << "To generate images using a text-to-image generation model, I need "
         "to create "
      << n
      << " prompts. Keep the domain photorealistic and use different visual "
         "scenes and visual styles or different color profiles/ palettes. "
         "Please create "
      << n
      << " prompts that does not overlap with each other. Please ensure that "
         "each response includes the word '"
      << concept_name
      << "'. For example, 'A photo of a " << concept_name
      << ".', 'A detailed sketch of " << concept_name
      << ".', 'A hyper-realistic portrait of " << concept_name << ".', etc.";
  return out.str();
}

std::vector<std::string> parse_negatives(const std::string& system_text) {
  std::vector<std::string> negatives;
  size_t head = system_text.find(kSystemHead);
  if (head == std::string::npos) return negatives;

  std::istringstream lines(system_text.substr(head));
  std::string line;
  std::getline(lines, line);  // the header line itself
  size_t expected = 1;
  while (std::getline(lines, line)) {
    std::string prefix = std::to_string(expected) + ". ";
    if (line.rfind(prefix, 0) != 0) break;
    negatives.push_back(line.substr(prefix.size()));
    ++expected;
  }
  return negatives;
}

VanillaRequest parse_vanilla_request(const std::string& system_text) {
  VanillaRequest req;
  constexpr const char* kCountAnchor = "I need to create ";
  constexpr const char* kConceptAnchor = "each response includes the word '";

  size_t at = system_text.find(kCountAnchor);
  if (at == std::string::npos) return req;
  at += std::string(kCountAnchor).size();
  size_t end = at;
  while (end < system_text.size() && std::isdigit(static_cast<unsigned char>(system_text[end])))
    ++end;
  if (end == at) return req;
  size_t count = std::stoull(system_text.substr(at, end - at));

  size_t c0 = system_text.find(kConceptAnchor);
  if (c0 == std::string::npos) return req;
  c0 += std::string(kConceptAnchor).size();
  size_t c1 = system_text.find('\'', c0);
  if (c1 == std::string::npos) return req;

  req.concept_name = system_text.substr(c0, c1 - c0);
  req.count = count;
  return req;
}

std::string normalize(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

}  // namespace gencl::prompts
