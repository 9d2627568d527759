#include "gencl/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gencl/generators.hpp"

namespace gencl::io {

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  fs::path temp = target;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorCode::io, "cannot open " + temp.string() + " for writing");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
      throw Error(ErrorCode::io, "short write to " + temp.string());
    }
  }
  std::error_code ec;
  fs::rename(temp, target, ec);
  if (ec) {
    throw Error(ErrorCode::io, "rename to " + path + " failed: " + ec.message());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::io, "cannot open " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string format_double(double v) {
  // nlohmann's shortest-round-trip formatting, reused so CSV and JSON agree.
  return nlohmann::json(v).dump();
}

std::string features_to_jsonl(const std::vector<GeneratedSample>& samples) {
  std::ostringstream out;
  for (const auto& sample : samples) {
    for (double v : sample.feature) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::invalid_argument,
                    "features write: non-finite value in " + sample.sample_id);
      }
    }
    nlohmann::json line = {
        {"sample_id", sample.sample_id},
        {"concept", sample.concept_id},
        {"generator", sample.generator_id},
        {"prompt_id", sample.prompt_id},
        {"feature", sample.feature},
    };
    out << line.dump() << "\n";
  }
  return out.str();
}

std::vector<GeneratedSample> features_from_jsonl(const std::string& text) {
  std::vector<GeneratedSample> samples;
  std::istringstream lines(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json parsed = nlohmann::json::parse(line, nullptr, false);
    if (parsed.is_discarded()) {
      throw Error(ErrorCode::format,
                  "features.jsonl line " + std::to_string(line_no) + ": bad JSON");
    }
    GeneratedSample sample;
    try {
      sample.sample_id = parsed.at("sample_id").get<std::string>();
      sample.concept_id = parsed.at("concept").get<std::string>();
      sample.generator_id = parsed.at("generator").get<std::string>();
      sample.prompt_id = parsed.at("prompt_id").get<std::string>();
      sample.feature = parsed.at("feature").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::format, "features.jsonl line " + std::to_string(line_no) +
                                         ": " + e.what());
    }
    for (double v : sample.feature) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::format, "features.jsonl line " +
                                           std::to_string(line_no) +
                                           ": non-finite feature value");
      }
    }
    samples.push_back(std::move(sample));
  }
  return samples;
}

CandidatePool pool_from_samples(std::vector<GeneratedSample> samples) {
  std::map<std::string, std::vector<GeneratedSample>> by_generator;
  std::vector<std::string> order;
  for (auto& sample : samples) {
    if (!by_generator.count(sample.generator_id)) order.push_back(sample.generator_id);
    by_generator[sample.generator_id].push_back(std::move(sample));
  }
  std::vector<std::pair<std::string, std::vector<GeneratedSample>>> per_generator;
  for (const auto& gid : order) {
    per_generator.emplace_back(gid, std::move(by_generator[gid]));
  }
  return generators::assemble_pool(per_generator);
}

std::string scores_to_jsonl(const std::vector<rmd::RmdScore>& scores) {
  std::ostringstream out;
  for (const auto& score : scores) {
    nlohmann::json line = {
        {"sample_id", score.sample_id}, {"class_id", score.class_id},
        {"m_cls", score.m_cls},         {"m_agn", score.m_agn},
        {"rmd", score.rmd},
    };
    out << line.dump() << "\n";
  }
  return out.str();
}

std::vector<rmd::RmdScore> scores_from_jsonl(const std::string& text) {
  std::vector<rmd::RmdScore> scores;
  std::istringstream lines(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json parsed = nlohmann::json::parse(line, nullptr, false);
    if (parsed.is_discarded()) {
      throw Error(ErrorCode::format,
                  "scores.jsonl line " + std::to_string(line_no) + ": bad JSON");
    }
    rmd::RmdScore score;
    try {
      score.sample_id = parsed.at("sample_id").get<std::string>();
      score.class_id = parsed.at("class_id").get<std::string>();
      score.m_cls = parsed.at("m_cls").get<double>();
      score.m_agn = parsed.at("m_agn").get<double>();
      score.rmd = parsed.at("rmd").get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::format,
                  "scores.jsonl line " + std::to_string(line_no) + ": " + e.what());
    }
    scores.push_back(std::move(score));
  }
  return scores;
}

std::string coreset_to_json(const conan::Coreset& coreset,
                            const conan::SelectionConfig& config) {
  nlohmann::json selected = nlohmann::json::array();
  std::map<std::string, std::string> class_of;
  // sample ids are "{generator}:{concept}:{prompt}"; recover the class from
  // the middle segment when the probabilities map lacks an entry.
  for (const auto& id : coreset.sample_ids) {
    size_t a = id.find(':');
    size_t b = a == std::string::npos ? std::string::npos : id.find(':', a + 1);
    class_of[id] = (a != std::string::npos && b != std::string::npos)
                       ? id.substr(a + 1, b - a - 1)
                       : "";
  }
  for (const auto& id : coreset.sample_ids) {
    nlohmann::json entry = {{"sample_id", id}, {"class", class_of[id]}};
    if (coreset.probabilities && coreset.probabilities->count(id)) {
      entry["p"] = coreset.probabilities->at(id);
    } else {
      entry["p"] = nullptr;
    }
    selected.push_back(std::move(entry));
  }
  nlohmann::json doc = {
      {"strategy", conan::to_string(coreset.strategy)},
      {"seed", config.seed},
      {"tau", config.tau},
      {"L", config.trunc_percent_l},
      {"quota", config.total_quota},
      {"selected", std::move(selected)},
  };
  return doc.dump(2);
}

std::string metrics_to_csv(const metrics::MetricSeries& series) {
  std::ostringstream out;
  out << "step,accuracy\n";
  for (const auto& [step, accuracy] : series.points) {
    out << step << "," << format_double(accuracy) << "\n";
  }
  return out.str();
}

metrics::MetricSeries metrics_from_csv(const std::string& text) {
  metrics::MetricSeries series;
  std::istringstream lines(text);
  std::string line;
  if (!std::getline(lines, line) || line.rfind("step,accuracy", 0) != 0) {
    throw Error(ErrorCode::format, "metrics.csv: missing header");
  }
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    size_t comma = line.find(',');
    if (comma == std::string::npos) {
      throw Error(ErrorCode::format, "metrics.csv: malformed row: " + line);
    }
    series.points.push_back({std::stoull(line.substr(0, comma)),
                             std::stod(line.substr(comma + 1))});
  }
  if (series.points.size() >= 2) {
    series.eval_every = series.points[1].first - series.points[0].first;
  } else if (series.points.size() == 1) {
    series.eval_every = series.points[0].first;
  }
  return series;
}

}  // namespace gencl::io
