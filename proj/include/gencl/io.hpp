#pragma once

/**
 * File formats the pipeline stages communicate through. All writes go
 * through a temp-file-plus-rename so partially written outputs never
 * survive, and serialization is deterministic so identical runs produce
 * byte-identical files.
 */

#include <map>
#include <string>
#include <vector>

#include "gencl/conan.hpp"
#include "gencl/core.hpp"
#include "gencl/metrics.hpp"
#include "gencl/rmd.hpp"

namespace gencl::io {

/// Writes content to path atomically (temp + rename).
void atomic_write(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

// features.jsonl: {"sample_id","concept","generator","prompt_id","feature":[...]}
std::string features_to_jsonl(const std::vector<GeneratedSample>& samples);
/// Rejects non-finite feature values and malformed lines.
std::vector<GeneratedSample> features_from_jsonl(const std::string& text);

/// Reconstructs a pool from a feature dump: generator order is first
/// appearance, equal-count and dim contracts re-checked.
CandidatePool pool_from_samples(std::vector<GeneratedSample> samples);

// scores.jsonl: {"sample_id","class_id","m_cls","m_agn","rmd"}
std::string scores_to_jsonl(const std::vector<rmd::RmdScore>& scores);
std::vector<rmd::RmdScore> scores_from_jsonl(const std::string& text);

// coreset.json: {"strategy","seed","tau","L","quota","selected":[...]}
std::string coreset_to_json(const conan::Coreset& coreset,
                            const conan::SelectionConfig& config);

// metrics.csv: "step,accuracy" header plus one row per point.
std::string metrics_to_csv(const metrics::MetricSeries& series);
metrics::MetricSeries metrics_from_csv(const std::string& text);

/// Shortest-round-trip double formatting used by every writer.
std::string format_double(double v);

}  // namespace gencl::io
