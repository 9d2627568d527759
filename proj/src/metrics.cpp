#include "gencl/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>

namespace gencl::metrics {

double a_auc(const MetricSeries& series) {
  if (series.points.empty()) {
    throw Error(ErrorCode::invalid_argument, "a_auc: empty series");
  }
  double sum = 0.0;
  for (const auto& [step, accuracy] : series.points) sum += accuracy;
  return sum / static_cast<double>(series.points.size());
}

double a_last(const MetricSeries& series) {
  if (series.points.empty()) {
    throw Error(ErrorCode::invalid_argument, "a_last: empty series");
  }
  return series.points.back().second;
}

double coverage(const std::vector<FeatureVector>& real_feats,
                const std::vector<FeatureVector>& gen_feats, size_t k) {
  if (k < 1 || real_feats.size() <= k) {
    throw Error(ErrorCode::invalid_argument,
                "coverage: need |real| > k and k >= 1");
  }
  for (const auto& f : real_feats) {
    if (f.size() != real_feats.front().size()) {
      throw Error(ErrorCode::dimension_mismatch, "coverage: real dims disagree");
    }
  }
  for (const auto& f : gen_feats) {
    if (f.size() != real_feats.front().size()) {
      throw Error(ErrorCode::dimension_mismatch, "coverage: gen dims disagree");
    }
  }

  const long long n = static_cast<long long>(real_feats.size());
  std::vector<int> covered(real_feats.size(), 0);

  auto sq_dist = [](const FeatureVector& a, const FeatureVector& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
      double diff = a[i] - b[i];
      s += diff * diff;
    }
    return s;
  };

#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) {
    const auto& center = real_feats[static_cast<size_t>(i)];
    std::vector<double> dists;
    dists.reserve(real_feats.size() - 1);
    for (long long j = 0; j < n; ++j) {
      if (j == i) continue;
      dists.push_back(sq_dist(center, real_feats[static_cast<size_t>(j)]));
    }
    std::nth_element(dists.begin(), dists.begin() + static_cast<long>(k - 1),
                     dists.end());
    double radius_sq = dists[k - 1];
    for (const auto& g : gen_feats) {
      if (sq_dist(center, g) <= radius_sq) {
        covered[static_cast<size_t>(i)] = 1;
        break;
      }
    }
  }

  long long hit = 0;
  for (int c : covered) hit += c;
  return static_cast<double>(hit) / static_cast<double>(real_feats.size());
}

double macro_f1(const std::vector<std::string>& predictions,
                const std::vector<std::string>& labels) {
  if (predictions.size() != labels.size() || labels.empty()) {
    throw Error(ErrorCode::invalid_argument,
                "macro_f1: predictions and labels must be equal-length and non-empty");
  }

  std::set<std::string> classes(labels.begin(), labels.end());
  std::map<std::string, size_t> tp, fp, fn;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (predictions[i] == labels[i]) {
      ++tp[labels[i]];
    } else {
      ++fp[predictions[i]];
      ++fn[labels[i]];
    }
  }

  double sum = 0.0;
  for (const auto& c : classes) {
    double t = static_cast<double>(tp.count(c) ? tp.at(c) : 0);
    double p_den = t + static_cast<double>(fp.count(c) ? fp.at(c) : 0);
    double r_den = t + static_cast<double>(fn.count(c) ? fn.at(c) : 0);
    double precision = p_den > 0.0 ? t / p_den : 0.0;
    double recall = r_den > 0.0 ? t / r_den : 0.0;
    sum += (precision + recall) > 0.0 ? 2.0 * precision * recall / (precision + recall)
                                      : 0.0;
  }
  return sum / static_cast<double>(classes.size());
}

TokenizedSentence tokenize(const std::string& sentence) {
  TokenizedSentence out;
  std::string token;
  for (char raw : sentence) {
    unsigned char c = static_cast<unsigned char>(raw);
    if (std::isspace(c)) {
      if (!token.empty()) {
        out.tokens.push_back(token);
        token.clear();
      }
      continue;
    }
    if (std::ispunct(c)) continue;
    token.push_back(static_cast<char>(std::tolower(c)));
  }
  if (!token.empty()) out.tokens.push_back(token);
  return out;
}

namespace {

using NgramVector = std::map<std::vector<std::string>, double>;

NgramVector ngram_counts(const TokenizedSentence& sentence, size_t n) {
  NgramVector counts;
  if (sentence.tokens.size() < n) return counts;
  for (size_t i = 0; i + n <= sentence.tokens.size(); ++i) {
    std::vector<std::string> gram(sentence.tokens.begin() + static_cast<long>(i),
                                  sentence.tokens.begin() + static_cast<long>(i + n));
    counts[gram] += 1.0;
  }
  return counts;
}

double cosine(const NgramVector& a, const NgramVector& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [gram, w] : a) {
    na += w * w;
    auto it = b.find(gram);
    if (it != b.end()) dot += w * it->second;
  }
  for (const auto& [gram, w] : b) nb += w * w;
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace

double cider(const TokenizedSentence& candidate,
             const std::vector<TokenizedSentence>& references, size_t n_max) {
  if (candidate.tokens.empty()) {
    throw Error(ErrorCode::invalid_argument, "cider: empty candidate");
  }
  if (references.empty()) {
    throw Error(ErrorCode::invalid_argument, "cider: no references");
  }
  for (const auto& ref : references) {
    for (const auto& t : ref.tokens) {
      if (t.empty()) throw Error(ErrorCode::invalid_argument, "cider: empty token");
    }
  }

  const double corpus_size = static_cast<double>(references.size());
  double total = 0.0;

  for (size_t n = 1; n <= n_max; ++n) {
    NgramVector cand_tf = ngram_counts(candidate, n);
    std::vector<NgramVector> ref_tfs;
    ref_tfs.reserve(references.size());
    for (const auto& ref : references) ref_tfs.push_back(ngram_counts(ref, n));

    std::map<std::vector<std::string>, double> df;
    for (const auto& tf : ref_tfs) {
      for (const auto& [gram, count] : tf) df[gram] += 1.0;
    }
    auto idf = [&](const std::vector<std::string>& gram) {
      if (references.size() == 1) return 1.0;  // see header: single-ref fallback
      double d = df.count(gram) ? df.at(gram) : 1.0;
      return std::log(corpus_size / d);
    };

    auto weight = [&](NgramVector tf) {
      for (auto& [gram, w] : tf) w *= idf(gram);
      return tf;
    };

    NgramVector cand_vec = weight(std::move(cand_tf));
    double mean = 0.0;
    for (auto& tf : ref_tfs) mean += cosine(cand_vec, weight(std::move(tf)));
    total += mean / corpus_size;
  }
  return total / static_cast<double>(n_max);
}

}  // namespace gencl::metrics
