#include "synlin/eval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

namespace synlin {
namespace {

constexpr int kMaxOrder = 4;

struct Counts {
  long matches[kMaxOrder] = {0, 0, 0, 0};
  long totals[kMaxOrder] = {0, 0, 0, 0};
  long hyp_length = 0;
  long ref_length = 0;
};

void AddPair(const TokenList &ref, const TokenList &hyp, Counts *counts) {
  counts->hyp_length += static_cast<long>(hyp.size());
  counts->ref_length += static_cast<long>(ref.size());
  for (int n = 1; n <= kMaxOrder; ++n) {
    if (static_cast<int>(hyp.size()) < n) break;
    std::map<std::vector<std::string>, int> ref_grams;
    for (size_t i = 0; i + n <= ref.size(); ++i) {
      ++ref_grams[std::vector<std::string>(ref.begin() + i, ref.begin() + i + n)];
    }
    for (size_t i = 0; i + n <= hyp.size(); ++i) {
      auto it = ref_grams.find(std::vector<std::string>(hyp.begin() + i, hyp.begin() + i + n));
      if (it != ref_grams.end() && it->second > 0) {
        --it->second;
        ++counts->matches[n - 1];
      }
    }
    counts->totals[n - 1] += static_cast<long>(hyp.size()) - n + 1;
  }
}

double Score(const Counts &counts, double *bp) {
  double log_sum = 0.0;
  int orders = 0;
  for (int n = 0; n < kMaxOrder; ++n) {
    if (counts.totals[n] == 0) continue;
    if (counts.matches[n] == 0) {
      log_sum = -INFINITY;
      break;
    }
    log_sum += std::log(static_cast<double>(counts.matches[n]) / counts.totals[n]);
    ++orders;
  }
  double penalty = 0.0;
  if (counts.hyp_length > 0) {
    penalty = counts.hyp_length >= counts.ref_length
                  ? 1.0
                  : std::exp(1.0 - static_cast<double>(counts.ref_length) / counts.hyp_length);
  }
  if (bp != nullptr) *bp = penalty;
  if (orders == 0 || std::isinf(log_sum) || penalty == 0.0) return 0.0;
  return 100.0 * penalty * std::exp(log_sum / orders);
}

void CheckAligned(const std::vector<TokenList> &refs, const std::vector<TokenList> &hyps) {
  if (refs.size() != hyps.size()) {
    throw std::invalid_argument("BLEU needs aligned lists: " + std::to_string(refs.size()) +
                                " references vs " + std::to_string(hyps.size()) + " hypotheses");
  }
}

std::string Fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

}  // namespace

std::string BleuBucket::Label() const {
  if (max_length == 0) return std::to_string(min_length) + "+";
  return std::to_string(min_length) + "-" + std::to_string(max_length);
}

const std::vector<BleuBucket> &BleuBuckets() {
  static const std::vector<BleuBucket> buckets = {
      {1, 10}, {11, 15}, {16, 20}, {21, 25}, {26, 30}, {31, 35}, {36, 0}};
  return buckets;
}

double CorpusBleuScore(const std::vector<TokenList> &refs, const std::vector<TokenList> &hyps) {
  CheckAligned(refs, hyps);
  Counts counts;
  for (size_t i = 0; i < refs.size(); ++i) AddPair(refs[i], hyps[i], &counts);
  return Score(counts, nullptr);
}

BleuReport CorpusBleu(const std::vector<TokenList> &refs, const std::vector<TokenList> &hyps) {
  CheckAligned(refs, hyps);
  BleuReport report;
  Counts counts;
  for (size_t i = 0; i < refs.size(); ++i) AddPair(refs[i], hyps[i], &counts);
  report.bleu = Score(counts, &report.brevity_penalty);
  for (int n = 0; n < kMaxOrder; ++n) {
    report.matches[n] = counts.matches[n];
    report.totals[n] = counts.totals[n];
    report.precision[n] =
        counts.totals[n] == 0 ? 0.0 : static_cast<double>(counts.matches[n]) / counts.totals[n];
  }
  report.hyp_length = counts.hyp_length;
  report.ref_length = counts.ref_length;
  report.sentences = static_cast<int>(refs.size());

  for (BleuBucket bucket : BleuBuckets()) {
    std::vector<TokenList> bucket_refs, bucket_hyps;
    for (size_t i = 0; i < refs.size(); ++i) {
      const int len = static_cast<int>(refs[i].size());
      if (len < bucket.min_length) continue;
      if (bucket.max_length != 0 && len > bucket.max_length) continue;
      bucket_refs.push_back(refs[i]);
      bucket_hyps.push_back(hyps[i]);
    }
    bucket.sentences = static_cast<int>(bucket_refs.size());
    bucket.bleu = bucket_refs.empty() ? 0.0 : CorpusBleuScore(bucket_refs, bucket_hyps);
    report.buckets.push_back(bucket);
  }
  return report;
}

std::string BleuReport::Table() const {
  std::ostringstream out;
  out << "BLEU " << Fixed(bleu, 2) << "  (" << sentences << " sentences, BP "
      << Fixed(brevity_penalty, 4) << ", hyp/ref length " << hyp_length << "/" << ref_length
      << ")\n";
  for (int n = 0; n < kMaxOrder; ++n) {
    out << "  p" << n + 1 << " " << Fixed(100.0 * precision[n], 2) << "  (" << matches[n] << "/"
        << totals[n] << ")\n";
  }
  out << "  length   sents    BLEU\n";
  for (const BleuBucket &b : buckets) {
    char line[80];
    if (b.sentences == 0) {
      std::snprintf(line, sizeof line, "  %-7s %6d       -\n", b.Label().c_str(), b.sentences);
    } else {
      std::snprintf(line, sizeof line, "  %-7s %6d  %6.2f\n", b.Label().c_str(), b.sentences,
                    b.bleu);
    }
    out << line;
  }
  return out.str();
}

std::string BleuReport::KeyValues() const {
  std::ostringstream out;
  out << "bleu=" << Fixed(bleu, 4) << "\n";
  for (int n = 0; n < kMaxOrder; ++n) {
    out << "p" << n + 1 << "=" << Fixed(precision[n], 6) << "\n";
  }
  out << "bp=" << Fixed(brevity_penalty, 6) << "\n";
  out << "hyp_length=" << hyp_length << "\nref_length=" << ref_length << "\n";
  out << "sentences=" << sentences << "\n";
  for (const BleuBucket &b : buckets) {
    out << "bucket." << b.Label() << ".sentences=" << b.sentences << "\n";
    out << "bucket." << b.Label() << ".bleu=" << Fixed(b.bleu, 4) << "\n";
  }
  return out.str();
}

std::vector<Neighbor> ActionNeighbors(const Matrix &output, int row, int k) {
  if (row < 0 || row >= output.rows()) {
    throw std::out_of_range("action row " + std::to_string(row) + " outside 0.." +
                            std::to_string(output.rows() - 1));
  }
  const Vector query = output.row(row).transpose();
  const double query_norm = query.norm();
  std::vector<Neighbor> all;
  for (int r = 0; r < output.rows(); ++r) {
    if (r == row) continue;
    const double norm = output.row(r).norm();
    double cosine = 0.0;
    if (query_norm > 0.0 && norm > 0.0) cosine = output.row(r).dot(query) / (norm * query_norm);
    all.push_back({r, cosine});
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const Neighbor &a, const Neighbor &b) { return a.cosine > b.cosine; });
  if (k >= 0 && static_cast<size_t>(k) < all.size()) all.resize(k);
  return all;
}

}  // namespace synlin
