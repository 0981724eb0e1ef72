// Corpus BLEU with length buckets, and action-embedding neighbours.

#ifndef SYNLIN_EVAL_H_
#define SYNLIN_EVAL_H_

#include <string>
#include <vector>

#include "synlin/ffnn.h"

namespace synlin {

using TokenList = std::vector<std::string>;

struct BleuBucket {
  int min_length = 0;
  int max_length = 0;  // 0 means unbounded
  int sentences = 0;
  double bleu = 0.0;

  std::string Label() const;
};

struct BleuReport {
  double bleu = 0.0;  // percentage
  double precision[4] = {0, 0, 0, 0};
  long matches[4] = {0, 0, 0, 0};
  long totals[4] = {0, 0, 0, 0};
  double brevity_penalty = 0.0;
  long hyp_length = 0;
  long ref_length = 0;
  int sentences = 0;
  std::vector<BleuBucket> buckets;  // every bucket, empty ones included

  std::string Table() const;
  // key=value lines, fixed order.
  std::string KeyValues() const;
};

// Reference-length ranges used for the bucketed report.
const std::vector<BleuBucket> &BleuBuckets();

// Case-sensitive 4-gram corpus BLEU, no smoothing. Orders with no n-grams in
// the whole corpus are left out of the geometric mean. Throws
// std::invalid_argument when the lists differ in length.
BleuReport CorpusBleu(const std::vector<TokenList> &refs, const std::vector<TokenList> &hyps);

// BLEU only, without buckets.
double CorpusBleuScore(const std::vector<TokenList> &refs, const std::vector<TokenList> &hyps);

struct Neighbor {
  int row = 0;
  double cosine = 0.0;
};

// Top-k rows of the output matrix by cosine similarity to `row`, self
// excluded, ties by row. Zero rows have similarity 0 to everything. Throws
// std::out_of_range for a bad row.
std::vector<Neighbor> ActionNeighbors(const Matrix &output, int row, int k);

}  // namespace synlin

#endif  // SYNLIN_EVAL_H_
