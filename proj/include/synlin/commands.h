// Pipeline pieces behind the command-line tool.

#ifndef SYNLIN_COMMANDS_H_
#define SYNLIN_COMMANDS_H_

#include <cstdint>
#include <exception>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "synlin/decoder.h"
#include "synlin/eval.h"
#include "synlin/model_io.h"

namespace synlin {

// Every key accepted on the command line or in a config file. Defaults are
// the documented defaults.
struct RunConfig {
  // Files
  std::string corpus;                // train-lm, train, oracle-check
  std::string out;                   // train-lm, train: model file to write
  std::string model;                 // decode, inspect: linearizer or combined model
  std::string lm;                    // train: LM for input features; decode: LM
  std::string input;                 // decode
  std::string input_format = "conll";  // conll | bags
  std::string output;                // decode, evaluate: empty means stdout
  std::string refs;                  // evaluate
  std::string hyps;                  // evaluate
  std::string refs_format = "conll";   // conll | text
  std::string hyps_format = "decode";  // decode | text

  std::uint64_t seed = 1;
  int min_count = 1;
  std::string variant = "full";  // full | light

  TrainConfig train;
  LmConfig lm_config;

  std::string mode = "syn";  // syn | lstm | syn+lstm | syn*lstm
  int beam = 1;
  double alpha = 0.4;
  bool renormalize = false;
  int threads = 1;

  std::string action;  // inspect
  int k = 10;          // inspect
};

// Short machine-readable reason for an exception escaping a command.
std::string ErrorCode(const std::exception &error);

// Oracle decisions of one sentence. With `lm`, each example carries the LM
// top-layer output after <s> and the words shifted so far.
std::vector<TrainingExample> OracleExamples(const DepSentence &sentence,
                                            const TransitionSystem &system,
                                            const LanguageModel *lm = nullptr);

using LogFn = std::function<void(const std::string &)>;

LanguageModel TrainLanguageModel(const std::vector<DepSentence> &corpus, const LmConfig &config,
                                 int min_count, const LogFn &log = {});

// Throws ConfigError when the full variant has no POS tags to predict.
LinearizerModel TrainLinearizer(const std::vector<DepSentence> &corpus, Variant variant,
                                const TrainConfig &config, int min_count,
                                const LanguageModel *lm = nullptr, const LogFn &log = {});

// Decodes every bag; output order follows input order for any thread count.
std::vector<DecodeResult> DecodeAll(const Decoder &decoder, const std::vector<WordBag> &bags,
                                    int threads);

// index, sentence, score, derivation, arcs; tab-separated.
std::string FormatDecodeRecord(int index, const DecodeResult &result);

// Reads one bag per line (whitespace-separated tokens).
std::vector<WordBag> ReadBags(std::istream &in);

// Commands. Results go to `out`, progress to `log`. Failures throw.
void CmdTrainLm(const RunConfig &config, std::ostream &log);
void CmdTrain(const RunConfig &config, std::ostream &log);
void CmdDecode(const RunConfig &config, std::ostream &out, std::ostream &log);
BleuReport CmdEvaluate(const RunConfig &config, std::ostream &out);
void CmdInspect(const RunConfig &config, std::ostream &out);

struct OracleCheckReport {
  int sentences = 0;
  int passed = 0;
  int skipped = 0;  // rejected trees
  std::vector<int> mismatches;  // block indices
};
// Throws DataError when any sentence fails the round trip.
OracleCheckReport CmdOracleCheck(const RunConfig &config, std::ostream &out);

}  // namespace synlin

#endif  // SYNLIN_COMMANDS_H_
