#include "synlin/commands.h"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "synlin/errors.h"
#include "synlin/features.h"
#include "synlin/oracle.h"

namespace synlin {
namespace {

std::string FormatDouble(double value, const char *format = "%.17g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, value);
  return buf;
}

std::string Join(const std::vector<std::string> &items, char sep = ' ') {
  std::string out;
  for (size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += sep;
    out += items[i];
  }
  return out;
}

std::vector<std::string> SplitWhitespace(const std::string &line) {
  std::istringstream in(line);
  std::vector<std::string> tokens;
  std::string token;
  while (in >> token) tokens.push_back(token);
  return tokens;
}

void Require(const std::string &value, const char *flag, const char *command) {
  if (value.empty()) throw UsageError(std::string(command) + " needs --" + flag);
}

std::ifstream OpenInput(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return in;
}

// Reads a corpus for training: rejected trees are reported and skipped.
std::vector<DepSentence> ReadTrainingCorpus(const std::string &path, std::ostream &log) {
  std::vector<Rejection> rejected;
  std::vector<DepSentence> corpus = ReadConllFile(path, &rejected);
  for (const Rejection &r : rejected) {
    log << "skip sentence=" << r.sentence << " line=" << r.line
        << " reason=" << TreeErrorKindName(r.kind) << "\n";
  }
  log << "read sentences=" << corpus.size() << " skipped=" << rejected.size() << "\n";
  if (corpus.empty()) throw DataError(path + ": no usable sentences");
  return corpus;
}

LanguageModel ExpectLm(ModelBundle bundle, const std::string &path) {
  if (!bundle.lm) throw ConfigError(path + " holds no language model");
  return std::move(*bundle.lm);
}

std::vector<TokenList> ReadTokenLists(const std::string &path, const std::string &format) {
  std::vector<TokenList> lists;
  if (format == "conll") {
    std::ifstream in = OpenInput(path);
    try {
      for (const DepSentence &s : ParseConllUnchecked(in)) lists.push_back(s.Forms());
    } catch (const ParseError &e) {
      throw ParseError(e.line(), path + ": " + e.what());
    }
    return lists;
  }
  if (format != "text" && format != "decode") {
    throw UsageError("unknown token-list format '" + format + "'");
  }
  std::ifstream in = OpenInput(path);
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (format == "text") {
      lists.push_back(SplitWhitespace(line));
      continue;
    }
    const size_t first = line.find('\t');
    const size_t second = first == std::string::npos ? first : line.find('\t', first + 1);
    if (second == std::string::npos) {
      throw ParseError(line_number, path + ": decode record needs at least two fields");
    }
    lists.push_back(SplitWhitespace(line.substr(first + 1, second - first - 1)));
  }
  return lists;
}

}  // namespace

std::string ErrorCode(const std::exception &error) {
  if (dynamic_cast<const UsageError *>(&error)) return "usage";
  if (dynamic_cast<const IoError *>(&error)) return "io";
  if (dynamic_cast<const ParseError *>(&error)) return "parse";
  if (dynamic_cast<const TreeError *>(&error)) return "tree";
  if (dynamic_cast<const ConfigError *>(&error)) return "config";
  if (dynamic_cast<const DerivationError *>(&error)) return "data";
  if (dynamic_cast<const DataError *>(&error)) return "data";
  if (dynamic_cast<const TrainingError *>(&error)) return "training";
  if (dynamic_cast<const ModelFormatError *>(&error)) return "model-format";
  if (dynamic_cast<const SearchBoundError *>(&error)) return "search-bound";
  if (dynamic_cast<const ContractError *>(&error)) return "contract";
  if (dynamic_cast<const std::invalid_argument *>(&error)) return "invalid-argument";
  if (dynamic_cast<const std::out_of_range *>(&error)) return "out-of-range";
  return "internal";
}

std::vector<TrainingExample> OracleExamples(const DepSentence &sentence,
                                            const TransitionSystem &system,
                                            const LanguageModel *lm) {
  const std::vector<Action> actions = DeriveOracle(sentence, system);
  const WordBag bag = ToBag(sentence);
  State state = system.Initial(bag);
  LmState lm_state;
  if (lm != nullptr) lm_state = LmStartState(lm->params);
  std::vector<TrainingExample> examples;
  examples.reserve(actions.size());
  for (const Action &gold : actions) {
    TrainingExample example;
    example.features = ExtractFeatures(state, system.variant());
    for (const Action &a : system.LegalActions(state)) example.rows.push_back(system.ActionRow(a));
    example.gold_row = system.ActionRow(gold);
    if (lm != nullptr) example.lm_feature = lm_state.top();
    examples.push_back(std::move(example));
    if (lm != nullptr && gold.is_shift()) {
      lm_state = LmStep(lm->params, lm_state, lm->indexers.WordId(bag.entries()[gold.form].form));
    }
    state = system.Apply(state, gold);
  }
  return examples;
}

LanguageModel TrainLanguageModel(const std::vector<DepSentence> &corpus, const LmConfig &config,
                                 int min_count, const LogFn &log) {
  config.Validate();
  LanguageModel model;
  model.indexers = BuildIndexers(corpus, min_count);
  model.config = config;
  Rng rng(config.seed);
  model.params = LmParams::Random(model.indexers.num_words(), config, &rng);
  TrainLm(&model.params, EncodeForLm(model.indexers, corpus), config,
          [&](const LmEpochStats &stats) {
            if (log) {
              log("epoch=" + std::to_string(stats.epoch) +
                  " perplexity=" + FormatDouble(stats.perplexity, "%.6f"));
            }
          });
  return model;
}

LinearizerModel TrainLinearizer(const std::vector<DepSentence> &corpus, Variant variant,
                                const TrainConfig &config, int min_count, const LanguageModel *lm,
                                const LogFn &log) {
  config.Validate();
  LinearizerModel model;
  model.indexers = BuildIndexers(corpus, min_count);
  model.config = config;
  if (variant == Variant::kFull && model.indexers.num_real_pos() == 0) {
    throw ConfigError("full variant needs POS tags but the POS inventory is empty");
  }
  TransitionSystem system(model.indexers, variant);
  std::vector<TrainingExample> examples;
  for (const DepSentence &sentence : corpus) {
    std::vector<TrainingExample> more = OracleExamples(sentence, system, lm);
    examples.insert(examples.end(), std::make_move_iterator(more.begin()),
                    std::make_move_iterator(more.end()));
  }
  if (log) log("oracle sentences=" + std::to_string(corpus.size()) +
               " examples=" + std::to_string(examples.size()));
  const int lm_dim = lm != nullptr ? lm->params.units : 0;
  Rng rng(config.seed);
  model.params = LinearizerParams::Random(
      ScorerShape::For(system, config.embed_dim, config.hidden_dim, lm_dim), config.init_range,
      &rng);
  Train(&model.params, std::move(examples), config, [&](const EpochStats &stats) {
    if (log) {
      log("epoch=" + std::to_string(stats.epoch) + " loss=" + FormatDouble(stats.loss, "%.6f") +
          " param_norm=" + FormatDouble(stats.param_norm, "%.6f"));
    }
  });
  return model;
}

std::vector<DecodeResult> DecodeAll(const Decoder &decoder, const std::vector<WordBag> &bags,
                                    int threads) {
  std::vector<DecodeResult> results(bags.size());
  if (threads <= 1 || bags.size() <= 1) {
    for (size_t i = 0; i < bags.size(); ++i) results[i] = decoder.Beam(bags[i]);
    return results;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&]() {
    while (!failed) {
      const size_t i = next++;
      if (i >= bags.size()) return;
      try {
        results[i] = decoder.Beam(bags[i]);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int count = std::min<int>(threads, static_cast<int>(bags.size()));
  for (int t = 0; t < count; ++t) pool.emplace_back(work);
  for (std::thread &t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

std::string FormatDecodeRecord(int index, const DecodeResult &result) {
  std::vector<std::string> arcs;
  for (const OutputArc &arc : result.arcs) {
    std::string item = std::to_string(arc.head) + ":" + std::to_string(arc.dependent);
    if (!arc.label.empty()) item += ":" + arc.label;
    arcs.push_back(item);
  }
  return std::to_string(index) + "\t" + Join(result.words) + "\t" + FormatDouble(result.score) +
         "\t" + Join(result.derivation) + "\t" + Join(arcs);
}

std::vector<WordBag> ReadBags(std::istream &in) {
  std::vector<WordBag> bags;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> tokens = SplitWhitespace(line);
    if (tokens.empty()) continue;
    bags.emplace_back(tokens);
  }
  return bags;
}

void CmdTrainLm(const RunConfig &config, std::ostream &log) {
  Require(config.corpus, "corpus", "train-lm");
  Require(config.out, "out", "train-lm");
  std::ifstream in = OpenInput(config.corpus);
  std::vector<DepSentence> corpus;
  try {
    corpus = ParseConllUnchecked(in);
  } catch (const ParseError &e) {
    throw ParseError(e.line(), config.corpus + ": " + e.what());
  }
  if (corpus.empty()) throw DataError(config.corpus + ": no sentences");
  log << "read sentences=" << corpus.size() << "\n";
  LmConfig lm_config = config.lm_config;
  lm_config.seed = config.seed;
  ModelBundle bundle;
  bundle.lm = TrainLanguageModel(corpus, lm_config, config.min_count,
                                 [&](const std::string &line) { log << line << "\n"; });
  SaveModel(config.out, bundle);
  log << "wrote " << config.out << "\n";
}

void CmdTrain(const RunConfig &config, std::ostream &log) {
  Require(config.corpus, "corpus", "train");
  Require(config.out, "out", "train");
  const Variant variant = ParseVariant(config.variant);
  std::vector<DepSentence> corpus = ReadTrainingCorpus(config.corpus, log);
  TrainConfig train_config = config.train;
  train_config.seed = config.seed;
  ModelBundle bundle;
  if (!config.lm.empty()) bundle.lm = ExpectLm(LoadModel(config.lm), config.lm);
  bundle.linearizer =
      TrainLinearizer(corpus, variant, train_config, config.min_count,
                      bundle.lm ? &*bundle.lm : nullptr,
                      [&](const std::string &line) { log << line << "\n"; });
  SaveModel(config.out, bundle);
  log << "wrote " << config.out << " component=" << bundle.Component() << "\n";
}

void CmdDecode(const RunConfig &config, std::ostream &out, std::ostream &log) {
  Require(config.input, "input", "decode");
  DecodeConfig decode_config;
  decode_config.mode = ParseDecodeMode(config.mode);
  decode_config.beam_size = config.beam;
  decode_config.alpha = config.alpha;
  decode_config.renormalize = config.renormalize;
  if (config.threads < 1) throw ConfigError("threads must be >= 1");

  ModelBundle bundle;
  if (!config.model.empty()) bundle = LoadModel(config.model);
  if (!config.lm.empty()) {
    if (bundle.lm) throw UsageError(config.model + " already holds a language model; drop --lm");
    bundle.lm = ExpectLm(LoadModel(config.lm), config.lm);
  }
  if (!bundle.linearizer && !bundle.lm) throw UsageError("decode needs --model and/or --lm");
  DecodeModels models{bundle.linearizer ? &*bundle.linearizer : nullptr,
                      bundle.lm ? &*bundle.lm : nullptr};
  const Decoder decoder(models, decode_config);

  std::vector<WordBag> bags;
  std::ifstream in = OpenInput(config.input);
  if (config.input_format == "conll") {
    try {
      for (const DepSentence &s : ParseConllUnchecked(in)) bags.push_back(ToBag(s));
    } catch (const ParseError &e) {
      throw ParseError(e.line(), config.input + ": " + e.what());
    }
  } else if (config.input_format == "bags") {
    bags = ReadBags(in);
  } else {
    throw UsageError("unknown input format '" + config.input_format + "'");
  }
  log << "decode sentences=" << bags.size() << " mode=" << DecodeModeName(decode_config.mode)
      << " beam=" << decode_config.beam_size << "\n";

  const std::vector<DecodeResult> results = DecodeAll(decoder, bags, config.threads);
  std::ofstream file;
  std::ostream *sink = &out;
  if (!config.output.empty()) {
    file.open(config.output, std::ios::trunc);
    if (!file) throw IoError("cannot write " + config.output);
    sink = &file;
  }
  for (size_t i = 0; i < results.size(); ++i) {
    *sink << FormatDecodeRecord(static_cast<int>(i), results[i]) << "\n";
  }
  if (!*sink) throw IoError("write failed");
}

BleuReport CmdEvaluate(const RunConfig &config, std::ostream &out) {
  Require(config.refs, "refs", "evaluate");
  Require(config.hyps, "hyps", "evaluate");
  if (config.refs_format != "conll" && config.refs_format != "text") {
    throw UsageError("refs-format must be conll or text");
  }
  if (config.hyps_format != "decode" && config.hyps_format != "text") {
    throw UsageError("hyps-format must be decode or text");
  }
  const std::vector<TokenList> refs = ReadTokenLists(config.refs, config.refs_format);
  const std::vector<TokenList> hyps = ReadTokenLists(config.hyps, config.hyps_format);
  if (refs.size() != hyps.size()) {
    throw DataError("references have " + std::to_string(refs.size()) + " sentences, hypotheses " +
                    std::to_string(hyps.size()));
  }
  BleuReport report = CorpusBleu(refs, hyps);
  out << report.Table() << "\n" << report.KeyValues();
  return report;
}

void CmdInspect(const RunConfig &config, std::ostream &out) {
  Require(config.model, "model", "inspect");
  Require(config.action, "action", "inspect");
  const ModelBundle bundle = LoadModel(config.model);
  if (!bundle.linearizer) throw ConfigError(config.model + " holds no linearizer");
  const LinearizerModel &model = *bundle.linearizer;
  const TransitionSystem system(model.indexers, model.variant());
  const int row = system.FindRow(config.action);
  if (row < 0) throw UsageError("unknown action '" + config.action + "'");
  for (const Neighbor &n : ActionNeighbors(model.params.output, row, config.k)) {
    out << system.ActionName(system.RowAction(n.row)) << "\t" << FormatDouble(n.cosine, "%.6f")
        << "\n";
  }
}

OracleCheckReport CmdOracleCheck(const RunConfig &config, std::ostream &out) {
  Require(config.corpus, "corpus", "oracle-check");
  const Variant variant = ParseVariant(config.variant);
  std::vector<Rejection> rejected;
  const std::vector<DepSentence> corpus = ReadConllFile(config.corpus, &rejected);
  const Indexers indexers = BuildIndexers(corpus, 1);
  const TransitionSystem system(indexers, variant);
  OracleCheckReport report;
  report.sentences = static_cast<int>(corpus.size() + rejected.size());
  report.skipped = static_cast<int>(rejected.size());
  for (const Rejection &r : rejected) {
    out << "skip\t" << r.sentence << "\t" << TreeErrorKindName(r.kind) << "\n";
  }
  for (size_t i = 0; i < corpus.size(); ++i) {
    bool ok = false;
    try {
      const std::vector<Action> actions = DeriveOracle(corpus[i], system);
      const State end = ReplayOracle(corpus[i], system, actions);
      ok = static_cast<int>(actions.size()) == system.DerivationLength(corpus[i].size()) &&
           MatchesGold(corpus[i], system, end);
    } catch (const DerivationError &) {
    } catch (const ContractError &) {
    }
    if (ok) {
      ++report.passed;
    } else {
      report.mismatches.push_back(static_cast<int>(i));
      out << "mismatch\t" << i << "\t" << Join(corpus[i].Forms()) << "\n";
    }
  }
  out << "sentences=" << report.sentences << " pass=" << report.passed
      << " skip=" << report.skipped << " mismatch=" << report.mismatches.size() << "\n";
  if (!report.mismatches.empty()) {
    throw DataError(std::to_string(report.mismatches.size()) + " oracle round-trip mismatches");
  }
  return report;
}

}  // namespace synlin
