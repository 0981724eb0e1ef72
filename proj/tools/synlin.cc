// synlin: train, decode and evaluate the syntactic linearizer.

#include <algorithm>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "synlin/commands.h"
#include "synlin/errors.h"

namespace {

std::string OneLine(std::string text) {
  std::replace(text.begin(), text.end(), '\n', ' ');
  std::replace(text.begin(), text.end(), '\r', ' ');
  return text;
}

int Fail(const std::string &code, const std::string &message, int status) {
  std::cerr << "error code=" << code << " msg=" << OneLine(message) << "\n";
  return status;
}

void AddOptions(CLI::App &app, synlin::RunConfig &c) {
  app.option_defaults()->always_capture_default();

  app.add_option("--corpus", c.corpus, "CoNLL training corpus (train-lm, train, oracle-check)")
      ->group("Files");
  app.add_option("--out", c.out, "model file to write (train-lm, train)")->group("Files");
  app.add_option("--model", c.model, "linearizer or combined model (decode, inspect)")
      ->group("Files");
  app.add_option("--lm", c.lm,
                 "language model: input features when training, LM scores when decoding")
      ->group("Files");
  app.add_option("--input", c.input, "sentences to linearize (decode)")->group("Files");
  app.add_option("--input-format", c.input_format, "conll or bags (one bag per line)")
      ->check(CLI::IsMember({"conll", "bags"}))
      ->group("Files");
  app.add_option("--output", c.output, "decode/evaluate output file; stdout when empty")
      ->group("Files");
  app.add_option("--refs", c.refs, "reference sentences (evaluate)")->group("Files");
  app.add_option("--hyps", c.hyps, "hypotheses (evaluate)")->group("Files");
  app.add_option("--refs-format", c.refs_format, "conll or text")
      ->check(CLI::IsMember({"conll", "text"}))
      ->group("Files");
  app.add_option("--hyps-format", c.hyps_format, "decode (decode output) or text")
      ->check(CLI::IsMember({"decode", "text"}))
      ->group("Files");

  app.add_option("--seed", c.seed, "random seed for initialization and shuffling");
  app.add_option("--min-count", c.min_count, "words rarer than this map to <UNK>")
      ->check(CLI::PositiveNumber);
  app.add_option("--variant", c.variant, "full (words, POS, labels) or light (words only)")
      ->check(CLI::IsMember({"full", "light"}));

  auto &t = c.train;
  app.add_option("--epochs", t.epochs, "linearizer training epochs")->group("Linearizer");
  app.add_option("--learning-rate", t.learning_rate, "Adagrad learning rate")
      ->group("Linearizer");
  app.add_option("--l2", t.l2, "L2 regularization strength")->group("Linearizer");
  app.add_option("--dropout", t.dropout, "hidden-layer dropout")->group("Linearizer");
  app.add_option("--batch-size", t.batch_size, "examples per update")->group("Linearizer");
  app.add_option("--embed-dim", t.embed_dim, "embedding size")->group("Linearizer");
  app.add_option("--hidden-dim", t.hidden_dim, "hidden layer size")->group("Linearizer");
  app.add_option("--init-range", t.init_range, "uniform initialization range")
      ->group("Linearizer");

  auto &l = c.lm_config;
  app.add_option("--lm-layers", l.layers, "LSTM layers")->group("Language model");
  app.add_option("--lm-units", l.units, "LSTM units (and embedding size)")
      ->group("Language model");
  app.add_option("--lm-dropout", l.dropout, "dropout on layer outputs")->group("Language model");
  app.add_option("--lm-learning-rate", l.learning_rate, "Adagrad learning rate")
      ->group("Language model");
  app.add_option("--lm-epochs", l.epochs, "training epochs")->group("Language model");
  app.add_option("--lm-batch-size", l.batch_size, "sentences per update")
      ->group("Language model");
  app.add_option("--lm-init-range", l.init_range, "uniform initialization range")
      ->group("Language model");
  app.add_flag("--lm-gate-bias,!--no-lm-gate-bias", l.gate_bias, "add biases to the gates")
      ->group("Language model");

  app.add_option("--mode", c.mode, "syn, lstm, syn+lstm or syn*lstm")
      ->check(CLI::IsMember({"syn", "lstm", "syn+lstm", "syn*lstm", "synxlstm"}))
      ->group("Decoding");
  app.add_option("--beam", c.beam, "beam size")->check(CLI::PositiveNumber)->group("Decoding");
  app.add_option("--alpha", c.alpha, "LM weight in syn+lstm")->group("Decoding");
  app.add_flag("--renormalize,!--no-renormalize", c.renormalize,
               "renormalize syn+lstm scores at each step")
      ->group("Decoding");
  app.add_option("--threads", c.threads, "sentences decoded in parallel")
      ->check(CLI::PositiveNumber)
      ->group("Decoding");

  app.add_option("--action", c.action, "action name, e.g. Shift-dog or RArc-dobj (inspect)")
      ->group("Inspect");
  app.add_option("--k", c.k, "neighbours to list (inspect)")->group("Inspect");
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Syntactic linearization with a transition-based scorer and an LSTM LM"};
  app.set_config("--config", "", "flat key=value file; command-line flags take precedence");
  app.allow_config_extras(false);
  app.fallthrough();
  app.require_subcommand(1);

  synlin::RunConfig config;
  AddOptions(app, config);
  CLI::App *train_lm = app.add_subcommand("train-lm", "train the LSTM language model");
  CLI::App *train = app.add_subcommand("train", "train the linearizer");
  CLI::App *decode = app.add_subcommand("decode", "linearize bags of words");
  CLI::App *evaluate = app.add_subcommand("evaluate", "corpus BLEU with length buckets");
  CLI::App *inspect = app.add_subcommand("inspect", "nearest actions by output-row cosine");
  CLI::App *oracle = app.add_subcommand("oracle-check", "verify oracle round trips on a corpus");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return Fail("usage", e.what(), 2);
  }

  try {
    if (train_lm->parsed()) {
      synlin::CmdTrainLm(config, std::cerr);
    } else if (train->parsed()) {
      synlin::CmdTrain(config, std::cerr);
    } else if (decode->parsed()) {
      synlin::CmdDecode(config, std::cout, std::cerr);
    } else if (evaluate->parsed()) {
      synlin::CmdEvaluate(config, std::cout);
    } else if (inspect->parsed()) {
      synlin::CmdInspect(config, std::cout);
    } else if (oracle->parsed()) {
      synlin::CmdOracleCheck(config, std::cout);
    }
  } catch (const std::exception &e) {
    const std::string code = synlin::ErrorCode(e);
    return Fail(code, e.what(), code == "usage" ? 2 : 1);
  }
  std::cout.flush();
  return 0;
}
