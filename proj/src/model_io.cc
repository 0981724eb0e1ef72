#include "synlin/model_io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "synlin/features.h"

namespace synlin {
namespace {

using nlohmann::json;

constexpr char kMagic[] = "synlin-model\n";
constexpr char kLengthKey[] = "header_bytes=";

static_assert(std::endian::native == std::endian::little,
              "payload encoding assumes a little-endian host");

json IndexersToJson(const Indexers &indexers) {
  return json{{"words", indexers.words.symbols()},
              {"pos", indexers.pos.symbols()},
              {"labels", indexers.labels.symbols()},
              {"counts", indexers.counts},
              {"min_count", indexers.min_count}};
}

Indexers IndexersFromJson(const json &j) {
  Indexers indexers;
  indexers.words = Vocabulary(j.at("words").get<std::vector<std::string>>());
  indexers.pos = Vocabulary(j.at("pos").get<std::vector<std::string>>());
  indexers.labels = Vocabulary(j.at("labels").get<std::vector<std::string>>());
  indexers.counts = j.at("counts").get<std::map<std::string, int>>();
  indexers.min_count = j.at("min_count").get<int>();
  return indexers;
}

json TrainConfigToJson(const TrainConfig &c) {
  return json{{"learning_rate", c.learning_rate}, {"l2", c.l2},
              {"dropout", c.dropout},             {"epochs", c.epochs},
              {"batch_size", c.batch_size},       {"seed", c.seed},
              {"embed_dim", c.embed_dim},         {"hidden_dim", c.hidden_dim},
              {"init_range", c.init_range},       {"adagrad_epsilon", c.adagrad_epsilon}};
}

TrainConfig TrainConfigFromJson(const json &j) {
  TrainConfig c;
  c.learning_rate = j.at("learning_rate").get<double>();
  c.l2 = j.at("l2").get<double>();
  c.dropout = j.at("dropout").get<double>();
  c.epochs = j.at("epochs").get<int>();
  c.batch_size = j.at("batch_size").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.embed_dim = j.at("embed_dim").get<int>();
  c.hidden_dim = j.at("hidden_dim").get<int>();
  c.init_range = j.at("init_range").get<double>();
  c.adagrad_epsilon = j.at("adagrad_epsilon").get<double>();
  return c;
}

json LmConfigToJson(const LmConfig &c) {
  return json{{"layers", c.layers},         {"units", c.units},
              {"dropout", c.dropout},       {"learning_rate", c.learning_rate},
              {"epochs", c.epochs},         {"batch_size", c.batch_size},
              {"seed", c.seed},             {"init_range", c.init_range},
              {"gate_bias", c.gate_bias},   {"adagrad_epsilon", c.adagrad_epsilon}};
}

LmConfig LmConfigFromJson(const json &j) {
  LmConfig c;
  c.layers = j.at("layers").get<int>();
  c.units = j.at("units").get<int>();
  c.dropout = j.at("dropout").get<double>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.epochs = j.at("epochs").get<int>();
  c.batch_size = j.at("batch_size").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.init_range = j.at("init_range").get<double>();
  c.gate_bias = j.at("gate_bias").get<bool>();
  c.adagrad_epsilon = j.at("adagrad_epsilon").get<double>();
  return c;
}

json ShapeToJson(const ScorerShape &s) {
  return json{{"variant", VariantName(s.variant)}, {"num_words", s.num_words},
              {"num_pos", s.num_pos},               {"num_labels", s.num_labels},
              {"num_actions", s.num_actions},       {"embed_dim", s.embed_dim},
              {"hidden_dim", s.hidden_dim},         {"lm_dim", s.lm_dim}};
}

ScorerShape ShapeFromJson(const json &j) {
  ScorerShape s;
  s.variant = ParseVariant(j.at("variant").get<std::string>());
  s.num_words = j.at("num_words").get<int>();
  s.num_pos = j.at("num_pos").get<int>();
  s.num_labels = j.at("num_labels").get<int>();
  s.num_actions = j.at("num_actions").get<int>();
  s.embed_dim = j.at("embed_dim").get<int>();
  s.hidden_dim = j.at("hidden_dim").get<int>();
  s.lm_dim = j.at("lm_dim").get<int>();
  return s;
}

// Appends tensors to the payload and returns their table.
json WriteTensors(const TensorList &tensors, std::string *payload) {
  json table = json::array();
  for (const NamedTensor &t : tensors) {
    const Matrix &m = *t.value;
    table.push_back({{"name", t.name},
                     {"rows", m.rows()},
                     {"cols", m.cols()},
                     {"offset", payload->size()}});
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        const double v = m(r, c);
        char bytes[sizeof v];
        std::memcpy(bytes, &v, sizeof v);
        payload->append(bytes, sizeof v);
      }
    }
  }
  return table;
}

void ReadTensors(const json &table, const std::string &payload, const TensorList &tensors) {
  if (table.size() != tensors.size()) {
    throw ModelFormatError("tensor table has " + std::to_string(table.size()) +
                           " entries, expected " + std::to_string(tensors.size()));
  }
  for (size_t i = 0; i < tensors.size(); ++i) {
    const json &entry = table[i];
    Matrix &m = *tensors[i].value;
    const std::string name = entry.at("name").get<std::string>();
    const long rows = entry.at("rows").get<long>();
    const long cols = entry.at("cols").get<long>();
    const size_t offset = entry.at("offset").get<size_t>();
    if (name != tensors[i].name || rows != m.rows() || cols != m.cols()) {
      throw ModelFormatError("tensor " + name + " " + std::to_string(rows) + "x" +
                             std::to_string(cols) + " does not match expected " +
                             tensors[i].name + " " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()));
    }
    const size_t bytes = static_cast<size_t>(rows) * cols * sizeof(double);
    if (offset > payload.size() || payload.size() - offset < bytes) {
      throw ModelFormatError("payload truncated in tensor " + name);
    }
    const char *p = payload.data() + offset;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        double v;
        std::memcpy(&v, p, sizeof v);
        p += sizeof v;
        m(r, c) = v;
      }
    }
  }
}

}  // namespace

std::string ModelBundle::Component() const {
  if (linearizer && lm) return "combined";
  if (linearizer) return "linearizer";
  if (lm) return "lm";
  throw ModelFormatError("empty model bundle");
}

std::string SerializeModel(const ModelBundle &bundle) {
  json header;
  header["format_version"] = kModelFormatVersion;
  header["component"] = bundle.Component();
  std::string payload;
  if (bundle.linearizer) {
    const LinearizerModel &m = *bundle.linearizer;
    m.params.CheckShapes();
    json j;
    j["indexers"] = IndexersToJson(m.indexers);
    j["variant"] = VariantName(m.variant());
    j["shape"] = ShapeToJson(m.params.shape);
    j["config"] = TrainConfigToJson(m.config);
    j["feature_slots"] = FeatureSlotNames(m.variant());
    j["tensors"] = WriteTensors(const_cast<LinearizerParams &>(m.params).Tensors(), &payload);
    header["linearizer"] = std::move(j);
  }
  if (bundle.lm) {
    const LanguageModel &m = *bundle.lm;
    m.params.CheckShapes();
    json j;
    j["indexers"] = IndexersToJson(m.indexers);
    j["config"] = LmConfigToJson(m.config);
    j["layers"] = m.params.layers;
    j["units"] = m.params.units;
    j["vocab_size"] = m.params.vocab_size;
    j["gate_bias"] = m.params.gate_bias;
    j["tensors"] = WriteTensors(const_cast<LmParams &>(m.params).Tensors(), &payload);
    header["lm"] = std::move(j);
  }
  header["payload_bytes"] = payload.size();
  std::string text = header.dump(1) + "\n";
  return std::string(kMagic) + kLengthKey + std::to_string(text.size()) + "\n" + text + payload;
}

ModelBundle DeserializeModel(const std::string &bytes) {
  const size_t magic_len = sizeof kMagic - 1;
  if (bytes.compare(0, magic_len, kMagic) != 0) {
    throw ModelFormatError("not a synlin model (bad magic line)");
  }
  size_t pos = magic_len;
  const size_t key_len = sizeof kLengthKey - 1;
  const size_t eol = bytes.find('\n', pos);
  if (bytes.compare(pos, key_len, kLengthKey) != 0 || eol == std::string::npos) {
    throw ModelFormatError("missing header length line");
  }
  size_t header_bytes = 0;
  try {
    header_bytes = std::stoul(bytes.substr(pos + key_len, eol - pos - key_len));
  } catch (const std::exception &) {
    throw ModelFormatError("bad header length");
  }
  pos = eol + 1;
  if (bytes.size() - pos < header_bytes) throw ModelFormatError("header truncated");
  json header;
  try {
    header = json::parse(bytes.substr(pos, header_bytes));
  } catch (const json::exception &e) {
    throw ModelFormatError(std::string("header is not valid JSON: ") + e.what());
  }
  const std::string payload = bytes.substr(pos + header_bytes);

  ModelBundle bundle;
  try {
    const int version = header.at("format_version").get<int>();
    if (version != kModelFormatVersion) {
      throw ModelFormatError("unsupported format_version " + std::to_string(version) +
                             " (expected " + std::to_string(kModelFormatVersion) + ")");
    }
    if (header.at("payload_bytes").get<size_t>() != payload.size()) {
      throw ModelFormatError("payload has " + std::to_string(payload.size()) +
                             " bytes, header says " +
                             std::to_string(header.at("payload_bytes").get<size_t>()));
    }
    if (header.contains("linearizer")) {
      const json &j = header["linearizer"];
      LinearizerModel m;
      m.indexers = IndexersFromJson(j.at("indexers"));
      m.config = TrainConfigFromJson(j.at("config"));
      m.params = LinearizerParams::Zeros(ShapeFromJson(j.at("shape")));
      if (j.at("feature_slots").get<std::vector<std::string>>() != FeatureSlotNames(m.variant())) {
        throw ModelFormatError("feature slot layout differs from this build");
      }
      ReadTensors(j.at("tensors"), payload, m.params.Tensors());
      bundle.linearizer = std::move(m);
    }
    if (header.contains("lm")) {
      const json &j = header["lm"];
      LanguageModel m;
      m.indexers = IndexersFromJson(j.at("indexers"));
      m.config = LmConfigFromJson(j.at("config"));
      m.params = LmParams::Zeros(m.indexers.num_words(), m.config);
      if (j.at("vocab_size").get<int>() != m.params.vocab_size ||
          j.at("layers").get<int>() != m.params.layers ||
          j.at("units").get<int>() != m.params.units ||
          j.at("gate_bias").get<bool>() != m.params.gate_bias) {
        throw ModelFormatError("LM dimensions disagree with its config and indexers");
      }
      ReadTensors(j.at("tensors"), payload, m.params.Tensors());
      bundle.lm = std::move(m);
    }
    if (header.at("component").get<std::string>() != bundle.Component()) {
      throw ModelFormatError("component tag does not match the stored models");
    }
  } catch (const json::exception &e) {
    throw ModelFormatError(std::string("malformed header: ") + e.what());
  } catch (const std::invalid_argument &e) {
    throw ModelFormatError(std::string("malformed header: ") + e.what());
  }
  return bundle;
}

void SaveModel(const std::string &path, const ModelBundle &bundle) {
  const std::string bytes = SerializeModel(bundle);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path);
}

ModelBundle LoadModel(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return DeserializeModel(buffer.str());
}

}  // namespace synlin
