// Single-file model container.
//
//   synlin-model\n
//   header_bytes=<N>\n
//   <N bytes of JSON header>
//   <tensor payloads: row-major little-endian float64>
//
// The header records the format version, the component tag (linearizer, lm
// or combined), indexers, the variant, config snapshots, the feature slot
// layout and, per tensor, its name, shape and byte offset into the payload.
// Keys are sorted, so saving a loaded model reproduces the file byte for
// byte.

#ifndef SYNLIN_MODEL_IO_H_
#define SYNLIN_MODEL_IO_H_

#include <optional>
#include <stdexcept>
#include <string>

#include "synlin/decoder.h"

namespace synlin {

inline constexpr int kModelFormatVersion = 1;

class ModelFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelBundle {
  std::optional<LinearizerModel> linearizer;
  std::optional<LanguageModel> lm;

  // "linearizer", "lm" or "combined". Throws ModelFormatError when empty.
  std::string Component() const;
};

std::string SerializeModel(const ModelBundle &bundle);
// Throws ModelFormatError on a bad magic line, version, shape or payload.
ModelBundle DeserializeModel(const std::string &bytes);

// Throws IoError on I/O failure.
void SaveModel(const std::string &path, const ModelBundle &bundle);
ModelBundle LoadModel(const std::string &path);

}  // namespace synlin

#endif  // SYNLIN_MODEL_IO_H_
