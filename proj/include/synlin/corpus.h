// Dependency corpora: CoNLL-X reading, tree validation, symbol tables and
// word bags.

#ifndef SYNLIN_CORPUS_H_
#define SYNLIN_CORPUS_H_

#include <istream>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace synlin {

// One token of a gold sentence. `index` is 1-based; `head` is 0 for the
// token attached to the artificial root.
struct Token {
  int index = 0;
  std::string form;
  std::string pos;
  int head = 0;
  std::string label;
};

struct DepSentence {
  std::vector<Token> tokens;

  int size() const { return static_cast<int>(tokens.size()); }
  const Token &token(int index) const { return tokens[index - 1]; }
  std::vector<std::string> Forms() const;
};

// Malformed input line.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string &what);
  int line() const { return line_; }

 private:
  int line_;
};

// Sentence whose head column does not describe a single projective tree.
class TreeError : public std::runtime_error {
 public:
  enum class Kind { kNoRoot, kMultiRoot, kBadHead, kCycle, kNonProjective };
  TreeError(int sentence, Kind kind);
  int sentence() const { return sentence_; }
  Kind kind() const { return kind_; }

 private:
  int sentence_;
  Kind kind_;
};

const char *TreeErrorKindName(TreeError::Kind kind);

struct Rejection {
  int sentence = 0;  // 0-based block index in the input
  int line = 0;      // first line of the block
  TreeError::Kind kind = TreeError::Kind::kNonProjective;
};

// Reads blank-line separated CoNLL-X blocks (id, form, lemma, cpos, pos,
// feats, head, deprel, ...). Lines starting with '#' are ignored.
//
// Malformed lines always throw ParseError. Sentences failing tree validation
// throw TreeError when `rejected` is null; otherwise they are skipped and
// recorded there.
std::vector<DepSentence> ParseConll(std::istream &in,
                                    std::vector<Rejection> *rejected = nullptr);
// Same blocks without tree validation, for input whose trees are ignored.
std::vector<DepSentence> ParseConllUnchecked(std::istream &in);
std::vector<DepSentence> ParseConllString(
    std::string_view text, std::vector<Rejection> *rejected = nullptr);
std::vector<DepSentence> ReadConllFile(const std::string &path,
                                       std::vector<Rejection> *rejected,
                                       bool validate = true);

// Throws TreeError (sentence index `sentence_index`) unless the heads form a
// single-rooted, acyclic, projective tree.
void ValidateTree(const DepSentence &sentence, int sentence_index);

void WriteConll(std::ostream &out, const DepSentence &sentence);

// Dense string <-> id map. Reserved symbols occupy the lowest ids.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> symbols);

  // Returns the id of `symbol`, adding it if absent.
  int Add(const std::string &symbol);
  // Returns -1 when absent.
  int Find(std::string_view symbol) const;
  const std::string &Symbol(int id) const { return symbols_[id]; }
  int size() const { return static_cast<int>(symbols_.size()); }
  const std::vector<std::string> &symbols() const { return symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> ids_;
};

inline constexpr int kNullId = 0;
inline constexpr int kUnknownWordId = 1;
inline constexpr char kNullSymbol[] = "<NULL>";
inline constexpr char kUnknownSymbol[] = "<UNK>";

// Symbol tables for words, POS tags and arc labels. Word id 0 is NULL^w and
// 1 is UNK; POS id 0 is NULL^t; label id 0 is NULL^l.
struct Indexers {
  Vocabulary words;
  Vocabulary pos;
  Vocabulary labels;
  std::map<std::string, int> counts;
  int min_count = 1;

  // UNK for out-of-vocabulary forms.
  int WordId(std::string_view form) const;
  // -1 when absent.
  int PosId(std::string_view tag) const { return pos.Find(tag); }
  int LabelId(std::string_view label) const { return labels.Find(label); }

  int num_words() const { return words.size(); }
  int num_pos() const { return pos.size(); }
  int num_labels() const { return labels.size(); }
  // Real (non-reserved) symbols.
  int num_real_pos() const { return pos.size() - 1; }
  int num_real_labels() const { return labels.size() - 1; }
};

// Words with frequency below `min_count` are left out of the word table and
// map to UNK. POS "_" is not a tag. Labels are collected from dependents
// only: the root's label never appears on an arc.
Indexers BuildIndexers(const std::vector<DepSentence> &corpus, int min_count);

// Unordered input of the linearizer. Tokens are individuated and kept in a
// canonical order (form bytes, then source position) so the gold order is
// not observable. Tokens of equal form are contiguous.
class WordBag {
 public:
  struct Entry {
    std::string form;
    int count = 0;
    int first = 0;  // position of the first token with this form
  };

  WordBag() = default;
  // `sources[i]` is the gold position of `forms[i]`; 1..n when omitted.
  explicit WordBag(const std::vector<std::string> &forms,
                   std::vector<int> sources = {});

  int size() const { return static_cast<int>(tokens_.size()); }
  bool empty() const { return tokens_.empty(); }
  const std::vector<Entry> &entries() const { return entries_; }
  int num_forms() const { return static_cast<int>(entries_.size()); }
  const std::string &form_of_token(int token) const {
    return entries_[form_index_[token]].form;
  }
  int form_index(int token) const { return form_index_[token]; }
  int source(int token) const { return sources_[token]; }
  // Distinct-form index of `form`, or -1.
  int FindForm(std::string_view form) const;

 private:
  std::vector<std::string> tokens_;
  std::vector<int> sources_;
  std::vector<int> form_index_;
  std::vector<Entry> entries_;
};

WordBag ToBag(const DepSentence &sentence);

}  // namespace synlin

#endif  // SYNLIN_CORPUS_H_
