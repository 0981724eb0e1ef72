#include "synlin/corpus.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

#include "synlin/errors.h"

namespace synlin {
namespace {

std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> columns;
  size_t start = 0;
  while (true) {
    size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      columns.push_back(line.substr(start));
      break;
    }
    columns.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return columns;
}

bool ParseInt(std::string_view text, int *value) {
  if (text.empty()) return false;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), *value);
  return ec == std::errc() && end == text.data() + text.size();
}

std::string_view StripCarriageReturn(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

bool IsBlank(std::string_view line) {
  return line.find_first_not_of(" \t") == std::string_view::npos;
}

// True when `ancestor` dominates `node` (reflexively).
bool Dominates(const DepSentence &sentence, int ancestor, int node) {
  int steps = 0;
  while (node != 0 && steps <= sentence.size()) {
    if (node == ancestor) return true;
    node = sentence.token(node).head;
    ++steps;
  }
  return ancestor == 0;
}

}  // namespace

std::vector<std::string> DepSentence::Forms() const {
  std::vector<std::string> forms;
  forms.reserve(tokens.size());
  for (const Token &token : tokens) forms.push_back(token.form);
  return forms;
}

ParseError::ParseError(int line, const std::string &what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what),
      line_(line) {}

const char *TreeErrorKindName(TreeError::Kind kind) {
  switch (kind) {
    case TreeError::Kind::kNoRoot: return "no-root";
    case TreeError::Kind::kMultiRoot: return "multi-root";
    case TreeError::Kind::kBadHead: return "bad-head";
    case TreeError::Kind::kCycle: return "cycle";
    case TreeError::Kind::kNonProjective: return "non-projective";
  }
  return "unknown";
}

TreeError::TreeError(int sentence, Kind kind)
    : std::runtime_error("sentence " + std::to_string(sentence) + ": " +
                         TreeErrorKindName(kind) + " tree rejected"),
      sentence_(sentence),
      kind_(kind) {}

void ValidateTree(const DepSentence &sentence, int sentence_index) {
  using Kind = TreeError::Kind;
  const int n = sentence.size();
  int roots = 0;
  for (const Token &token : sentence.tokens) {
    if (token.head < 0 || token.head > n || token.head == token.index) {
      throw TreeError(sentence_index, Kind::kBadHead);
    }
    if (token.head == 0) ++roots;
  }
  if (roots == 0) throw TreeError(sentence_index, Kind::kNoRoot);
  if (roots > 1) throw TreeError(sentence_index, Kind::kMultiRoot);

  // With a single root, every token reaches it within n steps unless it sits
  // on a cycle.
  for (const Token &token : sentence.tokens) {
    int node = token.index;
    int steps = 0;
    while (node != 0) {
      if (++steps > n) throw TreeError(sentence_index, Kind::kCycle);
      node = sentence.token(node).head;
    }
  }

  for (const Token &token : sentence.tokens) {
    if (token.head == 0) continue;
    const int lo = std::min(token.index, token.head);
    const int hi = std::max(token.index, token.head);
    for (int k = lo + 1; k < hi; ++k) {
      if (!Dominates(sentence, token.head, k)) {
        throw TreeError(sentence_index, Kind::kNonProjective);
      }
    }
  }
}

namespace {

std::vector<DepSentence> ReadBlocks(std::istream &in, bool validate,
                                    std::vector<Rejection> *rejected) {
  std::vector<DepSentence> sentences;
  DepSentence current;
  int block = 0;
  int block_line = 0;
  int line_number = 0;

  auto flush = [&]() {
    if (current.tokens.empty()) return;
    try {
      if (validate) ValidateTree(current, block);
      sentences.push_back(std::move(current));
    } catch (const TreeError &e) {
      if (rejected == nullptr) throw;
      rejected->push_back({block, block_line, e.kind()});
    }
    current = DepSentence();
    ++block;
  };

  std::string raw;
  while (std::getline(in, raw)) {
    ++line_number;
    std::string_view line = StripCarriageReturn(raw);
    if (IsBlank(line)) {
      flush();
      continue;
    }
    if (line.front() == '#') continue;

    std::vector<std::string_view> columns = SplitTabs(line);
    if (columns.size() < 8) {
      throw ParseError(line_number, "expected at least 8 tab-separated columns, got " +
                                        std::to_string(columns.size()));
    }
    Token token;
    if (!ParseInt(columns[0], &token.index)) {
      throw ParseError(line_number, "bad token id '" + std::string(columns[0]) + "'");
    }
    if (token.index != current.size() + 1) {
      throw ParseError(line_number, "token ids must be consecutive from 1");
    }
    if (!ParseInt(columns[6], &token.head)) {
      throw ParseError(line_number, "bad head '" + std::string(columns[6]) + "'");
    }
    if (columns[1].empty()) throw ParseError(line_number, "empty form");
    token.form = columns[1];
    token.pos = columns[4];
    token.label = columns[7];
    if (current.tokens.empty()) block_line = line_number;
    current.tokens.push_back(std::move(token));
  }
  flush();
  return sentences;
}

}  // namespace

std::vector<DepSentence> ParseConll(std::istream &in, std::vector<Rejection> *rejected) {
  return ReadBlocks(in, true, rejected);
}

std::vector<DepSentence> ParseConllUnchecked(std::istream &in) {
  return ReadBlocks(in, false, nullptr);
}

std::vector<DepSentence> ParseConllString(std::string_view text,
                                          std::vector<Rejection> *rejected) {
  std::istringstream in{std::string(text)};
  return ParseConll(in, rejected);
}

std::vector<DepSentence> ReadConllFile(const std::string &path,
                                       std::vector<Rejection> *rejected, bool validate) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return validate ? ParseConll(in, rejected) : ParseConllUnchecked(in);
  } catch (const ParseError &e) {
    throw ParseError(e.line(), path + ": " + e.what());
  }
}

void WriteConll(std::ostream &out, const DepSentence &sentence) {
  for (const Token &token : sentence.tokens) {
    out << token.index << '\t' << token.form << "\t_\t" << token.pos << '\t'
        << token.pos << "\t_\t" << token.head << '\t' << token.label << '\n';
  }
  out << '\n';
}

Vocabulary::Vocabulary(std::vector<std::string> symbols) {
  for (std::string &symbol : symbols) Add(symbol);
}

int Vocabulary::Add(const std::string &symbol) {
  auto [it, inserted] = ids_.emplace(symbol, size());
  if (inserted) symbols_.push_back(symbol);
  return it->second;
}

int Vocabulary::Find(std::string_view symbol) const {
  auto it = ids_.find(std::string(symbol));
  return it == ids_.end() ? -1 : it->second;
}

int Indexers::WordId(std::string_view form) const {
  int id = words.Find(form);
  return id < 0 ? kUnknownWordId : id;
}

Indexers BuildIndexers(const std::vector<DepSentence> &corpus, int min_count) {
  if (min_count < 1) throw std::invalid_argument("min_count must be >= 1");
  Indexers indexers;
  indexers.min_count = min_count;
  indexers.words.Add(kNullSymbol);
  indexers.words.Add(kUnknownSymbol);
  indexers.pos.Add(kNullSymbol);
  indexers.labels.Add(kNullSymbol);

  std::map<std::string, int> pos_seen;
  std::map<std::string, int> labels_seen;
  for (const DepSentence &sentence : corpus) {
    for (const Token &token : sentence.tokens) {
      ++indexers.counts[token.form];
      if (token.pos != "_" && !token.pos.empty()) pos_seen[token.pos] = 1;
      if (token.head != 0 && token.label != "_" && !token.label.empty()) {
        labels_seen[token.label] = 1;
      }
    }
  }
  // std::map iteration gives a sorted, reproducible id assignment.
  for (const auto &[form, count] : indexers.counts) {
    if (count >= min_count) indexers.words.Add(form);
  }
  for (const auto &entry : pos_seen) indexers.pos.Add(entry.first);
  for (const auto &entry : labels_seen) indexers.labels.Add(entry.first);
  return indexers;
}

WordBag::WordBag(const std::vector<std::string> &forms, std::vector<int> sources) {
  const int n = static_cast<int>(forms.size());
  if (sources.empty()) {
    sources.resize(n);
    std::iota(sources.begin(), sources.end(), 1);
  }
  if (static_cast<int>(sources.size()) != n) {
    throw std::invalid_argument("WordBag: forms/sources size mismatch");
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (forms[a] != forms[b]) return forms[a] < forms[b];
    return sources[a] < sources[b];
  });
  for (int i : order) {
    tokens_.push_back(forms[i]);
    sources_.push_back(sources[i]);
    if (entries_.empty() || entries_.back().form != forms[i]) {
      entries_.push_back({forms[i], 0, static_cast<int>(tokens_.size()) - 1});
    }
    ++entries_.back().count;
    form_index_.push_back(static_cast<int>(entries_.size()) - 1);
  }
}

int WordBag::FindForm(std::string_view form) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), form,
      [](const Entry &entry, std::string_view f) { return entry.form < f; });
  if (it == entries_.end() || it->form != form) return -1;
  return static_cast<int>(it - entries_.begin());
}

WordBag ToBag(const DepSentence &sentence) {
  std::vector<int> sources;
  for (const Token &token : sentence.tokens) sources.push_back(token.index);
  return WordBag(sentence.Forms(), std::move(sources));
}

}  // namespace synlin
