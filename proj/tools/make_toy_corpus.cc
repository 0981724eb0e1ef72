// Writes the bundled toy corpora under a target directory.
//
//   synthetic.conll      240 projective sentences, lengths 1-15
//   synthetic_dev.conll   40 sentences from the same grammar, lengths <= 10
//   toy_train.conll       50 sentences with role-specific vocabulary
//   toy_dev.conll         20 held-out sentences from the toy grammar
//   lm10.conll            10 long toy sentences for language-model overfitting,
//                         adverb always last
//
// Output depends only on the seeds below.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "synlin/corpus.h"
#include "synlin/random.h"

namespace {

using synlin::DepSentence;
using synlin::Rng;

struct Node {
  std::string form;
  std::string pos;
  std::string label;
  std::vector<std::unique_ptr<Node>> left;   // outermost first
  std::vector<std::unique_ptr<Node>> right;  // innermost first
};

using NodePtr = std::unique_ptr<Node>;

NodePtr Leaf(const std::string &form, const std::string &pos, const std::string &label) {
  auto node = std::make_unique<Node>();
  node->form = form;
  node->pos = pos;
  node->label = label;
  return node;
}

// The most recently flattened subtree root is the last token still marked -1.
size_t RootOfLastSpan(const DepSentence &s) {
  size_t t = s.tokens.size();
  while (s.tokens[--t].head != -1) {
  }
  return t;
}

// Appends the span of `node` to `out`. The subtree root gets `head`; its
// descendants point at their parents.
void Flatten(const Node &node, int head, DepSentence *out) {
  std::vector<size_t> child_roots;
  for (const NodePtr &child : node.left) {
    Flatten(*child, -1, out);
    child_roots.push_back(RootOfLastSpan(*out));
  }
  synlin::Token token;
  token.index = static_cast<int>(out->tokens.size()) + 1;
  token.form = node.form;
  token.pos = node.pos;
  token.head = head;
  token.label = node.label;
  out->tokens.push_back(token);
  for (const NodePtr &child : node.right) {
    Flatten(*child, -1, out);
    child_roots.push_back(RootOfLastSpan(*out));
  }
  for (size_t root : child_roots) out->tokens[root].head = token.index;
}

DepSentence ToSentence(const Node &root) {
  DepSentence s;
  Flatten(root, 0, &s);
  return s;
}

const std::string &Pick(const std::vector<std::string> &words, Rng *rng) {
  return words[rng->Below(words.size())];
}

// Broad grammar: shared adjectives and nouns, optional repeated modifiers.
class SyntheticGrammar {
 public:
  explicit SyntheticGrammar(Rng *rng) : rng_(rng) {}

  NodePtr Noun(const std::string &label, int max_extra) {
    NodePtr noun = Leaf(Pick(nouns_, rng_), "NN", label);
    const int adjectives =
        max_extra > 0 ? static_cast<int>(rng_->Below(std::min(max_extra, 2) + 1)) : 0;
    for (int i = 0; i < adjectives; ++i) {
      noun->left.push_back(Leaf(Pick(adjectives_, rng_), "JJ", "amod"));
    }
    if (rng_->Uniform() < 0.8) {
      noun->left.insert(noun->left.begin(), Leaf(Pick(dets_, rng_), "DT", "det"));
    }
    return noun;
  }

  NodePtr Prep(int max_extra) {
    NodePtr prep = Leaf(Pick(preps_, rng_), "IN", "prep");
    prep->right.push_back(Noun("pobj", max_extra));
    return prep;
  }

  // A sentence of exactly `length` tokens when possible.
  NodePtr Sentence(int length) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
      NodePtr root = Attempt(length);
      if (Size(*root) == length) return root;
    }
    return Attempt(length);
  }

 private:
  static int Size(const Node &node) {
    int n = 1;
    for (const NodePtr &c : node.left) n += Size(*c);
    for (const NodePtr &c : node.right) n += Size(*c);
    return n;
  }

  NodePtr Attempt(int length) {
    if (length == 1) return Leaf(Pick(imperatives_, rng_), "VB", "root");
    if (length == 2) {
      if (rng_->Uniform() < 0.5) {
        NodePtr v = Leaf(Pick(imperatives_, rng_), "VB", "root");
        v->right.push_back(Leaf(Pick(adverbs_, rng_), "RB", "advmod"));
        return v;
      }
      NodePtr v = Leaf(Pick(verbs_, rng_), "VBD", "root");
      v->left.push_back(Leaf(Pick(pronouns_, rng_), "PRP", "nsubj"));
      return v;
    }
    const int extra = std::max(0, (length - 4) / 3);
    NodePtr v = Leaf(Pick(verbs_, rng_), "VBD", "root");
    if (rng_->Uniform() < 0.3) {
      v->left.push_back(Leaf(Pick(pronouns_, rng_), "PRP", "nsubj"));
    } else {
      v->left.push_back(Noun("nsubj", extra));
    }
    v->right.push_back(Noun("dobj", extra));
    if (length >= 6 && rng_->Uniform() < 0.7) v->right.push_back(Prep(extra));
    if (length >= 9 && rng_->Uniform() < 0.5) v->right.front()->right.push_back(Prep(extra));
    if (rng_->Uniform() < 0.4) v->right.push_back(Leaf(Pick(adverbs_, rng_), "RB", "advmod"));
    return v;
  }

  Rng *rng_;
  const std::vector<std::string> nouns_ = {"dog",  "cat",   "man",  "ball",
                                           "park", "house", "book", "tree"};
  const std::vector<std::string> adjectives_ = {"big", "small", "red", "old"};
  const std::vector<std::string> dets_ = {"the", "a"};
  const std::vector<std::string> preps_ = {"in", "near", "on"};
  const std::vector<std::string> verbs_ = {"saw", "took", "liked", "found"};
  const std::vector<std::string> imperatives_ = {"go", "stop", "wait"};
  const std::vector<std::string> adverbs_ = {"quickly", "today", "again"};
  const std::vector<std::string> pronouns_ = {"he", "she", "they"};
};

// Toy grammar: every word belongs to one role, so the order is recoverable
// from the bag except for the adverb, which opens or closes the sentence.
class ToyGrammar {
 public:
  explicit ToyGrammar(Rng *rng) : rng_(rng) {}

  NodePtr Sentence(bool long_form) {
    NodePtr v = Leaf(Pick(verbs_, rng_), "VBD", "root");
    if (!long_form && rng_->Uniform() < 0.25) {
      v->left.push_back(Leaf(Pick(pronouns_, rng_), "PRP", "nsubj"));
    } else {
      NodePtr subj = Leaf(Pick(subjects_, rng_), "NN", "nsubj");
      if (long_form || rng_->Uniform() < 0.5) {
        subj->left.push_back(Leaf(Pick(subject_adjs_, rng_), "JJ", "amod"));
      }
      subj->left.insert(subj->left.begin(), Leaf("the", "DT", "det"));
      v->left.push_back(std::move(subj));
    }
    NodePtr obj = Leaf(Pick(objects_, rng_), "NN", "dobj");
    if (long_form || rng_->Uniform() < 0.5) {
      obj->left.push_back(Leaf(Pick(object_adjs_, rng_), "JJ", "amod"));
    }
    obj->left.insert(obj->left.begin(), Leaf("a", "DT", "det"));
    v->right.push_back(std::move(obj));
    if (long_form || rng_->Uniform() < 0.5) {
      NodePtr prep = Leaf(Pick(preps_, rng_), "IN", "prep");
      NodePtr place = Leaf(Pick(places_, rng_), "NN", "pobj");
      place->left.push_back(Leaf("the", "DT", "det"));
      prep->right.push_back(std::move(place));
      v->right.push_back(std::move(prep));
    }
    if (long_form || rng_->Uniform() < 0.3) {
      NodePtr adverb = Leaf(Pick(adverbs_, rng_), "RB", "advmod");
      if (!long_form && rng_->Uniform() < 0.5) {
        v->left.insert(v->left.begin(), std::move(adverb));
      } else {
        v->right.push_back(std::move(adverb));
      }
    }
    return v;
  }

 private:
  Rng *rng_;
  const std::vector<std::string> subjects_ = {"dog", "cat", "man", "woman", "boy"};
  const std::vector<std::string> subject_adjs_ = {"old", "young", "tall"};
  const std::vector<std::string> objects_ = {"ball", "bone", "book", "cake"};
  const std::vector<std::string> object_adjs_ = {"red", "round", "new"};
  const std::vector<std::string> verbs_ = {"saw", "took", "liked", "found", "ate"};
  const std::vector<std::string> preps_ = {"in", "near"};
  const std::vector<std::string> places_ = {"park", "house", "garden"};
  const std::vector<std::string> adverbs_ = {"today", "quickly"};
  const std::vector<std::string> pronouns_ = {"he", "she"};
};

void WriteFile(const std::filesystem::path &path, const std::vector<DepSentence> &sentences) {
  std::ofstream out(path);
  for (const DepSentence &s : sentences) synlin::WriteConll(out, s);
  std::cout << path.string() << ": " << sentences.size() << " sentences\n";
}

}  // namespace

int main(int argc, char **argv) {
  if (argc != 2) {
    std::cerr << "usage: make_toy_corpus <output-dir>\n";
    return 2;
  }
  const std::filesystem::path dir = argv[1];
  std::filesystem::create_directories(dir);

  {
    Rng rng(20161101);
    SyntheticGrammar grammar(&rng);
    std::vector<DepSentence> train;
    for (int i = 0; i < 240; ++i) train.push_back(ToSentence(*grammar.Sentence(1 + i % 15)));
    WriteFile(dir / "synthetic.conll", train);
    std::vector<DepSentence> dev;
    for (int i = 0; i < 40; ++i) dev.push_back(ToSentence(*grammar.Sentence(1 + i % 10)));
    WriteFile(dir / "synthetic_dev.conll", dev);
  }
  {
    Rng rng(7);
    ToyGrammar grammar(&rng);
    std::vector<DepSentence> train, dev;
    for (int i = 0; i < 50; ++i) train.push_back(ToSentence(*grammar.Sentence(false)));
    for (int i = 0; i < 20; ++i) dev.push_back(ToSentence(*grammar.Sentence(false)));
    WriteFile(dir / "toy_train.conll", train);
    WriteFile(dir / "toy_dev.conll", dev);
  }
  {
    Rng rng(10);
    ToyGrammar grammar(&rng);
    std::vector<DepSentence> lm;
    for (int i = 0; i < 10; ++i) lm.push_back(ToSentence(*grammar.Sentence(true)));
    WriteFile(dir / "lm10.conll", lm);
  }
  return 0;
}
