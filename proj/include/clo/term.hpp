#pragma once

#include <compare>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "clo/algebra.hpp"

namespace clo {

/// A finite word over string letters. The empty vector is the empty word.
using Word = std::vector<std::string>;
/// A subword-closed set of finite words, e.g. all subwords up to a length
/// bound of some countable word.
using WordSet = std::set<Word>;

/// All distinct subwords (scattered subsequences) of w of length <= n.
WordSet word_class(const Word& w, int n);
WordSet class_concat(const WordSet& a, const WordSet& b, int n);
/// k-fold self-concatenation of a class under the length bound n.
WordSet class_nfold(const WordSet& a, int k, int n);

struct Term;
using TermPtr = std::shared_ptr<const Term>;

/// Finite syntax for countable words: letters, the empty word,
/// concatenation, omega/omega* powers and perfect shuffles of a finite
/// set of terms. Shuffle children are kept sorted and duplicate-free.
struct Term {
  enum class Kind { Empty, Letter, Concat, OmegaPow, OmegaStarPow, Shuffle };
  Kind kind;
  std::string letter;              // Letter
  TermPtr left, right;             // Concat
  TermPtr body;                    // OmegaPow / OmegaStarPow
  std::vector<TermPtr> children;   // Shuffle
};

TermPtr make_empty();
TermPtr make_letter(std::string a);
TermPtr make_concat(TermPtr l, TermPtr r);
TermPtr make_omega(TermPtr body);
TermPtr make_omegastar(TermPtr body);
TermPtr make_shuffle(std::vector<TermPtr> children);
/// Left-associated concatenation of the word's letters.
TermPtr term_from_word(const Word& w);

std::strong_ordering term_compare(const Term& a, const Term& b);
bool term_equal(const TermPtr& a, const TermPtr& b);

TermPtr parse_term(const std::string& text);
std::string format_term(const TermPtr& t);
/// Letters occurring in the term, sorted.
std::vector<std::string> term_alphabet(const TermPtr& t);

/// A morphism out of the free algebra over `alphabet`, given by letter
/// images in the target.
struct Morphism {
  Algebra target;
  std::map<std::string, int> letters;

  int of(const std::string& letter) const;
  int eval_word(const Word& w) const;
};

struct Recognizer {
  Morphism h;
  std::vector<int> accepting;  // sorted element indices

  bool accepts_element(int x) const;
};

/// Structural evaluation of a term under a morphism. Shuffle nodes take the
/// set of child values; a missing shuffle entry raises
/// ShuffleIncompleteError.
int eval_term(const TermPtr& t, const Morphism& h);

/// Subwords of length <= n of the countable word the term denotes.
WordSet subword_class(const TermPtr& t, int n);

/// A finite subword of the denoted word with the same subwords up to
/// length n.
Word finite_witness(const TermPtr& t, int n);

/// Rank values are ordered bottom < finite(0) < finite(1) < ... < infinite.
struct Rank {
  enum class Kind { Bottom, Finite, Infinite };
  Kind kind = Kind::Bottom;
  int value = 0;

  static Rank bottom() { return {}; }
  static Rank finite(int n) { return {Kind::Finite, n}; }
  static Rank infinite() { return {Kind::Infinite, 0}; }
  Rank bumped() const;  // bottom and infinite fixed, finite(n) -> finite(n+1)

  friend bool operator==(const Rank&, const Rank&) = default;
  bool operator<(const Rank& o) const;
  bool operator>=(const Rank& o) const { return !(*this < o); }
  std::string str() const;
};

/// Nesting rank of the positions carrying letters from A: each omega or
/// omega* power above an occurrence adds one level, shuffles are dense and
/// give infinite rank.
Rank rank_of(const TermPtr& t, const std::set<std::string>& a);

enum class Direction { Omega, OmegaStar };

/// One-sided rank: only powers in the given direction add a level; powers
/// in the opposite direction leave the rank unchanged (see
/// docs/directed-rank.md for the derivation).
Rank directed_rank(const TermPtr& t, const std::set<std::string>& a,
                   Direction dir);
Rank directed_rank(const TermPtr& t, const std::string& letter,
                   Direction dir);

/// Rewrites every power body into a k-fold repetition so that it evaluates
/// to an idempotent under h. The denoted word is unchanged.
TermPtr normalize_powers(const TermPtr& t, const Morphism& h);

/// Pointwise relabeling of the denoted word: each position gets the triple
/// (value of its prefix, its letter, value of its suffix) under h. Power
/// bodies must already be idempotent under h (NotNormalizedError otherwise).
/// The outer context defaults to (unit, unit).
TermPtr transduce(const TermPtr& t, const Morphism& h);
TermPtr transduce(const TermPtr& t, const Morphism& h, int left, int right);
std::string triple_letter(const std::string& left, const std::string& letter,
                          const std::string& right);

bool member(const TermPtr& t, const Recognizer& r);

}  // namespace clo
