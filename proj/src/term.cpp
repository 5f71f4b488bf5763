#include "clo/term.hpp"

#include <algorithm>
#include <cctype>

namespace clo {

WordSet word_class(const Word& w, int n) {
  WordSet out;
  out.insert(Word{});
  for (const auto& letter : w) {
    // extend every subword seen so far by this occurrence
    std::vector<Word> grown;
    for (const auto& u : out) {
      if (static_cast<int>(u.size()) < n) {
        Word v = u;
        v.push_back(letter);
        grown.push_back(std::move(v));
      }
    }
    out.insert(grown.begin(), grown.end());
  }
  return out;
}

WordSet class_concat(const WordSet& a, const WordSet& b, int n) {
  WordSet out;
  for (const auto& u : a)
    for (const auto& v : b) {
      if (static_cast<int>(u.size() + v.size()) > n) continue;
      Word w = u;
      w.insert(w.end(), v.begin(), v.end());
      out.insert(std::move(w));
    }
  return out;
}

WordSet class_nfold(const WordSet& a, int k, int n) {
  WordSet out;
  out.insert(Word{});
  for (int i = 0; i < k; ++i) out = class_concat(out, a, n);
  return out;
}

namespace {

TermPtr make(Term t) { return std::make_shared<const Term>(std::move(t)); }

}  // namespace

TermPtr make_empty() {
  static const TermPtr e = make({Term::Kind::Empty, "", {}, {}, {}, {}});
  return e;
}

TermPtr make_letter(std::string a) {
  Term t{Term::Kind::Letter, std::move(a), {}, {}, {}, {}};
  return make(std::move(t));
}

TermPtr make_concat(TermPtr l, TermPtr r) {
  Term t{Term::Kind::Concat, "", std::move(l), std::move(r), {}, {}};
  return make(std::move(t));
}

TermPtr make_omega(TermPtr body) {
  Term t{Term::Kind::OmegaPow, "", {}, {}, std::move(body), {}};
  return make(std::move(t));
}

TermPtr make_omegastar(TermPtr body) {
  Term t{Term::Kind::OmegaStarPow, "", {}, {}, std::move(body), {}};
  return make(std::move(t));
}

TermPtr make_shuffle(std::vector<TermPtr> children) {
  if (children.empty()) throw Error("shuffle needs at least one child term");
  std::sort(children.begin(), children.end(),
            [](const TermPtr& a, const TermPtr& b) {
              return term_compare(*a, *b) < 0;
            });
  children.erase(std::unique(children.begin(), children.end(),
                             [](const TermPtr& a, const TermPtr& b) {
                               return term_compare(*a, *b) == 0;
                             }),
                 children.end());
  Term t{Term::Kind::Shuffle, "", {}, {}, {}, std::move(children)};
  return make(std::move(t));
}

TermPtr term_from_word(const Word& w) {
  if (w.empty()) return make_empty();
  TermPtr acc = make_letter(w[0]);
  for (std::size_t i = 1; i < w.size(); ++i)
    acc = make_concat(acc, make_letter(w[i]));
  return acc;
}

std::strong_ordering term_compare(const Term& a, const Term& b) {
  if (a.kind != b.kind) return a.kind <=> b.kind;
  switch (a.kind) {
    case Term::Kind::Empty:
      return std::strong_ordering::equal;
    case Term::Kind::Letter:
      return a.letter.compare(b.letter) <=> 0;
    case Term::Kind::Concat: {
      auto c = term_compare(*a.left, *b.left);
      return c != 0 ? c : term_compare(*a.right, *b.right);
    }
    case Term::Kind::OmegaPow:
    case Term::Kind::OmegaStarPow:
      return term_compare(*a.body, *b.body);
    case Term::Kind::Shuffle: {
      if (a.children.size() != b.children.size())
        return a.children.size() <=> b.children.size();
      for (std::size_t i = 0; i < a.children.size(); ++i) {
        auto c = term_compare(*a.children[i], *b.children[i]);
        if (c != 0) return c;
      }
      return std::strong_ordering::equal;
    }
  }
  return std::strong_ordering::equal;
}

bool term_equal(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  return term_compare(*a, *b) == 0;
}

// --- parsing -----------------------------------------------------------

namespace {

struct Lexer {
  enum class Tok { End, Eps, Letter, LParen, RParen, Dot, Comma, RBrace,
                   ShuffleOpen, PowOmega, PowOmegaStar };

  explicit Lexer(const std::string& text) : text_(text) { advance(); }

  Tok tok = Tok::End;
  std::string value;
  std::size_t tok_pos = 0;

  void advance() {
    if (!pending_.empty()) {
      value = pending_.front();
      pending_.erase(pending_.begin());
      tok = Tok::Letter;
      return;
    }
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    tok_pos = pos_;
    if (pos_ >= text_.size()) {
      tok = Tok::End;
      return;
    }
    char c = text_[pos_];
    switch (c) {
      case '(': ++pos_; tok = Tok::LParen; return;
      case ')': ++pos_; tok = Tok::RParen; return;
      case '.': ++pos_; tok = Tok::Dot; return;
      case ',': ++pos_; tok = Tok::Comma; return;
      case '}': ++pos_; tok = Tok::RBrace; return;
      case '^': {
        ++pos_;
        if (pos_ >= text_.size() || text_[pos_] != 'w')
          throw ParseError("expected 'w' or 'w*' after '^'", pos_);
        ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '*') {
          ++pos_;
          tok = Tok::PowOmegaStar;
        } else {
          tok = Tok::PowOmega;
        }
        return;
      }
      case '"': {
        ++pos_;
        std::string s;
        while (pos_ < text_.size() && text_[pos_] != '"') {
          if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
          s += text_[pos_++];
        }
        if (pos_ >= text_.size())
          throw ParseError("unterminated quoted letter", tok_pos);
        ++pos_;
        if (s.empty()) throw ParseError("empty quoted letter", tok_pos);
        tok = Tok::Letter;
        value = std::move(s);
        return;
      }
      default: break;
    }
    if (std::isalnum(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             std::isalnum(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
      std::string run = text_.substr(start, pos_ - start);
      if (run == "eps") {
        tok = Tok::Eps;
        return;
      }
      if (run == "sh" && pos_ < text_.size() && text_[pos_] == '{') {
        ++pos_;
        tok = Tok::ShuffleOpen;
        return;
      }
      // a run of alphanumerics is a juxtaposition of single letters
      tok = Tok::Letter;
      value = run.substr(0, 1);
      for (std::size_t i = 1; i < run.size(); ++i)
        pending_.push_back(run.substr(i, 1));
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

 private:
  const std::string& text_;
  std::size_t pos_ = 0;
  std::vector<std::string> pending_;
};

struct TermParser {
  Lexer lex;

  explicit TermParser(const std::string& text) : lex(text) {}

  TermPtr parse() {
    TermPtr t = concat();
    if (lex.tok != Lexer::Tok::End)
      throw ParseError("trailing input after term", lex.tok_pos);
    return t;
  }

  bool starts_atom() const {
    using T = Lexer::Tok;
    return lex.tok == T::Eps || lex.tok == T::Letter ||
           lex.tok == T::LParen || lex.tok == T::ShuffleOpen;
  }

  TermPtr concat() {
    TermPtr acc = power();
    for (;;) {
      if (lex.tok == Lexer::Tok::Dot) {
        lex.advance();
        acc = make_concat(acc, power());
      } else if (starts_atom()) {
        acc = make_concat(acc, power());
      } else {
        return acc;
      }
    }
  }

  TermPtr power() {
    TermPtr t = atom();
    for (;;) {
      if (lex.tok == Lexer::Tok::PowOmega) {
        lex.advance();
        t = make_omega(t);
      } else if (lex.tok == Lexer::Tok::PowOmegaStar) {
        lex.advance();
        t = make_omegastar(t);
      } else {
        return t;
      }
    }
  }

  TermPtr atom() {
    using T = Lexer::Tok;
    switch (lex.tok) {
      case T::Eps:
        lex.advance();
        return make_empty();
      case T::Letter: {
        TermPtr t = make_letter(lex.value);
        lex.advance();
        return t;
      }
      case T::LParen: {
        lex.advance();
        TermPtr t = concat();
        if (lex.tok != T::RParen)
          throw ParseError("expected ')'", lex.tok_pos);
        lex.advance();
        return t;
      }
      case T::ShuffleOpen: {
        lex.advance();
        std::vector<TermPtr> children;
        children.push_back(concat());
        while (lex.tok == T::Comma) {
          lex.advance();
          children.push_back(concat());
        }
        if (lex.tok != T::RBrace)
          throw ParseError("expected '}' closing shuffle", lex.tok_pos);
        lex.advance();
        return make_shuffle(std::move(children));
      }
      default:
        throw ParseError("expected a term", lex.tok_pos);
    }
  }
};

bool plain_letter(const std::string& s) {
  return s.size() == 1 && std::isalnum(static_cast<unsigned char>(s[0]));
}

std::string quote_letter(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

enum class Ctx { Top, PowerBody, ConcatRight };

std::string fmt(const TermPtr& t, Ctx ctx) {
  switch (t->kind) {
    case Term::Kind::Empty:
      return "eps";
    case Term::Kind::Letter:
      return plain_letter(t->letter) ? t->letter : quote_letter(t->letter);
    case Term::Kind::OmegaPow:
      return fmt(t->body, Ctx::PowerBody) + "^w";
    case Term::Kind::OmegaStarPow:
      return fmt(t->body, Ctx::PowerBody) + "^w*";
    case Term::Kind::Shuffle: {
      std::string out = "sh{";
      for (std::size_t i = 0; i < t->children.size(); ++i) {
        if (i) out += ", ";
        out += fmt(t->children[i], Ctx::Top);
      }
      return out + "}";
    }
    case Term::Kind::Concat: {
      std::string s =
          fmt(t->left, Ctx::Top) + " " + fmt(t->right, Ctx::ConcatRight);
      // parenthesize when concatenation appears where it would rebind
      if (ctx != Ctx::Top) return "(" + s + ")";
      return s;
    }
  }
  return "";
}

}  // namespace

TermPtr parse_term(const std::string& text) { return TermParser(text).parse(); }

std::string format_term(const TermPtr& t) {
  // a right child that is itself a concat needs parens to keep the shape
  if (t->kind == Term::Kind::Concat)
    return fmt(t->left, Ctx::Top) + " " + fmt(t->right, Ctx::ConcatRight);
  return fmt(t, Ctx::Top);
}

std::vector<std::string> term_alphabet(const TermPtr& t) {
  std::set<std::string> acc;
  std::function<void(const TermPtr&)> walk = [&](const TermPtr& u) {
    switch (u->kind) {
      case Term::Kind::Empty: return;
      case Term::Kind::Letter: acc.insert(u->letter); return;
      case Term::Kind::Concat: walk(u->left); walk(u->right); return;
      case Term::Kind::OmegaPow:
      case Term::Kind::OmegaStarPow: walk(u->body); return;
      case Term::Kind::Shuffle:
        for (const auto& c : u->children) walk(c);
        return;
    }
  };
  walk(t);
  return {acc.begin(), acc.end()};
}

int Morphism::of(const std::string& letter) const {
  auto it = letters.find(letter);
  if (it == letters.end())
    throw Error("letter '" + letter + "' is not mapped by the morphism");
  return it->second;
}

int Morphism::eval_word(const Word& w) const {
  int acc = target.unit();
  for (const auto& c : w) acc = target.mul(acc, of(c));
  return acc;
}

bool Recognizer::accepts_element(int x) const {
  return std::binary_search(accepting.begin(), accepting.end(), x);
}

int eval_term(const TermPtr& t, const Morphism& h) {
  const Algebra& a = h.target;
  switch (t->kind) {
    case Term::Kind::Empty:
      return a.unit();
    case Term::Kind::Letter:
      return h.of(t->letter);
    case Term::Kind::Concat:
      return a.mul(eval_term(t->left, h), eval_term(t->right, h));
    case Term::Kind::OmegaPow:
      return a.omega(eval_term(t->body, h));
    case Term::Kind::OmegaStarPow:
      return a.omegastar(eval_term(t->body, h));
    case Term::Kind::Shuffle: {
      Subset values;
      for (const auto& c : t->children) values.push_back(eval_term(c, h));
      return a.shuffle(sorted_unique(std::move(values)));
    }
  }
  throw Error("unreachable term kind");
}

WordSet subword_class(const TermPtr& t, int n) {
  switch (t->kind) {
    case Term::Kind::Empty:
      return {Word{}};
    case Term::Kind::Letter:
      return word_class({t->letter}, n);
    case Term::Kind::Concat:
      return class_concat(subword_class(t->left, n), subword_class(t->right, n),
                          n);
    case Term::Kind::OmegaPow:
    case Term::Kind::OmegaStarPow:
      // length-n subwords touch at most n copies of the body
      return class_nfold(subword_class(t->body, n), n, n);
    case Term::Kind::Shuffle: {
      WordSet acc = {Word{}};
      for (const auto& c : t->children)
        acc = class_concat(acc, subword_class(c, n), n);
      return class_nfold(acc, n, n);
    }
  }
  throw Error("unreachable term kind");
}

Word finite_witness(const TermPtr& t, int n) {
  switch (t->kind) {
    case Term::Kind::Empty:
      return {};
    case Term::Kind::Letter:
      return {t->letter};
    case Term::Kind::Concat: {
      Word w = finite_witness(t->left, n);
      Word r = finite_witness(t->right, n);
      w.insert(w.end(), r.begin(), r.end());
      return w;
    }
    case Term::Kind::OmegaPow:
    case Term::Kind::OmegaStarPow: {
      Word body = finite_witness(t->body, n);
      Word w;
      for (int i = 0; i < n; ++i) w.insert(w.end(), body.begin(), body.end());
      return w;
    }
    case Term::Kind::Shuffle: {
      Word round;
      for (const auto& c : t->children) {
        Word u = finite_witness(c, n);
        round.insert(round.end(), u.begin(), u.end());
      }
      Word w;
      for (int i = 0; i < n; ++i) w.insert(w.end(), round.begin(), round.end());
      return w;
    }
  }
  throw Error("unreachable term kind");
}

Rank Rank::bumped() const {
  if (kind == Kind::Finite) return finite(value + 1);
  return *this;
}

bool Rank::operator<(const Rank& o) const {
  if (kind != o.kind) return static_cast<int>(kind) < static_cast<int>(o.kind);
  return kind == Kind::Finite && value < o.value;
}

std::string Rank::str() const {
  switch (kind) {
    case Kind::Bottom: return "bottom";
    case Kind::Infinite: return "infinite";
    case Kind::Finite: return "finite:" + std::to_string(value);
  }
  return "?";
}

namespace {

Rank rank_impl(const TermPtr& t, const std::set<std::string>& a,
               bool directed, Direction dir) {
  switch (t->kind) {
    case Term::Kind::Empty:
      return Rank::bottom();
    case Term::Kind::Letter:
      return a.count(t->letter) ? Rank::finite(0) : Rank::bottom();
    case Term::Kind::Concat: {
      Rank l = rank_impl(t->left, a, directed, dir);
      Rank r = rank_impl(t->right, a, directed, dir);
      return l < r ? r : l;
    }
    case Term::Kind::OmegaPow: {
      Rank b = rank_impl(t->body, a, directed, dir);
      return (!directed || dir == Direction::Omega) ? b.bumped() : b;
    }
    case Term::Kind::OmegaStarPow: {
      Rank b = rank_impl(t->body, a, directed, dir);
      return (!directed || dir == Direction::OmegaStar) ? b.bumped() : b;
    }
    case Term::Kind::Shuffle: {
      for (const auto& c : t->children)
        if (!(rank_impl(c, a, directed, dir) == Rank::bottom()))
          return Rank::infinite();
      return Rank::bottom();
    }
  }
  throw Error("unreachable term kind");
}

}  // namespace

Rank rank_of(const TermPtr& t, const std::set<std::string>& a) {
  return rank_impl(t, a, false, Direction::Omega);
}

Rank directed_rank(const TermPtr& t, const std::set<std::string>& a,
                   Direction dir) {
  return rank_impl(t, a, true, dir);
}

Rank directed_rank(const TermPtr& t, const std::string& letter,
                   Direction dir) {
  return directed_rank(t, std::set<std::string>{letter}, dir);
}

TermPtr normalize_powers(const TermPtr& t, const Morphism& h) {
  switch (t->kind) {
    case Term::Kind::Empty:
    case Term::Kind::Letter:
      return t;
    case Term::Kind::Concat: {
      TermPtr l = normalize_powers(t->left, h);
      TermPtr r = normalize_powers(t->right, h);
      if (l == t->left && r == t->right) return t;
      return make_concat(l, r);
    }
    case Term::Kind::OmegaPow:
    case Term::Kind::OmegaStarPow: {
      TermPtr body = normalize_powers(t->body, h);
      int k = h.target.idem_exponent(eval_term(body, h));
      TermPtr rep = body;
      for (int i = 1; i < k; ++i) rep = make_concat(rep, body);
      if (rep == t->body) return t;
      return t->kind == Term::Kind::OmegaPow ? make_omega(rep)
                                             : make_omegastar(rep);
    }
    case Term::Kind::Shuffle: {
      std::vector<TermPtr> children;
      for (const auto& c : t->children)
        children.push_back(normalize_powers(c, h));
      return make_shuffle(std::move(children));
    }
  }
  throw Error("unreachable term kind");
}

std::string triple_letter(const std::string& left, const std::string& letter,
                          const std::string& right) {
  return "(" + left + "," + letter + "," + right + ")";
}

namespace {

TermPtr transduce_impl(const TermPtr& t, const Morphism& h, int l, int r) {
  const Algebra& m = h.target;
  switch (t->kind) {
    case Term::Kind::Empty:
      return t;
    case Term::Kind::Letter:
      return make_letter(
          triple_letter(m.name_of(l), t->letter, m.name_of(r)));
    case Term::Kind::Concat: {
      int el = eval_term(t->left, h);
      int er = eval_term(t->right, h);
      return make_concat(transduce_impl(t->left, h, l, m.mul(er, r)),
                         transduce_impl(t->right, h, m.mul(l, el), r));
    }
    case Term::Kind::OmegaPow: {
      int e = eval_term(t->body, h);
      if (m.mul(e, e) != e)
        throw NotNormalizedError(
            "omega power body does not evaluate to an idempotent; "
            "call normalize_powers first");
      int tail = m.mul(m.omega(e), r);
      return make_concat(
          transduce_impl(t->body, h, l, tail),
          make_omega(transduce_impl(t->body, h, m.mul(l, e), tail)));
    }
    case Term::Kind::OmegaStarPow: {
      int e = eval_term(t->body, h);
      if (m.mul(e, e) != e)
        throw NotNormalizedError(
            "omega* power body does not evaluate to an idempotent; "
            "call normalize_powers first");
      int head = m.mul(l, m.omegastar(e));
      return make_concat(
          make_omegastar(transduce_impl(t->body, h, head, m.mul(e, r))),
          transduce_impl(t->body, h, head, r));
    }
    case Term::Kind::Shuffle: {
      Subset values;
      for (const auto& c : t->children) values.push_back(eval_term(c, h));
      int eta = m.shuffle(sorted_unique(std::move(values)));
      std::vector<TermPtr> children;
      for (const auto& c : t->children)
        children.push_back(transduce_impl(c, h, m.mul(l, eta), m.mul(eta, r)));
      return make_shuffle(std::move(children));
    }
  }
  throw Error("unreachable term kind");
}

}  // namespace

TermPtr transduce(const TermPtr& t, const Morphism& h) {
  return transduce_impl(t, h, h.target.unit(), h.target.unit());
}

TermPtr transduce(const TermPtr& t, const Morphism& h, int left, int right) {
  return transduce_impl(t, h, left, right);
}

bool member(const TermPtr& t, const Recognizer& r) {
  return r.accepts_element(eval_term(t, r.h));
}

}  // namespace clo
