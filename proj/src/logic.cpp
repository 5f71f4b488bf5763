#include "clo/logic.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

namespace clo {

namespace {

FormulaPtr mk(Formula f) { return std::make_shared<const Formula>(std::move(f)); }

}  // namespace

FormulaPtr f_letter(std::string letter, std::string var) {
  return mk({Formula::Kind::LetterAtom, std::move(letter), std::move(var), "",
             0, {}, {}});
}
FormulaPtr f_less(std::string x, std::string y) {
  return mk({Formula::Kind::Less, "", std::move(x), std::move(y), 0, {}, {}});
}
FormulaPtr f_not(FormulaPtr a) {
  return mk({Formula::Kind::Not, "", "", "", 0, std::move(a), {}});
}
FormulaPtr f_and(FormulaPtr a, FormulaPtr b) {
  return mk({Formula::Kind::And, "", "", "", 0, std::move(a), std::move(b)});
}
FormulaPtr f_or(FormulaPtr a, FormulaPtr b) {
  return mk({Formula::Kind::Or, "", "", "", 0, std::move(a), std::move(b)});
}
FormulaPtr f_exists(std::string var, FormulaPtr body) {
  return mk({Formula::Kind::Exists, "", std::move(var), "", 0,
             std::move(body), {}});
}
FormulaPtr f_exists_rank(int level, std::string var, FormulaPtr body) {
  if (level < 0) throw Error("quantifier rank must be >= 0");
  if (level == 0) return f_exists(std::move(var), std::move(body));
  return mk({Formula::Kind::ExistsRank, "", std::move(var), "", level,
             std::move(body), {}});
}
FormulaPtr f_exists_omega(int level, std::string var, FormulaPtr body) {
  if (level < 0) throw Error("quantifier rank must be >= 0");
  if (level == 0) return f_exists(std::move(var), std::move(body));
  return mk({Formula::Kind::ExistsOmega, "", std::move(var), "", level,
             std::move(body), {}});
}
FormulaPtr f_exists_omegastar(int level, std::string var, FormulaPtr body) {
  if (level < 0) throw Error("quantifier rank must be >= 0");
  if (level == 0) return f_exists(std::move(var), std::move(body));
  return mk({Formula::Kind::ExistsOmegaStar, "", std::move(var), "", level,
             std::move(body), {}});
}

// --- traversal helpers ----------------------------------------------------

namespace {

bool is_quantifier(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::Exists:
    case Formula::Kind::ExistsRank:
    case Formula::Kind::ExistsOmega:
    case Formula::Kind::ExistsOmegaStar:
      return true;
    default:
      return false;
  }
}

void walk(const FormulaPtr& f, const std::function<void(const Formula&)>& fn) {
  fn(*f);
  if (f->a) walk(f->a, fn);
  if (f->b) walk(f->b, fn);
}

// rejects a variable bound twice along one path
void check_bindings(const FormulaPtr& f, std::set<std::string>& bound) {
  if (is_quantifier(*f)) {
    if (bound.count(f->var))
      throw Error("variable '" + f->var + "' is bound twice on a path");
    bound.insert(f->var);
    check_bindings(f->a, bound);
    bound.erase(f->var);
    return;
  }
  if (f->a) check_bindings(f->a, bound);
  if (f->b) check_bindings(f->b, bound);
}

void check_bindings(const FormulaPtr& f) {
  std::set<std::string> bound;
  check_bindings(f, bound);
}

}  // namespace

std::set<std::string> free_vars(const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Kind::LetterAtom:
      return {f->var};
    case Formula::Kind::Less:
      return {f->var, f->var2};
    case Formula::Kind::Not:
      return free_vars(f->a);
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      auto s = free_vars(f->a);
      auto t = free_vars(f->b);
      s.insert(t.begin(), t.end());
      return s;
    }
    default: {
      auto s = free_vars(f->a);
      s.erase(f->var);
      return s;
    }
  }
}

std::set<std::string> formula_letters(const FormulaPtr& f) {
  std::set<std::string> out;
  walk(f, [&](const Formula& g) {
    if (g.kind == Formula::Kind::LetterAtom) out.insert(g.letter);
  });
  return out;
}

bool is_closed(const FormulaPtr& f) { return free_vars(f).empty(); }

// --- parsing --------------------------------------------------------------

namespace {

struct FormulaLexer {
  enum class Tok { End, Ident, Quoted, Int, LParen, RParen, Less, Tilde,
                   Amp, Pipe, Dot, LBracket, RBracket };

  explicit FormulaLexer(const std::string& text) : text_(text) { advance(); }

  Tok tok = Tok::End;
  std::string value;
  int number = 0;
  std::size_t tok_pos = 0;

 private:
  const std::string& text_;
  std::size_t pos_ = 0;

 public:

  void advance() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
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
      case '<': ++pos_; tok = Tok::Less; return;
      case '~': ++pos_; tok = Tok::Tilde; return;
      case '&': ++pos_; tok = Tok::Amp; return;
      case '|': ++pos_; tok = Tok::Pipe; return;
      case '.': ++pos_; tok = Tok::Dot; return;
      case '[': ++pos_; tok = Tok::LBracket; return;
      case ']': ++pos_; tok = Tok::RBracket; return;
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
        tok = Tok::Quoted;
        value = std::move(s);
        return;
      }
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
      tok = Tok::Int;
      value = text_.substr(start, pos_ - start);
      number = std::stoi(value);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_'))
        ++pos_;
      tok = Tok::Ident;
      value = text_.substr(start, pos_ - start);
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }
};

struct FormulaParser {
  FormulaLexer lex;
  std::set<std::string> bound;

  explicit FormulaParser(const std::string& text) : lex(text) {}

  FormulaPtr parse() {
    FormulaPtr f = or_expr();
    if (lex.tok != FormulaLexer::Tok::End)
      throw ParseError("trailing input after formula", lex.tok_pos);
    return f;
  }

  FormulaPtr or_expr() {
    FormulaPtr f = and_expr();
    while (lex.tok == FormulaLexer::Tok::Pipe) {
      lex.advance();
      f = f_or(f, and_expr());
    }
    return f;
  }

  FormulaPtr and_expr() {
    FormulaPtr f = unary();
    while (lex.tok == FormulaLexer::Tok::Amp) {
      lex.advance();
      f = f_and(f, unary());
    }
    return f;
  }

  FormulaPtr unary() {
    using T = FormulaLexer::Tok;
    if (lex.tok == T::Tilde) {
      lex.advance();
      return f_not(unary());
    }
    if (lex.tok == T::Ident &&
        (lex.value == "E" || lex.value == "EI" || lex.value == "EW" ||
         lex.value == "EWS")) {
      std::string q = lex.value;
      std::size_t at = lex.tok_pos;
      lex.advance();
      int level = 0;
      if (q != "E") {
        if (lex.tok != T::LBracket)
          throw ParseError("expected '[' after " + q, lex.tok_pos);
        lex.advance();
        if (lex.tok != T::Int)
          throw ParseError("expected a rank inside []", lex.tok_pos);
        level = lex.number;
        lex.advance();
        if (lex.tok != T::RBracket)
          throw ParseError("expected ']'", lex.tok_pos);
        lex.advance();
      }
      if (lex.tok != T::Ident)
        throw ParseError("expected a variable after the quantifier", lex.tok_pos);
      std::string var = lex.value;
      lex.advance();
      if (lex.tok != T::Dot)
        throw ParseError("expected '.' after the quantified variable",
                         lex.tok_pos);
      lex.advance();
      if (bound.count(var))
        throw ParseError("variable '" + var + "' rebound", at);
      bound.insert(var);
      FormulaPtr body = unary();
      bound.erase(var);
      if (q == "E") return f_exists(var, body);
      if (q == "EI") return f_exists_rank(level, var, body);
      if (q == "EW") return f_exists_omega(level, var, body);
      return f_exists_omegastar(level, var, body);
    }
    if (lex.tok == T::LParen) {
      lex.advance();
      FormulaPtr f = or_expr();
      if (lex.tok != T::RParen) throw ParseError("expected ')'", lex.tok_pos);
      lex.advance();
      return f;
    }
    return atom();
  }

  FormulaPtr atom() {
    using T = FormulaLexer::Tok;
    if (lex.tok != T::Ident && lex.tok != T::Quoted)
      throw ParseError("expected an atom", lex.tok_pos);
    std::string name = lex.value;
    bool quoted = lex.tok == T::Quoted;
    lex.advance();
    if (lex.tok == T::LParen) {
      lex.advance();
      if (lex.tok != T::Ident)
        throw ParseError("expected a variable in the letter atom", lex.tok_pos);
      std::string var = lex.value;
      lex.advance();
      if (lex.tok != T::RParen) throw ParseError("expected ')'", lex.tok_pos);
      lex.advance();
      return f_letter(name, var);
    }
    if (!quoted && lex.tok == T::Less) {
      lex.advance();
      if (lex.tok != T::Ident)
        throw ParseError("expected a variable after '<'", lex.tok_pos);
      std::string y = lex.value;
      lex.advance();
      return f_less(name, y);
    }
    throw ParseError("expected 'letter(var)' or 'x<y'", lex.tok_pos);
  }
};

int prec(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::Or: return 1;
    case Formula::Kind::And: return 2;
    case Formula::Kind::Not:
    case Formula::Kind::Exists:
    case Formula::Kind::ExistsRank:
    case Formula::Kind::ExistsOmega:
    case Formula::Kind::ExistsOmegaStar:
      return 3;
    default: return 4;
  }
}

bool plain_name(const std::string& s) {
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) return false;
  if (s == "E" || s == "EI" || s == "EW" || s == "EWS") return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

std::string fmt_formula(const FormulaPtr& f, int min_prec) {
  std::string s;
  switch (f->kind) {
    case Formula::Kind::LetterAtom: {
      std::string n = f->letter;
      if (!plain_name(n)) {
        std::string q = "\"";
        for (char c : n) {
          if (c == '"' || c == '\\') q += '\\';
          q += c;
        }
        n = q + "\"";
      }
      s = n + "(" + f->var + ")";
      break;
    }
    case Formula::Kind::Less:
      s = f->var + "<" + f->var2;
      break;
    case Formula::Kind::Not:
      s = "~" + fmt_formula(f->a, 3);
      break;
    case Formula::Kind::And:
      s = fmt_formula(f->a, 2) + " & " + fmt_formula(f->b, 3);
      break;
    case Formula::Kind::Or:
      s = fmt_formula(f->a, 1) + " | " + fmt_formula(f->b, 2);
      break;
    case Formula::Kind::Exists:
      s = "E " + f->var + ". " + fmt_formula(f->a, 3);
      break;
    case Formula::Kind::ExistsRank:
      s = "EI[" + std::to_string(f->level) + "] " + f->var + ". " +
          fmt_formula(f->a, 3);
      break;
    case Formula::Kind::ExistsOmega:
      s = "EW[" + std::to_string(f->level) + "] " + f->var + ". " +
          fmt_formula(f->a, 3);
      break;
    case Formula::Kind::ExistsOmegaStar:
      s = "EWS[" + std::to_string(f->level) + "] " + f->var + ". " +
          fmt_formula(f->a, 3);
      break;
  }
  if (prec(*f) < min_prec) return "(" + s + ")";
  return s;
}

}  // namespace

FormulaPtr parse_formula(const std::string& text) {
  return FormulaParser(text).parse();
}

std::string format_formula(const FormulaPtr& f) { return fmt_formula(f, 0); }

// --- fragments --------------------------------------------------------------

namespace {

bool quantifier_free(const FormulaPtr& f) {
  bool ok = true;
  walk(f, [&](const Formula& g) {
    if (is_quantifier(g)) ok = false;
  });
  return ok;
}

bool exists_prefix_sentence(const FormulaPtr& f) {
  FormulaPtr cur = f;
  while (cur->kind == Formula::Kind::Exists) cur = cur->a;
  return quantifier_free(cur);
}

bool boolean_of_exists_prefixes(const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Kind::Not:
      return boolean_of_exists_prefixes(f->a);
    case Formula::Kind::And:
    case Formula::Kind::Or:
      return boolean_of_exists_prefixes(f->a) &&
             boolean_of_exists_prefixes(f->b);
    default:
      return exists_prefix_sentence(f);
  }
}

}  // namespace

FragmentTag fragment_of(const FormulaPtr& f) {
  check_bindings(f);
  if (!is_closed(f)) throw Error("fragment analysis requires a closed formula");
  FragmentTag tag;
  std::set<std::string> vars;
  walk(f, [&](const Formula& g) {
    if (g.kind == Formula::Kind::LetterAtom) vars.insert(g.var);
    if (g.kind == Formula::Kind::Less) {
      vars.insert(g.var);
      vars.insert(g.var2);
    }
    if (is_quantifier(g)) vars.insert(g.var);
    if (g.kind == Formula::Kind::ExistsRank)
      tag.foi = std::max(tag.foi, g.level);
    if (g.kind == Formula::Kind::ExistsOmega ||
        g.kind == Formula::Kind::ExistsOmegaStar)
      tag.directed = true;
  });
  tag.one_variable = vars.size() <= 1;
  tag.fo1 = tag.one_variable && tag.foi == 0 && !tag.directed;
  tag.bsigma1 = tag.foi == 0 && !tag.directed && boolean_of_exists_prefixes(f);
  return tag;
}

// --- model checking ---------------------------------------------------------

bool mc_finite(const Word& w, const FormulaPtr& f, const Assignment& s) {
  switch (f->kind) {
    case Formula::Kind::LetterAtom: {
      auto it = s.find(f->var);
      if (it == s.end()) throw Error("unassigned variable '" + f->var + "'");
      return w.at(it->second) == f->letter;
    }
    case Formula::Kind::Less: {
      auto x = s.find(f->var), y = s.find(f->var2);
      if (x == s.end() || y == s.end())
        throw Error("unassigned variable in order atom");
      return x->second < y->second;
    }
    case Formula::Kind::Not:
      return !mc_finite(w, f->a, s);
    case Formula::Kind::And:
      return mc_finite(w, f->a, s) && mc_finite(w, f->b, s);
    case Formula::Kind::Or:
      return mc_finite(w, f->a, s) || mc_finite(w, f->b, s);
    case Formula::Kind::Exists: {
      for (int i = 0; i < static_cast<int>(w.size()); ++i) {
        Assignment s2 = s;
        s2[f->var] = i;
        if (mc_finite(w, f->a, s2)) return true;
      }
      return false;
    }
    case Formula::Kind::ExistsRank:
    case Formula::Kind::ExistsOmega:
    case Formula::Kind::ExistsOmegaStar:
      // rank >= 1 witnesses need infinite suborders
      return false;
  }
  throw Error("unreachable formula kind");
}

namespace {

bool eval_letter_body(const FormulaPtr& f, const std::string& letter) {
  switch (f->kind) {
    case Formula::Kind::LetterAtom:
      return f->letter == letter;
    case Formula::Kind::Less:
      return false;  // one variable: x<x never holds
    case Formula::Kind::Not:
      return !eval_letter_body(f->a, letter);
    case Formula::Kind::And:
      return eval_letter_body(f->a, letter) && eval_letter_body(f->b, letter);
    case Formula::Kind::Or:
      return eval_letter_body(f->a, letter) || eval_letter_body(f->b, letter);
    default:
      throw Error("nested quantifier inside a one-variable sentence");
  }
}

}  // namespace

bool mc_term_onevar(const TermPtr& t, const FormulaPtr& f) {
  check_bindings(f);
  FragmentTag tag = fragment_of(f);
  if (!tag.one_variable)
    throw Error("mc_term_onevar needs a one-variable sentence");
  std::vector<std::string> alphabet = term_alphabet(t);
  std::function<bool(const FormulaPtr&)> run = [&](const FormulaPtr& g) -> bool {
    switch (g->kind) {
      case Formula::Kind::Not:
        return !run(g->a);
      case Formula::Kind::And:
        return run(g->a) && run(g->b);
      case Formula::Kind::Or:
        return run(g->a) || run(g->b);
      case Formula::Kind::Exists:
      case Formula::Kind::ExistsRank:
      case Formula::Kind::ExistsOmega:
      case Formula::Kind::ExistsOmegaStar: {
        std::set<std::string> satisfying;
        for (const auto& a : alphabet)
          if (eval_letter_body(g->a, a)) satisfying.insert(a);
        switch (g->kind) {
          case Formula::Kind::Exists:
            return rank_of(t, satisfying) >= Rank::finite(0);
          case Formula::Kind::ExistsRank:
            return rank_of(t, satisfying) >= Rank::finite(g->level);
          case Formula::Kind::ExistsOmega:
            return directed_rank(t, satisfying, Direction::Omega) >=
                   Rank::finite(g->level);
          default:
            return directed_rank(t, satisfying, Direction::OmegaStar) >=
                   Rank::finite(g->level);
        }
      }
      default:
        throw Error("a closed sentence cannot have a bare atom");
    }
  };
  return run(f);
}

// --- compilation ------------------------------------------------------------

Strategy parse_strategy(const std::string& name) {
  if (name == "fo1") return Strategy::Fo1;
  if (name == "fo1_inf") return Strategy::Fo1Inf;
  if (name == "bsigma1") return Strategy::BSigma1;
  if (name == "foinf") return Strategy::FoInf;
  throw Error("unknown strategy '" + name + "'");
}

namespace {

struct Leaf {
  int rank = 0;
  std::set<std::string> satisfying;
};

// Boolean skeleton with quantified sentences as leaves.
struct Skeleton {
  enum class Kind { Leaf, Not, And, Or };
  Kind kind;
  int leaf = -1;
  std::unique_ptr<Skeleton> a, b;

  bool eval(const std::vector<bool>& values) const {
    switch (kind) {
      case Kind::Leaf: return values[leaf];
      case Kind::Not: return !a->eval(values);
      case Kind::And: return a->eval(values) && b->eval(values);
      case Kind::Or: return a->eval(values) || b->eval(values);
    }
    return false;
  }
};

std::unique_ptr<Skeleton> split_leaves(const FormulaPtr& f,
                                       const std::vector<std::string>& sigma,
                                       std::vector<Leaf>& leaves) {
  auto node = std::make_unique<Skeleton>();
  switch (f->kind) {
    case Formula::Kind::Not:
      node->kind = Skeleton::Kind::Not;
      node->a = split_leaves(f->a, sigma, leaves);
      return node;
    case Formula::Kind::And:
    case Formula::Kind::Or:
      node->kind = f->kind == Formula::Kind::And ? Skeleton::Kind::And
                                                 : Skeleton::Kind::Or;
      node->a = split_leaves(f->a, sigma, leaves);
      node->b = split_leaves(f->b, sigma, leaves);
      return node;
    case Formula::Kind::Exists:
    case Formula::Kind::ExistsRank: {
      Leaf leaf;
      leaf.rank = f->kind == Formula::Kind::Exists ? 0 : f->level;
      for (const auto& a : sigma)
        if (eval_letter_body(f->a, a)) leaf.satisfying.insert(a);
      node->kind = Skeleton::Kind::Leaf;
      node->leaf = static_cast<int>(leaves.size());
      leaves.push_back(std::move(leaf));
      return node;
    }
    default:
      throw Error("expected a boolean combination of quantified sentences");
  }
}

Compiled compile_products(const FormulaPtr& f, Strategy strategy,
                          const std::vector<std::string>& sigma) {
  std::vector<Leaf> leaves;
  auto skeleton = split_leaves(f, sigma, leaves);
  if (leaves.empty()) throw Error("no quantified sentences to compile");

  std::vector<Algebra> factors;
  for (const auto& leaf : leaves) {
    factors.push_back(strategy == Strategy::Fo1
                          ? builtin("u1")
                          : leaf.rank == 0
                                ? builtin("u1")
                                : builtin("delta:" + std::to_string(leaf.rank)));
  }
  Algebra target = factors[0];
  for (std::size_t i = 1; i < factors.size(); ++i)
    target = direct_product(target, factors[i]);

  Morphism h;
  h.target = target;
  for (const auto& a : sigma) {
    // fold letter images left to right, mirroring the product construction
    int image = factors[0].index_of("0").value();
    if (!leaves[0].satisfying.count(a)) image = factors[0].unit();
    for (std::size_t i = 1; i < factors.size(); ++i) {
      int next = leaves[i].satisfying.count(a)
                     ? factors[i].index_of("0").value()
                     : factors[i].unit();
      image = image * factors[i].size() + next;
    }
    h.letters[a] = image;
  }

  std::vector<int> accepting;
  for (int e = 0; e < target.size(); ++e) {
    int rest = e;
    std::vector<bool> values(leaves.size());
    for (int i = static_cast<int>(leaves.size()) - 1; i >= 0; --i) {
      int component = rest % factors[i].size();
      rest /= factors[i].size();
      // the factor accepts at the top of its chain
      values[i] = component == factors[i].size() - 1;
    }
    if (skeleton->eval(values)) accepting.push_back(e);
  }
  Compiled out;
  out.recognizer = Recognizer{std::move(h), std::move(accepting)};
  return out;
}

int count_quantifiers(const FormulaPtr& f) {
  int count = 0;
  walk(f, [&](const Formula& g) {
    if (is_quantifier(g)) ++count;
  });
  return count;
}

Compiled compile_bsigma1(const FormulaPtr& f,
                         const std::vector<std::string>& sigma) {
  int n = count_quantifiers(f);
  SnAlgebra sn = build_sn(sigma, n);
  Morphism h = sn.letter_morphism();
  std::vector<int> accepting;
  for (int c = 0; c < sn.algebra.size(); ++c)
    if (mc_finite(sn.witnesses[c], f)) accepting.push_back(c);
  Compiled out;
  out.recognizer = Recognizer{std::move(h), std::move(accepting)};
  return out;
}

// letters of the extended alphabet carry one mark bit per bound variable
std::string marked_letter(const std::string& base, const std::vector<int>& bits) {
  if (bits.empty()) return base;
  std::string out = base + "#";
  for (int b : bits) out += b ? '1' : '0';
  return out;
}

struct ExtendedAlphabet {
  std::vector<std::string> base;
  int marks = 0;

  struct Entry {
    std::string name;
    int base_index;
    std::vector<int> bits;
  };

  std::vector<Entry> entries() const {
    std::vector<Entry> out;
    const int combos = 1 << marks;
    for (std::size_t i = 0; i < base.size(); ++i)
      for (int mask = 0; mask < combos; ++mask) {
        std::vector<int> bits(marks);
        for (int k = 0; k < marks; ++k) bits[k] = (mask >> k) & 1;
        out.push_back({marked_letter(base[i], bits), static_cast<int>(i), bits});
      }
    return out;
  }
};

// Tracks whether one designated mark occurs exactly once, and whether the
// marked position carries the wanted letter.
Recognizer marker_recognizer(const ExtendedAlphabet& ext, int mark,
                             const std::string& wanted) {
  Algebra alg = Algebra::make(
      "mark(" + wanted + ")", {"1", "hit", "miss", "2+"}, 0,
      {0, 1, 2, 3,
       1, 3, 3, 3,
       2, 3, 3, 3,
       3, 3, 3, 3},
      {0, 3, 3, 3}, {0, 3, 3, 3}, ShuffleTable::constant(3));
  Morphism h;
  h.target = alg;
  for (const auto& e : ext.entries()) {
    int image = 0;
    if (e.bits[mark]) image = ext.base[e.base_index] == wanted ? 1 : 2;
    h.letters[e.name] = image;
  }
  return Recognizer{std::move(h), {1}};
}

// Tracks two designated marks and accepts exactly one occurrence of each,
// in the given order at distinct positions.
Recognizer order_recognizer(const ExtendedAlphabet& ext, int mark_x,
                            int mark_y) {
  enum { U, X, Y, XY, BOTH, BAD };
  std::vector<int> p(36, BAD);
  auto set = [&](int a, int b, int v) { p[a * 6 + b] = v; };
  for (int e = 0; e < 6; ++e) {
    set(U, e, e);
    set(e, U, e);
  }
  set(X, Y, XY);
  Algebra alg = Algebra::make("order", {"1", "x", "y", "xy", "b", "bad"}, U,
                              std::move(p), {U, BAD, BAD, BAD, BAD, BAD},
                              {U, BAD, BAD, BAD, BAD, BAD},
                              ShuffleTable::constant(BAD));
  Morphism h;
  h.target = alg;
  for (const auto& e : ext.entries()) {
    int image = U;
    if (e.bits[mark_x] && e.bits[mark_y]) image = BOTH;
    else if (e.bits[mark_x]) image = X;
    else if (e.bits[mark_y]) image = Y;
    h.letters[e.name] = image;
  }
  return Recognizer{std::move(h), {XY}};
}

Recognizer product_recognizer(const Recognizer& ra, const Recognizer& rb,
                              bool conjunction) {
  Algebra target = direct_product(ra.h.target, rb.h.target);
  Morphism h;
  h.target = target;
  for (const auto& [letter, image] : ra.h.letters)
    h.letters[letter] =
        product_pair(rb.h.target, image, rb.h.of(letter));
  std::vector<int> accepting;
  for (int e = 0; e < target.size(); ++e) {
    bool a = ra.accepts_element(product_first(rb.h.target, e));
    bool b = rb.accepts_element(product_second(rb.h.target, e));
    if (conjunction ? (a && b) : (a || b)) accepting.push_back(e);
  }
  return Recognizer{std::move(h), std::move(accepting)};
}

struct FoinfCompiler {
  std::vector<std::string> sigma;
  std::vector<std::string> scope;  // bound variables, outermost first

  Compiled run(const FormulaPtr& f) {
    ExtendedAlphabet ext{sigma, static_cast<int>(scope.size())};
    Compiled out;
    switch (f->kind) {
      case Formula::Kind::LetterAtom:
        out.recognizer = marker_recognizer(ext, var_index(f->var), f->letter);
        return out;
      case Formula::Kind::Less:
        out.recognizer =
            order_recognizer(ext, var_index(f->var), var_index(f->var2));
        return out;
      case Formula::Kind::Not: {
        Compiled inner = run(f->a);
        std::vector<int> accepting;
        for (int e = 0; e < inner.recognizer.h.target.size(); ++e)
          if (!inner.recognizer.accepts_element(e)) accepting.push_back(e);
        out.recognizer =
            Recognizer{std::move(inner.recognizer.h), std::move(accepting)};
        return out;
      }
      case Formula::Kind::And:
      case Formula::Kind::Or: {
        Compiled left = run(f->a);
        Compiled right = run(f->b);
        out.recognizer =
            product_recognizer(left.recognizer, right.recognizer,
                               f->kind == Formula::Kind::And);
        return out;
      }
      case Formula::Kind::Exists:
      case Formula::Kind::ExistsRank: {
        int level = f->kind == Formula::Kind::Exists ? 0 : f->level;
        scope.push_back(f->var);
        Compiled inner = run(f->a);
        scope.pop_back();

        const Recognizer& rec = inner.recognizer;
        const Algebra& m = rec.h.target;
        Algebra n = builtin("delta:" + std::to_string(level));
        const int zero = 1;  // the bottom chain element of delta

        std::vector<BlockPair> gens;
        std::vector<std::string> letter_names;
        for (const auto& e : ext.entries()) {
          std::vector<int> unmarked = e.bits;
          unmarked.push_back(0);
          std::vector<int> marked = e.bits;
          marked.push_back(1);
          int m_img = rec.h.of(marked_letter(sigma[e.base_index], unmarked));
          int witness = rec.h.of(marked_letter(sigma[e.base_index], marked));
          BlockPair p;
          p.m = m_img;
          p.f.resize(static_cast<std::size_t>(m.size()) * m.size());
          for (int x = 0; x < m.size(); ++x)
            for (int y = 0; y < m.size(); ++y)
              p.f[x * m.size() + y] =
                  rec.accepts_element(m.mul(m.mul(x, witness), y))
                      ? zero
                      : n.unit();
          gens.push_back(std::move(p));
          letter_names.push_back(e.name);
        }
        BlockProduct bp = block_product_generated(m, n, gens);
        Morphism h;
        h.target = bp.algebra;
        for (std::size_t i = 0; i < gens.size(); ++i) {
          auto idx = bp.find_pair(gens[i]);
          if (!idx) throw Error("generator missing from block closure");
          h.letters[letter_names[i]] = *idx;
        }
        std::vector<int> n_accepting;
        for (int v = level + 1; v < n.size(); ++v) n_accepting.push_back(v);
        std::vector<int> accepting;
        for (int e = 0; e < bp.algebra.size(); ++e) {
          int v = bp.f_of(e, m.unit(), m.unit());
          if (std::binary_search(n_accepting.begin(), n_accepting.end(), v))
            accepting.push_back(e);
        }
        out.block = std::move(bp);
        out.block_inner_accepting = std::move(n_accepting);
        out.recognizer = Recognizer{std::move(h), std::move(accepting)};
        return out;
      }
      default:
        throw Error("directed quantifiers have no block product compiler");
    }
  }

  int var_index(const std::string& v) const {
    for (std::size_t i = 0; i < scope.size(); ++i)
      if (scope[i] == v) return static_cast<int>(i);
    throw Error("unbound variable '" + v + "'");
  }
};

}  // namespace

Compiled compile(const FormulaPtr& f, Strategy strategy,
                 std::vector<std::string> alphabet) {
  check_bindings(f);
  FragmentTag tag = fragment_of(f);
  if (alphabet.empty()) {
    auto letters = formula_letters(f);
    alphabet.assign(letters.begin(), letters.end());
  }
  std::sort(alphabet.begin(), alphabet.end());
  alphabet.erase(std::unique(alphabet.begin(), alphabet.end()),
                 alphabet.end());

  switch (strategy) {
    case Strategy::Fo1:
      if (!tag.fo1)
        throw Error("formula is outside the one-variable FO fragment");
      return compile_products(f, strategy, alphabet);
    case Strategy::Fo1Inf:
      if (!tag.one_variable || tag.directed)
        throw Error("formula is outside the one-variable infinitary fragment");
      return compile_products(f, strategy, alphabet);
    case Strategy::BSigma1:
      if (!tag.bsigma1)
        throw Error(
            "formula is not a boolean combination of existential sentences");
      return compile_bsigma1(f, alphabet);
    case Strategy::FoInf: {
      if (tag.directed)
        throw Error("directed quantifiers have no block product compiler");
      FoinfCompiler c{alphabet, {}};
      return c.run(f);
    }
  }
  throw Error("unreachable strategy");
}

bool member_via_bpp(const TermPtr& t, const Compiled& c) {
  if (!c.block) throw Error("compiled recognizer has no block decomposition");
  const BlockProduct& bp = *c.block;
  Morphism h1;
  h1.target = bp.left;
  for (const auto& [letter, image] : c.recognizer.h.letters)
    h1.letters[letter] = bp.m_of(image);
  TermPtr normalized = normalize_powers(t, h1);
  TermPtr relabeled = transduce(normalized, h1);
  Morphism g2;
  g2.target = bp.right;
  for (const auto& [letter, image] : c.recognizer.h.letters)
    for (int x = 0; x < bp.left.size(); ++x)
      for (int y = 0; y < bp.left.size(); ++y)
        g2.letters[triple_letter(bp.left.name_of(x), letter,
                                 bp.left.name_of(y))] = bp.f_of(image, x, y);
  int value = eval_term(relabeled, g2);
  return std::binary_search(c.block_inner_accepting.begin(),
                            c.block_inner_accepting.end(), value);
}

FormulaPtr relativize(const FormulaPtr& f, const std::string& pivot,
                      Side side) {
  check_bindings(f);
  bool clash = free_vars(f).count(pivot) > 0;
  walk(f, [&](const Formula& g) {
    if (is_quantifier(g) && g.var == pivot) clash = true;
  });
  if (clash)
    throw Error("pivot '" + pivot + "' already occurs in the formula");
  std::function<FormulaPtr(const FormulaPtr&)> rec =
      [&](const FormulaPtr& g) -> FormulaPtr {
    switch (g->kind) {
      case Formula::Kind::LetterAtom:
      case Formula::Kind::Less:
        return g;
      case Formula::Kind::Not:
        return f_not(rec(g->a));
      case Formula::Kind::And:
        return f_and(rec(g->a), rec(g->b));
      case Formula::Kind::Or:
        return f_or(rec(g->a), rec(g->b));
      default: {
        FormulaPtr guard = side == Side::Below ? f_less(g->var, pivot)
                                               : f_less(pivot, g->var);
        FormulaPtr body = f_and(rec(g->a), guard);
        switch (g->kind) {
          case Formula::Kind::Exists:
            return f_exists(g->var, body);
          case Formula::Kind::ExistsRank:
            return f_exists_rank(g->level, g->var, body);
          case Formula::Kind::ExistsOmega:
            return f_exists_omega(g->level, g->var, body);
          default:
            return f_exists_omegastar(g->level, g->var, body);
        }
      }
    }
  };
  return rec(f);
}

}  // namespace clo
