#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "clo/constructions.hpp"
#include "clo/term.hpp"

namespace clo {

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

/// First-order formulas over letter predicates and position order, extended
/// with infinitary quantifiers: ExistsRank asks for a witness set of nesting
/// rank at least n, ExistsOmega/ExistsOmegaStar for a one-sided power
/// suborder of witnesses. Rank-0 variants collapse to plain Exists at
/// construction.
struct Formula {
  enum class Kind {
    LetterAtom,   // a(x)
    Less,         // x < y
    Not,
    And,
    Or,
    Exists,
    ExistsRank,        // EI[n]
    ExistsOmega,       // EW[n]
    ExistsOmegaStar,   // EWS[n]
  };
  Kind kind;
  std::string letter;  // LetterAtom
  std::string var;     // atoms and quantifiers
  std::string var2;    // Less
  int level = 0;       // quantifier rank
  FormulaPtr a, b;
};

FormulaPtr f_letter(std::string letter, std::string var);
FormulaPtr f_less(std::string x, std::string y);
FormulaPtr f_not(FormulaPtr a);
FormulaPtr f_and(FormulaPtr a, FormulaPtr b);
FormulaPtr f_or(FormulaPtr a, FormulaPtr b);
FormulaPtr f_exists(std::string var, FormulaPtr body);
FormulaPtr f_exists_rank(int level, std::string var, FormulaPtr body);
FormulaPtr f_exists_omega(int level, std::string var, FormulaPtr body);
FormulaPtr f_exists_omegastar(int level, std::string var, FormulaPtr body);

FormulaPtr parse_formula(const std::string& text);
std::string format_formula(const FormulaPtr& f);

std::set<std::string> free_vars(const FormulaPtr& f);
std::set<std::string> formula_letters(const FormulaPtr& f);
bool is_closed(const FormulaPtr& f);

struct FragmentTag {
  bool fo1 = false;          // one variable, plain quantifiers only
  bool bsigma1 = false;      // boolean combination of existential sentences
  bool one_variable = false;
  int foi = 0;               // largest infinitary rank used, 0 if none
  bool directed = false;     // uses the one-sided EW/EWS quantifiers
};

/// Syntactic classification; requires a closed formula.
FragmentTag fragment_of(const FormulaPtr& f);

using Assignment = std::map<std::string, int>;

/// Brute-force semantics over a finite word. Infinitary quantifiers of rank
/// >= 1 are false here: finite orders have rank zero.
bool mc_finite(const Word& w, const FormulaPtr& f, const Assignment& s = {});

/// Semantics of closed one-variable sentences over a term, via the rank
/// analyses: each quantified sentence reduces to a rank comparison on the
/// set of letters satisfying its body.
bool mc_term_onevar(const TermPtr& t, const FormulaPtr& f);

enum class Strategy { Fo1, Fo1Inf, BSigma1, FoInf };
Strategy parse_strategy(const std::string& name);

struct Compiled {
  Recognizer recognizer;
  // present when the outermost construct is a single infinitary quantifier
  // compiled to a block product; enables the transducer evaluation route
  std::optional<BlockProduct> block;
  std::vector<int> block_inner_accepting;
};

/// Compiles a sentence to a recognizer over the given alphabet (defaults to
/// the letters of the formula). The strategy must match the fragment.
Compiled compile(const FormulaPtr& f, Strategy strategy,
                 std::vector<std::string> alphabet = {});

/// Membership through the block product principle: transduce the term by
/// the left projection, evaluate the relabeled term on the right factor.
bool member_via_bpp(const TermPtr& t, const Compiled& c);

enum class Side { Below, Above };

/// Restricts a formula to the positions on one side of a pivot variable by
/// guarding every quantifier. The pivot must not occur in the formula.
FormulaPtr relativize(const FormulaPtr& f, const std::string& pivot,
                      Side side);

}  // namespace clo
