#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "clo/algebra.hpp"
#include "clo/term.hpp"

namespace clo {

/// Componentwise product. The shuffle acts on each component's projection.
Algebra direct_product(const Algebra& a, const Algebra& b);

/// Pair encoding used by direct_product; only the right factor size matters.
int product_pair(const Algebra& right, int x, int y);
int product_first(const Algebra& right, int element);
int product_second(const Algebra& right, int element);

/// Least subset containing the generators and the unit, closed under the
/// product, both powers, and every defined shuffle over its own subsets.
Algebra generated_subalgebra(const Algebra& a, const Subset& gens);

/// Two-sided transformation pair: the left component lives in M, the right
/// one is a function M x M -> N recording context-dependent N-values.
struct BlockPair {
  int m = 0;
  std::vector<int> f;  // row-major over M x M

  friend auto operator<=>(const BlockPair&, const BlockPair&) = default;
};

struct BlockProduct {
  Algebra algebra;  // the pair algebra; shuffle is partial
  Algebra left;     // M
  Algebra right;    // N
  std::vector<BlockPair> pairs;  // decoding, indexed by element

  int m_of(int element) const { return pairs.at(element).m; }
  int f_of(int element, int x, int y) const {
    return pairs.at(element).f.at(x * left.size() + y);
  }
  std::optional<int> find_pair(const BlockPair& p) const;
};

/// Full-carrier block product M x N^(MxM). Only viable for small operands;
/// use the generated variant otherwise.
BlockProduct block_product(const Algebra& m, const Algebra& n);

/// Block product carrier generated from the given pairs under the product
/// and both powers. Shuffle entries are filled only where self-consistent.
BlockProduct block_product_generated(const Algebra& m, const Algebra& n,
                                     const std::vector<BlockPair>& gens);

/// Deterministic sparse random generators for closure experiments.
std::vector<BlockPair> random_block_generators(const Algebra& m,
                                               const Algebra& n, int count,
                                               std::mt19937& rng);

struct SyntacticQuotient {
  Algebra restricted;           // subalgebra generated by the letter images
  Algebra quotient;
  std::vector<int> class_of;    // restricted element -> quotient element
  Recognizer recognizer;        // recognizes the same language
};

/// Coarsest congruence on the reachable part of the recognizer's target
/// that separates accepting from rejecting elements and is compatible with
/// the product, both powers, and single-element replacement inside shuffles.
SyntacticQuotient syntactic_quotient(const Recognizer& r);

enum class Decision { Yes, No, Unknown };

struct DivisionWitness {
  Subset subalgebra;          // elements of the divisor's carrier
  std::vector<int> mapping;   // subalgebra[i] -> element of the dividend
};

struct DivisionResult {
  Decision decision = Decision::Unknown;
  std::optional<DivisionWitness> witness;
};

/// Does some subalgebra of b map onto a by a morphism preserving the unit,
/// the product, both powers and all defined shuffles? Brute-force search,
/// budget-guarded; Unknown when the search space is too large.
DivisionResult divides(const Algebra& a, const Algebra& b);

/// Structure-preserving bijection test (unit, product, powers, shuffle).
bool is_isomorphic(const Algebra& a, const Algebra& b);

/// Builtin catalogue: "u1", "gap", "delta:N", "omega_chain:N",
/// "omegastar_chain:N".
Algebra builtin(const std::string& spec);

/// The quotient of countable words by "same subwords of length <= n",
/// restricted to the classes reachable from the letter classes.
struct SnAlgebra {
  Algebra algebra;
  int bound = 0;
  std::vector<std::string> alphabet;
  std::vector<WordSet> classes;    // per element
  std::vector<Word> witnesses;     // finite representative per element
  Morphism letter_morphism() const;
  std::optional<int> class_index(const WordSet& c) const;
};

SnAlgebra build_sn(const std::vector<std::string>& alphabet, int n);

}  // namespace clo
