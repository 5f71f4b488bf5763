#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "clo/error.hpp"

namespace clo {

class Algebra;

/// A subset of carrier elements, kept sorted and duplicate-free.
using Subset = std::vector<int>;

Subset sorted_unique(Subset s);

/// Shuffle assignment on unit-normalized subsets. Resolution order:
/// explicit entries, then the rule (if any), then the default value.
/// A table with neither rule nor default may be partial; lookups on
/// missing subsets report no value.
class ShuffleTable {
 public:
  using Rule = std::function<std::optional<int>(const Algebra&, const Subset&)>;

  ShuffleTable() = default;

  static ShuffleTable constant(int value) {
    ShuffleTable t;
    t.default_ = value;
    return t;
  }
  static ShuffleTable from_entries(std::map<Subset, int> entries,
                                   std::optional<int> default_value) {
    ShuffleTable t;
    t.entries_ = std::move(entries);
    t.default_ = default_value;
    return t;
  }
  /// kappa(E) = (product of E in carrier order)^exponent.
  static ShuffleTable power_of_product(int exponent);
  static ShuffleTable with_rule(Rule rule) {
    ShuffleTable t;
    t.rule_ = std::move(rule);
    return t;
  }

  void add_entry(Subset normalized, int value) {
    entries_[std::move(normalized)] = value;
  }

  /// Lookup on an already unit-normalized, non-empty, non-unit subset.
  std::optional<int> find(const Algebra& owner, const Subset& s) const;

  const std::map<Subset, int>& entries() const { return entries_; }
  std::optional<int> default_value() const { return default_; }
  bool has_rule() const { return static_cast<bool>(rule_); }
  /// True when every non-empty subset is guaranteed a value.
  bool total_by_construction() const {
    return default_.has_value() || static_cast<bool>(rule_);
  }

 private:
  std::map<Subset, int> entries_;
  std::optional<int> default_;
  Rule rule_;
};

/// A finite algebra of countable words: a monoid together with the derived
/// unary omega/omega* powers and the set-valued shuffle operation. All state
/// is immutable after construction; copies share the underlying tables.
class Algebra {
 public:
  Algebra() = default;

  static Algebra make(std::string label, std::vector<std::string> names,
                      int unit, std::vector<int> product,
                      std::vector<int> omega, std::vector<int> omegastar,
                      ShuffleTable shuffle);

  bool valid() const { return d_ != nullptr; }
  int size() const { return static_cast<int>(d_->names.size()); }
  int unit() const { return d_->unit; }
  const std::string& label() const { return d_->label; }
  const std::vector<std::string>& names() const { return d_->names; }
  const std::string& name_of(int x) const { return d_->names.at(x); }
  std::optional<int> index_of(const std::string& name) const;
  int require_index(const std::string& name) const;

  int mul(int x, int y) const { return d_->product[x * size() + y]; }
  int omega(int x) const { return d_->omega[x]; }
  int omegastar(int x) const { return d_->omegastar[x]; }

  /// Strips the unit from a subset; the subset {unit} itself is preserved.
  Subset normalized(Subset s) const;

  std::optional<int> try_shuffle(const Subset& s) const;
  int shuffle(const Subset& s) const;  // throws ShuffleIncompleteError
  const ShuffleTable& shuffle_table() const { return d_->shuffle; }
  bool shuffle_total() const { return d_->shuffle.total_by_construction(); }

  int pow(int x, int k) const;
  /// Least k >= 1 such that x^k is idempotent.
  int idem_exponent(int x) const;
  /// The unique idempotent power x^! of x.
  int idem_power(int x) const { return pow(x, idem_exponent(x)); }
  std::vector<int> idempotents() const;

  /// Iterated gap power: gamma_0(x) = x^!,
  /// gamma_{n+1}(x) = (omega(gamma_n(x)) . omegastar(gamma_n(x)))^!.
  int gamma(int x, int n) const;
  std::vector<int> gamma_map(int n) const;
  /// Gap-nesting length: least n with gamma_n = gamma_{n+1} pointwise.
  int gnl() const;

  /// E_0 = idempotents, E_{n+1} = {(omega(e).omegastar(e))^! : e in E_n}.
  std::vector<int> iterated_idempotents(int n) const;

  std::string subset_names(const Subset& s) const;

 private:
  struct Data {
    std::string label;
    std::vector<std::string> names;
    std::map<std::string, int> index;
    int unit = 0;
    std::vector<int> product;
    std::vector<int> omega;
    std::vector<int> omegastar;
    ShuffleTable shuffle;
  };
  std::shared_ptr<const Data> d_;
};

struct PropertyCheck {
  std::string name;
  bool passed = true;
  std::vector<std::string> witness;  // offending elements, if any
  std::string detail;
};

struct PropertyReport {
  std::string subject;
  std::vector<PropertyCheck> checks;

  bool all_passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
  const PropertyCheck* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

/// Checks the monoid axioms, the interaction of omega/omega* with products
/// and powers, and the shuffle absorption laws, over the whole carrier.
/// Violations become failed checks with witnesses; nothing throws except
/// enumeration blowups (BudgetError).
PropertyReport validate_axioms(const Algebra& a);

struct GreenRelations {
  std::vector<std::vector<int>> j_classes, r_classes, l_classes, h_classes;
  std::vector<int> j_index, r_index, l_index, h_index;
  // j_leq[x][y] holds iff x is in M.y.M
  std::vector<std::vector<bool>> j_leq;

  bool j_trivial() const;
};

GreenRelations green_relations(const Algebra& a);

enum class IdentityKind {
  Commutative,
  Idempotent,
  Aperiodic,
  JTrivial,
  ShuffleTrivial,
  ShufflePowerTrivial,
  GapInsensitive,  // parameterized by level
};

struct Identity {
  IdentityKind kind;
  int level = 0;  // only for GapInsensitive

  static Identity parse(const std::string& tag);
  std::string str() const;
};

PropertyReport check_identity(const Algebra& a, const Identity& id);

/// Enumerates all non-empty subsets of non-unit elements (normalized keys).
/// Throws BudgetError when there are more than 2^24 of them.
void for_each_nonunit_subset(const Algebra& a,
                             const std::function<void(const Subset&)>& f);

}  // namespace clo
