#include "clo/algebra.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace clo {

std::size_t budget() {
  static const std::size_t value = [] {
    if (const char* env = std::getenv("CLO_BUDGET")) {
      char* end = nullptr;
      unsigned long long v = std::strtoull(env, &end, 10);
      if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return static_cast<std::size_t>(100000);
  }();
  return value;
}

Subset sorted_unique(Subset s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

ShuffleTable ShuffleTable::power_of_product(int exponent) {
  ShuffleTable t;
  t.rule_ = [exponent](const Algebra& a, const Subset& s) -> std::optional<int> {
    int prod = a.unit();
    for (int x : s) prod = a.mul(prod, x);
    return a.pow(prod, exponent);
  };
  return t;
}

std::optional<int> ShuffleTable::find(const Algebra& owner,
                                      const Subset& s) const {
  if (auto it = entries_.find(s); it != entries_.end()) return it->second;
  if (rule_) {
    if (auto v = rule_(owner, s)) return v;
  }
  return default_;
}

Algebra Algebra::make(std::string label, std::vector<std::string> names,
                      int unit, std::vector<int> product,
                      std::vector<int> omega, std::vector<int> omegastar,
                      ShuffleTable shuffle) {
  auto d = std::make_shared<Data>();
  const int n = static_cast<int>(names.size());
  if (n == 0) throw Error("algebra must have at least one element");
  if (unit < 0 || unit >= n) throw Error("unit index out of range");
  if (product.size() != static_cast<std::size_t>(n) * n ||
      omega.size() != static_cast<std::size_t>(n) ||
      omegastar.size() != static_cast<std::size_t>(n))
    throw Error("table sizes do not match the carrier");
  auto in_range = [n](int v) { return v >= 0 && v < n; };
  for (int v : product)
    if (!in_range(v)) throw Error("product table entry out of range");
  for (int v : omega)
    if (!in_range(v)) throw Error("omega table entry out of range");
  for (int v : omegastar)
    if (!in_range(v)) throw Error("omegastar table entry out of range");
  for (int i = 0; i < n; ++i) {
    if (names[i].empty()) throw Error("element names must be non-empty");
    if (!d->index.emplace(names[i], i).second)
      throw Error("duplicate element name: " + names[i]);
  }
  d->label = std::move(label);
  d->names = std::move(names);
  d->unit = unit;
  d->product = std::move(product);
  d->omega = std::move(omega);
  d->omegastar = std::move(omegastar);
  d->shuffle = std::move(shuffle);
  Algebra a;
  a.d_ = std::move(d);
  return a;
}

std::optional<int> Algebra::index_of(const std::string& name) const {
  auto it = d_->index.find(name);
  if (it == d_->index.end()) return std::nullopt;
  return it->second;
}

int Algebra::require_index(const std::string& name) const {
  if (auto i = index_of(name)) return *i;
  throw Error("unknown element '" + name + "' in algebra " + d_->label);
}

Subset Algebra::normalized(Subset s) const {
  s = sorted_unique(std::move(s));
  if (s.size() > 1) {
    s.erase(std::remove(s.begin(), s.end(), unit()), s.end());
  }
  return s;
}

std::optional<int> Algebra::try_shuffle(const Subset& s) const {
  if (s.empty()) throw Error("shuffle of the empty set is undefined");
  Subset key = normalized(s);
  if (key.size() == 1 && key[0] == unit()) return unit();
  return d_->shuffle.find(*this, key);
}

int Algebra::shuffle(const Subset& s) const {
  if (auto v = try_shuffle(s)) return *v;
  std::vector<std::string> names;
  for (int x : normalized(s)) names.push_back(name_of(x));
  throw ShuffleIncompleteError(std::move(names));
}

int Algebra::pow(int x, int k) const {
  int acc = unit();
  for (int i = 0; i < k; ++i) acc = mul(acc, x);
  return acc;
}

int Algebra::idem_exponent(int x) const {
  int cur = x;
  for (int k = 1; k <= 2 * size() + 2; ++k) {
    if (mul(cur, cur) == cur) return k;
    cur = mul(cur, x);
  }
  throw Error("no idempotent power found for '" + name_of(x) +
              "'; the product table is not associative");
}

std::vector<int> Algebra::idempotents() const {
  std::vector<int> out;
  for (int x = 0; x < size(); ++x)
    if (mul(x, x) == x) out.push_back(x);
  return out;
}

int Algebra::gamma(int x, int n) const {
  int cur = idem_power(x);
  for (int i = 0; i < n; ++i)
    cur = idem_power(mul(omega(cur), omegastar(cur)));
  return cur;
}

std::vector<int> Algebra::gamma_map(int n) const {
  std::vector<int> g(size());
  for (int x = 0; x < size(); ++x) g[x] = gamma(x, n);
  return g;
}

int Algebra::gnl() const {
  std::vector<int> cur(size());
  for (int x = 0; x < size(); ++x) cur[x] = idem_power(x);
  for (int n = 0; n <= size() + 1; ++n) {
    std::vector<int> next(size());
    for (int x = 0; x < size(); ++x)
      next[x] = idem_power(mul(omega(cur[x]), omegastar(cur[x])));
    if (next == cur) return n;
    cur = std::move(next);
  }
  throw Error("gamma maps did not stabilize within the carrier bound; " +
              label() + " violates the algebra axioms");
}

std::vector<int> Algebra::iterated_idempotents(int n) const {
  std::vector<int> cur = idempotents();
  for (int i = 0; i < n; ++i) {
    std::vector<int> next;
    for (int e : cur)
      next.push_back(idem_power(mul(omega(e), omegastar(e))));
    cur = sorted_unique(std::move(next));
  }
  return cur;
}

std::string Algebra::subset_names(const Subset& s) const {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += name_of(s[i]);
  }
  return out + "}";
}

void for_each_nonunit_subset(const Algebra& a,
                             const std::function<void(const Subset&)>& f) {
  std::vector<int> pool;
  for (int x = 0; x < a.size(); ++x)
    if (x != a.unit()) pool.push_back(x);
  if (pool.size() > 24)
    throw BudgetError("subset enumeration over " + a.label(), pool.size());
  const std::uint32_t limit = 1u << pool.size();
  Subset s;
  for (std::uint32_t mask = 1; mask < limit; ++mask) {
    s.clear();
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (mask & (1u << i)) s.push_back(pool[i]);
    f(s);
  }
}

namespace {

using Witness = std::optional<std::vector<int>>;

struct Axiom {
  std::string name;
  std::function<Witness(const Algebra&)> check;
};

Witness scan_pairs(const Algebra& a,
                   const std::function<bool(int, int)>& ok) {
  for (int x = 0; x < a.size(); ++x)
    for (int y = 0; y < a.size(); ++y)
      if (!ok(x, y)) return std::vector<int>{x, y};
  return std::nullopt;
}

Witness scan_elements(const Algebra& a, const std::function<bool(int)>& ok) {
  for (int x = 0; x < a.size(); ++x)
    if (!ok(x)) return std::vector<int>{x};
  return std::nullopt;
}

const std::vector<Axiom>& axiom_list() {
  static const std::vector<Axiom> axioms = {
      {"associativity",
       [](const Algebra& a) -> Witness {
         for (int x = 0; x < a.size(); ++x)
           for (int y = 0; y < a.size(); ++y)
             for (int z = 0; z < a.size(); ++z)
               if (a.mul(a.mul(x, y), z) != a.mul(x, a.mul(y, z)))
                 return std::vector<int>{x, y, z};
         return std::nullopt;
       }},
      {"unit-neutral",
       [](const Algebra& a) {
         return scan_elements(a, [&](int x) {
           return a.mul(a.unit(), x) == x && a.mul(x, a.unit()) == x;
         });
       }},
      {"unit-powers",
       [](const Algebra& a) -> Witness {
         if (a.omega(a.unit()) != a.unit() ||
             a.omegastar(a.unit()) != a.unit())
           return std::vector<int>{a.unit()};
         return std::nullopt;
       }},
      {"omega-conjugate",  // (xy)^w = x.(yx)^w
       [](const Algebra& a) {
         return scan_pairs(a, [&](int x, int y) {
           return a.omega(a.mul(x, y)) == a.mul(x, a.omega(a.mul(y, x)));
         });
       }},
      {"omega-power-collapse",  // (x^k)^w = x^w for 1 <= k <= |A|
       [](const Algebra& a) -> Witness {
         for (int x = 0; x < a.size(); ++x) {
           int p = x;
           for (int k = 1; k <= a.size(); ++k) {
             if (a.omega(p) != a.omega(x)) return std::vector<int>{x, k};
             p = a.mul(p, x);
           }
         }
         return std::nullopt;
       }},
      {"omega-left-absorb",  // x.x^w = x^w
       [](const Algebra& a) {
         return scan_elements(
             a, [&](int x) { return a.mul(x, a.omega(x)) == a.omega(x); });
       }},
      {"omegastar-conjugate",  // (xy)^w* = (yx)^w*.y
       [](const Algebra& a) {
         return scan_pairs(a, [&](int x, int y) {
           return a.omegastar(a.mul(x, y)) ==
                  a.mul(a.omegastar(a.mul(y, x)), y);
         });
       }},
      {"omegastar-power-collapse",
       [](const Algebra& a) -> Witness {
         for (int x = 0; x < a.size(); ++x) {
           int p = x;
           for (int k = 1; k <= a.size(); ++k) {
             if (a.omegastar(p) != a.omegastar(x))
               return std::vector<int>{x, k};
             p = a.mul(p, x);
           }
         }
         return std::nullopt;
       }},
      {"omegastar-right-absorb",  // x^w*.x = x^w*
       [](const Algebra& a) {
         return scan_elements(a, [&](int x) {
           return a.mul(a.omegastar(x), x) == a.omegastar(x);
         });
       }},
  };
  return axioms;
}

}  // namespace

PropertyReport validate_axioms(const Algebra& a) {
  PropertyReport report;
  report.subject = a.label();
  for (const auto& ax : axiom_list()) {
    PropertyCheck c;
    c.name = ax.name;
    if (auto w = ax.check(a)) {
      c.passed = false;
      for (std::size_t i = 0; i < w->size(); ++i) {
        // power-collapse witnesses carry an exponent in the second slot
        bool exponent = ax.name.find("power-collapse") != std::string::npos &&
                        i == 1;
        c.witness.push_back(exponent ? "k=" + std::to_string((*w)[i])
                                     : a.name_of((*w)[i]));
      }
    }
    report.checks.push_back(std::move(c));
  }

  // Shuffle axioms, skipping subsets the table does not define.
  PropertyCheck absorb;
  absorb.name = "shuffle-unit-absorption";
  PropertyCheck sandwich;
  sandwich.name = "shuffle-absorb";
  PropertyCheck stable;
  stable.name = "shuffle-stable";  // kappa(E) fixed by ., omega, omega*
  std::size_t undefined = 0;
  for_each_nonunit_subset(a, [&](const Subset& s) {
    auto v = a.try_shuffle(s);
    if (!v) {
      ++undefined;
      return;
    }
    Subset with_unit = s;
    with_unit.push_back(a.unit());
    if (absorb.passed && a.try_shuffle(with_unit) != v) {
      absorb.passed = false;
      absorb.witness = {a.subset_names(s)};
    }
    if (sandwich.passed) {
      Subset probe = s;
      probe.push_back(a.unit());
      for (int x : probe) {
        if (a.mul(a.mul(*v, x), *v) != *v) {
          sandwich.passed = false;
          sandwich.witness = {a.subset_names(s), a.name_of(x)};
          break;
        }
      }
    }
    if (stable.passed &&
        (a.omega(*v) != *v || a.omegastar(*v) != *v || a.mul(*v, *v) != *v)) {
      stable.passed = false;
      stable.witness = {a.subset_names(s)};
    }
  });
  if (undefined > 0) {
    std::string note = std::to_string(undefined) + " subsets undefined";
    absorb.detail = note;
    sandwich.detail = note;
    stable.detail = note;
  }
  report.checks.push_back(std::move(absorb));
  report.checks.push_back(std::move(sandwich));
  report.checks.push_back(std::move(stable));
  return report;
}

bool GreenRelations::j_trivial() const {
  for (const auto& c : j_classes)
    if (c.size() > 1) return false;
  return true;
}

namespace {

// Groups elements by mutual reachability under `leq`.
void classes_from_preorder(const std::vector<std::vector<bool>>& leq,
                           std::vector<std::vector<int>>& classes,
                           std::vector<int>& index) {
  const int n = static_cast<int>(leq.size());
  index.assign(n, -1);
  for (int x = 0; x < n; ++x) {
    if (index[x] >= 0) continue;
    std::vector<int> cls;
    for (int y = x; y < n; ++y)
      if (index[y] < 0 && leq[x][y] && leq[y][x]) {
        index[y] = static_cast<int>(classes.size());
        cls.push_back(y);
      }
    classes.push_back(std::move(cls));
  }
}

}  // namespace

GreenRelations green_relations(const Algebra& a) {
  const int n = a.size();
  if (static_cast<std::size_t>(n) * n * n > (std::size_t{1} << 31))
    throw BudgetError("green relations over " + a.label(), n);
  GreenRelations g;
  std::vector<std::vector<bool>> r_leq(n, std::vector<bool>(n, false));
  std::vector<std::vector<bool>> l_leq(n, std::vector<bool>(n, false));
  g.j_leq.assign(n, std::vector<bool>(n, false));
  for (int y = 0; y < n; ++y) {
    for (int u = 0; u < n; ++u) {
      r_leq[a.mul(y, u)][y] = true;  // x = y.u  =>  x <=_R y
      l_leq[a.mul(u, y)][y] = true;
      for (int v = 0; v < n; ++v) g.j_leq[a.mul(a.mul(u, y), v)][y] = true;
    }
  }
  classes_from_preorder(g.j_leq, g.j_classes, g.j_index);
  classes_from_preorder(r_leq, g.r_classes, g.r_index);
  classes_from_preorder(l_leq, g.l_classes, g.l_index);
  // H = R meet L
  std::vector<std::vector<bool>> h_leq(n, std::vector<bool>(n, false));
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      h_leq[x][y] = r_leq[x][y] && l_leq[x][y];
  classes_from_preorder(h_leq, g.h_classes, g.h_index);
  return g;
}

Identity Identity::parse(const std::string& tag) {
  if (tag == "commutative") return {IdentityKind::Commutative};
  if (tag == "idempotent") return {IdentityKind::Idempotent};
  if (tag == "aperiodic") return {IdentityKind::Aperiodic};
  if (tag == "j_trivial") return {IdentityKind::JTrivial};
  if (tag == "shuffle_trivial") return {IdentityKind::ShuffleTrivial};
  if (tag == "shuffle_power_trivial")
    return {IdentityKind::ShufflePowerTrivial};
  if (tag.rfind("gi(", 0) == 0 && tag.back() == ')') {
    try {
      int level = std::stoi(tag.substr(3, tag.size() - 4));
      if (level >= 0) return {IdentityKind::GapInsensitive, level};
    } catch (const std::exception&) {
    }
  }
  throw Error("unknown identity tag: " + tag);
}

std::string Identity::str() const {
  switch (kind) {
    case IdentityKind::Commutative: return "commutative";
    case IdentityKind::Idempotent: return "idempotent";
    case IdentityKind::Aperiodic: return "aperiodic";
    case IdentityKind::JTrivial: return "j_trivial";
    case IdentityKind::ShuffleTrivial: return "shuffle_trivial";
    case IdentityKind::ShufflePowerTrivial: return "shuffle_power_trivial";
    case IdentityKind::GapInsensitive:
      return "gi(" + std::to_string(level) + ")";
  }
  return "?";
}

namespace {

void check_pairs(const Algebra& a, PropertyReport& rep, const std::string& name,
                 const std::function<bool(int, int)>& ok) {
  PropertyCheck c;
  c.name = name;
  if (auto w = scan_pairs(a, ok)) {
    c.passed = false;
    for (int x : *w) c.witness.push_back(a.name_of(x));
  }
  rep.checks.push_back(std::move(c));
}

void check_elements(const Algebra& a, PropertyReport& rep,
                    const std::string& name,
                    const std::function<bool(int)>& ok) {
  PropertyCheck c;
  c.name = name;
  if (auto w = scan_elements(a, ok)) {
    c.passed = false;
    for (int x : *w) c.witness.push_back(a.name_of(x));
  }
  rep.checks.push_back(std::move(c));
}

// kappa(E) compared against f(product of E in carrier order).
void check_shuffle_vs_product(const Algebra& a, PropertyReport& rep,
                              const std::string& name,
                              const std::function<int(int)>& f) {
  PropertyCheck c;
  c.name = name;
  std::size_t undefined = 0;
  for_each_nonunit_subset(a, [&](const Subset& s) {
    auto v = a.try_shuffle(s);
    if (!v) {
      ++undefined;
      return;
    }
    if (!c.passed) return;
    int prod = a.unit();
    for (int x : s) prod = a.mul(prod, x);
    if (*v != f(prod)) {
      c.passed = false;
      c.witness = {a.subset_names(s), a.name_of(*v)};
    }
  });
  if (undefined > 0)
    c.detail = std::to_string(undefined) + " subsets undefined";
  rep.checks.push_back(std::move(c));
}

}  // namespace

PropertyReport check_identity(const Algebra& a, const Identity& id) {
  PropertyReport rep;
  rep.subject = a.label() + " : " + id.str();
  switch (id.kind) {
    case IdentityKind::Commutative:
      check_pairs(a, rep, "commutative",
                  [&](int x, int y) { return a.mul(x, y) == a.mul(y, x); });
      break;
    case IdentityKind::Idempotent:
      check_elements(a, rep, "idempotent",
                     [&](int x) { return a.mul(x, x) == x; });
      break;
    case IdentityKind::Aperiodic:
      check_elements(a, rep, "aperiodic", [&](int x) {
        return a.pow(x, a.size()) == a.pow(x, a.size() + 1);
      });
      break;
    case IdentityKind::JTrivial:
      check_pairs(a, rep, "swap-power", [&](int x, int y) {
        return a.idem_power(a.mul(x, y)) == a.idem_power(a.mul(y, x));
      });
      check_elements(a, rep, "power-absorb", [&](int x) {
        return a.mul(x, a.idem_power(x)) == a.idem_power(x);
      });
      break;
    case IdentityKind::ShuffleTrivial:
      check_pairs(a, rep, "commutative",
                  [&](int x, int y) { return a.mul(x, y) == a.mul(y, x); });
      check_elements(a, rep, "idempotent",
                     [&](int x) { return a.mul(x, x) == x; });
      check_shuffle_vs_product(a, rep, "shuffle-is-product",
                               [](int prod) { return prod; });
      break;
    case IdentityKind::ShufflePowerTrivial:
      check_pairs(a, rep, "swap-power", [&](int x, int y) {
        return a.idem_power(a.mul(x, y)) == a.idem_power(a.mul(y, x));
      });
      check_elements(a, rep, "power-absorb", [&](int x) {
        return a.mul(x, a.idem_power(x)) == a.idem_power(x);
      });
      check_shuffle_vs_product(a, rep, "shuffle-is-power",
                               [&](int prod) { return a.idem_power(prod); });
      break;
    case IdentityKind::GapInsensitive: {
      PropertyCheck c;
      c.name = "gap-insensitive(" + std::to_string(id.level) + ")";
      for (int e : a.iterated_idempotents(id.level)) {
        if (a.mul(a.omega(e), a.omegastar(e)) != e) {
          c.passed = false;
          c.witness = {a.name_of(e)};
          break;
        }
      }
      rep.checks.push_back(std::move(c));
      break;
    }
  }
  return rep;
}

}  // namespace clo
