#include "clo/constructions.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace clo {

int product_pair(const Algebra& right, int x, int y) {
  return x * right.size() + y;
}
int product_first(const Algebra& right, int element) {
  return element / right.size();
}
int product_second(const Algebra& right, int element) {
  return element % right.size();
}

Algebra direct_product(const Algebra& a, const Algebra& b) {
  const int na = a.size(), nb = b.size();
  const int n = na * nb;
  std::vector<std::string> names(n);
  std::vector<int> product(static_cast<std::size_t>(n) * n), omega(n),
      omegastar(n);
  for (int x = 0; x < na; ++x)
    for (int y = 0; y < nb; ++y) {
      int e = product_pair(b, x, y);
      names[e] = "(" + a.name_of(x) + "," + b.name_of(y) + ")";
      omega[e] = product_pair(b, a.omega(x), b.omega(y));
      omegastar[e] = product_pair(b, a.omegastar(x), b.omegastar(y));
    }
  for (int e = 0; e < n; ++e)
    for (int f = 0; f < n; ++f)
      product[e * n + f] = product_pair(
          b, a.mul(product_first(b, e), product_first(b, f)),
          b.mul(product_second(b, e), product_second(b, f)));

  // kappa acts on the two projections independently
  ShuffleTable shuffle = ShuffleTable::with_rule(
      [a, b](const Algebra& self, const Subset& s) -> std::optional<int> {
        (void)self;
        Subset sa, sb;
        for (int e : s) {
          sa.push_back(product_first(b, e));
          sb.push_back(product_second(b, e));
        }
        auto va = a.try_shuffle(sorted_unique(std::move(sa)));
        auto vb = b.try_shuffle(sorted_unique(std::move(sb)));
        if (!va || !vb) return std::nullopt;
        return product_pair(b, *va, *vb);
      });
  return Algebra::make("(" + a.label() + " x " + b.label() + ")",
                       std::move(names), product_pair(b, a.unit(), b.unit()),
                       std::move(product), std::move(omega),
                       std::move(omegastar), std::move(shuffle));
}

namespace {

// Closes `current` under all shuffle values the parent table defines on its
// subsets; returns the set of new elements.
std::vector<int> shuffle_closure_step(const Algebra& parent,
                                      const std::set<int>& current) {
  std::vector<int> found;
  auto consider = [&](int v) {
    if (!current.count(v)) found.push_back(v);
  };
  const ShuffleTable& table = parent.shuffle_table();
  Subset nonunit;
  for (int x : current)
    if (x != parent.unit()) nonunit.push_back(x);

  for (const auto& [key, value] : table.entries()) {
    bool inside = std::includes(nonunit.begin(), nonunit.end(), key.begin(),
                                key.end());
    if (inside) consider(value);
  }
  if (table.default_value()) {
    // the default is hit by some subset as soon as not every subset of the
    // current carrier has an explicit entry
    std::size_t inside_entries = 0;
    for (const auto& [key, value] : table.entries())
      if (std::includes(nonunit.begin(), nonunit.end(), key.begin(), key.end()))
        ++inside_entries;
    bool default_reached =
        !nonunit.empty() &&
        (nonunit.size() >= 20 ||
         ((std::size_t{1} << nonunit.size()) - 1) > inside_entries);
    if (default_reached) consider(*table.default_value());
  }
  if (table.has_rule()) {
    if (nonunit.size() > 20)
      throw BudgetError("shuffle closure over " + parent.label(),
                        nonunit.size());
    const std::uint32_t limit = 1u << nonunit.size();
    Subset s;
    for (std::uint32_t mask = 1; mask < limit; ++mask) {
      s.clear();
      for (std::size_t i = 0; i < nonunit.size(); ++i)
        if (mask & (1u << i)) s.push_back(nonunit[i]);
      if (auto v = parent.try_shuffle(s)) consider(*v);
    }
  }
  return sorted_unique(std::move(found));
}

}  // namespace

Algebra generated_subalgebra(const Algebra& a, const Subset& gens) {
  std::set<int> closure;
  std::vector<int> queue;
  auto add = [&](int x) {
    if (closure.insert(x).second) queue.push_back(x);
  };
  add(a.unit());
  for (int g : gens) {
    if (g < 0 || g >= a.size()) throw Error("generator index out of range");
    add(g);
  }
  for (;;) {
    while (!queue.empty()) {
      if (closure.size() > budget())
        throw BudgetError("generated subalgebra of " + a.label(),
                          closure.size());
      int x = queue.back();
      queue.pop_back();
      add(a.omega(x));
      add(a.omegastar(x));
      std::vector<int> snapshot(closure.begin(), closure.end());
      for (int y : snapshot) {
        add(a.mul(x, y));
        add(a.mul(y, x));
      }
    }
    auto extra = shuffle_closure_step(a, closure);
    if (extra.empty()) break;
    for (int v : extra) add(v);
  }

  std::vector<int> elements(closure.begin(), closure.end());
  const int n = static_cast<int>(elements.size());
  std::vector<int> to_sub(a.size(), -1);
  for (int i = 0; i < n; ++i) to_sub[elements[i]] = i;

  std::vector<std::string> names(n);
  std::vector<int> product(static_cast<std::size_t>(n) * n), omega(n),
      omegastar(n);
  for (int i = 0; i < n; ++i) {
    names[i] = a.name_of(elements[i]);
    omega[i] = to_sub[a.omega(elements[i])];
    omegastar[i] = to_sub[a.omegastar(elements[i])];
    for (int j = 0; j < n; ++j)
      product[i * n + j] = to_sub[a.mul(elements[i], elements[j])];
  }
  ShuffleTable shuffle = ShuffleTable::with_rule(
      [a, elements, to_sub](const Algebra& self,
                            const Subset& s) -> std::optional<int> {
        (void)self;
        Subset parent_subset;
        for (int i : s) parent_subset.push_back(elements[i]);
        auto v = a.try_shuffle(parent_subset);
        if (!v || to_sub[*v] < 0) return std::nullopt;
        return to_sub[*v];
      });
  return Algebra::make(a.label() + "-sub", std::move(names),
                       to_sub[a.unit()], std::move(product), std::move(omega),
                       std::move(omegastar), std::move(shuffle));
}

// --- block products ------------------------------------------------------

namespace {

// Pair arithmetic for M x N^(MxM) with the prefix/suffix context actions.
struct BlockOps {
  const Algebra& m;
  const Algebra& n;
  int dim;  // |M|

  int fidx(int x, int y) const { return x * dim + y; }

  BlockPair unit() const {
    return {m.unit(),
            std::vector<int>(static_cast<std::size_t>(dim) * dim, n.unit())};
  }

  BlockPair mul(const BlockPair& p, const BlockPair& q) const {
    BlockPair out;
    out.m = m.mul(p.m, q.m);
    out.f.resize(p.f.size());
    for (int x = 0; x < dim; ++x)
      for (int y = 0; y < dim; ++y)
        out.f[fidx(x, y)] = n.mul(p.f[fidx(x, m.mul(q.m, y))],
                                  q.f[fidx(m.mul(x, p.m), y)]);
    return out;
  }

  BlockPair idem(const BlockPair& p) const {
    BlockPair cur = p;
    for (std::size_t k = 1; k <= budget(); ++k) {
      if (mul(cur, cur) == cur) return cur;
      cur = mul(cur, p);
    }
    throw BudgetError("idempotent power in block product", budget());
  }

  // omega on an arbitrary pair goes through its idempotent power
  BlockPair omega(const BlockPair& p) const {
    BlockPair q = idem(p);
    int e = q.m;
    int we = m.omega(e);
    BlockPair out;
    out.m = we;
    out.f.resize(q.f.size());
    for (int x = 0; x < dim; ++x)
      for (int y = 0; y < dim; ++y) {
        int tail = m.mul(we, y);
        out.f[fidx(x, y)] = n.mul(q.f[fidx(x, tail)],
                                  n.omega(q.f[fidx(m.mul(x, e), tail)]));
      }
    return out;
  }

  BlockPair omegastar(const BlockPair& p) const {
    BlockPair q = idem(p);
    int e = q.m;
    int wse = m.omegastar(e);
    BlockPair out;
    out.m = wse;
    out.f.resize(q.f.size());
    for (int x = 0; x < dim; ++x)
      for (int y = 0; y < dim; ++y) {
        int head = m.mul(x, wse);
        out.f[fidx(x, y)] = n.mul(n.omegastar(q.f[fidx(head, m.mul(e, y))]),
                                  q.f[fidx(head, y)]);
      }
    return out;
  }
};

constexpr int kMaxMaterializedCarrier = 4096;

BlockProduct assemble_block_product(const Algebra& m, const Algebra& n,
                                    std::vector<BlockPair> pairs,
                                    const std::map<BlockPair, int>& index) {
  BlockOps ops{m, n, m.size()};
  const int count = static_cast<int>(pairs.size());
  if (count > kMaxMaterializedCarrier)
    throw BudgetError("block product carrier " + m.label() + " [] " +
                          n.label(),
                      pairs.size());
  auto find = [&](const BlockPair& p) {
    auto it = index.find(p);
    if (it == index.end())
      throw Error("block product closure is not closed; internal error");
    return it->second;
  };

  std::vector<std::string> names(count);
  std::vector<int> product(static_cast<std::size_t>(count) * count),
      omega(count), omegastar(count);
  for (int i = 0; i < count; ++i) {
    std::string fs;
    for (std::size_t k = 0; k < pairs[i].f.size(); ++k) {
      if (k) fs += ",";
      fs += n.name_of(pairs[i].f[k]);
    }
    names[i] = "(" + m.name_of(pairs[i].m) + "|" + fs + ")";
    omega[i] = find(ops.omega(pairs[i]));
    omegastar[i] = find(ops.omegastar(pairs[i]));
  }
  for (int i = 0; i < count; ++i)
    for (int j = 0; j < count; ++j)
      product[i * count + j] = find(ops.mul(pairs[i], pairs[j]));

  // only self-consistent singleton entries are known; the rest is undefined
  ShuffleTable table;
  for (int i = 0; i < count; ++i) {
    if (product[i * count + i] == i && omega[i] == i && omegastar[i] == i)
      table.add_entry({i}, i);
  }

  BlockProduct bp;
  bp.left = m;
  bp.right = n;
  bp.pairs = std::move(pairs);
  bp.algebra = Algebra::make(
      m.label() + " [] " + n.label(), std::move(names), find(ops.unit()),
      std::move(product), std::move(omega), std::move(omegastar),
      std::move(table));
  return bp;
}

}  // namespace

std::optional<int> BlockProduct::find_pair(const BlockPair& p) const {
  for (std::size_t i = 0; i < pairs.size(); ++i)
    if (pairs[i] == p) return static_cast<int>(i);
  return std::nullopt;
}

BlockProduct block_product(const Algebra& m, const Algebra& n) {
  const int dim = m.size();
  double full = m.size();
  for (int i = 0; i < dim * dim; ++i) {
    full *= n.size();
    if (full > kMaxMaterializedCarrier)
      throw BudgetError("full block product carrier", static_cast<std::size_t>(
                                                          full));
  }
  std::vector<BlockPair> pairs;
  std::map<BlockPair, int> index;
  std::vector<int> f(static_cast<std::size_t>(dim) * dim, 0);
  for (;;) {
    for (int x = 0; x < m.size(); ++x) {
      BlockPair p{x, f};
      index.emplace(p, static_cast<int>(pairs.size()));
      pairs.push_back(std::move(p));
    }
    // advance the function like a mixed-radix counter
    std::size_t pos = 0;
    while (pos < f.size() && ++f[pos] == n.size()) f[pos++] = 0;
    if (pos == f.size()) break;
  }
  // re-sort for deterministic, order-independent numbering
  std::sort(pairs.begin(), pairs.end());
  index.clear();
  for (std::size_t i = 0; i < pairs.size(); ++i)
    index.emplace(pairs[i], static_cast<int>(i));
  return assemble_block_product(m, n, std::move(pairs), index);
}

BlockProduct block_product_generated(const Algebra& m, const Algebra& n,
                                     const std::vector<BlockPair>& gens) {
  BlockOps ops{m, n, m.size()};
  std::map<BlockPair, int> index;
  std::vector<BlockPair> pairs;
  std::vector<int> queue;
  auto add = [&](const BlockPair& p) {
    if (p.m < 0 || p.m >= m.size() ||
        p.f.size() != static_cast<std::size_t>(m.size()) * m.size())
      throw Error("malformed block product generator");
    auto [it, fresh] = index.emplace(p, static_cast<int>(pairs.size()));
    if (fresh) {
      pairs.push_back(it->first);
      queue.push_back(it->second);
    }
  };
  add(ops.unit());
  for (const auto& g : gens) add(g);
  while (!queue.empty()) {
    if (pairs.size() > static_cast<std::size_t>(kMaxMaterializedCarrier))
      throw BudgetError("generated block product " + m.label() + " [] " +
                            n.label(),
                        pairs.size());
    int i = queue.back();
    queue.pop_back();
    BlockPair p = pairs[i];
    add(ops.omega(p));
    add(ops.omegastar(p));
    std::size_t snapshot = pairs.size();
    for (std::size_t j = 0; j < snapshot; ++j) {
      add(ops.mul(p, pairs[j]));
      add(ops.mul(pairs[j], p));
    }
  }
  // renumber in canonical order so equal closures yield equal algebras
  std::sort(pairs.begin(), pairs.end());
  index.clear();
  for (std::size_t i = 0; i < pairs.size(); ++i)
    index.emplace(pairs[i], static_cast<int>(i));
  return assemble_block_product(m, n, std::move(pairs), index);
}

std::vector<BlockPair> random_block_generators(const Algebra& m,
                                               const Algebra& n, int count,
                                               std::mt19937& rng) {
  std::uniform_int_distribution<int> pick_m(0, m.size() - 1);
  std::uniform_int_distribution<int> pick_n(0, n.size() - 1);
  std::uniform_int_distribution<int> coin(0, 1);
  std::vector<BlockPair> gens;
  for (int i = 0; i < count; ++i) {
    BlockPair p;
    p.m = pick_m(rng);
    p.f.resize(static_cast<std::size_t>(m.size()) * m.size());
    for (auto& v : p.f) v = coin(rng) ? n.unit() : pick_n(rng);
    gens.push_back(std::move(p));
  }
  return gens;
}

// --- syntactic quotient ---------------------------------------------------

namespace {

// Signature-based partition refinement. Signatures cover two-sided product
// contexts, both powers, and kappa under single-element replacement.
std::vector<int> refine_congruence(const Algebra& a,
                                   const std::vector<int>& seed) {
  const int n = a.size();
  if (n > 16)
    throw BudgetError("syntactic congruence over " + a.label(), n);
  std::vector<int> block = seed;
  for (;;) {
    std::map<std::vector<int>, int> fresh;
    std::vector<int> next(n);
    for (int x = 0; x < n; ++x) {
      std::vector<int> sig;
      sig.push_back(block[x]);
      for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
          sig.push_back(block[a.mul(a.mul(u, x), v)]);
      sig.push_back(block[a.omega(x)]);
      sig.push_back(block[a.omegastar(x)]);
      const std::uint32_t limit = 1u << n;
      for (std::uint32_t mask = 0; mask < limit; ++mask) {
        Subset s;
        for (int i = 0; i < n; ++i)
          if (mask & (1u << i)) s.push_back(i);
        s.push_back(x);
        auto v = a.try_shuffle(sorted_unique(std::move(s)));
        sig.push_back(v ? block[*v] : -2);
      }
      auto [it, inserted] = fresh.emplace(std::move(sig),
                                          static_cast<int>(fresh.size()));
      next[x] = it->second;
    }
    if (next == block) return block;
    block = std::move(next);
  }
}

}  // namespace

SyntacticQuotient syntactic_quotient(const Recognizer& r) {
  const Algebra& target = r.h.target;
  Subset gens;
  for (const auto& [letter, image] : r.h.letters) gens.push_back(image);
  Algebra sub = generated_subalgebra(target, sorted_unique(std::move(gens)));

  std::vector<bool> accepting(sub.size(), false);
  for (int i = 0; i < sub.size(); ++i) {
    int parent = target.require_index(sub.name_of(i));
    accepting[i] = r.accepts_element(parent);
  }
  std::vector<int> seed(sub.size());
  for (int i = 0; i < sub.size(); ++i) seed[i] = accepting[i] ? 1 : 0;
  std::vector<int> block = refine_congruence(sub, seed);

  // renumber classes by their least member for stable output
  int class_count = *std::max_element(block.begin(), block.end()) + 1;
  std::vector<int> representative(class_count, -1);
  for (int i = 0; i < sub.size(); ++i)
    if (representative[block[i]] < 0) representative[block[i]] = i;
  std::vector<int> order(class_count);
  for (int c = 0; c < class_count; ++c) order[c] = c;
  std::sort(order.begin(), order.end(), [&](int c1, int c2) {
    return representative[c1] < representative[c2];
  });
  std::vector<int> renumber(class_count);
  for (int k = 0; k < class_count; ++k) renumber[order[k]] = k;
  std::vector<int> class_of(sub.size());
  for (int i = 0; i < sub.size(); ++i) class_of[i] = renumber[block[i]];
  std::vector<int> rep(class_count);
  for (int i = sub.size() - 1; i >= 0; --i) rep[class_of[i]] = i;

  std::vector<std::string> names(class_count);
  std::vector<int> product(static_cast<std::size_t>(class_count) * class_count),
      omega(class_count), omegastar(class_count);
  for (int c = 0; c < class_count; ++c) {
    names[c] = "[" + sub.name_of(rep[c]) + "]";
    omega[c] = class_of[sub.omega(rep[c])];
    omegastar[c] = class_of[sub.omegastar(rep[c])];
    for (int d = 0; d < class_count; ++d)
      product[c * class_count + d] = class_of[sub.mul(rep[c], rep[d])];
  }
  ShuffleTable shuffle = ShuffleTable::with_rule(
      [sub, class_of](const Algebra& self,
                      const Subset& s) -> std::optional<int> {
        (void)self;
        // union of the full classes is a canonical representative set
        Subset members;
        for (int i = 0; i < static_cast<int>(class_of.size()); ++i)
          if (std::binary_search(s.begin(), s.end(), class_of[i]))
            members.push_back(i);
        auto v = sub.try_shuffle(members);
        if (!v) return std::nullopt;
        return class_of[*v];
      });
  SyntacticQuotient out;
  out.restricted = sub;
  out.class_of = class_of;
  out.quotient = Algebra::make(
      target.label() + "-syn", std::move(names), class_of[sub.unit()],
      std::move(product), std::move(omega), std::move(omegastar),
      std::move(shuffle));
  Morphism h;
  h.target = out.quotient;
  for (const auto& [letter, image] : r.h.letters)
    h.letters[letter] = class_of[sub.require_index(target.name_of(image))];
  std::vector<int> acc;
  for (int c = 0; c < class_count; ++c)
    if (accepting[rep[c]]) acc.push_back(c);
  out.recognizer = Recognizer{std::move(h), std::move(acc)};
  return out;
}

// --- division -------------------------------------------------------------

namespace {

struct MorphismSearch {
  const Algebra& sub;   // candidate subalgebra of the divisor (own indices)
  const Algebra& image; // the algebra we try to map onto
  std::vector<int> assign;
  std::vector<int> used_count;
  std::size_t nodes = 0;
  std::size_t node_limit;

  MorphismSearch(const Algebra& s, const Algebra& a)
      : sub(s), image(a), assign(s.size(), -1), used_count(a.size(), 0),
        node_limit(budget() * 20) {}

  bool consistent(int just) const {
    for (int x = 0; x < sub.size(); ++x) {
      if (assign[x] < 0) continue;
      for (int y : {just}) {
        int xy = sub.mul(x, y), yx = sub.mul(y, x);
        if (assign[xy] >= 0 &&
            assign[xy] != image.mul(assign[x], assign[y]))
          return false;
        if (assign[yx] >= 0 &&
            assign[yx] != image.mul(assign[y], assign[x]))
          return false;
      }
    }
    int w = sub.omega(just), ws = sub.omegastar(just);
    if (assign[w] >= 0 && assign[w] != image.omega(assign[just])) return false;
    if (assign[ws] >= 0 && assign[ws] != image.omegastar(assign[just]))
      return false;
    // powers/products pointing INTO just
    for (int x = 0; x < sub.size(); ++x) {
      if (assign[x] < 0) continue;
      if (sub.omega(x) == just && assign[just] != image.omega(assign[x]))
        return false;
      if (sub.omegastar(x) == just &&
          assign[just] != image.omegastar(assign[x]))
        return false;
    }
    return true;
  }

  bool shuffles_preserved() {
    bool ok = true;
    try {
      for_each_nonunit_subset(sub, [&](const Subset& s) {
        if (!ok) return;
        auto v = sub.try_shuffle(s);
        if (!v) return;
        Subset mapped;
        for (int x : s) mapped.push_back(assign[x]);
        auto w = image.try_shuffle(sorted_unique(std::move(mapped)));
        if (!w || *w != assign[*v]) ok = false;
      });
    } catch (const BudgetError&) {
      throw;
    }
    return ok;
  }

  bool run(int pos) {
    if (++nodes > node_limit) throw BudgetError("division search", nodes);
    if (pos == sub.size()) return shuffles_preserved();
    // surjectivity pruning
    int missing = 0;
    for (int v = 0; v < image.size(); ++v)
      if (used_count[v] == 0) ++missing;
    if (sub.size() - pos < missing) return false;
    for (int v = 0; v < image.size(); ++v) {
      if (pos == sub.unit() && v != image.unit()) continue;
      if (pos != sub.unit() && v == image.unit()) {
        // unit preimages other than the unit are fine in general, but a
        // surjective morphism maps the unit to the unit already; allow
        // non-unit elements to hit the unit too.
      }
      assign[pos] = v;
      ++used_count[v];
      if (consistent(pos) && run(pos + 1)) return true;
      --used_count[v];
      assign[pos] = -1;
    }
    return false;
  }
};

}  // namespace

DivisionResult divides(const Algebra& a, const Algebra& b) {
  DivisionResult out;
  if (a.size() > b.size()) {
    out.decision = Decision::No;
    return out;
  }
  if (b.size() > 12) {
    out.decision = Decision::Unknown;
    return out;
  }
  // distinct generated subalgebras of b, smallest first
  std::set<Subset> carriers;
  const std::uint32_t limit = 1u << b.size();
  for (std::uint32_t mask = 0; mask < limit; ++mask) {
    Subset gens;
    for (int i = 0; i < b.size(); ++i)
      if (mask & (1u << i)) gens.push_back(i);
    Algebra sub = generated_subalgebra(b, gens);
    Subset carrier;
    for (int i = 0; i < sub.size(); ++i)
      carrier.push_back(b.require_index(sub.name_of(i)));
    carriers.insert(sorted_unique(std::move(carrier)));
  }
  std::vector<Subset> ordered(carriers.begin(), carriers.end());
  std::sort(ordered.begin(), ordered.end(), [](const Subset& x, const Subset& y) {
    return x.size() != y.size() ? x.size() < y.size() : x < y;
  });
  try {
    for (const auto& carrier : ordered) {
      if (static_cast<int>(carrier.size()) < a.size()) continue;
      Algebra sub = generated_subalgebra(b, carrier);
      MorphismSearch search(sub, a);
      if (search.run(0)) {
        DivisionWitness w;
        for (int i = 0; i < sub.size(); ++i)
          w.subalgebra.push_back(b.require_index(sub.name_of(i)));
        w.mapping = search.assign;
        out.decision = Decision::Yes;
        out.witness = std::move(w);
        return out;
      }
    }
  } catch (const BudgetError&) {
    out.decision = Decision::Unknown;
    return out;
  }
  out.decision = Decision::No;
  return out;
}

bool is_isomorphic(const Algebra& a, const Algebra& b) {
  if (a.size() != b.size()) return false;
  struct Search {
    const Algebra& a;
    const Algebra& b;
    std::vector<int> map;
    std::vector<bool> used;

    bool consistent(int just) const {
      for (int x = 0; x < a.size(); ++x) {
        if (map[x] < 0) continue;
        int xy = a.mul(x, just), yx = a.mul(just, x);
        if (map[xy] >= 0 && map[xy] != b.mul(map[x], map[just])) return false;
        if (map[yx] >= 0 && map[yx] != b.mul(map[just], map[x])) return false;
        if (a.omega(x) == just && map[just] != b.omega(map[x])) return false;
        if (a.omegastar(x) == just && map[just] != b.omegastar(map[x]))
          return false;
      }
      int w = a.omega(just), ws = a.omegastar(just);
      if (map[w] >= 0 && map[w] != b.omega(map[just])) return false;
      if (map[ws] >= 0 && map[ws] != b.omegastar(map[just])) return false;
      return true;
    }

    bool shuffles_match() {
      bool ok = true;
      for_each_nonunit_subset(a, [&](const Subset& s) {
        if (!ok) return;
        Subset mapped;
        for (int x : s) mapped.push_back(map[x]);
        auto va = a.try_shuffle(s);
        auto vb = b.try_shuffle(sorted_unique(std::move(mapped)));
        if (va.has_value() != vb.has_value()) { ok = false; return; }
        if (va && map[*va] != *vb) ok = false;
      });
      return ok;
    }

    bool run(int pos) {
      if (pos == a.size()) return shuffles_match();
      for (int v = 0; v < b.size(); ++v) {
        if (used[v]) continue;
        if ((pos == a.unit()) != (v == b.unit())) continue;
        map[pos] = v;
        used[v] = true;
        if (consistent(pos) && run(pos + 1)) return true;
        used[v] = false;
        map[pos] = -1;
      }
      return false;
    }
  };
  Search s{a, b, std::vector<int>(a.size(), -1),
           std::vector<bool>(b.size(), false)};
  return s.run(0);
}

// --- builtin catalogue ----------------------------------------------------

namespace {

Algebra make_chain(const std::string& label, int n, bool omega_steps,
                   bool omegastar_steps) {
  // carrier: unit "e" then chain levels 0..n; the product is max
  std::vector<std::string> names{"e"};
  for (int i = 0; i <= n; ++i) names.push_back(std::to_string(i));
  const int size = n + 2;
  std::vector<int> product(static_cast<std::size_t>(size) * size), omega(size),
      omegastar(size);
  for (int x = 0; x < size; ++x)
    for (int y = 0; y < size; ++y) product[x * size + y] = std::max(x, y);
  omega[0] = omegastar[0] = 0;
  for (int x = 1; x < size; ++x) {
    int step = std::min(x + 1, size - 1);
    omega[x] = omega_steps ? step : x;
    omegastar[x] = omegastar_steps ? step : x;
  }
  return Algebra::make(label, std::move(names), 0, std::move(product),
                       std::move(omega), std::move(omegastar),
                       ShuffleTable::constant(size - 1));
}

}  // namespace

Algebra builtin(const std::string& spec) {
  std::string name = spec;
  int param = -1;
  if (auto colon = spec.find(':'); colon != std::string::npos) {
    name = spec.substr(0, colon);
    try {
      param = std::stoi(spec.substr(colon + 1));
    } catch (const std::exception&) {
      throw Error("bad builtin parameter in '" + spec + "'");
    }
    if (param < 0) throw Error("builtin parameter must be >= 0");
  }

  if (name == "u1") {
    return Algebra::make("u1", {"1", "0"}, 0, {0, 1, 1, 1}, {0, 1}, {0, 1},
                         ShuffleTable::constant(1));
  }
  if (name == "gap") {
    // end-point types: lr = both ends, l = left end only, r = right end
    // only, o = open on both sides, g = has an interior gap
    const std::vector<std::string> names{"1", "lr", "l", "r", "o", "g"};
    enum { U, LR, L, R, O, G };
    std::vector<int> p(36);
    auto set = [&](int x, int y, int v) { p[x * 6 + y] = v; };
    for (int x = 0; x < 6; ++x) {
      set(U, x, x);
      set(x, U, x);
    }
    const int table[5][5] = {
        // lr   l    r    o    g
        {LR, L, LR, L, G},   // lr .
        {LR, L, G, G, G},    // l  .
        {R, O, R, O, G},     // r  .
        {R, O, G, G, G},     // o  .
        {G, G, G, G, G},     // g  .
    };
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) set(LR + i, LR + j, table[i][j]);
    std::vector<int> omega{U, L, L, O, G, G};
    std::vector<int> omegastar{U, R, O, R, G, G};
    return Algebra::make("gap", names, U, std::move(p), std::move(omega),
                         std::move(omegastar), ShuffleTable::constant(G));
  }
  if (name == "delta" || name == "omega_chain" || name == "omegastar_chain") {
    if (param < 0)
      throw Error("builtin '" + name + "' needs a parameter, e.g. " + name +
                  ":2");
    if (name == "delta")
      return make_chain("delta:" + std::to_string(param), param, true, true);
    if (name == "omega_chain")
      return make_chain("omega_chain:" + std::to_string(param), param, true,
                        false);
    return make_chain("omegastar_chain:" + std::to_string(param), param,
                      false, true);
  }
  throw Error("unknown builtin '" + spec + "'");
}

// --- subword quotient -----------------------------------------------------

namespace {

std::string word_to_string(const Word& w) {
  if (w.empty()) return "eps";
  bool single = std::all_of(w.begin(), w.end(),
                            [](const std::string& s) { return s.size() == 1; });
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i && !single) out += ",";
    out += w[i];
  }
  return out;
}

}  // namespace

Morphism SnAlgebra::letter_morphism() const {
  Morphism h;
  h.target = algebra;
  for (const auto& a : alphabet) {
    WordSet c = word_class({a}, bound);
    auto idx = class_index(c);
    if (!idx) throw Error("letter class missing from subword quotient");
    h.letters[a] = *idx;
  }
  return h;
}

std::optional<int> SnAlgebra::class_index(const WordSet& c) const {
  for (std::size_t i = 0; i < classes.size(); ++i)
    if (classes[i] == c) return static_cast<int>(i);
  return std::nullopt;
}

SnAlgebra build_sn(const std::vector<std::string>& alphabet, int n) {
  if (n < 0) throw Error("subword bound must be >= 0");
  std::map<WordSet, int> index;
  std::vector<WordSet> classes;
  std::vector<Word> witnesses;
  std::vector<int> queue;
  auto add = [&](const WordSet& c, const Word& witness) {
    auto [it, fresh] = index.emplace(c, static_cast<int>(classes.size()));
    if (fresh) {
      classes.push_back(it->first);
      witnesses.push_back(witness);
      queue.push_back(it->second);
    }
    return it->second;
  };

  add(WordSet{Word{}}, Word{});
  for (const auto& a : alphabet) add(word_class({a}, n), Word{a});

  auto concat_words = [](const Word& u, const Word& v) {
    Word w = u;
    w.insert(w.end(), v.begin(), v.end());
    return w;
  };
  auto repeat_word = [&](const Word& u, int k) {
    Word w;
    for (int i = 0; i < k; ++i) w.insert(w.end(), u.begin(), u.end());
    return w;
  };

  while (!queue.empty()) {
    if (classes.size() > budget())
      throw BudgetError("subword quotient closure", classes.size());
    int i = queue.back();
    queue.pop_back();
    WordSet ci = classes[i];
    Word wi = witnesses[i];
    add(class_nfold(ci, n, n), repeat_word(wi, n));
    std::size_t snapshot = classes.size();
    for (std::size_t j = 0; j < snapshot; ++j) {
      add(class_concat(ci, classes[j], n), concat_words(wi, witnesses[j]));
      add(class_concat(classes[j], ci, n), concat_words(witnesses[j], wi));
    }
  }

  const int count = static_cast<int>(classes.size());
  std::vector<std::string> names(count);
  std::vector<int> product(static_cast<std::size_t>(count) * count),
      omega(count), omegastar(count);
  for (int i = 0; i < count; ++i) {
    names[i] = "[" + word_to_string(witnesses[i]) + "]";
    int rep = index.at(class_nfold(classes[i], n, n));
    omega[i] = rep;
    omegastar[i] = rep;
    for (int j = 0; j < count; ++j)
      product[i * count + j] = index.at(class_concat(classes[i], classes[j], n));
  }
  SnAlgebra out;
  out.bound = n;
  out.alphabet = alphabet;
  out.classes = classes;
  out.witnesses = witnesses;
  std::string sigma;
  for (const auto& a : alphabet) sigma += a;
  out.algebra = Algebra::make(
      "s" + std::to_string(n) + "(" + sigma + ")", std::move(names),
      index.at(WordSet{Word{}}), std::move(product), std::move(omega),
      std::move(omegastar), ShuffleTable::power_of_product(n));
  return out;
}

}  // namespace clo
