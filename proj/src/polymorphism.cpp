#include "polycsp/polymorphism.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <bit>
#include <numeric>
#include <set>

#include "polycsp/errors.hpp"

namespace polycsp {

namespace {

/// Fast membership for one relation table.
class TableIndex {
 public:
  TableIndex(const Table& t, int d, int k) : table_(t), d_(d), k_(k) {
    std::size_t size = 1;
    bool small = true;
    for (int i = 0; i < k && small; ++i) {
      size *= static_cast<std::size_t>(d);
      small = size <= (std::size_t{1} << 26);
    }
    if (small) {
      bits_.assign(size, 0);
      for (const auto& x : t) bits_[encode_tuple(x, d)] = 1;
    }
  }
  bool contains(const int* x) const {
    if (!bits_.empty()) {
      std::size_t c = 0;
      for (int i = 0; i < k_; ++i) c = c * d_ + x[i];
      return bits_[c];
    }
    Tuple t(x, x + k_);
    return std::binary_search(table_.begin(), table_.end(), t);
  }

 private:
  const Table& table_;
  int d_, k_;
  std::vector<char> bits_;
};

/// Applies op to the row selection encoded by `sel` (mixed radix over |R|).
/// Returns true when the image is in R.
bool selection_ok(const Operation& op, const Table& r, const TableIndex& idx, int k,
                  std::size_t sel, std::vector<std::size_t>& pick, std::vector<int>& img) {
  int n = op.arity;
  for (int row = n - 1; row >= 0; --row) {
    pick[row] = sel % r.size();
    sel /= r.size();
  }
  for (int col = 0; col < k; ++col) {
    std::size_t code = 0;
    for (int row = 0; row < n; ++row) code = code * op.domain_size + r[pick[row]][col];
    img[col] = op.table[code];
  }
  return idx.contains(img.data());
}

std::size_t selection_count(std::size_t rows, int n) {
  std::size_t c = 1;
  for (int i = 0; i < n; ++i) {
    if (rows != 0 && c > std::numeric_limits<std::size_t>::max() / rows)
      throw CapExceeded("row_selections", std::numeric_limits<std::size_t>::max(), 0);
    c *= rows;
  }
  return c;
}

void require_domain(const Operation& op, const Structure& s) {
  if (op.domain_size != s.domain_size)
    throw InvalidInput("operation and structure have different domains");
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

std::size_t symbol_index(const IdentitySystem& ids, const std::string& name) {
  for (std::size_t i = 0; i < ids.symbols.size(); ++i)
    if (ids.symbols[i].name == name) return i;
  throw InvalidInput("undeclared function symbol " + name);
}

/// Calls fn(code_lhs, code_rhs) for every assignment of the abstract
/// variables of an equation.
template <class Fn>
void for_each_instance(const std::pair<FlatTerm, FlatTerm>& eq, int d, Fn fn) {
  std::vector<std::string> names;
  for (const auto* t : {&eq.first, &eq.second})
    for (const auto& a : t->args)
      if (std::find(names.begin(), names.end(), a) == names.end()) names.push_back(a);
  auto positions = [&](const FlatTerm& t) {
    std::vector<int> p;
    for (const auto& a : t.args)
      p.push_back(static_cast<int>(std::find(names.begin(), names.end(), a) - names.begin()));
    return p;
  };
  auto pl = positions(eq.first), pr = positions(eq.second);
  std::size_t total = 1;
  for (std::size_t i = 0; i < names.size(); ++i) total *= d;
  for (std::size_t c = 0; c < total; ++c) {
    Tuple val = decode_tuple(c, d, static_cast<int>(names.size()));
    std::size_t cl = 0, cr = 0;
    for (int p : pl) cl = cl * d + val[p];
    for (int p : pr) cr = cr * d + val[p];
    fn(cl, cr);
  }
}

}  // namespace

bool preserves_serial(const Operation& op, const Structure& s) {
  require_domain(op, s);
  std::vector<std::size_t> pick(op.arity);
  for (std::size_t r = 0; r < s.tables.size(); ++r) {
    int k = s.signature.relations[r].arity;
    TableIndex idx(s.tables[r], s.domain_size, k);
    std::vector<int> img(k);
    std::size_t count = selection_count(s.tables[r].size(), op.arity);
    for (std::size_t c = 0; c < count; ++c)
      if (!selection_ok(op, s.tables[r], idx, k, c, pick, img)) return false;
  }
  return true;
}

bool preserves(const Operation& op, const Structure& s) {
  require_domain(op, s);
  for (std::size_t r = 0; r < s.tables.size(); ++r) {
    int k = s.signature.relations[r].arity;
    TableIndex idx(s.tables[r], s.domain_size, k);
    std::size_t count = selection_count(s.tables[r].size(), op.arity);
    std::atomic<bool> ok{true};
    const long long n = static_cast<long long>(count);
#pragma omp parallel
    {
      std::vector<std::size_t> pick(op.arity);
      std::vector<int> img(k);
#pragma omp for schedule(static)
      for (long long c = 0; c < n; ++c) {
        if (!ok.load(std::memory_order_relaxed)) continue;
        if (!selection_ok(op, s.tables[r], idx, k, static_cast<std::size_t>(c), pick, img))
          ok.store(false, std::memory_order_relaxed);
      }
    }
    if (!ok) return false;
  }
  return true;
}

std::optional<PreservationFailure> preservation_failure(const Operation& op,
                                                        const Structure& s) {
  require_domain(op, s);
  std::vector<std::size_t> pick(op.arity);
  for (std::size_t r = 0; r < s.tables.size(); ++r) {
    int k = s.signature.relations[r].arity;
    TableIndex idx(s.tables[r], s.domain_size, k);
    std::vector<int> img(k);
    std::size_t count = selection_count(s.tables[r].size(), op.arity);
    for (std::size_t c = 0; c < count; ++c) {
      if (selection_ok(op, s.tables[r], idx, k, c, pick, img)) continue;
      PreservationFailure f{s.signature.relations[r].name, {}, img};
      for (auto p : pick) f.rows.push_back(s.tables[r][p]);
      return f;
    }
  }
  return std::nullopt;
}

void IdentitySystem::validate() const {
  std::set<std::string> names;
  for (const auto& s : symbols) {
    if (s.arity < 1) throw InvalidInput("symbol arity must be positive: " + s.name);
    if (!names.insert(s.name).second) throw InvalidInput("duplicate symbol " + s.name);
  }
  for (const auto& [l, r] : equations)
    for (const auto* t : {&l, &r}) {
      auto i = symbol_index(*this, t->symbol);
      if (static_cast<int>(t->args.size()) != symbols[i].arity)
        throw InvalidInput("arity mismatch in term over " + t->symbol);
    }
}

namespace identities {

IdentitySystem siggers() {
  return {{{"f", 4}}, {{{"f", {"r", "a", "r", "e"}}, {"f", {"a", "r", "e", "a"}}}}};
}

IdentitySystem wnu(int n) {
  if (n < 2) throw InvalidInput("WNU arity must be at least 2");
  IdentitySystem ids{{{"w", n}}, {}};
  auto term = [n](int pos) {
    FlatTerm t{"w", std::vector<std::string>(n, "x")};
    t.args[pos] = "y";
    return t;
  };
  for (int i = 0; i + 1 < n; ++i) ids.equations.push_back({term(i), term(i + 1)});
  return ids;
}

IdentitySystem cyclic(int p) {
  if (p < 1) throw InvalidInput("cyclic arity must be positive");
  IdentitySystem ids{{{"c", p}}, {}};
  if (p == 1) return ids;
  FlatTerm l{"c", {}}, r{"c", {}};
  for (int i = 0; i < p; ++i) {
    l.args.push_back("x" + std::to_string(i));
    r.args.push_back("x" + std::to_string((i + 1) % p));
  }
  ids.equations.push_back({l, r});
  return ids;
}

IdentitySystem none(const std::string& symbol, int arity) { return {{{symbol, arity}}, {}}; }

}  // namespace identities

Indicator indicator_instance(const Structure& s, const IdentitySystem& ids, const Caps& caps) {
  ids.validate();
  const int d = s.domain_size;
  Indicator ind;
  std::size_t raw = 0;
  for (const auto& sym : ids.symbols) {
    ind.offset.push_back(raw);
    raw += checked_pow(d, sym.arity, caps.indicator_variables, "indicator_variables");
    if (raw > caps.indicator_variables)
      throw CapExceeded("indicator_variables", raw, caps.indicator_variables);
  }
  std::size_t planned = 0;
  for (const auto& sym : ids.symbols)
    for (const auto& t : s.tables) {
      planned += checked_pow(t.size(), sym.arity, caps.indicator_constraints,
                             "indicator_constraints");
      if (planned > caps.indicator_constraints)
        throw CapExceeded("indicator_constraints", planned, caps.indicator_constraints);
    }

  UnionFind uf(raw);
  for (const auto& eq : ids.equations) {
    std::size_t ol = ind.offset[symbol_index(ids, eq.first.symbol)];
    std::size_t orr = ind.offset[symbol_index(ids, eq.second.symbol)];
    for_each_instance(eq, d, [&](std::size_t cl, std::size_t cr) {
      uf.unite(static_cast<int>(ol + cl), static_cast<int>(orr + cr));
    });
  }
  ind.class_of.assign(raw, -1);
  int classes = 0;
  for (std::size_t i = 0; i < raw; ++i) {
    int root = uf.find(static_cast<int>(i));
    if (ind.class_of[root] < 0) ind.class_of[root] = classes++;
    ind.class_of[i] = ind.class_of[root];
  }

  ind.instance = Instance(classes, s.signature);
  for (std::size_t si = 0; si < ids.symbols.size(); ++si) {
    int n = ids.symbols[si].arity;
    for (std::size_t r = 0; r < s.tables.size(); ++r) {
      const Table& rel = s.tables[r];
      int k = s.signature.relations[r].arity;
      Table& out = ind.instance.tables[r];
      if (rel.empty()) continue;
      std::vector<std::size_t> pick(n, 0);
      std::size_t count = selection_count(rel.size(), n);
      for (std::size_t c = 0; c < count; ++c) {
        Tuple t(k);
        for (int col = 0; col < k; ++col) {
          std::size_t code = 0;
          for (int row = 0; row < n; ++row) code = code * d + rel[pick[row]][col];
          t[col] = ind.class_of[ind.offset[si] + code];
        }
        out.push_back(std::move(t));
        for (int row = n - 1; row >= 0; --row) {
          if (++pick[row] < rel.size()) break;
          pick[row] = 0;
        }
      }
    }
  }
  ind.instance.canonicalize();
  return ind;
}

bool satisfies(const std::map<std::string, Operation>& ops, const IdentitySystem& ids) {
  for (const auto& eq : ids.equations) {
    const Operation& l = ops.at(eq.first.symbol);
    const Operation& r = ops.at(eq.second.symbol);
    bool ok = true;
    for_each_instance(eq, l.domain_size, [&](std::size_t cl, std::size_t cr) {
      ok = ok && l.table[cl] == r.table[cr];
    });
    if (!ok) return false;
  }
  return true;
}

std::optional<PolymorphismWitness> find_polymorphism(const Structure& s,
                                                     const IdentitySystem& ids,
                                                     const SearchOptions& opts) {
  Indicator ind = indicator_instance(s, ids, opts.caps);
  auto sol = find_homomorphism(ind.instance, s, {}, opts);
  if (!sol) return std::nullopt;
  PolymorphismWitness w;
  for (std::size_t si = 0; si < ids.symbols.size(); ++si) {
    const auto& sym = ids.symbols[si];
    Operation op{s.domain_size, sym.arity, {}};
    std::size_t size = checked_pow(s.domain_size, sym.arity, opts.caps.indicator_variables,
                                   "indicator_variables");
    op.table.resize(size);
    for (std::size_t c = 0; c < size; ++c) op.table[c] = (*sol)[ind.class_of[ind.offset[si] + c]];
    if (!preserves(op, s))
      throw VerificationFailure("decoded operation " + sym.name + " is not a polymorphism");
    w.certificate.push_back(sym.name + ": preserves all " + std::to_string(s.signature.size()) +
                            " relations");
    w.operations.emplace(sym.name, std::move(op));
  }
  if (!satisfies(w.operations, ids))
    throw VerificationFailure("decoded operations violate the identities");
  w.certificate.push_back("identities: all " + std::to_string(ids.equations.size()) +
                          " equations hold pointwise");
  return w;
}

std::optional<PolymorphismWitness> check_siggers(const Structure& s, const SearchOptions& opts) {
  return find_polymorphism(s, identities::siggers(), opts);
}

std::optional<PolymorphismWitness> check_wnu(const Structure& s, int n,
                                             const SearchOptions& opts) {
  return find_polymorphism(s, identities::wnu(n), opts);
}

std::optional<PolymorphismWitness> check_cyclic(const Structure& s, int p,
                                                const SearchOptions& opts) {
  if (p == 1) {
    PolymorphismWitness w;
    w.operations.emplace("c", Operation::projection(s.domain_size, 1, 0));
    w.certificate.push_back("arity 1: the identity is vacuously cyclic");
    return w;
  }
  return find_polymorphism(s, identities::cyclic(p), opts);
}

int SetFunction::operator()(const Tuple& args) const {
  std::uint64_t m = 0;
  for (int a : args) m |= std::uint64_t{1} << a;
  return by_set[m];
}

Operation SetFunction::dense(const Caps& caps) const {
  return Operation::from_function(domain_size, arity,
                                  [this](const Tuple& t) { return (*this)(t); }, caps);
}

std::vector<std::map<std::vector<std::uint64_t>, int>> ts_column_sets(const Structure& s,
                                                                       int n,
                                                                       const Caps& caps) {
  std::vector<std::map<std::vector<std::uint64_t>, int>> out(s.tables.size());
  std::size_t total = 0;
  for (std::size_t r = 0; r < s.tables.size(); ++r) {
    int k = s.signature.relations[r].arity;
    auto& seen = out[r];
    std::vector<std::vector<std::uint64_t>> layer;
    for (const auto& t : s.tables[r]) {
      std::vector<std::uint64_t> st(k);
      for (int i = 0; i < k; ++i) st[i] = std::uint64_t{1} << t[i];
      if (seen.emplace(st, 1).second) layer.push_back(st);
    }
    for (int count = 2; count <= n && !layer.empty(); ++count) {
      std::vector<std::vector<std::uint64_t>> next;
      for (const auto& st : layer)
        for (const auto& t : s.tables[r]) {
          auto grown = st;
          for (int i = 0; i < k; ++i) grown[i] |= std::uint64_t{1} << t[i];
          if (seen.emplace(grown, count).second) next.push_back(std::move(grown));
        }
      layer = std::move(next);
      if (total + seen.size() > caps.ts_states)
        throw CapExceeded("ts_states", total + seen.size(), caps.ts_states);
    }
    total += seen.size();
  }
  return out;
}

std::optional<TotallySymmetricResult> check_totally_symmetric(const Structure& s, int n,
                                                              const SearchOptions& opts) {
  if (n < 1) throw InvalidInput("arity must be positive");
  const int d = s.domain_size;
  if (d > 20) throw CapExceeded("ts_domain", d, 20);
  const std::uint64_t masks = std::uint64_t{1} << d;
  std::vector<int> var_of(masks, -1);
  std::vector<std::uint64_t> mask_of;
  for (std::uint64_t m = 1; m < masks; ++m)
    if (std::popcount(m) <= n) {
      var_of[m] = static_cast<int>(mask_of.size());
      mask_of.push_back(m);
    }
  if (mask_of.size() > opts.caps.ts_states)
    throw CapExceeded("ts_states", mask_of.size(), opts.caps.ts_states);

  auto sets = ts_column_sets(s, n, opts.caps);
  Instance x(static_cast<int>(mask_of.size()), s.signature);
  for (std::size_t r = 0; r < sets.size(); ++r)
    for (const auto& [st, cnt] : sets[r]) {
      Tuple t;
      for (auto m : st) t.push_back(var_of[m]);
      x.tables[r].push_back(std::move(t));
    }
  x.canonicalize();
  auto sol = find_homomorphism(x, s, {}, opts);
  if (!sol) return std::nullopt;

  TotallySymmetricResult res;
  res.set_function = {d, n, std::vector<int>(masks, -1)};
  for (std::size_t v = 0; v < mask_of.size(); ++v) res.set_function.by_set[mask_of[v]] = (*sol)[v];
  std::size_t states = 0;
  for (const auto& m : sets) states += m.size();
  res.certificate.push_back("set function preserves " + std::to_string(states) +
                            " column-set tuples of <= " + std::to_string(n) + " rows");
  try {
    Operation dense = res.set_function.dense(opts.caps);
    // Dependence on the argument set only, then full preservation.
    for (std::size_t c = 0; c < dense.table.size(); ++c) {
      Tuple t = decode_tuple(c, d, n);
      if (dense.table[c] != res.set_function(t))
        throw VerificationFailure("dense table is not totally symmetric");
    }
    std::size_t planned = 0;
    for (const auto& t : s.tables) planned += selection_count(t.size(), n);
    if (planned <= opts.caps.indicator_constraints) {
      if (!preserves(dense, s)) throw VerificationFailure("totally symmetric table fails preservation");
      res.certificate.push_back("dense table of arity " + std::to_string(n) +
                                " re-verified by preserves");
    }
    res.dense = std::move(dense);
  } catch (const CapExceeded&) {
    res.certificate.push_back("dense table exceeds the operation cap; set function only");
  }
  return res;
}

bool set_function_preserves(const SetFunction& f, const Structure& s, const Caps& caps) {
  if (f.domain_size != s.domain_size) throw InvalidInput("set function domain differs from template");
  auto sets = ts_column_sets(s, f.arity, caps);
  for (std::size_t r = 0; r < sets.size(); ++r)
    for (const auto& [st, cnt] : sets[r]) {
      Tuple img;
      for (auto m : st) {
        int v = f.by_set.at(m);
        if (v < 0 || v >= f.domain_size) return false;
        img.push_back(v);
      }
      if (!std::binary_search(s.tables[r].begin(), s.tables[r].end(), img)) return false;
    }
  return true;
}

std::optional<SetFunction> as_set_function(const Operation& op) {
  if (op.domain_size > 20) throw CapExceeded("ts_domain", op.domain_size, 20);
  SetFunction f{op.domain_size, op.arity,
                std::vector<int>(std::size_t{1} << op.domain_size, -1)};
  for (std::size_t c = 0; c < op.table.size(); ++c) {
    Tuple t = decode_tuple(c, op.domain_size, op.arity);
    std::uint64_t m = 0;
    for (int a : t) m |= std::uint64_t{1} << a;
    int& slot = f.by_set[m];
    if (slot < 0) slot = op.table[c];
    else if (slot != op.table[c]) return std::nullopt;
  }
  return f;
}

bool check_dual_discriminator(const Structure& s) {
  return preserves(ops::dual_discriminator(s.domain_size), s);
}

std::optional<std::pair<int, int>> implies_equation(const Table& r, int k) {
  if (r.empty()) throw InvalidInput("implies_equation needs a non-empty relation");
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      bool all = true;
      for (const auto& t : r) {
        if (static_cast<int>(t.size()) != k) throw InvalidInput("tuple arity mismatch");
        if (t[i] != t[j]) {
          all = false;
          break;
        }
      }
      if (all) return std::make_pair(i + 1, j + 1);
    }
  return std::nullopt;
}

Table pp_closure(const Structure& s, const Table& r, int k, const SearchOptions& opts) {
  for (const auto& t : r) {
    if (static_cast<int>(t.size()) != k) throw InvalidInput("tuple arity mismatch");
    for (int v : t)
      if (v < 0 || v >= s.domain_size) throw InvalidInput("element out of range");
  }
  Table rows = r;
  canonicalize(rows);
  if (rows.empty()) return {};
  if (rows.size() > opts.caps.pp_rows)
    throw CapExceeded("pp_rows", rows.size(), opts.caps.pp_rows);
  int m = static_cast<int>(rows.size());
  Structure pw = power(s, m, opts.caps);
  std::vector<int> columns(k);
  for (int col = 0; col < k; ++col) {
    std::size_t code = 0;
    for (int row = 0; row < m; ++row) code = code * s.domain_size + rows[row][col];
    columns[col] = static_cast<int>(code);
  }
  auto proj = project_solutions(pw, s, columns, opts);
  return Table(proj.begin(), proj.end());
}

bool is_pp_definable(const Structure& s, const Table& r, int k, const SearchOptions& opts) {
  Table rows = r;
  canonicalize(rows);
  return pp_closure(s, rows, k, opts) == rows;
}

}  // namespace polycsp
