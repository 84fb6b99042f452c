#include "polycsp/structure.hpp"

#include <algorithm>
#include <set>

#include "polycsp/errors.hpp"

namespace polycsp {

std::optional<std::size_t> Signature::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < relations.size(); ++i)
    if (relations[i].name == name) return i;
  return std::nullopt;
}

int Signature::max_arity() const {
  int m = 0;
  for (const auto& r : relations) m = std::max(m, r.arity);
  return m;
}

Structure::Structure(int n, Signature sig)
    : domain_size(n), signature(std::move(sig)), tables(signature.size()) {}

std::size_t Structure::add_relation(const std::string& name, int arity, Table tuples) {
  if (signature.index_of(name)) throw InvalidInput("duplicate relation name: " + name);
  signature.relations.push_back({name, arity});
  polycsp::canonicalize(tuples);
  tables.push_back(std::move(tuples));
  return tables.size() - 1;
}

const Table& Structure::table(const std::string& name) const {
  auto i = signature.index_of(name);
  if (!i) throw InvalidInput("no relation named " + name);
  return tables[*i];
}

Table& Structure::table(const std::string& name) {
  auto i = signature.index_of(name);
  if (!i) throw InvalidInput("no relation named " + name);
  return tables[*i];
}

bool Structure::holds(std::size_t rel, const Tuple& t) const {
  return std::binary_search(tables[rel].begin(), tables[rel].end(), t);
}

void Structure::canonicalize() {
  for (auto& t : tables) polycsp::canonicalize(t);
}

std::size_t Structure::tuple_count() const {
  std::size_t n = 0;
  for (const auto& t : tables) n += t.size();
  return n;
}

void canonicalize(Table& t) {
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
}

std::vector<Violation> validate_structure(const Structure& s) {
  std::vector<Violation> out;
  if (s.domain_size < 0) out.push_back({"", {}, "negative domain size"});
  std::set<std::string> names;
  for (const auto& r : s.signature.relations) {
    if (!names.insert(r.name).second) out.push_back({r.name, {}, "duplicate relation name"});
    if (r.arity < 1) out.push_back({r.name, {}, "arity must be positive"});
  }
  if (s.tables.size() != s.signature.size()) {
    out.push_back({"", {}, "table count does not match signature"});
    return out;
  }
  for (std::size_t i = 0; i < s.tables.size(); ++i) {
    const auto& sym = s.signature.relations[i];
    const auto& tab = s.tables[i];
    for (std::size_t j = 0; j < tab.size(); ++j) {
      const auto& t = tab[j];
      if (static_cast<int>(t.size()) != sym.arity)
        out.push_back({sym.name, t, "arity mismatch"});
      for (int v : t)
        if (v < 0 || v >= s.domain_size) {
          out.push_back({sym.name, t, "element out of range"});
          break;
        }
      if (j > 0 && !(tab[j - 1] < t))
        out.push_back({sym.name, t, "table not canonical (unsorted or duplicate)"});
    }
  }
  return out;
}

void require_valid(const Structure& s) {
  auto v = validate_structure(s);
  if (!v.empty()) throw InvalidInput(v.front().relation + ": " + v.front().message);
}

void require_same_signature(const Structure& a, const Structure& b) {
  if (!(a.signature == b.signature)) throw SignatureMismatch("signatures differ");
}

std::size_t encode_tuple(const Tuple& t, int base) {
  std::size_t c = 0;
  for (int v : t) c = c * static_cast<std::size_t>(base) + static_cast<std::size_t>(v);
  return c;
}

Tuple decode_tuple(std::size_t code, int base, int length) {
  Tuple t(length);
  for (int i = length - 1; i >= 0; --i) {
    t[i] = static_cast<int>(code % base);
    code /= base;
  }
  return t;
}

std::size_t checked_pow(std::size_t base, std::size_t exp, std::size_t cap,
                        const char* cap_name) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && r > cap / base) {
      // Report a saturated requirement rather than overflowing.
      throw CapExceeded(cap_name, cap + 1, cap);
    }
    r *= base;
  }
  if (r > cap) throw CapExceeded(cap_name, r, cap);
  return r;
}

Structure power(const Structure& s, int n, const Caps& caps) {
  if (n < 1) throw InvalidInput("power exponent must be positive");
  std::size_t size = checked_pow(s.domain_size, n, caps.power_elements, "power_elements");
  Structure p(static_cast<int>(size), s.signature);
  for (std::size_t r = 0; r < s.tables.size(); ++r) {
    const Table& base = s.tables[r];
    int k = s.signature.relations[r].arity;
    std::size_t count = checked_pow(base.size(), n, caps.power_elements, "power_elements");
    Table& out = p.tables[r];
    out.reserve(count);
    // Enumerate n-row selections of tuples of `base`; row i supplies coordinate i.
    std::vector<std::size_t> pick(n, 0);
    for (std::size_t c = 0; c < count; ++c) {
      Tuple t(k, 0);
      for (int col = 0; col < k; ++col) {
        std::size_t code = 0;
        for (int row = 0; row < n; ++row)
          code = code * s.domain_size + base[pick[row]][col];
        t[col] = static_cast<int>(code);
      }
      out.push_back(std::move(t));
      for (int row = n - 1; row >= 0; --row) {
        if (++pick[row] < base.size()) break;
        pick[row] = 0;
      }
    }
    canonicalize(out);
  }
  return p;
}

UnionResult disjoint_union(const Instance& x, const Instance& y) {
  require_same_signature(x, y);
  UnionResult u;
  u.instance = Instance(x.domain_size + y.domain_size, x.signature);
  for (int i = 0; i < x.domain_size; ++i) u.left_map.push_back(i);
  for (int i = 0; i < y.domain_size; ++i) u.right_map.push_back(x.domain_size + i);
  for (std::size_t r = 0; r < x.tables.size(); ++r) {
    Table& out = u.instance.tables[r];
    out = x.tables[r];
    for (Tuple t : y.tables[r]) {
      for (int& v : t) v += x.domain_size;
      out.push_back(std::move(t));
    }
    canonicalize(out);
  }
  return u;
}

Instance empty_instance(const Signature& sig, int n) { return Instance(n, sig); }

std::vector<std::size_t> occurrence_counts(const Instance& x) {
  std::vector<std::size_t> occ(x.domain_size, 0);
  for (const auto& tab : x.tables)
    for (const auto& t : tab)
      for (int v : t) ++occ[v];
  return occ;
}

std::size_t max_occurrence(const Instance& x) {
  std::size_t m = 0;
  for (auto c : occurrence_counts(x)) m = std::max(m, c);
  return m;
}

}  // namespace polycsp
