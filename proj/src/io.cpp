#include "polycsp/io.hpp"

#include <fstream>
#include <istream>
#include <sstream>

#include "polycsp/errors.hpp"

namespace polycsp {

namespace {

struct Token {
  std::string text;
  std::size_t column;
};

std::vector<Token> split(const std::string& line) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t end = line.find('#');
  const std::size_t n = end == std::string::npos ? line.size() : end;
  while (i < n) {
    while (i < n && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t start = i;
    while (i < n && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back({line.substr(start, i - start), start + 1});
  }
  return out;
}

long long integer(const Token& t, std::size_t line) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(t.text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != t.text.size())
    throw ParseError(line, t.column, "expected an integer, got '" + t.text + "'");
  return v;
}

Structure parse(std::istream& in, const char* header, const Signature* sig = nullptr) {
  Structure s;
  if (sig) s = Structure(0, *sig);
  std::vector<char> declared(sig ? sig->size() : 0, 0);
  bool have_header = false;
  std::string line;
  std::size_t lineno = 0;
  int current = -1;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = split(line);
    if (toks.empty()) continue;
    if (toks[0].text == "domain" || toks[0].text == "variables") {
      if (toks[0].text != header)
        throw ParseError(lineno, 1, std::string("expected '") + header + "'");
      if (have_header) throw ParseError(lineno, 1, "second header line");
      if (toks.size() != 2) throw ParseError(lineno, 1, std::string("expected '") + header + " N'");
      long long n = integer(toks[1], lineno);
      if (n < 0) throw ParseError(lineno, toks[1].column, "negative size");
      s.domain_size = static_cast<int>(n);
      have_header = true;
      continue;
    }
    if (!have_header) throw ParseError(lineno, 1, std::string("missing '") + header + " N' line");
    if (toks[0].text == "rel") {
      if (toks.size() != 3) throw ParseError(lineno, 1, "expected 'rel NAME ARITY'");
      long long k = integer(toks[2], lineno);
      if (k < 1) throw ParseError(lineno, toks[2].column, "arity must be positive");
      if (!sig) {
        if (s.signature.index_of(toks[1].text))
          throw ParseError(lineno, toks[1].column, "relation '" + toks[1].text + "' declared twice");
        current = static_cast<int>(s.add_relation(toks[1].text, static_cast<int>(k)));
        continue;
      }
      auto idx = sig->index_of(toks[1].text);
      if (!idx)
        throw ParseError(lineno, toks[1].column, "relation '" + toks[1].text + "' is not in the template");
      if (sig->relations[*idx].arity != k)
        throw ParseError(lineno, toks[2].column,
                         "relation '" + toks[1].text + "' has arity " +
                             std::to_string(sig->relations[*idx].arity) + " in the template");
      if (declared[*idx])
        throw ParseError(lineno, toks[1].column, "relation '" + toks[1].text + "' declared twice");
      declared[*idx] = 1;
      current = static_cast<int>(*idx);
      continue;
    }
    if (current < 0) throw ParseError(lineno, 1, "tuple before any 'rel' line");
    const int k = s.signature.relations[current].arity;
    if (static_cast<int>(toks.size()) != k)
      throw ParseError(lineno, toks[0].column,
                       "relation '" + s.signature.relations[current].name + "' has arity " +
                           std::to_string(k) + ", tuple has " + std::to_string(toks.size()) +
                           " entries");
    Tuple t;
    for (const auto& tok : toks) {
      long long v = integer(tok, lineno);
      if (v < 0 || v >= s.domain_size)
        throw ParseError(lineno, tok.column, "element " + tok.text + " out of range");
      t.push_back(static_cast<int>(v));
    }
    s.tables[current].push_back(std::move(t));
  }
  if (!have_header) throw ParseError(lineno + 1, 1, std::string("missing '") + header + " N' line");
  s.canonicalize();
  return s;
}

std::string emit(const Structure& s, const char* header) {
  Structure c = s;
  c.canonicalize();
  std::ostringstream out;
  out << header << ' ' << c.domain_size << '\n';
  for (std::size_t r = 0; r < c.tables.size(); ++r) {
    out << "rel " << c.signature.relations[r].name << ' ' << c.signature.relations[r].arity << '\n';
    for (const auto& t : c.tables[r]) {
      for (std::size_t i = 0; i < t.size(); ++i) out << (i ? " " : "") << t[i];
      out << '\n';
    }
  }
  return out.str();
}

std::ifstream open(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  return in;
}

}  // namespace

Structure parse_template(std::istream& in) { return parse(in, "domain"); }
Instance parse_instance(std::istream& in) { return parse(in, "variables"); }

Instance parse_instance(std::istream& in, const Signature& sig) { return parse(in, "variables", &sig); }

std::string emit_template(const Structure& s) { return emit(s, "domain"); }
std::string emit_instance(const Instance& x) { return emit(x, "variables"); }

Structure read_template_file(const std::string& path) {
  auto in = open(path);
  return parse_template(in);
}

Instance read_instance_file(const std::string& path, const Signature& sig) {
  auto in = open(path);
  return parse_instance(in, sig);
}

}  // namespace polycsp
