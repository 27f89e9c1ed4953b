#include "endoring/textformat.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace endoring {

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : UsageError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

GroupRef Document::group(const std::string& name) const {
  for (const auto& g : groups)
    if (g->name == name) return g;
  return nullptr;
}

const Endo* Document::endo(const std::string& name) const {
  for (const auto& e : endos)
    if (e.name == name) return &e.endo;
  return nullptr;
}

std::string coord_label(const GroupDesc& g, const Coord& c) {
  return g.blocks.at(c.block).name + "." + std::to_string(c.copy);
}

namespace {

enum class Tok { Ident, Number, Punct, Arrow, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t line = 1;
  std::size_t col = 1;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1, i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t t = 0; t < n; ++t, ++i) {
      if (s[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto digit = [&](std::size_t at) { return at < s.size() && std::isdigit(static_cast<unsigned char>(s[at])); };
  while (i < s.size()) {
    char ch = s[i];
    if (std::isspace(static_cast<unsigned char>(ch))) {
      advance(1);
      continue;
    }
    if (ch == '#') {
      while (i < s.size() && s[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    std::size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      t.kind = Tok::Ident;
      t.text = std::string(s.substr(start, j - start));
      advance(j - i);
    } else if (digit(i) || ((ch == '-' || ch == '+') && digit(i + 1))) {
      std::size_t j = i + 1;
      while (digit(j)) ++j;
      if (j < s.size() && s[j] == '/' && digit(j + 1)) {
        ++j;
        while (digit(j)) ++j;
      }
      t.kind = Tok::Number;
      t.text = std::string(s.substr(start, j - start));
      advance(j - i);
    } else if (ch == '-' && i + 1 < s.size() && s[i + 1] == '>') {
      t.kind = Tok::Arrow;
      t.text = "->";
      advance(2);
    } else if (std::string_view("{}[]()=,.:;").find(ch) != std::string_view::npos) {
      t.kind = Tok::Punct;
      t.text = std::string(1, ch);
      advance(1);
    } else {
      throw ParseError(line, col, std::string("unexpected character '") + ch + "'");
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(tokenize(text)) {}

  Document run() {
    Document doc;
    while (peek().kind != Tok::End) {
      const Token& kw = peek();
      if (is_ident("group")) {
        doc.groups.push_back(parse_group(doc));
      } else if (is_ident("endo")) {
        doc.endos.push_back(parse_endo(doc));
      } else if (is_ident("matrix")) {
        doc.matrices.push_back(parse_matrix(doc));
      } else {
        fail(kw, "expected 'group', 'endo' or 'matrix'");
      }
      skip_semicolons();
    }
    return doc;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;

  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_ == toks_.size() - 1 ? pos_ : pos_++]; }
  [[noreturn]] static void fail(const Token& t, const std::string& msg) { throw ParseError(t.line, t.col, msg); }

  bool is_ident(std::string_view word) const { return peek().kind == Tok::Ident && peek().text == word; }
  bool is_punct(char c) const { return peek().kind == Tok::Punct && peek().text[0] == c; }

  void skip_semicolons() {
    while (is_punct(';')) next();
  }

  void expect_punct(char c) {
    if (!is_punct(c)) fail(peek(), std::string("expected '") + c + "'");
    next();
  }

  void expect_arrow() {
    if (peek().kind != Tok::Arrow) fail(peek(), "expected '->'");
    next();
  }

  void expect_word(std::string_view word) {
    if (!is_ident(word)) fail(peek(), "expected '" + std::string(word) + "'");
    next();
  }

  std::string ident(const std::string& what) {
    if (peek().kind != Tok::Ident) fail(peek(), "expected " + what);
    return next().text;
  }

  Rational rational() {
    if (peek().kind != Tok::Number) fail(peek(), "expected a number");
    const Token& t = next();
    try {
      return parse_rational(t.text);
    } catch (const UsageError& e) {
      fail(t, e.what());
    }
  }

  Integer integer() {
    const Token& t = peek();
    Rational r = rational();
    if (r.get_den() != 1) fail(t, "expected an integer");
    return r.get_num();
  }

  std::uint64_t natural() {
    const Token& t = peek();
    Integer v = integer();
    if (v < 0 || !v.fits_ulong_p()) fail(t, "expected a natural number");
    return v.get_ui();
  }

  Cardinal cardinal() {
    if (is_ident("omega")) {
      next();
      return kOmega;
    }
    const Token& t = peek();
    std::uint64_t v = natural();
    if (v == 0) fail(t, "multiplicity must be at least 1");
    return v;
  }

  Prime prime() {
    const Token& t = peek();
    std::uint64_t v = natural();
    if (!is_prime(v)) fail(t, std::to_string(v) + " is not prime");
    return v;
  }

  void key(std::string_view name) {
    expect_word(name);
    expect_punct('=');
  }

  GroupRef parse_group(const Document& doc) {
    next();
    const Token& name_tok = peek();
    std::string name = ident("group name");
    if (doc.group(name)) fail(name_tok, "group '" + name + "' already defined");
    expect_punct('{');
    GroupDesc g;
    g.name = name;
    while (!is_punct('}')) {
      if (peek().kind == Tok::End) fail(peek(), "unterminated group body");
      expect_word("block");
      const Token& block_tok = peek();
      std::string bname = ident("block name");
      if (g.find(bname)) fail(block_tok, "duplicate block '" + bname + "'");
      expect_punct('=');
      const Token& kind_tok = peek();
      std::string kind = ident("block kind");
      expect_punct('(');
      if (kind == "cyclic") {
        key("p");
        Prime p = prime();
        expect_punct(',');
        key("k");
        const Token& kt = peek();
        std::uint64_t k = natural();
        if (k == 0 || k > 64) fail(kt, "k must lie in 1..64");
        expect_punct(',');
        key("mult");
        Cardinal m = cardinal();
        g.blocks.push_back(Block::cyclic(bname, p, static_cast<unsigned>(k), m));
      } else if (kind == "prufer") {
        key("p");
        Prime p = prime();
        expect_punct(',');
        key("copies");
        g.blocks.push_back(Block::prufer(bname, p, cardinal()));
      } else if (kind == "torsionfree") {
        key("pi");
        expect_punct('{');
        std::vector<Prime> pi;
        while (!is_punct('}')) {
          pi.push_back(prime());
          if (is_punct(',')) next();
        }
        next();
        std::sort(pi.begin(), pi.end());
        pi.erase(std::unique(pi.begin(), pi.end()), pi.end());
        expect_punct(',');
        key("rank");
        const Token& rt = peek();
        Cardinal rank = cardinal();
        if (!rank) {
          if (!pi.empty()) fail(rt, "rank omega is only supported with pi={}");
          if (std::any_of(g.blocks.begin(), g.blocks.end(),
                          [](const Block& b) { return b.kind == BlockKind::FreeOmega; }))
            fail(rt, "at most one block of rank omega");
          g.blocks.push_back(Block::free_omega(bname));
        } else {
          g.blocks.push_back(Block::torsion_free(bname, pi, *rank));
        }
      } else {
        fail(kind_tok, "unknown block kind '" + kind + "'");
      }
      expect_punct(')');
      skip_semicolons();
    }
    if (g.blocks.empty()) fail(peek(), "empty group body");
    next();
    try {
      g.validate();
    } catch (const UsageError& e) {
      fail(name_tok, e.what());
    }
    return std::make_shared<const GroupDesc>(std::move(g));
  }

  struct Ref {
    std::size_t block = 0;
    std::optional<std::uint64_t> copy;
    const Token* tok = nullptr;
  };

  Ref ref(const GroupDesc& g, bool need_copy) {
    Ref r;
    r.tok = &peek();
    std::string name = ident("block reference");
    auto idx = g.find(name);
    if (!idx) fail(*r.tok, "unknown block '" + name + "' in group '" + g.name + "'");
    r.block = *idx;
    if (is_punct('.')) {
      next();
      r.copy = natural();
    } else if (need_copy) {
      fail(peek(), "expected '.' and a copy index");
    }
    return r;
  }

  static bool in_range(const GroupDesc& g, const Ref& r) {
    const Block& b = g.blocks[r.block];
    return !r.copy || !b.mult || *r.copy < *b.mult;
  }

  NamedEndo parse_endo(const Document& doc) {
    next();
    std::string name = ident("endo name");
    expect_word("on");
    const Token& gt = peek();
    std::string gname = ident("group name");
    GroupRef gref = doc.group(gname);
    if (!gref) fail(gt, "unknown group '" + gname + "'");
    const GroupDesc& g = *gref;
    Endo phi = Endo::zero(gref);
    Layout lay(g);
    auto issue = [&](const Token& t, const std::string& msg) {
      phi.deferred_issues.push_back("line " + std::to_string(t.line) + ": " + msg);
    };
    auto label = [&](const Ref& r) { return g.blocks[r.block].name + (r.copy ? "." + std::to_string(*r.copy) : ""); };
    expect_punct('{');
    while (!is_punct('}')) {
      if (peek().kind == Tok::End) fail(peek(), "unterminated endo body");
      const Token& kw = peek();
      std::string what = ident("'tf', 'div', 'cyc', 'tau' or 'fin'");
      expect_punct('[');
      if (what == "tf") {
        Ref src = ref(g, false);
        if (!src.copy) {
          expect_punct(']');
          expect_punct('=');
          const Token& vt = peek();
          Rational v = rational();
          if (g.blocks[src.block].kind != BlockKind::FreeOmega)
            issue(*src.tok, "tf[" + label(src) + "] needs a block of rank omega");
          else if (v.get_den() != 1)
            issue(vt, "free scalar must be an integer");
          else
            phi.free_scalar = v.get_num();
        } else {
          expect_arrow();
          Ref tgt = ref(g, true);
          expect_punct(']');
          expect_punct('=');
          Rational v = rational();
          Coord cs{static_cast<std::uint32_t>(src.block), *src.copy};
          Coord ct{static_cast<std::uint32_t>(tgt.block), *tgt.copy};
          auto is = lay.tf_index.find(cs);
          auto it = lay.tf_index.find(ct);
          if (is == lay.tf_index.end() || it == lay.tf_index.end())
            issue(kw, "tf[" + label(src) + " -> " + label(tgt) + "] needs finite-rank torsion-free copies in range");
          else
            phi.tf(it->second, is->second) = v;
        }
      } else if (what == "div") {
        Ref src = ref(g, false);
        const Block& sb = g.blocks[src.block];
        if (!src.copy) {
          expect_punct(']');
          expect_punct('=');
          Rational v = rational();
          if (sb.kind != BlockKind::Prufer || !lay.scalar_prufer_primes.count(sb.p))
            issue(*src.tok, "div[" + label(src) + "] needs a Prufer prime with omega copies");
          else
            phi.div[sb.p].scalar = v;
        } else {
          expect_arrow();
          Ref tgt = ref(g, true);
          expect_punct(']');
          expect_punct('=');
          Rational v = rational();
          const Block& tb = g.blocks[tgt.block];
          std::string site = "div[" + label(src) + " -> " + label(tgt) + "]";
          if (sb.kind != BlockKind::Prufer || tb.kind != BlockKind::Prufer || sb.p != tb.p) {
            issue(kw, site + " needs Prufer copies of one prime");
          } else if (lay.scalar_prufer_primes.count(sb.p)) {
            issue(kw, site + ": prime " + std::to_string(sb.p) + " has omega copies, use div[" + sb.name + "] = r");
          } else if (!in_range(g, src) || !in_range(g, tgt)) {
            issue(kw, site + " copy index out of range");
          } else {
            const auto& coords = lay.prufer_coords.at(sb.p);
            auto pos = [&](const Ref& r) {
              Coord c{static_cast<std::uint32_t>(r.block), *r.copy};
              return static_cast<std::size_t>(std::find(coords.begin(), coords.end(), c) - coords.begin());
            };
            phi.div[sb.p].matrix(pos(tgt), pos(src)) = v;
          }
        }
      } else if (what == "cyc") {
        Ref b = ref(g, false);
        expect_punct(']');
        expect_punct('=');
        const Token& vt = peek();
        Rational v = rational();
        if (g.blocks[b.block].kind != BlockKind::Cyclic || b.copy)
          issue(*b.tok, "cyc[" + label(b) + "] needs a cyclic block without copy index");
        else if (v.get_den() != 1)
          issue(vt, "cyc scalar must be an integer");
        else
          phi.cyc[b.block] = v.get_num();
      } else if (what == "tau") {
        Ref src = ref(g, true);
        expect_arrow();
        Ref tgt = ref(g, true);
        expect_punct(']');
        expect_punct('=');
        Rational v = rational();
        phi.tau.push_back(TauEntry{Coord{static_cast<std::uint32_t>(src.block), *src.copy},
                                   Coord{static_cast<std::uint32_t>(tgt.block), *tgt.copy}, v});
      } else if (what == "fin") {
        Ref src = ref(g, true);
        std::optional<Integer> modulus;
        bool paren = false;
        if (is_punct('(')) {
          next();
          paren = true;
        }
        if (is_ident("mod")) {
          next();
          const Token& mt = peek();
          Integer m = integer();
          if (m <= 0) fail(mt, "modulus must be positive");
          modulus = m;
        } else if (paren) {
          fail(peek(), "expected 'mod'");
        }
        if (paren) expect_punct(')');
        expect_punct(']');
        expect_punct('=');
        expect_punct('{');
        std::map<Coord, Rational> raw;
        while (!is_punct('}')) {
          Ref t = ref(g, true);
          expect_punct(':');
          Rational v = rational();
          Coord c{static_cast<std::uint32_t>(t.block), *t.copy};
          if (!in_range(g, t)) issue(*t.tok, "fin image coordinate " + label(t) + " out of range");
          else raw[c] += v;
          if (is_punct(',')) next();
        }
        next();
        FinEntry f;
        f.source = Coord{static_cast<std::uint32_t>(src.block), *src.copy};
        f.modulus = modulus;
        try {
          f.image = make_element(g, raw);
        } catch (const UsageError& e) {
          issue(kw, std::string("fin image: ") + e.what());
        }
        phi.fin.push_back(std::move(f));
      } else {
        fail(kw, "unknown endo entry '" + what + "'");
      }
      skip_semicolons();
    }
    next();
    return NamedEndo{name, std::move(phi)};
  }

  NamedMatrix parse_matrix(const Document& doc) {
    next();
    const Token& nt = peek();
    std::string name = ident("matrix name");
    for (const auto& m : doc.matrices)
      if (m.name == name) fail(nt, "matrix '" + name + "' already defined");
    expect_word("over");
    const Token& ft = peek();
    std::string f = ident("field");
    Field field;
    if (f == "Q") {
      field.p = 0;
    } else if (f.rfind("F_", 0) == 0 && f.size() > 2 &&
               std::all_of(f.begin() + 2, f.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      field.p = std::stoull(f.substr(2));
      if (!is_prime(field.p)) fail(ft, f.substr(2) + " is not prime");
    } else {
      fail(ft, "field must be F_<prime> or Q");
    }
    expect_punct('{');
    std::vector<Row> rows;
    while (!is_punct('}')) {
      if (peek().kind == Tok::End) fail(peek(), "unterminated matrix body");
      expect_punct('[');
      Row row;
      while (!is_punct(']')) {
        row.push_back(rational());
        if (is_punct(',')) next();
      }
      next();
      rows.push_back(std::move(row));
      skip_semicolons();
    }
    const Token& close = next();
    try {
      return NamedMatrix{name, ExactMatrix(field, std::move(rows))};
    } catch (const UsageError& e) {
      fail(close, e.what());
    }
  }
};

std::string cardinal_text(const Cardinal& c) { return c ? std::to_string(*c) : "omega"; }

}  // namespace

Document parse(std::string_view text) { return Parser(text).run(); }

Document parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string serialize(const GroupDesc& g) {
  std::string out = "group " + g.name + " {\n";
  for (const auto& b : g.blocks) {
    out += "  block " + b.name + " = ";
    switch (b.kind) {
      case BlockKind::Cyclic:
        out += "cyclic(p=" + std::to_string(b.p) + ", k=" + std::to_string(b.k) + ", mult=" + cardinal_text(b.mult) + ")";
        break;
      case BlockKind::Prufer:
        out += "prufer(p=" + std::to_string(b.p) + ", copies=" + cardinal_text(b.mult) + ")";
        break;
      case BlockKind::TorsionFree: {
        std::string pi;
        for (Prime p : b.pi) pi += (pi.empty() ? "" : ",") + std::to_string(p);
        out += "torsionfree(pi={" + pi + "}, rank=" + cardinal_text(b.mult) + ")";
        break;
      }
      case BlockKind::FreeOmega:
        out += "torsionfree(pi={}, rank=omega)";
        break;
    }
    out += "\n";
  }
  return out + "}\n";
}

std::string serialize(const std::string& name, const Endo& phi) {
  const GroupDesc& g = phi.g();
  Layout lay(g);
  std::string out = "endo " + name + " on " + g.name + " {\n";
  const std::size_t n = lay.tf_coords.size();
  for (std::size_t s = 0; s < n && phi.tf.rows() == n; ++s)
    for (std::size_t t = 0; t < n; ++t)
      if (phi.tf(t, s) != 0)
        out += "  tf[" + coord_label(g, lay.tf_coords[s]) + " -> " + coord_label(g, lay.tf_coords[t]) +
               "] = " + to_string(phi.tf(t, s)) + "\n";
  if (phi.free_scalar != 0 && lay.free_block)
    out += "  tf[" + g.blocks[*lay.free_block].name + "] = " + to_string(phi.free_scalar) + "\n";
  for (const auto& [p, d] : phi.div) {
    if (d.scalar_form) {
      if (d.scalar == 0) continue;
      auto it = std::find_if(g.blocks.begin(), g.blocks.end(),
                             [p](const Block& b) { return b.kind == BlockKind::Prufer && b.p == p && !b.mult; });
      if (it != g.blocks.end()) out += "  div[" + it->name + "] = " + to_string(d.scalar) + "\n";
      continue;
    }
    auto cit = lay.prufer_coords.find(p);
    if (cit == lay.prufer_coords.end()) continue;
    const auto& coords = cit->second;
    for (std::size_t s = 0; s < coords.size() && s < d.matrix.cols(); ++s)
      for (std::size_t t = 0; t < coords.size() && t < d.matrix.rows(); ++t)
        if (d.matrix(t, s) != 0)
          out += "  div[" + coord_label(g, coords[s]) + " -> " + coord_label(g, coords[t]) + "] = " +
                 to_string(d.matrix(t, s)) + "\n";
  }
  for (std::size_t b = 0; b < phi.cyc.size() && b < g.blocks.size(); ++b)
    if (phi.cyc[b] != 0) out += "  cyc[" + g.blocks[b].name + "] = " + to_string(phi.cyc[b]) + "\n";
  for (const auto& t : phi.tau)
    out += "  tau[" + coord_label(g, t.source) + " -> " + coord_label(g, t.target) + "] = " + to_string(t.scale) + "\n";
  for (const auto& f : phi.fin) {
    out += "  fin[" + coord_label(g, f.source);
    if (f.modulus) out += " mod " + to_string(*f.modulus);
    out += "] = {";
    bool first = true;
    for (const auto& [c, v] : f.image.coeffs) {
      out += (first ? "" : ", ") + coord_label(g, c) + ": " + to_string(v);
      first = false;
    }
    out += "}\n";
  }
  return out + "}\n";
}

std::string serialize(const std::string& name, const ExactMatrix& m) {
  std::string out = "matrix " + name + " over " + (m.field.is_rational() ? std::string("Q") : "F_" + std::to_string(m.field.p)) + " {\n";
  for (const auto& row : m.rows) {
    out += "  [";
    for (std::size_t j = 0; j < row.size(); ++j) out += (j ? ", " : "") + to_string(row[j]);
    out += "]\n";
  }
  return out + "}\n";
}

std::string serialize(const Document& doc) {
  std::string out;
  auto sep = [&] {
    if (!out.empty()) out += "\n";
  };
  for (const auto& g : doc.groups) {
    sep();
    out += serialize(*g);
  }
  for (const auto& e : doc.endos) {
    sep();
    out += serialize(e.name, e.endo);
  }
  for (const auto& m : doc.matrices) {
    sep();
    out += serialize(m.name, m.matrix);
  }
  return out;
}

}  // namespace endoring
