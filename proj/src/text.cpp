#include "elq/text.h"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "elq/store.h"

namespace elq {
namespace {

struct Token {
  enum Kind { Ident, Var, LParen, RParen, LBrace, RBrace, Comma, Turnstile,
              Period, End } kind;
  std::string text;
  int column;  // 1-based
};

bool ident_char(char c) {
  return std::isalnum((unsigned char)c) || c == '_';
}

// Tokenizes one logical line; `line_no` only for error reporting.
class Lexer {
 public:
  Lexer(const std::string& line, int line_no)
      : line_(line), line_no_(line_no) {}

  Token next() {
    while (pos_ < line_.size() &&
           std::isspace((unsigned char)line_[pos_]))
      ++pos_;
    int col = (int)pos_ + 1;
    if (pos_ >= line_.size()) return {Token::End, "", col};
    char c = line_[pos_];
    switch (c) {
      case '(': ++pos_; return {Token::LParen, "(", col};
      case ')': ++pos_; return {Token::RParen, ")", col};
      case '{': ++pos_; return {Token::LBrace, "{", col};
      case '}': ++pos_; return {Token::RBrace, "}", col};
      case ',': ++pos_; return {Token::Comma, ",", col};
      case '.': ++pos_; return {Token::Period, ".", col};
    }
    if (c == ':' && pos_ + 1 < line_.size() && line_[pos_ + 1] == '-') {
      pos_ += 2;
      return {Token::Turnstile, ":-", col};
    }
    if (c == '?') {
      size_t start = ++pos_;
      while (pos_ < line_.size() && ident_char(line_[pos_])) ++pos_;
      if (pos_ == start) fail(col, "expected variable name after '?'");
      return {Token::Var, line_.substr(start, pos_ - start), col};
    }
    if (ident_char(c)) {
      size_t start = pos_;
      while (pos_ < line_.size() && ident_char(line_[pos_])) ++pos_;
      return {Token::Ident, line_.substr(start, pos_ - start), col};
    }
    fail(col, std::string("unexpected character '") + c + "'");
    return {};  // unreachable
  }

  [[noreturn]] void fail(int col, const std::string& msg) const {
    throw ParseError(line_no_, col, msg, line_);
  }

 private:
  const std::string& line_;
  int line_no_;
  size_t pos_ = 0;
};

// Pull-parser over one line's tokens with single-token lookahead.
struct LineParser {
  Lexer lex;
  Token cur;
  LineParser(const std::string& line, int line_no)
      : lex(line, line_no), cur(lex.next()) {}
  void advance() { cur = lex.next(); }
  Token expect(Token::Kind k, const std::string& what) {
    if (cur.kind != k) lex.fail(cur.column, "expected " + what);
    Token t = cur;
    advance();
    return t;
  }
  std::string ident(const std::string& what) {
    return expect(Token::Ident, what).text;
  }
  bool at(Token::Kind k) const { return cur.kind == k; }
  bool at_keyword(const std::string& kw) const {
    return cur.kind == Token::Ident && cur.text == kw;
  }
  void keyword(const std::string& kw) {
    if (!at_keyword(kw)) lex.fail(cur.column, "expected '" + kw + "'");
    advance();
  }
  void end() {
    if (cur.kind != Token::End)
      lex.fail(cur.column, "trailing input after statement");
  }
};

std::string strip_comment(const std::string& line) {
  size_t h = line.find('#');
  return h == std::string::npos ? line : line.substr(0, h);
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isspace((unsigned char)c); });
}

void parse_tbox_line(LineParser& p, KB& kb) {
  auto C = [&](const std::string& n) { return kb.sym.concept_of(n); };
  auto R = [&](const std::string& n) { return kb.sym.role_of(n); };

  if (p.at_keyword("some")) {  // some R A1 SubClassOf A
    p.advance();
    RoleId r = R(p.ident("role name"));
    ConceptId filler = C(p.ident("filler concept"));
    p.keyword("SubClassOf");
    ConceptId head = C(p.ident("head concept"));
    p.end();
    kb.tbox.push_back(Axiom::exist_lhs(r, filler, head));
    return;
  }
  if (p.at_keyword("self")) {  // self R SubClassOf A
    p.advance();
    RoleId r = R(p.ident("role name"));
    p.keyword("SubClassOf");
    ConceptId head = C(p.ident("head concept"));
    p.end();
    kb.tbox.push_back(Axiom::self_lhs(r, head));
    return;
  }
  if (p.at_keyword("range")) {  // range R A
    p.advance();
    RoleId r = R(p.ident("role name"));
    ConceptId head = C(p.ident("range concept"));
    p.end();
    kb.tbox.push_back(Axiom::range(r, head));
    return;
  }
  if (p.at_keyword("transitive")) {
    p.advance();
    kb.tbox.push_back(Axiom::trans(R(p.ident("role name"))));
    p.end();
    return;
  }
  if (p.at_keyword("reflexive")) {
    p.advance();
    kb.tbox.push_back(Axiom::refl(R(p.ident("role name"))));
    p.end();
    return;
  }

  std::string first = p.ident("concept or role name");
  if (p.at_keyword("and")) {  // A1 and A2 SubClassOf A
    p.advance();
    ConceptId a2 = C(p.ident("second conjunct"));
    p.keyword("SubClassOf");
    ConceptId head = C(p.ident("head concept"));
    p.end();
    kb.tbox.push_back(Axiom::conj(C(first), a2, head));
    return;
  }
  if (p.at_keyword("SubRoleOf")) {  // S SubRoleOf R
    p.advance();
    RoleId super = R(p.ident("super-role"));
    p.end();
    kb.tbox.push_back(Axiom::sub_role(R(first), super));
    return;
  }
  p.keyword("SubClassOf");
  if (p.at(Token::LBrace)) {  // A SubClassOf { a }
    p.advance();
    IndId i = kb.sym.individual_of(p.ident("individual name"));
    p.expect(Token::RBrace, "'}'");
    p.end();
    kb.tbox.push_back(Axiom::nominal(C(first), i));
    return;
  }
  if (p.at_keyword("some")) {  // A SubClassOf some R A2
    p.advance();
    RoleId r = R(p.ident("role name"));
    ConceptId filler = C(p.ident("filler concept"));
    p.end();
    kb.tbox.push_back(Axiom::exist_rhs(C(first), r, filler));
    return;
  }
  if (p.at_keyword("self")) {  // A SubClassOf self R
    p.advance();
    RoleId r = R(p.ident("role name"));
    p.end();
    kb.tbox.push_back(Axiom::self_rhs(C(first), r));
    return;
  }
  ConceptId head = C(p.ident("head concept"));  // A SubClassOf B
  p.end();
  kb.tbox.push_back(Axiom::sub_class(C(first), head));
}

void parse_abox_line(LineParser& p, KB& kb) {
  std::string pred = p.ident("predicate name");
  p.expect(Token::LParen, "'('");
  std::string arg0 = p.ident("individual name");
  if (p.at(Token::Comma)) {
    p.advance();
    std::string arg1 = p.ident("individual name");
    p.expect(Token::RParen, "')'");
    p.end();
    kb.role_abox.push_back({kb.sym.role_of(pred),
                            kb.sym.individual_of(arg0),
                            kb.sym.individual_of(arg1)});
    return;
  }
  p.expect(Token::RParen, "')'");
  p.end();
  kb.concept_abox.push_back(
      {kb.sym.concept_of(pred), kb.sym.individual_of(arg0)});
}

}  // namespace

KB parse_kb(const std::string& text) {
  KB kb;
  enum Section { None, Tbox, Abox } section = None;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = strip_comment(raw);
    if (blank(line)) continue;
    LineParser p(line, line_no);
    if (p.at_keyword("TBOX")) {
      p.advance();
      p.end();
      section = Tbox;
      continue;
    }
    if (p.at_keyword("ABOX")) {
      p.advance();
      p.end();
      section = Abox;
      continue;
    }
    switch (section) {
      case Tbox:
        parse_tbox_line(p, kb);
        break;
      case Abox:
        parse_abox_line(p, kb);
        break;
      case None:
        p.lex.fail(p.cur.column,
                   "statement before TBOX/ABOX section header");
    }
  }
  return kb;
}

std::string serialize_kb(const KB& kb) {
  std::ostringstream out;
  const Symbols& s = kb.sym;
  out << "TBOX\n";
  for (const Axiom& ax : kb.tbox) {
    switch (ax.kind) {
      case AxiomKind::SubClass:
        out << s.concept_name(ax.a) << " SubClassOf " << s.concept_name(ax.c);
        break;
      case AxiomKind::Nominal:
        out << s.concept_name(ax.a) << " SubClassOf { "
            << s.individual_name(ax.ind) << " }";
        break;
      case AxiomKind::Conj:
        out << s.concept_name(ax.a) << " and " << s.concept_name(ax.b)
            << " SubClassOf " << s.concept_name(ax.c);
        break;
      case AxiomKind::ExistLhs:
        out << "some " << s.role_name(ax.r) << " " << s.concept_name(ax.a)
            << " SubClassOf " << s.concept_name(ax.c);
        break;
      case AxiomKind::SubRole:
        out << s.role_name(ax.s) << " SubRoleOf " << s.role_name(ax.r);
        break;
      case AxiomKind::Range:
        out << "range " << s.role_name(ax.r) << " " << s.concept_name(ax.c);
        break;
      case AxiomKind::ExistRhs:
        out << s.concept_name(ax.a) << " SubClassOf some " << s.role_name(ax.r)
            << " " << s.concept_name(ax.c);
        break;
      case AxiomKind::Trans:
        out << "transitive " << s.role_name(ax.r);
        break;
      case AxiomKind::Refl:
        out << "reflexive " << s.role_name(ax.r);
        break;
      case AxiomKind::SelfRhs:
        out << s.concept_name(ax.a) << " SubClassOf self " << s.role_name(ax.r);
        break;
      case AxiomKind::SelfLhs:
        out << "self " << s.role_name(ax.r) << " SubClassOf "
            << s.concept_name(ax.c);
        break;
    }
    out << "\n";
  }
  out << "ABOX\n";
  for (const ConceptAssertion& ca : kb.concept_abox)
    out << s.concept_name(ca.c) << "(" << s.individual_name(ca.i) << ")\n";
  for (const RoleAssertion& ra : kb.role_abox)
    out << s.role_name(ra.r) << "(" << s.individual_name(ra.s) << ", "
        << s.individual_name(ra.o) << ")\n";
  return out.str();
}

CQ parse_query(const std::string& text, Symbols& sym) {
  // The query may span lines; join content lines before parsing so the
  // closing '.' can sit anywhere.
  std::istringstream in(text);
  std::string raw, joined;
  int first_line = 0, line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = strip_comment(raw);
    if (blank(line)) continue;
    if (joined.empty()) first_line = line_no;
    joined += line;
    joined += ' ';
  }
  if (joined.empty()) throw ParseError(1, 1, "empty query", "");
  LineParser p(joined, first_line);

  CQ q;
  std::unordered_map<std::string, VarId> vars;
  auto var_id = [&](const std::string& name) {
    auto it = vars.find(name);
    if (it != vars.end()) return it->second;
    VarId v = (VarId)q.var_names.size();
    q.var_names.push_back(name);
    vars.emplace(name, v);
    return v;
  };

  q.name = p.ident("query name");
  p.expect(Token::LParen, "'('");
  while (!p.at(Token::RParen)) {
    Token v = p.expect(Token::Var, "answer variable");
    q.answer_vars.push_back(var_id(v.text));
    if (p.at(Token::Comma)) p.advance();
  }
  p.advance();  // ')'
  p.expect(Token::Turnstile, "':-'");

  auto term = [&]() -> QTerm {
    if (p.at(Token::Var)) {
      Token v = p.cur;
      p.advance();
      return QTerm::var(var_id(v.text));
    }
    return QTerm::constant(sym.individual_of(p.ident("term")));
  };

  bool any_atom = false;
  while (!p.at(Token::Period)) {
    std::string pred = p.ident("predicate name");
    p.expect(Token::LParen, "'('");
    QTerm t0 = term();
    if (p.at(Token::Comma)) {
      p.advance();
      QTerm t1 = term();
      p.expect(Token::RParen, "')'");
      q.atoms.push_back(QAtom::role(sym.role_of(pred), t0, t1));
    } else {
      p.expect(Token::RParen, "')'");
      q.atoms.push_back(QAtom::unary(sym.concept_of(pred), t0));
    }
    any_atom = true;
    if (p.at(Token::Comma)) p.advance();
  }
  p.advance();  // '.'
  p.end();
  if (!any_atom)
    throw ParseError(first_line, 1, "empty query body", joined);

  // Head variables must occur in the body.
  std::vector<char> in_body(q.n_vars(), 0);
  for (const QAtom& a : q.atoms) {
    if (a.t0.is_var) in_body[a.t0.id] = 1;
    if (a.binary && a.t1.is_var) in_body[a.t1.id] = 1;
  }
  for (VarId v : q.answer_vars)
    if (!in_body[v])
      throw ParseError(first_line, 1,
                       "head variable ?" + q.var_names[v] +
                           " does not occur in the body",
                       joined);
  return q;
}

std::string print_query(const CQ& q, const Symbols& sym) {
  std::ostringstream out;
  out << q.name << "(";
  for (size_t i = 0; i < q.answer_vars.size(); ++i) {
    if (i) out << ", ";
    out << "?" << q.var_names[q.answer_vars[i]];
  }
  out << ") :- ";
  auto term = [&](const QTerm& t) {
    return t.is_var ? "?" + q.var_names[t.id] : sym.individual_name(t.id);
  };
  for (size_t i = 0; i < q.atoms.size(); ++i) {
    if (i) out << ", ";
    const QAtom& a = q.atoms[i];
    if (a.binary)
      out << sym.role_name(a.r) << "(" << term(a.t0) << ", " << term(a.t1)
          << ")";
    else
      out << sym.concept_name(a.c) << "(" << term(a.t0) << ")";
  }
  out << ".";
  return out.str();
}

std::string serialize_facts(const FactStore& st) {
  std::vector<std::string> lines;
  const Symbols& s = st.sym();
  auto ind = [&](IndId i) { return s.individual_name(i); };

  for (ConceptId c = 0; c < st.n_concepts(); ++c)
    for (IndId u : st.concept_extent(c))
      lines.push_back(s.concept_name(c) + "(" + ind(u) + ")");
  for (RoleId r = 0; r < st.n_roles(); ++r) {
    for (IndId u = 0; u < st.n_terms(); ++u)
      for (IndId v : st.succ(r, u))
        lines.push_back(s.role_name(r) + "(" + ind(u) + ", " + ind(v) + ")");
    for (IndId u = 0; u < st.n_terms(); ++u)
      for (IndId v : st.dir_succ(r, u))
        lines.push_back("dir" + s.role_name(r) + "(" + ind(u) + ", " +
                        ind(v) + ")");
    for (IndId u : st.self_extent(r))
      lines.push_back("self" + s.role_name(r) + "(" + ind(u) + ")");
  }
  for (IndId u : st.ind_extent()) lines.push_back("ind(" + ind(u) + ")");
  for (IndId u = 0; u < st.n_terms(); ++u)
    if (st.rep(u) != u) lines.push_back("eq " + ind(u) + " " + ind(st.rep(u)));

  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const std::string& l : lines) {
    out += l;
    out += '\n';
  }
  return out;
}

}  // namespace elq
