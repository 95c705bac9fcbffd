#include "picomp/syntax.hpp"

#include <cctype>
#include <sstream>

#include "picomp/diag.hpp"
#include "picomp/typecheck.hpp"

namespace picomp {

// ------------------------------------------------------------------ lexer ---

namespace {

enum class Tok {
  Ident, Star, Backslash, Colon, Dot, Comma, Pipe, LParen, RParen,
  LBracket, RBracket, Equals, At, Bang, Arrow, HashB, HashR,
  KwLet, KwIn, KwNew, KwUnit, KwCh, End,
};

struct Token {
  Tok kind;
  std::string text;
  int line, col;
};

struct Lexer {
  const std::string& src;
  size_t pos = 0;
  int line = 1, col = 1;
  std::vector<Token> tokens;

  explicit Lexer(const std::string& s) : src(s) { run(); }

  [[noreturn]] void fail(const std::string& msg) {
    throw Diag(Errc::ParseError,
               std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
  }

  void push(Tok k, std::string text, int l, int c) {
    tokens.push_back(Token{k, std::move(text), l, c});
  }

  void run() {
    while (pos < src.size()) {
      char c = src[pos];
      if (c == '\n') {
        pos++;
        line++;
        col = 1;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        pos++;
        col++;
        continue;
      }
      int l = line, cc = col;
      auto one = [&](Tok k) {
        push(k, std::string(1, c), l, cc);
        pos++;
        col++;
      };
      if (c == '-' && pos + 1 < src.size() && src[pos + 1] == '>') {
        push(Tok::Arrow, "->", l, cc);
        pos += 2;
        col += 2;
        continue;
      }
      if (c == '#') {
        if (pos + 1 < src.size() && (src[pos + 1] == 'b' || src[pos + 1] == 'R')) {
          push(src[pos + 1] == 'b' ? Tok::HashB : Tok::HashR,
               std::string("#") + src[pos + 1], l, cc);
          pos += 2;
          col += 2;
          continue;
        }
        fail("expected #b or #R");
      }
      switch (c) {
        case '*': one(Tok::Star); continue;
        case '\\': one(Tok::Backslash); continue;
        case ':': one(Tok::Colon); continue;
        case '.': one(Tok::Dot); continue;
        case ',': one(Tok::Comma); continue;
        case '|': one(Tok::Pipe); continue;
        case '(': one(Tok::LParen); continue;
        case ')': one(Tok::RParen); continue;
        case '[': one(Tok::LBracket); continue;
        case ']': one(Tok::RBracket); continue;
        case '=': one(Tok::Equals); continue;
        case '@': one(Tok::At); continue;
        case '!': one(Tok::Bang); continue;
        default: break;
      }
      if (std::isalpha(static_cast<unsigned char>(c))) {
        size_t start = pos;
        while (pos < src.size() &&
               (std::isalnum(static_cast<unsigned char>(src[pos])) ||
                src[pos] == '_'))
          pos++;
        std::string word = src.substr(start, pos - start);
        col += static_cast<int>(word.size());
        Tok k = Tok::Ident;
        if (word == "let") k = Tok::KwLet;
        else if (word == "in") k = Tok::KwIn;
        else if (word == "new") k = Tok::KwNew;
        else if (word == "Unit") k = Tok::KwUnit;
        else if (word == "Ch") k = Tok::KwCh;
        push(k, std::move(word), l, cc);
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        size_t start = pos;
        while (pos < src.size() &&
               std::isdigit(static_cast<unsigned char>(src[pos])))
          pos++;
        std::string word = src.substr(start, pos - start);
        col += static_cast<int>(word.size());
        push(Tok::Ident, std::move(word), l, cc);  // usages "1"/"0"
        continue;
      }
      fail(std::string("unexpected character '") + c + "'");
    }
    push(Tok::End, "", line, col);
  }
};

// ----------------------------------------------------------------- parser ---

struct Parser {
  std::vector<Token> toks;
  size_t at = 0;
  Calculus calc;
  SpanMap* spans = nullptr;

  Parser(const std::string& src, Calculus calc) : calc(calc) {
    Lexer lx(src);
    toks = std::move(lx.tokens);
  }

  const Token& peek(size_t ahead = 0) const {
    size_t i = at + ahead;
    if (i >= toks.size()) i = toks.size() - 1;
    return toks[i];
  }

  [[noreturn]] void fail(const std::string& msg) {
    const Token& t = peek();
    throw Diag(Errc::ParseError, std::to_string(t.line) + ":" +
                                     std::to_string(t.col) + ": " + msg);
  }

  Token expect(Tok k, const std::string& what) {
    if (peek().kind != k) fail("expected " + what);
    return toks[at++];
  }

  bool accept(Tok k) {
    if (peek().kind != k) return false;
    at++;
    return true;
  }

  void note_span(const void* node, const Token& t) {
    if (spans) spans->spans[node] = Span{t.line, t.col};
  }

  Ident ident() {
    Token t = expect(Tok::Ident, "identifier");
    if (std::isdigit(static_cast<unsigned char>(t.text[0])))
      fail("expected identifier");
    return ident_of_string(t.text);
  }

  // ---- types ----

  TypePtr type_atom() {
    switch (peek().kind) {
      case Tok::KwUnit:
        at++;
        return t_unit();
      case Tok::HashB:
        at++;
        return t_behavior();
      case Tok::HashR:
        at++;
        return t_result();
      case Tok::LParen: {
        at++;
        TypePtr t = type();
        expect(Tok::RParen, ")");
        return t;
      }
      case Tok::KwCh: {
        at++;
        expect(Tok::LBracket, "[");
        if (peek().kind == Tok::KwUnit && peek(1).kind == Tok::RBracket) {
          at += 2;
          return t_chan(t_unit());
        }
        std::vector<TypePtr> items;
        items.push_back(type_no_arrow());
        while (accept(Tok::Comma)) items.push_back(type_no_arrow());
        if (accept(Tok::Arrow)) {
          TypePtr codo = type();
          expect(Tok::RBracket, "]");
          return t_chan_arrow(std::move(items), std::move(codo));
        }
        // Pi channel type: the payload list with Behavior codomain.
        expect(Tok::RBracket, "]");
        return t_chan_arrow(std::move(items), t_behavior());
      }
      default:
        fail("expected a type");
    }
  }

  // A domain element inside Ch[...]: arrows need parentheses there so
  // the -> before the codomain stays unambiguous.
  TypePtr type_no_arrow() { return type_atom(); }

  TypePtr type() {
    TypePtr left = type_atom();
    if (accept(Tok::Arrow)) {
      TypePtr right = type();
      return t_arrow({left}, std::move(right));
    }
    return left;
  }

  // ---- lambda terms ----

  LamPtr lam_atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Star: {
        at++;
        auto n = l_star();
        note_span(n.get(), t);
        return n;
      }
      case Tok::Ident: {
        Ident x = ident();
        auto n = l_var(std::move(x));
        note_span(n.get(), t);
        return n;
      }
      case Tok::LParen: {
        at++;
        LamPtr m = lam_par();
        expect(Tok::RParen, ")");
        return m;
      }
      case Tok::Backslash: {
        at++;
        Ident x = ident();
        expect(Tok::Colon, ": type annotation");
        TypePtr ann = type();
        expect(Tok::Dot, ".");
        LamPtr body = lam_par();
        auto n = l_abs(std::move(x), std::move(ann), std::move(body));
        note_span(n.get(), t);
        return n;
      }
      default:
        fail("expected a term");
    }
  }

  bool lam_atom_starts() const {
    switch (peek().kind) {
      case Tok::Star:
      case Tok::Ident:
      case Tok::LParen:
      case Tok::Backslash:
        return true;
      default:
        return false;
    }
  }

  LamPtr lam_app() {
    const Token& t0 = peek();
    LamPtr head = lam_atom();
    while (lam_atom_starts()) {
      LamPtr arg = lam_atom();
      head = l_app(std::move(head), std::move(arg));
      note_span(head.get(), t0);
    }
    return head;
  }

  LamPtr lam_par() {
    const Token& t0 = peek();
    LamPtr left = lam_app();
    while (accept(Tok::Pipe)) {
      LamPtr right = lam_app();
      left = l_par(std::move(left), std::move(right));
      note_span(left.get(), t0);
    }
    return left;
  }

  // ---- administrative terms ----

  Usage usage_tag() {
    Token t = expect(Tok::Ident, "usage (inf, 1 or 0)");
    if (t.text == "inf") return Usage::Infinite;
    if (t.text == "1") return Usage::One;
    if (t.text == "0") return Usage::Zero;
    fail("expected usage inf, 1 or 0");
  }

  AdmValuePtr adm_value() {
    const Token& t = peek();
    if (accept(Tok::Star)) return v_star();
    if (t.kind == Tok::Backslash) {
      at++;
      std::vector<AdmParam> params;
      for (;;) {
        Ident x = ident();
        expect(Tok::Colon, ": type annotation");
        TypePtr ann = type();
        params.push_back(AdmParam{std::move(x), std::move(ann)});
        if (!accept(Tok::Comma)) break;
      }
      expect(Tok::Dot, ".");
      AdmDeclPtr body = adm_decl();
      return v_abs(std::move(params), std::move(body));
    }
    fail("expected a value (* or an abstraction)");
  }

  AdmTermPtr adm_atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::At: {
        at++;
        expect(Tok::LParen, "(");
        std::vector<AdmTermPtr> parts;
        parts.push_back(adm_term());
        while (accept(Tok::Comma)) parts.push_back(adm_term());
        expect(Tok::RParen, ")");
        if (parts.size() < 2) fail("application needs at least one argument");
        auto n = a_app(std::move(parts));
        note_span(n.get(), t);
        return n;
      }
      case Tok::Ident: {
        Ident x = ident();
        auto n = a_var(std::move(x));
        note_span(n.get(), t);
        return n;
      }
      case Tok::LParen: {
        at++;
        AdmTermPtr m = adm_term();
        expect(Tok::RParen, ")");
        return m;
      }
      default:
        fail("expected a term");
    }
  }

  AdmTermPtr adm_term() {
    const Token& t0 = peek();
    AdmTermPtr left = adm_atom();
    while (accept(Tok::Pipe)) {
      AdmTermPtr right = adm_atom();
      left = a_par(std::move(left), std::move(right));
      note_span(left.get(), t0);
    }
    return left;
  }

  AdmDeclPtr adm_decl() {
    const Token& t0 = peek();
    std::vector<AdmBinding> bindings;
    while (peek().kind == Tok::KwLet) {
      at++;
      expect(Tok::LBracket, "[");
      Usage u = usage_tag();
      expect(Tok::RBracket, "]");
      Ident x = ident();
      expect(Tok::Equals, "=");
      AdmValuePtr v = adm_value();
      expect(Tok::KwIn, "in");
      bindings.push_back(AdmBinding{u, std::move(x), std::move(v)});
    }
    AdmTermPtr body = adm_term();
    auto n = d_make(std::move(bindings), std::move(body));
    note_span(n.get(), t0);
    return n;
  }

  // ---- pi processes ----

  PiPtr pi_atom() {
    const Token& t = peek();
    if (t.kind == Tok::KwNew) {
      at++;
      Ident x = ident();
      expect(Tok::LParen, "(");
      bool repl = false;
      bool guarded = false;
      if (peek().kind == Tok::Bang) {
        repl = true;
        guarded = true;
        at++;
      } else if (peek().kind == Tok::Ident && peek(1).kind == Tok::LParen) {
        guarded = true;
      }
      if (guarded) {
        Token ct = peek();
        Ident ch = ident();
        if (!(ch == x))
          throw Diag(Errc::ParseError,
                     std::to_string(ct.line) + ":" + std::to_string(ct.col) +
                         ": input guard must use the restricted name " +
                         show(x));
        expect(Tok::LParen, "(");
        std::vector<Ident> params;
        params.push_back(ident());
        while (accept(Tok::Comma)) params.push_back(ident());
        expect(Tok::RParen, ")");
        expect(Tok::Dot, ".");
        PiPtr body = pi_atom();
        expect(Tok::Pipe, "| after the input guard");
        PiPtr rest = pi_par();
        expect(Tok::RParen, ")");
        auto n = p_nu(std::move(x),
                      PiGuard{repl, ch, std::move(params), std::move(body)},
                      std::move(rest));
        note_span(n.get(), t);
        return n;
      }
      PiPtr rest = pi_par();
      expect(Tok::RParen, ")");
      auto n = p_nu(std::move(x), std::nullopt, std::move(rest));
      note_span(n.get(), t);
      return n;
    }
    if (t.kind == Tok::Ident) {
      Ident ch = ident();
      expect(Tok::Bang, "! (output)");
      expect(Tok::LParen, "(");
      std::vector<Ident> args;
      args.push_back(ident());
      while (accept(Tok::Comma)) args.push_back(ident());
      expect(Tok::RParen, ")");
      auto n = p_out(std::move(ch), std::move(args));
      note_span(n.get(), t);
      return n;
    }
    if (t.kind == Tok::LParen) {
      at++;
      PiPtr p = pi_par();
      expect(Tok::RParen, ")");
      return p;
    }
    fail("expected a process");
  }

  PiPtr pi_par() {
    const Token& t0 = peek();
    PiPtr left = pi_atom();
    while (accept(Tok::Pipe)) {
      PiPtr right = pi_atom();
      left = p_par(std::move(left), std::move(right));
      note_span(left.get(), t0);
    }
    return left;
  }
};

}  // namespace

ParseResult parse_term(const std::string& src, Calculus calc) {
  Parser p(src, calc);
  ParseResult res;
  p.spans = &res.spans;
  if (calculus_is_lam(calc)) {
    LamPtr t = p.lam_par();
    p.expect(Tok::End, "end of input");
    res.term = any_of(calc, std::move(t));
  } else if (calculus_is_adm(calc)) {
    AdmDeclPtr d = p.adm_decl();
    p.expect(Tok::End, "end of input");
    res.term = any_of(calc, std::move(d));
  } else {
    PiPtr q = p.pi_par();
    p.expect(Tok::End, "end of input");
    res.term = any_of(std::move(q));
  }
  return res;
}

TypePtr parse_type(const std::string& src, Calculus calc) {
  Parser p(src, calc);
  TypePtr t = p.type();
  p.expect(Tok::End, "end of input");
  return t;
}

TypingContext parse_context(const std::string& src, Calculus calc) {
  TypingContext ctx;
  Parser p(src, calc);
  if (p.peek().kind == Tok::End) return ctx;
  for (;;) {
    Ident x = p.ident();
    p.expect(Tok::Colon, ":");
    TypePtr t = p.type();
    ctx.extend(x, std::move(t));
    if (!p.accept(Tok::Comma)) break;
  }
  p.expect(Tok::End, "end of input");
  return ctx;
}

// ---------------------------------------------------------------- printer ---

namespace {

// prec 0: top / abstraction body. prec 1: left of |, where a bare
// abstraction would swallow the rest. prec 2: right of | and function
// position. prec 3: argument position.
void show_lam_rec(const LamPtr& t, std::string& out, int prec) {
  switch (t->kind) {
    case LamKind::Star:
      out += "*";
      return;
    case LamKind::Var:
      out += show(t->var);
      return;
    case LamKind::Abs: {
      bool paren = prec >= 1;
      if (paren) out += "(";
      out += "\\" + show(t->var) + ":" + show_type(t->ann) + ". ";
      show_lam_rec(t->a, out, 0);
      if (paren) out += ")";
      return;
    }
    case LamKind::App: {
      bool paren = prec >= 3;
      if (paren) out += "(";
      show_lam_rec(t->a, out, 2);
      out += " ";
      show_lam_rec(t->b, out, 3);
      if (paren) out += ")";
      return;
    }
    case LamKind::Par: {
      bool paren = prec >= 2;
      if (paren) out += "(";
      show_lam_rec(t->a, out, 1);
      out += " | ";
      show_lam_rec(t->b, out, 2);
      if (paren) out += ")";
      return;
    }
  }
}

void show_adm_term(const AdmTermPtr& t, std::string& out, bool par_right);
void show_adm_decl(const AdmDeclPtr& d, std::string& out);

void show_adm_value(const AdmValuePtr& v, std::string& out) {
  if (v->star) {
    out += "*";
    return;
  }
  out += "\\";
  for (size_t i = 0; i < v->params.size(); ++i) {
    if (i) out += ", ";
    out += show(v->params[i].name) + ":" + show_type(v->params[i].ann);
  }
  out += ". ";
  show_adm_decl(v->body, out);
}

void show_adm_term(const AdmTermPtr& t, std::string& out, bool par_needs_paren) {
  switch (t->kind) {
    case AdmTermKind::Var:
      out += show(t->var);
      return;
    case AdmTermKind::Hole:
      out += "[]";
      return;
    case AdmTermKind::App:
      out += "@(";
      for (size_t i = 0; i < t->parts.size(); ++i) {
        if (i) out += ", ";
        show_adm_term(t->parts[i], out, false);
      }
      out += ")";
      return;
    case AdmTermKind::Par: {
      if (par_needs_paren) out += "(";
      show_adm_term(t->left, out, false);
      out += " | ";
      show_adm_term(t->right, out, true);
      if (par_needs_paren) out += ")";
      return;
    }
  }
}

void show_adm_decl(const AdmDeclPtr& d, std::string& out) {
  for (const auto& b : d->bindings) {
    out += "let[" + show_usage(b.usage) + "] " + show(b.name) + " = ";
    show_adm_value(b.value, out);
    out += " in ";
  }
  show_adm_term(d->body, out, false);
}

void show_pi_rec(const PiPtr& p, std::string& out, bool par_needs_paren) {
  switch (p->kind) {
    case PiKind::Out: {
      out += show(p->channel) + "!(";
      for (size_t i = 0; i < p->args.size(); ++i) {
        if (i) out += ", ";
        out += show(p->args[i]);
      }
      out += ")";
      return;
    }
    case PiKind::Par: {
      if (par_needs_paren) out += "(";
      show_pi_rec(p->left, out, false);
      out += " | ";
      show_pi_rec(p->right, out, true);
      if (par_needs_paren) out += ")";
      return;
    }
    case PiKind::Nu: {
      out += "new " + show(p->name) + " (";
      if (p->guard) {
        if (p->guard->replicated) out += "!";
        out += show(p->guard->channel) + "(";
        for (size_t i = 0; i < p->guard->params.size(); ++i) {
          if (i) out += ", ";
          out += show(p->guard->params[i]);
        }
        out += ").";
        show_pi_rec(p->guard->body, out, true);
        out += " | ";
        show_pi_rec(p->rest, out, false);
      } else {
        show_pi_rec(p->rest, out, false);
      }
      out += ")";
      return;
    }
  }
}

}  // namespace

std::string show(const LamPtr& t) {
  std::string out;
  show_lam_rec(t, out, 0);
  return out;
}

std::string show(const AdmValuePtr& v) {
  std::string out;
  show_adm_value(v, out);
  return out;
}

std::string show(const AdmDeclPtr& d) {
  std::string out;
  show_adm_decl(d, out);
  return out;
}

std::string show(const PiPtr& p) {
  std::string out;
  show_pi_rec(p, out, false);
  return out;
}

std::string show(const AnyTerm& t) {
  if (t.lam) return show(t.lam);
  if (t.adm) return show(t.adm);
  if (t.pi) return show(t.pi);
  return "<empty>";
}

std::string show(const TypingContext& ctx) {
  std::string out;
  for (const auto& [x, ty] : ctx.entries()) {
    if (!out.empty()) out += ", ";
    out += show(x) + " : " + show_type(ty);
  }
  return out;
}

}  // namespace picomp
