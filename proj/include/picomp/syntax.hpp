#pragma once

#include <string>
#include <unordered_map>

#include "picomp/ast.hpp"

namespace picomp {

class TypingContext;

struct Span {
  int line = 0;
  int col = 0;
};

// Source positions for parsed nodes, keyed by node address. Nodes built
// by rewriting have no span.
struct SpanMap {
  std::unordered_map<const void*, Span> spans;

  Span lookup(const void* node) const {
    auto it = spans.find(node);
    return it == spans.end() ? Span{} : it->second;
  }
};

struct ParseResult {
  AnyTerm term;
  SpanMap spans;
};

// Grammar (ASCII):
//   types    Unit | #b | #R | Ch[Unit] | Ch[T, ..., T -> T] | T -> T
//   lambda   * | ident | \x:T. M | M M (left assoc) | M | M | ( M )
//   adm      let[inf|1|0] x = V in D | @(M, M, ...) | ident | M | M
//            V ::= * | \x:T, ..., y:T. D
//   pi       new x (P) | new x ( x(y,...).P | P ) | new x ( !x(y,...).P | P )
//            | x!(y,...) | P | P
ParseResult parse_term(const std::string& src, Calculus calc);
TypePtr parse_type(const std::string& src, Calculus calc);

// "x : T, y : T" (empty string allowed).
TypingContext parse_context(const std::string& src, Calculus calc);

std::string show(const LamPtr& t);
std::string show(const AdmValuePtr& v);
std::string show(const AdmDeclPtr& d);
std::string show(const PiPtr& p);
std::string show(const AnyTerm& t);

}  // namespace picomp
