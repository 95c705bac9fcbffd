#pragma once

#include "picomp/ast.hpp"
#include "picomp/typecheck.hpp"

namespace picomp {

enum class EncodingName {
  OutputPrefix,
  InternalChoice,
  ExternalChoice,
  MultiDef,
  JoinedDef,
  LockUnlock,
  CcsChannel,
};

const char* encoding_name(EncodingName e);
EncodingName encoding_of_string(const std::string& s);

// Arguments, per encoding (names / declarations / values in order):
//   OutputPrefix    names = {x, y}          decls = {D}
//   InternalChoice                          decls = {M, N}
//   ExternalChoice  names = {y}             decls = {M, N, D}
//   MultiDef        names = {x}             decls = {D}, values = {V1..Vn}
//   JoinedDef       names = {x1..xn}        decls = {D}, values = {V1..Vn}
//   LockUnlock      names = {ack, lock}     decls = {M}
//   CcsChannel      names = {in, out}       decls = {M}
struct EncodingArgs {
  std::vector<Ident> names;
  std::vector<AdmDeclPtr> decls;
  std::vector<AdmValuePtr> values;
};

// Literal expansion into the concurrent administrative calculus, fresh
// internal names, typechecked against `ctx` at the types the encoding
// demands.
AdmDeclPtr expand_encoding(EncodingName which, const EncodingArgs& args,
                           const TypingContext& ctx);

}  // namespace picomp
