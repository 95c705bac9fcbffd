#pragma once

#include <stdexcept>
#include <string>

namespace picomp {

enum class Errc {
  UnboundVariable,
  ArityMismatch,
  BehaviorMisuse,
  RecursiveDefinition,
  UsageViolation,
  NotInFragment,
  TypeMismatch,
  SortMismatch,
  StaleRedex,
  UsageNotInfinite,
  NotCpsShape,
  UntypablePi,
  CannotSaturate,
  IllTypedArgument,
  BadArgument,
  ParseError,
};

const char* errc_name(Errc c);

// Every recoverable failure in the library is reported as a Diag.
// `node` points at the offending AST node when one exists; the CLI maps
// it back to a source span.
class Diag : public std::runtime_error {
 public:
  Diag(Errc code, const std::string& message, const void* node = nullptr)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code(code),
        node(node) {}

  Errc code;
  const void* node;
};

}  // namespace picomp
