#include "picomp/diag.hpp"

namespace picomp {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::UnboundVariable: return "UnboundVariable";
    case Errc::ArityMismatch: return "ArityMismatch";
    case Errc::BehaviorMisuse: return "BehaviorMisuse";
    case Errc::RecursiveDefinition: return "RecursiveDefinition";
    case Errc::UsageViolation: return "UsageViolation";
    case Errc::NotInFragment: return "NotInFragment";
    case Errc::TypeMismatch: return "TypeMismatch";
    case Errc::SortMismatch: return "SortMismatch";
    case Errc::StaleRedex: return "StaleRedex";
    case Errc::UsageNotInfinite: return "UsageNotInfinite";
    case Errc::NotCpsShape: return "NotCpsShape";
    case Errc::UntypablePi: return "UntypablePi";
    case Errc::CannotSaturate: return "CannotSaturate";
    case Errc::IllTypedArgument: return "IllTypedArgument";
    case Errc::BadArgument: return "BadArgument";
    case Errc::ParseError: return "ParseError";
  }
  return "Error";
}

}  // namespace picomp
