#pragma once

namespace picomp {

// Deliberate implementation faults, injectable by the mutation-
// sensitivity suite. Production paths pass nullptr.
struct FaultInjection {
  // step_at keeps the fired binding's usage instead of decrementing.
  bool skip_usage_decrement = false;
  // readback applies the let-prefix substitutions outermost-first.
  bool swap_readback_substitution = false;
  // the CPS translation leaves a bare variable body untranslated,
  // dropping the administrative continuation call.
  bool drop_cps_administrative_step = false;
};

}  // namespace picomp
