#pragma once

#include <optional>
#include <string>
#include <vector>

#include "picomp/ast.hpp"
#include "picomp/faults.hpp"
#include "picomp/typecheck.hpp"

namespace picomp {

enum class UsagePolicy { AllInfinite, Mixed };

struct GenConfig {
  uint64_t seed = 0;
  int max_size = 12;
  Calculus calculus = Calculus::LamPar;
  UsagePolicy usage_policy = UsagePolicy::AllInfinite;
  int arity_cap = 3;
  int type_depth_cap = 3;
};

struct GenTerm {
  AnyTerm term;
  TypingContext ctx;
  TypePtr type;  // null for pi
};

// Deterministic function of the configuration; the result typechecks at
// the returned type in the returned context.
GenTerm gen_typed_term(const GenConfig& cfg);

enum class DiagramKind {
  Retraction,
  AdmSimulation,
  MonadicLifting,
  CpsSimulation,
  PiRoundtrip,
  TypingPreservation,
  Termination,
};

const char* diagram_name(DiagramKind k);
std::optional<DiagramKind> diagram_of_string(const std::string& s);

struct Verdict {
  bool applicable = true;
  bool pass = true;
  std::string counterexample;  // set when !pass
  int max_depth_used = 0;      // simulation searches only
};

Verdict check_diagram(DiagramKind kind, const GenTerm& t,
                      const FaultInjection* faults = nullptr);

// The bare diagram checks, without the well-typedness gates of
// check_diagram (the simulation statements themselves are checkable on
// any term in the readback domain).
namespace diagram {
bool retraction(const LamPtr& m, const FaultInjection* faults = nullptr);
bool adm_simulation(const AdmDeclPtr& d, int* max_depth = nullptr,
                    const FaultInjection* faults = nullptr);
bool monadic_lifting(const AdmDeclPtr& d,
                     const FaultInjection* faults = nullptr);
bool cps_simulation(const TypingContext& ctx, const AdmDeclPtr& d,
                    Calculus src, int* max_depth = nullptr,
                    const FaultInjection* faults = nullptr);
}  // namespace diagram

struct KindReport {
  DiagramKind kind;
  int pass = 0;
  int fail = 0;
  int not_applicable = 0;
  int max_depth_used = 0;
  std::vector<std::string> counterexamples;  // capped
};

struct CampaignReport {
  uint64_t seed = 0;
  std::vector<KindReport> kinds;

  bool ok() const;
  // One line per kind: "<kind> <pass>/<total> maxDepthUsed=<n>".
  std::string text() const;
  std::string json() const;
};

CampaignReport run_campaign(const std::vector<DiagramKind>& kinds,
                            int corpus_size, const GenConfig& cfg,
                            const FaultInjection* faults = nullptr);

}  // namespace picomp
