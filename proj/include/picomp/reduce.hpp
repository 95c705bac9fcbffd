#pragma once

#include <string>
#include <vector>

#include "picomp/ast.hpp"
#include "picomp/faults.hpp"

namespace picomp {

struct StepBudget {
  long max_steps = 100000;
  int max_graph_nodes = 10000;
};

// Complete enumeration of evaluation-context decompositions where a
// rule applies, leftmost-outermost first. Within one application only
// the leftmost non-value position is an evaluation position; the
// parallel operator contributes redexes on both sides. Calls on
// 0-usage bindings and outputs on guardless restrictions are not
// redexes.
std::vector<RedexDescriptor> find_redexes(const LamPtr& t);
std::vector<RedexDescriptor> find_redexes(const AdmDeclPtr& d);
std::vector<RedexDescriptor> find_redexes(const PiPtr& p);
std::vector<RedexDescriptor> find_redexes(const AnyTerm& t);

// Reduction of the embedding target: call-by-value beta anywhere not
// under a lambda.
std::vector<RedexDescriptor> find_redexes_lam_p(const LamPtr& t);

// Number of arguments consumed by the redex (1 for lambda beta).
int redex_arity(const AnyTerm& t, const RedexDescriptor& r);

// Contract exactly the given redex. Throws StaleRedex if the
// descriptor no longer matches the term.
LamPtr step_at(const LamPtr& t, const RedexDescriptor& r);
AdmDeclPtr step_at(const AdmDeclPtr& d, const RedexDescriptor& r,
                   const FaultInjection* faults = nullptr);
PiPtr step_at(const PiPtr& p, const RedexDescriptor& r);
AnyTerm step_at(const AnyTerm& t, const RedexDescriptor& r,
                const FaultInjection* faults = nullptr);

enum class StrategyKind { Leftmost, EnumerateAll, Seeded };

struct Strategy {
  StrategyKind kind = StrategyKind::Leftmost;
  uint64_t seed = 0;

  static Strategy leftmost() { return {StrategyKind::Leftmost, 0}; }
  static Strategy enumerate_all() { return {StrategyKind::EnumerateAll, 0}; }
  static Strategy seeded(uint64_t s) { return {StrategyKind::Seeded, s}; }
};

struct TraceEntry {
  int index;
  RedexRule rule;
  Path path;
  std::string term_after;  // pretty form
};

struct ReductionGraph {
  struct Node {
    AnyTerm canonical;      // congruence-class representative key
    AnyTerm representative; // a concrete reachable term in the class
  };
  std::vector<Node> nodes;
  // edges (from node, to node, rule)
  std::vector<std::tuple<int, int, RedexRule>> edges;
  bool truncated = false;
};

struct EvalOutcome {
  enum Kind { NormalForm, BudgetExhausted, Graph } kind;
  AnyTerm term;  // final term (NormalForm) or last term (BudgetExhausted)
  long steps = 0;
  std::vector<TraceEntry> trace;
  ReductionGraph graph;  // EnumerateAll only
};

EvalOutcome evaluate(const AnyTerm& t, Strategy strategy, StepBudget budget,
                     bool record_trace = false,
                     const FaultInjection* faults = nullptr);

}  // namespace picomp
