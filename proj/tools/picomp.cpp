#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "picomp/encodings.hpp"
#include "picomp/harness.hpp"
#include "picomp/kernel.hpp"
#include "picomp/reduce.hpp"
#include "picomp/syntax.hpp"
#include "picomp/translate.hpp"
#include "picomp/typecheck.hpp"

using namespace picomp;

namespace {

struct CommonOpts {
  std::string calculus = "lam";
  std::string expr;
  std::string file;
  std::string ctx;
};

Calculus calculus_of(const std::string& s) {
  for (Calculus c : {Calculus::Lam, Calculus::LamPar, Calculus::Adm,
                     Calculus::AdmPar, Calculus::Cps, Calculus::CpsPar,
                     Calculus::Pi})
    if (s == calculus_name(c)) return c;
  throw CLI::ValidationError("--calculus", "unknown calculus " + s);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Diag(Errc::BadArgument, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string input_of(const CommonOpts& o) {
  if (!o.expr.empty()) return o.expr;
  if (!o.file.empty()) return slurp(o.file);
  std::ostringstream ss;
  ss << std::cin.rdbuf();
  return ss.str();
}

void add_common(CLI::App* cmd, CommonOpts& o, bool with_calculus = true) {
  if (with_calculus)
    cmd->add_option("--calculus", o.calculus,
                    "lam | lam-par | adm | adm-par | cps | cps-par | pi");
  cmd->add_option("-e,--expr", o.expr, "inline source text");
  cmd->add_option("input", o.file, "input file (stdin when absent)");
  cmd->add_option("--ctx", o.ctx, "typing context, e.g. 'x : Ch[Unit]'");
}

int report_diag(const Diag& d, const SpanMap* spans) {
  std::ostream& os = std::cerr;
  os << "error: " << d.what();
  if (spans && d.node) {
    Span sp = spans->lookup(d.node);
    if (sp.line > 0) os << " at " << sp.line << ":" << sp.col;
  }
  os << "\n";
  return 1;
}

uint64_t seed_from_env(uint64_t fallback) {
  if (const char* env = std::getenv("PICOMP_SEED"))
    return std::strtoull(env, nullptr, 10);
  return fallback;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"workbench for small functional/concurrent calculi and the "
               "translations connecting them"};
  app.require_subcommand(1);

  CommonOpts check_o, eval_o, adm_o, rb_o, cps_o, topi_o, frompi_o, embed_o,
      sat_o, expand_o;

  auto* cmd_check = app.add_subcommand("check", "typecheck a term");
  add_common(cmd_check, check_o);

  auto* cmd_eval = app.add_subcommand("eval", "reduce a term");
  add_common(cmd_eval, eval_o);
  std::string strategy = "leftmost";
  long budget_steps = 100000;
  int graph_nodes = 10000;
  uint64_t eval_seed = 0;
  std::string eval_format = "pretty";
  cmd_eval->add_option("--strategy", strategy, "leftmost | all | seeded");
  cmd_eval->add_option("--budget", budget_steps, "step budget");
  cmd_eval->add_option("--graph-nodes", graph_nodes, "graph node budget");
  cmd_eval->add_option("--seed", eval_seed, "seed for the seeded strategy");
  cmd_eval->add_option("--format", eval_format, "pretty | trace");

  auto* cmd_adm = app.add_subcommand("adm", "translate lambda to "
                                            "administrative form");
  add_common(cmd_adm, adm_o);

  auto* cmd_rb = app.add_subcommand("readback", "read an administrative "
                                                "declaration back");
  add_common(cmd_rb, rb_o);

  auto* cmd_cps = app.add_subcommand("cps", "CPS-translate a declaration");
  add_common(cmd_cps, cps_o);
  std::string cont_name = "halt";
  cmd_cps->add_option("--k", cont_name, "continuation variable name");

  auto* cmd_topi = app.add_subcommand("to-pi", "translate CPS form to pi");
  add_common(cmd_topi, topi_o);

  auto* cmd_frompi = app.add_subcommand("from-pi", "translate pi to CPS form");
  add_common(cmd_frompi, frompi_o, false);

  auto* cmd_embed = app.add_subcommand("embed", "parallel-free embedding");
  add_common(cmd_embed, embed_o);
  std::string par_var = "p";
  cmd_embed->add_option("--par-var", par_var, "distinguished variable");

  auto* cmd_sat = app.add_subcommand("saturate", "set every usage to inf");
  add_common(cmd_sat, sat_o);

  auto* cmd_expand = app.add_subcommand("expand", "expand a concurrency "
                                                  "encoding");
  std::string enc_name;
  std::vector<std::string> enc_names;
  std::vector<std::string> enc_decls;
  std::vector<std::string> enc_values;
  cmd_expand->add_option("name", enc_name,
                         "output-prefix | internal-choice | external-choice | "
                         "multi-def | joined-def | lock-unlock | ccs-channel")
      ->required();
  cmd_expand->add_option("--names", enc_names, "identifier arguments");
  cmd_expand->add_option("--decl", enc_decls, "declaration arguments");
  cmd_expand->add_option("--value", enc_values, "value arguments (as "
                                                "'let[inf] v = V in v')");
  cmd_expand->add_option("--ctx", expand_o.ctx, "typing context");

  auto* cmd_verify = app.add_subcommand("verify", "run the theorem checks");
  std::vector<std::string> kinds_s;
  int corpus = 100;
  uint64_t verify_seed = 0;
  int verify_size = 12;
  std::string verify_format = "summary";
  cmd_verify->add_option("--kinds", kinds_s,
                         "retraction adm-simulation monadic-lifting "
                         "cps-simulation pi-roundtrip typing-preservation "
                         "termination (default: all)");
  cmd_verify->add_option("--corpus", corpus, "terms per kind");
  cmd_verify->add_option("--seed", verify_seed, "campaign seed");
  cmd_verify->add_option("--size", verify_size, "term size bound");
  cmd_verify->add_option("--format", verify_format, "summary | json");

  auto* cmd_gen = app.add_subcommand("gen", "generate a well-typed term");
  std::string gen_calc = "lam-par";
  uint64_t gen_seed = 0;
  int gen_size = 12;
  std::string gen_policy = "all-inf";
  cmd_gen->add_option("--calculus", gen_calc, "calculus");
  cmd_gen->add_option("--seed", gen_seed, "seed");
  cmd_gen->add_option("--size", gen_size, "size bound");
  cmd_gen->add_option("--usages", gen_policy, "all-inf | mixed");

  CLI11_PARSE(app, argc, argv);

  SpanMap spans_store;
  const SpanMap* spans = nullptr;
  try {
    if (cmd_check->parsed()) {
      Calculus calc = calculus_of(check_o.calculus);
      TypingContext ctx = parse_context(check_o.ctx, calc);
      ParseResult pr = parse_term(input_of(check_o), calc);
      spans_store = pr.spans;
      spans = &spans_store;
      TypePtr ty = infer_any(ctx, pr.term);
      std::cout << (ty ? show_type(ty) : "Ok") << "\n";
      return 0;
    }

    if (cmd_eval->parsed()) {
      Calculus calc = calculus_of(eval_o.calculus);
      ParseResult pr = parse_term(input_of(eval_o), calc);
      spans_store = pr.spans;
      spans = &spans_store;
      Strategy st = Strategy::leftmost();
      if (strategy == "all") st = Strategy::enumerate_all();
      else if (strategy == "seeded")
        st = Strategy::seeded(seed_from_env(eval_seed));
      else if (strategy != "leftmost")
        throw Diag(Errc::BadArgument, "unknown strategy " + strategy);
      StepBudget b;
      b.max_steps = budget_steps;
      b.max_graph_nodes = graph_nodes;
      EvalOutcome out =
          evaluate(pr.term, st, b, eval_format == "trace");
      if (out.kind == EvalOutcome::Graph) {
        std::cout << "nodes " << out.graph.nodes.size() << " edges "
                  << out.graph.edges.size()
                  << (out.graph.truncated ? " (truncated)" : "") << "\n";
        for (size_t i = 0; i < out.graph.nodes.size(); ++i)
          std::cout << i << ": " << show(out.graph.nodes[i].canonical) << "\n";
        for (const auto& [from, to, rule] : out.graph.edges)
          std::cout << from << " -> " << to << " [" << rule_name(rule)
                    << "]\n";
        return 0;
      }
      if (eval_format == "trace")
        for (const auto& e : out.trace)
          std::cout << e.index << " " << rule_name(e.rule) << " "
                    << show_path(e.path) << " " << e.term_after << "\n";
      if (out.kind == EvalOutcome::BudgetExhausted) {
        std::cout << "BudgetExhausted after " << out.steps << " steps: "
                  << show(out.term) << "\n";
        return 1;
      }
      std::cout << show(out.term) << "\n";
      return 0;
    }

    if (cmd_adm->parsed()) {
      Calculus calc = calculus_of(adm_o.calculus);
      if (!calculus_is_lam(calc))
        throw Diag(Errc::BadArgument, "adm starts from lam or lam-par");
      ParseResult pr = parse_term(input_of(adm_o), calc);
      spans_store = pr.spans;
      spans = &spans_store;
      std::cout << show(to_admin(pr.term.lam)) << "\n";
      return 0;
    }

    if (cmd_rb->parsed()) {
      Calculus calc = calculus_of(rb_o.calculus == "lam" ? std::string(
                                      "adm-par")
                                                         : rb_o.calculus);
      if (!calculus_is_adm(calc))
        throw Diag(Errc::BadArgument, "readback starts from the adm family");
      ParseResult pr = parse_term(input_of(rb_o), calc);
      spans_store = pr.spans;
      spans = &spans_store;
      std::cout << show(readback(pr.term.adm)) << "\n";
      return 0;
    }

    if (cmd_cps->parsed()) {
      Calculus calc = calculus_of(cps_o.calculus == "lam"
                                      ? std::string("adm-par")
                                      : cps_o.calculus);
      if (calc != Calculus::Adm && calc != Calculus::AdmPar)
        throw Diag(Errc::BadArgument, "cps starts from adm or adm-par");
      TypingContext ctx = parse_context(cps_o.ctx, calc);
      ParseResult pr = parse_term(input_of(cps_o), calc);
      spans_store = pr.spans;
      spans = &spans_store;
      std::cout << show(cps_transform(ctx, pr.term.adm,
                                      ident_of_string(cont_name), calc))
                << "\n";
      return 0;
    }

    if (cmd_topi->parsed()) {
      Calculus calc = calculus_of(topi_o.calculus == "lam"
                                      ? std::string("cps-par")
                                      : topi_o.calculus);
      if (calc != Calculus::Cps && calc != Calculus::CpsPar)
        throw Diag(Errc::BadArgument, "to-pi starts from the CPS fragment");
      ParseResult pr = parse_term(input_of(topi_o), calc);
      spans_store = pr.spans;
      spans = &spans_store;
      std::cout << show(to_pi(pr.term.adm)) << "\n";
      return 0;
    }

    if (cmd_frompi->parsed()) {
      TypingContext ctx = parse_context(frompi_o.ctx, Calculus::Pi);
      ParseResult pr = parse_term(input_of(frompi_o), Calculus::Pi);
      spans_store = pr.spans;
      spans = &spans_store;
      std::cout << show(from_pi(ctx, pr.term.pi)) << "\n";
      return 0;
    }

    if (cmd_embed->parsed()) {
      ParseResult pr = parse_term(input_of(embed_o), Calculus::LamPar);
      spans_store = pr.spans;
      spans = &spans_store;
      std::cout << show(embed_parallel(pr.term.lam,
                                       ident_of_string(par_var)))
                << "\n";
      return 0;
    }

    if (cmd_sat->parsed()) {
      TypingContext ctx = parse_context(sat_o.ctx, Calculus::AdmPar);
      ParseResult pr = parse_term(input_of(sat_o), Calculus::AdmPar);
      spans_store = pr.spans;
      spans = &spans_store;
      std::cout << show(saturate_usages(ctx, pr.term.adm)) << "\n";
      return 0;
    }

    if (cmd_expand->parsed()) {
      TypingContext ctx = parse_context(expand_o.ctx, Calculus::AdmPar);
      EncodingArgs args;
      for (const auto& n : enc_names) args.names.push_back(ident_of_string(n));
      for (const auto& src : enc_decls)
        args.decls.push_back(parse_term(src, Calculus::AdmPar).term.adm);
      for (const auto& src : enc_values) {
        AdmDeclPtr d = parse_term(src, Calculus::AdmPar).term.adm;
        if (d->bindings.size() != 1)
          throw Diag(Errc::BadArgument,
                     "value arguments are written as one-binding "
                     "declarations");
        args.values.push_back(d->bindings[0].value);
      }
      std::cout << show(expand_encoding(encoding_of_string(enc_name), args,
                                        ctx))
                << "\n";
      return 0;
    }

    if (cmd_verify->parsed()) {
      std::vector<DiagramKind> kinds;
      if (kinds_s.empty()) {
        kinds = {DiagramKind::Retraction,      DiagramKind::TypingPreservation,
                 DiagramKind::AdmSimulation,   DiagramKind::MonadicLifting,
                 DiagramKind::CpsSimulation,   DiagramKind::PiRoundtrip,
                 DiagramKind::Termination};
      } else {
        for (const auto& s : kinds_s) {
          auto k = diagram_of_string(s);
          if (!k) throw Diag(Errc::BadArgument, "unknown kind " + s);
          kinds.push_back(*k);
        }
      }
      GenConfig cfg;
      cfg.seed = seed_from_env(verify_seed);
      cfg.max_size = verify_size;
      CampaignReport report = run_campaign(kinds, corpus, cfg);
      if (verify_format == "json")
        std::cout << report.json() << "\n";
      else
        std::cout << report.text();
      return report.ok() ? 0 : 1;
    }

    if (cmd_gen->parsed()) {
      GenConfig cfg;
      cfg.calculus = calculus_of(gen_calc);
      cfg.seed = seed_from_env(gen_seed);
      cfg.max_size = gen_size;
      cfg.usage_policy = gen_policy == "mixed" ? UsagePolicy::Mixed
                                               : UsagePolicy::AllInfinite;
      GenTerm g = gen_typed_term(cfg);
      std::cout << show(g.term) << "\n";
      std::cout << "-- ctx: " << show(g.ctx) << "\n";
      if (g.type) std::cout << "-- type: " << show_type(g.type) << "\n";
      return 0;
    }
  } catch (const Diag& d) {
    return report_diag(d, spans);
  }
  return 0;
}
