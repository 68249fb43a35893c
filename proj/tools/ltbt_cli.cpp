// Command-line frontend: equivalence checking, model checking, formula
// emission and random-instance generation.
//
// Exit codes: 0 equivalent / success, 1 not equivalent, 2 error,
// 3 engine disagreement (--engine all).

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ltbt/ltbt.hpp"

namespace {

using namespace ltbt;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::optional<std::vector<Action>> parse_alphabet(const std::string& csv) {
  if (csv.empty()) return std::nullopt;
  std::vector<Action> out;
  std::string cur;
  std::istringstream ss(csv);
  while (std::getline(ss, cur, ',')) out.emplace_back(cur);
  return out;
}

Lts load_lts(const std::string& path, const std::optional<std::vector<Action>>& alphabet) {
  try {
    return parse_aut(read_file(path), alphabet);
  } catch (const parse_error& e) {
    throw error(path + ":" + e.what());
  }
}

void print_stats(const EvalStats& st) {
  std::cout << "stats: iterations=" << st.mu_iterations
            << " table-entries=" << st.table_entries
            << " explored-arguments=" << st.explored_nodes;
  if (st.solve_rounds) std::cout << " solve-rounds=" << st.solve_rounds;
  std::cout << "\n";
  for (const auto& m : st.mu_stats)
    std::cout << "stats: fixpoint " << m.name << " arity=" << m.arity
              << " entries-per-sweep=" << m.entries_per_sweep << " sweeps=" << m.sweeps << "\n";
}

std::string treq_to_dot(const TreqRun& run) {
  std::string out = "digraph deps {\n  rankdir=LR;\n";
  for (std::size_t i = 0; i < run.nodes.size(); ++i)
    out += "  n" + std::to_string(i) + " [label=\"" + run.nodes[i].first.to_string() + "\\n" +
           run.nodes[i].second.to_string() + "\"" + (i == run.root ? ",shape=box" : "") + "];\n";
  for (std::size_t i = 0; i < run.edges.size(); ++i)
    for (std::size_t a = 0; a < run.edges[i].size(); ++a)
      out += "  n" + std::to_string(i) + " -> n" + std::to_string(run.edges[i][a]) +
             " [label=\"site" + std::to_string(a) + "\"];\n";
  return out + "}\n";
}

struct CheckArgs {
  std::string lts1, lts2;
  std::uint32_t p = 0, q = 0;
  std::string equiv, engine = "oracle", alphabet, dump_deps;
  bool stats = false, force = false;
  std::size_t node_budget = std::size_t(1) << 16;
};

int run_check(const CheckArgs& a) {
  auto alphabet = parse_alphabet(a.alphabet);
  Lts l1 = load_lts(a.lts1, alphabet);
  Lts l2 = load_lts(a.lts2, alphabet);
  auto eq = equivalence_from_name(a.equiv);
  if (!eq) throw error("unknown equivalence: " + a.equiv);

  EvalOptions opts;
  opts.force = a.force;
  opts.node_budget = a.node_budget;
  std::string dots;
  if (!a.dump_deps.empty())
    opts.dot_observer = [&dots](const std::string& d) { dots += d; };

  std::cout << "checking " << equivalence_name(*eq) << " between " << a.lts1 << " state " << a.p
            << " and " << a.lts2 << " state " << a.q
            << " (second LTS states in file-local numbering)\n";

  auto finish_dots = [&]() {
    if (a.dump_deps.empty()) return;
    if (*eq == EquivalenceId::Trace && dots.empty()) {
      // Algorithm 2's graph for the treq engine
      dots = treq_to_dot(treq_run(l1, l2, opts.node_budget));
    }
    std::ofstream out(a.dump_deps);
    out << dots;
  };

  if (a.engine == "all") {
    std::vector<std::pair<std::string, std::string>> verdicts;
    std::optional<bool> first;
    bool disagree = false;
    for (Engine e : {Engine::Naive, Engine::NeedDriven, Engine::Treq, Engine::Oracle}) {
      if (e == Engine::Treq && *eq != EquivalenceId::Trace) continue;
      if ((e == Engine::Naive || e == Engine::NeedDriven) &&
          *eq == EquivalenceId::PossibleFutures)
        continue;
      try {
        CheckResult r = check_equivalence(l1, a.p, l2, a.q, *eq, e, opts);
        verdicts.emplace_back(engine_name(e), r.equivalent ? "EQUIVALENT" : "NOT EQUIVALENT");
        if (!first)
          first = r.equivalent;
        else if (*first != r.equivalent)
          disagree = true;
        if (a.stats) print_stats(r.stats);
      } catch (const eval_error& ex) {
        verdicts.emplace_back(engine_name(e), std::string("skipped (") + ex.what() + ")");
      }
    }
    for (const auto& [name, v] : verdicts) std::cout << name << ": " << v << "\n";
    finish_dots();
    if (disagree) {
      std::cout << "ENGINES DISAGREE\n";
      return 3;
    }
    std::cout << (*first ? "EQUIVALENT" : "NOT EQUIVALENT") << "\n";
    return *first ? 0 : 1;
  }

  auto eng = engine_from_name(a.engine);
  if (!eng) throw error("unknown engine: " + a.engine + " (naive|needdriven|treq|oracle|all)");
  CheckResult r = check_equivalence(l1, a.p, l2, a.q, *eq, *eng, opts);
  if (a.stats) print_stats(r.stats);
  finish_dots();
  std::cout << (r.equivalent ? "EQUIVALENT" : "NOT EQUIVALENT") << "\n";
  return r.equivalent ? 0 : 1;
}

struct ModelCheckArgs {
  std::string lts1, lts2, formula_file, expr, engine = "naive", alphabet;
  bool force = false;
};

int run_modelcheck(const ModelCheckArgs& a) {
  auto alphabet = parse_alphabet(a.alphabet);
  Lts l1 = load_lts(a.lts1, alphabet);
  Lts l2 = load_lts(a.lts2, alphabet);
  if (a.formula_file.empty() == a.expr.empty())
    throw error("exactly one of --formula and --expr is required");
  std::string text = a.expr.empty() ? read_file(a.formula_file) : a.expr;
  Formula phi = parse_formula(text, 2);
  LogicType t = type_check_closed(phi);
  if (!(t.is_prop() && t.prop_dim() == 2))
    throw error("formula has type " + t.to_string() + ", expected P2");
  if (order_of(phi) > 1) throw error("formula has order " + std::to_string(order_of(phi)) +
                                     "; only order <= 1 is evaluable");

  EvalOptions opts;
  opts.force = a.force;
  Rel2 rel(0, 0);
  if (a.engine == "naive")
    rel = mc_rel(phi, {}, l1, l2, opts);
  else if (a.engine == "needdriven")
    rel = mc_need_driven_rel(phi, {}, l1, l2, opts);
  else
    throw error("unknown engine: " + a.engine + " (naive|needdriven)");

  std::cout << "satisfying pairs (p from " << a.lts1 << ", q from " << a.lts2
            << "; file-local numbering):\n";
  rel.for_each_pair(
      [](StateId p, StateId q) { std::cout << "(" << p << "," << q << ")\n"; });
  return 0;
}

struct EmitArgs {
  std::string equiv, alphabet = "a,b";
  bool tester = false, characteriser = false;
  std::size_t bound = 4;
};

int run_emit(const EmitArgs& a) {
  auto eq = equivalence_from_name(a.equiv);
  if (!eq) throw error("unknown equivalence: " + a.equiv);
  auto alphabet = parse_alphabet(a.alphabet);
  if (!alphabet || alphabet->empty()) throw error("--alphabet must list at least one action");
  if (a.tester && a.characteriser) throw error("choose one of --tester and --characteriser");
  Formula f = a.tester ? tester_formula(*eq, *alphabet, a.bound)
                       : defining_formula(*eq, *alphabet, a.bound);
  std::cout << to_text(f) << "\n";
  return 0;
}

struct GenArgs {
  std::uint32_t states = 3, actions = 2;
  double density = 0.3;
  std::uint64_t seed = 0;
};

int run_gen(const GenArgs& a) {
  std::cout << gen_random_aut(a.states, a.actions, a.density, a.seed);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"process equivalence checking on labeled transition systems"};
  app.require_subcommand(1);

  CheckArgs ca;
  auto* check = app.add_subcommand("check", "decide a process equivalence for a state pair");
  check->add_option("--lts1", ca.lts1, ".aut file of the first LTS")->required();
  check->add_option("--lts2", ca.lts2, ".aut file of the second LTS")->required();
  check->add_option("--p", ca.p, "state of the first LTS")->required();
  check->add_option("--q", ca.q, "state of the second LTS (file-local numbering)")->required();
  check->add_option("--equiv", ca.equiv, "equivalence name, e.g. trace, bisimulation")
      ->required();
  check->add_option("--engine", ca.engine, "naive|needdriven|treq|oracle|all (default oracle)");
  check->add_option("--alphabet", ca.alphabet, "declared shared alphabet, e.g. a,b");
  check->add_flag("--stats", ca.stats, "print iteration statistics");
  check->add_option("--dump-deps", ca.dump_deps, "write the dependency graph as DOT");
  check->add_flag("--force", ca.force, "override the naive tabulation guardrail");
  check->add_option("--node-budget", ca.node_budget, "need-driven exploration budget");

  ModelCheckArgs ma;
  auto* mc = app.add_subcommand("modelcheck", "list the pairs satisfying a closed P2 formula");
  mc->add_option("--lts1", ma.lts1)->required();
  mc->add_option("--lts2", ma.lts2)->required();
  mc->add_option("--formula", ma.formula_file, "file with a formula in the surface grammar");
  mc->add_option("--expr", ma.expr, "formula text");
  mc->add_option("--engine", ma.engine, "naive|needdriven (default naive)");
  mc->add_option("--alphabet", ma.alphabet, "declared shared alphabet");
  mc->add_flag("--force", ma.force, "override the naive tabulation guardrail");

  EmitArgs ea;
  auto* emit = app.add_subcommand("emit-formula", "print the formula for an equivalence");
  emit->add_option("--equiv", ea.equiv)->required();
  emit->add_option("--alphabet", ea.alphabet, "action alphabet (default a,b)");
  emit->add_flag("--tester", ea.tester, "emit the testing formula phi_R");
  emit->add_flag("--characteriser", ea.characteriser,
                 "emit the characterising formula !phi_R & !swap(phi_R) (default)");
  emit->add_option("--bound", ea.bound, "alphabet bound for subset-enumerating rows");

  GenArgs ga;
  auto* gen = app.add_subcommand("gen-random", "emit a reproducible pseudo-random .aut");
  gen->add_option("--states", ga.states)->required();
  gen->add_option("--actions", ga.actions)->required();
  gen->add_option("--density", ga.density, "transition probability in [0,1]")->required();
  gen->add_option("--seed", ga.seed)->required();

  try {
    app.parse(argc, argv);
    if (*check) return run_check(ca);
    if (*mc) return run_modelcheck(ma);
    if (*emit) return run_emit(ea);
    if (*gen) return run_gen(ga);
    return 2;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const parse_error& e) {
    std::cerr << "parse error at " << e.what() << "\n";
    return 2;
  } catch (const type_error& e) {
    std::cerr << "type error at " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
