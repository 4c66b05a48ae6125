#include "flipfair/cli.hpp"

#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <omp.h>

#include "CLI11.hpp"
#include "flipfair/algorithms.hpp"
#include "flipfair/audit.hpp"
#include "flipfair/errors.hpp"
#include "flipfair/fixtures.hpp"
#include "flipfair/generators.hpp"
#include "flipfair/io.hpp"
#include "flipfair/solvers.hpp"

namespace flipfair {

namespace {

constexpr int kOk = 0;
constexpr int kInput = 1;
constexpr int kUsage = 2;
constexpr int kBudget = 3;
constexpr int kFixture = 4;

class UsageError : public Error {
 public:
  using Error::Error;
};

Rational parse_rational_flag(const std::string& text, const char* flag) {
  try {
    return Rational::parse(text);
  } catch (const std::invalid_argument&) {
    throw UsageError(std::string(flag) + ": '" + text + "' is not a rational p/q");
  }
}

Json gamma_json(const Rational& g) { return Json{{"exact", g.str()}, {"approx", g.to_double()}}; }

Instance load_instance(const std::string& path) { return parse_instance(read_file(path)); }

struct SolveArgs {
  std::string instance;
  std::string alg = "rr";
  std::string order;
  std::string sequence;
  std::string script;
  std::string trace;
  bool check_invariants = false;
};

Allocation run_named(const Instance& inst, const std::string& alg, const std::vector<AgentId>& order,
                     const std::optional<PickSequence>& seq, const RunOptions& ro) {
  if (alg == "rr") return round_robin(inst, order);
  if (alg == "brr2") return balanced_round_robin_k2(inst, order);
  if (alg == "genrr") {
    if (seq) return generalized_round_robin(inst, *seq);
    return generalized_round_robin(inst, PickSequence{std::vector<std::vector<AgentId>>(
                                             static_cast<std::size_t>(inst.k()), order)});
  }
  if (alg == "ece") return ece_k(inst, ro);
  if (alg == "ece-swaps") return ece_swaps(inst, ro);
  throw UsageError("unknown algorithm '" + alg + "'");
}

std::vector<AgentId> identity_order(int n) {
  std::vector<AgentId> o(static_cast<std::size_t>(n));
  std::iota(o.begin(), o.end(), 0);
  return o;
}

Json counts_json(const OperationCounts& c) {
  return Json{{"gets", c.gets},
              {"swaps", c.swaps},
              {"privileged_swaps", c.privileged_swaps},
              {"passes", c.passes},
              {"rotations", c.rotations},
              {"iterations", c.iterations},
              {"max_consecutive_passes", c.max_consecutive_passes},
              {"max_swaps_per_holding", c.max_swaps_per_holding}};
}

int cmd_solve(const SolveArgs& a, std::ostream& out) {
  const Instance inst = load_instance(a.instance);
  const auto order = a.order.empty() ? identity_order(inst.n()) : parse_order(a.order);
  std::optional<PickSequence> seq;
  if (!a.sequence.empty()) seq = parse_pick_sequence(read_file(a.sequence));
  std::optional<SelectionScript> script;
  if (!a.script.empty()) script = parse_script(read_file(a.script));
  RunTrace trace;
  RunOptions ro{script ? &*script : nullptr, a.check_invariants, &trace};
  const Allocation alloc = run_named(inst, a.alg, order, seq, ro);
  Json doc{{"algorithm", a.alg}, {"allocation", to_json(alloc)}, {"audit", to_json(audit_allocation(inst, alloc))}};
  if (a.alg == "ece" || a.alg == "ece-swaps") {
    doc["operations"] = counts_json(operation_counter(trace));
    if (!a.trace.empty()) write_file(a.trace, trace_jsonl(trace));
  }
  out << doc.dump(2) << "\n";
  return kOk;
}

struct OracleArgs {
  std::string rule;
  std::string instance;
  std::string allocation;
  std::string notion = "effx";
  std::string gamma = "1";
  std::string mode = "first";
  std::uint64_t budget = kDefaultBudget;
  bool all_optima = false;
  bool serial = false;
};

int cmd_oracle(const OracleArgs& a, std::ostream& out) {
  const Instance inst = load_instance(a.instance);
  SolveOptions so{a.budget, a.all_optima, a.serial ? Exec::serial : Exec::parallel};
  Json doc;
  if (a.rule == "mnw") {
    doc = to_json(max_nash_welfare(inst, so));
  } else if (a.rule == "leximin") {
    doc = to_json(leximin(inst, so));
  } else if (a.rule == "sw") {
    doc = to_json(max_social_welfare(inst, so));
  } else if (a.rule == "po") {
    if (a.allocation.empty()) throw UsageError("oracle po needs --allocation");
    const Allocation alloc = parse_allocation(read_file(a.allocation));
    require_valid(inst, alloc);
    doc = to_json(is_pareto_optimal(inst, alloc, so));
  } else if (a.rule == "exists") {
    if (a.mode != "first" && a.mode != "exhaustive") throw UsageError("--mode must be first or exhaustive");
    const Rational g = parse_rational_flag(a.gamma, "--gamma");
    const Notion n = parse_notion(a.notion);
    doc = to_json(effx_exists(inst, n, g, a.mode == "first" ? SearchMode::first : SearchMode::exhaustive, so));
    doc["notion"] = notion_name(n);
    doc["gamma"] = g.str();
  } else {
    throw UsageError("unknown oracle '" + a.rule + "'");
  }
  out << doc.dump(2) << "\n";
  return kOk;
}

int cmd_audit(const std::string& instance, const std::string& allocation, bool po, std::uint64_t budget,
              std::ostream& out) {
  const Instance inst = load_instance(instance);
  const Allocation alloc = parse_allocation(read_file(allocation));
  AuditReport rep = audit_allocation(inst, alloc);
  if (po) rep.pareto_optimal = is_pareto_optimal(inst, alloc, SolveOptions{budget, false, Exec::parallel}).optimal;
  out << to_json(rep).dump(2) << "\n";
  return kOk;
}

struct ReproduceArgs {
  std::vector<std::string> names;
  std::string corpus;
  std::vector<std::string> sets;
  std::string export_dir;
  std::uint64_t budget = kDefaultBudget;
};

int cmd_reproduce(const ReproduceArgs& a, std::ostream& out) {
  if (!a.export_dir.empty()) {
    export_corpus(a.export_dir);
    if (a.names.empty()) {
      out << Json{{"exported", fixture_names()}, {"dir", a.export_dir}}.dump(2) << "\n";
      return kOk;
    }
  }
  std::map<std::string, Rational> overrides;
  for (const auto& s : a.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects NAME=p/q, got '" + s + "'");
    overrides[s.substr(0, eq)] = parse_rational_flag(s.substr(eq + 1), "--set");
  }
  if (!a.corpus.empty() && !overrides.empty()) throw UsageError("--set cannot be combined with --corpus");
  std::vector<std::string> names = a.names;
  if (names.empty() || (names.size() == 1 && names[0] == "all")) names = fixture_names();

  Json reports = Json::array();
  bool ok = true;
  for (const auto& name : names) {
    const Fixture fx = a.corpus.empty() ? load_fixture(name, overrides) : load_fixture_from_corpus(a.corpus, name);
    const FixtureReport rep = check_fixture(fx, SolveOptions{a.budget, true, Exec::parallel});
    ok = ok && rep.pass();
    Json r = to_json(rep);
    Json constants = Json::object();
    for (const auto& [k, v] : fx.constants) constants[k] = v.str();
    r["constants"] = std::move(constants);
    reports.push_back(std::move(r));
  }
  Json doc = names.size() == 1 ? reports[0] : Json{{"pass", ok}, {"fixtures", std::move(reports)}};
  out << doc.dump(2) << "\n";
  return ok ? kOk : kFixture;
}

struct GenArgs {
  std::string family = "general";
  int n = 2;
  int k = 2;
  std::uint64_t seed = 0;
  std::string rho;
  int granularity = 1;
  std::string out;
};

FamilySpec family_spec(const std::string& family, int n, int k, const std::string& rho, int granularity,
                       std::uint64_t seed) {
  FamilySpec spec;
  try {
    spec.family = parse_family(family);
  } catch (const ParseError& e) {
    throw UsageError(e.what());
  }
  spec.n = n;
  spec.k = k;
  if (!rho.empty()) spec.rho = parse_rational_flag(rho, "--rho");
  spec.granularity = granularity;
  spec.seed = seed;
  return spec;
}

int cmd_gen(const GenArgs& a, std::ostream& out) {
  const FamilySpec spec = family_spec(a.family, a.n, a.k, a.rho, a.granularity, a.seed);
  const Instance inst = generate(spec);
  std::optional<Rational> rho = spec.rho;
  if (spec.family == Family::rho_bounded && !rho) rho = Rational(2);
  const Json sidecar{{"family", family_name(spec.family)},
                     {"rho", rho ? Json(rho->str()) : Json(nullptr)},
                     {"seed", spec.seed}};
  if (!a.out.empty()) {
    write_file(a.out, serialize_instance(inst) + "\n");
    write_file(a.out + ".sidecar.json", sidecar.dump(2) + "\n");
  }
  out << Json{{"instance", to_json(inst)}, {"sidecar", sidecar}}.dump(2) << "\n";
  return kOk;
}

struct ExperimentArgs {
  std::string family = "general";
  std::string alg = "ece";
  std::string notion = "effx";
  int trials = 100;
  int n = 2;
  int k = 2;
  std::uint64_t seed = 0;
  std::string rho;
  std::string sequence;
};

struct Trial {
  Rational gamma;
  std::string error;
};

int cmd_experiment(const ExperimentArgs& a, std::ostream& out) {
  if (a.trials < 1) throw UsageError("--trials must be positive");
  const Notion notion = parse_notion(a.notion);
  std::optional<PickSequence> seq;
  if (!a.sequence.empty()) seq = parse_pick_sequence(read_file(a.sequence));
  const FamilySpec base = family_spec(a.family, a.n, a.k, a.rho, 1, a.seed);
  std::vector<Trial> results(static_cast<std::size_t>(a.trials));

#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < a.trials; ++t) {
    FamilySpec spec = base;
    spec.seed = a.seed + static_cast<std::uint64_t>(t);
    try {
      const Instance inst = generate(spec);
      const Allocation alloc = run_named(inst, a.alg, identity_order(inst.n()), seq, RunOptions{});
      results[t].gamma = gamma_of(audit_allocation(inst, alloc), notion);
    } catch (const std::exception& e) {
      results[t].error = e.what();
    }
  }

  std::size_t worst = 0;
  int at_one = 0;
  for (std::size_t t = 0; t < results.size(); ++t) {
    if (!results[t].error.empty()) {
      throw Error("trial " + std::to_string(t) + " (seed " + std::to_string(a.seed + t) + "): " + results[t].error);
    }
    if (results[t].gamma < results[worst].gamma) worst = t;
    if (results[t].gamma == Rational(1)) ++at_one;
  }
  FamilySpec wspec = base;
  wspec.seed = a.seed + worst;
  const Instance winst = generate(wspec);
  const Allocation walloc = run_named(winst, a.alg, identity_order(winst.n()), seq, RunOptions{});
  const Json doc{{"family", family_name(base.family)},
                 {"algorithm", a.alg},
                 {"notion", notion_name(notion)},
                 {"n", a.n},
                 {"k", a.k},
                 {"trials", a.trials},
                 {"seed", a.seed},
                 {"worst_gamma", gamma_json(results[worst].gamma)},
                 {"trials_at_one", at_one},
                 {"worst_trial",
                  {{"trial", worst}, {"seed", wspec.seed}, {"instance", to_json(winst)}, {"allocation", to_json(walloc)}}}};
  out << doc.dump(2) << "\n";
  return kOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact fair-division audits and algorithms for k-item bundles"};
  app.name("flipfair");
  app.require_subcommand(1);

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "run an allocation algorithm and audit its output");
  s->add_option("--instance", solve.instance, "instance JSON")->required();
  s->add_option("--alg", solve.alg, "rr | brr2 | genrr | ece | ece-swaps")
      ->check(CLI::IsMember({"rr", "brr2", "genrr", "ece", "ece-swaps"}));
  s->add_option("--order", solve.order, "agent order \"0,1,...\"");
  s->add_option("--sequence", solve.sequence, "pick sequence JSON (genrr)");
  s->add_option("--script", solve.script, "selection script JSON (ece, ece-swaps)");
  s->add_option("--trace", solve.trace, "write the iteration trace as JSON lines");
  s->add_flag("--check-invariants", solve.check_invariants, "verify run-time invariants every iteration");

  std::string audit_instance, audit_allocation_path;
  bool audit_po = false;
  std::uint64_t audit_budget = kDefaultBudget;
  auto* au = app.add_subcommand("audit", "audit an allocation");
  au->add_option("--instance", audit_instance, "instance JSON")->required();
  au->add_option("--allocation", audit_allocation_path, "allocation JSON")->required();
  au->add_flag("--po", audit_po, "also decide Pareto optimality");
  au->add_option("--budget", audit_budget, "enumeration budget");

  OracleArgs oracle;
  auto* o = app.add_subcommand("oracle", "exhaustive solvers");
  o->add_option("rule", oracle.rule, "mnw | leximin | sw | po | exists")
      ->required()
      ->check(CLI::IsMember({"mnw", "leximin", "sw", "po", "exists"}));
  o->add_option("--instance", oracle.instance, "instance JSON")->required();
  o->add_option("--allocation", oracle.allocation, "allocation JSON (po)");
  o->add_option("--notion", oracle.notion, "ef | eff1 | effx (exists)");
  o->add_option("--gamma", oracle.gamma, "threshold p/q (exists)");
  o->add_option("--mode", oracle.mode, "first | exhaustive (exists)");
  o->add_option("--budget", oracle.budget, "enumeration budget");
  o->add_flag("--all-optima", oracle.all_optima, "list every optimum");
  o->add_flag("--serial", oracle.serial, "single-threaded reference scan");

  ReproduceArgs repro;
  auto* r = app.add_subcommand("reproduce", "check fixtures");
  r->add_option("name", repro.names, "fixture names, or all");
  r->add_option("--corpus", repro.corpus, "load fixtures from a corpus directory");
  r->add_option("--set", repro.sets, "override a constant, NAME=p/q");
  r->add_option("--export", repro.export_dir, "write the corpus to a directory");
  r->add_option("--budget", repro.budget, "enumeration budget");

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "generate a random instance");
  g->add_option("--family", gen.family, "general | ordered | top-n-agreement | rho-bounded | identical | binary");
  g->add_option("--n", gen.n, "agents");
  g->add_option("--k", gen.k, "items per agent");
  g->add_option("--seed", gen.seed, "random seed");
  g->add_option("--rho", gen.rho, "rho bound p/q");
  g->add_option("--granularity", gen.granularity, "values are multiples of 1/granularity");
  g->add_option("--out", gen.out, "also write the instance and PATH.sidecar.json");

  ExperimentArgs exp;
  auto* e = app.add_subcommand("experiment", "worst gamma over seeded random trials");
  e->add_option("--family", exp.family, "generator family");
  e->add_option("--alg", exp.alg, "rr | brr2 | genrr | ece | ece-swaps")
      ->check(CLI::IsMember({"rr", "brr2", "genrr", "ece", "ece-swaps"}));
  e->add_option("--notion", exp.notion, "ef | eff1 | effx");
  e->add_option("--trials", exp.trials, "number of trials");
  e->add_option("--n", exp.n, "agents");
  e->add_option("--k", exp.k, "items per agent");
  e->add_option("--seed", exp.seed, "seed of trial 0; trial t uses seed + t");
  e->add_option("--rho", exp.rho, "rho bound p/q");
  e->add_option("--sequence", exp.sequence, "pick sequence JSON (genrr)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*s) return cmd_solve(solve, out);
    if (*au) return cmd_audit(audit_instance, audit_allocation_path, audit_po, audit_budget, out);
    if (*o) return cmd_oracle(oracle, out);
    if (*r) return cmd_reproduce(repro, out);
    if (*g) return cmd_gen(gen, out);
    if (*e) return cmd_experiment(exp, out);
  } catch (const UsageError& ex) {
    err << "usage error: " << ex.what() << "\n";
    return kUsage;
  } catch (const BudgetExceeded& ex) {
    err << "budget refused: " << ex.what() << "\n";
    return kBudget;
  } catch (const Error& ex) {
    err << "error: " << ex.what() << "\n";
    return kInput;
  }
  return kUsage;
}

}  // namespace flipfair
