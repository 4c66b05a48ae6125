// Prints one PASS/FAIL line per acceptance criterion; exits 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "flipfair/algorithms.hpp"
#include "flipfair/audit.hpp"
#include "flipfair/errors.hpp"
#include "flipfair/fixtures.hpp"
#include "flipfair/generators.hpp"
#include "flipfair/solvers.hpp"
#include "oracle/naive_audit.hpp"
#include "support.hpp"

using namespace flipfair;
using namespace flipfair::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  std::string id;
  std::string title;
  std::function<Outcome()> check;
};

// Records the first counterexample only.
class Tally {
 public:
  void fail(const std::string& what) {
    if (out_.pass) out_.detail = what;
    out_.pass = false;
  }
  void expect(bool ok, const std::function<std::string()>& what) {
    if (!ok) fail(what());
  }
  Outcome done(const std::string& summary) {
    if (out_.pass) out_.detail = summary;
    return out_;
  }

 private:
  Outcome out_;
};

std::string describe(const Instance& inst, const Allocation& a) {
  return serialize_instance(inst) + " " + to_json(a).dump();
}

std::vector<AgentId> identity(int n) {
  std::vector<AgentId> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  return order;
}

Outcome fixture(const std::string& name) {
  const FixtureReport rep = check_fixture(load_fixture(name));
  Outcome out{rep.pass(), ""};
  int ok = 0;
  for (const auto& r : rep.results) {
    if (r.pass) {
      ++ok;
    } else if (out.detail.empty()) {
      out.detail = r.id + ": " + r.detail;
    }
  }
  if (out.pass) out.detail = std::to_string(ok) + "/" + std::to_string(rep.results.size()) + " facts";
  return out;
}

Outcome round_robin_eff1() {
  Tally t;
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + trial % 3, k = 1 + (trial / 3) % 4;
    const Instance inst = random_instance(rng, n, k, 20);
    const Allocation a = round_robin(inst, identity(n));
    const Rational g = audit_allocation(inst, a).eff1;
    t.expect(g == Rational(1), [&] { return "eff1 " + g.str() + " on " + describe(inst, a); });
  }
  return t.done("1000 instances, n in 2..4, k in 1..4");
}

Outcome brr2_effx() {
  Tally t;
  std::mt19937_64 rng(202);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + trial % 3;
    const Instance inst = random_instance(rng, n, 2, 20);
    const Allocation a = balanced_round_robin_k2(inst, identity(n));
    const Rational g = audit_allocation(inst, a).effx;
    t.expect(g == Rational(1), [&] { return "effx " + g.str() + " on " + describe(inst, a); });
  }
  return t.done("1000 instances, n in 2..4, k = 2");
}

Outcome warm_up() {
  Tally t;
  std::mt19937_64 rng(303);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + trial % 3, k = 1 + (trial / 3) % 4;
    const Instance inst = random_instance(rng, n, k, 20);
    const Allocation a = random_allocation(rng, n, k);
    for (const auto& p : audit_allocation(inst, a).pairs) {
      if (!p.envies) continue;
      t.expect(p.eff1 >= Rational(1, k), [&] { return "pair below 1/k: " + describe(inst, a); });
      if (k == 2) t.expect(p.eff1 == Rational(1), [&] { return "k=2 pair below 1: " + describe(inst, a); });
    }
  }
  return t.done("1000 random allocations, n in 2..4, k in 1..4");
}

Outcome ef_implies_effx() {
  Tally t;
  std::mt19937_64 rng(404);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + trial % 3, k = 1 + (trial / 3) % 4;
    const Instance inst = random_instance(rng, n, k, 20);
    const Allocation a = random_allocation(rng, n, k);
    for (AgentId i = 0; i < n; ++i) {
      for (AgentId j = 0; j < n; ++j) {
        if (i == j) continue;
        t.expect(pair_gamma_effx(inst, a, i, j) >= pair_gamma_ef(inst, a, i, j),
                 [&] { return "effx < ef: " + describe(inst, a); });
      }
    }
  }
  return t.done("1000 random allocations");
}

Outcome ece_ordered() {
  Tally t;
  Rational worst(1);
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const int n = 2 + static_cast<int>(seed % 3), k = 1 + static_cast<int>((seed / 3) % 4);
    const Instance inst = generate(FamilySpec{Family::ordered, n, k, std::nullopt, 1, seed});
    const Allocation a = ece_k(inst);
    const Rational g = audit_allocation(inst, a).effx;
    worst = std::min(worst, g);
    t.expect(g >= Rational(1, 2), [&] { return "effx " + g.str() + " on " + describe(inst, a); });
  }
  return t.done("1000 ordered instances, worst effx " + worst.str());
}

Outcome ece_swaps_top_n() {
  Tally t;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const int n = 2 + static_cast<int>(seed % 3), k = 2 + static_cast<int>((seed / 3) % 2);
    const Rational rho_spec(static_cast<std::int64_t>(2 + seed % 5), 2);
    const Instance inst = generate(FamilySpec{Family::top_n, n, k, rho_spec, 1, seed});
    const Classification c = classify(inst);
    if (c.top_n != TopNStatus::agreement || !c.rho) {
      t.fail("generator left the family at seed " + std::to_string(seed));
      continue;
    }
    RunTrace trace;
    Allocation a;
    try {
      a = ece_swaps(inst, RunOptions{nullptr, true, &trace});
    } catch (const ImpossibleState& e) {
      t.fail(std::string("invariant: ") + e.what() + " on " + serialize_instance(inst));
      continue;
    }
    const Rational bound = std::min(Rational(1, 3), Rational(1) / (*c.rho + Rational(1)));
    const Rational g = audit_allocation(inst, a).ef;
    t.expect(g >= bound, [&] { return "ef " + g.str() + " < " + bound.str() + " on " + describe(inst, a); });
    const auto ops = operation_counter(trace);
    t.expect(ops.gets == static_cast<std::int64_t>(n) * k,
             [&] { return "gets " + std::to_string(ops.gets) + " on " + serialize_instance(inst); });
  }
  return t.done("1000 top-n instances, k in {2,3}, invariants checked every iteration");
}

Outcome ece_swaps_rho_bounded() {
  Tally t;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const int n = 2 + static_cast<int>(seed % 3), k = 1 + static_cast<int>((seed / 3) % 3);
    const Instance inst =
        generate(FamilySpec{Family::rho_bounded, n, k, Rational(static_cast<std::int64_t>(2 + seed % 5), 2), 1, seed});
    const auto rho = classify(inst).individualized_rho;
    if (!rho) {
      t.fail("no rho at seed " + std::to_string(seed));
      continue;
    }
    const Allocation a = ece_swaps(inst);
    const Rational bound = Rational(1) / (*rho + Rational(2));
    const Rational g = audit_allocation(inst, a).ef;
    t.expect(g >= bound, [&] { return "ef " + g.str() + " < " + bound.str() + " on " + describe(inst, a); });
  }
  return t.done("1000 rho-bounded instances");
}

Outcome mnw_properties() {
  Tally t;
  std::mt19937_64 rng(505);
  Rational worst(1);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 2, k = 2 + (trial / 2) % 2;
    const Instance inst = random_instance(rng, n, k, 20);
    const ObjectiveResult r = max_nash_welfare(inst, SolveOptions{kDefaultBudget, false, Exec::parallel});
    const Allocation& a = r.optima.front();
    const Rational g = audit_allocation(inst, a).eff1;
    worst = std::min(worst, g);
    t.expect(g >= Rational(1, 2), [&] { return "eff1 " + g.str() + " on " + describe(inst, a); });
    t.expect(is_pareto_optimal(inst, a).optimal, [&] { return "not PO: " + describe(inst, a); });
  }
  return t.done("200 instances, n,k in {2,3}, worst eff1 " + worst.str());
}

Outcome effx_existence() {
  Tally t;
  std::mt19937_64 rng(606);
  int trial = 0;
  auto check = [&](const Instance& inst, const char* family) {
    const auto r = effx_exists(inst, Notion::effx, Rational(1), SearchMode::first);
    t.expect(!r.found.empty(), [&] { return std::string("none for ") + family + " " + serialize_instance(inst); });
  };
  for (; trial < 400; ++trial) check(random_instance(rng, 2, 1 + trial % 4, 20), "n=2");
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const int n = 2 + static_cast<int>(seed % 2), k = 1 + static_cast<int>((seed / 2) % 3);
    check(generate(FamilySpec{Family::identical, n, k, std::nullopt, 1, seed}), "identical");
    check(generate(FamilySpec{Family::binary, n, k, std::nullopt, 1, seed}), "binary");
  }
  return t.done("400 two-agent, 300 identical, 300 binary instances");
}

Outcome naive_agreement() {
  Tally t;
  std::mt19937_64 rng(707);
  auto flip = [](const std::optional<RationalFlip>& f) {
    return f ? std::optional<std::pair<int, int>>({f->a, f->b}) : std::nullopt;
  };
  for (int trial = 0; trial < 100; ++trial) {
    const Instance inst = random_instance(rng, 2, 2, 20);
    const Allocation a = random_allocation(rng, 2, 2);
    naive::Matrix v(2);
    for (int i = 0; i < 2; ++i) {
      for (int g = 0; g < 4; ++g) v[i].push_back(inst.value(i, g).numerator().get_si());
    }
    for (AgentId i = 0; i < 2; ++i) {
      const AgentId j = 1 - i;
      const auto want = naive::audit_pair(v, a.bundles, i, j);
      const auto got = audit_pair(inst, a, i, j);
      const bool same = got.envies == want.envies && got.ef.str() == want.ef.str() &&
                        got.eff1.str() == want.eff1.str() && got.effx.str() == want.effx.str() &&
                        got.ef1_removal == want.ef1 && got.efx_removal == want.efx &&
                        flip(got.eff1_flip) == want.eff1_flip && flip(got.effx_flip) == want.effx_flip;
      t.expect(same, [&] { return "disagreement on " + describe(inst, a); });
    }
  }
  return t.done("100 instances, 200 ordered pairs");
}

}  // namespace

int main() {
  std::vector<Criterion> criteria;
  const std::vector<std::pair<std::string, std::string>> fixtures{
      {"ex1", "EFF1 = 1 while EF1 removal fails"},
      {"ex2", "EFX removal holds, EFFX = 111/120 at eps = 1/10"},
      {"ex3", "EFFX = 1, EFX removal fails, exactly 2 EFFX allocations"},
      {"genrr", "every pick sequence is below 11/1000 EFFX; an EFFX allocation exists"},
      {"ece_bad", "scripted ece_k is (5/2)/(203/2 + 1/100) EFFX"},
      {"ece_23", "ece_k gives 1001/1498 EFFX"},
      {"mnw_tight", "unique MNW optimum is 4/5 EFF1, 5/7 at k = 4"},
      {"appD1", "SW optimum is 1/2 EFF1"},
      {"appD2", "unique leximin (50,34,31) is 32/33 EFFX; an EFFX allocation exists"},
  };
  int idx = 1;
  for (const auto& [name, title] : fixtures) {
    criteria.push_back({"1." + std::to_string(idx++), name + ": " + title, [name] { return fixture(name); }});
  }
  criteria.push_back({"2.1", "round_robin is EFF1", round_robin_eff1});
  criteria.push_back({"2.2", "balanced_round_robin_k2 is EFFX", brr2_effx});
  criteria.push_back({"2.3", "envious pairs are 1/k-EFF1; k = 2 gives EFF1", warm_up});
  criteria.push_back({"2.4", "pairwise EFFX gamma >= EF gamma", ef_implies_effx});
  criteria.push_back({"2.5", "ece_k on ordered instances is 1/2-EFFX", ece_ordered});
  criteria.push_back({"2.6", "ece_swaps on top-n instances is min(1/3, 1/(rho+1))-EF, gets = nk", ece_swaps_top_n});
  criteria.push_back({"2.7", "ece_swaps on rho-bounded instances is 1/(rho+2)-EF", ece_swaps_rho_bounded});
  criteria.push_back({"2.8", "MNW optima are 1/2-EFF1 and Pareto optimal", mnw_properties});
  criteria.push_back({"2.9", "EFFX allocations exist for n = 2, identical and binary", effx_existence});
  criteria.push_back({"3", "audit matches the naive re-implementation", naive_agreement});
  criteria.push_back({"4", "no empirical experiments to reproduce; acceptance is fixture and property based",
                      [] { return Outcome{true, "informational"}; }});

  bool all = true;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.check();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    all = all && out.pass;
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.2fs", secs);
    std::cout << (out.pass ? "PASS " : "FAIL ") << c.id << " " << c.title << " [" << out.detail << "] (" << timing
              << ")" << std::endl;
  }
  return all ? 0 : 1;
}
