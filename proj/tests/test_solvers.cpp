#include <gtest/gtest.h>

#include <random>
#include <set>

#include "flipfair/audit.hpp"
#include "flipfair/errors.hpp"
#include "flipfair/generators.hpp"
#include "flipfair/solvers.hpp"
#include "support.hpp"

using namespace flipfair;
using namespace flipfair::testing;

namespace {

const SolveOptions kSerial{kDefaultBudget, true, Exec::serial};
const SolveOptions kParallel{kDefaultBudget, true, Exec::parallel};

Instance mnw_table(int k, std::int64_t c) {
  std::vector<Rational> v0(2 * k, R(0)), v1(2 * k, R(1));
  for (int g = 0; g < k; ++g) {
    v0[g] = R(c);
    v1[g] = R(2);
  }
  return Instance(2, k, {v0, v1});
}

std::vector<Allocation> every_allocation(int n, int k) {
  std::vector<Allocation> out;
  enumerate_allocations(n, k, [&](const Allocation& a) {
    out.push_back(a);
    return true;
  });
  return out;
}

}  // namespace

TEST(Enumerate, Counts) {
  EXPECT_EQ(every_allocation(2, 2).size(), 6u);
  EXPECT_EQ(every_allocation(3, 3).size(), 1680u);
  EXPECT_EQ(every_allocation(2, 3).size(), 20u);
  EXPECT_EQ(allocation_count(3, 3), 1680);
  EXPECT_EQ(allocation_count(2, 4), 70);
  EXPECT_EQ(allocation_count(4, 4), mpz_class("63063000"));
}

TEST(Enumerate, EveryOutputIsADistinctPartition) {
  const auto all = every_allocation(3, 2);
  std::set<Allocation> seen(all.begin(), all.end());
  EXPECT_EQ(seen.size(), all.size());
  for (const auto& a : all) EXPECT_TRUE(validate_allocation(zeros(3, 2), a).empty());
  EXPECT_EQ(all.front(), alloc({{0, 1}, {2, 3}, {4, 5}}));
}

TEST(Enumerate, VisitorStopsEarly) {
  int seen = 0;
  enumerate_allocations(3, 3, [&](const Allocation&) { return ++seen < 5; });
  EXPECT_EQ(seen, 5);
}

TEST(Budget, RefusesLargeEnumerations) {
  try {
    max_nash_welfare(zeros(4, 4), SolveOptions{1000});
    FAIL() << "expected BudgetExceeded";
  } catch (const BudgetExceeded& e) {
    EXPECT_EQ(e.count(), "63063000");
    EXPECT_EQ(e.budget(), "1000");
  }
  EXPECT_THROW(enumerate_allocations(3, 3, [](const Allocation&) { return true; }, 100), BudgetExceeded);
  EXPECT_NO_THROW(check_budget(3, 3, 1680));
}

TEST(Mnw, TableInstanceUniqueOptimum) {
  for (auto opts : {kSerial, kParallel}) {
    const auto r = max_nash_welfare(mnw_table(3, 2), opts);
    ASSERT_EQ(r.count, 1u);
    EXPECT_EQ(r.optima.front(), alloc({{0, 1, 2}, {3, 4, 5}}));
    EXPECT_EQ(r.positive_count, 2);
    EXPECT_EQ(r.objective, R(18));
  }
}

TEST(Mnw, AllZeroEveryAllocationOptimal) {
  const auto r = max_nash_welfare(zeros(2, 2));
  EXPECT_EQ(r.count, 6u);
  EXPECT_EQ(r.positive_count, 0);
}

TEST(Mnw, Example2MatchesBruteForce) {
  const Instance inst = example2();
  int best_pos = -1;
  Rational best_prod(0);
  std::vector<Allocation> best;
  for (const auto& a : every_allocation(2, 2)) {
    int pos = 0;
    Rational prod(1);
    for (AgentId i = 0; i < 2; ++i) {
      const Rational v = value_of(inst, i, a.bundles[i]);
      if (v > R(0)) {
        ++pos;
        prod *= v;
      }
    }
    if (pos > best_pos || (pos == best_pos && prod > best_prod)) {
      best_pos = pos;
      best_prod = prod;
      best = {a};
    } else if (pos == best_pos && prod == best_prod) {
      best.push_back(a);
    }
  }
  const auto r = max_nash_welfare(inst);
  EXPECT_EQ(r.optima, best);
  EXPECT_EQ(r.objective, best_prod);
}

TEST(Mnw, FractionalValuesAreScaledExactly) {
  const Instance inst(2, 1, {{R(1, 3), R(1, 2)}, {R(1, 5), R(1, 7)}});
  const auto r = max_nash_welfare(inst);
  EXPECT_EQ(r.optima.front(), alloc({{1}, {0}}));
  EXPECT_EQ(r.objective, R(1, 10));
}

TEST(Leximin, AppendixD2) {
  const auto r = leximin(appendix_d2());
  ASSERT_EQ(r.count, 1u);
  EXPECT_EQ(r.optima.front(), alloc({{0, 7, 8}, {2, 3, 5}, {1, 4, 6}}));
  EXPECT_EQ(r.sorted_values, (std::vector<Rational>{R(31), R(34), R(50)}));
}

TEST(Leximin, AllZeroAndSymmetricSplit) {
  EXPECT_EQ(leximin(zeros(2, 2)).count, 6u);
  const Instance inst(2, 1, {row({3, 1}), row({3, 1})});
  const auto r = leximin(inst);
  EXPECT_EQ(r.count, 2u);
  EXPECT_EQ(r.sorted_values, (std::vector<Rational>{R(1), R(3)}));
}

TEST(SocialWelfare, AppendixD1) {
  std::vector<Rational> vi(9, R(0)), vj(9, R(0)), vl(9, R(0));
  for (int g = 0; g < 3; ++g) {
    vi[g] = R(3);
    vj[g] = R(1);
  }
  vj[6] = R(9);
  vl[6] = R(12);
  const auto r = max_social_welfare(Instance(3, 3, {vi, vj, vl}));
  ASSERT_GT(r.count, 0u);
  for (const auto& a : r.optima) EXPECT_EQ(a.bundles[0], (Bundle{0, 1, 2}));
}

TEST(SocialWelfare, AllZeroAndIdentical) {
  const auto z = max_social_welfare(zeros(2, 2));
  EXPECT_EQ(z.count, 6u);
  EXPECT_EQ(z.objective, R(0));
  const auto e = max_social_welfare(example3());
  EXPECT_EQ(e.count, 6u);
  EXPECT_EQ(e.objective, R(20) + R(101, 100) + R(1) + R(1, 100));
}

TEST(AllOptima, FlagControlsListing) {
  const auto r = max_social_welfare(zeros(2, 2), SolveOptions{kDefaultBudget, false});
  EXPECT_EQ(r.count, 6u);
  EXPECT_EQ(r.optima.size(), 1u);
  EXPECT_EQ(r.optima.front(), alloc({{0, 1}, {2, 3}}));
}

TEST(Pareto, SwapCertificate) {
  const Instance inst(2, 1, {row({1, 2}), row({2, 1})});
  const auto r = is_pareto_optimal(inst, alloc({{0}, {1}}));
  EXPECT_FALSE(r.optimal);
  ASSERT_TRUE(r.certificate.has_value());
  EXPECT_EQ(*r.certificate, alloc({{1}, {0}}));
  EXPECT_TRUE(is_pareto_optimal(inst, alloc({{1}, {0}})).optimal);
}

TEST(Exists, Table2) {
  const auto r = effx_exists(table2(), Notion::effx, R(1), SearchMode::exhaustive);
  EXPECT_NE(std::find(r.found.begin(), r.found.end(), alloc({{0, 4, 5}, {1, 2, 3}})), r.found.end());
}

TEST(Exists, AppendixD2) {
  const auto r = effx_exists(appendix_d2(), Notion::effx, R(1), SearchMode::exhaustive);
  EXPECT_NE(std::find(r.found.begin(), r.found.end(), alloc({{0, 7, 8}, {2, 3, 6}, {1, 4, 5}})), r.found.end());
  const auto first = effx_exists(appendix_d2(), Notion::effx, R(1), SearchMode::first);
  ASSERT_EQ(first.found.size(), 1u);
  EXPECT_EQ(first.found.front(), r.found.front());
}

TEST(Exists, Example3ExactlyTwo) {
  const auto r = effx_exists(example3(), Notion::effx, R(1), SearchMode::exhaustive);
  std::vector<Allocation> want{alloc({{0, 3}, {1, 2}}), alloc({{1, 2}, {0, 3}})};
  auto got = r.found;
  std::sort(got.begin(), got.end());
  std::sort(want.begin(), want.end());
  EXPECT_EQ(got, want);
}

TEST(Exists, ThresholdAboveOneFindsNothing) {
  EXPECT_TRUE(effx_exists(zeros(2, 2), Notion::effx, R(3, 2), SearchMode::first).found.empty());
  EXPECT_EQ(effx_exists(zeros(2, 2), Notion::effx, R(1), SearchMode::exhaustive).found.size(), 6u);
}

TEST(Exists, AgreesWithAuditOnEveryAllocation) {
  std::mt19937_64 rng(61);
  for (int t = 0; t < 40; ++t) {
    const Instance inst = random_instance(rng, 3, 2, 9, 2);
    const Rational threshold(static_cast<std::int64_t>(uniform_int(rng, 1, 6)), 6);
    for (Notion notion : {Notion::ef, Notion::eff1, Notion::effx}) {
      std::vector<Allocation> want;
      for (const auto& a : every_allocation(3, 2)) {
        if (gamma_of(audit_allocation(inst, a), notion) >= threshold) want.push_back(a);
      }
      for (auto opts : {kSerial, kParallel}) {
        EXPECT_EQ(effx_exists(inst, notion, threshold, SearchMode::exhaustive, opts).found, want);
      }
    }
  }
}

TEST(Parallel, MatchesSerialReference) {
  std::mt19937_64 rng(62);
  for (int t = 0; t < 60; ++t) {
    const int n = 2 + static_cast<int>(uniform_int(rng, 0, 1));
    const int k = 2 + static_cast<int>(uniform_int(rng, 0, 1));
    const Instance inst = random_instance(rng, n, k, 4);
    EXPECT_EQ(max_nash_welfare(inst, kSerial), max_nash_welfare(inst, kParallel));
    EXPECT_EQ(leximin(inst, kSerial), leximin(inst, kParallel));
    EXPECT_EQ(max_social_welfare(inst, kSerial), max_social_welfare(inst, kParallel));
    const Allocation a = random_allocation(rng, n, k);
    const auto ps = is_pareto_optimal(inst, a, kSerial);
    const auto pp = is_pareto_optimal(inst, a, kParallel);
    EXPECT_EQ(ps.optimal, pp.optimal);
    EXPECT_EQ(ps.certificate, pp.certificate);
    EXPECT_EQ(effx_exists(inst, Notion::effx, R(1), SearchMode::first, kSerial).found,
              effx_exists(inst, Notion::effx, R(1), SearchMode::first, kParallel).found);
  }
}

TEST(Mnw, LargeProductsFallBackToBigIntegers) {
  std::vector<std::vector<Rational>> v(4, std::vector<Rational>(8));
  for (int i = 0; i < 4; ++i) {
    for (int g = 0; g < 8; ++g) v[i][g] = R((std::int64_t{1} << 40) + (i * 37 + g * 11) % 23);
  }
  const Instance inst(4, 2, v);
  const auto serial = max_nash_welfare(inst, kSerial);
  EXPECT_EQ(serial, max_nash_welfare(inst, kParallel));
  Rational brute(0);
  for (const auto& a : every_allocation(4, 2)) {
    Rational p(1);
    for (int i = 0; i < 4; ++i) p *= value_of(inst, i, a.bundles[i]);
    brute = max(brute, p);
  }
  EXPECT_EQ(serial.objective, brute);
}

// ---- properties ----

TEST(SolverProperty, MnwOptimaAreHalfEff1AndParetoOptimal) {
  std::mt19937_64 rng(71);
  for (int t = 0; t < 60; ++t) {
    const int n = 2 + static_cast<int>(uniform_int(rng, 0, 1));
    const int k = 2 + static_cast<int>(uniform_int(rng, 0, 1));
    const Instance inst = random_instance(rng, n, k, 9);
    const auto r = max_nash_welfare(inst);
    for (const auto& a : r.optima) {
      EXPECT_GE(audit_allocation(inst, a).eff1, R(1, 2));
      EXPECT_TRUE(is_pareto_optimal(inst, a).optimal);
    }
  }
}

TEST(SolverProperty, SocialWelfareOptimaAreParetoOptimal) {
  std::mt19937_64 rng(72);
  for (int t = 0; t < 40; ++t) {
    const Instance inst = random_instance(rng, 3, 2, 9);
    for (const auto& a : max_social_welfare(inst).optima) EXPECT_TRUE(is_pareto_optimal(inst, a).optimal);
  }
}

TEST(SolverProperty, LeximinOptimaShareTheirVector) {
  std::mt19937_64 rng(73);
  for (int t = 0; t < 60; ++t) {
    const Instance inst = random_instance(rng, 3, 2, 3);
    const auto r = leximin(inst);
    EXPECT_EQ(r.optima.size(), r.count);
    for (auto vals : r.values) {
      std::sort(vals.begin(), vals.end());
      EXPECT_EQ(vals, r.sorted_values);
    }
  }
}

TEST(SolverProperty, KnownExistenceCases) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const Family fam = seed % 3 == 0 ? Family::general : (seed % 3 == 1 ? Family::identical : Family::binary);
    const int n = fam == Family::general ? 2 : 3;
    const Instance inst = generate(FamilySpec{fam, n, 2 + static_cast<int>(seed % 2), std::nullopt, 1, seed});
    const auto r = effx_exists(inst, Notion::effx, R(1), SearchMode::first);
    ASSERT_EQ(r.found.size(), 1u) << family_name(fam) << " seed " << seed;
    EXPECT_EQ(audit_allocation(inst, r.found.front()).effx, R(1));
  }
}

TEST(Json, ObjectiveResultShape) {
  const Json j = to_json(leximin(appendix_d2()));
  EXPECT_EQ(j["rule"], "leximin");
  EXPECT_EQ(j["sorted_values"], Json::array({"31", "34", "50"}));
  EXPECT_EQ(j["optima"][0]["bundles"], Json::parse("[[0,7,8],[2,3,5],[1,4,6]]"));
  EXPECT_EQ(to_json(max_nash_welfare(mnw_table(3, 2)))["positive_count"], 2);
}
