#include "flipfair/fixtures.hpp"

#include <algorithm>
#include <filesystem>
#include <functional>
#include <initializer_list>

#include "flipfair/audit.hpp"
#include "flipfair/errors.hpp"
#include "flipfair/generators.hpp"

namespace flipfair {

const Allocation& Fixture::allocation(const std::string& label) const {
  for (const auto& [l, a] : allocations) {
    if (l == label) return a;
  }
  throw FixtureError(name + ": no allocation labelled '" + label + "'");
}

const Instance& Fixture::instance_for(const std::string& label) const {
  if (label.empty()) return instance;
  for (const auto& [l, inst] : variants) {
    if (l == label) return inst;
  }
  throw FixtureError(name + ": no instance labelled '" + label + "'");
}

bool FixtureReport::pass() const {
  return std::all_of(results.begin(), results.end(), [](const FactResult& r) { return r.pass; });
}

namespace {

using Row = std::vector<Rational>;

Rational R(std::int64_t p, std::int64_t q = 1) { return Rational(p, q); }

Allocation alloc(std::initializer_list<std::initializer_list<int>> bundles) {
  std::vector<Bundle> out;
  for (const auto& b : bundles) out.emplace_back(b);
  return Allocation::canonical(std::move(out));
}

Json bundles_json(const Allocation& a) { return to_json(a).at("bundles"); }

Json flip_list(std::initializer_list<std::pair<int, int>> flips) {
  Json out = Json::array();
  for (const auto& [a, b] : flips) out.push_back(Json::array({a, b}));
  return out;
}

class Params {
 public:
  Params(std::string fixture, Constants defaults, const std::map<std::string, Rational>& overrides)
      : fixture_(std::move(fixture)), values_(std::move(defaults)) {
    for (const auto& [key, v] : overrides) {
      auto it = std::find_if(values_.begin(), values_.end(), [&](const auto& p) { return p.first == key; });
      if (it == values_.end()) throw FixtureError(fixture_ + ": unknown constant '" + key + "'");
      it->second = v;
    }
  }

  const Rational& operator[](const std::string& key) const {
    for (const auto& [k, v] : values_) {
      if (k == key) return v;
    }
    throw FixtureError(fixture_ + ": constant '" + key + "' not declared");
  }

  int integer(const std::string& key) const {
    const Rational& v = (*this)[key];
    if (v.denominator() != 1 || !v.numerator().fits_sint_p()) {
      throw FixtureError(fixture_ + ": constant " + key + " = " + v.str() + " must be an integer");
    }
    return static_cast<int>(v.numerator().get_si());
  }

  void require(bool ok, const std::string& what) const {
    if (!ok) throw FixtureError(fixture_ + ": constraint " + what + " violated by " + describe());
  }

  [[nodiscard]] std::string describe() const {
    std::string s;
    for (const auto& [k, v] : values_) s += (s.empty() ? "" : ", ") + k + " = " + v.str();
    return s;
  }

  [[nodiscard]] const Constants& all() const { return values_; }

 private:
  std::string fixture_;
  Constants values_;
};

// ---- fact constructors ----

Json pair_gamma(const std::string& label, AgentId i, AgentId j, const char* notion, const char* op, const Rational& v,
                const std::string& instance = "") {
  Json f{{"id", std::string(notion) + "(" + std::to_string(i) + "," + std::to_string(j) + ") " + op + " " + v.str() +
                    " on " + label},
         {"kind", "pair_gamma"},
         {"allocation", label},
         {"i", i},
         {"j", j},
         {"notion", notion},
         {"op", op},
         {"value", v.str()}};
  if (!instance.empty()) f["instance"] = instance;
  return f;
}

Json allocation_gamma(const std::string& label, const char* notion, const char* op, const Rational& v) {
  return Json{{"id", std::string(notion) + " " + op + " " + v.str() + " on " + label},
              {"kind", "allocation_gamma"},
              {"allocation", label},
              {"notion", notion},
              {"op", op},
              {"value", v.str()}};
}

Json pair_removal(const std::string& label, AgentId i, AgentId j, const char* test, bool expect) {
  return Json{{"id", std::string(test) + "_removal(" + std::to_string(i) + "," + std::to_string(j) + ") is " +
                         (expect ? "true" : "false") + " on " + label},
              {"kind", "pair_removal"},
              {"allocation", label},
              {"i", i},
              {"j", j},
              {"test", test},
              {"expect", expect}};
}

Json allocation_removal(const std::string& label, const char* test, bool expect) {
  return Json{{"id", std::string(test) + "_removal is " + (expect ? "true" : "false") + " on " + label},
              {"kind", "allocation_removal"},
              {"allocation", label},
              {"test", test},
              {"expect", expect}};
}

Json flips_fact(const std::string& label, AgentId i, AgentId j, const char* mode, Json flips) {
  return Json{{"id", "rational flips(" + std::to_string(i) + "," + std::to_string(j) + ") " + mode + " " +
                         flips.dump() + " on " + label},
              {"kind", "flips"},
              {"allocation", label},
              {"i", i},
              {"j", j},
              {mode, std::move(flips)}};
}

Json witness(const std::string& label, AgentId i, AgentId j, const char* notion, int a, int b) {
  return Json{{"id", std::string(notion) + " witness flip(" + std::to_string(i) + "," + std::to_string(j) + ") = (" +
                         std::to_string(a) + "," + std::to_string(b) + ") on " + label},
              {"kind", "flip_witness"},
              {"allocation", label},
              {"i", i},
              {"j", j},
              {"notion", notion},
              {"flip", Json::array({a, b})}};
}

Json value_fact(AgentId agent, std::vector<ItemId> bundle, const char* op, const Rational& v) {
  Json b = bundle;
  return Json{{"id", "v_" + std::to_string(agent) + "(" + b.dump() + ") " + op + " " + v.str()},
              {"kind", "value"},
              {"agent", agent},
              {"bundle", std::move(b)},
              {"op", op},
              {"value", v.str()}};
}

Json value_compare(AgentId agent, std::vector<ItemId> lhs, const char* op, std::vector<ItemId> rhs) {
  Json l = lhs;
  Json r = rhs;
  return Json{{"id", "v_" + std::to_string(agent) + "(" + l.dump() + ") " + op + " v_" + std::to_string(agent) + "(" +
                         r.dump() + ")"},
              {"kind", "value_compare"},
              {"agent", agent},
              {"lhs", std::move(l)},
              {"op", op},
              {"rhs", std::move(r)}};
}

Json algorithm_fact(const std::string& id, const char* algorithm, Json extra) {
  Json f{{"id", id}, {"kind", "algorithm"}, {"algorithm", algorithm}};
  for (auto& [k, v] : extra.items()) f[k] = v;
  return f;
}

Json classify_fact(const char* field, Json expect, const std::string& instance = "") {
  Json f{{"id", std::string("classify ") + field + " = " + expect.dump()},
         {"kind", "classify"},
         {"field", field},
         {"expect", std::move(expect)}};
  if (!instance.empty()) {
    f["instance"] = instance;
    f["id"] = f["id"].get<std::string>() + " on " + instance;
  }
  return f;
}

// ---- registry ----

Fixture make(const std::string& name, const std::string& summary, const Params& p, Instance inst) {
  return Fixture{name, summary, p.all(), std::move(inst), {}, {}, std::nullopt, {}};
}

Instance identical(int n, int k, const Row& row) { return Instance(n, k, std::vector<Row>(static_cast<std::size_t>(n), row)); }

Fixture ex1(const std::map<std::string, Rational>& o) {
  Params p("ex1", {{"C", R(10)}, {"eps", R(1, 100)}}, o);
  const Rational C = p["C"], e = p["eps"];
  p.require(C > R(1), "C > 1");
  p.require(e > R(0) && e < R(1), "0 < eps < 1");
  Fixture fx = make("ex1", "identical agents; an EFF1 allocation that is not EF1", p,
                    identical(2, 2, {R(2) * C, R(1) + R(2) * e, R(1), e}));
  fx.allocations = {{"A", alloc({{0, 1}, {2, 3}})}};
  fx.facts = {
      pair_gamma("A", 1, 0, "eff1", "eq", R(1)),
      allocation_gamma("A", "eff1", "eq", R(1)),
      pair_removal("A", 1, 0, "ef1", false),
      allocation_removal("A", "ef1", false),
      value_compare(1, {2, 3}, "lt", {1}),
      value_compare(1, {2, 3}, "lt", {0}),
      flips_fact("A", 1, 0, "contains", flip_list({{3, 0}})),
      value_fact(1, {0, 2}, "eq", R(2) * C + R(1)),
      value_fact(1, {1, 3}, "eq", R(1) + R(3) * e),
      algorithm_fact("round robin, order (0,1)", "rr",
                     Json{{"order", {0, 1}}, {"expect", bundles_json(alloc({{0, 2}, {1, 3}}))}}),
  };
  return fx;
}

Fixture ex2(const std::map<std::string, Rational>& o) {
  Params p("ex2", {{"eps", R(1, 10)}}, o);
  const Rational e = p["eps"];
  p.require(e > R(0) && e < R(1), "0 < eps < 1");
  Fixture fx = make("ex2", "an EFX allocation that is not EFFX", p,
                    Instance(2, 2, {{R(10), R(6), R(4), R(1)}, {R(10) + e, R(10), R(1), R(2)}}));
  fx.allocations = {{"A", alloc({{0, 3}, {1, 2}})}};
  fx.facts = {
      pair_removal("A", 1, 0, "efx", true),
      pair_gamma("A", 1, 0, "effx", "eq", (R(11) + e) / R(12)),
      pair_gamma("A", 1, 0, "effx", "lt", R(1)),
      allocation_gamma("A", "effx", "lt", R(1)),
      pair_gamma("A", 1, 0, "ef", "eq", R(11) / (R(12) + e)),
      flips_fact("A", 1, 0, "contains", flip_list({{1, 0}})),
      witness("A", 1, 0, "effx", 1, 0),
      value_fact(1, {1, 2}, "eq", R(11)),
  };
  return fx;
}

Fixture ex3(const std::map<std::string, Rational>& o) {
  Params p("ex3", {{"C", R(10)}, {"eps", R(1, 100)}}, o);
  const Rational C = p["C"], e = p["eps"];
  p.require(C > R(1), "C > 1");
  p.require(e > R(0) && e < R(1), "0 < eps < 1");
  Fixture fx = make("ex3", "identical agents; the only EFFX allocations are one split and its mirror", p,
                    identical(2, 2, {R(2) * C, R(1) + e, R(1), e}));
  const Allocation a = alloc({{0, 3}, {1, 2}});
  const Allocation mirror = alloc({{1, 2}, {0, 3}});
  fx.allocations = {{"A", a}, {"A_mirror", mirror}};
  fx.facts = {
      pair_gamma("A", 1, 0, "effx", "eq", R(1)),
      allocation_gamma("A", "effx", "eq", R(1)),
      pair_removal("A", 1, 0, "efx", false),
      flips_fact("A", 1, 0, "equals", flip_list({{1, 0}, {2, 0}})),
      Json{{"id", "exactly two EFFX allocations: A and its mirror"},
           {"kind", "exists"},
           {"notion", "effx"},
           {"threshold", "1"},
           {"mode", "exhaustive"},
           {"exactly", Json::array({bundles_json(a), bundles_json(mirror)})}},
      algorithm_fact("balanced round robin, order (0,1)", "brr2",
                     Json{{"order", {0, 1}},
                          {"expect", bundles_json(a)},
                          {"gamma", {{"notion", "effx"}, {"op", "eq"}, {"value", "1"}}}}),
  };
  return fx;
}

Fixture genrr(const std::map<std::string, Rational>& o) {
  Params p("genrr", {{"C", R(100)}, {"eps", R(1, 100)}}, o);
  const Rational C = p["C"], e = p["eps"];
  p.require(C > R(1), "C > 1");
  p.require(e > R(0) && e < R(1, 2), "0 < eps < 1/2");
  Fixture fx = make("genrr", "no picking sequence is EFFX, yet an EFFX allocation exists", p,
                    identical(2, 3, {R(3) * C, R(1) + e, R(1), R(1) - e, e, R(0)}));
  const Allocation case1 = alloc({{0, 2, 4}, {1, 3, 5}});
  const Allocation case2 = alloc({{0, 2, 5}, {1, 3, 4}});
  const Allocation case3 = alloc({{0, 3, 4}, {1, 2, 5}});
  const Allocation fair = alloc({{0, 4, 5}, {1, 2, 3}});
  fx.allocations = {{"case1", case1}, {"case2", case2}, {"case3", case3}, {"fair", fair}};
  const Rational bound = R(11) / (R(10) * C);
  fx.facts = {
      Json{{"id", "all 8 picking sequences have effx < " + bound.str()},
           {"kind", "all_sequences"},
           {"count", 8},
           {"notion", "effx"},
           {"op", "lt"},
           {"value", bound.str()}},
      algorithm_fact("sequence ((0,1),(0,1),(0,1)) gives case1", "genrr",
                     Json{{"sequence", {{0, 1}, {0, 1}, {0, 1}}}, {"expect", bundles_json(case1)}}),
      algorithm_fact("sequence ((0,1),(0,1),(1,0)) gives case2", "genrr",
                     Json{{"sequence", {{0, 1}, {0, 1}, {1, 0}}}, {"expect", bundles_json(case2)}}),
      algorithm_fact("sequence ((0,1),(1,0),(0,1)) gives case3", "genrr",
                     Json{{"sequence", {{0, 1}, {1, 0}, {0, 1}}}, {"expect", bundles_json(case3)}}),
      pair_gamma("case1", 1, 0, "effx", "eq", (R(2) + e) / (R(3) * C + R(1))),
      value_fact(0, {0, 2, 4}, "eq", R(3) * C + R(1) + e),
      Json{{"id", "an EFFX allocation exists and includes fair"},
           {"kind", "exists"},
           {"notion", "effx"},
           {"threshold", "1"},
           {"mode", "exhaustive"},
           {"contains", Json::array({bundles_json(fair)})}},
      allocation_gamma("fair", "effx", "eq", R(1)),
      classify_fact("ordered", true),
  };
  return fx;
}

Fixture ece_bad(const std::map<std::string, Rational>& o) {
  Params p("ece_bad", {{"k", R(3)}, {"C", R(100)}, {"eps", R(1, 100)}}, o);
  const Rational C = p["C"], e = p["eps"];
  const int k = p.integer("k");
  p.require(k == 3, "k = 3");
  p.require(C > R(1), "C > 1");
  p.require(e > R(0) && e < R(1, k - 1), "0 < eps < 1/(k-1)");
  const int m = 3 * k;
  const Rational inv = R(1, k - 1);
  Row v0(static_cast<std::size_t>(m), e);
  v0[0] = R(1);
  Row v1(static_cast<std::size_t>(m), R(1));
  v1[0] = C;
  v1[1] = R(1);
  v1[2] = inv + e;
  for (int g = 3; g <= k; ++g) v1[g] = inv;
  Row v2(static_cast<std::size_t>(m), R(0));
  v2[0] = R(1);
  v2[1] = R(1);
  for (int g = 2; g <= k - 1; ++g) v2[g] = inv;
  v2[k] = inv - e;
  v2[k + 1] = e;
  Fixture fx = make("ece_bad", "a scripted envy-cycle run with no constant EFFX guarantee", p,
                    Instance(3, k, {v0, v1, v2}));
  fx.script = SelectionScript{{ScriptChoice{k + 1, ScriptChoice::Kind::agent, 1, {}, -1}}};
  const Allocation out = alloc({{0, 5, 7}, {2, 3, 4}, {1, 6, 8}});
  fx.allocations = {{"A", out}};
  const Rational gamma = (R(5, 2)) / (C + R(3, 2) + e);
  fx.facts = {
      algorithm_fact("scripted run returns A", "ece",
                     Json{{"use_script", true},
                          {"expect", bundles_json(out)},
                          {"gamma", {{"notion", "effx"}, {"i", 1}, {"j", 0}, {"op", "eq"}, {"value", gamma.str()}}}}),
      pair_gamma("A", 1, 0, "effx", "eq", gamma),
      pair_gamma("A", 1, 0, "effx", "lt", R(3) / C),
      Json{{"id", "envy graph before the first rotation"},
           {"kind", "trace"},
           {"algorithm", "ece"},
           {"iteration", k},
           {"field", "edges_before_rotation"},
           {"equals", Json::array({{1, 0}, {1, 2}, {2, 0}, {2, 1}})}},
      Json{{"id", "envy graph after the rotation"},
           {"kind", "trace"},
           {"algorithm", "ece"},
           {"iteration", k},
           {"field", "edges"},
           {"equals", Json::array({{1, 0}})}},
  };
  return fx;
}

Fixture ece_23(const std::map<std::string, Rational>& o) {
  Params p("ece_23", {{"eps", R(1, 1000)}}, o);
  const Rational e = p["eps"];
  p.require(e > R(0) && e <= R(1, 200), "0 < eps <= 1/200");
  Fixture fx = make("ece_23", "ordered values where envy-cycle elimination stays near 2/3-EFFX", p,
                    identical(2, 3, {R(1) + R(2) * e, R(1) + e, R(1), R(1) - R(2) * e, R(1) - R(3) * e, R(0)}));
  const Allocation out = alloc({{0, 3, 4}, {1, 2, 5}});
  fx.allocations = {{"A", out}};
  const Rational gamma = (R(2) + R(2) * e) / (R(3) - R(4) * e);
  fx.facts = {
      algorithm_fact("envy-cycle elimination returns A", "ece",
                     Json{{"expect", bundles_json(out)},
                          {"gamma", {{"notion", "effx"}, {"i", 1}, {"j", 0}, {"op", "eq"}, {"value", gamma.str()}}}}),
      allocation_gamma("A", "effx", "eq", gamma),
      allocation_gamma("A", "effx", "ge", R(2, 3)),
      allocation_gamma("A", "effx", "le", R(2, 3) + R(1, 100)),
      classify_fact("ordered", true),
  };
  return fx;
}

Instance mnw_instance(int k, const Rational& c) {
  Row v0(static_cast<std::size_t>(2 * k), R(0));
  Row v1(static_cast<std::size_t>(2 * k), R(1));
  for (int g = 0; g < k; ++g) {
    v0[g] = c;
    v1[g] = R(2);
  }
  return Instance(2, k, {v0, v1});
}

Allocation halves(int k) {
  std::vector<Bundle> b(2);
  for (int g = 0; g < k; ++g) {
    b[0].push_back(g);
    b[1].push_back(k + g);
  }
  return Allocation{std::move(b)};
}

Json mnw_unique(const std::string& inst_label, const std::string& alloc_label, const Allocation& a, int k) {
  const Rational gamma = R(k + 1) / R(2 * k - 1);
  Json f{{"id", "unique MNW optimum " + alloc_label + " with eff1(1,0) = " + gamma.str() +
                    (inst_label.empty() ? "" : " on " + inst_label)},
         {"kind", "objective"},
         {"rule", "mnw"},
         {"optima", Json::array({bundles_json(a)})},
         {"gamma", {{"notion", "eff1"}, {"i", 1}, {"j", 0}, {"op", "eq"}, {"value", gamma.str()}}}};
  if (!inst_label.empty()) f["instance"] = inst_label;
  return f;
}

Json nash_split(int k, const Rational& c) {
  return Json{{"id", "z = " + std::to_string(k) + " uniquely maximises z*c*(2(k-z)+z) for k = " + std::to_string(k)},
              {"kind", "nash_split"},
              {"k", k},
              {"c", c.str()}};
}

Fixture mnw_tight(const std::map<std::string, Rational>& o) {
  Params p("mnw_tight", {{"k", R(3)}, {"c", R(2)}, {"k_alt", R(4)}, {"c_alt", R(3)}}, o);
  const int k = p.integer("k");
  const int k_alt = p.integer("k_alt");
  const Rational c = p["c"], c_alt = p["c_alt"];
  p.require(k >= 2 && k_alt >= 2, "k >= 2");
  p.require(c > R(0) && c_alt > R(0), "c > 0");
  Fixture fx = make("mnw_tight", "the MNW optimum is exactly (k+1)/(2k-1)-EFF1", p, mnw_instance(k, c));
  fx.variants = {{"k_alt", mnw_instance(k_alt, c)}, {"c_alt", mnw_instance(k, c_alt)}};
  fx.allocations = {{"A", halves(k)}, {"A_k_alt", halves(k_alt)}};
  fx.facts = {
      mnw_unique("", "A", halves(k), k),
      pair_gamma("A", 1, 0, "eff1", "eq", R(k + 1) / R(2 * k - 1)),
      pair_gamma("A", 1, 0, "ef", "eq", R(1, 2)),
      Json{{"id", "A is Pareto optimal"}, {"kind", "pareto"}, {"allocation", "A"}, {"expect", true}},
      classify_fact("individualized_rho", "1"),
      classify_fact("top_n", "ambiguous"),
      nash_split(k, c),
      mnw_unique("k_alt", "A_k_alt", halves(k_alt), k_alt),
      pair_gamma("A_k_alt", 1, 0, "eff1", "eq", R(k_alt + 1) / R(2 * k_alt - 1), "k_alt"),
      nash_split(k_alt, c),
      mnw_unique("c_alt", "A", halves(k), k),
  };
  return fx;
}

Instance appd1_instance(const Rational& x) {
  const int n = 3, k = 3;
  Row vi(9, R(0)), vj(9, R(0)), vl(9, R(0));
  for (int g = 0; g < 3; ++g) {
    vi[g] = R(k) - x;
    vi[3 + g] = x;
    vj[g] = R(1);
  }
  vj[6] = R(k * k, n - 2);
  vl[6] = R(k * (k + 1), n - 2);
  return Instance(n, k, {vi, vj, vl});
}

Fixture appd1(const std::map<std::string, Rational>& o) {
  Params p("appD1", {{"x", R(0)}, {"x_leximin", R(2)}}, o);
  const Rational x = p["x"], xl = p["x_leximin"];
  p.require(x >= R(0) && x <= R(3) && xl >= R(0) && xl <= R(3), "0 <= x <= k");
  Fixture fx = make("appD1", "welfare-maximising and leximin rules are only 1/(k-1)-EFF1", p, appd1_instance(x));
  fx.variants = {{"leximin", appd1_instance(xl)}};
  fx.facts = {
      Json{{"id", "every SW optimum gives agent 0 the a-items, and agent 1 is 1/2-EFF1 towards 0"},
           {"kind", "objective"},
           {"rule", "sw"},
           {"every_agent_bundle", {{"agent", 0}, {"bundle", {0, 1, 2}}}},
           {"gamma", {{"notion", "eff1"}, {"i", 1}, {"j", 0}, {"op", "eq"}, {"value", "1/2"}}}},
      Json{{"id", "unique leximin optimum gives agent 1 the a-items"},
           {"kind", "objective"},
           {"rule", "leximin"},
           {"instance", "leximin"},
           {"unique", true},
           {"every_agent_bundle", {{"agent", 1}, {"bundle", {0, 1, 2}}}}},
  };
  return fx;
}

Fixture appd2(const std::map<std::string, Rational>& o) {
  Params p("appD2", {}, o);
  auto row = [](std::initializer_list<int> xs) {
    Row r;
    for (int x : xs) r.push_back(R(x));
    return r;
  };
  Fixture fx = make("appD2", "the unique leximin allocation is not EFFX though an EFFX allocation exists", p,
                    Instance(3, 3,
                             {row({50, 17, 16, 14, 2, 1, 0, 0, 0}), row({46, 17, 16, 15, 3, 3, 0, 0, 0}),
                              row({33, 17, 15, 15, 11, 4, 3, 1, 1})}));
  const Allocation a = alloc({{0, 7, 8}, {2, 3, 5}, {1, 4, 6}});
  const Allocation b = alloc({{0, 7, 8}, {2, 3, 6}, {1, 4, 5}});
  fx.allocations = {{"A", a}, {"B", b}};
  fx.facts = {
      Json{{"id", "unique leximin optimum A with values (31, 34, 50)"},
           {"kind", "objective"},
           {"rule", "leximin"},
           {"optima", Json::array({bundles_json(a)})},
           {"sorted_values", {"31", "34", "50"}}},
      pair_gamma("A", 2, 1, "effx", "eq", R(32, 33)),
      witness("A", 2, 1, "effx", 6, 5),
      allocation_gamma("A", "effx", "eq", R(32, 33)),
      Json{{"id", "an EFFX allocation exists and includes B"},
           {"kind", "exists"},
           {"notion", "effx"},
           {"threshold", "1"},
           {"mode", "exhaustive"},
           {"contains", Json::array({bundles_json(b)})}},
      allocation_gamma("B", "effx", "eq", R(1)),
      classify_fact("ordered", true),
  };
  return fx;
}

using Builder = std::function<Fixture(const std::map<std::string, Rational>&)>;

const std::vector<std::pair<std::string, Builder>>& registry() {
  static const std::vector<std::pair<std::string, Builder>> r = {
      {"ex1", ex1},         {"ex2", ex2},     {"ex3", ex3},   {"genrr", genrr}, {"ece_bad", ece_bad},
      {"ece_23", ece_23},   {"mnw_tight", mnw_tight},         {"appD1", appd1}, {"appD2", appd2},
  };
  return r;
}

// ---- fact evaluation ----

bool compare(const Rational& lhs, const std::string& op, const Rational& rhs) {
  if (op == "eq") return lhs == rhs;
  if (op == "lt") return lhs < rhs;
  if (op == "le") return lhs <= rhs;
  if (op == "gt") return lhs > rhs;
  if (op == "ge") return lhs >= rhs;
  throw FixtureError("unknown comparison '" + op + "'");
}

Rational rat(const Json& v) { return rational_from_json(v, "fact"); }

std::vector<Allocation> allocations_of(const Json& list) {
  std::vector<Allocation> out;
  for (const auto& b : list) out.push_back(allocation_from_json(Json{{"bundles", b}}));
  return out;
}

std::string show(const Allocation& a) { return to_json(a).at("bundles").dump(); }

struct Checker {
  const Fixture& fx;
  const SolveOptions& opts;

  const Instance& inst(const Json& f) const { return fx.instance_for(f.value("instance", std::string{})); }

  // Applies {"notion","i"?,"j"?,"op","value"} to an allocation.
  bool gamma_ok(const Instance& in, const Allocation& a, const Json& g, std::string& detail) const {
    Rational got;
    if (g.contains("i")) {
      const auto r = audit_pair(in, a, g.at("i").get<int>(), g.at("j").get<int>());
      const Notion n = parse_notion(g.at("notion").get<std::string>());
      got = n == Notion::ef ? r.ef : (n == Notion::eff1 ? r.eff1 : r.effx);
    } else {
      got = gamma_of(audit_allocation(in, a), parse_notion(g.at("notion").get<std::string>()));
    }
    detail += " " + g.at("notion").get<std::string>() + " = " + got.str();
    return compare(got, g.at("op").get<std::string>(), rat(g.at("value")));
  }

  Allocation run_algorithm(const Instance& in, const Json& f, RunTrace* trace) const {
    const std::string alg = f.at("algorithm").get<std::string>();
    if (alg == "rr" || alg == "brr2") {
      const auto order = f.at("order").get<std::vector<int>>();
      return alg == "rr" ? round_robin(in, order) : balanced_round_robin_k2(in, order);
    }
    if (alg == "genrr") return generalized_round_robin(in, pick_sequence_from_json(f.at("sequence")));
    RunOptions ro;
    if (f.value("use_script", false)) {
      if (!fx.script) throw FixtureError(fx.name + " has no script");
      ro.script = &*fx.script;
    }
    ro.trace = trace;
    if (alg == "ece") return ece_k(in, ro);
    if (alg == "ece-swaps") return ece_swaps(in, ro);
    throw FixtureError("unknown algorithm '" + alg + "'");
  }

  FactResult eval(const Json& f) const {
    FactResult r;
    r.id = f.value("id", std::string("?"));
    const std::string kind = f.at("kind").get<std::string>();
    const Instance& in = inst(f);
    std::string& d = r.detail;

    if (kind == "pair_gamma") {
      const auto& a = fx.allocation(f.at("allocation").get<std::string>());
      r.pass = gamma_ok(in, a, f, d);
    } else if (kind == "allocation_gamma") {
      const auto& a = fx.allocation(f.at("allocation").get<std::string>());
      r.pass = gamma_ok(in, a, f, d);
    } else if (kind == "pair_removal") {
      const auto& a = fx.allocation(f.at("allocation").get<std::string>());
      const auto p = audit_pair(in, a, f.at("i").get<int>(), f.at("j").get<int>());
      const bool got = f.at("test") == "ef1" ? p.ef1_removal : p.efx_removal;
      d = std::string("got ") + (got ? "true" : "false");
      r.pass = got == f.at("expect").get<bool>();
    } else if (kind == "allocation_removal") {
      const auto rep = audit_allocation(in, fx.allocation(f.at("allocation").get<std::string>()));
      const bool got = f.at("test") == "ef1" ? rep.ef1_removal : rep.efx_removal;
      d = std::string("got ") + (got ? "true" : "false");
      r.pass = got == f.at("expect").get<bool>();
    } else if (kind == "flips") {
      const auto flips = rational_flips(in, fx.allocation(f.at("allocation").get<std::string>()), f.at("i").get<int>(),
                                        f.at("j").get<int>());
      Json got = Json::array();
      for (const auto& fl : flips) got.push_back(Json::array({fl.a, fl.b}));
      d = "got " + got.dump();
      if (f.contains("equals")) {
        r.pass = got == f.at("equals");
      } else {
        r.pass = true;
        for (const auto& want : f.at("contains")) {
          r.pass = r.pass && std::find(got.begin(), got.end(), want) != got.end();
        }
      }
    } else if (kind == "flip_witness") {
      const auto p = audit_pair(in, fx.allocation(f.at("allocation").get<std::string>()), f.at("i").get<int>(),
                                f.at("j").get<int>());
      const auto& w = f.at("notion") == "eff1" ? p.eff1_flip : p.effx_flip;
      d = w ? "got (" + std::to_string(w->a) + "," + std::to_string(w->b) + ")" : "got none";
      r.pass = w && Json::array({w->a, w->b}) == f.at("flip");
    } else if (kind == "value") {
      const auto got = value_of(in, f.at("agent").get<int>(), f.at("bundle").get<std::vector<int>>());
      d = "got " + got.str();
      r.pass = compare(got, f.at("op").get<std::string>(), rat(f.at("value")));
    } else if (kind == "value_compare") {
      const int agent = f.at("agent").get<int>();
      const auto lhs = value_of(in, agent, f.at("lhs").get<std::vector<int>>());
      const auto rhs = value_of(in, agent, f.at("rhs").get<std::vector<int>>());
      d = "got " + lhs.str() + " vs " + rhs.str();
      r.pass = compare(lhs, f.at("op").get<std::string>(), rhs);
    } else if (kind == "algorithm") {
      const Allocation got = run_algorithm(in, f, nullptr);
      d = "got " + show(got);
      r.pass = true;
      if (f.contains("expect")) r.pass = got == allocations_of(Json::array({f.at("expect")})).front();
      if (f.contains("gamma")) r.pass = gamma_ok(in, got, f.at("gamma"), d) && r.pass;
    } else if (kind == "all_sequences") {
      const auto seqs = all_pick_sequences(in.n(), in.k());
      r.pass = static_cast<int>(seqs.size()) == f.at("count").get<int>();
      d = std::to_string(seqs.size()) + " sequences;";
      const Notion n = parse_notion(f.at("notion").get<std::string>());
      Rational worst(0);
      for (const auto& s : seqs) {
        const Rational g = gamma_of(audit_allocation(in, generalized_round_robin(in, s)), n);
        worst = max(worst, g);
        r.pass = r.pass && compare(g, f.at("op").get<std::string>(), rat(f.at("value")));
      }
      d += " largest " + f.at("notion").get<std::string>() + " = " + worst.str();
    } else if (kind == "exists") {
      const auto mode = f.at("mode") == "first" ? SearchMode::first : SearchMode::exhaustive;
      const auto res = effx_exists(in, parse_notion(f.at("notion").get<std::string>()), rat(f.at("threshold")), mode, opts);
      d = std::to_string(res.found.size()) + " found";
      if (f.contains("exactly")) {
        auto want = allocations_of(f.at("exactly"));
        auto got = res.found;
        std::sort(want.begin(), want.end());
        std::sort(got.begin(), got.end());
        r.pass = want == got;
      } else if (f.contains("contains")) {
        r.pass = true;
        for (const auto& w : allocations_of(f.at("contains"))) {
          r.pass = r.pass && std::find(res.found.begin(), res.found.end(), w) != res.found.end();
        }
      } else {
        r.pass = f.value("expect", true) == !res.found.empty();
      }
    } else if (kind == "objective") {
      const std::string rule = f.at("rule").get<std::string>();
      SolveOptions so = opts;
      so.all_optima = true;
      const ObjectiveResult res = rule == "mnw"       ? max_nash_welfare(in, so)
                                  : rule == "leximin" ? leximin(in, so)
                                                      : max_social_welfare(in, so);
      d = std::to_string(res.count) + " optima, objective " + res.objective.str();
      if (!res.sorted_values.empty()) {
        std::string vec;
        for (auto it = res.sorted_values.rbegin(); it != res.sorted_values.rend(); ++it) {
          vec += (vec.empty() ? "" : ",") + it->str();
        }
        d += ", leximin vector (" + vec + ")";
      }
      r.pass = true;
      if (f.contains("optima")) r.pass = r.pass && res.optima == allocations_of(f.at("optima"));
      if (f.value("unique", false)) r.pass = r.pass && res.count == 1;
      if (f.contains("sorted_values")) {
        std::vector<Rational> want;
        for (const auto& v : f.at("sorted_values")) want.push_back(rat(v));
        r.pass = r.pass && res.sorted_values == want;
      }
      for (const auto& a : res.optima) {
        if (f.contains("every_agent_bundle")) {
          const auto& eb = f.at("every_agent_bundle");
          r.pass = r.pass && a.bundles[eb.at("agent").get<int>()] == eb.at("bundle").get<std::vector<int>>();
        }
        if (f.contains("gamma")) {
          std::string ignored;
          r.pass = gamma_ok(in, a, f.at("gamma"), &a == &res.optima.front() ? d : ignored) && r.pass;
        }
      }
    } else if (kind == "classify") {
      const Json c = to_json(classify(in));
      const std::string field = f.at("field").get<std::string>();
      d = "got " + c.at(field).dump();
      r.pass = c.at(field) == f.at("expect");
    } else if (kind == "trace") {
      RunTrace trace;
      run_algorithm(in, f, &trace);
      const int it = f.at("iteration").get<int>();
      if (it < 0 || it >= static_cast<int>(trace.records.size())) {
        d = "run has " + std::to_string(trace.records.size()) + " iterations";
        r.pass = false;
      } else {
        const Json got = to_json(trace.records[static_cast<std::size_t>(it)]).at(f.at("field").get<std::string>());
        d = "got " + got.dump();
        r.pass = got == f.at("equals");
      }
    } else if (kind == "pareto") {
      const auto res = is_pareto_optimal(in, fx.allocation(f.at("allocation").get<std::string>()), opts);
      d = std::string("got ") + (res.optimal ? "true" : "false");
      r.pass = res.optimal == f.at("expect").get<bool>();
    } else if (kind == "nash_split") {
      const int k = f.at("k").get<int>();
      const Rational c = rat(f.at("c"));
      std::vector<Rational> vals;
      for (int z = 0; z <= k; ++z) vals.push_back(R(z) * c * R(2 * (k - z) + z));
      int best = 0;
      for (int z = 1; z <= k; ++z) {
        if (vals[z] > vals[best]) best = z;
      }
      const auto ties = std::count(vals.begin(), vals.end(), vals[best]);
      d = "argmax z = " + std::to_string(best) + " value " + vals[best].str();
      r.pass = best == k && ties == 1;
    } else {
      throw FixtureError("unknown fact kind '" + kind + "'");
    }
    return r;
  }
};

}  // namespace

const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [n, b] : registry()) out.push_back(n);
    return out;
  }();
  return names;
}

Fixture load_fixture(std::string_view name, const std::map<std::string, Rational>& overrides) {
  for (const auto& [n, build] : registry()) {
    if (n == name) return build(overrides);
  }
  throw FixtureError("unknown fixture '" + std::string(name) + "'");
}

FixtureReport check_fixture(const Fixture& fx, const SolveOptions& opts) {
  FixtureReport rep;
  rep.name = fx.name;
  const Checker checker{fx, opts};
  for (const auto& f : fx.facts) {
    try {
      rep.results.push_back(checker.eval(f));
    } catch (const BudgetExceeded&) {
      throw;
    } catch (const std::exception& e) {
      rep.results.push_back({f.value("id", std::string("?")), false, std::string("error: ") + e.what()});
    }
  }
  return rep;
}

Json to_json(const FixtureReport& report) {
  Json facts = Json::array();
  for (const auto& r : report.results) {
    facts.push_back(Json{{"id", r.id}, {"pass", r.pass}, {"detail", r.detail}});
  }
  return Json{{"fixture", report.name}, {"pass", report.pass()}, {"facts", std::move(facts)}};
}

Json fixture_instance_json(const Fixture& fx) {
  Json constants = Json::object();
  for (const auto& [k, v] : fx.constants) constants[k] = v.str();
  Json variants = Json::object();
  for (const auto& [l, inst] : fx.variants) variants[l] = to_json(inst);
  Json allocations = Json::object();
  for (const auto& [l, a] : fx.allocations) allocations[l] = to_json(a);
  return Json{{"name", fx.name},
              {"summary", fx.summary},
              {"constants", std::move(constants)},
              {"instance", to_json(fx.instance)},
              {"variants", std::move(variants)},
              {"allocations", std::move(allocations)},
              {"script", fx.script ? to_json(*fx.script) : Json(nullptr)}};
}

Json fixture_facts_json(const Fixture& fx) { return Json{{"name", fx.name}, {"facts", fx.facts}}; }

Fixture fixture_from_json(const Json& instance_doc, const Json& facts_doc) {
  try {
    Constants constants;
    for (const auto& [k, v] : instance_doc.at("constants").items()) constants.emplace_back(k, rat(v));
    Fixture fx{instance_doc.at("name").get<std::string>(),
               instance_doc.value("summary", std::string{}),
               std::move(constants),
               instance_from_json(instance_doc.at("instance")),
               {},
               {},
               std::nullopt,
               {}};
    for (const auto& [l, v] : instance_doc.at("variants").items()) fx.variants.emplace_back(l, instance_from_json(v));
    for (const auto& [l, v] : instance_doc.at("allocations").items()) {
      fx.allocations.emplace_back(l, allocation_from_json(v));
    }
    if (!instance_doc.at("script").is_null()) fx.script = script_from_json(instance_doc.at("script"));
    for (const auto& f : facts_doc.at("facts")) fx.facts.push_back(f);
    return fx;
  } catch (const Json::exception& e) {
    throw FixtureError(std::string("malformed fixture document: ") + e.what());
  }
}

Fixture load_fixture_from_corpus(const std::string& dir, std::string_view name) {
  const std::string base = dir + "/" + std::string(name);
  return fixture_from_json(parse_json(read_file(base + ".instance.json"), base + ".instance.json"),
                           parse_json(read_file(base + ".facts.json"), base + ".facts.json"));
}

void export_corpus(const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& name : fixture_names()) {
    const Fixture fx = load_fixture(name);
    write_file(dir + "/" + name + ".instance.json", fixture_instance_json(fx).dump(2) + "\n");
    write_file(dir + "/" + name + ".facts.json", fixture_facts_json(fx).dump(2) + "\n");
  }
}

}  // namespace flipfair
