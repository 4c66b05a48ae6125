#include "flipfair/solvers.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <climits>
#include <string>
#include <utility>

#include "flipfair/errors.hpp"

namespace flipfair {

mpz_class allocation_count(int n, int k) {
  mpz_class total = 1;
  unsigned long remaining = static_cast<unsigned long>(n) * static_cast<unsigned long>(k);
  for (int i = 0; i < n; ++i) {
    mpz_class c;
    mpz_bin_uiui(c.get_mpz_t(), remaining, static_cast<unsigned long>(k));
    total *= c;
    remaining -= static_cast<unsigned long>(k);
  }
  return total;
}

void check_budget(int n, int k, std::uint64_t budget) {
  const mpz_class count = allocation_count(n, k);
  const mpz_class cap(std::to_string(budget));
  if (count > cap) throw BudgetExceeded(count.get_str(), std::to_string(budget));
}

const char* rule_name(Rule r) {
  switch (r) {
    case Rule::mnw:
      return "mnw";
    case Rule::leximin:
      return "leximin";
    case Rule::sw:
      return "sw";
  }
  return "?";
}

namespace {

using Mask = std::uint64_t;
using Masks = std::vector<Mask>;

// Integer copy of the instance: every value times the lcm of all denominators.
struct Scaled {
  int n = 0;
  int k = 0;
  int m = 0;
  std::vector<std::int64_t> v;
  mpz_class scale = 1;
  int product_bits = 0;  // bound on log2 of any product of own values

  [[nodiscard]] std::int64_t at(int i, int g) const { return v[static_cast<std::size_t>(i * m + g)]; }
  [[nodiscard]] std::int64_t sum(int i, Mask mask) const {
    std::int64_t s = 0;
    for (; mask != 0; mask &= mask - 1) s += at(i, std::countr_zero(mask));
    return s;
  }
  [[nodiscard]] Rational unscale(std::int64_t x) const {
    mpq_class q{mpz_class(static_cast<long>(x)), scale};
    q.canonicalize();
    return Rational(q);
  }
  [[nodiscard]] Mask full() const { return m == 64 ? ~Mask{0} : ((Mask{1} << m) - 1); }
};

Scaled scale_instance(const Instance& inst) {
  if (inst.m() > 64) throw ValidationError("exhaustive search supports at most 64 items");
  Scaled s;
  s.n = inst.n();
  s.k = inst.k();
  s.m = inst.m();
  for (int i = 0; i < s.n; ++i) {
    for (const auto& x : inst.row(i)) {
      mpz_class d = x.denominator();
      mpz_lcm(s.scale.get_mpz_t(), s.scale.get_mpz_t(), d.get_mpz_t());
    }
  }
  const mpz_class limit = mpz_class(static_cast<long>(LLONG_MAX / 4));
  for (int i = 0; i < s.n; ++i) {
    mpz_class row_total = 0;
    for (const auto& x : inst.row(i)) {
      mpz_class scaled = x.numerator() * (s.scale / x.denominator());
      row_total += scaled;
      s.v.push_back(scaled.fits_slong_p() ? scaled.get_si() : LLONG_MAX);
    }
    if (row_total > limit) throw ValidationError("values too large for exact enumeration after scaling");
    s.product_bits += static_cast<int>(mpz_sizeinbase(row_total.get_mpz_t(), 2));
  }
  return s;
}

std::vector<Mask> k_subsets(Mask remaining, int k) {
  std::vector<int> items;
  for (Mask r = remaining; r != 0; r &= r - 1) items.push_back(std::countr_zero(r));
  const int cnt = static_cast<int>(items.size());
  std::vector<Mask> out;
  if (k > cnt) return out;
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int t = 0; t < k; ++t) idx[t] = t;
  while (true) {
    Mask b = 0;
    for (int t = 0; t < k; ++t) b |= Mask{1} << items[idx[t]];
    out.push_back(b);
    int t = k - 1;
    while (t >= 0 && idx[t] == cnt - k + t) --t;
    if (t < 0) break;
    ++idx[t];
    for (int u = t + 1; u < k; ++u) idx[u] = idx[u - 1] + 1;
  }
  return out;
}

template <class F>
bool walk(int n, int k, int agent, Mask remaining, Mask* masks, F& f) {
  if (agent == n - 1) {
    masks[agent] = remaining;
    return f(static_cast<const Mask*>(masks));
  }
  int items[64];
  int cnt = 0;
  for (Mask r = remaining; r != 0; r &= r - 1) items[cnt++] = std::countr_zero(r);
  int idx[64];
  for (int t = 0; t < k; ++t) idx[t] = t;
  while (true) {
    Mask b = 0;
    for (int t = 0; t < k; ++t) b |= Mask{1} << items[idx[t]];
    masks[agent] = b;
    if (!walk(n, k, agent + 1, remaining & ~b, masks, f)) return false;
    int t = k - 1;
    while (t >= 0 && idx[t] == cnt - k + t) --t;
    if (t < 0) break;
    ++idx[t];
    for (int u = t + 1; u < k; ++u) idx[u] = idx[u - 1] + 1;
  }
  return true;
}

// Partial: bool consider(const Mask*), bool merge(Partial&&) (false = stop), bool done().
template <class Partial, class Make>
Partial scan(const Scaled& s, Exec exec, Make make) {
  if (exec == Exec::serial) {
    Partial p = make();
    Masks masks(static_cast<std::size_t>(s.n));
    auto visit = [&](const Mask* ms) { return p.consider(ms); };
    walk(s.n, s.k, 0, s.full(), masks.data(), visit);
    return p;
  }
  const auto prefixes = k_subsets(s.full(), s.k);
  const long count = static_cast<long>(prefixes.size());
  std::vector<Partial> parts;
  parts.reserve(prefixes.size());
  for (long t = 0; t < count; ++t) parts.push_back(make());
  std::atomic<long> first_done{count};

#pragma omp parallel for schedule(dynamic)
  for (long t = 0; t < count; ++t) {
    if (t > first_done.load(std::memory_order_relaxed)) continue;
    Partial& p = parts[static_cast<std::size_t>(t)];
    Masks masks(static_cast<std::size_t>(s.n));
    masks[0] = prefixes[static_cast<std::size_t>(t)];
    auto visit = [&](const Mask* ms) { return p.consider(ms); };
    walk(s.n, s.k, 1, s.full() & ~masks[0], masks.data(), visit);
    if (p.done()) {
      long cur = first_done.load();
      while (t < cur && !first_done.compare_exchange_weak(cur, t)) {
      }
    }
  }

  Partial out = make();
  for (auto& p : parts) {
    if (!out.merge(std::move(p))) break;
  }
  return out;
}

template <class Key, class KeyFn>
struct Best {
  const KeyFn* fn;
  int n;
  bool all;
  bool has = false;
  Key best{};
  std::vector<Masks> optima;
  std::uint64_t count = 0;

  bool consider(const Mask* ms) {
    Key key = (*fn)(ms);
    if (!has || best < key) {
      has = true;
      best = std::move(key);
      optima.clear();
      count = 0;
    } else if (key < best) {
      return true;
    }
    ++count;
    if (all || optima.empty()) optima.emplace_back(ms, ms + n);
    return true;
  }
  bool merge(Best&& o) {
    if (!o.has) return true;
    if (!has || best < o.best) {
      has = true;
      best = std::move(o.best);
      optima = std::move(o.optima);
      count = o.count;
    } else if (!(o.best < best)) {
      count += o.count;
      for (auto& x : o.optima) {
        if (all || optima.empty()) optima.push_back(std::move(x));
      }
    }
    return true;
  }
  [[nodiscard]] bool done() const { return false; }
};

template <class Pred>
struct Collect {
  const Pred* pred;
  int n;
  bool first_only;
  std::vector<Masks> found;

  bool consider(const Mask* ms) {
    if (!(*pred)(ms)) return true;
    found.emplace_back(ms, ms + n);
    return !first_only;
  }
  bool merge(Collect&& o) {
    for (auto& x : o.found) {
      if (first_only && !found.empty()) break;
      found.push_back(std::move(x));
    }
    return !(first_only && !found.empty());
  }
  [[nodiscard]] bool done() const { return first_only && !found.empty(); }
};

Allocation to_allocation(const Masks& masks) {
  std::vector<Bundle> bundles;
  for (Mask b : masks) {
    Bundle items;
    for (; b != 0; b &= b - 1) items.push_back(std::countr_zero(b));
    bundles.push_back(std::move(items));
  }
  return Allocation{std::move(bundles)};
}

Mask to_mask(const Bundle& b) {
  Mask out = 0;
  for (ItemId g : b) out |= Mask{1} << g;
  return out;
}

template <class Key, class KeyFn>
Best<Key, KeyFn> run_best(const Scaled& s, const SolveOptions& opts, const KeyFn& fn) {
  return scan<Best<Key, KeyFn>>(s, opts.exec, [&] { return Best<Key, KeyFn>{&fn, s.n, opts.all_optima, false, Key{}, {}, 0}; });
}

template <class Key, class KeyFn>
ObjectiveResult fill(Rule rule, const Scaled& s, const Best<Key, KeyFn>& b) {
  ObjectiveResult r;
  r.rule = rule;
  r.count = b.count;
  for (const auto& ms : b.optima) {
    r.optima.push_back(to_allocation(ms));
    std::vector<Rational> vals;
    for (int i = 0; i < s.n; ++i) vals.push_back(s.unscale(s.sum(i, ms[static_cast<std::size_t>(i)])));
    r.values.push_back(std::move(vals));
  }
  return r;
}

template <class Num>
struct NashKey {
  int positive = 0;
  Num product{};
  friend bool operator<(const NashKey& a, const NashKey& b) {
    if (a.positive != b.positive) return a.positive < b.positive;
    return a.product < b.product;
  }
};

template <class Num>
ObjectiveResult nash(const Scaled& s, const SolveOptions& opts) {
  auto fn = [&s](const Mask* ms) {
    NashKey<Num> key;
    key.product = Num(1);
    for (int i = 0; i < s.n; ++i) {
      const std::int64_t w = s.sum(i, ms[i]);
      if (w > 0) {
        ++key.positive;
        key.product *= Num(static_cast<long>(w));
      }
    }
    return key;
  };
  auto best = run_best<NashKey<Num>>(s, opts, fn);
  ObjectiveResult r = fill(Rule::mnw, s, best);
  r.positive_count = best.best.positive;
  r.objective = Rational(1);
  for (const auto& v : r.values.front()) {
    if (v.sign() > 0) r.objective *= v;
  }
  return r;
}

}  // namespace

void enumerate_allocations(int n, int k, const std::function<bool(const Allocation&)>& visit, std::uint64_t budget) {
  if (n < 1 || k < 1) throw ValidationError("enumeration needs n >= 1 and k >= 1");
  if (n * k > 64) throw ValidationError("exhaustive search supports at most 64 items");
  check_budget(n, k, budget);
  const int m = n * k;
  const Mask full = m == 64 ? ~Mask{0} : ((Mask{1} << m) - 1);
  Masks masks(static_cast<std::size_t>(n));
  auto f = [&](const Mask* ms) { return visit(to_allocation(Masks(ms, ms + n))); };
  walk(n, k, 0, full, masks.data(), f);
}

ObjectiveResult max_nash_welfare(const Instance& inst, const SolveOptions& opts) {
  check_budget(inst.n(), inst.k(), opts.budget);
  const Scaled s = scale_instance(inst);
  if (s.product_bits <= 125) return nash<__int128>(s, opts);
  return nash<mpz_class>(s, opts);
}

ObjectiveResult leximin(const Instance& inst, const SolveOptions& opts) {
  check_budget(inst.n(), inst.k(), opts.budget);
  const Scaled s = scale_instance(inst);
  auto fn = [&s](const Mask* ms) {
    std::vector<std::int64_t> key(static_cast<std::size_t>(s.n));
    for (int i = 0; i < s.n; ++i) key[i] = s.sum(i, ms[i]);
    std::sort(key.begin(), key.end());
    return key;
  };
  auto best = run_best<std::vector<std::int64_t>>(s, opts, fn);
  ObjectiveResult r = fill(Rule::leximin, s, best);
  for (std::int64_t x : best.best) r.sorted_values.push_back(s.unscale(x));
  r.objective = r.sorted_values.front();
  return r;
}

ObjectiveResult max_social_welfare(const Instance& inst, const SolveOptions& opts) {
  check_budget(inst.n(), inst.k(), opts.budget);
  const Scaled s = scale_instance(inst);
  auto fn = [&s](const Mask* ms) {
    std::int64_t total = 0;
    for (int i = 0; i < s.n; ++i) total += s.sum(i, ms[i]);
    return total;
  };
  auto best = run_best<std::int64_t>(s, opts, fn);
  ObjectiveResult r = fill(Rule::sw, s, best);
  r.objective = s.unscale(best.best);
  return r;
}

ParetoResult is_pareto_optimal(const Instance& inst, const Allocation& alloc, const SolveOptions& opts) {
  require_valid(inst, alloc);
  check_budget(inst.n(), inst.k(), opts.budget);
  const Scaled s = scale_instance(inst);
  std::vector<std::int64_t> base;
  for (int i = 0; i < s.n; ++i) base.push_back(s.sum(i, to_mask(alloc.bundles[i])));
  auto dominates = [&](const Mask* ms) {
    bool strict = false;
    for (int i = 0; i < s.n; ++i) {
      const std::int64_t w = s.sum(i, ms[i]);
      if (w < base[i]) return false;
      strict = strict || w > base[i];
    }
    return strict;
  };
  using C = Collect<decltype(dominates)>;
  C hit = scan<C>(s, opts.exec, [&] { return C{&dominates, s.n, true, {}}; });
  ParetoResult r;
  if (!hit.found.empty()) {
    r.optimal = false;
    r.certificate = to_allocation(hit.found.front());
  }
  return r;
}

ExistsResult effx_exists(const Instance& inst, Notion notion, const Rational& threshold, SearchMode mode,
                         const SolveOptions& opts) {
  check_budget(inst.n(), inst.k(), opts.budget);
  const Scaled s = scale_instance(inst);
  ExistsResult out;
  if (threshold > Rational(1)) return out;  // every gamma is at most 1
  const mpz_class tn = threshold.numerator();
  const mpz_class td = threshold.denominator();
  if (!tn.fits_slong_p() || !td.fits_slong_p()) throw ValidationError("threshold " + threshold.str() + " too large");
  const __int128 p = tn.get_si();
  const __int128 q = td.get_si();
  const int n = s.n;

  auto meets = [&](const Mask* ms) {
    for (int i = 0; i < n; ++i) {
      const std::int64_t own = s.sum(i, ms[i]);
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const std::int64_t other = s.sum(i, ms[j]);
        if (own >= other) continue;
        if (notion == Notion::ef) {
          if (own * q < p * other) return false;
          continue;
        }
        bool any = false;
        bool every = true;
        for (Mask a = ms[i]; a != 0; a &= a - 1) {
          const std::int64_t va = s.at(i, std::countr_zero(a));
          for (Mask b = ms[j]; b != 0; b &= b - 1) {
            const std::int64_t vb = s.at(i, std::countr_zero(b));
            if (vb <= va) continue;
            const std::int64_t num = own - va + vb;
            const std::int64_t den = other - vb + va;
            const bool ok = den == 0 || num * q >= p * den;
            any = any || ok;
            every = every && ok;
          }
        }
        if (notion == Notion::eff1 ? !any : !every) return false;
      }
    }
    return true;
  };
  using C = Collect<decltype(meets)>;
  const bool first = mode == SearchMode::first;
  C hit = scan<C>(s, opts.exec, [&] { return C{&meets, n, first, {}}; });
  for (const auto& ms : hit.found) out.found.push_back(to_allocation(ms));
  return out;
}

Json to_json(const ObjectiveResult& r) {
  Json optima = Json::array();
  for (std::size_t t = 0; t < r.optima.size(); ++t) {
    Json vals = Json::array();
    Json positive = Json::array();
    for (std::size_t i = 0; i < r.values[t].size(); ++i) {
      vals.push_back(r.values[t][i].str());
      if (r.values[t][i].sign() > 0) positive.push_back(i);
    }
    Json o = to_json(r.optima[t]);
    o["values"] = std::move(vals);
    if (r.rule == Rule::mnw) o["positive_agents"] = std::move(positive);
    optima.push_back(std::move(o));
  }
  Json out{{"rule", rule_name(r.rule)}, {"count", r.count}, {"objective", r.objective.str()},
           {"objective_approx", r.objective.to_double()}};
  if (r.rule == Rule::mnw) out["positive_count"] = r.positive_count;
  if (r.rule == Rule::leximin) {
    Json sv = Json::array();
    for (const auto& v : r.sorted_values) sv.push_back(v.str());
    out["sorted_values"] = std::move(sv);
  }
  out["optima"] = std::move(optima);
  return out;
}

Json to_json(const ParetoResult& r) {
  return Json{{"pareto_optimal", r.optimal},
              {"certificate", r.certificate ? to_json(*r.certificate) : Json(nullptr)}};
}

Json to_json(const ExistsResult& r) {
  Json found = Json::array();
  for (const auto& a : r.found) found.push_back(to_json(a));
  return Json{{"exists", !r.found.empty()}, {"count", r.found.size()}, {"allocations", std::move(found)}};
}

}  // namespace flipfair
