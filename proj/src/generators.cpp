#include "flipfair/generators.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "flipfair/errors.hpp"

namespace flipfair {

Family parse_family(std::string_view name) {
  if (name == "general") return Family::general;
  if (name == "ordered") return Family::ordered;
  if (name == "top-n-agreement" || name == "top-n") return Family::top_n;
  if (name == "rho-bounded") return Family::rho_bounded;
  if (name == "identical") return Family::identical;
  if (name == "binary") return Family::binary;
  throw ParseError("unknown family '" + std::string(name) + "'");
}

const char* family_name(Family f) {
  switch (f) {
    case Family::general:
      return "general";
    case Family::ordered:
      return "ordered";
    case Family::top_n:
      return "top-n-agreement";
    case Family::rho_bounded:
      return "rho-bounded";
    case Family::identical:
      return "identical";
    case Family::binary:
      return "binary";
  }
  return "?";
}

std::uint64_t uniform_int(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
  const std::uint64_t span = hi - lo;
  if (span == std::numeric_limits<std::uint64_t>::max()) return rng();
  const std::uint64_t range = span + 1;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return lo + x % range;
}

namespace {

// Non-top values are drawn from [0, kBase * granularity] units; a unit is 1/granularity.
constexpr std::int64_t kBase = 10;

void shuffle(std::vector<int>& xs, std::mt19937_64& rng) {
  for (std::size_t i = xs.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_int(rng, 0, i - 1));
    std::swap(xs[i - 1], xs[j]);
  }
}

std::vector<int> permutation(int m, std::mt19937_64& rng) {
  std::vector<int> p(static_cast<std::size_t>(m));
  std::iota(p.begin(), p.end(), 0);
  shuffle(p, rng);
  return p;
}

// floor(rho * units)
std::int64_t scaled_floor(const Rational& rho, std::int64_t units) {
  mpz_class q = rho.numerator() * static_cast<long>(units);
  mpz_fdiv_q(q.get_mpz_t(), q.get_mpz_t(), rho.denominator().get_mpz_t());
  if (!q.fits_slong_p()) throw ValidationError("rho " + rho.str() + " too large");
  return q.get_si();
}

// Items in `top` get values in [lo, hi] with lo above every other value.
void fill_top_row(std::vector<std::int64_t>& row, const std::vector<bool>& top, const std::optional<Rational>& rho,
                  std::int64_t g, std::mt19937_64& rng) {
  const std::int64_t base = kBase * g;
  const auto lo = static_cast<std::int64_t>(uniform_int(rng, static_cast<std::uint64_t>(base + 1),
                                                        static_cast<std::uint64_t>(2 * base + 1)));
  const std::int64_t hi = rho ? scaled_floor(*rho, lo) : 3 * lo;
  for (std::size_t t = 0; t < row.size(); ++t) {
    row[t] = top[t] ? static_cast<std::int64_t>(uniform_int(rng, static_cast<std::uint64_t>(lo),
                                                            static_cast<std::uint64_t>(hi)))
                    : static_cast<std::int64_t>(uniform_int(rng, 0, static_cast<std::uint64_t>(base)));
  }
  // First top item takes lo.
  for (std::size_t t = 0; t < row.size(); ++t) {
    if (top[t]) {
      row[t] = std::min(row[t], lo);
      break;
    }
  }
}

std::vector<bool> random_subset(int m, int size, std::mt19937_64& rng) {
  const auto p = permutation(m, rng);
  std::vector<bool> in(static_cast<std::size_t>(m), false);
  for (int t = 0; t < size; ++t) in[p[t]] = true;
  return in;
}

std::vector<ItemId> ranking(const Instance& inst, AgentId a) {
  std::vector<ItemId> r(static_cast<std::size_t>(inst.m()));
  std::iota(r.begin(), r.end(), 0);
  std::stable_sort(r.begin(), r.end(), [&](ItemId x, ItemId y) { return inst.value(a, x) > inst.value(a, y); });
  return r;
}

}  // namespace

Instance generate(const FamilySpec& spec) {
  if (spec.n < 2) throw ValidationError("n must be at least 2");
  if (spec.k < 1) throw ValidationError("k must be at least 1");
  if (spec.granularity < 1) throw ValidationError("granularity must be at least 1");
  if (spec.rho) {
    if (*spec.rho < Rational(1)) throw ValidationError("rho = " + spec.rho->str() + " is below 1");
    if (spec.family != Family::top_n && spec.family != Family::rho_bounded) {
      throw ValidationError(std::string("rho does not apply to family ") + family_name(spec.family));
    }
  }
  const int n = spec.n;
  const int m = spec.n * spec.k;
  const std::int64_t g = spec.granularity;
  const std::int64_t span = kBase * g;
  std::mt19937_64 rng(spec.seed);
  std::vector<std::vector<std::int64_t>> units(static_cast<std::size_t>(n),
                                               std::vector<std::int64_t>(static_cast<std::size_t>(m), 0));
  auto draw = [&] { return static_cast<std::int64_t>(uniform_int(rng, 0, static_cast<std::uint64_t>(span))); };

  switch (spec.family) {
    case Family::general:
      for (auto& row : units) {
        for (auto& x : row) x = draw();
      }
      break;
    case Family::identical:
      for (auto& x : units[0]) x = draw();
      for (int i = 1; i < n; ++i) units[i] = units[0];
      break;
    case Family::binary:
      for (auto& row : units) {
        for (auto& x : row) x = static_cast<std::int64_t>(uniform_int(rng, 0, 1)) * g;
      }
      break;
    case Family::ordered: {
      const auto perm = permutation(m, rng);
      for (auto& row : units) {
        std::vector<std::int64_t> vals(static_cast<std::size_t>(m));
        for (auto& x : vals) x = draw();
        std::sort(vals.rbegin(), vals.rend());
        for (int t = 0; t < m; ++t) row[perm[t]] = vals[t];
      }
      break;
    }
    case Family::top_n: {
      const auto top = random_subset(m, n, rng);
      for (auto& row : units) fill_top_row(row, top, spec.rho, g, rng);
      break;
    }
    case Family::rho_bounded: {
      const Rational rho = spec.rho.value_or(Rational(2));
      for (auto& row : units) fill_top_row(row, random_subset(m, n, rng), rho, g, rng);
      break;
    }
  }

  std::vector<std::vector<Rational>> values;
  for (const auto& row : units) {
    std::vector<Rational> r;
    for (std::int64_t x : row) r.emplace_back(x, g);
    values.push_back(std::move(r));
  }
  Instance inst(n, spec.k, std::move(values));
  FamilySpec effective = spec;
  if (spec.family == Family::rho_bounded && !spec.rho) effective.rho = Rational(2);
  if (!in_family(classify(inst), effective)) {
    throw ImpossibleState(std::string("generated instance is not classified as ") + family_name(spec.family));
  }
  return inst;
}

Classification classify(const Instance& inst) {
  const int n = inst.n();
  const int m = inst.m();
  Classification c;

  c.identical = true;
  for (AgentId i = 1; i < n; ++i) {
    for (ItemId g = 0; g < m; ++g) c.identical = c.identical && inst.value(i, g) == inst.value(0, g);
  }

  c.binary = true;
  for (AgentId i = 0; i < n; ++i) {
    for (ItemId g = 0; g < m; ++g) {
      const auto& v = inst.value(i, g);
      c.binary = c.binary && (v.is_zero() || v == Rational(1));
    }
  }

  // A common weakly sorting permutation exists iff no two agents rank a pair strictly opposite.
  c.ordered = true;
  for (ItemId g = 0; g < m && c.ordered; ++g) {
    for (ItemId h = g + 1; h < m && c.ordered; ++h) {
      bool up = false;
      bool down = false;
      for (AgentId i = 0; i < n; ++i) {
        up = up || inst.value(i, g) < inst.value(i, h);
        down = down || inst.value(i, g) > inst.value(i, h);
      }
      c.ordered = !(up && down);
    }
  }

  std::vector<std::vector<ItemId>> tops;
  c.separated = true;
  bool have_rho = true;
  Rational ind_rho(0);
  for (AgentId i = 0; i < n; ++i) {
    const auto r = ranking(inst, i);
    if (m > n && !(inst.value(i, r[n - 1]) > inst.value(i, r[n]))) c.separated = false;
    std::vector<ItemId> top(r.begin(), r.begin() + n);
    std::sort(top.begin(), top.end());
    tops.push_back(std::move(top));
    const Rational& hi = inst.value(i, r[0]);
    const Rational& lo = inst.value(i, r[n - 1]);
    if (lo.is_zero()) {
      have_rho = false;
    } else {
      ind_rho = max(ind_rho, hi / lo);
    }
  }
  if (have_rho) c.individualized_rho = ind_rho;

  if (!c.separated) {
    c.top_n = TopNStatus::ambiguous;
  } else if (std::all_of(tops.begin(), tops.end(), [&](const auto& t) { return t == tops[0]; })) {
    c.top_n = TopNStatus::agreement;
    c.top_n_items = tops[0];
    Rational rho(0);
    bool finite = true;
    for (AgentId i = 0; i < n && finite; ++i) {
      Rational hi = inst.value(i, tops[0][0]);
      Rational lo = hi;
      for (ItemId g : tops[0]) {
        hi = max(hi, inst.value(i, g));
        lo = min(lo, inst.value(i, g));
      }
      if (lo.is_zero()) {
        finite = false;
      } else {
        rho = max(rho, hi / lo);
      }
    }
    if (finite) c.rho = rho;
  } else {
    c.top_n = TopNStatus::disagreement;
  }
  return c;
}

bool in_family(const Classification& c, const FamilySpec& spec) {
  switch (spec.family) {
    case Family::general:
      return true;
    case Family::identical:
      return c.identical;
    case Family::binary:
      return c.binary;
    case Family::ordered:
      return c.ordered;
    case Family::top_n:
      return c.top_n == TopNStatus::agreement && c.rho && (!spec.rho || *c.rho <= *spec.rho);
    case Family::rho_bounded:
      return c.separated && c.individualized_rho && (!spec.rho || *c.individualized_rho <= *spec.rho);
  }
  return false;
}

Json to_json(const Classification& c) {
  const char* status = c.top_n == TopNStatus::agreement      ? "agreement"
                       : c.top_n == TopNStatus::disagreement ? "disagreement"
                                                             : "ambiguous";
  return Json{{"identical", c.identical},
              {"binary", c.binary},
              {"ordered", c.ordered},
              {"top_n", status},
              {"top_n_items", c.top_n_items},
              {"separated", c.separated},
              {"rho", c.rho ? Json(c.rho->str()) : Json(nullptr)},
              {"individualized_rho", c.individualized_rho ? Json(c.individualized_rho->str()) : Json(nullptr)}};
}

}  // namespace flipfair
