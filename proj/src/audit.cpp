#include "flipfair/audit.hpp"

#include <algorithm>
#include <string>

#include "flipfair/errors.hpp"

namespace flipfair {

namespace {

void check_pair(const Instance& inst, const Allocation& alloc, AgentId i, AgentId j) {
  if (!inst.valid_agent(i) || !inst.valid_agent(j) || static_cast<int>(alloc.bundles.size()) != inst.n()) {
    throw ValidationError("invalid agent pair (" + std::to_string(i) + ", " + std::to_string(j) + ")");
  }
  if (i == j) throw ValidationError("pair (" + std::to_string(i) + ", " + std::to_string(j) + ") must be distinct");
}

Rational ratio_or_one(const Rational& num, const Rational& den) {
  if (den.is_zero()) return Rational(1);
  return num / den;
}

}  // namespace

std::vector<RationalFlip> rational_flips(const Instance& inst, const Allocation& alloc, AgentId i, AgentId j) {
  check_pair(inst, alloc, i, j);
  Bundle ai = alloc.bundles[i];
  Bundle aj = alloc.bundles[j];
  std::sort(ai.begin(), ai.end());
  std::sort(aj.begin(), aj.end());
  std::vector<RationalFlip> out;
  for (ItemId a : ai) {
    for (ItemId b : aj) {
      if (inst.value(i, b) > inst.value(i, a)) out.push_back({a, b});
    }
  }
  return out;
}

Rational flip_ratio(const Instance& inst, const Allocation& alloc, AgentId i, AgentId j, RationalFlip f) {
  check_pair(inst, alloc, i, j);
  const Rational own = value_of(inst, i, alloc.bundles[i]);
  const Rational other = value_of(inst, i, alloc.bundles[j]);
  const Rational& va = inst.value(i, f.a);
  const Rational& vb = inst.value(i, f.b);
  return ratio_or_one(own - va + vb, other - vb + va);
}

PairReport audit_pair(const Instance& inst, const Allocation& alloc, AgentId i, AgentId j) {
  check_pair(inst, alloc, i, j);
  PairReport r;
  r.i = i;
  r.j = j;
  const Rational own = value_of(inst, i, alloc.bundles[i]);
  const Rational other = value_of(inst, i, alloc.bundles[j]);
  r.envies = own < other;
  if (!r.envies) return r;

  r.ef = own / other;
  r.ef1_removal = false;
  r.efx_removal = true;
  for (ItemId g : alloc.bundles[j]) {
    const bool ok = own >= other - inst.value(i, g);
    r.ef1_removal = r.ef1_removal || ok;
    r.efx_removal = r.efx_removal && ok;
  }

  const auto flips = rational_flips(inst, alloc, i, j);
  if (flips.empty()) {
    throw ImpossibleState("agent " + std::to_string(i) + " envies agent " + std::to_string(j) +
                          " but no rational flip exists");
  }
  std::optional<Rational> best;
  std::optional<Rational> worst;
  for (const auto& f : flips) {
    const Rational& va = inst.value(i, f.a);
    const Rational& vb = inst.value(i, f.b);
    Rational q = ratio_or_one(own - va + vb, other - vb + va);
    if (!best || q > *best) {
      best = q;
      r.eff1_flip = f;
    }
    if (!worst || q < *worst) {
      worst = q;
      r.effx_flip = f;
    }
  }
  r.eff1 = min(*best, Rational(1));
  r.effx = min(*worst, Rational(1));
  return r;
}

Rational pair_gamma_ef(const Instance& inst, const Allocation& alloc, AgentId i, AgentId j) {
  return audit_pair(inst, alloc, i, j).ef;
}
Rational pair_gamma_eff1(const Instance& inst, const Allocation& alloc, AgentId i, AgentId j) {
  return audit_pair(inst, alloc, i, j).eff1;
}
Rational pair_gamma_effx(const Instance& inst, const Allocation& alloc, AgentId i, AgentId j) {
  return audit_pair(inst, alloc, i, j).effx;
}
bool pair_ef1_removal(const Instance& inst, const Allocation& alloc, AgentId i, AgentId j) {
  return audit_pair(inst, alloc, i, j).ef1_removal;
}
bool pair_efx_removal(const Instance& inst, const Allocation& alloc, AgentId i, AgentId j) {
  return audit_pair(inst, alloc, i, j).efx_removal;
}

AuditReport audit_allocation(const Instance& inst, const Allocation& alloc) {
  require_valid(inst, alloc);
  AuditReport rep;
  for (AgentId i = 0; i < inst.n(); ++i) {
    for (AgentId j = 0; j < inst.n(); ++j) {
      if (i == j) continue;
      PairReport p = audit_pair(inst, alloc, i, j);
      rep.ef = min(rep.ef, p.ef);
      rep.eff1 = min(rep.eff1, p.eff1);
      rep.effx = min(rep.effx, p.effx);
      rep.ef1_removal = rep.ef1_removal && p.ef1_removal;
      rep.efx_removal = rep.efx_removal && p.efx_removal;
      rep.pairs.push_back(std::move(p));
    }
  }
  return rep;
}

namespace {

Json flip_json(const std::optional<RationalFlip>& f) {
  if (!f) return nullptr;
  return Json::array({f->a, f->b});
}

}  // namespace

Json to_json(const AuditReport& report) {
  Json pairs = Json::array();
  for (const auto& p : report.pairs) {
    pairs.push_back(Json{
        {"i", p.i},
        {"j", p.j},
        {"envies", p.envies},
        {"gamma",
         {{"ef", p.ef.str()},
          {"ef1_removal", p.ef1_removal},
          {"efx_removal", p.efx_removal},
          {"eff1", p.eff1.str()},
          {"effx", p.effx.str()}}},
        {"approx", {{"ef", p.ef.to_double()}, {"eff1", p.eff1.to_double()}, {"effx", p.effx.to_double()}}},
        {"witness", {{"eff1", flip_json(p.eff1_flip)}, {"effx", flip_json(p.effx_flip)}}},
    });
  }
  Json po = report.pareto_optimal ? Json(*report.pareto_optimal) : Json(nullptr);
  return Json{{"pairs", std::move(pairs)},
              {"allocation",
               {{"ef", report.ef.str()},
                {"ef1_removal", report.ef1_removal},
                {"efx_removal", report.efx_removal},
                {"eff1", report.eff1.str()},
                {"effx", report.effx.str()},
                {"pareto_optimal", po},
                {"approx",
                 {{"ef", report.ef.to_double()},
                  {"eff1", report.eff1.to_double()},
                  {"effx", report.effx.to_double()}}}}}};
}

Notion parse_notion(std::string_view name) {
  if (name == "ef") return Notion::ef;
  if (name == "eff1") return Notion::eff1;
  if (name == "effx") return Notion::effx;
  throw ParseError("unknown notion '" + std::string(name) + "' (expected ef, eff1 or effx)");
}

const char* notion_name(Notion n) {
  switch (n) {
    case Notion::ef:
      return "ef";
    case Notion::eff1:
      return "eff1";
    case Notion::effx:
      return "effx";
  }
  return "?";
}

const Rational& gamma_of(const AuditReport& report, Notion n) {
  switch (n) {
    case Notion::ef:
      return report.ef;
    case Notion::eff1:
      return report.eff1;
    case Notion::effx:
      break;
  }
  return report.effx;
}

// ---- envy graph ----

EnvyGraph::EnvyGraph(int n, std::vector<AgentId> vertices, std::vector<std::vector<bool>> adj)
    : n_(n), vertices_(std::move(vertices)), member_(static_cast<std::size_t>(n), false), adj_(std::move(adj)) {
  std::sort(vertices_.begin(), vertices_.end());
  vertices_.erase(std::unique(vertices_.begin(), vertices_.end()), vertices_.end());
  for (AgentId v : vertices_) member_[v] = true;
}

bool EnvyGraph::contains(AgentId v) const { return v >= 0 && v < n_ && member_[v]; }

std::vector<std::pair<AgentId, AgentId>> EnvyGraph::edges() const {
  std::vector<std::pair<AgentId, AgentId>> out;
  for (AgentId i : vertices_) {
    for (AgentId j : vertices_) {
      if (adj_[i][j]) out.emplace_back(i, j);
    }
  }
  return out;
}

std::vector<AgentId> EnvyGraph::sources() const {
  std::vector<AgentId> out;
  for (AgentId j : vertices_) {
    bool envied = false;
    for (AgentId i : vertices_) envied = envied || adj_[i][j];
    if (!envied) out.push_back(j);
  }
  return out;
}

std::optional<std::vector<AgentId>> EnvyGraph::find_cycle() const {
  enum Color { white, gray, black };
  std::vector<Color> color(static_cast<std::size_t>(n_), white);
  std::vector<AgentId> path;
  std::optional<std::vector<AgentId>> found;

  auto dfs = [&](auto&& self, AgentId u) -> bool {
    color[u] = gray;
    path.push_back(u);
    for (AgentId w : vertices_) {
      if (!adj_[u][w]) continue;
      if (color[w] == gray) {
        auto it = std::find(path.begin(), path.end(), w);
        found = std::vector<AgentId>(it, path.end());
        return true;
      }
      if (color[w] == white && self(self, w)) return true;
    }
    color[u] = black;
    path.pop_back();
    return false;
  };

  for (AgentId v : vertices_) {
    if (color[v] == white && dfs(dfs, v)) return found;
  }
  return std::nullopt;
}

bool EnvyGraph::is_cycle(std::span<const AgentId> cycle) const {
  if (cycle.size() < 2) return false;
  std::vector<bool> seen(static_cast<std::size_t>(n_), false);
  for (std::size_t t = 0; t < cycle.size(); ++t) {
    const AgentId u = cycle[t];
    const AgentId w = cycle[(t + 1) % cycle.size()];
    if (!contains(u) || !contains(w) || seen[u] || !adj_[u][w]) return false;
    seen[u] = true;
  }
  return true;
}

std::vector<AgentId> EnvyGraph::topological_order() const {
  std::vector<int> indeg(static_cast<std::size_t>(n_), 0);
  for (AgentId i : vertices_) {
    for (AgentId j : vertices_) {
      if (adj_[i][j]) ++indeg[j];
    }
  }
  std::vector<AgentId> order;
  std::vector<bool> done(static_cast<std::size_t>(n_), false);
  while (order.size() < vertices_.size()) {
    AgentId next = -1;
    for (AgentId v : vertices_) {
      if (!done[v] && indeg[v] == 0) {
        next = v;
        break;
      }
    }
    if (next < 0) throw ImpossibleState("envy graph has a cycle; no topological order");
    done[next] = true;
    order.push_back(next);
    for (AgentId w : vertices_) {
      if (adj_[next][w]) --indeg[w];
    }
  }
  return order;
}

std::vector<AgentId> EnvyGraph::reachable_from(AgentId v) const {
  std::vector<bool> seen(static_cast<std::size_t>(n_), false);
  std::vector<AgentId> stack{v};
  seen[v] = true;
  while (!stack.empty()) {
    const AgentId u = stack.back();
    stack.pop_back();
    for (AgentId w : vertices_) {
      if (adj_[u][w] && !seen[w]) {
        seen[w] = true;
        stack.push_back(w);
      }
    }
  }
  std::vector<AgentId> out;
  for (AgentId u = 0; u < n_; ++u) {
    if (seen[u]) out.push_back(u);
  }
  return out;
}

EnvyGraph build_envy_graph(const Instance& inst, std::span<const Bundle> bundles, std::span<const AgentId> vertices) {
  const int n = inst.n();
  if (static_cast<int>(bundles.size()) != n) {
    throw ValidationError("expected " + std::to_string(n) + " bundles, got " + std::to_string(bundles.size()));
  }
  for (AgentId v : vertices) {
    if (!inst.valid_agent(v)) throw ValidationError("unknown vertex id " + std::to_string(v));
  }
  // val[i][j] = v_i(B_j)
  std::vector<std::vector<Rational>> val(static_cast<std::size_t>(n), std::vector<Rational>(static_cast<std::size_t>(n)));
  for (AgentId i : vertices) {
    for (AgentId j : vertices) val[i][j] = value_of(inst, i, bundles[j]);
  }
  std::vector<std::vector<bool>> adj(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n), false));
  for (AgentId i : vertices) {
    for (AgentId j : vertices) {
      if (i != j && val[i][i] < val[i][j]) adj[i][j] = true;
    }
  }
  return EnvyGraph(n, std::vector<AgentId>(vertices.begin(), vertices.end()), std::move(adj));
}

EnvyGraph build_envy_graph(const Instance& inst, std::span<const Bundle> bundles) {
  std::vector<AgentId> all(static_cast<std::size_t>(inst.n()));
  for (AgentId i = 0; i < inst.n(); ++i) all[i] = i;
  return build_envy_graph(inst, bundles, all);
}

Json edges_to_json(const std::vector<std::pair<AgentId, AgentId>>& edges) {
  Json out = Json::array();
  for (const auto& [i, j] : edges) out.push_back(Json::array({i, j}));
  return out;
}

}  // namespace flipfair
