#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <string>

#include "flipfair/algorithms.hpp"
#include "flipfair/audit.hpp"
#include "flipfair/errors.hpp"

namespace flipfair {

// ---- selection scripts ----

namespace {

const char* kind_name(ScriptChoice::Kind k) {
  switch (k) {
    case ScriptChoice::Kind::agent:
      return "agent";
    case ScriptChoice::Kind::cycle:
      return "cycle";
    case ScriptChoice::Kind::drop_item:
      return "drop_item";
  }
  return "?";
}

std::string describe(const ScriptChoice& c) {
  return "script choice {step " + std::to_string(c.step) + ", " + kind_name(c.kind) + "}";
}

}  // namespace

SelectionScript script_from_json(const Json& doc) {
  const Json* list = &doc;
  if (doc.is_object() && doc.contains("choices")) list = &doc.at("choices");
  if (!list->is_array()) throw ParseError("script: expected a list of {\"step\", \"choice\"} entries");
  SelectionScript s;
  for (std::size_t e = 0; e < list->size(); ++e) {
    const auto& entry = (*list)[e];
    const std::string where = "script entry " + std::to_string(e);
    if (!entry.is_object() || !entry.contains("step") || !entry.at("step").is_number_integer() ||
        !entry.contains("choice") || !entry.at("choice").is_object() || entry.at("choice").size() != 1) {
      throw ParseError(where + ": expected {\"step\": int, \"choice\": {<one key>}}");
    }
    ScriptChoice c;
    c.step = entry.at("step").get<int>();
    if (c.step < 0) throw ParseError(where + ": negative step");
    const auto& ch = entry.at("choice");
    if (ch.contains("agent") && ch.at("agent").is_number_integer()) {
      c.kind = ScriptChoice::Kind::agent;
      c.agent = ch.at("agent").get<int>();
    } else if (ch.contains("drop_item") && ch.at("drop_item").is_number_integer()) {
      c.kind = ScriptChoice::Kind::drop_item;
      c.item = ch.at("drop_item").get<int>();
    } else if (ch.contains("cycle") && ch.at("cycle").is_array()) {
      c.kind = ScriptChoice::Kind::cycle;
      for (const auto& a : ch.at("cycle")) {
        if (!a.is_number_integer()) throw ParseError(where + ": cycle must list agent ids");
        c.cycle.push_back(a.get<int>());
      }
    } else {
      throw ParseError(where + ": choice must be {\"agent\": id}, {\"cycle\": [ids]} or {\"drop_item\": id}");
    }
    s.choices.push_back(std::move(c));
  }
  return s;
}

SelectionScript parse_script(std::string_view text) { return script_from_json(parse_json(text, "script")); }

Json to_json(const SelectionScript& script) {
  Json out = Json::array();
  for (const auto& c : script.choices) {
    Json choice;
    switch (c.kind) {
      case ScriptChoice::Kind::agent:
        choice = Json{{"agent", c.agent}};
        break;
      case ScriptChoice::Kind::cycle:
        choice = Json{{"cycle", c.cycle}};
        break;
      case ScriptChoice::Kind::drop_item:
        choice = Json{{"drop_item", c.item}};
        break;
    }
    out.push_back(Json{{"step", c.step}, {"choice", std::move(choice)}});
  }
  return out;
}

// ---- traces ----

Json to_json(const TraceRecord& rec) {
  Json bundles = Json::array();
  for (const auto& b : rec.bundles) bundles.push_back(b);
  return Json{{"iteration", rec.iteration},
              {"op", rec.op},
              {"agent", rec.agent},
              {"item_in", rec.item_in ? Json(*rec.item_in) : Json(nullptr)},
              {"item_out", rec.item_out ? Json(*rec.item_out) : Json(nullptr)},
              {"privileged_swap", rec.privileged_swap},
              {"removed_from_p", rec.removed_from_p},
              {"rotations", rec.rotations},
              {"rotated_agents", rec.rotated_agents},
              {"edges_before_rotation", edges_to_json(rec.edges_before_rotation)},
              {"edges", edges_to_json(rec.edges)},
              {"privileged", rec.privileged},
              {"bundles", std::move(bundles)},
              {"state_hash", rec.state_hash}};
}

std::string trace_jsonl(const RunTrace& trace) {
  std::string out;
  for (const auto& r : trace.records) out += to_json(r).dump() + "\n";
  return out;
}

OperationCounts operation_counter(const RunTrace& trace) {
  OperationCounts c;
  std::int64_t passes_run = 0;
  std::vector<std::int64_t> holding;
  for (const auto& r : trace.records) {
    ++c.iterations;
    if (r.agent >= static_cast<AgentId>(holding.size())) holding.resize(static_cast<std::size_t>(r.agent) + 1, 0);
    if (r.op == "get") {
      ++c.gets;
      passes_run = 0;
      holding[r.agent] = 0;
    } else if (r.op == "swap") {
      ++c.swaps;
      if (r.privileged_swap) ++c.privileged_swaps;
      passes_run = 0;
      c.max_swaps_per_holding = std::max(c.max_swaps_per_holding, ++holding[r.agent]);
    } else if (r.op == "pass") {
      ++c.passes;
      c.max_consecutive_passes = std::max(c.max_consecutive_passes, ++passes_run);
    }
    c.rotations += r.rotations;
    for (AgentId a : r.rotated_agents) {
      if (a < static_cast<AgentId>(holding.size())) holding[a] = 0;
    }
  }
  return c;
}

std::int64_t iteration_bound(int n, int k) {
  const std::int64_t m = static_cast<std::int64_t>(k) * n;
  return static_cast<std::int64_t>(n) * m * (m + 1);
}

// ---- shared machinery ----

namespace {

class ScriptCursor {
 public:
  explicit ScriptCursor(const SelectionScript* s) : script_(s), used_(s ? s->choices.size() : 0, false) {}

  const ScriptChoice* next(int step, ScriptChoice::Kind kind) {
    if (!script_) return nullptr;
    for (std::size_t e = 0; e < script_->choices.size(); ++e) {
      const auto& c = script_->choices[e];
      if (!used_[e] && c.step == step && c.kind == kind) {
        used_[e] = true;
        return &c;
      }
    }
    return nullptr;
  }

  void finish() const {
    if (!script_) return;
    for (std::size_t e = 0; e < used_.size(); ++e) {
      if (!used_[e]) throw ScriptError(describe(script_->choices[e]) + " was never consulted");
    }
  }

 private:
  const SelectionScript* script_;
  std::vector<bool> used_;
};

struct CycleLog {
  int rotations = 0;
  std::vector<Edge> edges_before;
  std::vector<AgentId> rotated;
};

void eliminate_cycles(const Instance& inst, std::vector<Bundle>& bundles, const std::vector<AgentId>& vertices,
                      ScriptCursor* cursor, int step, CycleLog& log) {
  while (!vertices.empty()) {
    const EnvyGraph g = build_envy_graph(inst, bundles, vertices);
    if (!g.sources().empty()) return;
    if (log.rotations == 0) log.edges_before = g.edges();
    std::vector<AgentId> cycle;
    if (const ScriptChoice* c = cursor ? cursor->next(step, ScriptChoice::Kind::cycle) : nullptr) {
      if (!g.is_cycle(c->cycle)) throw ScriptError(describe(*c) + ": not an envy cycle among the candidates");
      cycle = c->cycle;
    } else {
      cycle = *g.find_cycle();  // sourceless finite graph
    }
    Bundle first = std::move(bundles[cycle.front()]);
    for (std::size_t t = 0; t + 1 < cycle.size(); ++t) bundles[cycle[t]] = std::move(bundles[cycle[t + 1]]);
    bundles[cycle.back()] = std::move(first);
    ++log.rotations;
    for (AgentId a : cycle) {
      if (std::find(log.rotated.begin(), log.rotated.end(), a) == log.rotated.end()) log.rotated.push_back(a);
    }
  }
}

// Smaller bundle first, then the script, then lowest id.
AgentId select_agent(const std::vector<AgentId>& candidates, const std::vector<Bundle>& bundles, ScriptCursor& cursor,
                     int step) {
  if (const ScriptChoice* c = cursor.next(step, ScriptChoice::Kind::agent)) {
    if (std::find(candidates.begin(), candidates.end(), c->agent) == candidates.end()) {
      throw ScriptError(describe(*c) + ": agent " + std::to_string(c->agent) + " is not an unenvied candidate");
    }
    return c->agent;
  }
  AgentId best = candidates.front();
  for (AgentId a : candidates) {
    if (bundles[a].size() < bundles[best].size()) best = a;
  }
  return best;
}

ItemId favourite(const Instance& inst, AgentId a, const std::vector<ItemId>& pool) {
  ItemId best = -1;
  for (ItemId g : pool) {
    if (best < 0 || inst.value(a, g) > inst.value(a, best) || (inst.value(a, g) == inst.value(a, best) && g < best)) {
      best = g;
    }
  }
  return best;
}

// Items ranked by (value desc, id asc).
std::vector<ItemId> ranking(const Instance& inst, AgentId a) {
  std::vector<ItemId> r(static_cast<std::size_t>(inst.m()));
  std::iota(r.begin(), r.end(), 0);
  std::stable_sort(r.begin(), r.end(), [&](ItemId x, ItemId y) { return inst.value(a, x) > inst.value(a, y); });
  return r;
}

std::string state_hash(const std::vector<Bundle>& bundles, const std::vector<ItemId>& pool,
                       const std::vector<AgentId>& privileged) {
  std::ostringstream os;
  for (const auto& b : bundles) {
    Bundle s = b;
    std::sort(s.begin(), s.end());
    for (ItemId g : s) os << g << ',';
    os << '|';
  }
  std::vector<ItemId> p = pool;
  std::sort(p.begin(), p.end());
  for (ItemId g : p) os << g << ',';
  os << '|';
  for (AgentId a : privileged) os << a << ',';
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : os.str()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<Rational> own_values(const Instance& inst, const std::vector<Bundle>& bundles) {
  std::vector<Rational> out;
  for (AgentId i = 0; i < inst.n(); ++i) out.push_back(value_of(inst, i, bundles[i]));
  return out;
}

void check_monotone(const std::vector<Rational>& before, const std::vector<Rational>& after, int iteration) {
  for (std::size_t i = 0; i < before.size(); ++i) {
    if (after[i] < before[i]) {
      throw ImpossibleState("iteration " + std::to_string(iteration) + ": agent " + std::to_string(i) +
                            " lost value (" + before[i].str() + " -> " + after[i].str() + ")");
    }
  }
}

void fill_record(const Instance& inst, TraceRecord& rec, const std::vector<Bundle>& bundles,
                 const std::vector<ItemId>& pool, const std::vector<AgentId>& privileged, const CycleLog& log) {
  rec.rotations = log.rotations;
  rec.rotated_agents = log.rotated;
  std::sort(rec.rotated_agents.begin(), rec.rotated_agents.end());
  rec.edges_before_rotation = log.edges_before;
  rec.edges = build_envy_graph(inst, bundles).edges();
  rec.privileged = privileged;
  rec.bundles = bundles;
  for (auto& b : rec.bundles) std::sort(b.begin(), b.end());
  rec.state_hash = state_hash(bundles, pool, privileged);
}

Allocation finish(std::vector<Bundle> bundles) { return Allocation::canonical(std::move(bundles)); }

}  // namespace

PartialAllocation eliminate_envy_cycles(const Instance& inst, PartialAllocation partial,
                                        std::span<const AgentId> vertices) {
  CycleLog log;
  eliminate_cycles(inst, partial.bundles, std::vector<AgentId>(vertices.begin(), vertices.end()), nullptr, 0, log);
  return partial;
}

Allocation ece_k(const Instance& inst, const RunOptions& opts) {
  const int n = inst.n();
  const int k = inst.k();
  ScriptCursor cursor(opts.script);
  std::vector<Bundle> bundles(static_cast<std::size_t>(n));
  std::vector<ItemId> pool(static_cast<std::size_t>(inst.m()));
  std::iota(pool.begin(), pool.end(), 0);
  std::vector<AgentId> active(static_cast<std::size_t>(n));
  std::iota(active.begin(), active.end(), 0);
  if (opts.trace) *opts.trace = RunTrace{"ece", {}};
  std::vector<Rational> before = own_values(inst, bundles);

  for (int it = 0; !pool.empty(); ++it) {
    CycleLog log;
    eliminate_cycles(inst, bundles, active, &cursor, it, log);
    const auto sources = build_envy_graph(inst, bundles, active).sources();
    const AgentId j = select_agent(sources, bundles, cursor, it);
    const ItemId g = favourite(inst, j, pool);
    bundles[j].push_back(g);
    pool.erase(std::find(pool.begin(), pool.end(), g));
    if (static_cast<int>(bundles[j].size()) == k) active.erase(std::find(active.begin(), active.end(), j));
    if (!pool.empty()) eliminate_cycles(inst, bundles, active, &cursor, it, log);

    if (opts.check_invariants) {
      auto after = own_values(inst, bundles);
      check_monotone(before, after, it);
      before = std::move(after);
    }
    if (opts.trace) {
      TraceRecord rec;
      rec.iteration = it;
      rec.op = "get";
      rec.agent = j;
      rec.item_in = g;
      fill_record(inst, rec, bundles, pool, {}, log);
      opts.trace->records.push_back(std::move(rec));
    }
  }
  cursor.finish();
  return finish(std::move(bundles));
}

namespace {

class SwapRun {
 public:
  SwapRun(const Instance& inst, const RunOptions& opts)
      : inst_(inst), opts_(opts), cursor_(opts.script), n_(inst.n()), k_(inst.k()) {
    bundles_.resize(static_cast<std::size_t>(n_));
    pool_.resize(static_cast<std::size_t>(inst.m()));
    std::iota(pool_.begin(), pool_.end(), 0);
    privileged_.assign(static_cast<std::size_t>(n_), false);
    for (AgentId a = 0; a < n_; ++a) {
      auto r = ranking(inst, a);
      top_n_.push_back(std::vector<bool>(static_cast<std::size_t>(inst.m()), false));
      for (int t = 0; t < n_; ++t) top_n_[a][r[t]] = true;
      nth_value_.push_back(inst.value(a, r[n_ - 1]));
      if (t_common_ && inst.m() > n_ && !(inst.value(a, r[n_ - 1]) > inst.value(a, r[n_]))) t_common_ = false;
      if (t_common_ && a > 0 && top_n_[a] != top_n_[0]) t_common_ = false;
    }
    before_ = own_values(inst, bundles_);
  }

  Allocation run() {
    if (opts_.trace) *opts_.trace = RunTrace{"ece-swaps", {}};
    const std::int64_t bound = iteration_bound(n_, k_);
    for (int it = 0; !pool_.empty(); ++it) {
      if (it >= bound) throw ImpossibleState("no termination within " + std::to_string(bound) + " iterations");
      TraceRecord rec;
      rec.iteration = it;
      CycleLog log;
      if (!privileged_scan(it, rec)) unprivileged_step(it, rec, log);
      if (opts_.check_invariants) check(it);
      if (opts_.trace) {
        fill_record(inst_, rec, bundles_, pool_, members(true), log);
        opts_.trace->records.push_back(std::move(rec));
      }
    }
    cursor_.finish();
    return finish(std::move(bundles_));
  }

 private:
  std::vector<AgentId> members(bool in_p) const {
    std::vector<AgentId> out;
    for (AgentId a = 0; a < n_; ++a) {
      if (privileged_[a] == in_p) out.push_back(a);
    }
    return out;
  }

  // Minimum-value item; prefers items outside the agent's own top-n, then the highest id.
  ItemId drop_item(AgentId a, int step) {
    const auto& b = bundles_[a];
    Rational lo = inst_.value(a, b.front());
    for (ItemId g : b) lo = min(lo, inst_.value(a, g));
    if (const ScriptChoice* c = cursor_.next(step, ScriptChoice::Kind::drop_item)) {
      if (std::find(b.begin(), b.end(), c->item) == b.end() || inst_.value(a, c->item) != lo) {
        throw ScriptError(describe(*c) + ": item " + std::to_string(c->item) + " is not a least-valued item of agent " +
                          std::to_string(a));
      }
      return c->item;
    }
    ItemId best = -1;
    for (ItemId g : b) {
      if (inst_.value(a, g) != lo) continue;
      if (best < 0) {
        best = g;
        continue;
      }
      const bool g_top = top_n_[a][g];
      const bool best_top = top_n_[a][best];
      if ((best_top && !g_top) || (g_top == best_top && g > best)) best = g;
    }
    return best;
  }

  bool profitable(AgentId a, ItemId* want) const {
    *want = favourite(inst_, a, pool_);
    Rational lo = inst_.value(a, bundles_[a].front());
    for (ItemId g : bundles_[a]) lo = min(lo, inst_.value(a, g));
    return lo < inst_.value(a, *want);
  }

  void swap(AgentId a, ItemId out, ItemId in) {
    auto& b = bundles_[a];
    *std::find(b.begin(), b.end(), out) = in;
    *std::find(pool_.begin(), pool_.end(), in) = out;
  }

  bool privileged_scan(int it, TraceRecord& rec) {
    const auto p = members(true);
    if (p.empty()) return false;
    const auto order = build_envy_graph(inst_, bundles_, p).topological_order();
    for (AgentId a : order) {
      ItemId want = -1;
      if (!profitable(a, &want)) continue;
      const ItemId out = drop_item(a, it);
      swap(a, out, want);
      const auto reach = build_envy_graph(inst_, bundles_, p).reachable_from(a);
      for (AgentId r : reach) privileged_[r] = false;
      rec.op = "swap";
      rec.agent = a;
      rec.item_in = want;
      rec.item_out = out;
      rec.privileged_swap = true;
      rec.removed_from_p = reach;
      return true;
    }
    return false;
  }

  void unprivileged_step(int it, TraceRecord& rec, CycleLog& log) {
    const auto rest = members(false);
    eliminate_cycles(inst_, bundles_, rest, &cursor_, it, log);
    const auto sources = build_envy_graph(inst_, bundles_, rest).sources();
    const AgentId j = select_agent(sources, bundles_, cursor_, it);
    rec.agent = j;
    if (static_cast<int>(bundles_[j].size()) < k_) {
      const ItemId g = favourite(inst_, j, pool_);
      bundles_[j].push_back(g);
      pool_.erase(std::find(pool_.begin(), pool_.end(), g));
      ++gets_;
      rec.op = "get";
      rec.item_in = g;
      return;
    }
    ItemId want = -1;
    if (profitable(j, &want)) {
      const ItemId out = drop_item(j, it);
      swap(j, out, want);
      rec.op = "swap";
      rec.item_in = want;
      rec.item_out = out;
      return;
    }
    privileged_[j] = true;
    rec.op = "pass";
  }

  void check(int it) {
    const std::string at = "iteration " + std::to_string(it) + ": ";
    const auto p = members(true);
    const EnvyGraph all = build_envy_graph(inst_, bundles_);
    for (AgentId i : members(false)) {
      for (AgentId j : p) {
        if (all.has_edge(i, j)) {
          throw ImpossibleState(at + "unprivileged agent " + std::to_string(i) + " envies privileged agent " +
                                std::to_string(j));
        }
      }
    }
    if (!build_envy_graph(inst_, bundles_, p).is_acyclic()) throw ImpossibleState(at + "privileged envy graph has a cycle");
    for (AgentId a : p) {
      if (static_cast<int>(bundles_[a].size()) != k_) {
        throw ImpossibleState(at + "privileged agent " + std::to_string(a) + " holds a partial bundle");
      }
    }
    auto after = own_values(inst_, bundles_);
    check_monotone(before_, after, it);
    if (gets_ >= n_) {
      for (AgentId a = 0; a < n_; ++a) {
        if (!bundles_[a].empty() && after[a] < nth_value_[a]) {
          throw ImpossibleState(at + "agent " + std::to_string(a) + " holds less than her n-th best item");
        }
      }
    }
    if (t_common_) {
      for (AgentId a = 0; a < n_; ++a) {
        int count = 0;
        for (ItemId g : bundles_[a]) count += top_n_[0][g] ? 1 : 0;
        if (count > 1) throw ImpossibleState(at + "two common top-n items share agent " + std::to_string(a) + "'s bundle");
      }
    }
    before_ = std::move(after);
  }

  const Instance& inst_;
  const RunOptions& opts_;
  ScriptCursor cursor_;
  int n_;
  int k_;
  std::vector<Bundle> bundles_;
  std::vector<ItemId> pool_;
  std::vector<bool> privileged_;
  std::vector<std::vector<bool>> top_n_;
  std::vector<Rational> nth_value_;
  bool t_common_ = true;
  int gets_ = 0;
  std::vector<Rational> before_;
};

}  // namespace

Allocation ece_swaps(const Instance& inst, const RunOptions& opts) { return SwapRun(inst, opts).run(); }

}  // namespace flipfair
