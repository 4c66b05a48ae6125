#include <algorithm>
#include <cctype>
#include <numeric>
#include <string>

#include "flipfair/algorithms.hpp"
#include "flipfair/errors.hpp"

namespace flipfair {

namespace {

std::string join(const std::vector<AgentId>& xs) {
  std::string s;
  for (std::size_t t = 0; t < xs.size(); ++t) s += (t ? "," : "") + std::to_string(xs[t]);
  return s;
}

bool is_permutation_of_agents(const std::vector<AgentId>& round, int n) {
  if (static_cast<int>(round.size()) != n) return false;
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (AgentId a : round) {
    if (a < 0 || a >= n || seen[a]) return false;
    seen[a] = true;
  }
  return true;
}

// Lowest id wins among equal values.
ItemId favourite(const Instance& inst, AgentId a, const std::vector<bool>& taken) {
  ItemId best = -1;
  for (ItemId g = 0; g < inst.m(); ++g) {
    if (taken[g]) continue;
    if (best < 0 || inst.value(a, g) > inst.value(a, best)) best = g;
  }
  return best;
}

Allocation run_rounds(const Instance& inst, const std::vector<std::vector<AgentId>>& rounds) {
  std::vector<Bundle> bundles(static_cast<std::size_t>(inst.n()));
  std::vector<bool> taken(static_cast<std::size_t>(inst.m()), false);
  for (const auto& round : rounds) {
    for (AgentId a : round) {
      const ItemId g = favourite(inst, a, taken);
      taken[g] = true;
      bundles[a].push_back(g);
    }
  }
  return Allocation::canonical(std::move(bundles));
}

void check_order(const Instance& inst, std::span<const AgentId> order) {
  std::vector<AgentId> o(order.begin(), order.end());
  if (!is_permutation_of_agents(o, inst.n())) {
    throw ValidationError("order [" + join(o) + "] is not a permutation of the " + std::to_string(inst.n()) +
                          " agents");
  }
}

}  // namespace

void validate_pick_sequence(const Instance& inst, const PickSequence& seq) {
  if (static_cast<int>(seq.rounds.size()) != inst.k()) {
    throw ValidationError("pick sequence has " + std::to_string(seq.rounds.size()) + " rounds; expected k = " +
                          std::to_string(inst.k()));
  }
  for (std::size_t r = 0; r < seq.rounds.size(); ++r) {
    if (!is_permutation_of_agents(seq.rounds[r], inst.n())) {
      throw ValidationError("round " + std::to_string(r) + " [" + join(seq.rounds[r]) +
                            "] is not a permutation of the agents");
    }
  }
}

PickSequence pick_sequence_from_json(const Json& doc) {
  const Json* rounds = &doc;
  if (doc.is_object()) {
    if (!doc.contains("rounds")) throw ParseError("pick sequence: missing field \"rounds\"");
    rounds = &doc.at("rounds");
  }
  if (!rounds->is_array()) throw ParseError("pick sequence: rounds must be an array");
  PickSequence seq;
  for (std::size_t r = 0; r < rounds->size(); ++r) {
    const auto& round = (*rounds)[r];
    if (!round.is_array()) throw ParseError("pick sequence: round " + std::to_string(r) + " must be an array");
    std::vector<AgentId> ids;
    for (const auto& a : round) {
      if (!a.is_number_integer()) throw ParseError("pick sequence: round " + std::to_string(r) + " holds a non-id");
      ids.push_back(a.get<int>());
    }
    seq.rounds.push_back(std::move(ids));
  }
  return seq;
}

PickSequence parse_pick_sequence(std::string_view text) {
  return pick_sequence_from_json(parse_json(text, "pick sequence"));
}

Json to_json(const PickSequence& seq) {
  Json rounds = Json::array();
  for (const auto& r : seq.rounds) rounds.push_back(r);
  return Json{{"rounds", std::move(rounds)}};
}

std::vector<PickSequence> all_pick_sequences(int n, int k) {
  std::vector<std::vector<AgentId>> perms;
  std::vector<AgentId> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  do {
    perms.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));

  std::vector<PickSequence> out;
  std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
  while (true) {
    PickSequence s;
    for (std::size_t r : idx) s.rounds.push_back(perms[r]);
    out.push_back(std::move(s));
    int pos = k - 1;
    while (pos >= 0 && ++idx[pos] == perms.size()) idx[pos--] = 0;
    if (pos < 0) break;
  }
  return out;
}

std::vector<AgentId> parse_order(std::string_view text) {
  std::vector<AgentId> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    std::string tok(text.substr(pos, comma - pos));
    tok.erase(std::remove_if(tok.begin(), tok.end(), [](unsigned char c) { return std::isspace(c); }), tok.end());
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos) {
      throw ParseError("order: '" + std::string(text) + "' is not a comma-separated list of agent ids");
    }
    out.push_back(std::stoi(tok));
    pos = comma + 1;
  }
  return out;
}

Allocation round_robin(const Instance& inst, std::span<const AgentId> order) {
  check_order(inst, order);
  std::vector<std::vector<AgentId>> rounds(static_cast<std::size_t>(inst.k()),
                                           std::vector<AgentId>(order.begin(), order.end()));
  return run_rounds(inst, rounds);
}

Allocation balanced_round_robin_k2(const Instance& inst, std::span<const AgentId> order) {
  if (inst.k() != 2) {
    throw ValidationError("balanced round robin needs k = 2, got k = " + std::to_string(inst.k()));
  }
  check_order(inst, order);
  std::vector<AgentId> fwd(order.begin(), order.end());
  std::vector<AgentId> rev(fwd.rbegin(), fwd.rend());
  return run_rounds(inst, {fwd, rev});
}

Allocation generalized_round_robin(const Instance& inst, const PickSequence& seq) {
  validate_pick_sequence(inst, seq);
  return run_rounds(inst, seq.rounds);
}

}  // namespace flipfair
