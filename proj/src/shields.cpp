#include "mapf/shields.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mapf {

ActionDist ActionDist::checked(const std::array<double, kNumActions>& probs) {
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw std::invalid_argument("action distribution has a negative or NaN entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw std::invalid_argument("action distribution sums to " + std::to_string(sum));
  }
  ActionDist d;
  for (int i = 0; i < kNumActions; ++i) d.probs[i] = probs[i] / sum;
  return d;
}

ActionDist ActionDist::uniform() {
  ActionDist d;
  d.probs.fill(1.0 / kNumActions);
  return d;
}

ActionDist ActionDist::one_hot(Action a) {
  ActionDist d;
  d.probs[index_of(a)] = 1.0;
  return d;
}

Action argmax_action(const ActionDist& dist) {
  int best = 0;
  for (int i = 1; i < kNumActions; ++i) {
    if (dist.probs[i] > dist.probs[best]) best = i;
  }
  return action_from_index(best);
}

ActionOrdering dist_to_ordering(const ActionDist& dist, OrderingMode mode, Rng& rng) {
  ActionOrdering order = kAllActions;
  if (mode == OrderingMode::Sort) {
    std::stable_sort(order.begin(), order.end(),
                     [&](Action a, Action b) { return dist[a] > dist[b]; });
    return order;
  }

  std::array<double, kNumActions> remaining = dist.probs;
  int filled = 0;
  while (true) {
    double mass = 0.0;
    for (double p : remaining) mass += p;
    if (mass <= 0.0) break;
    double u = uniform01(rng) * mass;
    int pick = -1;
    for (int i = 0; i < kNumActions; ++i) {
      if (remaining[i] <= 0.0) continue;
      pick = i;
      if (u < remaining[i]) break;
      u -= remaining[i];
    }
    order[filled++] = action_from_index(pick);
    remaining[pick] = 0.0;
  }
  for (int i = 0; i < kNumActions; ++i) {
    if (dist.probs[i] <= 0.0) order[filled++] = action_from_index(i);
  }
  return order;
}

std::vector<Action> cs_naive(std::span<const Action> proposals, const SimState& state) {
  const GridMap& map = state.map();
  const int n = state.num_agents();
  std::vector<Action> result(proposals.begin(), proposals.end());
  std::vector<int> current(n);
  std::vector<int> target(n);
  for (int i = 0; i < n; ++i) {
    current[i] = map.index(state.positions[i]);
    const Cell t = apply(state.positions[i], result[i]);
    if (!map.is_free(t)) result[i] = Action::Wait;
    target[i] = map.index(apply(state.positions[i], result[i]));
  }

  // claims[cell] = number of agents whose accepted target is that cell.
  std::vector<int> claims(map.size(), 0);
  std::vector<int> mover_from(map.size(), -1);  // cell -> moving agent leaving it
  for (int i = 0; i < n; ++i) {
    ++claims[target[i]];
    if (target[i] != current[i]) mover_from[current[i]] = i;
  }

  auto freeze = [&](int i) {
    --claims[target[i]];
    mover_from[current[i]] = -1;
    result[i] = Action::Wait;
    target[i] = current[i];
    ++claims[target[i]];
  };

  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<int> rejected;
    for (int i = 0; i < n; ++i) {
      if (target[i] == current[i]) continue;
      if (claims[target[i]] > 1) {
        rejected.push_back(i);
        continue;
      }
      const int other = mover_from[target[i]];
      if (other != -1 && target[other] == current[i]) rejected.push_back(i);
    }
    for (int i : rejected) freeze(i);
    changed = !rejected.empty();
  }
  return result;
}

std::vector<Action> CsPibt::operator()(std::span<const ActionDist> dists, const SimState& state,
                                       Rng& rng) {
  orderings_.resize(dists.size());
  for (std::size_t i = 0; i < dists.size(); ++i) orderings_[i] = dist_to_ordering(dists[i], mode_, rng);
  return pibt_.step(state.positions, state.priorities, orderings_);
}

std::vector<Action> cs_pibt(std::span<const ActionDist> dists, const SimState& state,
                            OrderingMode mode, Rng& rng) {
  CsPibt shield(state.map(), mode);
  return shield(dists, state, rng);
}

std::string_view shield_name(ShieldKind kind) {
  switch (kind) {
    case ShieldKind::Naive: return "naive";
    case ShieldKind::PibtSort: return "pibt-sort";
    case ShieldKind::PibtSample: return "pibt-sample";
  }
  return "?";
}

ShieldKind parse_shield(std::string_view name) {
  if (name == "naive") return ShieldKind::Naive;
  if (name == "pibt-sort") return ShieldKind::PibtSort;
  if (name == "pibt-sample") return ShieldKind::PibtSample;
  throw std::invalid_argument("unknown shield '" + std::string(name) +
                              "' (expected naive, pibt-sort, pibt-sample)");
}

}  // namespace mapf
