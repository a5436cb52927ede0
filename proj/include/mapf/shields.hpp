#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "mapf/pibt.hpp"
#include "mapf/rng.hpp"

namespace mapf {

/// Probability vector over the five actions in index order.
struct ActionDist {
  std::array<double, kNumActions> probs{};

  // Renormalizes when the sum is within 1e-6 of 1; throws std::invalid_argument
  // for negative entries or a sum outside that window.
  static ActionDist checked(const std::array<double, kNumActions>& probs);
  static ActionDist uniform();
  static ActionDist one_hot(Action a);

  double operator[](Action a) const { return probs[index_of(a)]; }
};

// Highest probability, lowest index on ties.
Action argmax_action(const ActionDist& dist);

enum class OrderingMode { Sort, Sample };

// Sort: descending probability, ties by index. Sample: draws without replacement
// proportionally to probability; zero-probability actions follow in index order.
ActionOrdering dist_to_ordering(const ActionDist& dist, OrderingMode mode, Rng& rng);

// Freeze-on-conflict: rejected proposals become waits, iterated to a fixpoint.
std::vector<Action> cs_naive(std::span<const Action> proposals, const SimState& state);

// PIBT over orderings derived from the distributions, using the state's priorities.
std::vector<Action> cs_pibt(std::span<const ActionDist> dists, const SimState& state,
                            OrderingMode mode, Rng& rng);

/// Shield with a persistent PIBT workspace, for stepping an episode.
class CsPibt {
 public:
  CsPibt(const GridMap& map, OrderingMode mode) : pibt_(map), mode_(mode) {}

  std::vector<Action> operator()(std::span<const ActionDist> dists, const SimState& state,
                                 Rng& rng);

 private:
  Pibt pibt_;
  OrderingMode mode_;
  std::vector<ActionOrdering> orderings_;
};

enum class ShieldKind { Naive, PibtSort, PibtSample };

std::string_view shield_name(ShieldKind kind);
// Accepts "naive", "pibt-sort", "pibt-sample"; throws std::invalid_argument otherwise.
ShieldKind parse_shield(std::string_view name);

}  // namespace mapf
