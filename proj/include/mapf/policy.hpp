#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mapf/features.hpp"
#include "mapf/shields.hpp"
#include "mapf/weights.hpp"

namespace mapf {

// Uniform over the greedy-action set of each agent.
std::vector<ActionDist> greedy_policy(const SimState& state, const TableSet& tables);

// 0.2 on every action regardless of legality.
std::vector<ActionDist> random_policy(const SimState& state, Rng& rng);

struct GraphInput {
  std::vector<FovTensor> fovs;
  NeighborLists neighbors;
};

GraphInput build_graph_input(const SimState& state, const TableSet& tables, int radius,
                             int max_neighbors);

/// Inference for the FoV-CNN + 3-round message-passing policy (dropout off).
///
///   x_i   = [leaky(conv3x3(fov_i)) flattened, greedy_i]
///   h_i   = W_node x_i + b_node,   m_i = W_msg x_i + b_msg
///   round k = 0..2:
///     a_i = mean of m_j over in-neighbors j (zero when none)
///     h_i = layernorm_k(leaky(W_self,k h_i + b_self,k + W_neigh,k a_i))
///     m_i = h_i
///   logits_i = W_h1 leaky(W_h0 h_i + b_h0) + b_h1,  output softmax(logits_i)
///
/// leaky slope 0.01, layer-norm eps 1e-5. Throws WeightsError if the FoV radius
/// differs from the weights' radius.
std::vector<ActionDist> neural_forward(const Weights& weights, const GraphInput& graph);

// Raw logits, for bitwise determinism checks.
std::vector<std::array<float, kNumActions>> neural_logits(const Weights& weights,
                                                          const GraphInput& graph);

class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  virtual std::vector<ActionDist> act(const SimState& state, const TableSet& tables, Rng& rng) = 0;
};

class GreedyPolicy final : public Policy {
 public:
  std::string name() const override { return "greedy"; }
  std::vector<ActionDist> act(const SimState& state, const TableSet& tables, Rng&) override {
    return greedy_policy(state, tables);
  }
};

class RandomPolicy final : public Policy {
 public:
  std::string name() const override { return "random"; }
  std::vector<ActionDist> act(const SimState& state, const TableSet&, Rng& rng) override {
    return random_policy(state, rng);
  }
};

class NeuralPolicy final : public Policy {
 public:
  NeuralPolicy(std::shared_ptr<const Weights> weights, int max_neighbors = 5)
      : weights_(std::move(weights)), max_neighbors_(max_neighbors) {}

  std::string name() const override { return "neural"; }
  std::vector<ActionDist> act(const SimState& state, const TableSet& tables, Rng& rng) override;

 private:
  std::shared_ptr<const Weights> weights_;
  int max_neighbors_;
};

}  // namespace mapf
