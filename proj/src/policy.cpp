#include "mapf/policy.hpp"

#include <algorithm>
#include <cmath>

#include "mapf/errors.hpp"

namespace mapf {

std::vector<ActionDist> greedy_policy(const SimState& state, const TableSet& tables) {
  std::vector<ActionDist> out(state.num_agents());
  for (int i = 0; i < state.num_agents(); ++i) {
    const auto g = greedy_action_vector(*tables[i], state.positions[i], state.map());
    int ones = 0;
    for (auto v : g) ones += v;
    for (int a = 0; a < kNumActions; ++a) out[i].probs[a] = g[a] ? 1.0 / ones : 0.0;
  }
  return out;
}

std::vector<ActionDist> random_policy(const SimState& state, Rng&) {
  return std::vector<ActionDist>(state.num_agents(), ActionDist::uniform());
}

GraphInput build_graph_input(const SimState& state, const TableSet& tables, int radius,
                             int max_neighbors) {
  GraphInput g;
  g.fovs = extract_all(state.map(), state.positions, tables, radius);
  g.neighbors = build_graph(state, radius, max_neighbors);
  return g;
}

namespace {

constexpr float kLeakySlope = 0.01f;
constexpr float kNormEps = 1e-5f;

inline float leaky(float x) { return x > 0.0f ? x : kLeakySlope * x; }

// y = W x (+ b). W is [out, in] row-major.
void linear(const Tensor& w, const Tensor* b, const float* x, float* y) {
  const std::size_t out = w.shape[0];
  const std::size_t in = w.shape[1];
  for (std::size_t o = 0; o < out; ++o) {
    const float* row = w.data.data() + o * in;
    float acc = b ? b->data[o] : 0.0f;
    for (std::size_t k = 0; k < in; ++k) acc += row[k] * x[k];
    y[o] = acc;
  }
}

void layer_norm(const Tensor& gain, const Tensor& bias, float* x, std::size_t n) {
  float mean = 0.0f;
  for (std::size_t k = 0; k < n; ++k) mean += x[k];
  mean /= static_cast<float>(n);
  float var = 0.0f;
  for (std::size_t k = 0; k < n; ++k) var += (x[k] - mean) * (x[k] - mean);
  var /= static_cast<float>(n);
  const float inv = 1.0f / std::sqrt(var + kNormEps);
  for (std::size_t k = 0; k < n; ++k) x[k] = (x[k] - mean) * inv * gain.data[k] + bias.data[k];
}

// Conv (3x3, stride 1, no padding) + leaky + flatten (channel, row, col), then the greedy vector.
void encode_agent(const Weights& w, const FovTensor& fov, float* features) {
  const int d = fov.size();
  const int out = w.shape.conv_size();
  const int channels = static_cast<int>(w.shape.conv_channels);
  const Tensor& kernel = w.at("conv.weight");
  const Tensor& bias = w.at("conv.bias");
  for (int c = 0; c < channels; ++c) {
    for (int r = 0; r < out; ++r) {
      for (int col = 0; col < out; ++col) {
        float acc = bias.data[c];
        for (int ic = 0; ic < kFovChannels; ++ic) {
          const float* k = kernel.data.data() + ((c * kFovChannels + ic) * 3) * 3;
          const float* img = fov.channels.data() + ic * d * d;
          for (int kr = 0; kr < 3; ++kr) {
            for (int kc = 0; kc < 3; ++kc) acc += k[kr * 3 + kc] * img[(r + kr) * d + col + kc];
          }
        }
        features[(c * out + r) * out + col] = leaky(acc);
      }
    }
  }
  float* tail = features + channels * out * out;
  for (int a = 0; a < kNumActions; ++a) tail[a] = fov.greedy[a];
}

}  // namespace

std::vector<std::array<float, kNumActions>> neural_logits(const Weights& w, const GraphInput& graph) {
  const std::size_t n = graph.fovs.size();
  if (graph.neighbors.size() != n) throw WeightsError("graph has mismatched neighbor lists");
  for (const auto& fov : graph.fovs) {
    if (fov.radius != static_cast<int>(w.shape.radius)) {
      throw WeightsError("FoV radius " + std::to_string(fov.radius) + " does not match weights radius " +
                         std::to_string(w.shape.radius));
    }
  }
  const std::size_t e = w.shape.embed_dim;
  const std::size_t f = static_cast<std::size_t>(w.shape.feature_dim());

  std::vector<float> features(f);
  std::vector<float> h(n * e);
  std::vector<float> m(n * e);
  for (std::size_t i = 0; i < n; ++i) {
    encode_agent(w, graph.fovs[i], features.data());
    linear(w.at("node.weight"), &w.at("node.bias"), features.data(), h.data() + i * e);
    linear(w.at("message.weight"), &w.at("message.bias"), features.data(), m.data() + i * e);
  }

  std::vector<float> agg(e);
  std::vector<float> self_part(e);
  std::vector<float> neigh_part(e);
  std::vector<float> next(n * e);
  std::vector<float> vals;
  for (int k = 0; k < ModelShape::kRounds; ++k) {
    const std::string sage = "sage." + std::to_string(k);
    const std::string norm = "norm." + std::to_string(k);
    const Tensor& w_self = w.at(sage + ".self.weight");
    const Tensor& b_self = w.at(sage + ".self.bias");
    const Tensor& w_neigh = w.at(sage + ".neigh.weight");
    const Tensor& gain = w.at(norm + ".weight");
    const Tensor& shift = w.at(norm + ".bias");
    for (std::size_t i = 0; i < n; ++i) {
      std::fill(agg.begin(), agg.end(), 0.0f);
      const auto& nb = graph.neighbors[i];
      for (int j : nb) {
        if (j < 0 || static_cast<std::size_t>(j) >= n) throw WeightsError("neighbor index out of range");
      }
      if (!nb.empty()) {
        // Summed in value order so relabeling agents cannot change the rounding.
        vals.resize(nb.size());
        const float inv = 1.0f / static_cast<float>(nb.size());
        for (std::size_t x = 0; x < e; ++x) {
          for (std::size_t k = 0; k < nb.size(); ++k) vals[k] = m[nb[k] * e + x];
          std::sort(vals.begin(), vals.end());
          float acc = 0.0f;
          for (float v : vals) acc += v;
          agg[x] = acc * inv;
        }
      }
      linear(w_self, &b_self, h.data() + i * e, self_part.data());
      linear(w_neigh, nullptr, agg.data(), neigh_part.data());
      float* out = next.data() + i * e;
      for (std::size_t x = 0; x < e; ++x) out[x] = leaky(self_part[x] + neigh_part[x]);
      layer_norm(gain, shift, out, e);
    }
    h.swap(next);
    m = h;
  }

  std::vector<std::array<float, kNumActions>> logits(n);
  std::vector<float> hidden(e);
  for (std::size_t i = 0; i < n; ++i) {
    linear(w.at("head.0.weight"), &w.at("head.0.bias"), h.data() + i * e, hidden.data());
    for (auto& v : hidden) v = leaky(v);
    linear(w.at("head.1.weight"), &w.at("head.1.bias"), hidden.data(), logits[i].data());
  }
  return logits;
}

std::vector<ActionDist> neural_forward(const Weights& w, const GraphInput& graph) {
  const auto logits = neural_logits(w, graph);
  std::vector<ActionDist> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    double top = logits[i][0];
    for (float z : logits[i]) top = std::max(top, static_cast<double>(z));
    double sum = 0.0;
    for (int a = 0; a < kNumActions; ++a) {
      out[i].probs[a] = std::exp(static_cast<double>(logits[i][a]) - top);
      sum += out[i].probs[a];
    }
    for (auto& p : out[i].probs) p /= sum;
  }
  return out;
}

std::vector<ActionDist> NeuralPolicy::act(const SimState& state, const TableSet& tables, Rng&) {
  const auto graph = build_graph_input(state, tables, static_cast<int>(weights_->shape.radius), max_neighbors_);
  return neural_forward(*weights_, graph);
}

}  // namespace mapf
