#include "mapf/weights.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <numeric>

#include "mapf/errors.hpp"
#include "mapf/grid.hpp"

namespace mapf {

namespace {

constexpr char kMagic[8] = {'M', 'A', 'P', 'F', 'W', 'T', '1', '\0'};
constexpr std::uint32_t kVersion = 1;

std::string shape_text(const std::vector<std::uint32_t>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

template <typename T>
void put(std::string& out, T value) {
  using U = std::make_unsigned_t<T>;
  auto u = static_cast<U>(value);
  for (std::size_t b = 0; b < sizeof(T); ++b) {
    out.push_back(static_cast<char>(u & 0xff));
    u = static_cast<U>(u >> 8);
  }
}

class Cursor {
 public:
  explicit Cursor(const std::string& data) : data_(data) {}

  template <typename T>
  T get(const std::string& context) {
    need(sizeof(T), context);
    using U = std::make_unsigned_t<T>;
    U u = 0;
    for (std::size_t b = 0; b < sizeof(T); ++b) {
      u |= static_cast<U>(static_cast<U>(static_cast<unsigned char>(data_[pos_ + b])) << (8 * b));
    }
    pos_ += sizeof(T);
    return static_cast<T>(u);
  }
  std::string text(std::size_t n, const std::string& context) {
    need(n, context);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n, const std::string& context) {
    if (data_.size() - pos_ < n) throw WeightsError("unexpected EOF " + context);
  }
  const std::string& data_;
  std::size_t pos_ = 0;
};

}  // namespace

std::size_t Tensor::numel() const {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         [](std::size_t a, std::uint32_t b) { return a * b; });
}

int ModelShape::feature_dim() const {
  return static_cast<int>(conv_channels) * conv_size() * conv_size() + 5;
}

const Tensor& Weights::at(const std::string& name) const {
  auto it = tensors.find(name);
  if (it == tensors.end()) throw WeightsError("missing tensor " + name);
  return it->second;
}

std::vector<std::pair<std::string, std::vector<std::uint32_t>>> required_tensors(const ModelShape& s) {
  const std::uint32_t c = s.conv_channels;
  const std::uint32_t e = s.embed_dim;
  const auto f = static_cast<std::uint32_t>(s.feature_dim());
  std::vector<std::pair<std::string, std::vector<std::uint32_t>>> out = {
      {"conv.weight", {c, 3, 3, 3}}, {"conv.bias", {c}},
      {"node.weight", {e, f}},       {"node.bias", {e}},
      {"message.weight", {e, f}},    {"message.bias", {e}},
  };
  for (int k = 0; k < ModelShape::kRounds; ++k) {
    const std::string sage = "sage." + std::to_string(k);
    const std::string norm = "norm." + std::to_string(k);
    out.push_back({sage + ".self.weight", {e, e}});
    out.push_back({sage + ".self.bias", {e}});
    out.push_back({sage + ".neigh.weight", {e, e}});
    out.push_back({norm + ".weight", {e}});
    out.push_back({norm + ".bias", {e}});
  }
  out.push_back({"head.0.weight", {e, e}});
  out.push_back({"head.0.bias", {e}});
  out.push_back({"head.1.weight", {5, e}});
  out.push_back({"head.1.bias", {5}});
  return out;
}

void check_weights(const Weights& w) {
  if (w.shape.radius < 1) throw WeightsError("radius must be at least 1");
  if (w.shape.conv_channels < 1 || w.shape.embed_dim < 1) throw WeightsError("empty architecture");
  for (const auto& [name, shape] : required_tensors(w.shape)) {
    auto it = w.tensors.find(name);
    if (it == w.tensors.end()) throw WeightsError("missing tensor " + name);
    if (it->second.shape != shape) {
      throw WeightsError("tensor " + name + ": expected shape " + shape_text(shape) + ", found " +
                         shape_text(it->second.shape));
    }
    if (it->second.data.size() != it->second.numel()) {
      throw WeightsError("tensor " + name + ": data size does not match shape");
    }
  }
}

Weights parse_weights(const std::string& bytes) {
  Cursor in(bytes);
  if (in.text(sizeof(kMagic), "in header") != std::string(kMagic, sizeof(kMagic))) {
    throw WeightsError("bad weights magic");
  }
  const auto version = in.get<std::uint32_t>("in header");
  if (version != kVersion) throw WeightsError("unsupported weights version " + std::to_string(version));
  Weights w;
  w.shape.radius = in.get<std::uint32_t>("in header");
  w.shape.conv_channels = in.get<std::uint32_t>("in header");
  w.shape.embed_dim = in.get<std::uint32_t>("in header");
  const auto count = in.get<std::uint32_t>("in header");
  for (std::uint32_t t = 0; t < count; ++t) {
    const std::string slot = "in tensor #" + std::to_string(t);
    const auto name_len = in.get<std::uint16_t>(slot);
    const std::string name = in.text(name_len, slot);
    const std::string ctx = "in tensor " + name;
    Tensor tensor;
    const auto ndim = in.get<std::uint8_t>(ctx);
    tensor.shape.resize(ndim);
    for (auto& dim : tensor.shape) dim = in.get<std::uint32_t>(ctx);
    tensor.data.resize(tensor.numel());
    for (auto& v : tensor.data) v = std::bit_cast<float>(in.get<std::uint32_t>(ctx));
    if (!w.tensors.emplace(name, std::move(tensor)).second) throw WeightsError("duplicate tensor " + name);
  }
  if (!in.done()) throw WeightsError("trailing bytes after last tensor");
  check_weights(w);
  return w;
}

std::string encode_weights(const Weights& w) {
  std::string out(kMagic, sizeof(kMagic));
  put(out, kVersion);
  put(out, w.shape.radius);
  put(out, w.shape.conv_channels);
  put(out, w.shape.embed_dim);
  put(out, static_cast<std::uint32_t>(w.tensors.size()));
  for (const auto& [name, tensor] : w.tensors) {
    put(out, static_cast<std::uint16_t>(name.size()));
    out += name;
    put(out, static_cast<std::uint8_t>(tensor.shape.size()));
    for (auto dim : tensor.shape) put(out, dim);
    for (float v : tensor.data) put(out, std::bit_cast<std::uint32_t>(v));
  }
  return out;
}

Weights load_weights(const std::filesystem::path& path) { return parse_weights(read_text_file(path)); }

void save_weights(const std::filesystem::path& path, const Weights& w) {
  write_text_file(path, encode_weights(w));
}

Weights zero_weights(const ModelShape& shape) {
  Weights w;
  w.shape = shape;
  for (auto& [name, dims] : required_tensors(shape)) {
    Tensor t;
    t.shape = dims;
    t.data.assign(t.numel(), 0.0f);
    w.tensors.emplace(name, std::move(t));
  }
  return w;
}

Weights random_weights(const ModelShape& shape, Rng& rng, float scale) {
  Weights w = zero_weights(shape);
  for (auto& [name, t] : w.tensors) {
    if (name.rfind("norm.", 0) == 0) {
      if (name.ends_with(".weight")) std::fill(t.data.begin(), t.data.end(), 1.0f);
      continue;
    }
    // fan_in is the product of all dims but the first; a bias uses its layer's weight.
    const Tensor& ref = t.shape.size() > 1 ? t : w.tensors.at(name.substr(0, name.rfind('.')) + ".weight");
    std::size_t fan_in = 1;
    for (std::size_t d = 1; d < ref.shape.size(); ++d) fan_in *= ref.shape[d];
    const float bound = scale / std::sqrt(static_cast<float>(fan_in));
    for (auto& v : t.data) v = static_cast<float>((2.0 * uniform01(rng) - 1.0) * bound);
  }
  return w;
}

}  // namespace mapf
