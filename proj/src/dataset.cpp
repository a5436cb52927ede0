#include "mapf/dataset.hpp"

#include <bit>
#include <cstring>

#include "mapf/errors.hpp"
#include "mapf/parallel.hpp"

namespace mapf {

namespace {

constexpr char kMagic[8] = {'M', 'A', 'P', 'F', 'D', 'S', '1', '\0'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::string& out, T value) {
  using U = std::make_unsigned_t<T>;
  auto u = static_cast<U>(value);
  for (std::size_t b = 0; b < sizeof(T); ++b) {
    out.push_back(static_cast<char>(u & 0xff));
    u = static_cast<U>(u >> 8);
  }
}

void put_f32(std::string& out, float v) { put(out, std::bit_cast<std::uint32_t>(v)); }

class ByteReader {
 public:
  explicit ByteReader(std::string data) : data_(std::move(data)) {}

  template <typename T>
  T get(const char* what) {
    need(sizeof(T), what);
    using U = std::make_unsigned_t<T>;
    U u = 0;
    for (std::size_t b = 0; b < sizeof(T); ++b) {
      u |= static_cast<U>(static_cast<U>(static_cast<unsigned char>(data_[pos_ + b])) << (8 * b));
    }
    pos_ += sizeof(T);
    return static_cast<T>(u);
  }
  float get_f32(const char* what) { return std::bit_cast<float>(get<std::uint32_t>(what)); }
  void bytes(char* dst, std::size_t n, const char* what) {
    need(n, what);
    std::memcpy(dst, data_.data() + pos_, n);
    pos_ += n;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n, const char* what) {
    if (data_.size() - pos_ < n) throw DatasetError(std::string("unexpected EOF reading ") + what);
  }
  std::string data_;
  std::size_t pos_ = 0;
};

}  // namespace

GraphExample make_example(const Scenario& scen, const Solution& sol, int t, const TableSet& tables,
                          int radius, int max_neighbors) {
  const GridMap& map = *scen.map;
  const auto now = sol.positions_at(t);
  const auto next = sol.positions_at(t + 1);
  auto fovs = extract_all(map, now, tables, radius);
  const auto neighbors = build_graph(map, now, radius, max_neighbors);

  GraphExample g;
  g.map_name = map.name();
  g.timestep = static_cast<std::uint32_t>(t);
  g.agents.resize(now.size());
  for (std::size_t i = 0; i < now.size(); ++i) {
    auto& rec = g.agents[i];
    rec.position = now[i];
    rec.goal = scen.agents[i].goal;
    rec.label = action_between(now[i], next[i]).value();
    rec.neighbors.assign(neighbors[i].begin(), neighbors[i].end());
    rec.fov = std::move(fovs[i]);
  }
  return g;
}

std::string encode_graph(const GraphExample& graph, std::uint32_t radius) {
  const std::size_t d = 2 * radius + 1;
  std::string out;
  put(out, static_cast<std::uint32_t>(graph.agents.size()));
  put(out, graph.timestep);
  for (const auto& a : graph.agents) {
    if (a.neighbors.size() > 255) throw DatasetError("neighbor list longer than 255");
    if (a.fov.channels.size() != kFovChannels * d * d) throw DatasetError("FoV size does not match radius");
    put(out, static_cast<std::int32_t>(a.position.row));
    put(out, static_cast<std::int32_t>(a.position.col));
    put(out, static_cast<std::int32_t>(a.goal.row));
    put(out, static_cast<std::int32_t>(a.goal.col));
    put(out, static_cast<std::uint8_t>(index_of(a.label)));
    put(out, static_cast<std::uint8_t>(a.neighbors.size()));
    for (auto j : a.neighbors) put(out, j);
    for (float v : a.fov.channels) put_f32(out, v);
    for (float v : a.fov.greedy) put_f32(out, v);
  }
  return out;
}

DatasetWriter::DatasetWriter(const std::filesystem::path& path, std::uint32_t radius,
                             std::uint32_t max_neighbors)
    : out_(path, std::ios::binary | std::ios::trunc), path_(path), radius_(radius) {
  if (!out_) throw DatasetError("cannot open " + path.string() + " for writing");
  std::string header(kMagic, sizeof(kMagic));
  put(header, kVersion);
  put(header, radius);
  put(header, max_neighbors);
  put(header, std::uint64_t{0});
  out_.write(header.data(), static_cast<std::streamsize>(header.size()));
}

DatasetWriter::~DatasetWriter() {
  try {
    close();
  } catch (...) {
  }
}

void DatasetWriter::write(const GraphExample& graph) { write_encoded(encode_graph(graph, radius_), 1); }

void DatasetWriter::write_encoded(const std::string& bytes, std::uint64_t graphs) {
  out_.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out_) throw DatasetError("write failed for " + path_.string());
  count_ += graphs;
}

void DatasetWriter::close() {
  if (closed_) return;
  closed_ = true;
  std::string count;
  put(count, count_);
  out_.seekp(sizeof(kMagic) + 3 * sizeof(std::uint32_t));
  out_.write(count.data(), static_cast<std::streamsize>(count.size()));
  out_.close();
  if (!out_) throw DatasetError("failed to finalize " + path_.string());
}

Dataset read_dataset(const std::filesystem::path& path) {
  ByteReader in(read_text_file(path));
  char magic[8];
  in.bytes(magic, sizeof(magic), "magic");
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw DatasetError("bad dataset magic");
  const auto version = in.get<std::uint32_t>("version");
  if (version != kVersion) throw DatasetError("unsupported dataset version " + std::to_string(version));

  Dataset ds;
  ds.radius = in.get<std::uint32_t>("R");
  ds.max_neighbors = in.get<std::uint32_t>("M");
  const auto count = in.get<std::uint64_t>("graph count");
  const std::size_t d = 2 * ds.radius + 1;
  ds.graphs.reserve(count);
  for (std::uint64_t g = 0; g < count; ++g) {
    GraphExample graph;
    const auto n = in.get<std::uint32_t>("agent count");
    graph.timestep = in.get<std::uint32_t>("timestep");
    graph.agents.resize(n);
    for (auto& a : graph.agents) {
      a.position.row = in.get<std::int32_t>("row");
      a.position.col = in.get<std::int32_t>("col");
      a.goal.row = in.get<std::int32_t>("goal_row");
      a.goal.col = in.get<std::int32_t>("goal_col");
      const auto label = in.get<std::uint8_t>("label");
      if (label >= kNumActions) throw DatasetError("label out of range: " + std::to_string(label));
      a.label = action_from_index(label);
      const auto k = in.get<std::uint8_t>("neighbor count");
      a.neighbors.resize(k);
      for (auto& j : a.neighbors) {
        j = in.get<std::uint32_t>("neighbor index");
        if (j >= n) throw DatasetError("neighbor index out of range");
      }
      a.fov.radius = static_cast<int>(ds.radius);
      a.fov.channels.resize(kFovChannels * d * d);
      for (auto& v : a.fov.channels) v = in.get_f32("FoV channels");
      for (auto& v : a.fov.greedy) v = in.get_f32("greedy vector");
    }
    ds.graphs.push_back(std::move(graph));
  }
  if (!in.done()) throw DatasetError("trailing bytes after " + std::to_string(count) + " graphs");
  return ds;
}

DatasetStats export_dataset(std::span<const LabeledSolution> solutions,
                            const std::filesystem::path& path, int radius, int max_neighbors,
                            int workers) {
  for (std::size_t s = 0; s < solutions.size(); ++s) {
    const auto report = validate_solution(solutions[s].solution, solutions[s].scenario);
    if (!report.valid()) {
      throw InvalidSolution("solution " + std::to_string(s) + " is not a valid complete solution");
    }
  }

  DatasetWriter writer(path, static_cast<std::uint32_t>(radius),
                       static_cast<std::uint32_t>(max_neighbors));
  DatasetStats stats;
  // Encode a batch of solutions in parallel, then append in input order.
  const std::size_t batch = std::max<std::size_t>(1, static_cast<std::size_t>(workers) * 4);
  for (std::size_t lo = 0; lo < solutions.size(); lo += batch) {
    const std::size_t hi = std::min(solutions.size(), lo + batch);
    std::vector<std::string> blobs(hi - lo);
    std::vector<DatasetStats> partial(hi - lo);
    parallel_for(hi - lo, workers, [&](std::size_t k) {
      const auto& [scen, sol] = solutions[lo + k];
      const auto tables = tables_for(scen);
      for (int t = 0; t < sol.makespan(); ++t) {
        const auto g = make_example(scen, sol, t, tables, radius, max_neighbors);
        blobs[k] += encode_graph(g, static_cast<std::uint32_t>(radius));
        ++partial[k].graphs;
        partial[k].agent_records += g.agents.size();
        for (const auto& a : g.agents) ++partial[k].label_histogram[index_of(a.label)];
      }
    });
    for (std::size_t k = 0; k < blobs.size(); ++k) {
      writer.write_encoded(blobs[k], partial[k].graphs);
      stats.graphs += partial[k].graphs;
      stats.agent_records += partial[k].agent_records;
      for (int a = 0; a < kNumActions; ++a) stats.label_histogram[a] += partial[k].label_histogram[a];
    }
  }
  writer.close();
  return stats;
}

}  // namespace mapf
