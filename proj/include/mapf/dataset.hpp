#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "mapf/features.hpp"
#include "mapf/solution.hpp"

namespace mapf {

struct AgentRecord {
  Cell position;
  Cell goal;
  Action label = Action::Wait;
  std::vector<std::uint32_t> neighbors;  // in-edges
  FovTensor fov;

  friend bool operator==(const AgentRecord&, const AgentRecord&) = default;
};

// One solution timestep as a labeled graph. `map_name` is not serialized.
struct GraphExample {
  std::string map_name;
  std::uint32_t timestep = 0;
  std::vector<AgentRecord> agents;
};

// Graph for timestep t of `sol`; labels are the actions from t to t + 1.
GraphExample make_example(const Scenario& scen, const Solution& sol, int t, const TableSet& tables,
                          int radius, int max_neighbors);

/// Little-endian `MAPFDS1\0` writer. The graph count in the header is patched on close().
class DatasetWriter {
 public:
  DatasetWriter(const std::filesystem::path& path, std::uint32_t radius, std::uint32_t max_neighbors);
  ~DatasetWriter();
  DatasetWriter(const DatasetWriter&) = delete;
  DatasetWriter& operator=(const DatasetWriter&) = delete;

  void write(const GraphExample& graph);
  // Appends bytes produced by encode_graph.
  void write_encoded(const std::string& bytes, std::uint64_t graphs);
  void close();
  std::uint64_t graphs_written() const { return count_; }

 private:
  std::ofstream out_;
  std::filesystem::path path_;
  std::uint32_t radius_;
  std::uint64_t count_ = 0;
  bool closed_ = false;
};

std::string encode_graph(const GraphExample& graph, std::uint32_t radius);

struct Dataset {
  std::uint32_t radius = 0;
  std::uint32_t max_neighbors = 0;
  std::vector<GraphExample> graphs;
};

// Throws DatasetError on bad magic, version, or truncation.
Dataset read_dataset(const std::filesystem::path& path);

struct LabeledSolution {
  Scenario scenario;
  Solution solution;
};

struct DatasetStats {
  std::uint64_t graphs = 0;
  std::uint64_t agent_records = 0;
  std::array<std::uint64_t, kNumActions> label_histogram{};
};

// One graph per timestep in [0, makespan) of every solution. Invalid solutions
// (collisions or agents off-goal at the end) throw InvalidSolution before anything is written.
DatasetStats export_dataset(std::span<const LabeledSolution> solutions,
                            const std::filesystem::path& path, int radius, int max_neighbors,
                            int workers = 1);

}  // namespace mapf
