#include "mapf/scenario.hpp"

#include <set>
#include <sstream>

#include "mapf/errors.hpp"
#include "mapf/heuristics.hpp"

namespace mapf {

std::vector<Cell> Scenario::starts() const {
  std::vector<Cell> out;
  out.reserve(agents.size());
  for (const auto& a : agents) out.push_back(a.start);
  return out;
}

std::vector<Cell> Scenario::goals() const {
  std::vector<Cell> out;
  out.reserve(agents.size());
  for (const auto& a : agents) out.push_back(a.goal);
  return out;
}

void check_scenario(const Scenario& scen) {
  if (!scen.map) throw LoadError("scenario has no map");
  if (scen.agents.empty()) throw LoadError("agent count must be positive");
  const GridMap& map = *scen.map;
  const auto labels = component_labels(map);
  std::set<Cell> starts;
  std::set<Cell> goals;
  for (std::size_t i = 0; i < scen.agents.size(); ++i) {
    const auto& [start, goal] = scen.agents[i];
    const std::string who = "agent " + std::to_string(i);
    if (!map.in_bounds(start)) throw LoadError(who + " start out of bounds");
    if (!map.in_bounds(goal)) throw LoadError(who + " goal out of bounds");
    if (map.is_blocked(start)) throw LoadError(who + " start blocked");
    if (map.is_blocked(goal)) throw LoadError(who + " goal blocked");
    if (!starts.insert(start).second) throw LoadError(who + " duplicate start");
    if (!goals.insert(goal).second) throw LoadError(who + " duplicate goal");
    if (labels[map.index(start)] != labels[map.index(goal)]) {
      throw LoadError(who + " goal unreachable from start");
    }
  }
}

Scenario parse_scenario(std::string_view text, std::shared_ptr<const GridMap> map, int n,
                        std::uint64_t seed) {
  if (n <= 0) throw LoadError("agent count must be positive");
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool saw_version = false;
  Scenario scen;
  scen.map = std::move(map);
  scen.seed = seed;
  while (static_cast<int>(scen.agents.size()) < n && std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!saw_version) {
      if (line.rfind("version", 0) != 0) {
        throw ParseError("scen line " + std::to_string(line_no) + ": expected 'version' header");
      }
      saw_version = true;
      continue;
    }
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
      const std::size_t tab = line.find('\t', pos);
      fields.push_back(line.substr(pos, tab - pos));
      if (tab == std::string::npos) break;
      pos = tab + 1;
    }
    if (fields.size() < 8) {
      throw ParseError("scen line " + std::to_string(line_no) + ": expected >= 8 tab-separated fields");
    }
    int coords[4];
    for (int k = 0; k < 4; ++k) {
      try {
        std::size_t used = 0;
        coords[k] = std::stoi(fields[4 + k], &used);
        if (used != fields[4 + k].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ParseError("scen line " + std::to_string(line_no) + ": bad coordinate '" +
                         fields[4 + k] + "'");
      }
    }
    scen.agents.push_back({Cell{coords[1], coords[0]}, Cell{coords[3], coords[2]}});
  }
  if (!saw_version) throw ParseError("scen line 1: expected 'version' header");
  if (static_cast<int>(scen.agents.size()) < n) {
    throw LoadError("requested " + std::to_string(n) + " agents but scenario has " +
                    std::to_string(scen.agents.size()));
  }
  check_scenario(scen);
  return scen;
}

Scenario load_scenario_file(const std::filesystem::path& path, std::shared_ptr<const GridMap> map,
                            int n, std::uint64_t seed) {
  return parse_scenario(read_text_file(path), std::move(map), n, seed);
}

std::string to_scen_text(const GridMap& map, std::string_view map_file,
                         const std::vector<AgentTask>& tasks) {
  std::ostringstream out;
  out << "version 1\n";
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& t = tasks[i];
    const auto table = backward_dijkstra(map, t.goal);
    out << i / 10 << '\t' << map_file << '\t' << map.width() << '\t' << map.height() << '\t'
        << t.start.col << '\t' << t.start.row << '\t' << t.goal.col << '\t' << t.goal.row << '\t'
        << table.at(t.start) << '\n';
  }
  return out.str();
}

}  // namespace mapf
