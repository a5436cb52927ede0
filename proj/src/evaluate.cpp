#include "mapf/evaluate.hpp"

#include <cstdio>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include "mapf/parallel.hpp"

namespace mapf {

MethodSpec make_method(const std::string& method, std::optional<ShieldKind> shield) {
  MethodSpec spec{method, shield};
  if (method == "pibt" || method == "oracle") {
    if (shield) throw std::invalid_argument("--shield does not apply to method " + method);
    return spec;
  }
  if (method == "policy:greedy" || method == "policy:random" || method == "policy:neural") {
    if (!shield) throw std::invalid_argument("method " + method + " requires a shield");
    return spec;
  }
  throw std::invalid_argument("unknown method '" + method +
                              "' (expected pibt, oracle, policy:greedy, policy:random, policy:neural)");
}

std::uint64_t instance_seed(std::uint64_t seed, const std::string& map, const std::string& scene,
                            int agents, const std::string& method) {
  return hash_text(std::to_string(seed) + "|" + map + "|" + scene + "|" + std::to_string(agents) +
                   "|" + method);
}

namespace {

std::unique_ptr<Policy> make_policy(const MethodSpec& m, const EvalOptions& options) {
  if (m.method == "policy:greedy") return std::make_unique<GreedyPolicy>();
  if (m.method == "policy:random") return std::make_unique<RandomPolicy>();
  if (!options.weights) throw std::invalid_argument("policy:neural requires weights");
  return std::make_unique<NeuralPolicy>(options.weights, options.max_neighbors);
}

}  // namespace

EvalRow run_method(const Scenario& scen, const MethodSpec& method, const EvalOptions& options,
                   const TableSet& tables) {
  EvalRow row;
  row.method = method.method;
  row.shield = method.shield_label();
  row.n_agents = scen.num_agents();
  row.seed = scen.seed;
  const double n = scen.num_agents();

  if (method.method == "pibt") {
    const auto r = run_pibt(scen, options.limits, tables);
    row.success = r.success;
    row.steps = r.steps;
    row.sum_of_costs = sum_of_costs(r.solution, scen);
    row.wall_ms = r.wall_ms;
  } else if (method.method == "oracle") {
    const auto r = prioritized_plan(scen, options.plan, scen.seed, tables);
    row.success = r.solution.has_value();
    if (r.solution) {
      row.steps = r.solution->makespan();
      row.sum_of_costs = sum_of_costs(*r.solution, scen);
    }
    row.wall_ms = r.wall_ms;
  } else {
    auto policy = make_policy(method, options);
    Rng rng(scen.seed);
    const auto r = run_episode(scen, *policy, *method.shield, options.limits, rng, tables);
    row.success = r.success;
    row.steps = r.steps;
    row.sum_of_costs = r.sum_of_costs;
    row.wall_ms = r.wall_ms;
  }
  row.per_agent_cost = n > 0 ? static_cast<double>(row.sum_of_costs) / n : 0.0;
  row.ms_per_step = row.steps > 0 ? row.wall_ms / row.steps : 0.0;
  return row;
}

std::vector<EvalRow> evaluate(const std::vector<SuiteCell>& cells,
                              const std::vector<MethodSpec>& methods, const EvalOptions& options) {
  // Maps and heuristic caches are shared by every cell on the same map.
  struct MapEntry {
    std::shared_ptr<const GridMap> map;
    std::unique_ptr<HeuristicCache> cache;
    std::string error;
  };
  std::map<std::filesystem::path, MapEntry> maps;
  for (const auto& cell : cells) {
    auto [it, inserted] = maps.try_emplace(cell.map);
    if (!inserted) continue;
    try {
      it->second.map = std::make_shared<const GridMap>(load_map_file(cell.map));
      it->second.cache = std::make_unique<HeuristicCache>(it->second.map);
    } catch (const std::exception& e) {
      it->second.error = e.what();
    }
  }

  std::vector<EvalRow> rows(cells.size() * methods.size());
  parallel_for(rows.size(), options.workers, [&](std::size_t k) {
    const auto& cell = cells[k / methods.size()];
    const auto& method = methods[k % methods.size()];
    const std::string map_name = cell.map.stem().string();
    const std::string scene_name = cell.scene.filename().string();
    const auto seed = instance_seed(options.seed, map_name, scene_name, cell.agents, method.method);
    EvalRow row;
    try {
      const auto& entry = maps.at(cell.map);
      if (!entry.error.empty()) throw std::runtime_error(entry.error);
      const Scenario scen = load_scenario_file(cell.scene, entry.map, cell.agents, seed);
      row = run_method(scen, method, options, tables_for(scen, *entry.cache));
    } catch (const std::exception& e) {
      row = EvalRow{};
      row.method = method.method;
      row.shield = method.shield_label();
      row.error = e.what();
    }
    row.map = map_name;
    row.scene = scene_name;
    row.n_agents = cell.agents;
    row.seed = seed;
    rows[k] = std::move(row);
  });
  return rows;
}

std::vector<SummaryRow> summarize(const std::vector<EvalRow>& rows) {
  using Key = std::tuple<std::string, int, std::string, std::string>;
  std::map<Key, SummaryRow> groups;
  std::map<Key, double> cost_sum;
  for (const auto& r : rows) {
    const Key key{r.map, r.n_agents, r.method, r.shield};
    auto& s = groups[key];
    s.map = r.map;
    s.n_agents = r.n_agents;
    s.method = r.method;
    s.shield = r.shield;
    ++s.episodes;
    s.mean_wall_ms += r.wall_ms;
    if (r.success) {
      ++s.successes;
      cost_sum[key] += r.per_agent_cost;
    }
  }
  std::vector<SummaryRow> out;
  for (auto& [key, s] : groups) {
    s.success_rate = static_cast<double>(s.successes) / s.episodes;
    s.mean_wall_ms /= s.episodes;
    s.mean_per_agent_cost = s.successes ? cost_sum[key] / s.successes : 0.0;
    out.push_back(s);
  }
  return out;
}

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<EvalRow>& rows) {
  out << "map,scene,n_agents,method,shield,seed,success,steps,sum_of_costs,per_agent_cost,wall_ms,"
         "ms_per_step\n";
  for (const auto& r : rows) {
    out << r.map << ',' << r.scene << ',' << r.n_agents << ',' << r.method << ',' << r.shield << ','
        << r.seed << ',' << (r.success ? 1 : 0) << ',' << r.steps << ',' << r.sum_of_costs << ','
        << fixed(r.per_agent_cost, 4) << ',' << fixed(r.wall_ms, 3) << ',' << fixed(r.ms_per_step, 4)
        << '\n';
  }
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "map,n_agents,method,shield,episodes,successes,success_rate,mean_per_agent_cost,"
         "mean_wall_ms\n";
  for (const auto& s : rows) {
    out << s.map << ',' << s.n_agents << ',' << s.method << ',' << s.shield << ',' << s.episodes
        << ',' << s.successes << ',' << fixed(s.success_rate, 4) << ','
        << fixed(s.mean_per_agent_cost, 4) << ',' << fixed(s.mean_wall_ms, 3) << '\n';
  }
}

}  // namespace mapf
