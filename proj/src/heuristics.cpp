#include "mapf/heuristics.hpp"

#include <limits>
#include <stdexcept>

#include "mapf/scenario.hpp"

namespace mapf {

HeuristicTable backward_dijkstra(const GridMap& map, Cell goal) {
  if (!map.is_free(goal)) throw std::invalid_argument("heuristic goal is blocked or out of bounds");
  std::vector<int> dist(map.size(), kUnreachable);
  std::vector<int> queue;
  queue.reserve(map.size());
  dist[map.index(goal)] = 0;
  queue.push_back(map.index(goal));
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int u = queue[head];
    const Cell cu = map.cell(u);
    for (Action a : kAllActions) {
      if (a == Action::Wait) continue;
      const Cell cv = apply(cu, a);
      if (!map.is_free(cv)) continue;
      const int v = map.index(cv);
      if (dist[v] != kUnreachable) continue;
      dist[v] = dist[u] + 1;
      queue.push_back(v);
    }
  }
  return HeuristicTable(goal, map.width(), std::move(dist));
}

GreedyVector greedy_action_vector(const HeuristicTable& table, Cell pos, const GridMap& map) {
  if (!map.in_bounds(pos) || !table.reachable(pos)) {
    throw std::invalid_argument("greedy_action_vector: position is unreachable");
  }
  std::array<int, kNumActions> h{};
  int best = std::numeric_limits<int>::max();
  for (Action a : kAllActions) {
    const Cell next = apply(pos, a);
    h[index_of(a)] = map.is_free(next) ? table.at(next) : kUnreachable;
    if (h[index_of(a)] != kUnreachable) best = std::min(best, h[index_of(a)]);
  }
  GreedyVector out{};
  for (int i = 0; i < kNumActions; ++i) out[i] = (h[i] != kUnreachable && h[i] == best) ? 1 : 0;
  return out;
}

std::shared_ptr<const HeuristicTable> HeuristicCache::get(Cell goal) {
  const int key = map_->index(goal);
  std::promise<std::shared_ptr<const HeuristicTable>> promise;
  std::shared_future<std::shared_ptr<const HeuristicTable>> future;
  bool builder = false;
  {
    std::lock_guard lock(mu_);
    auto [it, inserted] = tables_.try_emplace(key);
    if (inserted) {
      it->second = promise.get_future().share();
      builder = true;
    }
    future = it->second;
  }
  if (builder) {
    try {
      promise.set_value(std::make_shared<const HeuristicTable>(backward_dijkstra(*map_, goal)));
    } catch (...) {
      promise.set_exception(std::current_exception());
    }
  }
  return future.get();
}

std::size_t HeuristicCache::size() const {
  std::lock_guard lock(mu_);
  return tables_.size();
}

TableSet tables_for(const Scenario& scen, HeuristicCache& cache) {
  TableSet out;
  out.reserve(scen.agents.size());
  for (const auto& a : scen.agents) out.push_back(cache.get(a.goal));
  return out;
}

TableSet tables_for(const Scenario& scen) {
  HeuristicCache cache(scen.map);
  return tables_for(scen, cache);
}

}  // namespace mapf
