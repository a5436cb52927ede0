#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mapf/simulator.hpp"
#include "mapf/supervisor.hpp"

namespace mapf {

// One evaluated method: "pibt", "oracle", or "policy:greedy|random|neural" with a shield.
struct MethodSpec {
  std::string method;
  std::optional<ShieldKind> shield;

  bool is_policy() const { return method.rfind("policy:", 0) == 0; }
  std::string shield_label() const { return shield ? std::string(shield_name(*shield)) : "-"; }
};

// Throws std::invalid_argument for unknown methods, a shield on a non-policy method,
// or a policy method without one.
MethodSpec make_method(const std::string& method, std::optional<ShieldKind> shield);

struct SuiteCell {
  std::filesystem::path map;
  std::filesystem::path scene;
  int agents = 0;
};

struct EvalOptions {
  RunLimits limits;
  PlanOptions plan;
  std::uint64_t seed = 0;
  int workers = 1;
  std::shared_ptr<const Weights> weights;  // required for policy:neural
  int max_neighbors = 5;
};

struct EvalRow {
  std::string map;
  std::string scene;
  int n_agents = 0;
  std::string method;
  std::string shield;
  std::uint64_t seed = 0;
  bool success = false;
  int steps = 0;
  long sum_of_costs = 0;
  double per_agent_cost = 0.0;
  double wall_ms = 0.0;
  double ms_per_step = 0.0;
  std::string error;  // non-empty when the cell could not run
};

// Per-instance seed: hash of (global seed, map, scene, n, method).
std::uint64_t instance_seed(std::uint64_t seed, const std::string& map, const std::string& scene,
                            int agents, const std::string& method);

// Runs one method on one loaded scenario. `scen.seed` is used as-is.
EvalRow run_method(const Scenario& scen, const MethodSpec& method, const EvalOptions& options,
                   const TableSet& tables);

// Every (cell, method) pair, parallel across pairs. Rows come back in
// (cell, method) order regardless of worker count.
std::vector<EvalRow> evaluate(const std::vector<SuiteCell>& cells,
                              const std::vector<MethodSpec>& methods, const EvalOptions& options);

struct SummaryRow {
  std::string map;
  int n_agents = 0;
  std::string method;
  std::string shield;
  int episodes = 0;
  int successes = 0;
  double success_rate = 0.0;
  double mean_per_agent_cost = 0.0;  // successes only; 0 when none
  double mean_wall_ms = 0.0;
};

std::vector<SummaryRow> summarize(const std::vector<EvalRow>& rows);

// Columns: map, scene, n_agents, method, shield, seed, success, steps, sum_of_costs,
// per_agent_cost, wall_ms, ms_per_step.
void write_csv(std::ostream& out, const std::vector<EvalRow>& rows);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

}  // namespace mapf
