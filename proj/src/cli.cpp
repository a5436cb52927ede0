#include "mapf/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "mapf/dataset.hpp"
#include "mapf/errors.hpp"
#include "mapf/evaluate.hpp"
#include "mapf/generate.hpp"
#include "mapf/parallel.hpp"

namespace mapf {

namespace {

namespace fs = std::filesystem;

struct LimitFlags {
  int step_multiplier = 3;
  int min_steps = 64;
  int max_steps = 0;
  double time_limit_s = 120.0;
  int restarts = 10;

  RunLimits run() const { return {step_multiplier, min_steps, max_steps, time_limit_s}; }
  PlanOptions plan() const { return {restarts, time_limit_s, 0}; }
};

void add_limit_flags(CLI::App* cmd, LimitFlags& f) {
  cmd->add_option("--step-multiplier", f.step_multiplier, "Step limit = multiplier * max start distance")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--min-steps", f.min_steps, "Floor of the step limit")->check(CLI::NonNegativeNumber);
  cmd->add_option("--max-steps", f.max_steps, "Fixed step limit (overrides the multiplier rule)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--time-limit", f.time_limit_s, "Wall-clock limit per instance in seconds")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--restarts", f.restarts, "Random-order restarts for the oracle planner")
      ->check(CLI::NonNegativeNumber);
}

// Map filename named in the second column of the first scen entry.
std::string scen_map_field(const fs::path& scen) {
  std::istringstream in(read_text_file(scen));
  std::string line;
  std::getline(in, line);  // version
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::istringstream row(line);
    std::string bucket, map;
    std::getline(row, bucket, '\t');
    std::getline(row, map, '\t');
    return map;
  }
  return {};
}

fs::path map_for_scene(const std::vector<fs::path>& maps, const fs::path& scen) {
  if (maps.size() == 1) return maps.front();
  const std::string want = fs::path(scen_map_field(scen)).filename().string();
  for (const auto& m : maps) {
    if (m.filename().string() == want) return m;
  }
  throw std::invalid_argument("--scen " + scen.string() + ": no --map matches '" + want + "'");
}

std::string scene_label(const fs::path& scen) { return scen.filename().string(); }

void print_report(std::ostream& out, const ValidationReport& report) {
  out << "vertex_collisions " << report.vertex_collisions.size() << " edge_collisions "
      << report.edge_collisions.size() << " all_at_goal " << (report.all_at_goal ? 1 : 0)
      << " sum_of_costs " << report.sum_of_costs << "\n";
  for (const auto& v : report.vertex_collisions) {
    out << "  vertex t=" << v.t << " agents " << v.agent_i << "," << v.agent_j << " at " << v.cell << "\n";
  }
  for (const auto& e : report.edge_collisions) {
    out << "  edge t=" << e.t << " agents " << e.agent_i << "," << e.agent_j << "\n";
  }
}

std::shared_ptr<const Weights> load_checked_weights(const std::string& path, int radius) {
  auto w = std::make_shared<const Weights>(load_weights(path));
  if (static_cast<int>(w->shape.radius) != radius) {
    throw std::invalid_argument("--radius " + std::to_string(radius) + " does not match weights radius " +
                                std::to_string(w->shape.radius));
  }
  return w;
}

std::optional<ShieldKind> shield_for(const std::string& method, const std::string& shield_flag) {
  const bool policy = method.rfind("policy:", 0) == 0;
  if (!policy) {
    if (!shield_flag.empty()) throw std::invalid_argument("--shield only applies to policy:* methods");
    return std::nullopt;
  }
  return parse_shield(shield_flag.empty() ? "pibt-sample" : shield_flag);
}

// ---- solve -------------------------------------------------------------------

struct SolveFlags {
  std::string method;
  std::string shield;
  std::string map, scen, weights, out;
  int agents = 0;
  std::uint64_t seed = 0;
  int radius = 4;
  int neighbors = 5;
  LimitFlags limits;
};

int cmd_solve(const SolveFlags& f, std::ostream& out) {
  const auto shield = shield_for(f.method, f.shield);
  const MethodSpec method = make_method(f.method, shield);
  EvalOptions options;
  options.limits = f.limits.run();
  options.plan = f.limits.plan();
  options.max_neighbors = f.neighbors;
  if (f.method == "policy:neural") {
    if (f.weights.empty()) throw std::invalid_argument("--weights is required for policy:neural");
    options.weights = load_checked_weights(f.weights, f.radius);
  }

  auto map = std::make_shared<const GridMap>(load_map_file(f.map));
  const auto seed = instance_seed(f.seed, map->name(), scene_label(f.scen), f.agents, f.method);
  const Scenario scen = load_scenario_file(f.scen, map, f.agents, seed);
  const TableSet tables = tables_for(scen);

  std::optional<Solution> solution;
  bool success = false;
  if (f.method == "pibt") {
    auto r = run_pibt(scen, options.limits, tables);
    success = r.success;
    solution = std::move(r.solution);
  } else if (f.method == "oracle") {
    auto r = prioritized_plan(scen, options.plan, seed, tables);
    success = r.solution.has_value();
    solution = std::move(r.solution);
  } else {
    std::unique_ptr<Policy> policy;
    if (f.method == "policy:greedy") policy = std::make_unique<GreedyPolicy>();
    else if (f.method == "policy:random") policy = std::make_unique<RandomPolicy>();
    else policy = std::make_unique<NeuralPolicy>(options.weights, f.neighbors);
    Rng rng(seed);
    auto r = run_episode(scen, *policy, *shield, options.limits, rng, tables);
    success = r.success;
    solution = std::move(r.solution);
  }

  out << "method " << f.method << " shield " << method.shield_label() << " seed " << seed
      << " success " << (success ? 1 : 0);
  if (solution) {
    out << " makespan " << solution->makespan() << "\n";
    print_report(out, validate_solution(*solution, scen));
    if (!f.out.empty()) save_solution_file(f.out, *solution);
  } else {
    out << "\nno solution\n";
  }
  return 0;
}

// ---- collect -----------------------------------------------------------------

struct CollectFlags {
  std::vector<std::string> maps, scens;
  std::vector<int> agents;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string out_dir;
  LimitFlags limits;
};

int cmd_collect(const CollectFlags& f, std::ostream& out, std::ostream& err) {
  std::vector<fs::path> maps(f.maps.begin(), f.maps.end());
  fs::create_directories(f.out_dir);
  struct Job {
    fs::path map, scen;
    int agents;
    std::uint64_t seed = 0;
    std::string file;
    std::string status;
  };
  std::vector<Job> jobs;
  for (const auto& s : f.scens) {
    const fs::path map = map_for_scene(maps, s);
    for (int n : f.agents) jobs.push_back({map, s, n, 0, {}, {}});
  }

  std::map<fs::path, std::shared_ptr<const GridMap>> loaded;
  for (const auto& j : jobs) {
    if (!loaded.count(j.map)) loaded[j.map] = std::make_shared<const GridMap>(load_map_file(j.map));
  }

  parallel_for(jobs.size(), f.workers, [&](std::size_t k) {
    Job& j = jobs[k];
    const auto& map = loaded.at(j.map);
    j.seed = instance_seed(f.seed, map->name(), scene_label(j.scen), j.agents, "oracle");
    try {
      const Scenario scen = load_scenario_file(j.scen, map, j.agents, j.seed);
      const auto r = prioritized_plan(scen, f.limits.plan(), j.seed);
      if (!r.solution) {
        j.status = "failed";
        return;
      }
      j.file = j.scen.stem().string() + "-n" + std::to_string(j.agents) + ".sol";
      save_solution_file(fs::path(f.out_dir) / j.file, *r.solution);
      j.status = "ok";
    } catch (const std::exception& e) {
      j.status = "error";
      j.file = e.what();
    }
  });

  std::ofstream manifest(fs::path(f.out_dir) / "manifest.tsv");
  manifest << "map\tscen\tagents\tseed\tsolution\tstatus\n";
  int ok = 0;
  for (const auto& j : jobs) {
    if (j.status == "error") {
      err << "collect: " << j.scen.string() << " n=" << j.agents << ": " << j.file << "\n";
      continue;
    }
    manifest << fs::absolute(j.map).string() << '\t' << fs::absolute(j.scen).string() << '\t'
             << j.agents << '\t' << j.seed << '\t' << (j.status == "ok" ? j.file : "-") << '\t'
             << j.status << '\n';
    ok += j.status == "ok";
  }
  out << "collected " << ok << "/" << jobs.size() << " solutions into " << f.out_dir << "\n";
  return 0;
}

// ---- export-dataset ----------------------------------------------------------

struct ExportFlags {
  std::string manifest, out;
  int radius = 4;
  int neighbors = 5;
  int workers = 1;
};

int cmd_export(const ExportFlags& f, std::ostream& out) {
  const fs::path dir = fs::path(f.manifest).parent_path();
  std::istringstream in(read_text_file(f.manifest));
  std::string line;
  std::getline(in, line);  // header
  std::vector<LabeledSolution> items;
  std::map<std::string, std::shared_ptr<const GridMap>> maps;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string map, scen, agents, seed, sol, status;
    if (!std::getline(row, map, '\t') || !std::getline(row, scen, '\t') ||
        !std::getline(row, agents, '\t') || !std::getline(row, seed, '\t') ||
        !std::getline(row, sol, '\t') || !std::getline(row, status, '\t')) {
      throw ParseError("manifest line " + std::to_string(line_no) + ": expected 6 tab-separated fields");
    }
    if (status != "ok") continue;
    auto& m = maps[map];
    if (!m) m = std::make_shared<const GridMap>(load_map_file(map));
    LabeledSolution item{load_scenario_file(scen, m, std::stoi(agents), std::stoull(seed)),
                         load_solution_file(dir / sol)};
    items.push_back(std::move(item));
  }
  const auto stats = export_dataset(items, f.out, f.radius, f.neighbors, f.workers);
  out << "solutions " << items.size() << " graphs " << stats.graphs << " agent_records "
      << stats.agent_records << " labels";
  for (Action a : kAllActions) out << " " << action_name(a) << "=" << stats.label_histogram[index_of(a)];
  out << "\n";
  return 0;
}

// ---- evaluate ----------------------------------------------------------------

struct EvaluateFlags {
  std::vector<std::string> maps, scens, methods, shields;
  std::vector<int> agents;
  std::string weights, out, summary;
  std::uint64_t seed = 0;
  int workers = 1;
  int radius = 4;
  int neighbors = 5;
  LimitFlags limits;
};

int cmd_evaluate(const EvaluateFlags& f, std::ostream& out, std::ostream& err) {
  std::vector<MethodSpec> methods;
  for (const auto& m : f.methods) {
    if (m.rfind("policy:", 0) != 0) {
      methods.push_back(make_method(m, std::nullopt));
      continue;
    }
    const std::vector<std::string> shields = f.shields.empty() ? std::vector<std::string>{"pibt-sample"} : f.shields;
    for (const auto& s : shields) methods.push_back(make_method(m, parse_shield(s)));
  }
  EvalOptions options;
  options.limits = f.limits.run();
  options.plan = f.limits.plan();
  options.seed = f.seed;
  options.workers = f.workers;
  options.max_neighbors = f.neighbors;
  for (const auto& m : methods) {
    if (m.method == "policy:neural" && !options.weights) {
      if (f.weights.empty()) throw std::invalid_argument("--weights is required for policy:neural");
      options.weights = load_checked_weights(f.weights, f.radius);
    }
  }

  std::vector<fs::path> maps(f.maps.begin(), f.maps.end());
  std::vector<SuiteCell> cells;
  for (const auto& s : f.scens) {
    const fs::path map = map_for_scene(maps, s);
    for (int n : f.agents) cells.push_back({map, s, n});
  }
  const auto rows = evaluate(cells, methods, options);
  for (const auto& r : rows) {
    if (!r.error.empty()) err << "evaluate: " << r.map << " " << r.scene << " n=" << r.n_agents << " "
                              << r.method << ": " << r.error << "\n";
  }
  {
    std::ofstream csv(f.out);
    if (!csv) throw std::runtime_error("cannot write --out " + f.out);
    write_csv(csv, rows);
  }
  const auto summary = summarize(rows);
  if (!f.summary.empty()) {
    std::ofstream s(f.summary);
    write_summary_csv(s, summary);
  }
  write_summary_csv(out, summary);
  return 0;
}

// ---- validate ----------------------------------------------------------------

struct ValidateFlags {
  std::string map, scen, solution;
  int agents = 0;
};

int cmd_validate(const ValidateFlags& f, std::ostream& out) {
  auto map = std::make_shared<const GridMap>(load_map_file(f.map));
  const Scenario scen = load_scenario_file(f.scen, map, f.agents);
  const Solution sol = load_solution_file(f.solution);
  const auto report = validate_solution(sol, scen);
  print_report(out, report);
  out << (report.valid() ? "valid\n" : "invalid\n");
  return report.valid() ? 0 : 1;
}

// ---- infer -------------------------------------------------------------------

struct InferFlags {
  std::string map, scen, weights, solution;
  int agents = 0;
  int timestep = 0;
  int neighbors = 5;
};

int cmd_infer(const InferFlags& f, std::ostream& out) {
  auto map = std::make_shared<const GridMap>(load_map_file(f.map));
  const Scenario scen = load_scenario_file(f.scen, map, f.agents);
  const Weights weights = load_weights(f.weights);
  SimState state = initial_state(scen);
  if (!f.solution.empty()) {
    const Solution sol = load_solution_file(f.solution);
    if (sol.num_agents() != scen.num_agents()) {
      throw std::invalid_argument("--solution has " + std::to_string(sol.num_agents()) + " agents, expected " +
                                  std::to_string(scen.num_agents()));
    }
    if (f.timestep < 0 || f.timestep > sol.makespan()) {
      throw std::invalid_argument("--timestep out of range [0, " + std::to_string(sol.makespan()) + "]");
    }
    state.positions = sol.positions_at(f.timestep);
    state.timestep = f.timestep;
  }
  const TableSet tables = tables_for(scen);
  const auto graph = build_graph_input(state, tables, static_cast<int>(weights.shape.radius), f.neighbors);
  const auto dists = neural_forward(weights, graph);
  out << std::fixed << std::setprecision(6);
  for (int i = 0; i < scen.num_agents(); ++i) {
    out << "agent " << i << " " << state.positions[i];
    for (Action a : kAllActions) out << " " << action_name(a) << "=" << dists[i][a];
    out << "\n";
  }
  return 0;
}

// ---- gen-suite ---------------------------------------------------------------

struct GenFlags {
  std::string out_dir, name, kind = "random";
  int height = 32, width = 32, room = 7, scenes = 25, agents = 200;
  double density = 0.1;
  std::uint64_t seed = 0;
};

int cmd_gen_suite(const GenFlags& f, std::ostream& out) {
  const std::uint64_t map_seed = hash_text(f.name, f.seed);
  GridMap map = f.kind == "rooms" ? rooms_map(f.name, f.height, f.width, f.room, f.density, map_seed)
                                  : random_map(f.name, f.height, f.width, f.density, map_seed);
  const auto paths = write_suite(f.out_dir, map, f.scenes, f.agents, f.seed);
  out << "wrote " << paths.map.string() << " and " << paths.scenes.size() << " scene files\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Grid MAPF engine: PIBT, collision shields, expert data, policy evaluation"};
  app.name(args.empty() ? "mapf" : args.front());
  app.require_subcommand(1);
  const int workers = default_workers();

  SolveFlags solve;
  auto* s = app.add_subcommand("solve", "Run one method on one instance");
  s->add_option("--method", solve.method, "pibt | oracle | policy:greedy | policy:random | policy:neural")->required();
  s->add_option("--shield", solve.shield, "naive | pibt-sort | pibt-sample (policy methods only)");
  s->add_option("--map", solve.map, "Moving-AI .map file")->required()->check(CLI::ExistingFile);
  s->add_option("--scen", solve.scen, "Moving-AI .scen file")->required()->check(CLI::ExistingFile);
  s->add_option("--agents", solve.agents, "Agent count")->required()->check(CLI::PositiveNumber);
  s->add_option("--seed", solve.seed, "Global seed");
  s->add_option("--weights", solve.weights, "Weights file for policy:neural")->check(CLI::ExistingFile);
  s->add_option("--radius", solve.radius, "FoV radius R")->check(CLI::PositiveNumber);
  s->add_option("--neighbors", solve.neighbors, "Max neighbors M")->check(CLI::NonNegativeNumber);
  s->add_option("--out", solve.out, "Write the solution file here");
  add_limit_flags(s, solve.limits);

  CollectFlags collect;
  collect.workers = workers;
  auto* c = app.add_subcommand("collect", "Run the oracle planner over a scenario grid");
  c->add_option("--map", collect.maps, "Map files")->required()->check(CLI::ExistingFile);
  c->add_option("--scen", collect.scens, "Scene files")->required()->check(CLI::ExistingFile);
  c->add_option("--agents", collect.agents, "Agent counts")->required()->check(CLI::PositiveNumber);
  c->add_option("--seed", collect.seed, "Global seed");
  c->add_option("--workers", collect.workers, "Worker threads (default $MAPF_WORKERS or cores)")
      ->check(CLI::PositiveNumber);
  c->add_option("--out-dir", collect.out_dir, "Output directory for solutions + manifest.tsv")->required();
  add_limit_flags(c, collect.limits);

  ExportFlags exp;
  exp.workers = workers;
  auto* e = app.add_subcommand("export-dataset", "Convert collected solutions to a MAPFDS1 dataset");
  e->add_option("--manifest", exp.manifest, "manifest.tsv written by collect")->required()->check(CLI::ExistingFile);
  e->add_option("--out", exp.out, "Dataset file")->required();
  e->add_option("--radius", exp.radius, "FoV radius R")->check(CLI::PositiveNumber);
  e->add_option("--neighbors", exp.neighbors, "Max neighbors M")->check(CLI::Range(0, 255));
  e->add_option("--workers", exp.workers, "Worker threads")->check(CLI::PositiveNumber);

  EvaluateFlags ev;
  ev.workers = workers;
  auto* v = app.add_subcommand("evaluate", "Evaluate methods over maps x scenes x agent counts");
  v->add_option("--map", ev.maps, "Map files")->required()->check(CLI::ExistingFile);
  v->add_option("--scen", ev.scens, "Scene files")->required();
  v->add_option("--agents", ev.agents, "Agent counts")->required()->check(CLI::PositiveNumber);
  v->add_option("--method", ev.methods, "Methods")->required();
  v->add_option("--shield", ev.shields, "Shields applied to each policy method");
  v->add_option("--weights", ev.weights, "Weights file for policy:neural")->check(CLI::ExistingFile);
  v->add_option("--radius", ev.radius, "FoV radius R")->check(CLI::PositiveNumber);
  v->add_option("--neighbors", ev.neighbors, "Max neighbors M")->check(CLI::NonNegativeNumber);
  v->add_option("--seed", ev.seed, "Global seed");
  v->add_option("--workers", ev.workers, "Worker threads")->check(CLI::PositiveNumber);
  v->add_option("--out", ev.out, "Per-episode CSV")->required();
  v->add_option("--summary", ev.summary, "Aggregated CSV");
  add_limit_flags(v, ev.limits);

  ValidateFlags val;
  auto* va = app.add_subcommand("validate", "Check a solution file for collisions and goal arrival");
  va->add_option("--map", val.map)->required()->check(CLI::ExistingFile);
  va->add_option("--scen", val.scen)->required()->check(CLI::ExistingFile);
  va->add_option("--agents", val.agents)->required()->check(CLI::PositiveNumber);
  va->add_option("--solution", val.solution)->required()->check(CLI::ExistingFile);

  InferFlags inf;
  auto* in = app.add_subcommand("infer", "Print neural action distributions for one state");
  in->add_option("--map", inf.map)->required()->check(CLI::ExistingFile);
  in->add_option("--scen", inf.scen)->required()->check(CLI::ExistingFile);
  in->add_option("--agents", inf.agents)->required()->check(CLI::PositiveNumber);
  in->add_option("--weights", inf.weights)->required()->check(CLI::ExistingFile);
  in->add_option("--solution", inf.solution, "Take positions from this solution")->check(CLI::ExistingFile);
  in->add_option("--timestep", inf.timestep, "Timestep within --solution")->check(CLI::NonNegativeNumber);
  in->add_option("--neighbors", inf.neighbors)->check(CLI::NonNegativeNumber);

  GenFlags gen;
  auto* g = app.add_subcommand("gen-suite", "Write a synthetic map and random scene files");
  g->add_option("--out-dir", gen.out_dir)->required();
  g->add_option("--name", gen.name, "Map name, e.g. random-32-32-10")->required();
  g->add_option("--kind", gen.kind)->check(CLI::IsMember({"random", "rooms"}));
  g->add_option("--height", gen.height)->check(CLI::PositiveNumber);
  g->add_option("--width", gen.width)->check(CLI::PositiveNumber);
  g->add_option("--density", gen.density, "Obstacle density (rooms: clutter)")->check(CLI::Range(0.0, 0.9));
  g->add_option("--room", gen.room, "Room size for --kind rooms")->check(CLI::PositiveNumber);
  g->add_option("--scenes", gen.scenes)->check(CLI::PositiveNumber);
  g->add_option("--agents", gen.agents, "Entries per scene file")->check(CLI::PositiveNumber);
  g->add_option("--seed", gen.seed);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (s->parsed()) return cmd_solve(solve, out);
    if (c->parsed()) return cmd_collect(collect, out, err);
    if (e->parsed()) return cmd_export(exp, out);
    if (v->parsed()) return cmd_evaluate(ev, out, err);
    if (va->parsed()) return cmd_validate(val, out);
    if (in->parsed()) return cmd_infer(inf, out);
    if (g->parsed()) return cmd_gen_suite(gen, out);
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace mapf
