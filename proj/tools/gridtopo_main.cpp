// gridtopo: command-line front end for topology design and verification.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gridtopo/cost.hpp"
#include "gridtopo/error.hpp"
#include "gridtopo/experiments.hpp"
#include "gridtopo/graph.hpp"
#include "gridtopo/io.hpp"
#include "gridtopo/lyapunov.hpp"
#include "gridtopo/mesh_design.hpp"
#include "gridtopo/tree_design.hpp"

namespace gt = gridtopo;
using ordered_json = nlohmann::ordered_json;

namespace {

int exit_code(gt::ErrorKind kind) {
  switch (kind) {
    case gt::ErrorKind::invalid_argument: return 3;
    case gt::ErrorKind::parse: return 4;
    case gt::ErrorKind::validation: return 5;
    case gt::ErrorKind::disconnected: return 6;
    case gt::ErrorKind::infeasible: return 7;
    case gt::ErrorKind::numerical: return 8;
  }
  return 1;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw gt::Error(gt::ErrorKind::invalid_argument, "cannot write " + out_path);
  out << text;
}

void emit(const ordered_json& doc, const std::string& out_path) {
  emit(doc.dump(2) + "\n", out_path);
}

gt::CostSpec resolve_cost(const gt::NetworkFile& file, const std::string& override_kind) {
  const gt::CostSpec from_file = gt::cost_or_default(file);
  if (override_kind.empty()) return from_file;
  const gt::CostKind kind = gt::parse_cost_kind(override_kind);
  if (file.cost && file.cost->kind == kind) return *file.cost;
  if (kind == gt::CostKind::ranked_consensus || kind == gt::CostKind::custom)
    throw gt::Error(gt::ErrorKind::invalid_argument,
                    "cost kind '" + override_kind +
                        "' needs its parameters in the network file's cost block");
  gt::CostSpec spec;
  spec.kind = kind;
  return spec;
}

ordered_json edges_json(const gt::Topology& t) {
  return ordered_json(std::vector<int>(t.edges().begin(), t.edges().end()));
}

ordered_json report_json(const gt::GramianReport& r) {
  ordered_json j;
  j["passed"] = r.passed;
  j["phase_trace_lhs"] = r.phase_trace_lhs;
  j["phase_trace_rhs"] = r.phase_trace_rhs;
  j["phase_trace_residual"] = r.phase_trace_residual;
  j["h2_gramian"] = r.h2_lhs;
  j["h2_closed_form"] = r.h2_rhs;
  j["h2_residual"] = r.h2_residual;
  j["lyapunov_residual"] = r.lyapunov_residual;
  j["rigid_mode_residual"] = r.rigid_mode_residual;
  j["min_eigenvalue"] = r.min_eigenvalue;
  return j;
}

ordered_json mesh_json(const gt::MeshDesignResult& r, std::string_view method) {
  ordered_json j;
  j["method"] = method;
  j["k"] = r.edges.size();
  j["edges"] = edges_json(r.edges);
  if (r.seed.size() > 0) j["seed_tree"] = edges_json(r.seed);
  j["cost"] = r.cost;
  j["h2_squared"] = r.h2_squared;
  if (!r.trace.empty()) {
    ordered_json trace = ordered_json::array();
    for (const auto& step : r.trace) trace.push_back({{"edge", step.edge}, {"cost", step.cost}});
    j["trace"] = trace;
  }
  return j;
}

struct Common {
  std::string network;
  std::string cost;
  std::string out;
  std::uint64_t cap = gt::kDefaultEnumerationCap;
};

void add_common(CLI::App* cmd, Common& c, bool with_cap = false) {
  cmd->add_option("--network", c.network, "Network JSON file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--cost", c.cost,
                  "Override the file's cost kind (frequency, loss, consensus, ranked_consensus)");
  cmd->add_option("--out", c.out, "Write output here instead of stdout");
  if (with_cap) cmd->add_option("--cap", c.cap, "Maximum subsets a brute-force search may visit");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Power-grid topology design minimizing the squared H2 norm of swing dynamics"};
  app.require_subcommand(1);

  // eval
  Common eval_opts;
  std::string edge_list, edges_file;
  bool verify = false, simulate = false;
  gt::SimulationOptions sim;
  auto* eval = app.add_subcommand("eval", "Evaluate cost and H2 norm of an edge selection");
  add_common(eval, eval_opts);
  auto* edges_opt = eval->add_option("--edges", edge_list, "Comma-separated edge indices");
  auto* edges_file_opt =
      eval->add_option("--edges-file", edges_file, "JSON edge list or design output")
          ->check(CLI::ExistingFile);
  edges_opt->excludes(edges_file_opt);
  eval->add_flag("--verify", verify, "Cross-check against the observability Gramian");
  eval->add_flag("--simulate", simulate, "Estimate E[y'y] by stochastic simulation");
  eval->add_option("--horizon", sim.horizon, "Simulated time");
  eval->add_option("--dt", sim.dt, "Integration step");
  eval->add_option("--seed", sim.seed, "Noise seed");

  // design tree / design mesh
  Common design_opts;
  int design_k = 0;
  auto* design = app.add_subcommand("design", "Run the construction algorithms");
  design->require_subcommand(1);
  auto* design_tree = design->add_subcommand("tree", "Best rooted shortest-path tree");
  add_common(design_tree, design_opts);
  auto* design_mesh = design->add_subcommand("mesh", "Rooted tree plus greedy augmentation");
  add_common(design_mesh, design_opts);
  design_mesh->add_option("-k", design_k, "Number of edges")->required();

  // brute tree / brute mesh
  Common brute_opts;
  int brute_k = 0;
  std::string seed_tree;
  auto* brute = app.add_subcommand("brute", "Exhaustive search oracles");
  brute->require_subcommand(1);
  auto* brute_tree = brute->add_subcommand("tree", "Optimal spanning tree by enumeration");
  add_common(brute_tree, brute_opts, true);
  auto* brute_mesh = brute->add_subcommand("mesh", "Optimal k-edge network by enumeration");
  add_common(brute_mesh, brute_opts, true);
  brute_mesh->add_option("-k", brute_k, "Number of edges")->required();
  brute_mesh->add_option("--seed-tree", seed_tree,
                         "'alg1' or an edges file: optimal augmentation of that tree");

  // bound
  Common bound_opts;
  auto* bound = app.add_subcommand("bound", "Approximation-gap certificate for the tree design");
  add_common(bound, bound_opts, true);

  // gap-table / sweep
  Common table_opts;
  int k_min = 0, k_max = 0;
  auto* gap_table = app.add_subcommand("gap-table", "Relative gaps of the design pipelines");
  add_common(gap_table, table_opts, true);
  gap_table->add_option("--k-min", k_min)->required();
  gap_table->add_option("--k-max", k_max)->required();

  std::string cost_names = "consensus";
  auto* sweep = app.add_subcommand("sweep", "Relative cost versus edge count");
  add_common(sweep, table_opts, true);
  sweep->add_option("--k-min", k_min)->required();
  sweep->add_option("--k-max", k_max)->required();
  sweep->add_option("--costs", cost_names, "Comma-separated cost kinds");

  // gen
  std::string gen_base, gen_out;
  int gen_extra = 0;
  std::uint64_t gen_seed = 0;
  auto* gen = app.add_subcommand("gen", "Add random candidate edges to a base case");
  gen->add_option("--base", gen_base, "Base network file")->required()->check(CLI::ExistingFile);
  gen->add_option("--extra", gen_extra, "Number of random edges")->required();
  gen->add_option("--seed", gen_seed, "Generator seed")->required();
  gen->add_option("--out", gen_out, "Output file (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;  // usage errors
  }

  try {
    if (eval->parsed()) {
      const auto file = gt::load_network_file(eval_opts.network);
      const auto cost = gt::build_cost(resolve_cost(file, eval_opts.cost), file.network);
      gt::Topology topology;
      if (!edge_list.empty())
        topology = gt::parse_edge_list(edge_list);
      else if (!edges_file.empty())
        topology = gt::load_edges_file(edges_file);
      else
        throw gt::Error(gt::ErrorKind::invalid_argument, "give --edges or --edges-file");
      const auto result = gt::evaluate(file.network, cost, topology);
      ordered_json doc;
      doc["edges"] = edges_json(topology);
      doc["cost"] = result.cost;
      doc["h2_squared"] = result.h2_squared;
      if (verify || simulate) {
        const auto ss = gt::assemble_state_space(file.network, topology, cost);
        if (verify) {
          const auto g = gt::solve_observability_lyapunov(ss);
          const auto report = gt::verify_gramian_identities(ss, g);
          doc["verify"] = report_json(report);
          doc["verify"]["h2_via_gramian"] = gt::h2_squared_via_gramian(ss, g);
        }
        if (simulate) {
          const auto est = gt::simulate_ambient(ss, sim);
          doc["simulation"] = {{"mean", est.mean},
                               {"standard_error", est.standard_error},
                               {"steps", est.steps},
                               {"seed", sim.seed}};
        }
      }
      emit(doc, eval_opts.out);
      if (verify && !doc["verify"]["passed"].get<bool>()) return exit_code(gt::ErrorKind::numerical);
    } else if (design_tree->parsed() || design_mesh->parsed()) {
      const auto file = gt::load_network_file(design_opts.network);
      const auto cost = gt::build_cost(resolve_cost(file, design_opts.cost), file.network);
      if (design_tree->parsed()) {
        const auto r = gt::design_tree(file.network, cost);
        ordered_json doc;
        doc["method"] = "alg1";
        doc["root"] = r.root;
        doc["edges"] = edges_json(r.tree);
        doc["cost"] = r.cost;
        doc["h2_squared"] = gt::evaluate(file.network, cost, r.tree).h2_squared;
        if (r.gap_bound) doc["gap_bound"] = *r.gap_bound;
        emit(doc, design_opts.out);
      } else {
        emit(mesh_json(gt::design_mesh(file.network, cost, design_k), "alg1+greedy"),
             design_opts.out);
      }
    } else if (brute_tree->parsed() || brute_mesh->parsed()) {
      const auto file = gt::load_network_file(brute_opts.network);
      const auto cost = gt::build_cost(resolve_cost(file, brute_opts.cost), file.network);
      if (brute_tree->parsed()) {
        const auto r = gt::brute_force_tree(file.network, cost, brute_opts.cap);
        ordered_json doc;
        doc["method"] = "brute_tree";
        doc["edges"] = edges_json(r.tree);
        doc["cost"] = r.cost;
        doc["h2_squared"] = gt::evaluate(file.network, cost, r.tree).h2_squared;
        emit(doc, brute_opts.out);
      } else {
        std::optional<gt::Topology> seed;
        if (seed_tree == "alg1")
          seed = gt::design_tree(file.network, cost).tree;
        else if (!seed_tree.empty())
          seed = gt::load_edges_file(seed_tree);
        const auto r = gt::brute_force_mesh(file.network, cost, brute_k, seed, brute_opts.cap);
        emit(mesh_json(r, seed ? "bruteAug" : "bruteGlobal"), brute_opts.out);
      }
    } else if (bound->parsed()) {
      const auto file = gt::load_network_file(bound_opts.network);
      const auto cost = gt::build_cost(resolve_cost(file, bound_opts.cost), file.network);
      const auto design = gt::design_tree(file.network, cost);
      ordered_json doc;
      doc["gap_bound"] = gt::gap_bound(file.network, cost);
      doc["design_cost"] = design.cost;
      try {
        const auto cert = gt::certify_ratio(file.network, cost, design, bound_opts.cap);
        doc["median"] = cert.median;
        doc["optimal_cost"] = cert.optimal_cost;
        doc["ratio"] = cert.ratio;
        doc["upper_bound"] = cert.upper_bound;
        doc["lower_bound"] = cert.lower_bound;
        doc["within_gap_bound"] = cert.within_gap_bound;
        doc["below_upper_bound"] = cert.below_upper_bound;
        doc["above_lower_bound"] = cert.above_lower_bound;
      } catch (const gt::Error& e) {
        if (e.kind() != gt::ErrorKind::infeasible) throw;
        doc["optimal_cost"] = nullptr;
        doc["note"] = e.what();
      }
      emit(doc, bound_opts.out);
    } else if (gap_table->parsed() || sweep->parsed()) {
      const auto file = gt::load_network_file(table_opts.network);
      gt::ExperimentOptions opts;
      opts.cap = table_opts.cap;
      if (file.generator) opts.seed = file.generator->seed;
      std::vector<int> ks;
      for (int k = k_min; k <= k_max; ++k) ks.push_back(k);
      gt::ExperimentReport report;
      if (gap_table->parsed()) {
        const auto spec = resolve_cost(file, table_opts.cost);
        gt::NamedCost named{std::string(gt::to_string(spec.kind)),
                            gt::build_cost(spec, file.network)};
        report = gt::run_gap_table(file.network, named, ks, opts);
      } else {
        std::vector<gt::NamedCost> costs;
        std::stringstream names(cost_names);
        for (std::string name; std::getline(names, name, ',');) {
          const auto spec = resolve_cost(file, name);
          costs.push_back({std::string(gt::to_string(spec.kind)),
                           gt::build_cost(spec, file.network)});
        }
        report = gt::run_cardinality_sweep(file.network, costs, k_min, k_max, opts);
      }
      for (const auto& note : report.notes) std::cerr << "note: " << note << "\n";
      emit(report.to_csv(), table_opts.out);
    } else if (gen->parsed()) {
      const auto base = gt::load_network_file(gen_base);
      emit(gt::dump_network_file(gt::generate_case(base, gen_extra, gen_seed)), gen_out);
    }
  } catch (const gt::Error& e) {
    std::cerr << "error[" << gt::to_string(e.kind()) << "]: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
