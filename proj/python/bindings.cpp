#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <string>

#include "gridtopo/cost.hpp"
#include "gridtopo/error.hpp"
#include "gridtopo/experiments.hpp"
#include "gridtopo/io.hpp"
#include "gridtopo/lyapunov.hpp"
#include "gridtopo/mesh_design.hpp"
#include "gridtopo/network.hpp"
#include "gridtopo/tree_design.hpp"

namespace py = pybind11;
namespace gt = gridtopo;

namespace {

gt::CostMatrices matrices(const gt::Network& net, const std::optional<gt::CostSpec>& spec) {
  return gt::build_cost(spec.value_or(gt::CostSpec{}), net);
}

std::vector<int> as_vector(const gt::Topology& t) { return {t.edges().begin(), t.edges().end()}; }

py::dict mesh_dict(const gt::MeshDesignResult& r) {
  py::dict d;
  d["edges"] = as_vector(r.edges);
  d["seed"] = as_vector(r.seed);
  py::list trace;
  for (const auto& s : r.trace) trace.append(py::make_tuple(s.edge, s.cost));
  d["trace"] = trace;
  d["cost"] = r.cost;
  d["h2_squared"] = r.h2_squared;
  return d;
}

py::dict tree_dict(const gt::TreeDesignResult& r) {
  py::dict d;
  d["edges"] = as_vector(r.tree);
  d["root"] = r.root;
  d["cost"] = r.cost;
  d["gap_bound"] = r.gap_bound;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Topology design for networks of swing-equation oscillators";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result([&]() {
    return py::exception<gt::Error>(m, "GridTopoError", PyExc_RuntimeError);
  });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const gt::Error& e) {
      const std::string msg = "[" + std::string(gt::to_string(e.kind())) + "] " + e.what();
      py::set_error(error_type.get_stored(), msg.c_str());
    }
  });

  py::class_<gt::Edge>(m, "Edge")
      .def(py::init([](int u, int v, double b, double g) {
             return gt::Edge{u, v, b, g, std::nullopt};
           }),
           py::arg("from_"), py::arg("to"), py::arg("b"), py::arg("g") = 0.0)
      .def_readonly("from_", &gt::Edge::from)
      .def_readonly("to", &gt::Edge::to)
      .def_readonly("b", &gt::Edge::susceptance)
      .def_readonly("g", &gt::Edge::conductance)
      .def("__repr__", [](const gt::Edge& e) {
        return "Edge(" + std::to_string(e.from) + ", " + std::to_string(e.to) +
               ", b=" + std::to_string(e.susceptance) + ")";
      });

  py::class_<gt::Network>(m, "Network")
      .def(py::init<std::vector<double>, double, std::vector<gt::Edge>>(), py::arg("inertia"),
           py::arg("damping"), py::arg("edges"))
      .def_property_readonly("node_count", &gt::Network::node_count)
      .def_property_readonly("edge_count", &gt::Network::edge_count)
      .def_property_readonly("damping", &gt::Network::damping)
      .def_property_readonly("inertia", [](const gt::Network& n) {
        return std::vector<double>(n.inertia().begin(), n.inertia().end());
      })
      .def_property_readonly("edges", [](const gt::Network& n) {
        return std::vector<gt::Edge>(n.edges().begin(), n.edges().end());
      });

  py::class_<gt::CostSpec>(m, "CostSpec")
      .def(py::init([](const std::string& kind, std::vector<double> ranks,
                       std::optional<Eigen::MatrixXd> weights, std::vector<double> s,
                       std::vector<int> loss_edges) {
             return gt::CostSpec{gt::parse_cost_kind(kind), std::move(ranks), std::move(weights),
                                 std::move(s), std::move(loss_edges)};
           }),
           py::arg("kind") = "consensus", py::arg("ranks") = std::vector<double>{},
           py::arg("weights") = std::nullopt, py::arg("s") = std::vector<double>{},
           py::arg("loss_edges") = std::vector<int>{})
      .def_property_readonly("kind",
                             [](const gt::CostSpec& c) { return std::string(gt::to_string(c.kind)); })
      .def_readonly("ranks", &gt::CostSpec::ranks);

  py::class_<gt::NetworkFile>(m, "NetworkFile")
      .def_readonly("network", &gt::NetworkFile::network)
      .def_readonly("cost", &gt::NetworkFile::cost)
      .def_property_readonly("generator_seed", [](const gt::NetworkFile& f) {
        return f.generator ? std::optional<std::uint64_t>(f.generator->seed) : std::nullopt;
      })
      .def("dumps", &gt::dump_network_file)
      .def("save", [](const gt::NetworkFile& f, const std::filesystem::path& p) {
        gt::save_network_file(p, f);
      });

  m.def("load", &gt::load_network_file, py::arg("path"), "Read a network JSON file.");
  m.def("loads", [](const std::string& text) { return gt::parse_network_file(text); },
        py::arg("text"));
  m.def("generate_case", &gt::generate_case, py::arg("base"), py::arg("extra_edges"),
        py::arg("seed"));

  m.def(
      "evaluate",
      [](const gt::Network& net, const std::vector<int>& edges,
         const std::optional<gt::CostSpec>& cost) {
        const auto ev = gt::evaluate(net, matrices(net, cost), gt::Topology(edges));
        py::dict d;
        d["cost"] = ev.cost;
        d["h2_squared"] = ev.h2_squared;
        return d;
      },
      py::arg("network"), py::arg("edges"), py::arg("cost") = std::nullopt,
      "Tr(L_w L_b^+) and the squared H2 norm of an edge selection.");

  m.def(
      "verify",
      [](const gt::Network& net, const std::vector<int>& edges,
         const std::optional<gt::CostSpec>& cost) {
        const auto ss = gt::assemble_state_space(net, gt::Topology(edges), matrices(net, cost));
        const auto g = gt::solve_observability_lyapunov(ss);
        const auto r = gt::verify_gramian_identities(ss, g);
        py::dict d;
        d["passed"] = r.passed;
        d["h2_gramian"] = r.h2_lhs;
        d["h2_closed_form"] = r.h2_rhs;
        d["phase_trace_residual"] = r.phase_trace_residual;
        d["h2_residual"] = r.h2_residual;
        d["rigid_mode_residual"] = r.rigid_mode_residual;
        d["gramian"] = g.q;
        return d;
      },
      py::arg("network"), py::arg("edges"), py::arg("cost") = std::nullopt);

  m.def(
      "simulate",
      [](const gt::Network& net, const std::vector<int>& edges,
         const std::optional<gt::CostSpec>& cost, double horizon, double dt, std::uint64_t seed) {
        const auto ss = gt::assemble_state_space(net, gt::Topology(edges), matrices(net, cost));
        gt::SimulationOptions opts;
        opts.horizon = horizon;
        opts.dt = dt;
        opts.seed = seed;
        const auto est = [&] {
          py::gil_scoped_release release;
          return gt::simulate_ambient(ss, opts);
        }();
        return py::make_tuple(est.mean, est.standard_error);
      },
      py::arg("network"), py::arg("edges"), py::arg("cost") = std::nullopt,
      py::arg("horizon") = 1e4, py::arg("dt") = 1e-3, py::arg("seed") = 1);

  m.def(
      "design_tree",
      [](const gt::Network& net, const std::optional<gt::CostSpec>& cost) {
        return tree_dict(gt::design_tree(net, matrices(net, cost)));
      },
      py::arg("network"), py::arg("cost") = std::nullopt);

  m.def(
      "design_mesh",
      [](const gt::Network& net, int k, const std::optional<gt::CostSpec>& cost) {
        return mesh_dict(gt::design_mesh(net, matrices(net, cost), k));
      },
      py::arg("network"), py::arg("k"), py::arg("cost") = std::nullopt);

  m.def(
      "brute_tree",
      [](const gt::Network& net, const std::optional<gt::CostSpec>& cost, std::uint64_t cap) {
        return tree_dict(gt::brute_force_tree(net, matrices(net, cost), cap));
      },
      py::arg("network"), py::arg("cost") = std::nullopt,
      py::arg("cap") = gt::kDefaultEnumerationCap);

  m.def(
      "brute_mesh",
      [](const gt::Network& net, int k, const std::optional<gt::CostSpec>& cost,
         const std::optional<std::vector<int>>& seed_tree, std::uint64_t cap) {
        std::optional<gt::Topology> seed;
        if (seed_tree) seed = gt::Topology(*seed_tree);
        return mesh_dict(gt::brute_force_mesh(net, matrices(net, cost), k, seed, cap));
      },
      py::arg("network"), py::arg("k"), py::arg("cost") = std::nullopt,
      py::arg("seed_tree") = std::nullopt, py::arg("cap") = gt::kDefaultEnumerationCap);

  m.def(
      "gap_bound",
      [](const gt::Network& net, const std::optional<gt::CostSpec>& cost) {
        return gt::gap_bound(net, matrices(net, cost));
      },
      py::arg("network"), py::arg("cost") = std::nullopt);

  m.def(
      "gap_table",
      [](const gt::Network& net, const std::vector<int>& ks, const std::optional<gt::CostSpec>& cost,
         std::uint64_t cap) {
        const auto spec = cost.value_or(gt::CostSpec{});
        const gt::NamedCost named{std::string(gt::to_string(spec.kind)), gt::build_cost(spec, net)};
        return gt::run_gap_table(net, named, ks, {.cap = cap}).to_csv();
      },
      py::arg("network"), py::arg("k_values"), py::arg("cost") = std::nullopt,
      py::arg("cap") = gt::kDefaultEnumerationCap, "Gap table as CSV text.");
}
