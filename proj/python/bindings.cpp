#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dsgm/concentration.hpp"
#include "dsgm/gnn.hpp"
#include "dsgm/graph.hpp"
#include "dsgm/harness.hpp"
#include "dsgm/kernels.hpp"
#include "dsgm/spectra.hpp"

namespace py = pybind11;
using namespace dsgm;

namespace {

Graph graph_from_edges(Index n, const std::vector<std::pair<Index, Index>>& edges) {
  return Graph::from_edges(n, edges);
}

py::tuple eig(const Matrix& S) {
  const auto d = eig_sym(S);
  return py::make_tuple(d.eigenvalues, d.eigenvectors);
}

Activation activation_from(const std::string& name) {
  if (name == "lin") return Activation::Identity;
  if (name == "non") return Activation::PReLU;
  throw py::value_error("activation must be 'lin' or 'non'");
}

py::dict train(const Matrix& S, const Matrix& X, const std::vector<int>& labels,
               const std::vector<Index>& train_nodes, std::uint64_t seed, const std::string& activation,
               int epochs, double lr, double dropout, int hidden, int taps) {
  int classes = 0;
  for (int y : labels) classes = std::max(classes, y + 1);
  const CommunityAssignment Y(labels, classes);
  GnnConfig cfg;
  cfg.activation = activation_from(activation);
  cfg.taps = taps;
  cfg.hidden = {hidden, hidden};
  cfg.schedule.max_epochs = epochs;
  cfg.schedule.learning_rate = lr;
  cfg.schedule.dropout = dropout;
  const SparseMatrix Ssp = S.sparseView();
  const TrainMask mask(train_nodes, X.rows());
  TrainResult<GnnModel> result;
  {
    py::gil_scoped_release release;
    result = train_gnn(cfg, Ssp, X, Y, mask, seed);
  }
  std::vector<double> loss;
  for (const auto& r : result.history) loss.push_back(r.train_loss);
  py::dict out;
  out["probabilities"] = gnn_forward(result.model, Ssp, X).probabilities;
  out["loss"] = loss;
  out["epochs"] = static_cast<int>(result.history.size());
  return out;
}

py::dict synthetic(Index nodes, double gamma, std::uint64_t seed, double p, double q) {
  ExperimentConfig c;
  c.nodes = nodes;
  c.p = p;
  c.q = q;
  c.seed = seed;
  const auto inst = synthetic_instance(c, gamma, 0);
  py::dict out;
  out["graph"] = inst.graph;
  out["features"] = inst.features;
  out["labels"] = inst.labels.labels();
  out["train"] = inst.split.train;
  out["test"] = inst.split.test;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "dense-sparse graph model: sampling, spectra, concentration bounds and graph neural networks";
  m.attr("__version__") = DSGM_VERSION;

  py::class_<Graph>(m, "Graph")
      .def(py::init<Index>(), py::arg("n"))
      .def_static("from_edges", &graph_from_edges, py::arg("n"), py::arg("edges"))
      .def_property_readonly("node_count", &Graph::node_count)
      .def_property_readonly("edge_count", &Graph::edge_count)
      .def("degree", &Graph::degree)
      .def("has_edge", &Graph::has_edge)
      .def("edges", &Graph::edges)
      .def_property_readonly("latent", [](const Graph& g) { return g.latent(); })
      .def("adjacency", [](const Graph& g) { return dense_adjacency(g); })
      .def("normalized_adjacency", [](const Graph& g) { return Matrix(normalized_adjacency(g)); })
      .def("__repr__", [](const Graph& g) {
        return "<Graph nodes=" + std::to_string(g.node_count()) + " edges=" + std::to_string(g.edge_count()) + ">";
      });

  m.def("latent_grid", &latent_grid, py::arg("n"), py::arg("gamma"));
  m.def("synthetic_kernel", [](double p, double q, double u, double v) { return Kernel::synthetic_pq(p, q)(u, v); },
        py::arg("p"), py::arg("q"), py::arg("u"), py::arg("v"));
  m.def("sample_dsgm",
        [](Index n, double gamma, std::uint64_t seed, double p, double q) {
          return sample_dsgm(Kernel::synthetic_pq(p, q), n, gamma, seed);
        },
        py::arg("n"), py::arg("gamma"), py::arg("seed"), py::arg("p") = 0.8, py::arg("q") = 0.2);
  m.def("sample_sbm",
        [](const std::vector<int>& labels, const Matrix& B, std::uint64_t seed) {
          return sample_sbm(CommunityAssignment(labels, static_cast<int>(B.rows())), B, seed);
        },
        py::arg("labels"), py::arg("B"), py::arg("seed"));
  m.def("synthetic_instance", &synthetic, py::arg("nodes"), py::arg("gamma"), py::arg("seed"),
        py::arg("p") = 0.8, py::arg("q") = 0.2);
  m.def("drop_edges", &drop_edges, py::arg("graph"), py::arg("fraction"), py::arg("seed"));

  m.def("eig_sym", &eig, py::arg("S"), "eigenvalues by decreasing magnitude and matching eigenvectors");
  m.def("spectral_embedding",
        [](const Matrix& S, Index K) { return spectral_embedding(eig_sym(S), K).values; }, py::arg("S"), py::arg("K"));
  m.def("feature_aware_embedding",
        [](const Matrix& S, const Matrix& X, Index K, Index kappa) {
          return feature_aware_embedding(eig_sym(S), X, K, kappa).values;
        },
        py::arg("S"), py::arg("X"), py::arg("K"), py::arg("kappa"));
  m.def("gft", &gft, py::arg("V"), py::arg("signals"));
  m.def("inverse_gft", &inverse_gft, py::arg("V"), py::arg("coefficients"));

  m.def("sbk_closed_form_spectrum",
        [](double p, double q) {
          const auto s = sbk_closed_form_spectrum(p, q, synthetic_degree);
          return py::make_tuple(s.lambda1, s.lambda2);
        },
        py::arg("p") = 0.8, py::arg("q") = 0.2);
  m.def("kernel_eigenvalues",
        [](double p, double q, double c, Index m, Index count) {
          return discretize_kernel_spectrum(Kernel::synthetic_pq(p, q), c, m, count).eigenvalues;
        },
        py::arg("p") = 0.8, py::arg("q") = 0.2, py::arg("c") = 50.0, py::arg("m") = 1000, py::arg("count") = 4);
  m.def("induced_kernel_eigenvalues",
        [](const Graph& g, double gamma) { return induced_kernel_spectrum(g, gamma).eigenvalues; },
        py::arg("graph"), py::arg("gamma"));
  m.def("eigenvalue_bound",
        [](double lipschitz, double c, double gamma, Index n, double epsilon) {
          ConcentrationParams p;
          p.lipschitz = lipschitz;
          p.truncation = c;
          p.gamma = gamma;
          p.nodes = n;
          p.epsilon = epsilon;
          const auto b = eigenvalue_bound(p);
          return py::make_tuple(b.linear, b.quadratic);
        },
        py::arg("lipschitz"), py::arg("c"), py::arg("gamma"), py::arg("nodes"), py::arg("epsilon") = 0.0);

  m.def("graph_filter",
        [](const Matrix& S, const Matrix& X, const std::vector<Matrix>& taps) { return graph_filter(S, X, taps); },
        py::arg("S"), py::arg("X"), py::arg("taps"));
  m.def("apply_filter",
        [](const Matrix& A, const Vector& x, const std::vector<double>& h) { return apply_filter(A, x, h); },
        py::arg("A"), py::arg("x"), py::arg("h"));
  m.def("interpolate_filter", &interpolate_filter, py::arg("A"), py::arg("x"), py::arg("y"),
        py::arg("tol") = 1e-9);
  m.def("spectral_coefficient_check",
        [](const Matrix& A, const Vector& x, double tol) {
          const auto c = spectral_coefficient_check(eig_sym(A), x, tol);
          py::dict out;
          out["ok"] = c.ok;
          out["min_coefficient"] = c.min_coefficient;
          out["min_gap"] = c.min_gap;
          out["violation"] = c.violation;
          return out;
        },
        py::arg("A"), py::arg("x"), py::arg("tol") = 1e-12);
  m.def("train_gnn", &train, py::arg("S"), py::arg("X"), py::arg("labels"), py::arg("train"), py::arg("seed") = 0,
        py::arg("activation") = "non", py::arg("epochs") = 200, py::arg("lr") = 0.02, py::arg("dropout") = 0.5,
        py::arg("hidden") = 16, py::arg("taps") = 3);
  m.def("accuracy",
        [](const Matrix& scores, const std::vector<int>& labels, const std::vector<Index>& nodes) {
          int classes = static_cast<int>(scores.cols());
          return accuracy(scores, CommunityAssignment(labels, classes), nodes);
        },
        py::arg("scores"), py::arg("labels"), py::arg("nodes"));

  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<TrainingDiverged>(m, "TrainingDiverged", PyExc_RuntimeError);
}
