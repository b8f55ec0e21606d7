// dsgm: sampling, spectra, training and benchmark runs from the command line.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "dsgm/concentration.hpp"
#include "dsgm/csv.hpp"
#include "dsgm/gnn.hpp"
#include "dsgm/graph.hpp"
#include "dsgm/harness.hpp"
#include "dsgm/kernels.hpp"
#include "dsgm/spectra.hpp"

namespace fs = std::filesystem;
using namespace dsgm;

namespace {

struct CommonOptions {
  std::string config;
  std::string seed;
  std::string out;
  std::string op;
  int threads = 0;
  std::vector<std::string> settings;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "flat key = value config file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "master seed (u64)");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--operator", o.op, "graph operator: adj or norm");
  cmd->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--set", o.settings, "override any config key: key=value")->take_all();
}

ExperimentConfig resolve(ExperimentKind kind, const CommonOptions& o) {
  ExperimentConfig c = default_config(kind);
  if (!o.config.empty()) c = load_config(o.config, c);
  if (c.kind != kind) {
    throw std::invalid_argument("config file is for '" + to_string(c.kind) + "', not '" + to_string(kind) + "'");
  }
  for (const auto& s : o.settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + s + "'");
    apply_setting(c, std::string(trim(s.substr(0, eq))), std::string(trim(s.substr(eq + 1))));
  }
  if (!o.seed.empty()) c.seed = parse_seed(o.seed);
  if (!o.out.empty()) c.out = o.out;
  if (!o.op.empty()) c.operators = {parse_operator_kind(o.op)};
  if (o.threads > 0) c.threads = o.threads;
  c.validate();
  return c;
}

std::ofstream open_out(const fs::path& dir, const std::string& name, std::vector<std::string>& outputs) {
  fs::create_directories(dir);
  std::ofstream f(dir / name);
  if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
  outputs.push_back(name);
  return f;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void print_aggregates(const RunResult& r) {
  for (const auto& a : r.aggregates) {
    std::printf("%-14s %-9s %-5s n=%-3lld acc=%.4f +- %.4f\n", a.setting.c_str(), a.method.c_str(), a.op.c_str(),
                static_cast<long long>(a.count), a.mean, a.stderr_);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dense-sparse graph model experiments"};
  app.set_version_flag("--version", std::string(DSGM_VERSION));
  app.require_subcommand(1);

  // sample
  CommonOptions sample_o;
  double sample_gamma = 0.01;
  long long sample_nodes = 0;
  auto* sample = app.add_subcommand("sample", "sample a synthetic graph with features and labels");
  add_common(sample, sample_o);
  sample->add_option("--gamma", sample_gamma, "latent grid spacing");
  sample->add_option("--nodes", sample_nodes, "node count (default from config)");

  // spectra
  CommonOptions spectra_o;
  std::string spectra_edges;
  double spectra_gamma = 0.01;
  long long spectra_count = 10;
  auto* spectra = app.add_subcommand("spectra", "eigenvalues of a graph operator and the kernel reference");
  add_common(spectra, spectra_o);
  spectra->add_option("--edges", spectra_edges, "edge list (default: sample a synthetic graph)");
  spectra->add_option("--gamma", spectra_gamma, "latent grid spacing for a sampled graph");
  spectra->add_option("--count", spectra_count, "eigenpairs to report");

  CommonOptions conc_o;
  auto* conc = app.add_subcommand("concentration", "graph vs kernel eigenpair gaps with bounds");
  add_common(conc, conc_o);

  // train
  CommonOptions train_o;
  double train_gamma = 0.01;
  std::string train_activation = "non";
  auto* train = app.add_subcommand("train", "train one GNN on a synthetic graph");
  add_common(train, train_o);
  train->add_option("--gamma", train_gamma, "latent grid spacing");
  train->add_option("--activation", train_activation, "lin or non");

  CommonOptions bench_o;
  auto* bench = app.add_subcommand("bench-synthetic", "SE(K) vs GNN accuracy on dense and sparse graphs");
  add_common(bench, bench_o);

  CommonOptions real_o;
  auto* real = app.add_subcommand("bench-real", "SE vs GNN on a dataset with edge-drop replicas");
  add_common(real, real_o);

  CommonOptions freq_o;
  auto* freq = app.add_subcommand("freq", "frequency responses of trained GNNs");
  add_common(freq, freq_o);

  CommonOptions interp_o;
  auto* interp = app.add_subcommand("interpolate", "single-convolution interpolation on random small graphs");
  add_common(interp, interp_o);

  CLI11_PARSE(app, argc, argv);

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::string> outputs;
  try {
    if (*sample) {
      auto c = resolve(ExperimentKind::SyntheticBenchmark, sample_o);
      if (sample_nodes > 0) c.nodes = sample_nodes;
      const auto inst = synthetic_instance(c, sample_gamma, 0);
      Dataset d{inst.graph, inst.features, inst.labels, {inst.split}};
      save_dataset(d, c.out);
      const auto s = degree_summary(inst.graph);
      std::printf("nodes %lld edges %lld mean degree %.3f isolated %lld components %lld\n",
                  static_cast<long long>(inst.graph.node_count()), static_cast<long long>(inst.graph.edge_count()),
                  s.mean, static_cast<long long>(s.isolated), static_cast<long long>(s.components));
      write_manifest(fs::path(c.out) / "manifest.json", c, "sample", elapsed(t0),
                     {"edges.txt", "features.csv", "labels.csv", "splits.csv"});
    } else if (*spectra) {
      const auto c = resolve(ExperimentKind::SyntheticBenchmark, spectra_o);
      Graph g = spectra_edges.empty() ? synthetic_instance(c, spectra_gamma, 0).graph : read_edge_list(spectra_edges);
      const OperatorKind op = c.operators.front();
      const auto decomp = eig_sym_top(graph_operator(g, op), std::min<Index>(spectra_count, g.node_count()));
      auto f = open_out(c.out, "spectrum.csv", outputs);
      CsvWriter csv(f);
      csv.row({"index", "eigenvalue", "scaled_eigenvalue"});
      const double scale = spectra_edges.empty() && op == OperatorKind::Adjacency ? spectra_gamma : 1.0;
      for (Index i = 0; i < decomp.size(); ++i) {
        csv.row({std::to_string(i + 1), format_double(decomp.eigenvalues(i)),
                 format_double(scale * decomp.eigenvalues(i))});
        std::printf("%3lld  %.6f  %.6f\n", static_cast<long long>(i + 1), decomp.eigenvalues(i),
                    scale * decomp.eigenvalues(i));
      }
      if (spectra_edges.empty()) {
        const auto ref = sbk_closed_form_spectrum(c.p, c.q, synthetic_degree);
        std::printf("kernel reference: lambda1 %.6f lambda2 %.6f\n", ref.lambda1, ref.lambda2);
      }
      write_manifest(fs::path(c.out) / "manifest.json", c, "spectra", elapsed(t0), outputs);
    } else if (*conc) {
      const auto c = resolve(ExperimentKind::ConcentrationStudy, conc_o);
      const auto rows = run_concentration_study(c);
      auto f = open_out(c.out, "concentration.csv", outputs);
      write_concentration_csv(f, rows);
      for (double gamma : c.gammas) {
        for (int k : c.concentration_k) {
          std::vector<double> gaps;
          for (const auto& r : rows) {
            if (r.gamma == gamma && r.k == k) gaps.push_back(r.lambda_gap);
          }
          std::sort(gaps.begin(), gaps.end());
          const double median = gaps.empty() ? NAN
                                : gaps.size() % 2 ? gaps[gaps.size() / 2]
                                                  : 0.5 * (gaps[gaps.size() / 2 - 1] + gaps[gaps.size() / 2]);
          std::printf("gamma %-8g k %d median lambda gap %.6f\n", gamma, k, median);
        }
      }
      write_manifest(fs::path(c.out) / "manifest.json", c, "concentration", elapsed(t0), outputs);
    } else if (*train) {
      auto c = resolve(ExperimentKind::SyntheticBenchmark, train_o);
      const auto inst = synthetic_instance(c, train_gamma, 0);
      SparseMatrix S = graph_operator(inst.graph, c.operators.front());
      if (c.gnn_rescale_operator) {
        const double rho = std::abs(eig_sym_top(S, 1).eigenvalues(0));
        if (rho > 0.0) S = S / rho;
      }
      GnnConfig cfg = c.gnn;
      cfg.activation = train_activation == "lin" ? Activation::Identity : Activation::PReLU;
      const TrainMask mask(inst.split.train, inst.graph.node_count());
      const Matrix X = c.gnn_mask_features ? mask_features(inst.features, mask) : inst.features;
      const auto result = train_gnn(cfg, S, X, inst.labels, mask, c.seed, {{}, inst.split.test});
      {
        auto f = open_out(c.out, "history.csv", outputs);
        write_history_csv(f, result.history);
      }
      {
        auto f = open_out(c.out, "model.txt", outputs);
        write_checkpoint(f, result.model);
      }
      const auto& last = result.history.back();
      std::printf("epochs %d train loss %.5f train acc %.4f test acc %.4f\n", last.epoch, last.train_loss,
                  last.train_acc, last.test_acc);
      write_manifest(fs::path(c.out) / "manifest.json", c, "train", elapsed(t0), outputs);
    } else if (*bench) {
      const auto c = resolve(ExperimentKind::SyntheticBenchmark, bench_o);
      const auto result = run_synthetic_benchmark(c);
      {
        auto f = open_out(c.out, "records.csv", outputs);
        write_records_csv(f, result);
      }
      {
        auto f = open_out(c.out, "summary.csv", outputs);
        write_aggregates_csv(f, result);
      }
      print_aggregates(result);
      write_manifest(fs::path(c.out) / "manifest.json", c, "bench-synthetic", elapsed(t0), outputs);
    } else if (*real) {
      const auto c = resolve(ExperimentKind::RealBenchmark, real_o);
      const auto data = load_dataset(c.edges_path, c.features_path, c.labels_path, c.splits_path);
      std::printf("nodes %lld features %lld classes %d mean degree %.2f splits %zu\n",
                  static_cast<long long>(data.node_count()), static_cast<long long>(data.feature_dim()),
                  data.classes(), data.mean_degree(), data.splits.size());
      const auto result = run_real_benchmark(c, data);
      {
        auto f = open_out(c.out, "records.csv", outputs);
        write_records_csv(f, result);
      }
      {
        auto f = open_out(c.out, "summary.csv", outputs);
        write_aggregates_csv(f, result);
      }
      {
        auto f = open_out(c.out, "table.csv", outputs);
        write_table_csv(f, result);
      }
      print_aggregates(result);
      write_manifest(fs::path(c.out) / "manifest.json", c, "bench-real", elapsed(t0), outputs);
    } else if (*freq) {
      const auto c = resolve(ExperimentKind::FrequencyAnalysis, freq_o);
      const auto panels = run_frequency_analysis(c);
      for (const auto& p : panels) {
        auto f = open_out(c.out, "freq_" + p.name + ".csv", outputs);
        write_frequency_response_csv(f, p.eigenvalues, p.coefficients);
      }
      auto f = open_out(c.out, "energy.csv", outputs);
      CsvWriter csv(f);
      csv.row({"panel", "gamma", "top2_energy"});
      for (const auto& p : panels) {
        csv.row({p.name, format_double(p.gamma), format_double(p.top2_energy)});
        std::printf("%-12s top-2 energy %.4f\n", p.name.c_str(), p.top2_energy);
      }
      write_manifest(fs::path(c.out) / "manifest.json", c, "freq", elapsed(t0), outputs);
    } else if (*interp) {
      const auto c = resolve(ExperimentKind::InterpolateDemo, interp_o);
      const auto rows = run_interpolate_demo(c);
      auto f = open_out(c.out, "interpolate.csv", outputs);
      write_interpolate_csv(f, rows);
      double worst = 0.0;
      for (const auto& r : rows) {
        if (!std::isnan(r.residual)) worst = std::max(worst, r.residual);
        if (!r.diagnostic.empty()) std::printf("%-12s %s\n", r.label.c_str(), r.diagnostic.c_str());
      }
      std::printf("%zu instances, max residual %.3g\n", rows.size(), worst);
      write_manifest(fs::path(c.out) / "manifest.json", c, "interpolate", elapsed(t0), outputs);
    }
  } catch (const std::exception& e) {
    std::cerr << "dsgm: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
