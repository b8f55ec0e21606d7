#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>

#include <Eigen/Core>
#include <json.hpp>

#include "dsgm/concentration.hpp"
#include "dsgm/csv.hpp"
#include "dsgm/harness.hpp"
#include "dsgm/kernels.hpp"
#include "dsgm/rng.hpp"
#include "dsgm/spectra.hpp"

namespace dsgm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string method_name(Activation a) { return a == Activation::PReLU ? "GNN(non)" : "GNN(lin)"; }

std::string gamma_setting(double gamma) { return "gamma=" + format_double(gamma); }

// Seeds for trial t of a run: one stream per trial, independent of gamma so that
// repeated settings reproduce the same draws.
struct TrialSeeds {
  std::uint64_t graph, features, split, train;
};

TrialSeeds trial_seeds(std::uint64_t master, int trial) {
  const Rng s = Rng::stream(master, static_cast<std::uint64_t>(trial));
  return {s.split(1).seed(), s.split(2).seed(), s.split(3).seed(), s.split(4).seed()};
}

}  // namespace

SyntheticInstance synthetic_instance(const ExperimentConfig& c, double gamma, const TrialSeeds& seeds) {
  SyntheticInstance inst;
  const Kernel kernel = Kernel::synthetic_pq(c.p, c.q);
  inst.graph = sample_dsgm(kernel, c.nodes, gamma, seeds.graph);
  inst.labels = sign_communities(*inst.graph.latent());
  const Index d = static_cast<Index>(c.feature_mean.size());
  Vector mu(d);
  for (Index i = 0; i < d; ++i) mu(i) = c.feature_mean[i];
  const Matrix cov = c.feature_variance * Matrix::Identity(d, d);
  inst.features = sample_gaussian_mixture_features(inst.labels, {mu, -mu}, {cov, cov}, seeds.features);
  inst.split = community_halves(inst.labels, seeds.split);
  return inst;
}

SyntheticInstance synthetic_instance(const ExperimentConfig& c, double gamma, int trial) {
  return synthetic_instance(c, gamma, trial_seeds(c.seed, trial));
}

namespace {

SpectralDecomposition operator_spectrum(const SparseMatrix& S) {
  // Dense solve: sparse graphs have many repeated eigenvalues (one per small
  // component for the normalized operator), which Krylov methods resolve poorly.
  return eig_sym(Matrix(S));
}

Matrix scaled_embedding(const SpectralDecomposition& decomp, const Matrix& feature_vectors, Index K,
                        Index kappa, bool scale) {
  const Index n = decomp.eigenvectors.rows();
  if (K > decomp.eigenvectors.cols()) {
    throw std::out_of_range("embedding size " + std::to_string(K) + " exceeds the " +
                            std::to_string(decomp.eigenvectors.cols()) + " available eigenvectors");
  }
  Matrix E(n, K + kappa);
  E.leftCols(K) = decomp.eigenvectors.leftCols(K);
  if (kappa > 0) E.rightCols(kappa) = feature_vectors.leftCols(kappa);
  if (scale) E *= std::sqrt(static_cast<double>(n));
  return E;
}

struct Evaluation {
  double train_acc = 0.0;
  double test_acc = 0.0;
};

Evaluation evaluate_se(const Matrix& E, const CommunityAssignment& Y, const DataSplit& split,
                       const MlpConfig& cfg, std::uint64_t seed) {
  const TrainMask mask(split.train, Y.size());
  TrainMonitor monitor{split.validation, {}};
  Embedding emb;
  emb.values = E;
  const auto result = train_se_classifier(emb, Y, mask, cfg, seed, monitor);
  const Matrix P = mlp_forward(result.model, E).probabilities;
  return {accuracy(P, Y, split.train), accuracy(P, Y, split.test)};
}

Evaluation evaluate_gnn(const SparseMatrix& S, const Matrix& X, const CommunityAssignment& Y,
                        const DataSplit& split, const GnnConfig& cfg, bool mask_features,
                        std::uint64_t seed, GnnModel* trained = nullptr) {
  const TrainMask mask(split.train, Y.size());
  const Matrix input = mask_features ? dsgm::mask_features(X, mask) : X;
  TrainMonitor monitor{split.validation, {}};
  auto result = train_gnn(cfg, S, input, Y, mask, seed, monitor);
  const Matrix P = gnn_forward(result.model, S, input).probabilities;
  if (trained) *trained = std::move(result.model);
  return {accuracy(P, Y, split.train), accuracy(P, Y, split.test)};
}

SparseMatrix gnn_operator(const SparseMatrix& S, const SpectralDecomposition& decomp, bool rescale) {
  if (!rescale || decomp.size() == 0) return S;
  const double rho = decomp.eigenvalues.cwiseAbs().maxCoeff();
  return rho > 0.0 ? SparseMatrix(S / rho) : S;
}

Index kappa_for(const ExperimentConfig& c, int K) { return c.se_kappa < 0 ? K : c.se_kappa; }

std::string context(const std::string& what, const std::exception& e) {
  return what + ": " + e.what();
}

}  // namespace

void parallel_for(int count, int threads, const std::function<void(int)>& job) {
  if (count <= 0) return;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  const int workers = std::max(1, std::min(threads, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  auto loop = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        job(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(loop);
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::pair<double, double> mean_stderr(const std::vector<double>& values) {
  if (values.empty()) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double n = static_cast<double>(values.size());
  return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

void RunResult::aggregate() {
  aggregates.clear();
  std::vector<std::vector<double>> groups;
  for (const auto& r : records) {
    std::size_t g = 0;
    while (g < aggregates.size() && !(aggregates[g].setting == r.setting &&
                                      aggregates[g].method == r.method && aggregates[g].op == r.op)) {
      ++g;
    }
    if (g == aggregates.size()) {
      aggregates.push_back({r.setting, r.method, r.op, 0, 0.0, 0.0});
      groups.emplace_back();
    }
    groups[g].push_back(r.test_acc);
  }
  for (std::size_t g = 0; g < aggregates.size(); ++g) {
    const auto [m, se] = mean_stderr(groups[g]);
    aggregates[g].count = static_cast<Index>(groups[g].size());
    aggregates[g].mean = m;
    aggregates[g].stderr_ = se;
  }
}

const Aggregate* RunResult::find(const std::string& setting, const std::string& method,
                                 const std::string& op) const {
  for (const auto& a : aggregates) {
    if (a.setting == setting && a.method == method && a.op == op) return &a;
  }
  return nullptr;
}

void write_records_csv(std::ostream& out, const RunResult& result) {
  CsvWriter csv(out);
  csv.row({"setting", "method", "operator", "trial", "replica", "seed", "train_acc", "test_acc"});
  for (const auto& r : result.records) {
    csv.row({r.setting, r.method, r.op, std::to_string(r.trial), std::to_string(r.replica),
             std::to_string(r.seed), format_double(r.train_acc), format_double(r.test_acc)});
  }
}

void write_aggregates_csv(std::ostream& out, const RunResult& result) {
  CsvWriter csv(out);
  csv.row({"setting", "method", "operator", "count", "mean_test_acc", "stderr"});
  for (const auto& a : result.aggregates) {
    csv.row({a.setting, a.method, a.op, std::to_string(a.count), format_double(a.mean),
             format_double(a.stderr_)});
  }
}

RunResult run_synthetic_benchmark(const ExperimentConfig& config) {
  config.validate();
  const int jobs = static_cast<int>(config.gammas.size()) * config.trials;
  std::vector<std::vector<TrialRecord>> out(static_cast<std::size_t>(jobs));
  parallel_for(jobs, config.threads, [&](int job) {
    const double gamma = config.gammas[static_cast<std::size_t>(job / config.trials)];
    const int trial = job % config.trials;
    const std::string where = gamma_setting(gamma) + ", trial " + std::to_string(trial);
    try {
      const TrialSeeds seeds = trial_seeds(config.seed, trial);
      const auto inst = synthetic_instance(config, gamma, seeds);
      int max_kappa = 0;
      for (int K : config.se_dims) max_kappa = std::max<int>(max_kappa, kappa_for(config, K));
      const Matrix fvec = max_kappa > 0 ? feature_gram_eigenvectors(inst.features, max_kappa) : Matrix();
      auto& records = out[static_cast<std::size_t>(job)];
      for (OperatorKind op : config.operators) {
        const SparseMatrix S = graph_operator(inst.graph, op);
        const auto decomp = operator_spectrum(S);
        std::uint64_t method_index = 0;
        for (int K : config.se_dims) {
          const auto start = Clock::now();
          const Matrix E = scaled_embedding(decomp, fvec, K, kappa_for(config, K), config.se_scale);
          const std::uint64_t seed = Rng(seeds.train).split(method_index++).seed();
          const auto ev = evaluate_se(E, inst.labels, inst.split, config.se, seed);
          records.push_back({gamma_setting(gamma), "SE(" + std::to_string(K) + ")", to_string(op), trial,
                             0, seed, ev.train_acc, ev.test_acc, seconds_since(start)});
        }
        const SparseMatrix Sg = gnn_operator(S, decomp, config.gnn_rescale_operator);
        for (Activation act : config.gnn_variants) {
          const auto start = Clock::now();
          GnnConfig cfg = config.gnn;
          cfg.activation = act;
          const std::uint64_t seed = Rng(seeds.train).split(100 + method_index++).seed();
          const auto ev = evaluate_gnn(Sg, inst.features, inst.labels, inst.split, cfg,
                                       config.gnn_mask_features, seed);
          records.push_back({gamma_setting(gamma), method_name(act), to_string(op), trial, 0, seed,
                             ev.train_acc, ev.test_acc, seconds_since(start)});
        }
      }
    } catch (const std::exception& e) {
      throw std::runtime_error(context(where, e));
    }
  });
  RunResult result;
  for (auto& r : out) result.records.insert(result.records.end(), r.begin(), r.end());
  result.aggregate();
  return result;
}

std::vector<FrequencyPanel> run_frequency_analysis(const ExperimentConfig& config) {
  config.validate();
  const OperatorKind op = config.operators.front();
  const double dense = *std::min_element(config.gammas.begin(), config.gammas.end());
  const double sparse = *std::max_element(config.gammas.begin(), config.gammas.end());
  struct Cell {
    Vector eigenvalues;
    std::vector<Matrix> coefficients;  // per variant
    std::vector<double> energy;        // per variant
  };
  const int jobs = static_cast<int>(config.gammas.size()) * config.trials;
  std::vector<Cell> cells(static_cast<std::size_t>(jobs));
  parallel_for(jobs, config.threads, [&](int job) {
    const double gamma = config.gammas[static_cast<std::size_t>(job / config.trials)];
    const int trial = job % config.trials;
    try {
      const TrialSeeds seeds = trial_seeds(config.seed, trial);
      const auto inst = synthetic_instance(config, gamma, seeds);
      const SparseMatrix S = graph_operator(inst.graph, op);
      const auto decomp = operator_spectrum(S);
      const SparseMatrix Sg = gnn_operator(S, decomp, config.gnn_rescale_operator);
      Cell& cell = cells[static_cast<std::size_t>(job)];
      cell.eigenvalues = decomp.eigenvalues;
      std::uint64_t index = 0;
      for (Activation act : config.gnn_variants) {
        GnnConfig cfg = config.gnn;
        cfg.activation = act;
        GnnModel model;
        const std::uint64_t seed = Rng(seeds.train).split(200 + index++).seed();
        const Matrix input =
            config.gnn_mask_features ? mask_features(inst.features, TrainMask(inst.split.train, config.nodes))
                                     : inst.features;
        evaluate_gnn(Sg, inst.features, inst.labels, inst.split, cfg, config.gnn_mask_features, seed, &model);
        const Matrix coeffs = model_frequency_response(model, decomp, input, Sg);
        cell.energy.push_back(top_energy_fraction(decomp.eigenvalues, coeffs, 2));
        cell.coefficients.push_back(coeffs);
      }
    } catch (const std::exception& e) {
      throw std::runtime_error(context(gamma_setting(gamma) + ", trial " + std::to_string(trial), e));
    }
  });

  std::vector<FrequencyPanel> panels;
  for (std::size_t g = 0; g < config.gammas.size(); ++g) {
    const double gamma = config.gammas[g];
    for (std::size_t v = 0; v < config.gnn_variants.size(); ++v) {
      FrequencyPanel panel;
      const Activation act = config.gnn_variants[v];
      std::string prefix = gamma_setting(gamma);
      if (config.gammas.size() == 2 && dense != sparse) prefix = gamma == dense ? "dense" : "sparse";
      panel.name = prefix + "_" + (act == Activation::PReLU ? "non" : "lin");
      panel.gamma = gamma;
      panel.activation = act;
      const Cell& first = cells[g * static_cast<std::size_t>(config.trials)];
      // Rows in decreasing eigenvalue order, as plotted.
      std::vector<Index> order(static_cast<std::size_t>(first.eigenvalues.size()));
      std::iota(order.begin(), order.end(), Index{0});
      std::stable_sort(order.begin(), order.end(),
                       [&](Index a, Index b) { return first.eigenvalues(a) > first.eigenvalues(b); });
      panel.eigenvalues.resize(first.eigenvalues.size());
      panel.coefficients.resize(first.coefficients[v].rows(), first.coefficients[v].cols());
      for (std::size_t i = 0; i < order.size(); ++i) {
        panel.eigenvalues(static_cast<Index>(i)) = first.eigenvalues(order[i]);
        panel.coefficients.row(static_cast<Index>(i)) = first.coefficients[v].row(order[i]);
      }
      double sum = 0.0;
      for (int t = 0; t < config.trials; ++t) sum += cells[g * config.trials + t].energy[v];
      panel.top2_energy = sum / config.trials;
      panels.push_back(std::move(panel));
    }
  }
  return panels;
}

std::vector<ConcentrationRow> run_concentration_study(const ExperimentConfig& config) {
  config.validate();
  const Kernel kernel = Kernel::synthetic_pq(config.p, config.q);
  const Index max_k = *std::max_element(config.concentration_k.begin(), config.concentration_k.end());
  const Index count = std::max<Index>(max_k + 2, 4);

  // Whole-line reference: closed form for the two nonzero eigenvalues, a fine
  // discretization for eigenfunctions.
  const auto closed = sbk_closed_form_spectrum(config.p, config.q, synthetic_degree);
  const KernelSpectrum whole = discretize_kernel_spectrum(kernel, 50.0, 4000, count);
  auto lambda_whole = [&](Index k) {
    if (k == 1) return closed.lambda1;
    if (k == 2) return closed.lambda2;
    return whole.eigenvalues(k - 1);
  };

  struct PerGamma {
    ConcentrationParams params;
    KernelSpectrum support;
  };
  std::vector<PerGamma> per_gamma;
  for (double gamma : config.gammas) {
    PerGamma pg;
    pg.params = grid_params(kernel, config.nodes, gamma, config.lipschitz_grid);
    pg.support = discretize_kernel_spectrum(kernel, 0.5 * static_cast<double>(config.nodes) * gamma,
                                            2000, count);
    per_gamma.push_back(std::move(pg));
  }

  const int jobs = static_cast<int>(config.gammas.size()) * config.trials;
  std::vector<std::vector<ConcentrationRow>> out(static_cast<std::size_t>(jobs));
  parallel_for(jobs, config.threads, [&](int job) {
    const std::size_t g = static_cast<std::size_t>(job / config.trials);
    const double gamma = config.gammas[g];
    const int trial = job % config.trials;
    try {
      const TrialSeeds seeds = trial_seeds(config.seed, trial);
      const Graph graph = sample_dsgm(kernel, config.nodes, gamma, seeds.graph);
      const auto top = eig_sym(dense_adjacency(graph));
      const auto induced = induced_kernel_spectrum(graph, gamma);
      for (int k : config.concentration_k) {
        ConcentrationRow row;
        row.gamma = gamma;
        row.seed_index = trial;
        row.seed = seeds.graph;
        row.k = k;
        row.lambda_graph = gamma * top.eigenvalues(k - 1);
        row.lambda_kernel = lambda_whole(k);
        row.lambda_gap = std::abs(row.lambda_graph - row.lambda_kernel);
        row.lambda_gap_support = std::abs(row.lambda_graph - per_gamma[g].support.eigenvalues(k - 1));
        const GapReport rep = empirical_gap(whole, induced, k, per_gamma[g].params);
        row.phi_gap = rep.eigenfunction_gap;
        row.delta_k = rep.delta_k;
        row.bound_eigenvalue = rep.bound_eigenvalue;
        row.bound_eigenvector = rep.bound_eigenvector;
        row.tail_mass = per_gamma[g].params.epsilon;
        row.lipschitz = per_gamma[g].params.lipschitz;
        out[static_cast<std::size_t>(job)].push_back(row);
      }
    } catch (const std::exception& e) {
      throw std::runtime_error(context(gamma_setting(gamma) + ", trial " + std::to_string(trial), e));
    }
  });
  std::vector<ConcentrationRow> rows;
  for (auto& r : out) rows.insert(rows.end(), r.begin(), r.end());
  return rows;
}

void write_concentration_csv(std::ostream& out, const std::vector<ConcentrationRow>& rows) {
  CsvWriter csv(out);
  csv.row({"gamma", "seed", "k", "lambda_gap", "phi_gap", "delta_k", "bound_val", "bound_vec", "seed_index",
           "lambda_graph", "lambda_kernel", "lambda_gap_support", "tail_mass", "lipschitz"});
  for (const auto& r : rows) {
    csv.row({format_double(r.gamma), std::to_string(r.seed), std::to_string(r.k), format_double(r.lambda_gap),
             format_double(r.phi_gap), format_double(r.delta_k), format_double(r.bound_eigenvalue),
             format_double(r.bound_eigenvector), std::to_string(r.seed_index), format_double(r.lambda_graph),
             format_double(r.lambda_kernel), format_double(r.lambda_gap_support), format_double(r.tail_mass),
             format_double(r.lipschitz)});
  }
}

RunResult run_real_benchmark(const ExperimentConfig& config, const Dataset& data) {
  if (data.splits.empty()) throw std::invalid_argument("dataset has no splits");
  int max_kappa = 0;
  int max_k = 0;
  for (int K : config.se_dims) {
    max_kappa = std::max<int>(max_kappa, kappa_for(config, K));
    max_k = std::max(max_k, K);
  }
  const Matrix fvec = max_kappa > 0 ? feature_gram_eigenvectors(data.features, max_kappa) : Matrix();

  struct Job {
    OperatorKind op;
    double fraction;
    int replica;
  };
  std::vector<Job> jobs;
  for (OperatorKind op : config.operators) {
    for (double f : config.drop_fractions) {
      const int replicas = f == 0.0 ? 1 : config.replicas;
      for (int r = 0; r < replicas; ++r) jobs.push_back({op, f, r});
    }
  }
  std::vector<std::vector<TrialRecord>> out(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), config.threads, [&](int j) {
    const Job& job = jobs[static_cast<std::size_t>(j)];
    const std::string setting =
        job.fraction == 0.0 ? "Original" : "Drop(" + format_double(std::round(job.fraction * 100.0)) + ")";
    const std::string where = setting + " " + to_string(job.op) + ", replica " + std::to_string(job.replica);
    try {
      const Rng replica_stream = Rng::stream(config.seed, static_cast<std::uint64_t>(job.replica));
      const std::uint64_t drop_seed = replica_stream.split(static_cast<std::uint64_t>(
                                          std::llround(job.fraction * 1000.0))).seed();
      const Graph graph = job.fraction == 0.0 ? data.graph : drop_edges(data.graph, job.fraction, drop_seed);
      const SparseMatrix S = graph_operator(graph, job.op);
      const auto decomp = operator_spectrum(S);
      const SparseMatrix Sg = gnn_operator(S, decomp, config.gnn_rescale_operator);
      auto& records = out[static_cast<std::size_t>(j)];
      for (std::size_t s = 0; s < data.splits.size(); ++s) {
        const DataSplit& split = data.splits[s];
        const Rng split_stream = replica_stream.split(1000 + s);
        std::uint64_t method_index = 0;
        for (int K : config.se_dims) {
          const auto start = Clock::now();
          const Matrix E = scaled_embedding(decomp, fvec, K, kappa_for(config, K), config.se_scale);
          const std::uint64_t seed = split_stream.split(method_index++).seed();
          const auto ev = evaluate_se(E, data.labels, split, config.se, seed);
          records.push_back({setting, "SE(" + std::to_string(K) + ")", to_string(job.op),
                             static_cast<int>(s), job.replica, seed, ev.train_acc, ev.test_acc,
                             seconds_since(start)});
        }
        for (Activation act : config.gnn_variants) {
          const auto start = Clock::now();
          GnnConfig cfg = config.gnn;
          cfg.activation = act;
          const std::uint64_t seed = split_stream.split(100 + method_index++).seed();
          const auto ev = evaluate_gnn(Sg, data.features, data.labels, split, cfg, config.gnn_mask_features, seed);
          records.push_back({setting, method_name(act), to_string(job.op), static_cast<int>(s), job.replica,
                             seed, ev.train_acc, ev.test_acc, seconds_since(start)});
        }
      }
    } catch (const std::exception& e) {
      throw std::runtime_error(context(where, e));
    }
  });
  RunResult result;
  for (auto& r : out) result.records.insert(result.records.end(), r.begin(), r.end());
  result.aggregate();
  return result;
}

void write_table_csv(std::ostream& out, const RunResult& result) {
  std::vector<std::string> methods;
  std::vector<std::pair<std::string, std::string>> rows;
  for (const auto& a : result.aggregates) {
    if (std::find(methods.begin(), methods.end(), a.method) == methods.end()) methods.push_back(a.method);
    const std::pair<std::string, std::string> key{a.setting, a.op};
    if (std::find(rows.begin(), rows.end(), key) == rows.end()) rows.push_back(key);
  }
  CsvWriter csv(out);
  std::vector<std::string> header{"setting", "operator"};
  header.insert(header.end(), methods.begin(), methods.end());
  csv.row(header);
  for (const auto& [setting, op] : rows) {
    std::vector<std::string> line{setting, op};
    for (const auto& m : methods) {
      const Aggregate* a = result.find(setting, m, op);
      if (!a) {
        line.emplace_back();
        continue;
      }
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.2f(+-%.2f)", 100.0 * a->mean, 100.0 * a->stderr_);
      line.emplace_back(buf);
    }
    csv.row(line);
  }
}

std::vector<InterpolateInstance> run_interpolate_demo(const ExperimentConfig& config) {
  std::vector<InterpolateInstance> rows;
  auto run = [&](const std::string& label, const Matrix& A, const Vector& x, const Vector& y) {
    InterpolateInstance r;
    r.label = label;
    r.nodes = A.rows();
    r.residual = std::numeric_limits<double>::quiet_NaN();
    const auto check = spectral_coefficient_check(eig_sym(A), x, config.interpolate_tol);
    r.preconditions_ok = check.ok;
    r.min_coefficient = check.min_coefficient;
    r.min_gap = check.min_gap;
    try {
      const Vector h = interpolate_filter(A, x, y, config.interpolate_tol);
      r.residual = (apply_filter(A, x, std::span<const double>(h.data(), h.size())) - y).lpNorm<Eigen::Infinity>();
    } catch (const std::exception& e) {
      r.diagnostic = e.what();
    }
    rows.push_back(std::move(r));
  };

  Rng rng(config.seed);
  auto gaussian = [&](Index n) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = rng.normal();
    return v;
  };
  // Complete graph with Gaussian edge weights. Nonnegative weights put a Perron
  // eigenvalue far above the rest, which makes the monomial taps badly conditioned.
  auto random_graph = [&](Index n) {
    Matrix A = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
      for (Index j = i + 1; j < n; ++j) A(i, j) = A(j, i) = rng.normal();
    }
    return A;
  };
  const Index span = config.interpolate_max_nodes - config.interpolate_min_nodes + 1;
  for (int t = 0; t < config.interpolate_instances; ++t) {
    const Index n = config.interpolate_min_nodes + static_cast<Index>(rng.below(static_cast<std::uint64_t>(span)));
    const Matrix A = random_graph(n);
    run("random-" + std::to_string(t), A, gaussian(n), gaussian(n));
  }
  const Matrix K3 = Matrix::Ones(3, 3) - Matrix::Identity(3, 3);
  run("K3", K3, gaussian(3), gaussian(3));
  const Matrix A = random_graph(6);
  run("eigenvector", A, eig_sym(A).eigenvectors.col(0), gaussian(6));
  return rows;
}

void write_interpolate_csv(std::ostream& out, const std::vector<InterpolateInstance>& rows) {
  CsvWriter csv(out);
  csv.row({"instance", "nodes", "preconditions_ok", "min_coefficient", "min_gap", "residual", "diagnostic"});
  for (const auto& r : rows) {
    std::string diag = r.diagnostic;
    std::replace(diag.begin(), diag.end(), ',', ';');
    csv.row({r.label, std::to_string(r.nodes), r.preconditions_ok ? "true" : "false",
             format_double(r.min_coefficient), format_double(r.min_gap),
             std::isnan(r.residual) ? std::string() : format_double(r.residual), diag});
  }
}

void write_manifest(const std::filesystem::path& path, const ExperimentConfig& config,
                    const std::string& command, double wall_seconds,
                    const std::vector<std::string>& outputs) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["experiment"] = to_string(config.kind);
  j["seed"] = config.seed;
  j["threads"] = config.threads;
  j["versions"] = {{"dsgm", DSGM_VERSION},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                 "." + std::to_string(EIGEN_MINOR_VERSION)},
                   {"compiler", __VERSION__}};
  nlohmann::ordered_json cfg;
  for (const auto& [k, v] : config.entries()) cfg[k] = v;
  j["config"] = cfg;
  j["outputs"] = outputs;
  j["wall_seconds"] = wall_seconds;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace dsgm
