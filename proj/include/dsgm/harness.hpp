#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dsgm/gnn.hpp"
#include "dsgm/graph.hpp"
#include "dsgm/types.hpp"

namespace dsgm {

enum class ExperimentKind {
  SyntheticBenchmark,
  FrequencyAnalysis,
  ConcentrationStudy,
  RealBenchmark,
  InterpolateDemo,
};

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& text);

/// Everything an experiment needs. Loaded from a flat `key = value` file; see
/// `config_keys()` for the schema.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::SyntheticBenchmark;

  // synthetic graph model
  Index nodes = 1000;
  std::vector<double> gammas{0.002, 0.01};
  double p = 0.8;
  double q = 0.2;
  std::vector<double> feature_mean{1.0, 1.0};  // class 0; class 1 uses the negation
  double feature_variance = 0.25;

  std::vector<OperatorKind> operators{OperatorKind::Adjacency, OperatorKind::NormalizedAdjacency};

  // spectral embedding + MLP
  std::vector<int> se_dims{2, 6, 10, 20};
  int se_kappa = 2;  // feature components; -1 means "same as K"
  bool se_scale = true;  // multiply the embedding by sqrt(N) before the MLP
  MlpConfig se;

  // GNN
  GnnConfig gnn;
  std::vector<Activation> gnn_variants{Activation::Identity, Activation::PReLU};
  bool gnn_mask_features = false;
  bool gnn_rescale_operator = true;  // divide the operator by its spectral radius

  // concentration study
  std::vector<int> concentration_k{1, 2};
  Index lipschitz_grid = 401;

  // real benchmark
  std::string edges_path;
  std::string features_path;
  std::string labels_path;
  std::string splits_path;
  std::vector<double> drop_fractions{0.0, 0.2, 0.7};
  int replicas = 10;

  // interpolation demo
  int interpolate_instances = 50;
  Index interpolate_min_nodes = 3;
  Index interpolate_max_nodes = 12;
  double interpolate_tol = 1e-9;

  std::uint64_t seed = 0;
  int trials = 10;
  int threads = 1;
  std::string out = "results";

  /// Throws std::invalid_argument naming the offending key.
  void validate() const;
  /// Key/value echo in schema order (used by the run manifest).
  std::vector<std::pair<std::string, std::string>> entries() const;
};

/// Defaults for an experiment kind (the real benchmark uses wider SE dims and lr 0.01).
ExperimentConfig default_config(ExperimentKind kind);

/// Sets one key; throws std::invalid_argument for unknown keys or bad values.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Parses `key = value` lines ('#' comments) on top of `base`. An `experiment`
/// line re-bases onto that kind's defaults and must come first.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base);
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base);

std::uint64_t parse_seed(const std::string& text);

/// Documented keys with one-line descriptions.
const std::vector<std::pair<std::string, std::string>>& config_keys();

struct DataSplit {
  std::vector<Index> train;
  std::vector<Index> validation;
  std::vector<Index> test;
};

struct Dataset {
  Graph graph;
  Matrix features;
  CommunityAssignment labels;
  std::vector<DataSplit> splits;

  Index node_count() const { return graph.node_count(); }
  Index feature_dim() const { return features.cols(); }
  int classes() const { return labels.classes(); }
  double mean_degree() const;
};

/// Headerless CSV matrix (row = node).
Matrix read_matrix_csv(std::istream& in, const std::string& what);
void write_matrix_csv(std::ostream& out, const Matrix& M);

/// Labels CSV: either one integer per row or a one-hot row.
CommunityAssignment read_labels_csv(std::istream& in);
/// Splits CSV: `node,split_id,role` with role in {train, val, test}.
std::vector<DataSplit> read_splits_csv(std::istream& in, Index node_count);
void write_splits_csv(std::ostream& out, const std::vector<DataSplit>& splits);

/// Validates node counts, ranges, one-hot labels and split disjointness.
Dataset load_dataset(const std::string& edges, const std::string& features,
                     const std::string& labels, const std::string& splits);
void save_dataset(const Dataset& data, const std::filesystem::path& dir);

/// Synthetic split: each community is shuffled and halved (extra node to train).
DataSplit community_halves(const CommunityAssignment& Y, std::uint64_t seed);

struct SyntheticInstance {
  Graph graph;
  Matrix features;
  CommunityAssignment labels;
  DataSplit split;
};

/// Graph, Gaussian-mixture features, sign labels and 50/50 split for trial `trial`.
/// Draws depend on (seed, trial) only, not on gamma's position in the list.
SyntheticInstance synthetic_instance(const ExperimentConfig& config, double gamma, int trial);

struct TrialRecord {
  std::string setting;   // e.g. gamma=0.01 or drop=0.7
  std::string method;    // SE(2), GNN(lin), GNN(non)
  std::string op;        // adj / norm
  int trial = 0;
  int replica = 0;       // sparsified replica (real benchmark)
  std::uint64_t seed = 0;
  double train_acc = 0.0;
  double test_acc = 0.0;
  double wall_seconds = 0.0;
};

struct Aggregate {
  std::string setting;
  std::string method;
  std::string op;
  Index count = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
};

struct RunResult {
  std::vector<TrialRecord> records;
  std::vector<Aggregate> aggregates;

  /// Recomputes aggregates from records, grouped by (setting, method, op) in first-seen order.
  void aggregate();
  const Aggregate* find(const std::string& setting, const std::string& method,
                        const std::string& op) const;
};

/// Mean and standard error (sample sd / sqrt(n); 0 when n < 2).
std::pair<double, double> mean_stderr(const std::vector<double>& values);

/// Records CSV (no timings, so reruns are byte-identical) and aggregate CSV.
void write_records_csv(std::ostream& out, const RunResult& result);
void write_aggregates_csv(std::ostream& out, const RunResult& result);

/// Runs jobs 0..count-1 on up to `threads` workers; results are stored by index.
void parallel_for(int count, int threads, const std::function<void(int)>& job);

RunResult run_synthetic_benchmark(const ExperimentConfig& config);

struct FrequencyPanel {
  std::string name;   // dense_lin, dense_non, sparse_lin, sparse_non
  double gamma = 0.0;
  Activation activation = Activation::Identity;
  Vector eigenvalues;
  Matrix coefficients;  // N x classes, from the first seed
  double top2_energy = 0.0;  // mean over seeds
};

/// Trains linear and nonlinear GNNs on the normalized operator for each gamma and
/// exports their frequency responses. Energy fractions are averaged over `trials` seeds.
std::vector<FrequencyPanel> run_frequency_analysis(const ExperimentConfig& config);

struct ConcentrationRow {
  double gamma = 0.0;
  int seed_index = 0;
  std::uint64_t seed = 0;
  int k = 0;
  double lambda_graph = 0.0;    // gamma * lambda_k(A)
  double lambda_kernel = 0.0;   // lambda_k(W) on the whole line
  double lambda_gap = 0.0;      // |gamma lambda_k(A) - lambda_k(W)|
  double lambda_gap_support = 0.0;  // against W restricted to the grid support
  double phi_gap = 0.0;
  double delta_k = 0.0;
  double bound_eigenvalue = 0.0;
  double bound_eigenvector = 0.0;
  double tail_mass = 0.0;
  double lipschitz = 0.0;
};

std::vector<ConcentrationRow> run_concentration_study(const ExperimentConfig& config);
/// Columns: gamma, seed, k, lambda_gap, phi_gap, delta_k, bound_val, bound_vec, then
/// seed_index, lambda_graph, lambda_kernel, lambda_gap_support, tail_mass, lipschitz.
void write_concentration_csv(std::ostream& out, const std::vector<ConcentrationRow>& rows);

RunResult run_real_benchmark(const ExperimentConfig& config, const Dataset& data);
/// Benchmark table: one row per setting and operator, one column per method, "mean(+-se)" in percent.
void write_table_csv(std::ostream& out, const RunResult& result);

struct InterpolateInstance {
  std::string label;
  Index nodes = 0;
  bool preconditions_ok = false;
  double min_coefficient = 0.0;
  double min_gap = 0.0;
  double residual = 0.0;  // NaN when not solved
  std::string diagnostic;
};

/// Random small graphs plus the forced K3 and x = v_1 cases; failures are reported.
std::vector<InterpolateInstance> run_interpolate_demo(const ExperimentConfig& config);
void write_interpolate_csv(std::ostream& out, const std::vector<InterpolateInstance>& rows);

/// JSON manifest: config echo, seed, versions, thread count, wall time.
void write_manifest(const std::filesystem::path& path, const ExperimentConfig& config,
                    const std::string& command, double wall_seconds,
                    const std::vector<std::string>& outputs);

}  // namespace dsgm
