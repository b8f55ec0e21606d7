#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dsgm/graph.hpp"
#include "dsgm/spectra.hpp"
#include "dsgm/types.hpp"

namespace dsgm {

class Rng;

enum class Activation { PReLU, Identity };

/// Full-batch gradient descent schedule shared by the GNN and the SE classifier.
struct TrainingSchedule {
  double learning_rate = 0.02;
  int max_epochs = 200;
  double dropout = 0.5;
  /// Stop once the relative improvement of the (dropout-free) training loss stays
  /// below `tolerance` for `patience` consecutive epochs.
  double tolerance = 1e-5;
  int patience = 10;

  void validate() const;
};

struct GnnConfig {
  int layers = 2;
  int taps = 3;                 // powers 0 .. taps-1
  std::vector<int> hidden{16, 16};  // F_1 .. F_L
  Activation activation = Activation::PReLU;
  double prelu_init = 0.25;
  TrainingSchedule schedule;

  void validate() const;
};

/// Filter banks H[l][k] (F_{l-1} x F_l), one PReLU slope per layer, classifier C (F_L x classes).
struct GnnModel {
  std::vector<std::vector<Matrix>> taps;
  std::vector<double> slopes;
  Matrix classifier;
  Activation activation = Activation::PReLU;

  static GnnModel initialize(const GnnConfig& config, Index input_dim, int classes, Rng& rng);

  Index layers() const { return static_cast<Index>(taps.size()); }
  Index input_dim() const { return taps.front().front().rows(); }
  int classes() const { return static_cast<int>(classifier.cols()); }

  /// Flat view used for finite-difference checks: taps, then slopes (PReLU only), then C.
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> values);
  /// this += scale * other (same shapes).
  void add_scaled(const GnnModel& other, double scale);
  GnnModel zeros_like() const;
};

/// Hidden-layer MLP used as the spectral-embedding classifier.
struct MlpModel {
  Matrix w1;  // d x hidden
  Vector b1;
  double slope = 0.25;
  Matrix w2;  // hidden x classes
  Vector b2;

  static MlpModel initialize(Index input_dim, int hidden, int classes, double prelu_init, Rng& rng);

  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> values);
  void add_scaled(const MlpModel& other, double scale);
  MlpModel zeros_like() const;
};

/// Node subset used for the loss (the selection matrix M_T).
class TrainMask {
 public:
  TrainMask() = default;
  /// Throws std::invalid_argument for empty, duplicate or out-of-range indices.
  TrainMask(std::vector<Index> indices, Index node_count);

  const std::vector<Index>& indices() const { return indices_; }
  Index size() const { return static_cast<Index>(indices_.size()); }

 private:
  std::vector<Index> indices_;
};

/// Zeroes the feature rows of nodes outside the mask (the masked signal X_T).
Matrix mask_features(const Matrix& X, const TrainMask& mask);

struct ForwardMode {
  bool train = false;
  double dropout = 0.0;
  std::uint64_t seed = 0;

  static ForwardMode eval() { return {}; }
  static ForwardMode training(double dropout, std::uint64_t seed) { return {true, dropout, seed}; }
};

/// U = sum_k S^k X H_k by repeated operator products.
template <class Operator>
Matrix graph_filter(const Operator& S, const Matrix& X, std::span<const Matrix> taps) {
  if (taps.empty()) throw std::invalid_argument("graph_filter: no taps");
  if (S.rows() != S.cols() || S.cols() != X.rows()) {
    throw std::invalid_argument("graph_filter: operator and feature shapes disagree");
  }
  for (const auto& H : taps) {
    if (H.rows() != X.cols() || H.cols() != taps.front().cols()) {
      throw std::invalid_argument("graph_filter: tap shape mismatch");
    }
  }
  Matrix power = X;
  Matrix out = power * taps[0];
  for (std::size_t k = 1; k < taps.size(); ++k) {
    power = S * power;
    out.noalias() += power * taps[k];
  }
  return out;
}

Matrix row_softmax(const Matrix& logits);

struct ForwardResult {
  Matrix logits;
  Matrix probabilities;
  Matrix embedding;  // X_L
};

/// Layers of filter + activation, then logits = X_L C and row softmax. Dropout
/// (inverted scaling) acts on every layer output in training mode.
/// Throws std::invalid_argument on shape mismatch, std::runtime_error on non-finite activations.
ForwardResult gnn_forward(const GnnModel& model, const SparseMatrix& S, const Matrix& X,
                          const ForwardMode& mode = ForwardMode::eval());
ForwardResult gnn_forward(const GnnModel& model, const Matrix& S, const Matrix& X,
                          const ForwardMode& mode = ForwardMode::eval());

ForwardResult mlp_forward(const MlpModel& model, const Matrix& E,
                          const ForwardMode& mode = ForwardMode::eval());

/// Mean of -log(max(p, 1e-12)) for the true class over masked nodes.
double masked_cross_entropy(const Matrix& probabilities, const CommunityAssignment& Y,
                            const TrainMask& mask);

/// Argmax accuracy on `nodes`; ties resolve to the lowest class index.
double accuracy(const Matrix& scores, const CommunityAssignment& Y, std::span<const Index> nodes);

/// Loss and exact gradient with respect to every parameter.
double gnn_loss_and_gradient(const GnnModel& model, const SparseMatrix& S, const Matrix& X,
                             const CommunityAssignment& Y, const TrainMask& mask,
                             const ForwardMode& mode, GnnModel& gradient);
double mlp_loss_and_gradient(const MlpModel& model, const Matrix& E, const CommunityAssignment& Y,
                             const TrainMask& mask, const ForwardMode& mode, MlpModel& gradient);

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;  // dropout-free objective after the update
  double train_acc = 0.0;
  double test_acc = 0.0;    // NaN without a test set
  double val_acc = 0.0;     // NaN without a validation set
};

/// Optional held-out sets. With a validation set the returned model is the
/// checkpoint with the best validation accuracy (earliest on ties).
struct TrainMonitor {
  std::vector<Index> validation;
  std::vector<Index> test;
};

template <class Model>
struct TrainResult {
  Model model;
  std::vector<EpochRecord> history;
  int best_epoch = 0;
};

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Full-batch gradient descent on the masked cross-entropy.
/// Throws TrainingDiverged when the loss becomes non-finite.
TrainResult<GnnModel> train_gnn(const GnnConfig& config, const SparseMatrix& S, const Matrix& X,
                                const CommunityAssignment& Y, const TrainMask& mask,
                                std::uint64_t seed, const TrainMonitor& monitor = {});

struct MlpConfig {
  int hidden = 64;
  double prelu_init = 0.25;
  TrainingSchedule schedule;
};

TrainResult<MlpModel> train_se_classifier(const Embedding& embedding, const CommunityAssignment& Y,
                                          const TrainMask& mask, const MlpConfig& config,
                                          std::uint64_t seed, const TrainMonitor& monitor = {});

/// V^T applied to the model's logits, one column per class channel. The operator
/// is rebuilt as V diag(lambda) V^T; pass `S` to skip that reconstruction.
Matrix model_frequency_response(const GnnModel& model, const SpectralDecomposition& decomp,
                                const Matrix& X);
Matrix model_frequency_response(const GnnModel& model, const SpectralDecomposition& decomp,
                                const Matrix& X, const SparseMatrix& S);

/// Loss history as CSV: epoch,train_loss,train_acc,test_acc.
void write_history_csv(std::ostream& out, const std::vector<EpochRecord>& history);

/// Text checkpoint: "name rows cols" header per tensor followed by row-major values.
void write_checkpoint(std::ostream& out, const GnnModel& model);
GnnModel read_checkpoint(std::istream& in);

// Filter interpolation: a single graph convolution reproducing a target signal.

struct CoefficientCheck {
  bool ok = false;
  double min_coefficient = 0.0;     // min_i |[V^T x]_i|
  double min_gap = 0.0;             // min_{i != j} |lambda_i - lambda_j|
  double min_abs_eigenvalue = 0.0;  // reported; full rank is not required by the construction
  std::string violation;            // empty when ok
};

/// Checks that every spectral coefficient of x exceeds tol * |x| and every
/// eigenvalue gap exceeds tol * max(1, |lambda_1|).
CoefficientCheck spectral_coefficient_check(const SpectralDecomposition& decomp, const Vector& x,
                                            double tol);

class PreconditionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Taps h (length N) with sum_k h_k A^k x = y, from the Krylov system
/// [x, Ax, ..., A^{N-1}x] h = y solved by full-pivot elimination on a rescaled
/// operator with iterative refinement. Throws PreconditionError when the
/// spectral preconditions fail and std::runtime_error if the residual check fails.
Vector interpolate_filter(const Matrix& A, const Vector& x, const Vector& y, double tol = 1e-9);

/// sum_k h_k A^k x for a single signal.
Vector apply_filter(const Matrix& A, const Vector& x, std::span<const double> h);

}  // namespace dsgm
