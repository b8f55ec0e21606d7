#include "dsgm/gnn.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "dsgm/csv.hpp"
#include "dsgm/rng.hpp"

namespace dsgm {

namespace {

constexpr double kProbabilityFloor = 1e-12;

Matrix glorot(Index rows, Index cols, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Matrix W(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) W(i, j) = limit * (2.0 * rng.uniform() - 1.0);
  }
  return W;
}

// Inverted-dropout mask (kept entries scaled by 1/(1-p)); empty when not training.
Matrix dropout_mask(Index rows, Index cols, const ForwardMode& mode, std::uint64_t stream) {
  if (!mode.train || mode.dropout <= 0.0) return {};
  Rng rng = Rng(mode.seed).split(stream);
  const double keep = 1.0 / (1.0 - mode.dropout);
  Matrix M(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) M(i, j) = rng.uniform() < mode.dropout ? 0.0 : keep;
  }
  return M;
}

Matrix prelu(const Matrix& U, double slope) {
  return U.unaryExpr([slope](double v) { return v > 0.0 ? v : slope * v; });
}

void check_finite(const Matrix& M, const char* what) {
  if (!M.allFinite()) throw std::runtime_error(std::string("non-finite values in ") + what);
}

void check_mode(const ForwardMode& mode) {
  if (mode.train && !(mode.dropout >= 0.0 && mode.dropout < 1.0)) {
    throw std::invalid_argument("dropout rate must be in [0, 1)");
  }
}

struct LayerCache {
  std::vector<Matrix> powers;  // S^k X_{l-1}
  Matrix pre;                  // U_l
  Matrix mask;
};

template <class Operator>
ForwardResult forward_impl(const GnnModel& model, const Operator& S, const Matrix& X,
                           const ForwardMode& mode, std::vector<LayerCache>* caches) {
  check_mode(mode);
  if (model.taps.empty()) throw std::invalid_argument("gnn_forward: model has no layers");
  if (S.rows() != S.cols() || S.rows() != X.rows()) {
    throw std::invalid_argument("gnn_forward: operator is " + std::to_string(S.rows()) + "x" +
                                std::to_string(S.cols()) + " but features have " +
                                std::to_string(X.rows()) + " rows");
  }
  if (X.cols() != model.input_dim()) {
    throw std::invalid_argument("gnn_forward: expected " + std::to_string(model.input_dim()) +
                                " feature columns, got " + std::to_string(X.cols()));
  }
  Matrix current = X;
  for (Index l = 0; l < model.layers(); ++l) {
    const auto& bank = model.taps[l];
    LayerCache cache;
    Matrix power = current;
    Matrix U = power * bank[0];
    if (caches) cache.powers.push_back(power);
    for (std::size_t k = 1; k < bank.size(); ++k) {
      power = S * power;
      U.noalias() += power * bank[k];
      if (caches) cache.powers.push_back(power);
    }
    Matrix out = model.activation == Activation::PReLU ? prelu(U, model.slopes[l]) : U;
    Matrix mask = dropout_mask(out.rows(), out.cols(), mode, static_cast<std::uint64_t>(l));
    if (mask.size() > 0) out = out.cwiseProduct(mask);
    check_finite(out, "gnn layer output");
    if (caches) {
      cache.pre = std::move(U);
      cache.mask = std::move(mask);
      caches->push_back(std::move(cache));
    }
    current = std::move(out);
  }
  ForwardResult result;
  result.logits = current * model.classifier;
  result.probabilities = row_softmax(result.logits);
  result.embedding = std::move(current);
  return result;
}

// d(loss)/d(logits) for the clamped masked cross-entropy.
Matrix logit_gradient(const Matrix& P, const CommunityAssignment& Y, const TrainMask& mask,
                      double& loss) {
  Matrix G = Matrix::Zero(P.rows(), P.cols());
  const double m = static_cast<double>(mask.size());
  loss = 0.0;
  for (Index i : mask.indices()) {
    const int y = Y.label(i);
    const double p = P(i, y);
    loss -= std::log(std::max(p, kProbabilityFloor));
    if (p > kProbabilityFloor) {
      G.row(i) = P.row(i) / m;
      G(i, y) -= 1.0 / m;
    }
  }
  loss /= m;
  return G;
}

void check_labels(const Matrix& P, const CommunityAssignment& Y, const TrainMask& mask) {
  if (Y.size() != P.rows()) throw std::invalid_argument("labels do not match node count");
  if (Y.classes() != P.cols()) throw std::invalid_argument("labels do not match class count");
  for (Index i : mask.indices()) {
    if (i >= P.rows()) throw std::invalid_argument("mask index out of range");
  }
}

// Shared gradient-descent loop. `step(model, epoch_seed)` takes one update and
// `predict(model)` returns dropout-free probabilities for bookkeeping.
template <class Model, class Step, class Predict>
TrainResult<Model> descend(Model model, const TrainingSchedule& schedule,
                           const CommunityAssignment& Y, const TrainMask& mask,
                           const TrainMonitor& monitor, std::uint64_t seed, Step step,
                           Predict predict) {
  schedule.validate();
  TrainResult<Model> result;
  result.model = model;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  double best_val = -1.0;
  double previous = std::numeric_limits<double>::infinity();
  int stalled = 0;
  const Rng epochs(splitmix64(seed ^ 0x5eedULL));
  for (int epoch = 1; epoch <= schedule.max_epochs; ++epoch) {
    step(model, epochs.split(static_cast<std::uint64_t>(epoch)).seed());
    const Matrix P = predict(model);
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = masked_cross_entropy(P, Y, mask);
    if (!std::isfinite(rec.train_loss)) {
      throw TrainingDiverged("training loss became non-finite at epoch " + std::to_string(epoch));
    }
    rec.train_acc = accuracy(P, Y, mask.indices());
    rec.test_acc = monitor.test.empty() ? nan : accuracy(P, Y, monitor.test);
    rec.val_acc = monitor.validation.empty() ? nan : accuracy(P, Y, monitor.validation);
    result.history.push_back(rec);

    if (monitor.validation.empty()) {
      result.model = model;
      result.best_epoch = epoch;
    } else if (rec.val_acc > best_val) {
      best_val = rec.val_acc;
      result.model = model;
      result.best_epoch = epoch;
    }

    const double improvement =
        std::isfinite(previous) ? (previous - rec.train_loss) / std::max(std::abs(previous), 1e-300)
                                : std::numeric_limits<double>::infinity();
    stalled = improvement < schedule.tolerance ? stalled + 1 : 0;
    previous = rec.train_loss;
    if (stalled >= schedule.patience) break;
  }
  return result;
}

void append(std::vector<double>& out, const Matrix& M) {
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) out.push_back(M(i, j));
  }
}

void append(std::vector<double>& out, const Vector& v) {
  out.insert(out.end(), v.data(), v.data() + v.size());
}

void take(std::span<const double> values, std::size_t& pos, Matrix& M) {
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) M(i, j) = values[pos++];
  }
}

void take(std::span<const double> values, std::size_t& pos, Vector& v) {
  for (Index i = 0; i < v.size(); ++i) v(i) = values[pos++];
}

}  // namespace

void TrainingSchedule::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("learning rate must be non-negative");
  }
  if (max_epochs < 1) throw std::invalid_argument("max_epochs must be at least 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw std::invalid_argument("dropout must be in [0, 1)");
  if (tolerance < 0.0) throw std::invalid_argument("tolerance must be non-negative");
  if (patience < 1) throw std::invalid_argument("patience must be at least 1");
}

void GnnConfig::validate() const {
  if (layers < 1) throw std::invalid_argument("gnn needs at least one layer");
  if (taps < 1) throw std::invalid_argument("gnn needs at least one tap");
  if (static_cast<int>(hidden.size()) != layers) {
    throw std::invalid_argument("hidden widths (" + std::to_string(hidden.size()) +
                                ") must match layer count (" + std::to_string(layers) + ")");
  }
  for (int f : hidden) {
    if (f < 1) throw std::invalid_argument("hidden widths must be positive");
  }
  schedule.validate();
}

GnnModel GnnModel::initialize(const GnnConfig& config, Index input_dim, int classes, Rng& rng) {
  config.validate();
  if (input_dim < 1 || classes < 1) throw std::invalid_argument("gnn needs inputs and classes");
  GnnModel model;
  model.activation = config.activation;
  Index fan_in = input_dim;
  for (int l = 0; l < config.layers; ++l) {
    std::vector<Matrix> bank;
    for (int k = 0; k < config.taps; ++k) bank.push_back(glorot(fan_in, config.hidden[l], rng));
    model.taps.push_back(std::move(bank));
    model.slopes.push_back(config.prelu_init);
    fan_in = config.hidden[l];
  }
  model.classifier = glorot(fan_in, classes, rng);
  return model;
}

std::vector<double> GnnModel::parameters() const {
  std::vector<double> out;
  for (const auto& bank : taps) {
    for (const auto& H : bank) append(out, H);
  }
  if (activation == Activation::PReLU) out.insert(out.end(), slopes.begin(), slopes.end());
  append(out, classifier);
  return out;
}

void GnnModel::set_parameters(std::span<const double> values) {
  std::size_t pos = 0;
  for (auto& bank : taps) {
    for (auto& H : bank) take(values, pos, H);
  }
  if (activation == Activation::PReLU) {
    for (auto& a : slopes) a = values[pos++];
  }
  take(values, pos, classifier);
  if (pos != values.size()) throw std::invalid_argument("parameter vector has the wrong length");
}

void GnnModel::add_scaled(const GnnModel& other, double scale) {
  for (std::size_t l = 0; l < taps.size(); ++l) {
    for (std::size_t k = 0; k < taps[l].size(); ++k) taps[l][k] += scale * other.taps[l][k];
    if (activation == Activation::PReLU) slopes[l] += scale * other.slopes[l];
  }
  classifier += scale * other.classifier;
}

GnnModel GnnModel::zeros_like() const {
  GnnModel z = *this;
  for (auto& bank : z.taps) {
    for (auto& H : bank) H.setZero();
  }
  std::fill(z.slopes.begin(), z.slopes.end(), 0.0);
  z.classifier.setZero();
  return z;
}

MlpModel MlpModel::initialize(Index input_dim, int hidden, int classes, double prelu_init,
                              Rng& rng) {
  if (input_dim < 1 || hidden < 1 || classes < 1) {
    throw std::invalid_argument("mlp dimensions must be positive");
  }
  MlpModel m;
  m.w1 = glorot(input_dim, hidden, rng);
  m.b1 = Vector::Zero(hidden);
  m.slope = prelu_init;
  m.w2 = glorot(hidden, classes, rng);
  m.b2 = Vector::Zero(classes);
  return m;
}

std::vector<double> MlpModel::parameters() const {
  std::vector<double> out;
  append(out, w1);
  append(out, b1);
  out.push_back(slope);
  append(out, w2);
  append(out, b2);
  return out;
}

void MlpModel::set_parameters(std::span<const double> values) {
  std::size_t pos = 0;
  take(values, pos, w1);
  take(values, pos, b1);
  slope = values[pos++];
  take(values, pos, w2);
  take(values, pos, b2);
  if (pos != values.size()) throw std::invalid_argument("parameter vector has the wrong length");
}

void MlpModel::add_scaled(const MlpModel& other, double scale) {
  w1 += scale * other.w1;
  b1 += scale * other.b1;
  slope += scale * other.slope;
  w2 += scale * other.w2;
  b2 += scale * other.b2;
}

MlpModel MlpModel::zeros_like() const {
  MlpModel z;
  z.w1 = Matrix::Zero(w1.rows(), w1.cols());
  z.b1 = Vector::Zero(b1.size());
  z.slope = 0.0;
  z.w2 = Matrix::Zero(w2.rows(), w2.cols());
  z.b2 = Vector::Zero(b2.size());
  return z;
}

TrainMask::TrainMask(std::vector<Index> indices, Index node_count) : indices_(std::move(indices)) {
  if (indices_.empty()) throw std::invalid_argument("training mask is empty");
  std::vector<Index> sorted = indices_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("training mask has duplicate nodes");
  }
  if (sorted.front() < 0 || sorted.back() >= node_count) {
    throw std::invalid_argument("training mask index out of range");
  }
}

Matrix mask_features(const Matrix& X, const TrainMask& mask) {
  Matrix out = Matrix::Zero(X.rows(), X.cols());
  for (Index i : mask.indices()) out.row(i) = X.row(i);
  return out;
}

Matrix row_softmax(const Matrix& logits) {
  Matrix P(logits.rows(), logits.cols());
  for (Index i = 0; i < logits.rows(); ++i) {
    const double top = logits.row(i).maxCoeff();
    P.row(i) = (logits.row(i).array() - top).exp();
    P.row(i) /= P.row(i).sum();
  }
  return P;
}

ForwardResult gnn_forward(const GnnModel& model, const SparseMatrix& S, const Matrix& X,
                          const ForwardMode& mode) {
  return forward_impl(model, S, X, mode, nullptr);
}

ForwardResult gnn_forward(const GnnModel& model, const Matrix& S, const Matrix& X,
                          const ForwardMode& mode) {
  return forward_impl(model, S, X, mode, nullptr);
}

ForwardResult mlp_forward(const MlpModel& model, const Matrix& E, const ForwardMode& mode) {
  check_mode(mode);
  if (E.cols() != model.w1.rows()) {
    throw std::invalid_argument("mlp_forward: expected " + std::to_string(model.w1.rows()) +
                                " embedding columns, got " + std::to_string(E.cols()));
  }
  Matrix U = (E * model.w1).rowwise() + model.b1.transpose();
  Matrix H = prelu(U, model.slope);
  const Matrix mask = dropout_mask(H.rows(), H.cols(), mode, 0);
  if (mask.size() > 0) H = H.cwiseProduct(mask);
  ForwardResult r;
  r.logits = (H * model.w2).rowwise() + model.b2.transpose();
  check_finite(r.logits, "mlp logits");
  r.probabilities = row_softmax(r.logits);
  r.embedding = std::move(H);
  return r;
}

double masked_cross_entropy(const Matrix& probabilities, const CommunityAssignment& Y,
                            const TrainMask& mask) {
  check_labels(probabilities, Y, mask);
  if (mask.size() == 0) throw std::invalid_argument("training mask is empty");
  double loss = 0.0;
  for (Index i : mask.indices()) {
    loss -= std::log(std::max(probabilities(i, Y.label(i)), kProbabilityFloor));
  }
  return loss / static_cast<double>(mask.size());
}

double accuracy(const Matrix& scores, const CommunityAssignment& Y, std::span<const Index> nodes) {
  if (nodes.empty()) return std::numeric_limits<double>::quiet_NaN();
  Index correct = 0;
  for (Index i : nodes) {
    Index best = 0;
    for (Index c = 1; c < scores.cols(); ++c) {
      if (scores(i, c) > scores(i, best)) best = c;
    }
    if (best == Y.label(i)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(nodes.size());
}

double gnn_loss_and_gradient(const GnnModel& model, const SparseMatrix& S, const Matrix& X,
                             const CommunityAssignment& Y, const TrainMask& mask,
                             const ForwardMode& mode, GnnModel& gradient) {
  std::vector<LayerCache> caches;
  const ForwardResult fw = forward_impl(model, S, X, mode, &caches);
  check_labels(fw.probabilities, Y, mask);
  double loss = 0.0;
  const Matrix dlogits = logit_gradient(fw.probabilities, Y, mask, loss);

  gradient = model.zeros_like();
  gradient.classifier = fw.embedding.transpose() * dlogits;
  Matrix dout = dlogits * model.classifier.transpose();
  const SparseMatrix St = S.transpose();
  for (Index l = model.layers() - 1; l >= 0; --l) {
    const LayerCache& cache = caches[l];
    if (cache.mask.size() > 0) dout = dout.cwiseProduct(cache.mask);
    Matrix dU;
    if (model.activation == Activation::PReLU) {
      const double a = model.slopes[l];
      dU = dout;
      double dslope = 0.0;
      for (Index i = 0; i < dU.rows(); ++i) {
        for (Index j = 0; j < dU.cols(); ++j) {
          const double u = cache.pre(i, j);
          if (u <= 0.0) {
            dslope += dout(i, j) * u;
            dU(i, j) *= a;
          }
        }
      }
      gradient.slopes[l] = dslope;
    } else {
      dU = std::move(dout);
    }
    const auto& bank = model.taps[l];
    for (std::size_t k = 0; k < bank.size(); ++k) {
      gradient.taps[l][k] = cache.powers[k].transpose() * dU;
    }
    if (l > 0) {
      // Horner in S^T: sum_k (S^T)^k dU H_k^T.
      Matrix g = dU * bank.back().transpose();
      for (std::size_t k = bank.size() - 1; k-- > 0;) {
        g = St * g;
        g.noalias() += dU * bank[k].transpose();
      }
      dout = std::move(g);
    }
  }
  return loss;
}

double mlp_loss_and_gradient(const MlpModel& model, const Matrix& E, const CommunityAssignment& Y,
                             const TrainMask& mask, const ForwardMode& mode, MlpModel& gradient) {
  check_mode(mode);
  if (E.cols() != model.w1.rows()) throw std::invalid_argument("mlp: embedding width mismatch");
  const Matrix U = (E * model.w1).rowwise() + model.b1.transpose();
  Matrix H = prelu(U, model.slope);
  const Matrix dmask = dropout_mask(H.rows(), H.cols(), mode, 0);
  if (dmask.size() > 0) H = H.cwiseProduct(dmask);
  const Matrix logits = (H * model.w2).rowwise() + model.b2.transpose();
  check_finite(logits, "mlp logits");
  const Matrix P = row_softmax(logits);
  check_labels(P, Y, mask);
  double loss = 0.0;
  const Matrix dlogits = logit_gradient(P, Y, mask, loss);

  gradient = model.zeros_like();
  gradient.w2 = H.transpose() * dlogits;
  gradient.b2 = dlogits.colwise().sum().transpose();
  Matrix dH = dlogits * model.w2.transpose();
  if (dmask.size() > 0) dH = dH.cwiseProduct(dmask);
  double dslope = 0.0;
  for (Index i = 0; i < dH.rows(); ++i) {
    for (Index j = 0; j < dH.cols(); ++j) {
      if (U(i, j) <= 0.0) {
        dslope += dH(i, j) * U(i, j);
        dH(i, j) *= model.slope;
      }
    }
  }
  gradient.slope = dslope;
  gradient.w1 = E.transpose() * dH;
  gradient.b1 = dH.colwise().sum().transpose();
  return loss;
}

TrainResult<GnnModel> train_gnn(const GnnConfig& config, const SparseMatrix& S, const Matrix& X,
                                const CommunityAssignment& Y, const TrainMask& mask,
                                std::uint64_t seed, const TrainMonitor& monitor) {
  config.validate();
  if (Y.size() != X.rows()) throw std::invalid_argument("labels do not match feature rows");
  Rng init = Rng(seed).split(0);
  GnnModel model = GnnModel::initialize(config, X.cols(), Y.classes(), init);
  GnnModel grad;
  const double lr = config.schedule.learning_rate;
  const double rate = config.schedule.dropout;
  auto step = [&](GnnModel& m, std::uint64_t epoch_seed) {
    const double loss =
        gnn_loss_and_gradient(m, S, X, Y, mask, ForwardMode::training(rate, epoch_seed), grad);
    if (!std::isfinite(loss)) throw TrainingDiverged("gnn training loss became non-finite");
    m.add_scaled(grad, -lr);
  };
  auto predict = [&](const GnnModel& m) {
    try {
      return gnn_forward(m, S, X).probabilities;
    } catch (const std::runtime_error& e) {
      throw TrainingDiverged(std::string("gnn training diverged: ") + e.what());
    }
  };
  return descend(std::move(model), config.schedule, Y, mask, monitor, seed, step, predict);
}

TrainResult<MlpModel> train_se_classifier(const Embedding& embedding, const CommunityAssignment& Y,
                                          const TrainMask& mask, const MlpConfig& config,
                                          std::uint64_t seed, const TrainMonitor& monitor) {
  const Matrix& E = embedding.values;
  if (Y.size() != E.rows()) throw std::invalid_argument("labels do not match embedding rows");
  if (config.hidden < 1) throw std::invalid_argument("mlp hidden width must be positive");
  Rng init = Rng(seed).split(0);
  MlpModel model = MlpModel::initialize(E.cols(), config.hidden, Y.classes(), config.prelu_init, init);
  MlpModel grad;
  const double lr = config.schedule.learning_rate;
  const double rate = config.schedule.dropout;
  auto step = [&](MlpModel& m, std::uint64_t epoch_seed) {
    const double loss =
        mlp_loss_and_gradient(m, E, Y, mask, ForwardMode::training(rate, epoch_seed), grad);
    if (!std::isfinite(loss)) throw TrainingDiverged("mlp training loss became non-finite");
    m.add_scaled(grad, -lr);
  };
  auto predict = [&](const MlpModel& m) {
    try {
      return mlp_forward(m, E).probabilities;
    } catch (const std::runtime_error& e) {
      throw TrainingDiverged(std::string("mlp training diverged: ") + e.what());
    }
  };
  return descend(std::move(model), config.schedule, Y, mask, monitor, seed, step, predict);
}

Matrix model_frequency_response(const GnnModel& model, const SpectralDecomposition& decomp,
                                const Matrix& X) {
  const Matrix& V = decomp.eigenvectors;
  const Matrix S = V * decomp.eigenvalues.asDiagonal() * V.transpose();
  return gft(V, gnn_forward(model, S, X).logits);
}

Matrix model_frequency_response(const GnnModel& model, const SpectralDecomposition& decomp,
                                const Matrix& X, const SparseMatrix& S) {
  return gft(decomp.eigenvectors, gnn_forward(model, S, X).logits);
}

void write_history_csv(std::ostream& out, const std::vector<EpochRecord>& history) {
  CsvWriter csv(out);
  csv.row({"epoch", "train_loss", "train_acc", "test_acc"});
  for (const auto& r : history) {
    csv.row({std::to_string(r.epoch), format_double(r.train_loss), format_double(r.train_acc),
             std::isnan(r.test_acc) ? std::string() : format_double(r.test_acc)});
  }
}

namespace {

void write_tensor(std::ostream& out, const std::string& name, const Matrix& M) {
  out << name << ' ' << M.rows() << ' ' << M.cols() << '\n';
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) out << (j ? " " : "") << format_double(M(i, j));
    out << '\n';
  }
}

Matrix read_tensor(std::istream& in, const std::string& expected) {
  std::string name;
  Index rows = 0, cols = 0;
  if (!(in >> name >> rows >> cols) || name != expected || rows < 0 || cols < 0) {
    throw std::runtime_error("checkpoint: expected tensor '" + expected + "'");
  }
  Matrix M(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      std::string tok;
      if (!(in >> tok)) throw std::runtime_error("checkpoint: truncated tensor '" + expected + "'");
      M(i, j) = parse_double(tok, "checkpoint value");
    }
  }
  return M;
}

}  // namespace

void write_checkpoint(std::ostream& out, const GnnModel& model) {
  out << "dsgm-gnn 1\n";
  out << "activation " << (model.activation == Activation::PReLU ? "prelu" : "identity") << '\n';
  out << "layers " << model.layers() << " taps " << model.taps.front().size() << '\n';
  for (Index l = 0; l < model.layers(); ++l) {
    for (std::size_t k = 0; k < model.taps[l].size(); ++k) {
      write_tensor(out, "H" + std::to_string(l) + "_" + std::to_string(k), model.taps[l][k]);
    }
  }
  out << "slopes";
  for (double a : model.slopes) out << ' ' << format_double(a);
  out << '\n';
  write_tensor(out, "C", model.classifier);
}

GnnModel read_checkpoint(std::istream& in) {
  std::string magic, word, act;
  int version = 0;
  if (!(in >> magic >> version) || magic != "dsgm-gnn" || version != 1) {
    throw std::runtime_error("checkpoint: bad header");
  }
  if (!(in >> word >> act) || word != "activation" || (act != "prelu" && act != "identity")) {
    throw std::runtime_error("checkpoint: bad activation line");
  }
  Index layers = 0, taps = 0;
  std::string w2;
  if (!(in >> word >> layers >> w2 >> taps) || word != "layers" || w2 != "taps" || layers < 1 ||
      taps < 1) {
    throw std::runtime_error("checkpoint: bad shape line");
  }
  GnnModel model;
  model.activation = act == "prelu" ? Activation::PReLU : Activation::Identity;
  for (Index l = 0; l < layers; ++l) {
    std::vector<Matrix> bank;
    for (Index k = 0; k < taps; ++k) {
      bank.push_back(read_tensor(in, "H" + std::to_string(l) + "_" + std::to_string(k)));
    }
    model.taps.push_back(std::move(bank));
  }
  if (!(in >> word) || word != "slopes") throw std::runtime_error("checkpoint: missing slopes");
  for (Index l = 0; l < layers; ++l) {
    std::string tok;
    if (!(in >> tok)) throw std::runtime_error("checkpoint: truncated slopes");
    model.slopes.push_back(parse_double(tok, "checkpoint slope"));
  }
  model.classifier = read_tensor(in, "C");
  return model;
}

}  // namespace dsgm
