#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dsgm/csv.hpp"
#include "dsgm/harness.hpp"

namespace dsgm {

namespace {

std::vector<double> parse_doubles(const std::string& value, const std::string& key) {
  std::vector<double> out;
  for (const auto& f : split(value, ',')) out.push_back(parse_double(trim(f), key));
  return out;
}

std::vector<int> parse_ints(const std::string& value, const std::string& key) {
  std::vector<int> out;
  for (const auto& f : split(value, ',')) out.push_back(static_cast<int>(parse_int(trim(f), key)));
  return out;
}

bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw std::invalid_argument(key + ": expected true/false, got '" + value + "'");
}

Activation parse_activation(const std::string& text) {
  if (text == "lin" || text == "linear" || text == "identity") return Activation::Identity;
  if (text == "non" || text == "prelu" || text == "nonlinear") return Activation::PReLU;
  throw std::invalid_argument("unknown activation '" + text + "'");
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "," : "") + parts[i];
  return out;
}

template <class T, class F>
std::string join_with(const std::vector<T>& values, F fmt) {
  std::vector<std::string> parts;
  for (const auto& v : values) parts.push_back(fmt(v));
  return join(parts);
}

std::string fmt_d(double v) { return format_double(v); }
std::string fmt_i(int v) { return std::to_string(v); }

}  // namespace

std::uint64_t parse_seed(const std::string& text) {
  std::uint64_t value = 0;
  const auto t = trim(text);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw std::invalid_argument("seed: expected an unsigned 64-bit integer, got '" + text + "'");
  }
  return value;
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::SyntheticBenchmark: return "synthetic_benchmark";
    case ExperimentKind::FrequencyAnalysis: return "frequency_analysis";
    case ExperimentKind::ConcentrationStudy: return "concentration_study";
    case ExperimentKind::RealBenchmark: return "real_benchmark";
    case ExperimentKind::InterpolateDemo: return "interpolate_demo";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& text) {
  for (auto k : {ExperimentKind::SyntheticBenchmark, ExperimentKind::FrequencyAnalysis,
                 ExperimentKind::ConcentrationStudy, ExperimentKind::RealBenchmark,
                 ExperimentKind::InterpolateDemo}) {
    if (to_string(k) == text) return k;
  }
  throw std::invalid_argument("unknown experiment kind '" + text + "'");
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  if (kind == ExperimentKind::RealBenchmark) {
    c.se_dims = {150, 200};
    c.se_kappa = -1;
    c.se.schedule.learning_rate = 0.01;
    c.gnn.schedule.learning_rate = 0.01;
    c.gnn.hidden = {32, 32};
  }
  if (kind == ExperimentKind::FrequencyAnalysis) {
    c.operators = {OperatorKind::NormalizedAdjacency};
    c.trials = 5;
  }
  return c;
}

const std::vector<std::pair<std::string, std::string>>& config_keys() {
  static const std::vector<std::pair<std::string, std::string>> keys = {
      {"experiment", "synthetic_benchmark | frequency_analysis | concentration_study | real_benchmark | interpolate_demo"},
      {"nodes", "synthetic graph size N"},
      {"gammas", "comma list of latent grid spacings"},
      {"kernel.p", "within-side block constant"},
      {"kernel.q", "cross-side block constant"},
      {"features.mean", "class-0 feature mean (class 1 uses the negation)"},
      {"features.variance", "isotropic feature variance"},
      {"operators", "comma list of adj, norm"},
      {"se.dims", "comma list of embedding sizes K"},
      {"se.kappa", "feature principal components (-1: same as K)"},
      {"se.scale", "scale embeddings by sqrt(N) before the MLP"},
      {"se.hidden", "MLP hidden width"},
      {"se.lr", "MLP learning rate"},
      {"se.epochs", "MLP max epochs"},
      {"se.dropout", "MLP dropout"},
      {"gnn.layers", "GNN layers L"},
      {"gnn.taps", "filter taps per layer (powers 0..taps-1)"},
      {"gnn.hidden", "hidden width, one value or one per layer"},
      {"gnn.lr", "GNN learning rate"},
      {"gnn.epochs", "GNN max epochs"},
      {"gnn.dropout", "GNN dropout"},
      {"gnn.variants", "comma list of lin, non"},
      {"gnn.mask_features", "zero the features of non-training nodes"},
      {"gnn.rescale_operator", "divide the operator by its spectral radius"},
      {"train.tolerance", "early-stopping relative improvement"},
      {"train.patience", "early-stopping patience in epochs"},
      {"concentration.k", "comma list of eigenvalue indices (1-based)"},
      {"concentration.lipschitz_grid", "grid size for the Lipschitz estimate"},
      {"data.edges", "edge list path"},
      {"data.features", "feature CSV path"},
      {"data.labels", "label CSV path"},
      {"data.splits", "split CSV path"},
      {"real.drop_fractions", "comma list of edge-drop fractions"},
      {"real.replicas", "sparsified replicas per nonzero fraction"},
      {"interpolate.instances", "random instances"},
      {"interpolate.min_nodes", "smallest random graph"},
      {"interpolate.max_nodes", "largest random graph"},
      {"interpolate.tol", "spectral coefficient tolerance"},
      {"seed", "master seed"},
      {"trials", "seeds per setting"},
      {"threads", "worker threads"},
      {"out", "output directory"},
  };
  return keys;
}

void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& v) {
  auto as_int = [&] { return static_cast<int>(parse_int(v, key)); };
  auto as_double = [&] { return parse_double(v, key); };
  if (key == "experiment") {
    const auto kind = parse_experiment_kind(v);
    if (kind != c.kind) throw std::invalid_argument("experiment: config is for '" + v + "'");
  } else if (key == "nodes") c.nodes = parse_int(v, key);
  else if (key == "gammas") c.gammas = parse_doubles(v, key);
  else if (key == "kernel.p") c.p = as_double();
  else if (key == "kernel.q") c.q = as_double();
  else if (key == "features.mean") c.feature_mean = parse_doubles(v, key);
  else if (key == "features.variance") c.feature_variance = as_double();
  else if (key == "operators") {
    c.operators.clear();
    for (const auto& f : split(v, ',')) c.operators.push_back(parse_operator_kind(std::string(trim(f))));
  } else if (key == "se.dims") c.se_dims = parse_ints(v, key);
  else if (key == "se.kappa") c.se_kappa = as_int();
  else if (key == "se.scale") c.se_scale = parse_bool(v, key);
  else if (key == "se.hidden") c.se.hidden = as_int();
  else if (key == "se.lr") c.se.schedule.learning_rate = as_double();
  else if (key == "se.epochs") c.se.schedule.max_epochs = as_int();
  else if (key == "se.dropout") c.se.schedule.dropout = as_double();
  else if (key == "gnn.layers") {
    c.gnn.layers = as_int();
    if (c.gnn.layers > 0) c.gnn.hidden.resize(c.gnn.layers, c.gnn.hidden.empty() ? 16 : c.gnn.hidden.back());
  } else if (key == "gnn.taps") c.gnn.taps = as_int();
  else if (key == "gnn.hidden") {
    auto widths = parse_ints(v, key);
    if (widths.size() == 1) widths.assign(std::max(c.gnn.layers, 1), widths.front());
    c.gnn.hidden = widths;
  } else if (key == "gnn.lr") c.gnn.schedule.learning_rate = as_double();
  else if (key == "gnn.epochs") c.gnn.schedule.max_epochs = as_int();
  else if (key == "gnn.dropout") c.gnn.schedule.dropout = as_double();
  else if (key == "gnn.variants") {
    c.gnn_variants.clear();
    for (const auto& f : split(v, ',')) c.gnn_variants.push_back(parse_activation(std::string(trim(f))));
  } else if (key == "gnn.mask_features") c.gnn_mask_features = parse_bool(v, key);
  else if (key == "gnn.rescale_operator") c.gnn_rescale_operator = parse_bool(v, key);
  else if (key == "train.tolerance") {
    c.gnn.schedule.tolerance = c.se.schedule.tolerance = as_double();
  } else if (key == "train.patience") {
    c.gnn.schedule.patience = c.se.schedule.patience = as_int();
  } else if (key == "concentration.k") c.concentration_k = parse_ints(v, key);
  else if (key == "concentration.lipschitz_grid") c.lipschitz_grid = parse_int(v, key);
  else if (key == "data.edges") c.edges_path = v;
  else if (key == "data.features") c.features_path = v;
  else if (key == "data.labels") c.labels_path = v;
  else if (key == "data.splits") c.splits_path = v;
  else if (key == "real.drop_fractions") c.drop_fractions = parse_doubles(v, key);
  else if (key == "real.replicas") c.replicas = as_int();
  else if (key == "interpolate.instances") c.interpolate_instances = as_int();
  else if (key == "interpolate.min_nodes") c.interpolate_min_nodes = parse_int(v, key);
  else if (key == "interpolate.max_nodes") c.interpolate_max_nodes = parse_int(v, key);
  else if (key == "interpolate.tol") c.interpolate_tol = as_double();
  else if (key == "seed") c.seed = parse_seed(v); else if (key == "trials") c.trials = as_int();
  else if (key == "threads") c.threads = as_int();
  else if (key == "out") c.out = v;
  else throw std::invalid_argument("unknown config key '" + key + "'");
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base) {
  std::string line;
  std::size_t lineno = 0;
  bool seen_setting = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key(trim(text.substr(0, eq)));
    const std::string value(trim(text.substr(eq + 1)));
    try {
      if (key == "experiment" && !seen_setting) {
        const auto kind = parse_experiment_kind(value);
        if (kind != base.kind) base = default_config(kind);
      } else {
        apply_setting(base, key, value);
      }
    } catch (const std::exception& e) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": " + e.what());
    }
    seen_setting = true;
  }
  return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  return parse_config(in, std::move(base));
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& key, const std::string& why) {
    throw std::invalid_argument(key + ": " + why);
  };
  if (trials < 1) fail("trials", "must be at least 1");
  if (threads < 1) fail("threads", "must be at least 1");
  if (nodes < 2) fail("nodes", "must be at least 2");
  if (gammas.empty()) fail("gammas", "empty");
  for (double g : gammas) {
    if (!(g > 0.0) || !std::isfinite(g)) fail("gammas", "must be positive");
  }
  if (!(p >= 0.0 && p <= 1.0)) fail("kernel.p", "must be in [0, 1]");
  if (!(q >= 0.0 && q <= 1.0)) fail("kernel.q", "must be in [0, 1]");
  if (feature_mean.empty()) fail("features.mean", "empty");
  if (!(feature_variance >= 0.0)) fail("features.variance", "must be non-negative");
  if (operators.empty()) fail("operators", "empty");
  for (int k : se_dims) {
    if (k < 1) fail("se.dims", "must be positive");
  }
  if (se_kappa < -1) fail("se.kappa", "must be -1 or non-negative");
  if (se.hidden < 1) fail("se.hidden", "must be positive");
  try {
    se.schedule.validate();
  } catch (const std::exception& e) {
    fail("se", e.what());
  }
  try {
    gnn.validate();
  } catch (const std::exception& e) {
    fail("gnn", e.what());
  }
  for (int k : concentration_k) {
    if (k < 1) fail("concentration.k", "indices are 1-based");
  }
  if (lipschitz_grid < 32) fail("concentration.lipschitz_grid", "must be at least 32");
  for (double f : drop_fractions) {
    if (!(f >= 0.0 && f < 1.0)) fail("real.drop_fractions", "must be in [0, 1)");
  }
  if (replicas < 1) fail("real.replicas", "must be at least 1");
  if (interpolate_min_nodes < 2 || interpolate_max_nodes < interpolate_min_nodes) {
    fail("interpolate.min_nodes", "need 2 <= min_nodes <= max_nodes");
  }
  if (interpolate_instances < 0) fail("interpolate.instances", "must be non-negative");
  if (kind == ExperimentKind::RealBenchmark) {
    for (const auto& [key, path] : {std::pair{"data.edges", edges_path},
                                    std::pair{"data.features", features_path},
                                    std::pair{"data.labels", labels_path},
                                    std::pair{"data.splits", splits_path}}) {
      if (path.empty()) fail(key, "required for real_benchmark");
      if (!std::filesystem::exists(path)) fail(key, "file not found: " + path);
    }
  }
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::entries() const {
  const auto ops = join_with(operators, [](OperatorKind k) { return to_string(k); });
  const auto variants =
      join_with(gnn_variants, [](Activation a) { return std::string(a == Activation::PReLU ? "non" : "lin"); });
  return {
      {"experiment", to_string(kind)},
      {"nodes", std::to_string(nodes)},
      {"gammas", join_with(gammas, fmt_d)},
      {"kernel.p", fmt_d(p)},
      {"kernel.q", fmt_d(q)},
      {"features.mean", join_with(feature_mean, fmt_d)},
      {"features.variance", fmt_d(feature_variance)},
      {"operators", ops},
      {"se.dims", join_with(se_dims, fmt_i)},
      {"se.kappa", std::to_string(se_kappa)},
      {"se.scale", se_scale ? "true" : "false"},
      {"se.hidden", std::to_string(se.hidden)},
      {"se.lr", fmt_d(se.schedule.learning_rate)},
      {"se.epochs", std::to_string(se.schedule.max_epochs)},
      {"se.dropout", fmt_d(se.schedule.dropout)},
      {"gnn.layers", std::to_string(gnn.layers)},
      {"gnn.taps", std::to_string(gnn.taps)},
      {"gnn.hidden", join_with(gnn.hidden, fmt_i)},
      {"gnn.lr", fmt_d(gnn.schedule.learning_rate)},
      {"gnn.epochs", std::to_string(gnn.schedule.max_epochs)},
      {"gnn.dropout", fmt_d(gnn.schedule.dropout)},
      {"gnn.variants", variants},
      {"gnn.mask_features", gnn_mask_features ? "true" : "false"},
      {"gnn.rescale_operator", gnn_rescale_operator ? "true" : "false"},
      {"train.tolerance", fmt_d(gnn.schedule.tolerance)},
      {"train.patience", std::to_string(gnn.schedule.patience)},
      {"concentration.k", join_with(concentration_k, fmt_i)},
      {"concentration.lipschitz_grid", std::to_string(lipschitz_grid)},
      {"data.edges", edges_path},
      {"data.features", features_path},
      {"data.labels", labels_path},
      {"data.splits", splits_path},
      {"real.drop_fractions", join_with(drop_fractions, fmt_d)},
      {"real.replicas", std::to_string(replicas)},
      {"interpolate.instances", std::to_string(interpolate_instances)},
      {"interpolate.min_nodes", std::to_string(interpolate_min_nodes)},
      {"interpolate.max_nodes", std::to_string(interpolate_max_nodes)},
      {"interpolate.tol", fmt_d(interpolate_tol)},
      {"seed", std::to_string(seed)},
      {"trials", std::to_string(trials)},
      {"threads", std::to_string(threads)},
      {"out", out},
  };
}

}  // namespace dsgm
