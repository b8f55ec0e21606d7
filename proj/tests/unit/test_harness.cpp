#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dsgm/csv.hpp"
#include "dsgm/harness.hpp"
#include "dsgm/rng.hpp"

using namespace dsgm;
namespace fs = std::filesystem;

namespace {

const fs::path kTiny = fs::path(DSGM_FIXTURES) / "tiny";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("dsgm_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ExperimentConfig tiny_synthetic() {
  auto c = default_config(ExperimentKind::SyntheticBenchmark);
  c.nodes = 60;
  c.gammas = {0.05};
  c.se_dims = {2};
  c.trials = 3;
  c.gnn.schedule.max_epochs = 15;
  c.se.schedule.max_epochs = 15;
  return c;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("config parsing") {
  std::istringstream in(
      "# synthetic sweep\n"
      "experiment = synthetic_benchmark\n"
      "nodes = 200\n"
      "gammas = 0.002, 0.01\n"
      "operators = norm\n"
      "gnn.hidden = 8,4\n"
      "gnn.variants = non\n"
      "seed = 18446744073709551615\n");
  const auto c = parse_config(in, ExperimentConfig{});
  CHECK(c.nodes == 200);
  CHECK(c.gammas == std::vector<double>{0.002, 0.01});
  CHECK(c.operators == std::vector<OperatorKind>{OperatorKind::NormalizedAdjacency});
  CHECK(c.gnn.hidden == std::vector<int>{8, 4});
  CHECK(c.gnn_variants == std::vector<Activation>{Activation::PReLU});
  CHECK(c.seed == 18446744073709551615ULL);

  // entries() re-parses to the same configuration
  std::ostringstream echo;
  for (const auto& [k, v] : c.entries()) echo << k << " = " << v << "\n";
  std::istringstream back(echo.str());
  CHECK(parse_config(back, ExperimentConfig{}).entries() == c.entries());

  std::istringstream real("experiment = real_benchmark\n");
  const auto r = parse_config(real, ExperimentConfig{});
  CHECK(r.se_dims == std::vector<int>{150, 200});
  CHECK(r.se.schedule.learning_rate == 0.01);
}

TEST_CASE("config errors name the line") {
  auto fails_with = [](const std::string& text, const std::string& needle) {
    std::istringstream in(text);
    try {
      parse_config(in, ExperimentConfig{});
    } catch (const std::exception& e) {
      const std::string msg = e.what();
      CHECK_MESSAGE(msg.find(needle) != std::string::npos, msg);
      return;
    }
    FAIL("no error for: " << text);
  };
  fails_with("nodes = 10\nbogus = 1\n", "line 2");
  fails_with("nodes = ten\n", "line 1");
  std::istringstream zero("trials = 0\n");
  const auto parsed = parse_config(zero, ExperimentConfig{});
  CHECK_THROWS_WITH(parsed.validate(), doctest::Contains("trials"));
  fails_with("operators = lap\n", "line 1");
  fails_with("seed = -1\n", "seed");
  CHECK_THROWS(parse_seed("12x"));
  CHECK(parse_seed(" 42 ") == 42);
}

TEST_CASE("community halves split each class evenly") {
  std::vector<int> labels;
  for (int i = 0; i < 101; ++i) labels.push_back(i % 3 == 0 ? 0 : 1);
  const CommunityAssignment Y(labels, 2);
  const auto s = community_halves(Y, 5);
  CHECK(s.train.size() + s.test.size() == 101);
  CHECK(s.validation.empty());
  for (int k = 0; k < 2; ++k) {
    const auto members = Y.members(k);
    Index in_train = 0;
    for (Index i : s.train) in_train += Y.label(i) == k;
    CHECK(std::abs(2 * in_train - static_cast<Index>(members.size())) <= 1);
  }
  CHECK(std::is_sorted(s.train.begin(), s.train.end()));
  CHECK(community_halves(Y, 5).train == s.train);
  CHECK(community_halves(Y, 6).train != s.train);
}

TEST_CASE("aggregates equal recomputed mean and standard error") {
  CHECK(mean_stderr({1.0}).first == 1.0);
  CHECK(mean_stderr({1.0}).second == 0.0);
  const auto [m, se] = mean_stderr({0.5, 0.7, 0.9});
  CHECK(m == doctest::Approx(0.7));
  CHECK(se == doctest::Approx(0.2 / std::sqrt(3.0)));

  RunResult r;
  Rng rng(1);
  for (int t = 0; t < 17; ++t) {
    for (const char* method : {"SE(2)", "GNN(non)"}) {
      TrialRecord rec;
      rec.setting = t % 2 ? "gamma=0.01" : "gamma=0.002";
      rec.method = method;
      rec.op = "adj";
      rec.trial = t;
      rec.test_acc = rng.uniform();
      r.records.push_back(rec);
    }
  }
  r.aggregate();
  REQUIRE(r.aggregates.size() == 4);
  for (const auto& a : r.aggregates) {
    std::vector<double> xs;
    for (const auto& rec : r.records)
      if (rec.setting == a.setting && rec.method == a.method && rec.op == a.op) xs.push_back(rec.test_acc);
    double mean = 0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double se_ref = std::sqrt(ss / static_cast<double>(xs.size() - 1)) / std::sqrt(static_cast<double>(xs.size()));
    CHECK(a.count == static_cast<Index>(xs.size()));
    CHECK(std::abs(a.mean - mean) <= 1e-12);
    CHECK(std::abs(a.stderr_ - se_ref) <= 1e-12);
  }
  CHECK(r.find("gamma=0.01", "SE(2)", "adj") != nullptr);
  CHECK(r.find("gamma=0.01", "SE(9)", "adj") == nullptr);
}

TEST_CASE("tiny fixture loads and round-trips bit-exactly") {
  const auto d = load_dataset((kTiny / "edges.txt").string(), (kTiny / "features.csv").string(),
                              (kTiny / "labels.csv").string(), (kTiny / "splits.csv").string());
  CHECK(d.node_count() == 4);
  CHECK(d.feature_dim() == 2);
  CHECK(d.classes() == 2);
  CHECK(d.mean_degree() == doctest::Approx(2.0));
  REQUIRE(d.splits.size() == 2);
  CHECK(d.splits[0].train == std::vector<Index>{0, 3});
  CHECK(d.splits[1].test == std::vector<Index>{3});

  const auto dir = scratch("roundtrip");
  save_dataset(d, dir);
  for (const char* f : {"edges.txt", "features.csv", "labels.csv", "splits.csv"}) {
    CHECK_MESSAGE(slurp(dir / f) == slurp(kTiny / f), f);
  }
  const auto again = load_dataset((dir / "edges.txt").string(), (dir / "features.csv").string(),
                                  (dir / "labels.csv").string(), (dir / "splits.csv").string());
  CHECK(again.features == d.features);
  CHECK(again.labels.labels() == d.labels.labels());
  fs::remove_all(dir);
}

TEST_CASE("dataset load errors") {
  const auto dir = scratch("errors");
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream(dir / name) << text;
    return (dir / name).string();
  };
  const auto edges = (kTiny / "edges.txt").string();
  const auto feats = (kTiny / "features.csv").string();
  const auto labels = (kTiny / "labels.csv").string();
  const auto splits = (kTiny / "splits.csv").string();

  CHECK_THROWS_WITH_AS(load_dataset(edges, write("f.csv", "1,2\n3,x\n0,0\n1,1\n"), labels, splits),
                       doctest::Contains("line 2"), std::runtime_error);
  CHECK_THROWS(load_dataset(edges, write("f3.csv", "1,2\n3,4\n0,0\n"), labels, splits));
  CHECK_THROWS(load_dataset(edges, feats, write("l.csv", "1,1\n0,1\n1,0\n0,1\n"), splits));
  CHECK_THROWS(load_dataset(edges, feats, labels, write("s.csv", "9,0,train\n")));
  CHECK_THROWS(load_dataset(edges, feats, labels, write("s2.csv", "0,0,train\n0,0,test\n")));
  CHECK_THROWS(load_dataset(edges, feats, labels, write("s3.csv", "0,0,holdout\n")));
  CHECK_THROWS(load_dataset((dir / "missing.txt").string(), feats, labels, splits));
  fs::remove_all(dir);
}

TEST_CASE("labels accept integer ids or one-hot rows") {
  std::istringstream ints("0\n2\n1\n");
  CHECK(read_labels_csv(ints).labels() == std::vector<int>{0, 2, 1});
  std::istringstream hot("1,0\n0,1\n");
  CHECK(read_labels_csv(hot).labels() == std::vector<int>{0, 1});
}

TEST_CASE("synthetic benchmark is invariant to thread count") {
  auto c = tiny_synthetic();
  c.threads = 1;
  const auto a = run_synthetic_benchmark(c);
  c.threads = 3;
  const auto b = run_synthetic_benchmark(c);
  std::ostringstream ra, rb, sa, sb;
  write_records_csv(ra, a);
  write_records_csv(rb, b);
  write_aggregates_csv(sa, a);
  write_aggregates_csv(sb, b);
  CHECK(ra.str() == rb.str());
  CHECK(sa.str() == sb.str());
  // 1 gamma x 3 trials x 2 operators x (SE(2) + 2 GNN variants)
  CHECK(a.records.size() == 18);
  for (const auto& r : a.records) {
    CHECK(r.test_acc >= 0.0);
    CHECK(r.test_acc <= 1.0);
  }
}

TEST_CASE("synthetic instances follow the split contract") {
  const auto c = tiny_synthetic();
  const auto inst = synthetic_instance(c, 0.05, 1);
  CHECK(inst.graph.node_count() == 60);
  CHECK(inst.features.rows() == 60);
  CHECK(inst.split.train.size() == 30);
  CHECK(inst.split.test.size() == 30);
  const auto again = synthetic_instance(c, 0.05, 1);
  CHECK(again.graph.edges() == inst.graph.edges());
  CHECK(again.features == inst.features);
}

TEST_CASE("concentration study repeats identical rows for a duplicated gamma") {
  auto c = default_config(ExperimentKind::ConcentrationStudy);
  c.nodes = 120;
  c.gammas = {0.05, 0.05};
  c.trials = 2;
  c.lipschitz_grid = 41;
  const auto rows = run_concentration_study(c);
  REQUIRE(rows.size() == 8);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(rows[i].seed == rows[i + 4].seed);
    CHECK(rows[i].lambda_gap == rows[i + 4].lambda_gap);
    CHECK(rows[i].phi_gap == rows[i + 4].phi_gap);
    CHECK(rows[i].lambda_gap >= 0.0);
  }
  std::ostringstream out;
  write_concentration_csv(out, rows);
  std::istringstream in(out.str());
  const auto csv = read_csv(in);
  REQUIRE(csv.size() == 9);
  const std::vector<std::string> head(csv[0].fields.begin(), csv[0].fields.begin() + 8);
  CHECK(head == std::vector<std::string>{"gamma", "seed", "k", "lambda_gap", "phi_gap", "delta_k", "bound_val",
                                         "bound_vec"});
}

TEST_CASE("frequency analysis panels") {
  auto c = default_config(ExperimentKind::FrequencyAnalysis);
  c.nodes = 50;
  c.gammas = {0.002, 0.05};
  c.trials = 1;
  c.gnn.schedule.max_epochs = 10;
  const auto panels = run_frequency_analysis(c);
  REQUIRE(panels.size() == 4);
  CHECK(panels[0].name == "dense_lin");
  for (const auto& p : panels) {
    CHECK(p.eigenvalues.size() == 50);
    CHECK(p.coefficients.rows() == 50);
    for (Index i = 1; i < 50; ++i) CHECK(p.eigenvalues(i) <= p.eigenvalues(i - 1));
    CHECK(p.top2_energy >= 0.0);
    CHECK(p.top2_energy <= 1.0 + 1e-12);
  }
}

TEST_CASE("interpolate demo reports diagnostics without throwing") {
  auto c = default_config(ExperimentKind::InterpolateDemo);
  c.interpolate_instances = 10;
  const auto rows = run_interpolate_demo(c);
  bool saw_k3 = false;
  for (const auto& r : rows) {
    if (r.preconditions_ok) {
      CHECK(r.residual <= 1e-8);
      CHECK(r.min_coefficient > 0.0);
    }
    if (r.label == "K3") {
      saw_k3 = true;
      CHECK(!r.preconditions_ok);
      CHECK(r.min_gap < 1e-12);
      CHECK(r.diagnostic.find("repeated eigenvalue") != std::string::npos);
    }
  }
  CHECK(saw_k3);
  std::ostringstream out;
  write_interpolate_csv(out, rows);
  CHECK(out.str().find("min_coefficient") != std::string::npos);
}

TEST_CASE("manifest records the run") {
  const auto dir = scratch("manifest");
  auto c = tiny_synthetic();
  write_manifest(dir / "manifest.json", c, "bench-synthetic", 1.5, {"records.csv"});
  const auto text = slurp(dir / "manifest.json");
  CHECK(text.find("\"seed\"") != std::string::npos);
  CHECK(text.find("bench-synthetic") != std::string::npos);
  CHECK(text.find("records.csv") != std::string::npos);
  fs::remove_all(dir);
}

}
