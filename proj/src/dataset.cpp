#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "dsgm/csv.hpp"
#include "dsgm/harness.hpp"
#include "dsgm/rng.hpp"

namespace dsgm {

namespace {

std::ifstream open_input(const std::string& path, const std::string& what) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + what + " file '" + path + "'");
  return in;
}

std::string at_line(const CsvRecord& r) { return "line " + std::to_string(r.line) + ": "; }

}  // namespace

double Dataset::mean_degree() const {
  const Index n = graph.node_count();
  return n == 0 ? 0.0 : 2.0 * static_cast<double>(graph.edge_count()) / static_cast<double>(n);
}

Matrix read_matrix_csv(std::istream& in, const std::string& what) {
  const auto records = read_csv(in);
  if (records.empty()) throw std::runtime_error(what + ": no rows");
  const std::size_t cols = records.front().fields.size();
  Matrix M(static_cast<Index>(records.size()), static_cast<Index>(cols));
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.fields.size() != cols) {
      throw std::runtime_error(what + " " + at_line(r) + "expected " + std::to_string(cols) +
                               " columns, got " + std::to_string(r.fields.size()));
    }
    for (std::size_t j = 0; j < cols; ++j) {
      try {
        M(static_cast<Index>(i), static_cast<Index>(j)) = parse_double(r.fields[j], what);
      } catch (const std::invalid_argument& e) {
        throw std::runtime_error(what + " " + at_line(r) + e.what());
      }
    }
  }
  return M;
}

void write_matrix_csv(std::ostream& out, const Matrix& M) {
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) out << (j ? "," : "") << format_double(M(i, j));
    out << '\n';
  }
}

CommunityAssignment read_labels_csv(std::istream& in) {
  const auto records = read_csv(in);
  if (records.empty()) throw std::runtime_error("labels: no rows");
  if (records.front().fields.size() == 1) {
    std::vector<int> labels;
    int classes = 0;
    for (const auto& r : records) {
      if (r.fields.size() != 1) throw std::runtime_error("labels " + at_line(r) + "expected one column");
      long long v = 0;
      try {
        v = parse_int(r.fields[0], "label");
      } catch (const std::invalid_argument& e) {
        throw std::runtime_error("labels " + at_line(r) + e.what());
      }
      if (v < 0) throw std::runtime_error("labels " + at_line(r) + "negative label");
      labels.push_back(static_cast<int>(v));
      classes = std::max(classes, static_cast<int>(v) + 1);
    }
    return CommunityAssignment(std::move(labels), classes);
  }
  std::stringstream copy;
  for (const auto& r : records) {
    for (std::size_t j = 0; j < r.fields.size(); ++j) copy << (j ? "," : "") << r.fields[j];
    copy << '\n';
  }
  const Matrix Y = read_matrix_csv(copy, "labels");
  try {
    return CommunityAssignment::from_one_hot(Y);
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("labels: ") + e.what());
  }
}

std::vector<DataSplit> read_splits_csv(std::istream& in, Index node_count) {
  std::map<long long, DataSplit> by_id;
  for (const auto& r : read_csv(in)) {
    if (r.fields.size() != 3) throw std::runtime_error("splits " + at_line(r) + "expected node,split_id,role");
    long long node = 0, id = 0;
    try {
      node = parse_int(r.fields[0], "node");
      id = parse_int(r.fields[1], "split_id");
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("splits " + at_line(r) + e.what());
    }
    if (node < 0 || node >= node_count) {
      throw std::runtime_error("splits " + at_line(r) + "node " + std::to_string(node) + " out of range");
    }
    if (id < 0) throw std::runtime_error("splits " + at_line(r) + "negative split id");
    auto& s = by_id[id];
    const auto& role = r.fields[2];
    if (role == "train") s.train.push_back(node);
    else if (role == "val" || role == "validation") s.validation.push_back(node);
    else if (role == "test") s.test.push_back(node);
    else throw std::runtime_error("splits " + at_line(r) + "unknown role '" + role + "'");
  }
  std::vector<DataSplit> out;
  long long expected = 0;
  for (auto& [id, s] : by_id) {
    if (id != expected++) throw std::runtime_error("splits: split ids must be 0.." + std::to_string(by_id.size() - 1));
    for (auto* set : {&s.train, &s.validation, &s.test}) std::sort(set->begin(), set->end());
    std::vector<Index> all;
    for (auto* set : {&s.train, &s.validation, &s.test}) all.insert(all.end(), set->begin(), set->end());
    std::sort(all.begin(), all.end());
    if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
      throw std::runtime_error("splits: split " + std::to_string(id) + " lists a node twice");
    }
    if (s.train.empty()) throw std::runtime_error("splits: split " + std::to_string(id) + " has no training nodes");
    out.push_back(std::move(s));
  }
  if (out.empty()) throw std::runtime_error("splits: no rows");
  return out;
}

void write_splits_csv(std::ostream& out, const std::vector<DataSplit>& splits) {
  for (std::size_t id = 0; id < splits.size(); ++id) {
    for (Index i : splits[id].train) out << i << ',' << id << ",train\n";
    for (Index i : splits[id].validation) out << i << ',' << id << ",val\n";
    for (Index i : splits[id].test) out << i << ',' << id << ",test\n";
  }
}

Dataset load_dataset(const std::string& edges, const std::string& features,
                     const std::string& labels, const std::string& splits) {
  Dataset d;
  {
    auto in = open_input(features, "features");
    d.features = read_matrix_csv(in, "features");
  }
  {
    auto in = open_input(labels, "labels");
    d.labels = read_labels_csv(in);
  }
  const Index n = d.features.rows();
  if (d.labels.size() != n) {
    throw std::runtime_error("labels have " + std::to_string(d.labels.size()) + " rows but features have " +
                             std::to_string(n));
  }
  {
    auto in = open_input(edges, "edge list");
    d.graph = read_edge_list(in, n);
  }
  {
    auto in = open_input(splits, "splits");
    d.splits = read_splits_csv(in, n);
  }
  return d;
}

void save_dataset(const Dataset& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_edge_list((dir / "edges.txt").string(), data.graph);
  {
    std::ofstream out(dir / "features.csv");
    write_matrix_csv(out, data.features);
  }
  {
    std::ofstream out(dir / "labels.csv");
    for (int y : data.labels.labels()) out << y << '\n';
  }
  std::ofstream out(dir / "splits.csv");
  write_splits_csv(out, data.splits);
}

DataSplit community_halves(const CommunityAssignment& Y, std::uint64_t seed) {
  DataSplit s;
  const Rng base(seed);
  for (int k = 0; k < Y.classes(); ++k) {
    auto members = Y.members(k);
    Rng rng = base.split(static_cast<std::uint64_t>(k));
    rng.shuffle(members);
    const std::size_t half = (members.size() + 1) / 2;
    s.train.insert(s.train.end(), members.begin(), members.begin() + half);
    s.test.insert(s.test.end(), members.begin() + half, members.end());
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

}  // namespace dsgm
