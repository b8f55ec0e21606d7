#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dsgm/csv.hpp"
#include "dsgm/graph.hpp"

namespace dsgm {

Graph read_edge_list(std::istream& in, std::optional<Index> node_count, EdgeListStats* stats) {
  EdgeListStats local;
  std::set<Edge> unique;
  std::string line;
  std::size_t number = 0;
  Index max_id = -1;
  std::optional<Index> header_nodes;
  while (std::getline(in, line)) {
    ++number;
    auto body = trim(line);
    // "# nodes <n> ..." written by write_edge_list carries the node count.
    if (!node_count && !header_nodes && body.rfind("# nodes ", 0) == 0) {
      std::istringstream header{std::string(body.substr(8))};
      long long n = 0;
      if (header >> n && n >= 0) header_nodes = n;
    }
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = trim(body.substr(0, hash));
    if (body.empty()) continue;
    std::istringstream fields{std::string(body)};
    long long i = 0;
    long long j = 0;
    std::string extra;
    if (!(fields >> i >> j) || (fields >> extra)) {
      throw std::runtime_error("edge list line " + std::to_string(number) + ": expected 'i j', got '" +
                               std::string(body) + "'");
    }
    if (i < 0 || j < 0) {
      throw std::runtime_error("edge list line " + std::to_string(number) + ": negative node id");
    }
    ++local.lines;
    if (i == j) {
      ++local.self_loops;
      continue;
    }
    max_id = std::max<Index>(max_id, std::max(i, j));
    if (node_count && std::max(i, j) >= *node_count) {
      throw std::runtime_error("edge list line " + std::to_string(number) + ": node id " +
                               std::to_string(std::max(i, j)) + " >= node count " +
                               std::to_string(*node_count));
    }
    if (!unique.emplace(std::min(i, j), std::max(i, j)).second) ++local.duplicates;
  }
  if (stats) *stats = local;
  Index n = node_count ? *node_count : max_id + 1;
  if (!node_count && header_nodes) {
    if (*header_nodes <= max_id) throw std::runtime_error("edge list: node id exceeds '# nodes' header");
    n = *header_nodes;
  }
  std::vector<Edge> edges(unique.begin(), unique.end());
  return Graph::from_edges(n, edges);
}

Graph read_edge_list(const std::string& path, std::optional<Index> node_count, EdgeListStats* stats) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list '" + path + "'");
  return read_edge_list(in, node_count, stats);
}

void write_edge_list(std::ostream& out, const Graph& graph) {
  out << "# nodes " << graph.node_count() << " edges " << graph.edge_count() << '\n';
  for (const auto& [i, j] : graph.edges()) out << i << ' ' << j << '\n';
}

void write_edge_list(const std::string& path, const Graph& graph) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write edge list '" + path + "'");
  write_edge_list(out, graph);
}

}  // namespace dsgm
