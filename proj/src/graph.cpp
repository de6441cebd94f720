#include "branchrate/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace branchrate {

size_t Graph::edge_count() const {
  size_t s = 0;
  for (const auto& a : adj_) s += a.size();
  return s / 2;
}

void Graph::add_edge(int u, int v) {
  if (u == v) throw std::invalid_argument("Graph: self-loop");
  if (u < 0 || v < 0 || u >= n() || v >= n()) throw std::out_of_range("Graph: vertex out of range");
  if (has_edge(u, v)) return;
  adj_[u].insert(std::lower_bound(adj_[u].begin(), adj_[u].end(), v), v);
  adj_[v].insert(std::lower_bound(adj_[v].begin(), adj_[v].end(), u), u);
}

bool Graph::has_edge(int u, int v) const {
  const auto& a = adj_[u];
  return std::binary_search(a.begin(), a.end(), v);
}

void Graph::validate() const {
  for (int v = 0; v < n(); ++v) {
    const auto& a = adj_[v];
    if (!std::is_sorted(a.begin(), a.end())) throw std::logic_error("Graph: unsorted adjacency");
    if (std::adjacent_find(a.begin(), a.end()) != a.end())
      throw std::logic_error("Graph: duplicate neighbor");
    for (int u : a) {
      if (u == v) throw std::logic_error("Graph: self-loop");
      if (!has_edge(u, v)) throw std::logic_error("Graph: asymmetric adjacency");
    }
  }
}

bool Graph::is_vertex_cover(const std::vector<int>& cover) const {
  std::vector<char> in(n(), 0);
  for (int v : cover) {
    if (v < 0 || v >= n()) return false;
    in[v] = 1;
  }
  for (int v = 0; v < n(); ++v)
    for (int u : adj_[v])
      if (u > v && !in[v] && !in[u]) return false;
  return true;
}

Graph graph_from_dimacs(std::istream& in) {
  std::string line;
  int lineno = 0;
  int n = -1;
  long m_declared = -1, m_seen = 0;
  Graph g;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag)) continue;
    if (tag == "c") continue;
    if (tag == "p") {
      std::string fmt;
      if (!(ss >> fmt >> n >> m_declared) || fmt != "edge" || n < 0)
        throw std::runtime_error("dimacs: bad problem line at line " + std::to_string(lineno));
      g = Graph(n);
    } else if (tag == "e") {
      if (n < 0) throw std::runtime_error("dimacs: edge before problem line at line " +
                                          std::to_string(lineno));
      int u, v;
      if (!(ss >> u >> v) || u < 1 || v < 1 || u > n || v > n || u == v)
        throw std::runtime_error("dimacs: bad edge at line " + std::to_string(lineno));
      g.add_edge(u - 1, v - 1);
      ++m_seen;
    } else {
      throw std::runtime_error("dimacs: unknown record '" + tag + "' at line " +
                               std::to_string(lineno));
    }
  }
  if (n < 0) throw std::runtime_error("dimacs: missing problem line");
  (void)m_seen;  // duplicate edges are merged, so the count may legally differ
  return g;
}

Graph graph_from_dimacs_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  return graph_from_dimacs(f);
}

void graph_to_dimacs(const Graph& g, std::ostream& out) {
  out << "p edge " << g.n() << ' ' << g.edge_count() << '\n';
  for (int v = 0; v < g.n(); ++v)
    for (int u : g.neighbors(v))
      if (u > v) out << "e " << v + 1 << ' ' << u + 1 << '\n';
}

}  // namespace branchrate
