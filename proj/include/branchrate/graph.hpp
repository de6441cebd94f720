#pragma once

#include <string>
#include <vector>

namespace branchrate {

// Undirected simple graph with sorted adjacency lists, vertices 0..n-1.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int n) : adj_(n) {}

  int n() const { return static_cast<int>(adj_.size()); }
  size_t edge_count() const;
  void add_edge(int u, int v);
  bool has_edge(int u, int v) const;
  int degree(int v) const { return static_cast<int>(adj_[v].size()); }
  const std::vector<int>& neighbors(int v) const { return adj_[v]; }

  // symmetry / no dup / no loop check
  void validate() const;

  bool is_vertex_cover(const std::vector<int>& cover) const;

 private:
  std::vector<std::vector<int>> adj_;
};

// DIMACS-like: "p edge n m" header then "e u v" lines, 1-indexed. Parse
// errors name the offending line.
Graph graph_from_dimacs(std::istream& in);
Graph graph_from_dimacs_file(const std::string& path);
void graph_to_dimacs(const Graph& g, std::ostream& out);

}  // namespace branchrate
