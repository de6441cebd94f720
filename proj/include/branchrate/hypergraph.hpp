#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace branchrate {

// 3-bounded hypergraph: distinct edges of 1..3 vertices over 0..n-1.
class Hypergraph3 {
 public:
  Hypergraph3() = default;
  explicit Hypergraph3(int n) : n_(n) {}

  int n() const { return n_; }
  const std::vector<std::vector<int>>& edges() const { return edges_; }
  void add_edge(std::vector<int> e);  // sorted+dedup internally, rejects dups
  int degree(int v) const;

  bool is_hitting_set(const std::vector<int>& s) const;

 private:
  int n_ = 0;
  std::vector<std::vector<int>> edges_;  // each sorted
};

// "p hs n m" header then "e v1 [v2 [v3]]" lines, 1-indexed.
Hypergraph3 hypergraph_from_text(std::istream& in);
Hypergraph3 hypergraph_from_file(const std::string& path);
void hypergraph_to_text(const Hypergraph3& h, std::ostream& out);

// Edge-size-<=2 hypergraph with no isolated vertices, vertices relabeled
// 0..v-1. Used for neighbors graphs and the catalog.
struct SmallHypergraph {
  int vertices = 0;
  std::vector<std::vector<int>> edges;  // each sorted, size 1..2, distinct

  bool operator==(const SmallHypergraph& o) const = default;
  void check_valid(int delta_cap) const;
  bool hits_all(const std::vector<int>& s) const;
};

// Neighbors graph of v: edges {e \ {v} : v in e}, plus the map from the new
// labels back to vertices of h.
struct InducedResult {
  SmallHypergraph graph;
  std::vector<int> to_host;  // new label -> vertex of h
};

InducedResult neighbors_graph(const Hypergraph3& h, int v);

// Induced graph of v and an edge subset f (indices into h.edges(), all
// containing v, none equal to {v}).
InducedResult induced_graph(const Hypergraph3& h, int v, const std::vector<int>& f);

}  // namespace branchrate
