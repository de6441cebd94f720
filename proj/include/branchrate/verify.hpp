#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "branchrate/graph.hpp"
#include "branchrate/hs_catalog.hpp"
#include "branchrate/hypergraph.hpp"
#include "branchrate/recurrence.hpp"
#include "branchrate/vc_solvers.hpp"

namespace branchrate {

// Exhaustive search with pruning; |V| <= 24.
int exact_min_cover(const Graph& g);

// |V| <= 20.
int exact_min_hitting_set(const Hypergraph3& h);

struct PlantedVc {
  Graph graph;
  std::vector<int> planted_cover;
  int k = 0;
  uint64_t seed = 0;
};

struct PlantedHs {
  Hypergraph3 hypergraph;
  std::vector<int> planted_cover;
  int k = 0;
  uint64_t seed = 0;
};

// k designated cover vertices; random edges touch the cover only, each cover
// vertex pushed to degree >= 3 where possible.
PlantedVc make_planted_vc(int n, int k, double extra_edge_density, uint64_t seed);

PlantedHs make_planted_hs(int n, int k, double extra_edge_density, uint64_t seed);

struct CheckReport {
  std::string name;
  bool pass = false;
  double observed = 0.0;
  double bound = 0.0;
  std::string detail;

  std::string line() const;  // "CHECK <name> PASS|FAIL observed=.. bound=.."
};

// Executable content of the lower-bound lemmas: empirical success frequency
// over `trials` seeded runs against the DP bound minus 3 sigma.
CheckReport monte_carlo_bound_check(VcAlgo algo, const PlantedVc& inst, const VcConfig& cfg,
                                    int b, int trials, uint64_t seed);
CheckReport monte_carlo_bound_check_hs(const PlantedHs& inst, const Catalog& cat, int b,
                                       int trials, uint64_t seed);

// Convergence of -(1/k) log p(floor(alpha k), k) toward M: gaps must be
// non-increasing along k_list and the final one at most `final_gap`.
CheckReport convergence_check(const CompositeRecurrence& rec, double alpha, double m,
                              const std::vector<int>& k_list, double final_gap = 0.03);

// Literal enumeration of all k-consistent rules mappings on histories of cost
// < b; the success probability of each mapping is accumulated by exhaustive
// path summation and the minimum returned. b,k <= 4, N <= 2, r_j <= 2.
double rules_mapping_infimum(const CompositeRecurrence& rec, int b, int k);

}  // namespace branchrate
