#pragma once

#include <cmath>
#include <cstdint>

#include "branchrate/asymptotics.hpp"
#include "branchrate/hs_catalog.hpp"
#include "branchrate/hypergraph.hpp"

namespace branchrate {

struct HsRunResult {
  std::vector<int> hitting_set;
  long recursion_steps = 0;
  uint64_t seed_used = 0;
};

// Randomized branching on the neighbors graph, driven by the catalog's
// per-entry distributions.
HsRunResult three_hs_run(const Hypergraph3& h, const Catalog& cat, uint64_t seed);

// The catalog recurrence: per entry, one term per hitting-set state, one
// pick-v state, plus the standalone singleton-edge row.
CompositeRecurrence build_recurrence_3hs(const Catalog& cat);

// The rule shape of one entry (options C_1..C_m then {v}).
RuleSpec entry_rule_spec(const CatalogEntry& entry, int delta);

struct HsApproxResult {
  HsRunResult best;
  bool success = false;
  bool certain_failure = false;
  long trials = 0;
  double dp_bound = 0.0;
};

HsApproxResult alpha_hs(const Hypergraph3& h, int k, double alpha, const Catalog& cat,
                        double repeat_multiplier, uint64_t seed,
                        long max_trials = 50'000'000);

struct CatalogOptimizeResult {
  double m = 0.0;  // max over entries
  size_t worst_entry = 0;
  double base() const { return std::exp(m); }
};

// Optimizes gamma per entry (independent rule optimization problems) and
// stores the results in the catalog.
CatalogOptimizeResult optimize_catalog_gammas(Catalog& cat, double alpha,
                                              double tol = 1e-7, int threads = 0);

}  // namespace branchrate
