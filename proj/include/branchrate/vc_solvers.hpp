#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "branchrate/asymptotics.hpp"
#include "branchrate/graph.hpp"
#include "branchrate/recurrence.hpp"

namespace branchrate {

enum class VcAlgo { Vc3, Vc3Star, EnhancedVc3Star, BetterVc };

VcAlgo vc_algo_from_name(const std::string& name);
std::string vc_algo_name(VcAlgo a);

// Everything the four algorithms and their recurrences are parameterized by.
struct VcConfig {
  int delta_cap = 100;                     // Delta
  std::optional<int> excluded_degree;      // delta of EnhancedVC3*
  std::map<int, double> gamma_by_degree;   // d -> gamma_d in (0,1)
  std::map<int, double> lambda1;           // r in 3..7
  std::map<int, double> lambda2;           // r in 3..4
  double lambda3 = 0.5;
  std::map<int, std::array<double, 3>> delta3way;  // r in 5..7
  uint64_t rng_seed = 1;

  void check(VcAlgo algo) const;  // completeness for the given algorithm
};

// Fills every distribution of cfg with the optimizer's values for the given
// ratio: gamma_d from the per-degree simple rules, lambda/delta families from
// their rule shapes, and (for EnhancedVC3*) the excluded degree.
VcConfig make_optimized_config(VcAlgo algo, double alpha, int delta_cap = 100,
                               double tol = 1e-9);

struct CoverResult {
  std::vector<int> cover;
  long recursion_steps = 0;
  uint64_t seed_used = 0;
};

// Exact minimum cover for max degree <= 2 (paths and cycles).
std::vector<int> max_deg2_exact(const Graph& g);

CoverResult vc3_run(const Graph& g, double gamma, uint64_t seed);
CoverResult vc3star_run(const Graph& g, const VcConfig& cfg, uint64_t seed);
CoverResult enhanced_vc3star_run(const Graph& g, const VcConfig& cfg, uint64_t seed);
CoverResult better_vc_run(const Graph& g, const VcConfig& cfg, uint64_t seed);

CoverResult run_vc_algo(VcAlgo algo, const Graph& g, const VcConfig& cfg, uint64_t seed);

// The lower-bound recurrence matched to each algorithm.
//   VC3            -> the two-term family at gamma_3
//   VC3*           -> 2(Delta-2) terms over degrees 3..Delta
//   EnhancedVC3*   -> the VC3* family over degrees 2..Delta minus the excluded
//                     degree rows, plus the deterministic (1),(1) row
//   BetterVC       -> every row family: the single-option rows, degree >= 5
//                     rows, and the lambda/delta families
CompositeRecurrence build_recurrence(VcAlgo algo, const VcConfig& cfg);

struct ExcludedDegreeResult {
  std::optional<int> excluded;  // unset when the argmax is Delta itself
  double m = 0.0;               // resulting max over remaining degrees
  std::vector<std::pair<int, double>> per_degree;  // (d, M_d) sorted by d
  double base() const { return std::exp(m); }
};

// Optimizes each degree rule independently over d = 2..Delta and removes the
// worst one (when it is not the Delta rule), as the single-branching-rule
// refinement prescribes.
ExcludedDegreeResult choose_excluded_degree(double alpha, int delta_cap,
                                            double tol = 1e-9);

struct ApproxResult {
  CoverResult best;
  bool success = false;       // |cover| <= floor(alpha k)
  bool certain_failure = false;  // DP bound was exactly 0
  long trials = 0;
  double dp_bound = 0.0;      // p(floor(alpha k), k)
};

// Repetition wrapper: computes r = p(floor(alpha k), k) by DP and repeats the
// algorithm ceil(repeat_multiplier / r) times on independent trial streams.
ApproxResult alpha_approx(const Graph& g, int k, double alpha, VcAlgo algo,
                          const CompositeRecurrence& rec, const VcConfig& cfg,
                          double repeat_multiplier, uint64_t seed,
                          long max_trials = 50'000'000);

// Config JSON mirrors the field names of VcConfig.
VcConfig vc_config_from_json(const std::string& text);
std::string vc_config_to_json(const VcConfig& cfg);

}  // namespace branchrate
