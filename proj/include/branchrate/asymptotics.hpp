#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "branchrate/recurrence.hpp"

namespace branchrate {

// Kullback-Leibler divergence sum c_i log(c_i/d_i) with the usual
// 0 log 0 = 0 log(0/0) = 0 conventions; +inf when c_i > 0 meets d_i = 0.
double kl_divergence(const Distribution& c, const Distribution& d);
double kl_divergence(const std::vector<double>& c, const std::vector<double>& d);

// Binary shorthand D((x,1-x) || (y,1-y)).
double kl_binary(double x, double y);

// Block-structured divergence: sum_i t_i log(t_i/upsilon_i) - sum_j l_j log l_j
// where l_j is the mass of t in block j and upsilon sums to 1 per block.
double extended_kl(const std::vector<double>& t, const std::vector<double>& upsilon,
                   const std::vector<size_t>& block_sizes);

struct BranchingNumberResult {
  double m = kPosInf;                  // natural-log rate per unit coverage
  std::optional<Distribution> q_star;  // absent when m = +inf
  double base() const { return std::exp(m); }
};

// The alpha-branching number of a single term: minimize D(q||gamma)/(q.k)
// over distributions q with q.b <= alpha * (q.k). Solved by bisection on the
// target value with an exact 1-D dual feasibility oracle; the returned m is
// re-evaluated at q_star, so the certificate |m - D/qk| = 0 holds by
// construction and q_star is feasible after repair.
BranchingNumberResult alpha_branching_number(const std::vector<int>& b,
                                             const std::vector<int>& k,
                                             const Distribution& gamma, double alpha,
                                             double tol = 1e-9);

struct CompositeRateResult {
  double m = 0.0;  // max over terms
  std::vector<BranchingNumberResult> per_term;
  double base() const { return std::exp(m); }
};

// Theorem-level rate of a composite recurrence: M = max_j M_j. Throws when a
// term is infeasible (M_j = +inf).
CompositeRateResult composite_rate(const CompositeRecurrence& rec, double alpha,
                                   double tol = 1e-9);

// One branching rule before its distribution is fixed: r option costs and
// h coverage vectors (states) sharing the option axis.
struct RuleSpec {
  std::string name;
  std::vector<int> b;
  std::vector<std::vector<int>> states;
  std::optional<Distribution> gamma;  // fixed when present
};

struct OptimizedRule {
  Distribution gamma_star;
  double m_star = 0.0;
  std::vector<Distribution> per_state_q;
  bool degenerate = false;  // a state was unconstrained (boundary c <= 0)
  double base() const { return std::exp(m_star); }
};

// Closed-form two-option/two-state optimizer: states k1=(b1,s2), k2=(s1,b2)
// with s1<b1, s2<b2. f1 is non-increasing and f2 non-decreasing in gamma, so
// the equalizer f1 = f2 found by binary search is optimal.
OptimizedRule optimize_simple_rule(int b1, int b2, int s1, int s2, double alpha,
                                   double tol = 1e-9);

// f1/f2 of the simple rule at a given gamma, exposed for the monotonicity
// checks that guard the binary search.
double simple_rule_f1(int b1, int b2, int s1, int s2, double alpha, double gamma);
double simple_rule_f2(int b1, int b2, int s1, int s2, double alpha, double gamma);

struct GenericSolverOptions {
  double tol = 1e-7;
  double bisection_gap = 1e-4;  // bisection localizes; the polish refines
  int bisection_iters = 60;
  int md_iter_cap = 50000;    // per feasibility check
  int md_stall_limit = 90;    // stop a check early when no progress
  int polish_rounds = 500;
};

// General rule optimizer: bisection on the target value t; each feasibility
// check "exists (gamma, q^1..q^h) with D(q^j||gamma) <= t (q^j.k^j) and the
// linear constraints" is a convex program handled by entropic mirror descent
// on the product of simplices, followed by an equalization polish. The
// reported m_star is always re-evaluated exactly at gamma_star.
OptimizedRule optimize_rule_generic(const RuleSpec& rule, double alpha,
                                    const GenericSolverOptions& opts = {});

// Evaluates max_j M_j(gamma) for a rule at a fixed distribution.
double rule_value_at(const RuleSpec& rule, const Distribution& gamma, double alpha,
                     double tol = 1e-10);

// Rule-set JSON: {"rules":[{"name":..,"b":[..],"states":[[..],..],"gamma":[..]?}]}
std::vector<RuleSpec> rules_from_json(const std::string& text);
std::string rules_to_json(const std::vector<RuleSpec>& rules);

}  // namespace branchrate
