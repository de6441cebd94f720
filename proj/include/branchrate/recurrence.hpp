#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace branchrate {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kPosInf = std::numeric_limits<double>::infinity();

// Probability vector over r >= 1 options. Normalized on construction; rejects
// negative entries and sums further than 1e-12 from 1.
class Distribution {
 public:
  Distribution() = default;
  explicit Distribution(std::vector<double> weights);

  size_t size() const { return w_.size(); }
  double operator[](size_t i) const { return w_[i]; }
  const std::vector<double>& weights() const { return w_; }

 private:
  std::vector<double> w_;
};

// One branching state: option costs b (all >= 1), option coverages k (>= 0)
// and the option distribution gamma, all of common length r.
struct Term {
  std::vector<int> b;
  std::vector<int> k;
  Distribution gamma;

  Term() = default;
  Term(std::vector<int> b_, std::vector<int> k_, Distribution g);

  size_t arity() const { return b.size(); }
  int max_k() const;
};

struct CompositeRecurrence {
  std::vector<Term> terms;
};

struct ValidationReport {
  bool valid = true;
  std::vector<std::string> issues;
};

// Checks structural invariants, in particular that some term has all
// coverage entries <= 1 (without one the min can range over an empty set).
ValidationReport validate_recurrence(const CompositeRecurrence& rec);

// Exact values of log p(b,k) on the grid [0,b_max] x [0,k_max].
class DpTable {
 public:
  DpTable(int b_max, int k_max);

  int b_max() const { return b_max_; }
  int k_max() const { return k_max_; }

  double log_p(int b, int k) const {
    if (b < 0) return kNegInf;
    if (k <= 0) return 0.0;
    return grid_[static_cast<size_t>(b) * (k_max_ + 1) + k];
  }
  double& cell(int b, int k) { return grid_[static_cast<size_t>(b) * (k_max_ + 1) + k]; }

  void dump_csv(std::ostream& os) const;

 private:
  int b_max_ = 0;
  int k_max_ = 0;
  std::vector<double> grid_;
};

// Allocation guard for DP tables; override with env BRANCHRATE_CELL_CAP.
size_t dp_cell_cap();

// Evaluates the recurrence in log space over the full grid. A term enters the
// min at (b,k) only when max_i k_i <= k; coverage decrements are clamped at 0
// and cost overdraft (b - b_i < 0) contributes probability 0.
DpTable dp_eval(const CompositeRecurrence& rec, int b_max, int k_max);

// Memo-free reference evaluation of p(b,k) in plain arithmetic. Exponential;
// refuses b > 12 and very wide recurrences. Oracle for dp_eval.
double naive_eval(const CompositeRecurrence& rec, int b, int k);

// JSON schema: {"terms":[{"b":[...],"k":[...],"gamma":[...]}, ...]}
CompositeRecurrence recurrence_from_json(const std::string& text);
std::string recurrence_to_json(const CompositeRecurrence& rec);

}  // namespace branchrate
