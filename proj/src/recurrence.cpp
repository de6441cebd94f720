#include "branchrate/recurrence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace branchrate {

Distribution::Distribution(std::vector<double> weights) : w_(std::move(weights)) {
  if (w_.empty()) throw std::invalid_argument("Distribution: empty weight vector");
  double sum = 0.0;
  for (double x : w_) {
    if (!(x >= 0.0)) throw std::invalid_argument("Distribution: negative weight");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    if (sum <= 0.0) throw std::invalid_argument("Distribution: zero total mass");
    // tolerate larger drift only as an explicit normalization request
    if (std::abs(sum - 1.0) > 1e-6)
      throw std::invalid_argument("Distribution: weights sum to " + std::to_string(sum));
  }
  for (double& x : w_) x /= sum;
}

Term::Term(std::vector<int> b_, std::vector<int> k_, Distribution g)
    : b(std::move(b_)), k(std::move(k_)), gamma(std::move(g)) {
  if (b.size() != k.size() || b.size() != gamma.size())
    throw std::invalid_argument("Term: b, k, gamma must share length");
  for (int x : b)
    if (x < 1) throw std::invalid_argument("Term: costs must be >= 1");
  for (int x : k)
    if (x < 0) throw std::invalid_argument("Term: coverages must be >= 0");
}

int Term::max_k() const { return *std::max_element(k.begin(), k.end()); }

ValidationReport validate_recurrence(const CompositeRecurrence& rec) {
  ValidationReport rep;
  if (rec.terms.empty()) {
    rep.valid = false;
    rep.issues.push_back("no terms");
    return rep;
  }
  bool has_unit = false;
  for (size_t j = 0; j < rec.terms.size(); ++j) {
    const Term& t = rec.terms[j];
    if (t.b.empty()) {
      rep.valid = false;
      rep.issues.push_back("term " + std::to_string(j) + ": empty");
      continue;
    }
    if (t.max_k() <= 1) has_unit = true;
  }
  if (!has_unit) {
    rep.valid = false;
    rep.issues.push_back("no term with all coverage entries <= 1; the min can be empty");
  }
  return rep;
}

DpTable::DpTable(int b_max, int k_max) : b_max_(b_max), k_max_(k_max) {
  if (b_max < 0 || k_max < 0) throw std::invalid_argument("DpTable: negative bounds");
  size_t cells = static_cast<size_t>(b_max + 1) * static_cast<size_t>(k_max + 1);
  if (cells > dp_cell_cap())
    throw std::runtime_error("DpTable: " + std::to_string(cells) +
                             " cells exceed the cap (set BRANCHRATE_CELL_CAP to raise)");
  grid_.assign(cells, kNegInf);
}

void DpTable::dump_csv(std::ostream& os) const {
  os << "b,k,log_p\n";
  char buf[64];
  for (int b = 0; b <= b_max_; ++b)
    for (int k = 0; k <= k_max_; ++k) {
      double v = log_p(b, k);
      if (v == kNegInf)
        os << b << ',' << k << ",-inf\n";
      else {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << b << ',' << k << ',' << buf << '\n';
      }
    }
}

size_t dp_cell_cap() {
  static size_t cap = [] {
    if (const char* s = std::getenv("BRANCHRATE_CELL_CAP")) {
      char* end = nullptr;
      unsigned long long v = std::strtoull(s, &end, 10);
      if (end != s && v > 0) return static_cast<size_t>(v);
    }
    return static_cast<size_t>(200'000'000);
  }();
  return cap;
}

namespace {

double log_sum_exp(const std::vector<double>& vals) {
  double mx = kNegInf;
  for (double v : vals) mx = std::max(mx, v);
  if (mx == kNegInf) return kNegInf;
  double s = 0.0;
  for (double v : vals) s += std::exp(v - mx);
  return mx + std::log(s);
}

}  // namespace

DpTable dp_eval(const CompositeRecurrence& rec, int b_max, int k_max) {
  ValidationReport rep = validate_recurrence(rec);
  if (!rep.valid) {
    std::string msg = "dp_eval: invalid recurrence:";
    for (const auto& s : rep.issues) msg += " " + s + ";";
    throw std::invalid_argument(msg);
  }
  DpTable table(b_max, k_max);
  std::vector<double> opts;
  for (int b = 0; b <= b_max; ++b) {
    table.cell(b, 0) = 0.0;
    for (int k = 1; k <= k_max; ++k) {
      double best = kPosInf;
      bool any = false;
      for (const Term& t : rec.terms) {
        if (t.max_k() > k) continue;
        any = true;
        opts.clear();
        for (size_t i = 0; i < t.arity(); ++i) {
          int bb = b - t.b[i];
          if (bb < 0) {
            opts.push_back(kNegInf);
            continue;
          }
          int kk = std::max(k - t.k[i], 0);
          double g = t.gamma[i];
          opts.push_back(g > 0 ? std::log(g) + table.log_p(bb, kk) : kNegInf);
        }
        best = std::min(best, log_sum_exp(opts));
      }
      if (!any) throw std::logic_error("dp_eval: empty min at k >= 1");
      table.cell(b, k) = best;
    }
  }
  return table;
}

namespace {

double naive_rec(const CompositeRecurrence& rec, int b, int k, long& budget) {
  if (b < 0) return 0.0;
  if (k <= 0) return 1.0;
  if (--budget < 0) throw std::runtime_error("naive_eval: work cap exceeded");
  double best = kPosInf;
  for (const Term& t : rec.terms) {
    if (t.max_k() > k) continue;
    double s = 0.0;
    for (size_t i = 0; i < t.arity(); ++i)
      s += t.gamma[i] * naive_rec(rec, b - t.b[i], k - t.k[i], budget);
    best = std::min(best, s);
  }
  if (best == kPosInf) throw std::logic_error("naive_eval: empty min at k >= 1");
  return best;
}

}  // namespace

double naive_eval(const CompositeRecurrence& rec, int b, int k) {
  if (b > 12) throw std::invalid_argument("naive_eval: b > 12 refused");
  ValidationReport rep = validate_recurrence(rec);
  if (!rep.valid) throw std::invalid_argument("naive_eval: invalid recurrence");
  long budget = 200'000'000;
  return naive_rec(rec, b, k, budget);
}

CompositeRecurrence recurrence_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  CompositeRecurrence rec;
  for (const auto& jt : j.at("terms")) {
    std::vector<int> b = jt.at("b").get<std::vector<int>>();
    std::vector<int> k = jt.at("k").get<std::vector<int>>();
    std::vector<double> g = jt.at("gamma").get<std::vector<double>>();
    rec.terms.emplace_back(std::move(b), std::move(k), Distribution(std::move(g)));
  }
  return rec;
}

std::string recurrence_to_json(const CompositeRecurrence& rec) {
  nlohmann::json terms = nlohmann::json::array();
  for (const Term& t : rec.terms) {
    nlohmann::json jt;
    jt["b"] = t.b;
    jt["k"] = t.k;
    jt["gamma"] = t.gamma.weights();
    terms.push_back(std::move(jt));
  }
  nlohmann::json j;
  j["terms"] = std::move(terms);
  return j.dump(2);
}

}  // namespace branchrate
