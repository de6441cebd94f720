#include "branchrate/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

#include "branchrate/hs_solver.hpp"
#include "branchrate/rng.hpp"

namespace branchrate {

namespace {

int min_cover_rec(const Graph& g, std::vector<char>& alive, int taken, int& best) {
  if (taken >= best) return best;
  int v = -1, dmax = 0;
  for (int u = 0; u < g.n(); ++u) {
    if (!alive[u]) continue;
    int d = 0;
    for (int w : g.neighbors(u))
      if (alive[w]) ++d;
    if (d > dmax) {
      dmax = d;
      v = u;
    }
  }
  if (v < 0) {  // no edges left
    best = std::min(best, taken);
    return best;
  }
  std::vector<int> nb;
  for (int w : g.neighbors(v))
    if (alive[w]) nb.push_back(w);
  // v in the cover
  alive[v] = 0;
  min_cover_rec(g, alive, taken + 1, best);
  alive[v] = 1;
  // else all neighbors are
  if (taken + static_cast<int>(nb.size()) < best) {
    for (int w : nb) alive[w] = 0;
    alive[v] = 0;  // v has no edges once N(v) is gone
    min_cover_rec(g, alive, taken + static_cast<int>(nb.size()), best);
    alive[v] = 1;
    for (int w : nb) alive[w] = 1;
  }
  return best;
}

}  // namespace

int exact_min_cover(const Graph& g) {
  if (g.n() > 24) throw std::invalid_argument("exact_min_cover: more than 24 vertices");
  std::vector<char> alive(g.n(), 1);
  int best = g.n();
  return min_cover_rec(g, alive, 0, best);
}

namespace {

int min_hs_rec(const Hypergraph3& h, std::vector<char>& edge_alive, std::vector<char>& dead,
               int taken, int& best) {
  if (taken >= best) return best;
  int pick = -1;
  for (size_t i = 0; i < h.edges().size(); ++i)
    if (edge_alive[i]) {
      pick = static_cast<int>(i);
      break;
    }
  if (pick < 0) {
    best = std::min(best, taken);
    return best;
  }
  for (int v : h.edges()[pick]) {
    std::vector<int> flipped;
    for (size_t i = 0; i < h.edges().size(); ++i)
      if (edge_alive[i] &&
          std::binary_search(h.edges()[i].begin(), h.edges()[i].end(), v)) {
        edge_alive[i] = 0;
        flipped.push_back(static_cast<int>(i));
      }
    min_hs_rec(h, edge_alive, dead, taken + 1, best);
    for (int i : flipped) edge_alive[i] = 1;
  }
  return best;
}

}  // namespace

int exact_min_hitting_set(const Hypergraph3& h) {
  if (h.n() > 20) throw std::invalid_argument("exact_min_hitting_set: more than 20 vertices");
  std::vector<char> edge_alive(h.edges().size(), 1), dead(h.n(), 0);
  int best = h.n();
  return min_hs_rec(h, edge_alive, dead, 0, best);
}

PlantedVc make_planted_vc(int n, int k, double extra_edge_density, uint64_t seed) {
  if (k >= n || k < 0) throw std::invalid_argument("make_planted_vc: need 0 <= k < n");
  SplitMix64 rng(seed);
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
  std::vector<int> cover(perm.begin(), perm.begin() + k);
  std::vector<char> in_cover(n, 0);
  for (int c : cover) in_cover[c] = 1;

  Graph g(n);
  for (int c : cover)
    for (int u = 0; u < n; ++u) {
      if (u == c || (in_cover[u] && u < c)) continue;  // each pair once
      if (rng.uniform01() < extra_edge_density) g.add_edge(c, u);
    }
  // push cover degrees to 3 so the branching rules actually fire
  for (int c : cover) {
    int guard = 0;
    while (g.degree(c) < 3 && guard++ < 8 * n) {
      int u = static_cast<int>(rng.below(n));
      if (u != c && !g.has_edge(c, u)) g.add_edge(c, u);
    }
  }
  PlantedVc out{std::move(g), std::move(cover), k, seed};
  std::sort(out.planted_cover.begin(), out.planted_cover.end());
  if (!out.graph.is_vertex_cover(out.planted_cover))
    throw std::logic_error("make_planted_vc: planted set is not a cover");
  return out;
}

PlantedHs make_planted_hs(int n, int k, double extra_edge_density, uint64_t seed) {
  if (k >= n || k < 0) throw std::invalid_argument("make_planted_hs: need 0 <= k < n");
  SplitMix64 rng(seed);
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
  std::vector<int> cover(perm.begin(), perm.begin() + k);

  Hypergraph3 h(n);
  std::set<std::vector<int>> seen;
  auto add = [&](std::vector<int> e) {
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
    if (e.empty() || e.size() < 2) return;  // keep branching nontrivial
    if (seen.insert(e).second) h.add_edge(e);
  };
  int target = std::max(2 * n, 6 * k);
  int guard = 0;
  while (static_cast<int>(seen.size()) < target && guard++ < 50 * target) {
    int c = cover[rng.below(std::max<size_t>(cover.size(), 1))];
    int u = static_cast<int>(rng.below(n));
    if (rng.uniform01() < extra_edge_density) {
      int w = static_cast<int>(rng.below(n));
      add({c, u, w});
    } else {
      add({c, u});
    }
  }
  PlantedHs out{std::move(h), std::move(cover), k, seed};
  std::sort(out.planted_cover.begin(), out.planted_cover.end());
  if (!out.hypergraph.is_hitting_set(out.planted_cover))
    throw std::logic_error("make_planted_hs: planted set does not hit all edges");
  return out;
}

std::string CheckReport::line() const {
  char buf[160];
  std::snprintf(buf, sizeof buf, "CHECK %s %s observed=%.6g bound=%.6g", name.c_str(),
                pass ? "PASS" : "FAIL", observed, bound);
  std::string s(buf);
  if (!detail.empty()) s += " " + detail;
  return s;
}

namespace {

CheckReport mc_from_counts(const std::string& name, long hits, int trials, double bound) {
  CheckReport rep;
  rep.name = name;
  double phat = trials > 0 ? static_cast<double>(hits) / trials : 0.0;
  double sigma = trials > 0 ? std::sqrt(std::max(phat * (1 - phat), 0.0) / trials) : 0.0;
  rep.observed = phat;
  rep.bound = bound;
  rep.pass = phat >= bound - 3.0 * sigma;
  char buf[64];
  std::snprintf(buf, sizeof buf, "trials=%d sigma=%.3g", trials, sigma);
  rep.detail = buf;
  return rep;
}

}  // namespace

CheckReport monte_carlo_bound_check(VcAlgo algo, const PlantedVc& inst, const VcConfig& cfg,
                                    int b, int trials, uint64_t seed) {
  if (trials <= 0) throw std::invalid_argument("monte_carlo_bound_check: zero trials");
  CompositeRecurrence rec = build_recurrence(algo, cfg);
  DpTable table = dp_eval(rec, std::max(b, 0), inst.k);
  double bound = std::exp(table.log_p(b, inst.k));
  long hits = 0;
  for (int t = 0; t < trials; ++t) {
    uint64_t ts = seed ^ SplitMix64::mix(static_cast<uint64_t>(t) + 1);
    CoverResult res = run_vc_algo(algo, inst.graph, cfg, ts);
    if (static_cast<int>(res.cover.size()) <= b) ++hits;
  }
  return mc_from_counts("mc_" + vc_algo_name(algo) + "_k" + std::to_string(inst.k), hits,
                        trials, bound);
}

CheckReport monte_carlo_bound_check_hs(const PlantedHs& inst, const Catalog& cat, int b,
                                       int trials, uint64_t seed) {
  if (trials <= 0) throw std::invalid_argument("monte_carlo_bound_check_hs: zero trials");
  CompositeRecurrence rec = build_recurrence_3hs(cat);
  DpTable table = dp_eval(rec, std::max(b, 0), inst.k);
  double bound = std::exp(table.log_p(b, inst.k));
  long hits = 0;
  for (int t = 0; t < trials; ++t) {
    uint64_t ts = seed ^ SplitMix64::mix(static_cast<uint64_t>(t) + 1);
    HsRunResult res = three_hs_run(inst.hypergraph, cat, ts);
    if (static_cast<int>(res.hitting_set.size()) <= b) ++hits;
  }
  return mc_from_counts("mc_3hs_k" + std::to_string(inst.k), hits, trials, bound);
}

CheckReport convergence_check(const CompositeRecurrence& rec, double alpha, double m,
                              const std::vector<int>& k_list, double final_gap) {
  if (k_list.empty()) throw std::invalid_argument("convergence_check: empty k list");
  int kmax = *std::max_element(k_list.begin(), k_list.end());
  int bmax = static_cast<int>(std::floor(alpha * kmax));
  DpTable table = dp_eval(rec, bmax, kmax);
  CheckReport rep;
  rep.name = "convergence";
  std::ostringstream detail;
  detail << "gaps=";
  bool monotone = true;
  double prev = kPosInf, last = kPosInf;
  for (size_t i = 0; i < k_list.size(); ++i) {
    int k = k_list[i];
    int b = static_cast<int>(std::floor(alpha * k));
    double gap = std::abs(-table.log_p(b, k) / k - m);
    if (gap > prev + 1e-12) monotone = false;
    prev = gap;
    last = gap;
    detail << (i ? "," : "") << gap;
  }
  rep.observed = last;
  rep.bound = final_gap;
  rep.pass = monotone && last <= final_gap;
  rep.detail = detail.str();
  return rep;
}

namespace {

// All achievable success probabilities over the k-consistent mappings of the
// subtree rooted at a history with rb budget and rk coverage left. No
// memoization: every history enumerates its own assignments.
void mapping_values(const CompositeRecurrence& rec, int rb, int rk, std::vector<double>& out,
                    size_t cap) {
  if (rk <= 0) {
    out.assign(1, 1.0);
    return;
  }
  if (rb <= 0) {  // every further option costs at least 1
    out.assign(1, 0.0);
    return;
  }
  out.clear();
  for (const Term& t : rec.terms) {
    if (t.max_k() > rk) continue;  // k-consistency
    std::vector<std::vector<double>> child(t.arity());
    for (size_t i = 0; i < t.arity(); ++i) {
      if (rb - t.b[i] < 0)
        child[i].assign(1, 0.0);
      else
        mapping_values(rec, rb - t.b[i], rk - t.k[i], child[i], cap);
    }
    std::vector<size_t> idx(t.arity(), 0);
    for (;;) {
      double val = 0.0;
      for (size_t i = 0; i < t.arity(); ++i) val += t.gamma[i] * child[i][idx[i]];
      out.push_back(val);
      if (out.size() > cap) throw std::runtime_error("rules_mapping_infimum: size cap");
      size_t i = 0;
      while (i < t.arity() && ++idx[i] == child[i].size()) idx[i++] = 0;
      if (i == t.arity()) break;
    }
  }
  if (out.empty()) throw std::logic_error("rules_mapping_infimum: no applicable term");
}

}  // namespace

double rules_mapping_infimum(const CompositeRecurrence& rec, int b, int k) {
  if (b > 4 || k > 4) throw std::invalid_argument("rules_mapping_infimum: b,k <= 4 required");
  if (rec.terms.size() > 2) throw std::invalid_argument("rules_mapping_infimum: N <= 2 required");
  for (const Term& t : rec.terms)
    if (t.arity() > 2) throw std::invalid_argument("rules_mapping_infimum: r_j <= 2 required");
  if (b < 0) return 0.0;
  if (k <= 0) return 1.0;
  std::vector<double> vals;
  mapping_values(rec, b, k, vals, 4'000'000);
  return *std::min_element(vals.begin(), vals.end());
}

}  // namespace branchrate
