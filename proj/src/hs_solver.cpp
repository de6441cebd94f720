#include "branchrate/hs_solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <set>
#include <stdexcept>

#include "branchrate/rng.hpp"

namespace branchrate {

RuleSpec entry_rule_spec(const CatalogEntry& entry, int delta) {
  size_t m = entry.hitting_sets.size();
  RuleSpec spec;
  spec.b.reserve(m + 1);
  for (const auto& c : entry.hitting_sets) spec.b.push_back(static_cast<int>(c.size()));
  spec.b.push_back(1);  // the pick-v option
  for (size_t j = 0; j < m; ++j) {
    std::vector<int> st;
    st.reserve(m + 1);
    const auto& cj = entry.hitting_sets[j];
    for (size_t i = 0; i < m; ++i) {
      const auto& ci = entry.hitting_sets[i];
      int inter = 0;
      for (int v : ci)
        if (std::binary_search(cj.begin(), cj.end(), v)) ++inter;
      st.push_back(inter);
    }
    st.push_back(0);
    spec.states.push_back(std::move(st));
  }
  int ind = static_cast<int>(entry.canonical.edges.size()) < delta ? 1 : 0;
  std::vector<int> vstate(m, ind);
  vstate.push_back(1);
  spec.states.push_back(std::move(vstate));
  return spec;
}

CompositeRecurrence build_recurrence_3hs(const Catalog& cat) {
  CompositeRecurrence rec;
  for (const CatalogEntry& e : cat.entries) {
    if (!e.gamma) throw std::invalid_argument("build_recurrence_3hs: entry without gamma");
    if (e.gamma->size() != e.hitting_sets.size() + 1)
      throw std::invalid_argument("build_recurrence_3hs: gamma length mismatch");
    RuleSpec spec = entry_rule_spec(e, cat.delta);
    for (const auto& st : spec.states) rec.terms.emplace_back(spec.b, st, *e.gamma);
  }
  // the singleton-edge rule
  rec.terms.emplace_back(std::vector<int>{1}, std::vector<int>{1}, Distribution({1.0}));
  return rec;
}

namespace {

struct HsWork {
  int n;
  std::vector<std::vector<int>> edges;
  std::vector<char> edge_alive;
  std::vector<char> vertex_dead;

  explicit HsWork(const Hypergraph3& h)
      : n(h.n()), edges(h.edges()), edge_alive(h.edges().size(), 1), vertex_dead(h.n(), 0) {}

  void remove_vertices(const std::vector<int>& s) {
    for (int v : s) vertex_dead[v] = 1;
    for (size_t i = 0; i < edges.size(); ++i) {
      if (!edge_alive[i]) continue;
      for (int v : edges[i])
        if (vertex_dead[v]) {
          edge_alive[i] = 0;
          break;
        }
    }
  }

  Hypergraph3 current() const {
    Hypergraph3 h(n);
    for (size_t i = 0; i < edges.size(); ++i)
      if (edge_alive[i]) h.add_edge(edges[i]);
    return h;
  }
};

}  // namespace

HsRunResult three_hs_run(const Hypergraph3& h, const Catalog& cat, uint64_t seed) {
  for (const CatalogEntry& e : cat.entries)
    if (!e.gamma) throw std::invalid_argument("three_hs_run: catalog gammas not set");
  SplitMix64 rng(seed);
  HsWork ws(h);
  HsRunResult res;
  res.seed_used = seed;
  for (;;) {
    ++res.recursion_steps;
    Hypergraph3 cur = ws.current();
    if (cur.edges().empty()) break;

    int singleton = -1;
    for (const auto& e : cur.edges())
      if (e.size() == 1 && (singleton < 0 || e[0] < singleton)) singleton = e[0];
    if (singleton >= 0) {
      res.hitting_set.push_back(singleton);
      ws.remove_vertices({singleton});
      continue;
    }

    int v = -1, best_deg = 0;
    for (int u = 0; u < cur.n(); ++u) {
      int d = cur.degree(u);
      if (d > best_deg) {
        best_deg = d;
        v = u;
      }
    }
    InducedResult ng;
    if (best_deg <= cat.delta) {
      ng = neighbors_graph(cur, v);
    } else {
      std::vector<int> f;
      for (size_t i = 0; i < cur.edges().size() && static_cast<int>(f.size()) < cat.delta; ++i) {
        const auto& e = cur.edges()[i];
        if (std::binary_search(e.begin(), e.end(), v)) f.push_back(static_cast<int>(i));
      }
      ng = induced_graph(cur, v, f);
    }

    CanonicalForm cf = canonical_form(ng.graph);
    const CatalogEntry* entry = cat.find(cf.key);
    if (!entry) throw std::logic_error("three_hs_run: neighbors graph missing from catalog");
    // phi: canonical label -> local label of ng -> host vertex
    std::vector<int> inv(ng.graph.vertices);
    for (int local = 0; local < ng.graph.vertices; ++local) inv[cf.relabel[local]] = local;

    const Distribution& gamma = *entry->gamma;
    size_t m = entry->hitting_sets.size();
    double u01 = rng.uniform01(), acc = 0.0;
    size_t pick = m;  // default: the pick-v option
    for (size_t i = 0; i < m; ++i) {
      acc += gamma[i];
      if (u01 < acc) {
        pick = i;
        break;
      }
    }
    std::vector<int> s;
    if (pick == m) {
      s.push_back(v);
    } else {
      std::vector<int> mapped;  // phi(C_i) must hit the neighbors graph
      for (int c : entry->hitting_sets[pick]) mapped.push_back(inv[c]);
      if (!ng.graph.hits_all(mapped))
        throw std::logic_error("three_hs_run: isomorphism map broke a hitting set");
      for (int local : mapped) s.push_back(ng.to_host[local]);
    }
    for (int x : s) res.hitting_set.push_back(x);
    ws.remove_vertices(s);
  }
  std::sort(res.hitting_set.begin(), res.hitting_set.end());
  res.hitting_set.erase(std::unique(res.hitting_set.begin(), res.hitting_set.end()),
                        res.hitting_set.end());
  if (!h.is_hitting_set(res.hitting_set))
    throw std::logic_error("three_hs_run: returned set misses an edge");
  return res;
}

HsApproxResult alpha_hs(const Hypergraph3& h, int k, double alpha, const Catalog& cat,
                        double repeat_multiplier, uint64_t seed, long max_trials) {
  if (k < 0) throw std::invalid_argument("alpha_hs: k must be >= 0");
  CompositeRecurrence rec = build_recurrence_3hs(cat);
  int b = static_cast<int>(std::floor(alpha * k));
  DpTable table = dp_eval(rec, std::max(b, 0), k);
  double r = std::exp(table.log_p(b, k));
  HsApproxResult out;
  out.dp_bound = r;
  if (r <= 0.0) {
    out.certain_failure = true;
    return out;
  }
  long trials = static_cast<long>(std::ceil(repeat_multiplier / r));
  trials = std::max(1L, std::min(trials, max_trials));
  out.trials = trials;
  for (long t = 0; t < trials; ++t) {
    uint64_t ts = seed ^ SplitMix64::mix(static_cast<uint64_t>(t) + 1);
    HsRunResult res = three_hs_run(h, cat, ts);
    if (t == 0 || res.hitting_set.size() < out.best.hitting_set.size()) out.best = std::move(res);
  }
  out.success = static_cast<int>(out.best.hitting_set.size()) <= b;
  return out;
}

CatalogOptimizeResult optimize_catalog_gammas(Catalog& cat, double alpha, double tol,
                                              int threads) {
  // Every gamma yields a valid lower-bound recurrence, so only the entries
  // that can decide the max need full precision: a cheap pass bounds each
  // entry from above, then the candidates are re-solved in decreasing order
  // until the remaining bounds fall below the refined maximum.
  GenericSolverOptions coarse;
  coarse.tol = tol;
  coarse.bisection_gap = 5e-3;
  coarse.polish_rounds = 60;
  GenericSolverOptions fine;
  fine.tol = tol;

  auto solve_one = [&](size_t idx, const GenericSolverOptions& opts) {
    RuleSpec spec = entry_rule_spec(cat.entries[idx], cat.delta);
    OptimizedRule opt = optimize_rule_generic(spec, alpha, opts);
    if (opt.m_star == kPosInf)
      throw std::runtime_error("optimize_catalog_gammas: infeasible entry rule");
    return opt;
  };

  std::vector<double> ms(cat.entries.size(), 0.0);
  int nthreads = threads > 0 ? threads : 1;
  if (nthreads > 1 && cat.entries.size() > 4) {
    std::vector<std::future<void>> futs;
    std::atomic<size_t> cursor{0};
    for (int t = 0; t < nthreads; ++t)
      futs.push_back(std::async(std::launch::async, [&] {
        for (;;) {
          size_t i = cursor.fetch_add(1);
          if (i >= cat.entries.size()) return;
          OptimizedRule opt = solve_one(i, coarse);
          cat.entries[i].gamma = opt.gamma_star;
          ms[i] = opt.m_star;
        }
      }));
    for (auto& f : futs) f.get();
  } else {
    for (size_t i = 0; i < cat.entries.size(); ++i) {
      OptimizedRule opt = solve_one(i, coarse);
      cat.entries[i].gamma = opt.gamma_star;
      ms[i] = opt.m_star;
    }
  }

  std::vector<size_t> order(cat.entries.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return ms[a] > ms[b]; });
  double refined_max = 0.0;
  for (size_t i : order) {
    if (ms[i] <= refined_max) break;  // coarse value is an upper bound
    OptimizedRule opt = solve_one(i, fine);
    if (opt.m_star < ms[i]) {
      cat.entries[i].gamma = opt.gamma_star;
      ms[i] = opt.m_star;
    }
    refined_max = std::max(refined_max, ms[i]);
  }

  CatalogOptimizeResult res;
  for (size_t i = 0; i < ms.size(); ++i)
    if (ms[i] > res.m) {
      res.m = ms[i];
      res.worst_entry = i;
    }
  return res;
}

}  // namespace branchrate
