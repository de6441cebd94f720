#include "branchrate/vc_solvers.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "branchrate/rng.hpp"
#include "json.hpp"

namespace branchrate {

VcAlgo vc_algo_from_name(const std::string& name) {
  if (name == "vc3") return VcAlgo::Vc3;
  if (name == "vc3star") return VcAlgo::Vc3Star;
  if (name == "enhanced_vc3star") return VcAlgo::EnhancedVc3Star;
  if (name == "better_vc") return VcAlgo::BetterVc;
  throw std::invalid_argument("unknown algorithm '" + name + "'");
}

std::string vc_algo_name(VcAlgo a) {
  switch (a) {
    case VcAlgo::Vc3: return "vc3";
    case VcAlgo::Vc3Star: return "vc3star";
    case VcAlgo::EnhancedVc3Star: return "enhanced_vc3star";
    case VcAlgo::BetterVc: return "better_vc";
  }
  return "?";
}

namespace {

void require_gamma(const VcConfig& cfg, int d) {
  auto it = cfg.gamma_by_degree.find(d);
  if (it == cfg.gamma_by_degree.end())
    throw std::invalid_argument("VcConfig: missing gamma for degree " + std::to_string(d));
  if (!(it->second > 0.0 && it->second < 1.0))
    throw std::invalid_argument("VcConfig: gamma_" + std::to_string(d) + " outside (0,1)");
}

}  // namespace

void VcConfig::check(VcAlgo algo) const {
  if (delta_cap < 3) throw std::invalid_argument("VcConfig: delta_cap must be >= 3");
  switch (algo) {
    case VcAlgo::Vc3:
      require_gamma(*this, 3);
      break;
    case VcAlgo::Vc3Star:
      for (int d = 3; d <= delta_cap; ++d) require_gamma(*this, d);
      break;
    case VcAlgo::EnhancedVc3Star: {
      if (!excluded_degree) throw std::invalid_argument("VcConfig: excluded_degree not set");
      int del = *excluded_degree;
      if (del < 2 || del >= delta_cap)
        throw std::invalid_argument("VcConfig: excluded_degree outside [2, delta_cap)");
      for (int d = 2; d <= delta_cap; ++d)
        if (d != del) require_gamma(*this, d);
      break;
    }
    case VcAlgo::BetterVc: {
      for (int d = 5; d <= delta_cap; ++d) require_gamma(*this, d);
      for (int r = 3; r <= 7; ++r)
        if (!lambda1.count(r))
          throw std::invalid_argument("VcConfig: missing lambda1 for r=" + std::to_string(r));
      for (int r = 3; r <= 4; ++r)
        if (!lambda2.count(r))
          throw std::invalid_argument("VcConfig: missing lambda2 for r=" + std::to_string(r));
      if (!(lambda3 > 0.0 && lambda3 < 1.0))
        throw std::invalid_argument("VcConfig: lambda3 outside (0,1)");
      for (int r = 5; r <= 7; ++r) {
        auto it = delta3way.find(r);
        if (it == delta3way.end())
          throw std::invalid_argument("VcConfig: missing delta3way for r=" + std::to_string(r));
        double s = it->second[0] + it->second[1] + it->second[2];
        if (std::abs(s - 1.0) > 1e-12)
          throw std::invalid_argument("VcConfig: delta3way triple does not sum to 1");
      }
      break;
    }
  }
}

namespace {

// Mutable alive-subgraph view used by all the branching loops.
struct WorkGraph {
  const Graph* g = nullptr;
  std::vector<char> alive;
  std::vector<int> deg;
  long alive_edges = 0;

  explicit WorkGraph(const Graph& gr) : g(&gr), alive(gr.n(), 1), deg(gr.n()) {
    for (int v = 0; v < gr.n(); ++v) deg[v] = gr.degree(v);
    alive_edges = static_cast<long>(gr.edge_count());
  }

  int n() const { return g->n(); }

  void remove(int v) {
    alive[v] = 0;
    alive_edges -= deg[v];
    for (int u : g->neighbors(v))
      if (alive[u]) --deg[u];
    deg[v] = 0;
  }

  std::vector<int> alive_neighbors(int v) const {
    std::vector<int> out;
    for (int u : g->neighbors(v))
      if (alive[u]) out.push_back(u);
    return out;
  }

  // component of v within the alive set, sorted
  std::vector<int> component_of(int v) const {
    std::vector<int> comp{v}, stack{v};
    std::vector<char> seen(n(), 0);
    seen[v] = 1;
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      for (int u : g->neighbors(x))
        if (alive[u] && !seen[u]) {
          seen[u] = 1;
          comp.push_back(u);
          stack.push_back(u);
        }
    }
    std::sort(comp.begin(), comp.end());
    return comp;
  }

  long alive_count() const { return std::count(alive.begin(), alive.end(), 1); }

  void restrict_to(const std::vector<int>& keep) {
    std::vector<char> mask(n(), 0);
    for (int v : keep) mask[v] = 1;
    for (int v = 0; v < n(); ++v)
      if (alive[v] && !mask[v]) {
        alive[v] = 0;
        deg[v] = 0;
      }
    long m = 0;
    for (int v = 0; v < n(); ++v)
      if (alive[v]) m += deg[v];
    alive_edges = m / 2;
  }
};

// paths and cycles: pick every second vertex along each walk
std::vector<int> deg2_cover(WorkGraph& ws) {
  std::vector<int> cover;
  std::vector<char> seen(ws.n(), 0);
  auto walk = [&](int start) {
    std::vector<int> order;
    int prev = -1, cur = start;
    for (;;) {
      order.push_back(cur);
      seen[cur] = 1;
      int nxt = -1;
      for (int u : ws.g->neighbors(cur))
        if (ws.alive[u] && u != prev && !seen[u]) {
          nxt = u;
          break;
        }
      if (nxt == -1) break;
      prev = cur;
      cur = nxt;
    }
    return order;
  };
  for (int v = 0; v < ws.n(); ++v) {
    if (!ws.alive[v] || seen[v] || ws.deg[v] > 1) continue;
    std::vector<int> order = walk(v);  // path (or isolated vertex)
    for (size_t i = 1; i < order.size(); i += 2) cover.push_back(order[i]);
  }
  for (int v = 0; v < ws.n(); ++v) {
    if (!ws.alive[v] || seen[v]) continue;
    if (ws.deg[v] != 2) throw std::invalid_argument("max_deg2_exact: degree above 2");
    std::vector<int> order = walk(v);  // cycle
    for (size_t i = 1; i < order.size(); i += 2) cover.push_back(order[i]);
    if (order.size() % 2 == 1) cover.push_back(order.back());
  }
  return cover;
}

int lowest_max_degree_vertex(const WorkGraph& ws) {
  int best = -1, bd = -1;
  for (int v = 0; v < ws.n(); ++v)
    if (ws.alive[v] && ws.deg[v] > bd) {
      bd = ws.deg[v];
      best = v;
    }
  return best;
}

void finish_check(const Graph& g, const std::vector<int>& cover) {
  if (!g.is_vertex_cover(cover)) throw std::logic_error("returned set is not a vertex cover");
}

}  // namespace

std::vector<int> max_deg2_exact(const Graph& g) {
  WorkGraph ws(g);
  for (int v = 0; v < g.n(); ++v)
    if (ws.deg[v] > 2) throw std::invalid_argument("max_deg2_exact: degree above 2");
  std::vector<int> cover = deg2_cover(ws);
  std::sort(cover.begin(), cover.end());
  finish_check(g, cover);
  return cover;
}

CoverResult vc3_run(const Graph& g, double gamma, uint64_t seed) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("vc3_run: gamma outside (0,1)");
  g.validate();
  SplitMix64 rng(seed);
  WorkGraph ws(g);
  CoverResult res;
  res.seed_used = seed;
  for (;;) {
    ++res.recursion_steps;
    int v = lowest_max_degree_vertex(ws);
    if (v < 0 || ws.deg[v] <= 2) {
      std::vector<int> rest = deg2_cover(ws);
      res.cover.insert(res.cover.end(), rest.begin(), rest.end());
      break;
    }
    if (rng.uniform01() < gamma) {
      res.cover.push_back(v);
      ws.remove(v);
    } else {
      std::vector<int> nb = ws.alive_neighbors(v);
      nb.resize(3);  // three lowest-index neighbors
      for (int u : nb) {
        res.cover.push_back(u);
        ws.remove(u);
      }
    }
  }
  std::sort(res.cover.begin(), res.cover.end());
  finish_check(g, res.cover);
  return res;
}

CoverResult vc3star_run(const Graph& g, const VcConfig& cfg, uint64_t seed) {
  cfg.check(VcAlgo::Vc3Star);
  g.validate();
  SplitMix64 rng(seed);
  WorkGraph ws(g);
  CoverResult res;
  res.seed_used = seed;
  for (;;) {
    ++res.recursion_steps;
    int v = lowest_max_degree_vertex(ws);
    if (v < 0 || ws.deg[v] <= 2) {
      std::vector<int> rest = deg2_cover(ws);
      res.cover.insert(res.cover.end(), rest.begin(), rest.end());
      break;
    }
    int d = ws.deg[v];
    int dd = std::min(d, cfg.delta_cap);
    double gamma = cfg.gamma_by_degree.at(dd);
    if (rng.uniform01() < gamma) {
      res.cover.push_back(v);
      ws.remove(v);
    } else {
      std::vector<int> nb = ws.alive_neighbors(v);
      if (d >= cfg.delta_cap) nb.resize(cfg.delta_cap);
      for (int u : nb) {
        res.cover.push_back(u);
        ws.remove(u);
      }
    }
  }
  std::sort(res.cover.begin(), res.cover.end());
  finish_check(g, res.cover);
  return res;
}

namespace {

std::vector<int> enhanced_solve(WorkGraph& ws, const VcConfig& cfg, SplitMix64& rng,
                                long& steps, long step_cap) {
  std::vector<int> cover;
  int delta = *cfg.excluded_degree;
  for (;;) {
    if (++steps > step_cap) throw std::runtime_error("enhanced_vc3star: step cap exceeded");
    if (ws.alive_edges == 0) return cover;

    int lowest = -1;
    for (int v = 0; v < ws.n() && lowest < 0; ++v)
      if (ws.alive[v]) lowest = v;
    std::vector<int> comp = ws.component_of(lowest);
    if (static_cast<long>(comp.size()) != ws.alive_count()) {
      WorkGraph rest = ws;
      ws.restrict_to(comp);
      std::vector<int> left = enhanced_solve(ws, cfg, rng, steps, step_cap);
      std::vector<int> keep;
      for (int v = 0; v < rest.n(); ++v)
        if (rest.alive[v] && !std::binary_search(comp.begin(), comp.end(), v)) keep.push_back(v);
      rest.restrict_to(keep);
      std::vector<int> right = enhanced_solve(rest, cfg, rng, steps, step_cap);
      cover.insert(cover.end(), left.begin(), left.end());
      cover.insert(cover.end(), right.begin(), right.end());
      return cover;
    }

    int deg1 = -1;
    for (int v = 0; v < ws.n() && deg1 < 0; ++v)
      if (ws.alive[v] && ws.deg[v] == 1) deg1 = v;
    if (deg1 >= 0) {
      int u = ws.alive_neighbors(deg1)[0];
      cover.push_back(u);
      ws.remove(u);
      continue;
    }

    int pick = -1;
    for (int v = 0; v < ws.n() && pick < 0; ++v)
      if (ws.alive[v] && ws.deg[v] != delta) pick = v;
    if (pick >= 0) {
      int d = ws.deg[pick];
      int dd = std::min(d, cfg.delta_cap);
      double gamma = cfg.gamma_by_degree.at(dd);
      if (rng.uniform01() < gamma) {
        cover.push_back(pick);
        ws.remove(pick);
      } else {
        std::vector<int> nb = ws.alive_neighbors(pick);
        if (d >= cfg.delta_cap) nb.resize(cfg.delta_cap);
        for (int u : nb) {
          cover.push_back(u);
          ws.remove(u);
        }
      }
      continue;
    }

    // delta-regular: evaluate both endpoints of the lowest edge, keep smaller
    int v1 = lowest;
    int v2 = ws.alive_neighbors(v1)[0];
    WorkGraph w2 = ws;
    ws.remove(v1);
    std::vector<int> s1 = enhanced_solve(ws, cfg, rng, steps, step_cap);
    s1.push_back(v1);
    w2.remove(v2);
    std::vector<int> s2 = enhanced_solve(w2, cfg, rng, steps, step_cap);
    s2.push_back(v2);
    std::vector<int>& smaller = s2.size() < s1.size() ? s2 : s1;
    cover.insert(cover.end(), smaller.begin(), smaller.end());
    return cover;
  }
}

}  // namespace

CoverResult enhanced_vc3star_run(const Graph& g, const VcConfig& cfg, uint64_t seed) {
  cfg.check(VcAlgo::EnhancedVc3Star);
  g.validate();
  SplitMix64 rng(seed);
  WorkGraph ws(g);
  CoverResult res;
  res.seed_used = seed;
  long step_cap = 1000L + 64L * std::max(1, g.n());
  res.cover = enhanced_solve(ws, cfg, rng, res.recursion_steps, step_cap);
  std::sort(res.cover.begin(), res.cover.end());
  finish_check(g, res.cover);
  return res;
}

namespace {

std::vector<int> better_solve(WorkGraph& ws, const VcConfig& cfg, SplitMix64& rng,
                              long& steps, long step_cap) {
  std::vector<int> cover;
  for (;;) {
    if (++steps > step_cap) throw std::runtime_error("better_vc: step cap exceeded");
    if (ws.alive_edges == 0) return cover;

    int lowest = -1;
    for (int v = 0; v < ws.n() && lowest < 0; ++v)
      if (ws.alive[v]) lowest = v;
    std::vector<int> comp = ws.component_of(lowest);
    if (static_cast<long>(comp.size()) != ws.alive_count()) {
      WorkGraph rest = ws;
      ws.restrict_to(comp);
      std::vector<int> left = better_solve(ws, cfg, rng, steps, step_cap);
      std::vector<int> keep;
      for (int v = 0; v < rest.n(); ++v)
        if (rest.alive[v] && !std::binary_search(comp.begin(), comp.end(), v)) keep.push_back(v);
      rest.restrict_to(keep);
      std::vector<int> right = better_solve(rest, cfg, rng, steps, step_cap);
      cover.insert(cover.end(), left.begin(), left.end());
      cover.insert(cover.end(), right.begin(), right.end());
      return cover;
    }

    int deg1 = -1;
    for (int v = 0; v < ws.n() && deg1 < 0; ++v)
      if (ws.alive[v] && ws.deg[v] == 1) deg1 = v;
    if (deg1 >= 0) {
      int u = ws.alive_neighbors(deg1)[0];
      cover.push_back(u);
      ws.remove(u);
      continue;
    }

    int big = -1;
    for (int v = 0; v < ws.n() && big < 0; ++v)
      if (ws.alive[v] && ws.deg[v] >= 5) big = v;
    if (big >= 0) {
      int d = ws.deg[big];
      int dd = std::min(d, cfg.delta_cap);
      double gamma = cfg.gamma_by_degree.at(dd);
      if (rng.uniform01() < gamma) {
        cover.push_back(big);
        ws.remove(big);
      } else {
        std::vector<int> nb = ws.alive_neighbors(big);
        if (d >= cfg.delta_cap) nb.resize(cfg.delta_cap);
        for (int u : nb) {
          cover.push_back(u);
          ws.remove(u);
        }
      }
      continue;
    }

    bool regular = true;
    int d0 = -1;
    for (int v = 0; v < ws.n(); ++v)
      if (ws.alive[v]) {
        if (d0 < 0) d0 = ws.deg[v];
        else if (ws.deg[v] != d0) {
          regular = false;
          break;
        }
      }
    if (regular) {
      int v1 = lowest;
      int v2 = ws.alive_neighbors(v1)[0];
      WorkGraph w2 = ws;
      ws.remove(v1);
      std::vector<int> s1 = better_solve(ws, cfg, rng, steps, step_cap);
      s1.push_back(v1);
      w2.remove(v2);
      std::vector<int> s2 = better_solve(w2, cfg, rng, steps, step_cap);
      s2.push_back(v2);
      std::vector<int>& smaller = s2.size() < s1.size() ? s2 : s1;
      cover.insert(cover.end(), smaller.begin(), smaller.end());
      return cover;
    }

    int v2d = -1;
    for (int v = 0; v < ws.n() && v2d < 0; ++v)
      if (ws.alive[v] && ws.deg[v] == 2) v2d = v;
    if (v2d >= 0) {
      std::vector<int> nb = ws.alive_neighbors(v2d);
      int x = nb[0], y = nb[1];
      if (ws.g->has_edge(x, y)) {  // triangle: x,y cover all three edges
        cover.push_back(x);
        cover.push_back(y);
        ws.remove(x);
        ws.remove(y);
        continue;
      }
      std::vector<int> nx = ws.alive_neighbors(x), ny = ws.alive_neighbors(y);
      if (ws.deg[x] == 2 && ws.deg[y] == 2 && nx == ny) {  // twins around {z, v}
        int z = nx[0] == v2d ? nx[1] : nx[0];
        cover.push_back(z);
        cover.push_back(v2d);
        ws.remove(z);
        ws.remove(v2d);
        continue;
      }
      std::vector<int> un = nx;
      un.insert(un.end(), ny.begin(), ny.end());
      std::sort(un.begin(), un.end());
      un.erase(std::unique(un.begin(), un.end()), un.end());
      int r = static_cast<int>(un.size());
      double lam = cfg.lambda1.at(r);
      if (rng.uniform01() < lam) {
        for (int u : nb) {
          cover.push_back(u);
          ws.remove(u);
        }
      } else {
        for (int u : un) {
          cover.push_back(u);
          ws.remove(u);
        }
      }
      continue;
    }

    // degree-3 block; all alive degrees are now 3 or 4 and some vertex has
    // degree 3 (the graph is not regular)
    int va = -1, ea = -1, eb = -1;
    for (int v = 0; v < ws.n() && va < 0; ++v) {
      if (!ws.alive[v] || ws.deg[v] != 3) continue;
      std::vector<int> nb = ws.alive_neighbors(v);
      for (size_t i = 0; i < nb.size() && va < 0; ++i)
        for (size_t j = i + 1; j < nb.size(); ++j)
          if (ws.g->has_edge(nb[i], nb[j])) {
            va = v;
            ea = nb[i];
            eb = nb[j];
            break;
          }
    }
    if (va >= 0) {  // edge (x,y) inside N(v): branch N(v) vs N(z)
      std::vector<int> nb = ws.alive_neighbors(va);
      int z = -1;
      for (int u : nb)
        if (u != ea && u != eb) z = u;
      std::vector<int> nz = ws.alive_neighbors(z);
      int r = static_cast<int>(nz.size());
      double lam = cfg.lambda2.at(r);
      if (rng.uniform01() < lam) {
        for (int u : nb) {
          cover.push_back(u);
          ws.remove(u);
        }
      } else {
        for (int u : nz) {
          cover.push_back(u);
          ws.remove(u);
        }
      }
      continue;
    }

    int vb = -1, wb = -1;
    for (int v = 0; v < ws.n() && vb < 0; ++v) {
      if (!ws.alive[v] || ws.deg[v] != 3) continue;
      std::vector<int> nb = ws.alive_neighbors(v);
      for (int w = 0; w < ws.n() && vb < 0; ++w) {
        if (!ws.alive[w] || w == v) continue;
        if (std::binary_search(nb.begin(), nb.end(), w)) continue;
        int common = 0;
        for (int u : nb)
          if (ws.g->has_edge(w, u)) ++common;
        if (common >= 2) {
          vb = v;
          wb = w;
        }
      }
    }
    if (vb >= 0) {  // outside vertex w seeing two of N(v): branch N(v) vs {v,w}
      std::vector<int> nb = ws.alive_neighbors(vb);
      if (rng.uniform01() < cfg.lambda3) {
        for (int u : nb) {
          cover.push_back(u);
          ws.remove(u);
        }
      } else {
        cover.push_back(vb);
        cover.push_back(wb);
        ws.remove(vb);
        ws.remove(wb);
      }
      continue;
    }

    int vc = -1, xc = -1;
    for (int v = 0; v < ws.n() && vc < 0; ++v) {
      if (!ws.alive[v] || ws.deg[v] != 3) continue;
      for (int u : ws.alive_neighbors(v))
        if (ws.deg[u] == 4) {
          vc = v;
          xc = u;
          break;
        }
    }
    if (vc < 0) throw std::logic_error("better_vc: no degree-3 case applies");
    std::vector<int> nb = ws.alive_neighbors(vc);
    int y = -1, z = -1;
    for (int u : nb)
      if (u != xc) (y < 0 ? y : z) = u;
    std::vector<int> nyz = ws.alive_neighbors(y);
    for (int u : ws.alive_neighbors(z)) nyz.push_back(u);
    std::sort(nyz.begin(), nyz.end());
    nyz.erase(std::unique(nyz.begin(), nyz.end()), nyz.end());
    int r = static_cast<int>(nyz.size());
    const std::array<double, 3>& dl = cfg.delta3way.at(r);
    double u01 = rng.uniform01();
    std::vector<int> chosen;
    if (u01 < dl[0]) {
      chosen = nb;
    } else if (u01 < dl[0] + dl[1]) {
      chosen = ws.alive_neighbors(xc);
    } else {
      chosen = nyz;
      chosen.push_back(xc);
      std::sort(chosen.begin(), chosen.end());
      chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
    }
    for (int u : chosen) {
      cover.push_back(u);
      ws.remove(u);
    }
  }
}

}  // namespace

CoverResult better_vc_run(const Graph& g, const VcConfig& cfg, uint64_t seed) {
  cfg.check(VcAlgo::BetterVc);
  g.validate();
  SplitMix64 rng(seed);
  WorkGraph ws(g);
  CoverResult res;
  res.seed_used = seed;
  long step_cap = 1000L + 64L * std::max(1, g.n());
  res.cover = better_solve(ws, cfg, rng, res.recursion_steps, step_cap);
  std::sort(res.cover.begin(), res.cover.end());
  finish_check(g, res.cover);
  return res;
}

CoverResult run_vc_algo(VcAlgo algo, const Graph& g, const VcConfig& cfg, uint64_t seed) {
  switch (algo) {
    case VcAlgo::Vc3: return vc3_run(g, cfg.gamma_by_degree.at(3), seed);
    case VcAlgo::Vc3Star: return vc3star_run(g, cfg, seed);
    case VcAlgo::EnhancedVc3Star: return enhanced_vc3star_run(g, cfg, seed);
    case VcAlgo::BetterVc: return better_vc_run(g, cfg, seed);
  }
  throw std::logic_error("run_vc_algo: bad selector");
}

namespace {

Distribution two(double g) { return Distribution({g, 1.0 - g}); }

void push_degree_terms(CompositeRecurrence& rec, const VcConfig& cfg, int d) {
  double gd = cfg.gamma_by_degree.at(d);
  if (d < cfg.delta_cap) {
    rec.terms.emplace_back(std::vector<int>{1, d}, std::vector<int>{1, 1}, two(gd));
    rec.terms.emplace_back(std::vector<int>{1, d}, std::vector<int>{0, d}, two(gd));
  } else {
    rec.terms.emplace_back(std::vector<int>{1, d}, std::vector<int>{1, 0}, two(gd));
    rec.terms.emplace_back(std::vector<int>{1, d}, std::vector<int>{0, d}, two(gd));
  }
}

}  // namespace

CompositeRecurrence build_recurrence(VcAlgo algo, const VcConfig& cfg) {
  cfg.check(algo);
  CompositeRecurrence rec;
  const int D = cfg.delta_cap;
  switch (algo) {
    case VcAlgo::Vc3: {
      double g3 = cfg.gamma_by_degree.at(3);
      rec.terms.emplace_back(std::vector<int>{1, 3}, std::vector<int>{1, 0}, two(g3));
      rec.terms.emplace_back(std::vector<int>{1, 3}, std::vector<int>{0, 3}, two(g3));
      break;
    }
    case VcAlgo::Vc3Star:
      for (int d = 3; d <= D; ++d) push_degree_terms(rec, cfg, d);
      break;
    case VcAlgo::EnhancedVc3Star: {
      int del = *cfg.excluded_degree;
      for (int d = 2; d <= D; ++d)
        if (d != del) push_degree_terms(rec, cfg, d);
      // deterministic degree-1 / regular-split row
      rec.terms.emplace_back(std::vector<int>{1}, std::vector<int>{1}, Distribution({1.0}));
      break;
    }
    case VcAlgo::BetterVc: {
      rec.terms.emplace_back(std::vector<int>{1}, std::vector<int>{1}, Distribution({1.0}));
      rec.terms.emplace_back(std::vector<int>{2}, std::vector<int>{2}, Distribution({1.0}));
      for (int d = 5; d <= D; ++d) push_degree_terms(rec, cfg, d);
      for (int r = 3; r <= 7; ++r) {
        double l = cfg.lambda1.at(r);
        rec.terms.emplace_back(std::vector<int>{2, r}, std::vector<int>{2, 2}, two(l));
        rec.terms.emplace_back(std::vector<int>{2, r}, std::vector<int>{1, r}, two(l));
      }
      for (int r = 3; r <= 4; ++r) {
        double l = cfg.lambda2.at(r);
        rec.terms.emplace_back(std::vector<int>{3, r}, std::vector<int>{3, 1}, two(l));
        rec.terms.emplace_back(std::vector<int>{3, r}, std::vector<int>{1, r}, two(l));
      }
      rec.terms.emplace_back(std::vector<int>{3, 2}, std::vector<int>{3, 0}, two(cfg.lambda3));
      rec.terms.emplace_back(std::vector<int>{3, 2}, std::vector<int>{1, 2}, two(cfg.lambda3));
      for (int r = 5; r <= 7; ++r) {
        const auto& dl = cfg.delta3way.at(r);
        Distribution d3({dl[0], dl[1], dl[2]});
        int half = 1 + (r + 1) / 2;
        rec.terms.emplace_back(std::vector<int>{3, 4, r + 1}, std::vector<int>{3, 1, 3}, d3);
        rec.terms.emplace_back(std::vector<int>{3, 4, r + 1}, std::vector<int>{1, 4, r}, d3);
        rec.terms.emplace_back(std::vector<int>{3, 4, r + 1}, std::vector<int>{2, 4, half}, d3);
        rec.terms.emplace_back(std::vector<int>{3, 4, r + 1}, std::vector<int>{2, 2, r + 1}, d3);
      }
      break;
    }
  }
  return rec;
}

ExcludedDegreeResult choose_excluded_degree(double alpha, int delta_cap, double tol) {
  if (!(alpha > 1.0)) throw std::invalid_argument("choose_excluded_degree: alpha must be > 1");
  ExcludedDegreeResult out;
  for (int d = 2; d < delta_cap; ++d)
    out.per_degree.emplace_back(d, optimize_simple_rule(1, d, 0, 1, alpha, tol).m_star);
  out.per_degree.emplace_back(delta_cap, optimize_simple_rule(1, delta_cap, 0, 0, alpha, tol).m_star);
  int argmax = -1;
  double best = -1.0;
  for (const auto& [d, m] : out.per_degree)
    if (m > best + 1e-15) {
      best = m;
      argmax = d;
    }
  if (argmax == delta_cap) {
    out.excluded.reset();
    out.m = best;
  } else {
    out.excluded = argmax;
    double second = 0.0;
    for (const auto& [d, m] : out.per_degree)
      if (d != argmax) second = std::max(second, m);
    out.m = second;
  }
  return out;
}

VcConfig make_optimized_config(VcAlgo algo, double alpha, int delta_cap, double tol) {
  VcConfig cfg;
  cfg.delta_cap = delta_cap;
  auto deg_gamma = [&](int d) {
    OptimizedRule r = d < delta_cap ? optimize_simple_rule(1, d, 0, 1, alpha, tol)
                                    : optimize_simple_rule(1, delta_cap, 0, 0, alpha, tol);
    return r.gamma_star[0];
  };
  switch (algo) {
    case VcAlgo::Vc3:
      cfg.gamma_by_degree[3] = optimize_simple_rule(1, 3, 0, 0, alpha, tol).gamma_star[0];
      break;
    case VcAlgo::Vc3Star:
      for (int d = 3; d <= delta_cap; ++d) cfg.gamma_by_degree[d] = deg_gamma(d);
      break;
    case VcAlgo::EnhancedVc3Star: {
      ExcludedDegreeResult ex = choose_excluded_degree(alpha, delta_cap, tol);
      cfg.excluded_degree = ex.excluded;
      for (int d = 2; d <= delta_cap; ++d)
        if (!ex.excluded || d != *ex.excluded) cfg.gamma_by_degree[d] = deg_gamma(d);
      break;
    }
    case VcAlgo::BetterVc: {
      for (int d = 5; d <= delta_cap; ++d) cfg.gamma_by_degree[d] = deg_gamma(d);
      for (int r = 3; r <= 7; ++r)
        cfg.lambda1[r] = optimize_simple_rule(2, r, 1, 2, alpha, tol).gamma_star[0];
      for (int r = 3; r <= 4; ++r)
        cfg.lambda2[r] = optimize_simple_rule(3, r, 1, 1, alpha, tol).gamma_star[0];
      cfg.lambda3 = optimize_simple_rule(3, 2, 1, 0, alpha, tol).gamma_star[0];
      for (int r = 5; r <= 7; ++r) {
        RuleSpec spec;
        spec.name = "three_way_" + std::to_string(r);
        spec.b = {3, 4, r + 1};
        spec.states = {{3, 1, 3}, {1, 4, r}, {2, 4, 1 + (r + 1) / 2}, {2, 2, r + 1}};
        OptimizedRule opt = optimize_rule_generic(spec, alpha);
        cfg.delta3way[r] = {opt.gamma_star[0], opt.gamma_star[1], opt.gamma_star[2]};
      }
      break;
    }
  }
  return cfg;
}

ApproxResult alpha_approx(const Graph& g, int k, double alpha, VcAlgo algo,
                          const CompositeRecurrence& rec, const VcConfig& cfg,
                          double repeat_multiplier, uint64_t seed, long max_trials) {
  if (k < 0) throw std::invalid_argument("alpha_approx: k must be >= 0");
  int b = static_cast<int>(std::floor(alpha * k));
  DpTable table = dp_eval(rec, std::max(b, 0), k);
  double r = std::exp(table.log_p(b, k));
  ApproxResult out;
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
    CoverResult res = run_vc_algo(algo, g, cfg, ts);
    if (t == 0 || res.cover.size() < out.best.cover.size()) out.best = std::move(res);
  }
  out.success = static_cast<int>(out.best.cover.size()) <= b;
  return out;
}

VcConfig vc_config_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  VcConfig cfg;
  cfg.delta_cap = j.value("delta_cap", 100);
  if (j.contains("excluded_degree") && !j["excluded_degree"].is_null())
    cfg.excluded_degree = j["excluded_degree"].get<int>();
  if (j.contains("gamma_by_degree"))
    for (auto& [k, v] : j["gamma_by_degree"].items())
      cfg.gamma_by_degree[std::stoi(k)] = v.get<double>();
  if (j.contains("lambda1"))
    for (auto& [k, v] : j["lambda1"].items()) cfg.lambda1[std::stoi(k)] = v.get<double>();
  if (j.contains("lambda2"))
    for (auto& [k, v] : j["lambda2"].items()) cfg.lambda2[std::stoi(k)] = v.get<double>();
  cfg.lambda3 = j.value("lambda3", 0.5);
  if (j.contains("delta3way"))
    for (auto& [k, v] : j["delta3way"].items()) {
      auto a = v.get<std::vector<double>>();
      if (a.size() != 3) throw std::invalid_argument("delta3way entries need 3 values");
      cfg.delta3way[std::stoi(k)] = {a[0], a[1], a[2]};
    }
  cfg.rng_seed = j.value("rng_seed", uint64_t{1});
  return cfg;
}

std::string vc_config_to_json(const VcConfig& cfg) {
  nlohmann::json j;
  j["delta_cap"] = cfg.delta_cap;
  if (cfg.excluded_degree) j["excluded_degree"] = *cfg.excluded_degree;
  nlohmann::json gb;
  for (const auto& [d, g] : cfg.gamma_by_degree) gb[std::to_string(d)] = g;
  j["gamma_by_degree"] = std::move(gb);
  nlohmann::json l1, l2, d3;
  for (const auto& [r, l] : cfg.lambda1) l1[std::to_string(r)] = l;
  for (const auto& [r, l] : cfg.lambda2) l2[std::to_string(r)] = l;
  for (const auto& [r, a] : cfg.delta3way) d3[std::to_string(r)] = std::vector<double>{a[0], a[1], a[2]};
  j["lambda1"] = std::move(l1);
  j["lambda2"] = std::move(l2);
  j["lambda3"] = cfg.lambda3;
  j["delta3way"] = std::move(d3);
  j["rng_seed"] = cfg.rng_seed;
  return j.dump(2);
}

}  // namespace branchrate
