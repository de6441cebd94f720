#include "branchrate/hs_catalog.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <future>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace branchrate {

namespace {

// one connected component in local labels
struct Component {
  std::vector<int> verts;                 // host labels, sorted
  std::vector<std::vector<int>> edges;    // local labels into verts
};

std::vector<Component> split_components(const SmallHypergraph& g) {
  std::vector<int> parent(g.vertices);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : g.edges)
    if (e.size() == 2) parent[find(e[0])] = find(e[1]);
  std::map<int, Component> by_root;
  for (int v = 0; v < g.vertices; ++v) by_root[find(v)].verts.push_back(v);
  for (auto& [root, comp] : by_root) std::sort(comp.verts.begin(), comp.verts.end());
  for (const auto& e : g.edges) {
    Component& c = by_root[find(e[0])];
    std::vector<int> local;
    for (int v : e)
      local.push_back(static_cast<int>(
          std::lower_bound(c.verts.begin(), c.verts.end(), v) - c.verts.begin()));
    std::sort(local.begin(), local.end());
    c.edges.push_back(std::move(local));
  }
  std::vector<Component> out;
  for (auto& [root, comp] : by_root) out.push_back(std::move(comp));
  return out;
}

using Encoding = std::vector<std::vector<int>>;

Encoding encode_edges(const std::vector<std::vector<int>>& edges, const std::vector<int>& label) {
  Encoding enc;
  enc.reserve(edges.size());
  for (const auto& e : edges) {
    std::vector<int> ne;
    for (int v : e) ne.push_back(label[v]);
    std::sort(ne.begin(), ne.end());
    enc.push_back(std::move(ne));
  }
  std::sort(enc.begin(), enc.end());
  return enc;
}

// canonical labeling of one component: color refinement, then exhaustive
// search over the class-preserving permutations for the smallest encoding
std::pair<Encoding, std::vector<int>> canonical_component(const Component& comp) {
  int n = static_cast<int>(comp.verts.size());
  std::vector<int> single(n, 0), deg2(n, 0);
  std::vector<std::vector<int>> nbr(n);
  for (const auto& e : comp.edges) {
    if (e.size() == 1) ++single[e[0]];
    else {
      ++deg2[e[0]];
      ++deg2[e[1]];
      nbr[e[0]].push_back(e[1]);
      nbr[e[1]].push_back(e[0]);
    }
  }
  std::vector<long> color(n);
  for (int v = 0; v < n; ++v) color[v] = single[v] * 64 + deg2[v];
  for (int round = 0; round < n; ++round) {
    std::vector<std::pair<std::vector<long>, int>> sig(n);
    for (int v = 0; v < n; ++v) {
      std::vector<long> s{color[v]};
      std::vector<long> ns;
      for (int u : nbr[v]) ns.push_back(color[u]);
      std::sort(ns.begin(), ns.end());
      s.insert(s.end(), ns.begin(), ns.end());
      sig[v] = {std::move(s), v};
    }
    std::vector<std::pair<std::vector<long>, int>> sorted = sig;
    std::sort(sorted.begin(), sorted.end());
    std::vector<long> next(n);
    long c = 0;
    for (int i = 0; i < n; ++i) {
      if (i > 0 && sorted[i].first != sorted[i - 1].first) ++c;
      next[sorted[i].second] = c;
    }
    if (next == color) break;
    color = next;
  }
  // vertices grouped by color; class order follows color order
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return color[a] < color[b]; });
  std::vector<std::pair<int, int>> classes;  // [start, end) into order
  for (int i = 0; i < n;) {
    int j = i;
    while (j < n && color[order[j]] == color[order[i]]) ++j;
    classes.emplace_back(i, j);
    i = j;
  }
  Encoding best;
  std::vector<int> best_label;
  std::vector<int> label(n);
  std::function<void(size_t)> rec = [&](size_t ci) {
    if (ci == classes.size()) {
      Encoding enc = encode_edges(comp.edges, label);
      if (best.empty() || enc < best) {
        best = std::move(enc);
        best_label = label;
      }
      return;
    }
    auto [s, e] = classes[ci];
    std::vector<int> cls(order.begin() + s, order.begin() + e);
    std::sort(cls.begin(), cls.end());
    do {
      for (int i = 0; i < e - s; ++i) label[cls[i]] = s + i;
      rec(ci + 1);
    } while (std::next_permutation(cls.begin(), cls.end()));
  };
  rec(0);
  return {best, best_label};
}

std::string encoding_key(int verts, const Encoding& enc) {
  std::ostringstream os;
  os << 'v' << verts << '|';
  for (const auto& e : enc) {
    for (size_t i = 0; i < e.size(); ++i) os << (i ? "," : "") << e[i];
    os << ';';
  }
  return os.str();
}

}  // namespace

CanonicalForm canonical_form(const SmallHypergraph& g) {
  std::vector<Component> comps = split_components(g);
  struct Piece {
    Encoding enc;
    int nverts;
    const Component* comp;
    std::vector<int> local_label;
  };
  std::vector<Piece> pieces;
  for (const Component& c : comps) {
    auto [enc, label] = canonical_component(c);
    pieces.push_back({std::move(enc), static_cast<int>(c.verts.size()), &c, std::move(label)});
  }
  std::sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) {
    if (a.nverts != b.nverts) return a.nverts < b.nverts;
    return a.enc < b.enc;
  });
  CanonicalForm out;
  out.relabel.assign(g.vertices, -1);
  int offset = 0;
  Encoding all;
  for (const Piece& p : pieces) {
    for (size_t i = 0; i < p.comp->verts.size(); ++i)
      out.relabel[p.comp->verts[i]] = offset + p.local_label[i];
    for (const auto& e : p.enc) {
      std::vector<int> ne;
      for (int v : e) ne.push_back(v + offset);
      all.push_back(std::move(ne));
    }
    offset += p.nverts;
  }
  std::sort(all.begin(), all.end());
  out.canonical.vertices = g.vertices;
  out.canonical.edges = all;
  out.key = encoding_key(g.vertices, all);
  return out;
}

std::vector<std::vector<int>> minimal_hitting_sets(const SmallHypergraph& g) {
  int n = g.vertices;
  if (n > 20) throw std::invalid_argument("minimal_hitting_sets: too many vertices");
  std::vector<unsigned> masks;
  for (const auto& e : g.edges) {
    unsigned m = 0;
    for (int v : e) m |= 1u << v;
    masks.push_back(m);
  }
  std::vector<unsigned> sols;
  std::vector<unsigned> by_size[21];
  for (unsigned s = 0; s < (1u << n); ++s) by_size[__builtin_popcount(s)].push_back(s);
  for (int size = 0; size <= n; ++size)
    for (unsigned s : by_size[size]) {
      bool hits = true;
      for (unsigned m : masks)
        if (!(s & m)) {
          hits = false;
          break;
        }
      if (!hits) continue;
      bool minimal = true;
      for (unsigned prev : sols)
        if ((prev & s) == prev) {
          minimal = false;
          break;
        }
      if (minimal) sols.push_back(s);
    }
  std::vector<std::vector<int>> out;
  for (unsigned s : sols) {
    std::vector<int> set;
    for (int v = 0; v < n; ++v)
      if (s >> v & 1) set.push_back(v);
    out.push_back(std::move(set));
  }
  return out;
}

const CatalogEntry* Catalog::find(const std::string& key) const {
  auto it = lookup.find(key);
  return it == lookup.end() ? nullptr : &entries[it->second];
}

Catalog generate_catalog(int delta, int threads) {
  if (delta < 1) throw std::invalid_argument("generate_catalog: delta must be >= 1");
  if (delta > 7) throw std::invalid_argument("generate_catalog: delta > 7 exceeds the resource cap");
  Catalog cat;
  cat.delta = delta;

  std::map<std::string, SmallHypergraph> level;
  {
    SmallHypergraph a{1, {{0}}};
    SmallHypergraph b{2, {{0, 1}}};
    level[canonical_form(a).key] = a;
    level[canonical_form(b).key] = b;
  }
  std::vector<SmallHypergraph> reps;
  for (auto& [k, g] : level) reps.push_back(g);

  std::map<std::string, SmallHypergraph> all = level;
  for (int c = 2; c <= delta; ++c) {
    std::vector<SmallHypergraph> parents;
    for (auto& [k, g] : level) parents.push_back(g);
    // children of one parent: add one new edge over existing + <=2 fresh vertices
    auto expand = [&](const SmallHypergraph& g) {
      std::vector<std::pair<std::string, SmallHypergraph>> found;
      int nv = g.vertices;
      auto try_edge = [&](std::vector<int> e) {
        SmallHypergraph child = g;
        std::sort(e.begin(), e.end());
        if (std::find(child.edges.begin(), child.edges.end(), e) != child.edges.end()) return;
        int mx = nv;
        for (int v : e) mx = std::max(mx, v + 1);
        if (mx > 2 * delta) return;
        child.vertices = mx;
        child.edges.push_back(e);
        CanonicalForm cf = canonical_form(child);
        found.emplace_back(cf.key, cf.canonical);
      };
      for (int u = 0; u <= nv; ++u) try_edge({u});  // u == nv is a fresh singleton
      for (int u = 0; u < nv; ++u)
        for (int w = u + 1; w < nv; ++w) try_edge({u, w});
      for (int u = 0; u < nv; ++u) try_edge({u, nv});
      try_edge({nv, nv + 1});
      return found;
    };

    std::map<std::string, SmallHypergraph> next;
    int nthreads = threads > 0 ? threads : 1;
    if (nthreads > 1 && parents.size() > 8) {
      std::vector<std::future<std::vector<std::pair<std::string, SmallHypergraph>>>> futs;
      size_t chunk = (parents.size() + nthreads - 1) / nthreads;
      for (size_t s = 0; s < parents.size(); s += chunk) {
        size_t e = std::min(parents.size(), s + chunk);
        futs.push_back(std::async(std::launch::async, [&, s, e] {
          std::vector<std::pair<std::string, SmallHypergraph>> acc;
          for (size_t i = s; i < e; ++i) {
            auto f = expand(parents[i]);
            acc.insert(acc.end(), f.begin(), f.end());
          }
          return acc;
        }));
      }
      for (auto& f : futs)
        for (auto& [k, g] : f.get()) next.emplace(k, g);
    } else {
      for (const auto& p : parents)
        for (auto& [k, g] : expand(p)) next.emplace(k, g);
    }
    level = std::move(next);
    for (auto& [k, g] : level) all.emplace(k, g);
  }

  // entries ordered by edge count, then key, for a reproducible catalog
  std::vector<std::pair<std::string, SmallHypergraph>> ordered(all.begin(), all.end());
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    if (a.second.edges.size() != b.second.edges.size())
      return a.second.edges.size() < b.second.edges.size();
    return a.first < b.first;
  });
  for (auto& [key, g] : ordered) {
    CatalogEntry e;
    e.canonical = g;
    e.hitting_sets = minimal_hitting_sets(g);
    cat.lookup[key] = cat.entries.size();
    cat.entries.push_back(std::move(e));
  }
  return cat;
}

Catalog catalog_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  Catalog cat;
  cat.delta = j.at("delta").get<int>();
  for (const auto& je : j.at("entries")) {
    CatalogEntry e;
    e.canonical.vertices = je.at("vertices").get<int>();
    e.canonical.edges = je.at("edges").get<std::vector<std::vector<int>>>();
    e.hitting_sets = je.at("hitting_sets").get<std::vector<std::vector<int>>>();
    if (je.contains("gamma") && !je["gamma"].is_null())
      e.gamma = Distribution(je["gamma"].get<std::vector<double>>());
    e.canonical.check_valid(cat.delta);
    std::string key = canonical_form(e.canonical).key;
    cat.lookup[key] = cat.entries.size();
    cat.entries.push_back(std::move(e));
  }
  return cat;
}

std::string catalog_to_json(const Catalog& cat) {
  nlohmann::json entries = nlohmann::json::array();
  for (const CatalogEntry& e : cat.entries) {
    nlohmann::json je;
    je["vertices"] = e.canonical.vertices;
    je["edges"] = e.canonical.edges;
    je["hitting_sets"] = e.hitting_sets;
    if (e.gamma) je["gamma"] = e.gamma->weights();
    entries.push_back(std::move(je));
  }
  nlohmann::json j;
  j["delta"] = cat.delta;
  j["entries"] = std::move(entries);
  return j.dump();
}

Catalog catalog_from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return catalog_from_json(ss.str());
}

void catalog_to_file(const Catalog& cat, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << catalog_to_json(cat) << '\n';
}

}  // namespace branchrate
