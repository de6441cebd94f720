#include "branchrate/hypergraph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace branchrate {

void Hypergraph3::add_edge(std::vector<int> e) {
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
  if (e.empty() || e.size() > 3) throw std::invalid_argument("Hypergraph3: edge size not in 1..3");
  for (int v : e)
    if (v < 0 || v >= n_) throw std::out_of_range("Hypergraph3: vertex out of range");
  if (std::find(edges_.begin(), edges_.end(), e) != edges_.end())
    throw std::invalid_argument("Hypergraph3: duplicate edge");
  edges_.push_back(std::move(e));
}

int Hypergraph3::degree(int v) const {
  int d = 0;
  for (const auto& e : edges_)
    if (std::binary_search(e.begin(), e.end(), v)) ++d;
  return d;
}

bool Hypergraph3::is_hitting_set(const std::vector<int>& s) const {
  std::set<int> in(s.begin(), s.end());
  for (const auto& e : edges_) {
    bool hit = false;
    for (int v : e)
      if (in.count(v)) {
        hit = true;
        break;
      }
    if (!hit) return false;
  }
  return true;
}

Hypergraph3 hypergraph_from_text(std::istream& in) {
  std::string line;
  int lineno = 0, n = -1;
  Hypergraph3 h;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag)) continue;
    if (tag == "c") continue;
    if (tag == "p") {
      std::string fmt;
      long m;
      if (!(ss >> fmt >> n >> m) || fmt != "hs" || n < 0)
        throw std::runtime_error("hypergraph: bad problem line at line " + std::to_string(lineno));
      h = Hypergraph3(n);
    } else if (tag == "e") {
      if (n < 0)
        throw std::runtime_error("hypergraph: edge before problem line at line " +
                                 std::to_string(lineno));
      std::vector<int> e;
      int v;
      while (ss >> v) {
        if (v < 1 || v > n)
          throw std::runtime_error("hypergraph: bad vertex at line " + std::to_string(lineno));
        e.push_back(v - 1);
      }
      if (e.empty() || e.size() > 3)
        throw std::runtime_error("hypergraph: edge size not in 1..3 at line " +
                                 std::to_string(lineno));
      h.add_edge(std::move(e));
    } else {
      throw std::runtime_error("hypergraph: unknown record '" + tag + "' at line " +
                               std::to_string(lineno));
    }
  }
  if (n < 0) throw std::runtime_error("hypergraph: missing problem line");
  return h;
}

Hypergraph3 hypergraph_from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  return hypergraph_from_text(f);
}

void hypergraph_to_text(const Hypergraph3& h, std::ostream& out) {
  out << "p hs " << h.n() << ' ' << h.edges().size() << '\n';
  for (const auto& e : h.edges()) {
    out << 'e';
    for (int v : e) out << ' ' << v + 1;
    out << '\n';
  }
}

void SmallHypergraph::check_valid(int delta_cap) const {
  if (edges.empty() || static_cast<int>(edges.size()) > delta_cap)
    throw std::invalid_argument("SmallHypergraph: edge count not in 1..delta");
  std::set<std::vector<int>> seen;
  std::vector<char> touched(vertices, 0);
  for (const auto& e : edges) {
    if (e.empty() || e.size() > 2) throw std::invalid_argument("SmallHypergraph: edge size");
    if (!std::is_sorted(e.begin(), e.end()) || (e.size() == 2 && e[0] == e[1]))
      throw std::invalid_argument("SmallHypergraph: malformed edge");
    for (int v : e) {
      if (v < 0 || v >= vertices) throw std::out_of_range("SmallHypergraph: vertex range");
      touched[v] = 1;
    }
    if (!seen.insert(e).second) throw std::invalid_argument("SmallHypergraph: duplicate edge");
  }
  for (char t : touched)
    if (!t) throw std::invalid_argument("SmallHypergraph: isolated vertex");
}

bool SmallHypergraph::hits_all(const std::vector<int>& s) const {
  for (const auto& e : edges) {
    bool hit = false;
    for (int v : e)
      if (std::find(s.begin(), s.end(), v) != s.end()) {
        hit = true;
        break;
      }
    if (!hit) return false;
  }
  return true;
}

namespace {

InducedResult build_from_edges(const Hypergraph3& h, int v,
                               const std::vector<const std::vector<int>*>& at_v) {
  std::map<int, int> relabel;
  std::vector<int> to_host;
  SmallHypergraph g;
  for (const auto* e : at_v) {
    std::vector<int> ne;
    for (int u : *e)
      if (u != v) {
        auto it = relabel.find(u);
        if (it == relabel.end()) {
          it = relabel.emplace(u, static_cast<int>(to_host.size())).first;
          to_host.push_back(u);
        }
        ne.push_back(it->second);
      }
    if (ne.empty()) throw std::invalid_argument("induced/neighbors graph: singleton edge at v");
    std::sort(ne.begin(), ne.end());
    g.edges.push_back(std::move(ne));
  }
  g.vertices = static_cast<int>(to_host.size());
  return {std::move(g), std::move(to_host)};
}

}  // namespace

InducedResult neighbors_graph(const Hypergraph3& h, int v) {
  std::vector<const std::vector<int>*> at_v;
  for (const auto& e : h.edges())
    if (std::binary_search(e.begin(), e.end(), v)) at_v.push_back(&e);
  if (at_v.empty()) throw std::invalid_argument("neighbors_graph: isolated vertex");
  return build_from_edges(h, v, at_v);
}

InducedResult induced_graph(const Hypergraph3& h, int v, const std::vector<int>& f) {
  std::vector<const std::vector<int>*> sel;
  for (int idx : f) {
    if (idx < 0 || idx >= static_cast<int>(h.edges().size()))
      throw std::out_of_range("induced_graph: edge index");
    const auto& e = h.edges()[idx];
    if (!std::binary_search(e.begin(), e.end(), v))
      throw std::invalid_argument("induced_graph: edge does not contain v");
    sel.push_back(&e);
  }
  if (sel.empty()) throw std::invalid_argument("induced_graph: empty edge set");
  return build_from_edges(h, v, sel);
}

}  // namespace branchrate
