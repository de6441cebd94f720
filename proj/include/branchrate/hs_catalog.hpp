#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "branchrate/hypergraph.hpp"
#include "branchrate/recurrence.hpp"

namespace branchrate {

// Relabeling-invariant key plus the permutation old->canonical that realizes
// it. Components are canonicalized independently (color refinement, then
// exhaustive search within the refined classes) and merged in sorted order.
struct CanonicalForm {
  std::string key;
  std::vector<int> relabel;  // old label -> canonical label
  SmallHypergraph canonical;
};

CanonicalForm canonical_form(const SmallHypergraph& g);

struct CatalogEntry {
  SmallHypergraph canonical;
  std::vector<std::vector<int>> hitting_sets;  // all minimal, each sorted
  std::optional<Distribution> gamma;           // length m+1; last = pick-v
};

struct Catalog {
  int delta = 0;
  std::vector<CatalogEntry> entries;
  std::unordered_map<std::string, size_t> lookup;  // canonical key -> index

  const CatalogEntry* find(const std::string& key) const;
};

// All minimal hitting sets by subset enumeration in increasing size with a
// minimality filter. Exposed for the catalog invariants.
std::vector<std::vector<int>> minimal_hitting_sets(const SmallHypergraph& g);

// Enumerates the non-isomorphic SmallHypergraphs with 1..delta edges by
// extending canonical representatives one edge at a time and deduplicating by
// canonical key, then computes their minimal hitting sets. delta <= 7.
Catalog generate_catalog(int delta, int threads = 0);

// Catalog file: {"delta":int,"entries":[{"vertices":n,"edges":[[..]..],
//   "hitting_sets":[[..]..],"gamma":[..]?}]}
Catalog catalog_from_json(const std::string& text);
std::string catalog_to_json(const Catalog& cat);
Catalog catalog_from_file(const std::string& path);
void catalog_to_file(const Catalog& cat, const std::string& path);

}  // namespace branchrate
