#include <cmath>
#include <set>
#include <sstream>

#include "branchrate/graph.hpp"
#include "branchrate/rng.hpp"
#include "branchrate/vc_solvers.hpp"
#include "branchrate/verify.hpp"
#include "doctest.h"

using namespace branchrate;

namespace {

Graph path(int n) {
  Graph g(n);
  for (int i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
  return g;
}

Graph cycle(int n) {
  Graph g = path(n);
  g.add_edge(n - 1, 0);
  return g;
}

Graph complete(int n) {
  Graph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) g.add_edge(i, j);
  return g;
}

Graph petersen() {
  Graph g(10);
  for (int i = 0; i < 5; ++i) {
    g.add_edge(i, (i + 1) % 5);        // outer cycle
    g.add_edge(i, i + 5);              // spokes
    g.add_edge(i + 5, (i + 2) % 5 + 5);  // inner pentagram
  }
  return g;
}

Graph random_graph(SplitMix64& rng, int n, double p) {
  Graph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.uniform01() < p) g.add_edge(i, j);
  return g;
}

}  // namespace

TEST_CASE("dimacs io") {
  std::istringstream in("c comment\np edge 4 3\ne 1 2\ne 2 3\ne 3 4\n");
  Graph g = graph_from_dimacs(in);
  CHECK(g.n() == 4);
  CHECK(g.edge_count() == 3);
  CHECK(g.has_edge(0, 1));
  std::ostringstream out;
  graph_to_dimacs(g, out);
  CHECK(out.str() == "p edge 4 3\ne 1 2\ne 2 3\ne 3 4\n");

  std::istringstream bad("p edge 3 1\ne 1 9\n");
  CHECK_THROWS_WITH_AS(graph_from_dimacs(bad), doctest::Contains("line 2"), std::runtime_error);
  std::istringstream noheader("e 1 2\n");
  CHECK_THROWS(graph_from_dimacs(noheader));
}

TEST_CASE("max_deg2_exact on paths and cycles") {
  CHECK(max_deg2_exact(cycle(5)).size() == 3);
  CHECK(max_deg2_exact(path(4)).size() == 2);
  CHECK(max_deg2_exact(Graph(6)).empty());
  CHECK_THROWS(max_deg2_exact(complete(4)));

  // against the exhaustive solver on random degree-<=2 graphs
  SplitMix64 rng(11);
  for (int c = 0; c < 30; ++c) {
    int n = 3 + static_cast<int>(rng.below(10));
    Graph g(n);
    // random union of disjoint paths/cycles
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    for (int i = 0; i + 1 < n; ++i)
      if (rng.uniform01() < 0.6) g.add_edge(perm[i], perm[i + 1]);
    CHECK(static_cast<int>(max_deg2_exact(g).size()) == exact_min_cover(g));
  }
}

TEST_CASE("vc3 run") {
  CHECK(vc3_run(Graph(0), 0.5, 1).cover.empty());
  CHECK(vc3_run(Graph(5), 0.5, 1).cover.empty());

  // P5 has max degree 2: deterministic exact result
  for (uint64_t seed : {1ULL, 2ULL, 99ULL}) {
    CoverResult r = vc3_run(path(5), 0.5, seed);
    CHECK(r.cover.size() == 2);
  }

  // star K_{1,5}: any run returns a valid cover
  Graph star(6);
  for (int i = 1; i < 6; ++i) star.add_edge(0, i);
  for (uint64_t seed = 0; seed < 20; ++seed) {
    CoverResult r = vc3_run(star, 0.5, seed);
    CHECK(star.is_vertex_cover(r.cover));
  }
  CHECK_THROWS(vc3_run(star, 0.0, 1));
}

TEST_CASE("vc3star run") {
  VcConfig cfg = make_optimized_config(VcAlgo::Vc3Star, 1.5, 100);
  CHECK(vc3star_run(cycle(6), cfg, 3).cover.size() == 3);  // exact on degree <= 2
  CoverResult r = vc3star_run(complete(4), cfg, 7);
  CHECK(complete(4).is_vertex_cover(r.cover));
  CHECK(r.cover.size() >= 3);

  VcConfig missing;
  missing.delta_cap = 100;
  CHECK_THROWS(vc3star_run(complete(4), missing, 1));
}

TEST_CASE("enhanced vc3star run") {
  VcConfig cfg = make_optimized_config(VcAlgo::EnhancedVc3Star, 1.5, 100);
  REQUIRE(cfg.excluded_degree.has_value());
  CHECK(*cfg.excluded_degree == 5);

  // C4 with excluded degree 2: the double branch fires and finds the optimum
  VcConfig c4cfg = cfg;
  c4cfg.excluded_degree = 2;
  c4cfg.gamma_by_degree[5] = 0.8;  // degree 5 is no longer the excluded one
  CoverResult r = enhanced_vc3star_run(cycle(4), c4cfg, 5);
  CHECK(r.cover.size() == 2);

  // disconnected graph: union of per-component covers
  Graph two(8);
  two.add_edge(0, 1);
  two.add_edge(1, 2);  // P3
  two.add_edge(4, 5);
  two.add_edge(5, 6);
  two.add_edge(6, 4);  // triangle
  CoverResult rd = enhanced_vc3star_run(two, c4cfg, 9);
  CHECK(two.is_vertex_cover(rd.cover));
  CHECK(static_cast<int>(rd.cover.size()) == exact_min_cover(two));

  // pendant vertex: the neighbor enters deterministically
  Graph pend(5);
  pend.add_edge(0, 1);
  pend.add_edge(1, 2);
  pend.add_edge(1, 3);
  pend.add_edge(1, 4);
  for (uint64_t s = 0; s < 10; ++s) {
    CoverResult rp = enhanced_vc3star_run(pend, cfg, s);
    CHECK(rp.cover == std::vector<int>{1});
  }
}

TEST_CASE("better vc run") {
  VcConfig cfg = make_optimized_config(VcAlgo::BetterVc, 1.3, 100);
  CHECK(better_vc_run(cycle(4), cfg, 3).cover.size() == 2);  // regular double branch

  CoverResult rp = better_vc_run(petersen(), cfg, 17);
  CHECK(petersen().is_vertex_cover(rp.cover));
  CHECK(rp.recursion_steps <= 10000);

  SplitMix64 rng(41);
  for (int c = 0; c < 25; ++c) {
    int n = 4 + static_cast<int>(rng.below(16));
    Graph g = random_graph(rng, n, 0.3);
    CoverResult r1 = better_vc_run(g, cfg, 1000 + c);
    CHECK(g.is_vertex_cover(r1.cover));
    CHECK(r1.recursion_steps <= 32L * std::max(1, n));
    // determinism
    CoverResult r2 = better_vc_run(g, cfg, 1000 + c);
    CHECK(r1.cover == r2.cover);
    CHECK(r1.recursion_steps == r2.recursion_steps);
  }
}

TEST_CASE("termination proxy over all algorithms") {
  SplitMix64 rng(4242);
  VcConfig cfgs[] = {make_optimized_config(VcAlgo::Vc3, 1.5, 100),
                     make_optimized_config(VcAlgo::Vc3Star, 1.5, 100),
                     make_optimized_config(VcAlgo::EnhancedVc3Star, 1.5, 100),
                     make_optimized_config(VcAlgo::BetterVc, 1.5, 100)};
  VcAlgo algos[] = {VcAlgo::Vc3, VcAlgo::Vc3Star, VcAlgo::EnhancedVc3Star, VcAlgo::BetterVc};
  for (int c = 0; c < 12; ++c) {
    int n = 20 + static_cast<int>(rng.below(180));
    Graph g = random_graph(rng, n, 4.0 / n);
    for (int a = 0; a < 4; ++a) {
      CoverResult r = run_vc_algo(algos[a], g, cfgs[a], 7000 + c);
      CHECK(g.is_vertex_cover(r.cover));
      CHECK(r.recursion_steps <= 32L * n);
    }
  }
}

TEST_CASE("build_recurrence families") {
  VcConfig vc3cfg;
  vc3cfg.gamma_by_degree[3] = 0.5;
  CompositeRecurrence rec = build_recurrence(VcAlgo::Vc3, vc3cfg);
  REQUIRE(rec.terms.size() == 2);
  CHECK(rec.terms[0].b == std::vector<int>{1, 3});
  CHECK(rec.terms[0].k == std::vector<int>{1, 0});
  CHECK(rec.terms[1].k == std::vector<int>{0, 3});
  CHECK(rec.terms[0].gamma[0] == doctest::Approx(0.5));

  VcConfig star = make_optimized_config(VcAlgo::Vc3Star, 1.5, 100);
  CHECK(build_recurrence(VcAlgo::Vc3Star, star).terms.size() == 2 * (100 - 2));

  VcConfig enh = make_optimized_config(VcAlgo::EnhancedVc3Star, 1.5, 100);
  REQUIRE(enh.excluded_degree == 5);
  CompositeRecurrence erec = build_recurrence(VcAlgo::EnhancedVc3Star, enh);
  for (const Term& t : erec.terms) {
    bool d5_row = t.b == std::vector<int>{1, 5};
    CHECK_FALSE(d5_row);  // excluded degree rows are absent
  }

  VcConfig better = make_optimized_config(VcAlgo::BetterVc, 1.3, 100);
  CompositeRecurrence brec = build_recurrence(VcAlgo::BetterVc, better);
  int single = 0;
  for (const Term& t : brec.terms)
    if (t.b == std::vector<int>{1} && t.k == std::vector<int>{1}) ++single;
  CHECK(single == 1);
}

TEST_CASE("choose excluded degree at 1.5") {
  ExcludedDegreeResult ex = choose_excluded_degree(1.5, 100);
  REQUIRE(ex.excluded.has_value());
  CHECK(*ex.excluded == 5);
  CHECK(ex.base() == doctest::Approx(1.01657).epsilon(2e-4));

  std::vector<std::pair<int, double>> sorted = ex.per_degree;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.second > b.second; });
  CHECK(sorted[0].first == 5);
  CHECK(sorted[1].first == 6);
  CHECK(sorted[2].first == 4);
  CHECK(sorted[3].first == 7);

  // determinism near the flat end of the range
  ExcludedDegreeResult a = choose_excluded_degree(1.95, 40);
  ExcludedDegreeResult b = choose_excluded_degree(1.95, 40);
  CHECK(a.excluded == b.excluded);
  CHECK(a.m == b.m);
}

TEST_CASE("alpha_approx wrapper") {
  // edgeless graph with k = 0: immediate success
  VcConfig cfg = make_optimized_config(VcAlgo::Vc3, 1.5, 100);
  CompositeRecurrence rec = build_recurrence(VcAlgo::Vc3, cfg);
  ApproxResult r = alpha_approx(Graph(4), 0, 1.5, VcAlgo::Vc3, rec, cfg, 1.0, 3);
  CHECK(r.success);
  CHECK(r.best.cover.empty());

  // impossible budget: p(b,k) = 0 reported as certain failure
  ApproxResult fail = alpha_approx(path(5), 3, 0.5, VcAlgo::Vc3, rec, cfg, 1.0, 3);
  CHECK(fail.certain_failure);

  // planted instance: the amplification bound holds over meta-runs
  PlantedVc inst = make_planted_vc(30, 10, 0.15, 77);
  int ok = 0;
  const int meta = 200;
  for (int i = 0; i < meta; ++i) {
    ApproxResult res = alpha_approx(inst.graph, inst.k, 1.5, VcAlgo::Vc3, rec, cfg, 1.0,
                                    90000 + i);
    if (res.success) ++ok;
  }
  CHECK(ok >= meta / 2);  // 1 - 1/e minus sampling slack
}

TEST_CASE("alpha_approx on the five-vertex path") {
  // p edge 5 4 / e 1 2 / e 2 3 / e 3 4 / e 4 5 with k=2, alpha=1.5
  std::istringstream in("p edge 5 4\ne 1 2\ne 2 3\ne 3 4\ne 4 5\n");
  Graph g = graph_from_dimacs(in);
  VcConfig cfg = make_optimized_config(VcAlgo::Vc3, 1.5, 100);
  CompositeRecurrence rec = build_recurrence(VcAlgo::Vc3, cfg);
  ApproxResult res = alpha_approx(g, 2, 1.5, VcAlgo::Vc3, rec, cfg, 1.0, 42);
  CHECK(res.success);
  CHECK(res.best.cover.size() == 2);
}

TEST_CASE("vc config json round trip") {
  VcConfig cfg = make_optimized_config(VcAlgo::BetterVc, 1.4, 50);
  cfg.rng_seed = 99;
  VcConfig back = vc_config_from_json(vc_config_to_json(cfg));
  CHECK(back.delta_cap == 50);
  CHECK(back.rng_seed == 99);
  CHECK(back.gamma_by_degree.at(7) == doctest::Approx(cfg.gamma_by_degree.at(7)));
  CHECK(back.lambda1.at(4) == doctest::Approx(cfg.lambda1.at(4)));
  CHECK(back.delta3way.at(6)[2] == doctest::Approx(cfg.delta3way.at(6)[2]));
  back.check(VcAlgo::BetterVc);
}
