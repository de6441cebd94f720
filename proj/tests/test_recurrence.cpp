#include <cmath>
#include <sstream>

#include "branchrate/recurrence.hpp"
#include "branchrate/rng.hpp"
#include "doctest.h"

using namespace branchrate;

namespace {

CompositeRecurrence vc3_rec(double gamma) {
  CompositeRecurrence rec;
  rec.terms.emplace_back(std::vector<int>{1, 3}, std::vector<int>{1, 0},
                         Distribution({gamma, 1 - gamma}));
  rec.terms.emplace_back(std::vector<int>{1, 3}, std::vector<int>{0, 3},
                         Distribution({gamma, 1 - gamma}));
  return rec;
}

// random valid recurrence whose naive evaluation stays affordable
CompositeRecurrence random_rec(SplitMix64& rng, int max_terms = 3, int max_arity = 3) {
  for (;;) {
    CompositeRecurrence rec;
    int n_terms = 1 + static_cast<int>(rng.below(max_terms));
    long width = 0;
    for (int j = 0; j < n_terms; ++j) {
      int r = 1 + static_cast<int>(rng.below(max_arity));
      std::vector<int> b, k;
      std::vector<double> g;
      for (int i = 0; i < r; ++i) {
        b.push_back(1 + static_cast<int>(rng.below(4)));
        k.push_back(static_cast<int>(rng.below(4)));
        g.push_back(0.05 + rng.uniform01());
      }
      width += r;
      double s = 0;
      for (double x : g) s += x;
      for (double& x : g) x /= s;
      rec.terms.emplace_back(b, k, Distribution(g));
    }
    if (!validate_recurrence(rec).valid) continue;
    double min_cost = 4;
    for (const Term& t : rec.terms)
      for (int bi : t.b) min_cost = std::min<double>(min_cost, bi);
    if (std::pow(static_cast<double>(width), 10.0 / min_cost) > 2e6) continue;
    return rec;
  }
}

}  // namespace

TEST_CASE("distribution construction") {
  Distribution d({0.25, 0.75});
  CHECK(d.size() == 2);
  CHECK(d[1] == doctest::Approx(0.75));
  CHECK_THROWS(Distribution(std::vector<double>{}));
  CHECK_THROWS(Distribution({-0.1, 1.1}));
  CHECK_THROWS(Distribution({0.4, 0.4}));  // sums to 0.8
  Distribution near({0.5, 0.5 + 1e-13});   // within tolerance, renormalized
  CHECK(near[0] + near[1] == doctest::Approx(1.0));
}

TEST_CASE("term invariants") {
  CHECK_THROWS(Term({0, 1}, {1, 1}, Distribution({0.5, 0.5})));  // cost 0
  CHECK_THROWS(Term({1, 1}, {-1, 0}, Distribution({0.5, 0.5})));
  CHECK_THROWS(Term({1}, {1, 2}, Distribution({1.0})));  // length mismatch
}

TEST_CASE("validate_recurrence") {
  CHECK(validate_recurrence(vc3_rec(0.5)).valid);

  CompositeRecurrence single;
  single.terms.emplace_back(std::vector<int>{2}, std::vector<int>{0}, Distribution({1.0}));
  CHECK(validate_recurrence(single).valid);

  CompositeRecurrence bad;
  bad.terms.emplace_back(std::vector<int>{1, 1}, std::vector<int>{2, 3},
                         Distribution({0.5, 0.5}));
  ValidationReport rep = validate_recurrence(bad);
  CHECK_FALSE(rep.valid);
  CHECK_FALSE(rep.issues.empty());

  CHECK_FALSE(validate_recurrence(CompositeRecurrence{}).valid);
}

TEST_CASE("dp boundary values") {
  CompositeRecurrence rec = vc3_rec(0.5);
  DpTable t = dp_eval(rec, 6, 5);
  CHECK(std::exp(t.log_p(1, 1)) == doctest::Approx(0.5).epsilon(1e-12));
  for (int b = 0; b <= 6; ++b) CHECK(t.log_p(b, 0) == 0.0);
  CHECK(t.log_p(0, 1) == kNegInf);  // all costs >= 1
  CHECK(t.log_p(-1, 2) == kNegInf);
  CHECK(t.log_p(3, -1) == 0.0);  // k clamped below zero means certainty
}

TEST_CASE("naive_eval basics") {
  CompositeRecurrence rec = vc3_rec(0.5);
  CHECK(naive_eval(rec, 1, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(naive_eval(rec, 3, 0) == 1.0);
  CHECK(naive_eval(rec, -1, 2) == 0.0);
  CHECK_THROWS(naive_eval(rec, 13, 1));
}

TEST_CASE("oracle equivalence on random recurrences") {
  SplitMix64 rng(20240601);
  for (int c = 0; c < 12; ++c) {
    CompositeRecurrence rec = random_rec(rng);
    DpTable t = dp_eval(rec, 10, 10);
    for (int b = 0; b <= 10; ++b)
      for (int k = 0; k <= 10; ++k) {
        double direct = naive_eval(rec, b, k);
        CHECK(std::abs(direct - std::exp(t.log_p(b, k))) <= 1e-9);
      }
  }
}

TEST_CASE("dp monotonicity and range") {
  SplitMix64 rng(7);
  for (int c = 0; c < 8; ++c) {
    CompositeRecurrence rec = random_rec(rng);
    DpTable t = dp_eval(rec, 18, 14);
    for (int b = 0; b <= 18; ++b)
      for (int k = 0; k <= 14; ++k) {
        double v = t.log_p(b, k);
        CHECK(v <= 1e-15);  // probability at most 1
        if (b > 0) CHECK(t.log_p(b - 1, k) <= v + 1e-12);
        if (k > 0) CHECK(t.log_p(b, k - 1) >= v - 1e-12);
      }
  }
}

TEST_CASE("superadditivity p(nb,nk) >= p(b,k)^n on branching families") {
  // the property belongs to the algorithm-derived recurrences; with the
  // k-gate an artificial term family can break it (richer min at larger k)
  SplitMix64 rng(99);
  std::vector<CompositeRecurrence> recs{vc3_rec(0.7463658315069372), vc3_rec(0.5),
                                        vc3_rec(0.25)};
  for (const CompositeRecurrence& rec : recs) {
    DpTable t = dp_eval(rec, 36, 30);
    // the inequality genuinely fails on the b = k diagonal (the k-gate
    // admits extra states at nk); the paper only ever uses b = floor(alpha k)
    // with alpha > 1, so the property is asserted for b > k
    for (int probe = 0; probe < 60; ++probe) {
      int b = 2 + static_cast<int>(rng.below(11));
      int k = 1 + static_cast<int>(rng.below(10));
      int n = 1 + static_cast<int>(rng.below(3));
      if (b <= k || n * b > 36 || n * k > 30) continue;
      double lhs = std::exp(t.log_p(n * b, n * k));
      double rhs = std::pow(std::exp(t.log_p(b, k)), n);
      CHECK(lhs >= rhs - 1e-12);
    }
  }
}

TEST_CASE("dp cell cap") {
  CompositeRecurrence rec = vc3_rec(0.5);
  CHECK_THROWS_WITH_AS(dp_eval(rec, 300000, 1000000), doctest::Contains("cells exceed"),
                       std::runtime_error);
}

TEST_CASE("recurrence json round trip") {
  CompositeRecurrence rec = vc3_rec(0.25);
  std::string text = recurrence_to_json(rec);
  CompositeRecurrence back = recurrence_from_json(text);
  REQUIRE(back.terms.size() == 2);
  CHECK(back.terms[0].b == std::vector<int>{1, 3});
  CHECK(back.terms[1].k == std::vector<int>{0, 3});
  CHECK(back.terms[0].gamma[0] == doctest::Approx(0.25));
  CHECK_THROWS(recurrence_from_json("{\"nope\":1}"));
}

TEST_CASE("dp csv dump") {
  CompositeRecurrence rec = vc3_rec(0.5);
  DpTable t = dp_eval(rec, 2, 1);
  std::ostringstream os;
  t.dump_csv(os);
  std::string s = os.str();
  CHECK(s.rfind("b,k,log_p\n", 0) == 0);
  CHECK(s.find("0,1,-inf") != std::string::npos);
  // identical tables print identically
  std::ostringstream os2;
  dp_eval(rec, 2, 1).dump_csv(os2);
  CHECK(os.str() == os2.str());
}
