#include "branchrate/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "json.hpp"

namespace branchrate {

double kl_divergence(const std::vector<double>& c, const std::vector<double>& d) {
  if (c.size() != d.size()) throw std::invalid_argument("kl_divergence: length mismatch");
  double s = 0.0;
  for (size_t i = 0; i < c.size(); ++i) {
    if (c[i] == 0.0) continue;
    if (d[i] == 0.0) return kPosInf;
    s += c[i] * std::log(c[i] / d[i]);
  }
  return s;
}

double kl_divergence(const Distribution& c, const Distribution& d) {
  return kl_divergence(c.weights(), d.weights());
}

double kl_binary(double x, double y) {
  return kl_divergence(std::vector<double>{x, 1.0 - x}, std::vector<double>{y, 1.0 - y});
}

double extended_kl(const std::vector<double>& t, const std::vector<double>& upsilon,
                   const std::vector<size_t>& block_sizes) {
  size_t total = std::accumulate(block_sizes.begin(), block_sizes.end(), size_t{0});
  if (t.size() != total || upsilon.size() != total)
    throw std::invalid_argument("extended_kl: block structure mismatch");
  double tsum = std::accumulate(t.begin(), t.end(), 0.0);
  if (std::abs(tsum - 1.0) > 1e-9) throw std::invalid_argument("extended_kl: t must sum to 1");
  size_t off = 0;
  double acc = 0.0;
  for (size_t bs : block_sizes) {
    double usum = 0.0, lambda = 0.0;
    for (size_t i = off; i < off + bs; ++i) {
      usum += upsilon[i];
      lambda += t[i];
      if (t[i] > 0.0) {
        if (upsilon[i] == 0.0) return kPosInf;
        acc += t[i] * std::log(t[i] / upsilon[i]);
      }
    }
    if (std::abs(usum - 1.0) > 1e-9)
      throw std::invalid_argument("extended_kl: upsilon must sum to 1 per block");
    if (lambda > 0.0) acc -= lambda * std::log(lambda);
    off += bs;
  }
  return acc;
}

namespace {

struct TermView {
  const std::vector<int>& b;
  const std::vector<int>& k;
  const std::vector<double>& gamma;
  double alpha;

  size_t size() const { return b.size(); }
  double d(size_t i) const { return b[i] - alpha * k[i]; }
};

// ln sum_i gamma_i exp(t k_i - mu d_i), restricted to the support of gamma.
double dual_lse(const TermView& tv, double t, double mu) {
  double mx = kNegInf;
  size_t r = tv.size();
  std::vector<double> a(r, kNegInf);
  for (size_t i = 0; i < r; ++i) {
    if (tv.gamma[i] <= 0.0) continue;
    a[i] = std::log(tv.gamma[i]) + t * tv.k[i] - mu * tv.d(i);
    mx = std::max(mx, a[i]);
  }
  double s = 0.0;
  for (size_t i = 0; i < r; ++i)
    if (a[i] != kNegInf) s += std::exp(a[i] - mx);
  return mx + std::log(s);
}

// d/dmu of dual_lse = -<d>_softmax
double dual_lse_slope(const TermView& tv, double t, double mu) {
  double mx = kNegInf;
  size_t r = tv.size();
  std::vector<double> a(r, kNegInf);
  for (size_t i = 0; i < r; ++i) {
    if (tv.gamma[i] <= 0.0) continue;
    a[i] = std::log(tv.gamma[i]) + t * tv.k[i] - mu * tv.d(i);
    mx = std::max(mx, a[i]);
  }
  double z = 0.0, num = 0.0;
  for (size_t i = 0; i < r; ++i) {
    if (a[i] == kNegInf) continue;
    double w = std::exp(a[i] - mx);
    z += w;
    num += w * tv.d(i);
  }
  return -num / z;
}

// min over mu >= 0 of dual_lse; golden section after doubling expansion.
std::pair<double, double> dual_min(const TermView& tv, double t, int iters = 120) {
  if (dual_lse_slope(tv, t, 0.0) >= 0.0) return {0.0, dual_lse(tv, t, 0.0)};
  double hi = 1.0;
  while (dual_lse_slope(tv, t, hi) < 0.0 && hi < 1e9) hi *= 2.0;
  double lo = 0.0;
  const double inv = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - inv * (b - a), d = a + inv * (b - a);
  double fc = dual_lse(tv, t, c), fd = dual_lse(tv, t, d);
  for (int it = 0; it < iters && b - a > 1e-12 * (1.0 + b); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv * (b - a);
      fc = dual_lse(tv, t, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv * (b - a);
      fd = dual_lse(tv, t, d);
    }
  }
  double mu = 0.5 * (a + b);
  return {mu, dual_lse(tv, t, mu)};
}

std::vector<double> softmax_q(const TermView& tv, double t, double mu) {
  size_t r = tv.size();
  std::vector<double> a(r, kNegInf);
  double mx = kNegInf;
  for (size_t i = 0; i < r; ++i) {
    if (tv.gamma[i] <= 0.0) continue;
    a[i] = std::log(tv.gamma[i]) + t * tv.k[i] - mu * tv.d(i);
    mx = std::max(mx, a[i]);
  }
  std::vector<double> q(r, 0.0);
  double z = 0.0;
  for (size_t i = 0; i < r; ++i)
    if (a[i] != kNegInf) z += (q[i] = std::exp(a[i] - mx));
  for (double& x : q) x /= z;
  return q;
}

double dot(const std::vector<double>& q, const std::vector<int>& v) {
  double s = 0.0;
  for (size_t i = 0; i < q.size(); ++i) s += q[i] * v[i];
  return s;
}

// Blends q toward the most feasible vertex until q.d <= 0.
void repair_feasibility(std::vector<double>& q, const TermView& tv) {
  double viol = 0.0;
  for (size_t i = 0; i < q.size(); ++i) viol += q[i] * tv.d(i);
  if (viol <= 0.0) return;
  size_t i0 = q.size();
  double d0 = kPosInf;
  for (size_t i = 0; i < q.size(); ++i)
    if (tv.gamma[i] > 0.0 && tv.d(i) < d0) {
      d0 = tv.d(i);
      i0 = i;
    }
  if (i0 == q.size() || d0 > 0.0) throw std::logic_error("repair_feasibility: no feasible vertex");
  if (d0 == 0.0) {
    std::fill(q.begin(), q.end(), 0.0);
    q[i0] = 1.0;
    return;
  }
  double s = viol / (viol - d0);
  for (double& x : q) x *= (1.0 - s);
  q[i0] += s;
}

}  // namespace

BranchingNumberResult alpha_branching_number(const std::vector<int>& b,
                                             const std::vector<int>& k,
                                             const Distribution& gamma, double alpha,
                                             double tol) {
  if (b.size() != k.size() || b.size() != gamma.size())
    throw std::invalid_argument("alpha_branching_number: length mismatch");
  if (!(alpha > 0)) throw std::invalid_argument("alpha_branching_number: alpha must be > 0");
  TermView tv{b, k, gamma.weights(), alpha};
  size_t r = b.size();

  bool feasible_exists = false;
  for (size_t i = 0; i < r; ++i)
    if (gamma[i] > 0.0 && tv.d(i) <= 0.0) feasible_exists = true;
  BranchingNumberResult out;
  if (!feasible_exists) return out;  // m = +inf, no q

  double gd = 0.0;
  for (size_t i = 0; i < r; ++i) gd += gamma[i] * tv.d(i);
  if (gd <= 1e-15) {
    out.m = 0.0;
    out.q_star = gamma;
    return out;
  }

  // feasible starting point by 1-D blend toward the most feasible vertex
  std::vector<double> q0 = gamma.weights();
  repair_feasibility(q0, tv);
  double qk0 = dot(q0, k);
  if (qk0 <= 0.0) throw std::logic_error("alpha_branching_number: feasible q with q.k = 0");
  double t_hi = kl_divergence(q0, gamma.weights()) / qk0 + 1e-9;
  double t_lo = 0.0;

  // dual_min crosses 0 exactly at the branching number
  for (int it = 0; it < 300 && t_hi - t_lo > tol * 0.25; ++it) {
    double tm = 0.5 * (t_lo + t_hi);
    if (dual_min(tv, tm).second < 0.0)
      t_lo = tm;
    else
      t_hi = tm;
  }

  auto [mu, lse] = dual_min(tv, t_hi);
  std::vector<double> q = softmax_q(tv, t_hi, mu);
  repair_feasibility(q, tv);
  double qk = dot(q, k);
  double m_cert = kl_divergence(q, gamma.weights()) / qk;
  // the certificate point can only overshoot; accept the better of it and q0
  double m0 = kl_divergence(q0, gamma.weights()) / qk0;
  if (m0 < m_cert) {
    m_cert = m0;
    q = q0;
  }
  if (m_cert < t_lo - 1e-7) throw std::logic_error("alpha_branching_number: certificate below bracket");
  if (m_cert > t_hi + std::max(1e-6, 1e3 * tol))
    throw std::runtime_error("alpha_branching_number: tolerance not reached");
  out.m = m_cert;
  out.q_star = Distribution(q);
  return out;
}

CompositeRateResult composite_rate(const CompositeRecurrence& rec, double alpha, double tol) {
  CompositeRateResult res;
  res.m = 0.0;
  for (const Term& t : rec.terms) {
    BranchingNumberResult r = alpha_branching_number(t.b, t.k, t.gamma, alpha, tol);
    if (r.m == kPosInf)
      throw std::runtime_error("composite_rate: a term has infinite branching number");
    res.m = std::max(res.m, r.m);
    res.per_term.push_back(std::move(r));
  }
  return res;
}

namespace {

struct SimpleRuleShape {
  int b1, b2, s1, s2;
  double alpha;
  double c1, c2;  // feasibility boundaries; <= 0 means the state is unconstrained

  SimpleRuleShape(int b1_, int b2_, int s1_, int s2_, double a)
      : b1(b1_), b2(b2_), s1(s1_), s2(s2_), alpha(a) {
    if (!(s1 < b1 && s2 < b2)) throw std::invalid_argument("simple rule requires s1<b1, s2<b2");
    if (!(alpha > 1.0)) throw std::invalid_argument("simple rule requires alpha > 1");
    double w1 = b2 - alpha * s2;
    c1 = w1 > 0 ? w1 / ((alpha - 1) * b1 + w1) : 0.0;
    double w2 = b1 - alpha * s1;
    c2 = w2 > 0 ? w2 / ((alpha - 1) * b2 + w2) : 0.0;
  }

  double f1(double g) const {
    if (c1 <= 0.0 || g >= c1) return 0.0;
    return kl_binary(c1, g) / (c1 * b1 + (1 - c1) * s2);
  }
  double f2(double g) const {
    if (c2 <= 0.0 || 1.0 - g >= c2) return 0.0;
    return kl_binary(c2, 1.0 - g) / (c2 * b2 + (1 - c2) * s1);
  }
};

}  // namespace

double simple_rule_f1(int b1, int b2, int s1, int s2, double alpha, double gamma) {
  return SimpleRuleShape(b1, b2, s1, s2, alpha).f1(gamma);
}

double simple_rule_f2(int b1, int b2, int s1, int s2, double alpha, double gamma) {
  return SimpleRuleShape(b1, b2, s1, s2, alpha).f2(gamma);
}

OptimizedRule optimize_simple_rule(int b1, int b2, int s1, int s2, double alpha, double tol) {
  SimpleRuleShape sh(b1, b2, s1, s2, alpha);
  OptimizedRule out;
  double g;
  if (sh.c1 <= 0.0 && sh.c2 <= 0.0) {
    g = 0.5;
    out.degenerate = true;
  } else if (sh.c1 <= 0.0) {
    g = 1.0 - sh.c2;  // f1 == 0 everywhere; any gamma <= 1-c2 gives max 0
    out.degenerate = true;
  } else if (sh.c2 <= 0.0) {
    g = sh.c1;
    out.degenerate = true;
  } else {
    double lo = 1e-15, hi = 1.0 - 1e-15;
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
      double mid = 0.5 * (lo + hi);
      if (sh.f1(mid) > sh.f2(mid))
        lo = mid;
      else
        hi = mid;
    }
    g = 0.5 * (lo + hi);
    if (std::abs(sh.f1(g) - sh.f2(g)) > std::max(tol, 1e-7) * (1.0 + sh.f1(g)))
      throw std::runtime_error("optimize_simple_rule: equalizer not certified");
  }
  out.m_star = std::max(sh.f1(g), sh.f2(g));
  out.gamma_star = Distribution({g, 1.0 - g});
  double q1 = std::max(sh.c1, g);
  double q2 = std::max(sh.c2, 1.0 - g);
  out.per_state_q = {Distribution({q1, 1.0 - q1}), Distribution({1.0 - q2, q2})};
  return out;
}

double rule_value_at(const RuleSpec& rule, const Distribution& gamma, double alpha, double tol) {
  double m = 0.0;
  for (const auto& st : rule.states) {
    BranchingNumberResult r = alpha_branching_number(rule.b, st, gamma, alpha, tol);
    if (r.m == kPosInf) return kPosInf;
    m = std::max(m, r.m);
  }
  return m;
}

namespace {

struct RuleEval {
  double m;
  std::vector<double> ms;
  std::vector<std::vector<double>> qs;
};

RuleEval eval_rule(const RuleSpec& rule, const std::vector<double>& gamma, double alpha) {
  RuleEval ev;
  ev.m = 0.0;
  Distribution g(gamma);
  for (const auto& st : rule.states) {
    BranchingNumberResult r = alpha_branching_number(rule.b, st, g, alpha, 1e-10);
    ev.ms.push_back(r.m);
    ev.qs.push_back(r.q_star ? r.q_star->weights() : std::vector<double>{});
    ev.m = std::max(ev.m, r.m);
  }
  return ev;
}

// eval_rule that walks states in the given priority order and gives up as
// soon as one state reaches the cap; used to reject polish candidates early.
std::optional<RuleEval> eval_rule_below(const RuleSpec& rule, const std::vector<double>& gamma,
                                        double alpha, double cap,
                                        const std::vector<size_t>& order) {
  RuleEval ev;
  ev.m = 0.0;
  ev.ms.assign(rule.states.size(), 0.0);
  ev.qs.assign(rule.states.size(), {});
  Distribution g(gamma);
  for (size_t j : order) {
    BranchingNumberResult r = alpha_branching_number(rule.b, rule.states[j], g, alpha, 1e-10);
    if (r.m >= cap) return std::nullopt;
    ev.ms[j] = r.m;
    ev.qs[j] = r.q_star ? r.q_star->weights() : std::vector<double>{};
    ev.m = std::max(ev.m, r.m);
  }
  return ev;
}

void clamp_normalize(std::vector<double>& v, double floor_val = 1e-9) {
  double s = 0.0;
  for (double& x : v) {
    if (!(x > floor_val)) x = floor_val;
    s += x;
  }
  for (double& x : v) x /= s;
}

// Entropic mirror-descent feasibility check for level t: search (gamma,
// q^1..q^h) with D(q^j||gamma) - t q^j.k^j <= 0 for all j under the linear
// constraints. The q side of each state is solved exactly through the 1-D
// dual, so the iteration is a subgradient descent in gamma over the convex
// function max_j min_q [D(q^j||gamma) - t q^j.k^j]; steps are Polyak-sized
// toward level 0 with a 1/sqrt(iter) fallback. Returns the best gamma found
// and whether the level is attained.
bool md_feasible(const RuleSpec& rule, double alpha, double t,
                 const std::vector<double>& gamma0, const GenericSolverOptions& opts,
                 std::vector<double>& gamma_out) {
  size_t r = rule.b.size(), h = rule.states.size();
  std::vector<double> gamma = gamma0;
  clamp_normalize(gamma);
  double best = kPosInf;
  std::vector<double> best_gamma = gamma;
  int stall = 0;
  std::vector<double> grad(r);
  for (int iter = 1; iter <= opts.md_iter_cap; ++iter) {
    double phi = kNegInf;
    std::vector<double> qworst;
    for (size_t j = 0; j < h; ++j) {
      TermView tv{rule.b, rule.states[j], gamma, alpha};
      auto [mu, lse] = dual_min(tv, t, 70);
      double f = -lse;  // min_q D - t q.k over the feasible set (dual exact)
      if (f > phi) {
        phi = f;
        qworst = softmax_q(tv, t, mu);
      }
    }
    if (phi < best - 1e-15) {
      best = phi;
      best_gamma = gamma;
      stall = 0;
    } else if (++stall > opts.md_stall_limit)
      break;
    if (best <= 0.0) break;

    double norm = 0.0;
    for (size_t i = 0; i < r; ++i) {
      grad[i] = -qworst[i] / gamma[i];
      norm = std::max(norm, std::abs(grad[i]));
    }
    if (norm <= 0) break;
    double eta = std::min(phi / norm, 0.5 / std::sqrt(static_cast<double>(iter)));
    eta = std::max(eta, 1e-4 / std::sqrt(static_cast<double>(iter)));
    for (size_t i = 0; i < r; ++i) gamma[i] *= std::exp(-eta * grad[i] / norm);
    clamp_normalize(gamma);
  }
  gamma_out = best_gamma;
  return best <= 0.0;
}

}  // namespace

OptimizedRule optimize_rule_generic(const RuleSpec& rule, double alpha,
                                    const GenericSolverOptions& opts) {
  size_t r = rule.b.size(), h = rule.states.size();
  if (r == 0 || h == 0) throw std::invalid_argument("optimize_rule_generic: empty rule");
  for (const auto& st : rule.states) {
    if (st.size() != r) throw std::invalid_argument("optimize_rule_generic: state length mismatch");
    if (*std::max_element(st.begin(), st.end()) < 1)
      throw std::invalid_argument("optimize_rule_generic: state with all-zero coverage");
  }

  OptimizedRule out;
  if (rule.gamma) {  // fixed distribution: evaluate only
    out.gamma_star = *rule.gamma;
    RuleEval ev = eval_rule(rule, rule.gamma->weights(), alpha);
    out.m_star = ev.m;
    for (auto& q : ev.qs)
      out.per_state_q.push_back(q.empty() ? out.gamma_star : Distribution(q));
    return out;
  }

  // a state no q can satisfy makes the whole rule infeasible
  for (const auto& st : rule.states) {
    bool ok = false;
    for (size_t i = 0; i < r; ++i)
      if (rule.b[i] - alpha * st[i] <= 0.0) ok = true;
    if (!ok) {
      out.m_star = kPosInf;
      out.gamma_star = Distribution(std::vector<double>(r, 1.0 / r));
      return out;
    }
  }

  std::vector<double> gamma(r, 1.0 / r);
  if (h == 1) {  // any feasible q doubles as gamma with divergence 0
    TermView tv{rule.b, rule.states[0], gamma, alpha};
    std::vector<double> q = gamma;
    repair_feasibility(q, tv);
    clamp_normalize(q);
    gamma = q;
  }

  RuleEval ev = eval_rule(rule, gamma, alpha);
  double hi = ev.m, lo = 0.0;
  std::vector<double> best_gamma = gamma;
  if (hi > 0.0) {
    // bisection on the target value; warm-start each check at the incumbent
    double gap = std::max(opts.bisection_gap, opts.tol);
    double floor_m = std::max(opts.tol * 4.0, opts.bisection_gap * 0.02);
    for (int it = 0; it < opts.bisection_iters && hi - lo > gap && hi > floor_m; ++it) {
      double t = 0.5 * (lo + hi);
      std::vector<double> cand;
      if (md_feasible(rule, alpha, t, best_gamma, opts, cand)) {
        hi = t;
        best_gamma = cand;
      } else {
        lo = t;
      }
    }
  }

  // equalization polish: at an optimum gamma is a convex combination of the
  // active states' optimal q's, so walk toward such combinations
  std::vector<double> cur = best_gamma;
  clamp_normalize(cur);
  RuleEval cur_ev = eval_rule(rule, cur, alpha);
  double best_m = cur_ev.m;
  best_gamma = cur;
  const double steps[] = {0.5, 0.25, 0.1, 0.05, 0.02, 0.005, 0.001};
  double round_mark = cur_ev.m;
  for (int round = 0; round < opts.polish_rounds; ++round) {
    if (round > 0 && round % 8 == 0) {
      if (round_mark - cur_ev.m < std::max(opts.tol * 0.1, 1e-12)) break;
      round_mark = cur_ev.m;
    }
    double m = cur_ev.m;
    double thresh = m - std::max(1e-7, 0.05 * m);
    std::vector<size_t> active;
    for (size_t j = 0; j < h; ++j)
      if (cur_ev.ms[j] >= thresh && !cur_ev.qs[j].empty()) active.push_back(j);
    if (active.empty()) break;
    std::vector<std::vector<double>> targets;
    std::vector<double> mean(r, 0.0);
    for (size_t j : active)
      for (size_t i = 0; i < r; ++i) mean[i] += cur_ev.qs[j][i] / active.size();
    targets.push_back(mean);
    if (active.size() >= 2)
      for (double w : {0.125, 0.25, 0.5, 0.75, 0.875}) {
        std::vector<double> tgt(r);
        for (size_t i = 0; i < r; ++i)
          tgt[i] = w * cur_ev.qs[active[0]][i] + (1 - w) * cur_ev.qs[active[1]][i];
        targets.push_back(std::move(tgt));
      }
    for (size_t a = 0; a < active.size() && a < 4; ++a) targets.push_back(cur_ev.qs[active[a]]);
    std::vector<size_t> order(h);
    for (size_t j = 0; j < h; ++j) order[j] = j;
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return cur_ev.ms[a] > cur_ev.ms[b]; });
    bool improved = false;
    for (const auto& tgt : targets) {
      for (double s : steps) {
        std::vector<double> cand(r);
        for (size_t i = 0; i < r; ++i) cand[i] = (1 - s) * cur[i] + s * tgt[i];
        clamp_normalize(cand);
        std::optional<RuleEval> cev = eval_rule_below(rule, cand, alpha, m - 1e-14, order);
        if (cev) {
          cur = cand;
          cur_ev = std::move(*cev);
          improved = true;
          break;
        }
      }
      if (improved) break;
    }
    if (!improved) break;
    if (cur_ev.m < best_m) {
      best_m = cur_ev.m;
      best_gamma = cur;
    }
  }

  RuleEval fin = eval_rule(rule, best_gamma, alpha);
  out.gamma_star = Distribution(best_gamma);
  out.m_star = fin.m;
  for (size_t j = 0; j < h; ++j)
    out.per_state_q.push_back(fin.qs[j].empty() ? out.gamma_star : Distribution(fin.qs[j]));
  return out;
}

std::vector<RuleSpec> rules_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  std::vector<RuleSpec> rules;
  for (const auto& jr : j.at("rules")) {
    RuleSpec r;
    r.name = jr.value("name", "");
    r.b = jr.at("b").get<std::vector<int>>();
    r.states = jr.at("states").get<std::vector<std::vector<int>>>();
    if (jr.contains("gamma")) r.gamma = Distribution(jr["gamma"].get<std::vector<double>>());
    rules.push_back(std::move(r));
  }
  return rules;
}

std::string rules_to_json(const std::vector<RuleSpec>& rules) {
  nlohmann::json arr = nlohmann::json::array();
  for (const RuleSpec& r : rules) {
    nlohmann::json jr;
    jr["name"] = r.name;
    jr["b"] = r.b;
    jr["states"] = r.states;
    if (r.gamma) jr["gamma"] = r.gamma->weights();
    arr.push_back(std::move(jr));
  }
  nlohmann::json j;
  j["rules"] = std::move(arr);
  return j.dump(2);
}

}  // namespace branchrate
