#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "branchrate/asymptotics.hpp"
#include "branchrate/hs_solver.hpp"
#include "branchrate/rng.hpp"
#include "branchrate/verify.hpp"

using namespace branchrate;

namespace {

void check_alpha_range(const std::vector<double>& grid, bool hs) {
  double lo = 1.0, hi = hs ? 3.0 : 2.0;
  for (double a : grid)
    if (!(a > lo && a < hi))
      throw CLI::ValidationError("alpha " + std::to_string(a) + " outside (" +
                                 std::to_string(lo) + ", " + std::to_string(hi) + ")");
}

std::vector<double> parse_grid(const std::string& spec) {
  // "lo:hi:step" or a comma list
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    double lo, hi, step;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0)
      throw CLI::ValidationError("--alpha-grid expects lo:hi:step");
    for (double a = lo; a <= hi + 1e-12; a += step) out.push_back(a);
  } else {
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  }
  if (out.empty()) throw CLI::ValidationError("empty alpha grid");
  for (size_t i = 1; i < out.size(); ++i)
    if (out[i] <= out[i - 1]) throw CLI::ValidationError("alpha grid must be increasing");
  return out;
}

std::ostream& open_out(std::ofstream& file, const std::string& path) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw CLI::ValidationError("cannot write " + path);
  return file;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

struct VcRateRow {
  double alpha;
  double base;
  std::string worst;
  std::vector<double> gamma;
};

VcRateRow vc_rate_row(VcAlgo algo, double alpha, int delta, double tol) {
  VcConfig cfg = make_optimized_config(algo, alpha, delta, tol);
  CompositeRecurrence rec = build_recurrence(algo, cfg);
  CompositeRateResult rate = composite_rate(rec, alpha, tol);
  size_t worst = 0;
  for (size_t j = 0; j < rate.per_term.size(); ++j)
    if (rate.per_term[j].m > rate.per_term[worst].m) worst = j;
  const Term& t = rec.terms[worst];
  std::ostringstream w;
  w << "b=";
  for (size_t i = 0; i < t.b.size(); ++i) w << (i ? "|" : "") << t.b[i];
  w << " k=";
  for (size_t i = 0; i < t.k.size(); ++i) w << (i ? "|" : "") << t.k[i];
  return {alpha, rate.base(), w.str(), t.gamma.weights()};
}

double hs_rate_at(const Catalog& base_cat, double alpha, double tol, int threads) {
  Catalog cat = base_cat;
  return optimize_catalog_gammas(cat, alpha, tol, threads).base();
}

int run_verify_battery(uint64_t seed, int trials, bool full, std::ostream& os);

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"randomized-branching rate calculator and solver"};
  app.require_subcommand(1);

  std::string algo_name = "vc3", alpha_grid, out_path, rules_path, catalog_path, input_path;
  std::string recurrence_path, dump_dp_path;
  std::string problem = "vc", tier = "quick";
  double alpha = 1.5, tol = 1e-9, repeat_multiplier = 1.0;
  int delta = 100, k = 0, threads = 0, trials = 20000;
  uint64_t seed = 1;

  auto* rate = app.add_subcommand("rate", "optimized runtime bases per approximation ratio");
  rate->add_option("--algo", algo_name, "vc3|vc3star|enhanced_vc3star|better_vc|hs");
  rate->add_option("--alpha", alpha);
  rate->add_option("--alpha-grid", alpha_grid, "lo:hi:step or comma list");
  rate->add_option("--delta", delta, "degree cap (VC) or catalog delta (hs)");
  rate->add_option("--tol", tol);
  rate->add_option("--rules", rules_path, "optimize a rule-set JSON instead of an algorithm");
  rate->add_option("--recurrence", recurrence_path,
                   "rate a fixed recurrence JSON (no optimization)");
  rate->add_option("--catalog", catalog_path, "catalog JSON for --algo hs");
  rate->add_option("--threads", threads);
  rate->add_option("--out", out_path);

  auto* solve = app.add_subcommand("solve", "run the repetition wrapper on an instance");
  solve->add_option("--input", input_path)->required();
  solve->add_option("--algo", algo_name, "vc3|vc3star|enhanced_vc3star|better_vc|hs");
  solve->add_option("--k", k)->required();
  solve->add_option("--alpha", alpha);
  solve->add_option("--delta", delta);
  solve->add_option("--catalog", catalog_path);
  solve->add_option("--seed", seed);
  solve->add_option("--tol", tol);
  solve->add_option("--repeat-multiplier", repeat_multiplier);
  solve->add_option("--dump-dp", dump_dp_path, "write the DP table used as CSV");

  auto* catalog = app.add_subcommand("catalog", "generate the neighbors-graph catalog");
  catalog->add_option("--delta", delta)->required();
  catalog->add_option("--threads", threads);
  catalog->add_option("--out", out_path)->required();

  auto* figure = app.add_subcommand("figure", "emit (alpha, base) curve data");
  figure->add_option("--problem", problem, "vc|hs");
  figure->add_option("--alpha-grid", alpha_grid)->required();
  figure->add_option("--delta", delta);
  figure->add_option("--catalog", catalog_path);
  figure->add_option("--tol", tol);
  figure->add_option("--threads", threads);
  figure->add_option("--out", out_path);

  auto* verify = app.add_subcommand("verify", "run the statistical validation battery");
  verify->add_option("--seed", seed);
  verify->add_option("--trials", trials);
  verify->add_option("--tier", tier, "quick|full");
  verify->add_option("--out", out_path);

  CLI11_PARSE(app, argc, argv);

  try {
    std::ofstream file;
    if (rate->parsed()) {
      std::ostream& os = open_out(file, out_path);
      std::vector<double> grid = alpha_grid.empty() ? std::vector<double>{alpha}
                                                    : parse_grid(alpha_grid);
      if (!recurrence_path.empty()) {
        std::ifstream rf(recurrence_path);
        if (!rf) throw std::runtime_error("cannot open " + recurrence_path);
        std::stringstream ss;
        ss << rf.rdbuf();
        CompositeRecurrence rec = recurrence_from_json(ss.str());
        os << "alpha,m,base\n";
        for (double a : grid) {
          CompositeRateResult rate_res = composite_rate(rec, a, tol);
          os << fmt(a) << ',' << fmt(rate_res.m) << ',' << fmt(rate_res.base()) << '\n';
        }
        return 0;
      }
      if (!rules_path.empty()) {
        std::ifstream rf(rules_path);
        if (!rf) throw std::runtime_error("cannot open " + rules_path);
        std::stringstream ss;
        ss << rf.rdbuf();
        std::vector<RuleSpec> rules = rules_from_json(ss.str());
        os << "rule,alpha,m,base,gamma,q_states\n";
        for (double a : grid)
          for (const RuleSpec& r : rules) {
            GenericSolverOptions opts;
            opts.tol = tol;
            OptimizedRule opt = optimize_rule_generic(r, a, opts);
            os << r.name << ',' << fmt(a) << ',' << fmt(opt.m_star) << ',' << fmt(opt.base())
               << ',';
            for (size_t i = 0; i < opt.gamma_star.size(); ++i)
              os << (i ? ";" : "") << fmt(opt.gamma_star[i]);
            os << ',';
            for (size_t j = 0; j < opt.per_state_q.size(); ++j) {
              os << (j ? "|" : "");
              for (size_t i = 0; i < opt.per_state_q[j].size(); ++i)
                os << (i ? ";" : "") << fmt(opt.per_state_q[j][i]);
            }
            os << '\n';
          }
        return 0;
      }
      if (algo_name == "hs") {
        check_alpha_range(grid, true);
        Catalog cat = catalog_path.empty() ? generate_catalog(delta, threads)
                                           : catalog_from_file(catalog_path);
        os << "alpha,base\n";
        for (double a : grid) os << fmt(a) << ',' << fmt(hs_rate_at(cat, a, tol, threads)) << '\n';
        return 0;
      }
      VcAlgo algo = vc_algo_from_name(algo_name);
      check_alpha_range(grid, false);
      os << "alpha,base,worst_rule,gamma\n";
      for (double a : grid) {
        VcRateRow row = vc_rate_row(algo, a, delta, tol);
        os << fmt(row.alpha) << ',' << fmt(row.base) << ',' << row.worst << ',';
        for (size_t i = 0; i < row.gamma.size(); ++i) os << (i ? ";" : "") << fmt(row.gamma[i]);
        os << '\n';
      }
      return 0;
    }

    if (solve->parsed()) {
      auto t0 = std::chrono::steady_clock::now();
      bool ok = false;
      if (algo_name == "hs") {
        Hypergraph3 h = hypergraph_from_file(input_path);
        int hs_delta = solve->count("--delta") ? delta : 3;
        Catalog cat = catalog_path.empty() ? generate_catalog(hs_delta, threads)
                                           : catalog_from_file(catalog_path);
        bool need_gamma = false;
        for (const auto& e : cat.entries)
          if (!e.gamma) need_gamma = true;
        if (need_gamma) optimize_catalog_gammas(cat, alpha, tol, threads);
        if (!dump_dp_path.empty()) {
          std::ofstream df(dump_dp_path);
          dp_eval(build_recurrence_3hs(cat), std::max<int>(std::floor(alpha * k), 0), k)
              .dump_csv(df);
        }
        HsApproxResult res = alpha_hs(h, k, alpha, cat, repeat_multiplier, seed);
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0).count();
        std::cout << "hitting_set_size=" << res.best.hitting_set.size()
                  << " success=" << (res.success ? "true" : "false")
                  << " certain_failure=" << (res.certain_failure ? "true" : "false")
                  << " trials=" << res.trials << " dp_bound=" << fmt(res.dp_bound)
                  << " wall_ms=" << ms << '\n';
        std::cout << "set=";
        for (size_t i = 0; i < res.best.hitting_set.size(); ++i)
          std::cout << (i ? "," : "") << res.best.hitting_set[i] + 1;
        std::cout << '\n';
        ok = res.success;
      } else {
        Graph g = graph_from_dimacs_file(input_path);
        VcAlgo algo = vc_algo_from_name(algo_name);
        VcConfig cfg = make_optimized_config(algo, alpha, delta, tol);
        cfg.rng_seed = seed;
        CompositeRecurrence rec = build_recurrence(algo, cfg);
        if (!dump_dp_path.empty()) {
          std::ofstream df(dump_dp_path);
          dp_eval(rec, std::max<int>(std::floor(alpha * k), 0), k).dump_csv(df);
        }
        ApproxResult res = alpha_approx(g, k, alpha, algo, rec, cfg, repeat_multiplier, seed);
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0).count();
        std::cout << "cover_size=" << res.best.cover.size()
                  << " success=" << (res.success ? "true" : "false")
                  << " certain_failure=" << (res.certain_failure ? "true" : "false")
                  << " trials=" << res.trials << " dp_bound=" << fmt(res.dp_bound)
                  << " wall_ms=" << ms << '\n';
        std::cout << "cover=";
        for (size_t i = 0; i < res.best.cover.size(); ++i)
          std::cout << (i ? "," : "") << res.best.cover[i] + 1;
        std::cout << '\n';
        ok = res.success;
      }
      return ok ? 0 : 2;
    }

    if (catalog->parsed()) {
      Catalog cat = generate_catalog(delta, threads);
      catalog_to_file(cat, out_path);
      size_t max_m = 0;
      for (const auto& e : cat.entries) max_m = std::max(max_m, e.hitting_sets.size());
      std::cout << "entries=" << cat.entries.size() << " max_m=" << max_m << '\n';
      return 0;
    }

    if (figure->parsed()) {
      std::ostream& os = open_out(file, out_path);
      std::vector<double> grid = parse_grid(alpha_grid);
      check_alpha_range(grid, problem == "hs");
      os << "alpha,base\n";
      if (problem == "hs") {
        Catalog cat = catalog_path.empty() ? generate_catalog(delta, threads)
                                           : catalog_from_file(catalog_path);
        for (double a : grid) os << fmt(a) << ',' << fmt(hs_rate_at(cat, a, tol, threads)) << '\n';
      } else {
        for (double a : grid) {
          double enh = vc_rate_row(VcAlgo::EnhancedVc3Star, a, delta, tol).base;
          double bet = vc_rate_row(VcAlgo::BetterVc, a, delta, tol).base;
          os << fmt(a) << ',' << fmt(std::min(enh, bet)) << '\n';
        }
      }
      return 0;
    }

    if (verify->parsed()) {
      std::ostream& os = open_out(file, out_path);
      return run_verify_battery(seed, trials, tier == "full", os);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

namespace {

int run_verify_battery(uint64_t seed, int trials, bool full, std::ostream& os) {
  int failures = 0;
  auto emit = [&](const CheckReport& rep) {
    os << rep.line() << '\n';
    if (!rep.pass) ++failures;
  };

  // oracle agreement on a few random recurrences
  SplitMix64 rng(seed);
  for (int rcase = 0; rcase < 10; ++rcase) {
    CompositeRecurrence rec;
    int n_terms = 1 + static_cast<int>(rng.below(3));
    bool ok_shape = false;
    for (int j = 0; j < n_terms; ++j) {
      int r = 1 + static_cast<int>(rng.below(3));
      std::vector<int> b, kk;
      std::vector<double> g;
      for (int i = 0; i < r; ++i) {
        b.push_back(2 + static_cast<int>(rng.below(3)));
        kk.push_back(static_cast<int>(rng.below(4)));
        g.push_back(0.05 + rng.uniform01());
      }
      double s = 0;
      for (double x : g) s += x;
      for (double& x : g) x /= s;
      if (*std::max_element(kk.begin(), kk.end()) <= 1) ok_shape = true;
      rec.terms.emplace_back(b, kk, Distribution(g));
    }
    if (!ok_shape) rec.terms.emplace_back(std::vector<int>{2}, std::vector<int>{1},
                                          Distribution({1.0}));
    DpTable table = dp_eval(rec, 8, 6);
    double worst = 0.0;
    for (int b = 0; b <= 8; ++b)
      for (int kk = 0; kk <= 6; ++kk)
        worst = std::max(worst,
                         std::abs(naive_eval(rec, b, kk) - std::exp(table.log_p(b, kk))));
    CheckReport rep;
    rep.name = "oracle_rec" + std::to_string(rcase);
    rep.observed = worst;
    rep.bound = 1e-9;
    rep.pass = worst <= 1e-9;
    emit(rep);
  }

  // Monte-Carlo bounds on planted instances
  PlantedVc inst = make_planted_vc(30, 8, 0.12, seed + 11);
  for (VcAlgo algo : {VcAlgo::Vc3, VcAlgo::Vc3Star, VcAlgo::EnhancedVc3Star, VcAlgo::BetterVc}) {
    VcConfig cfg = make_optimized_config(algo, 1.5, 100);
    emit(monte_carlo_bound_check(algo, inst, cfg, 12, trials, seed + 17));
  }
  {
    Catalog cat = generate_catalog(3);
    optimize_catalog_gammas(cat, 2.0);
    PlantedHs hinst = make_planted_hs(24, 7, 0.5, seed + 23);
    emit(monte_carlo_bound_check_hs(hinst, cat, 14, trials, seed + 29));
  }

  // Theorem-level convergence for the basic algorithm
  {
    OptimizedRule r = optimize_simple_rule(1, 3, 0, 0, 1.5);
    VcConfig cfg;
    cfg.gamma_by_degree[3] = r.gamma_star[0];
    CompositeRecurrence rec = build_recurrence(VcAlgo::Vc3, cfg);
    std::vector<int> ks = full ? std::vector<int>{250, 500, 1000} : std::vector<int>{100, 200, 400};
    double gap = full ? 0.03 : 0.08;
    emit(convergence_check(rec, 1.5, r.m_star, ks, gap));
  }

  os << (failures == 0 ? "ALL CHECKS PASSED" : "FAILURES PRESENT") << '\n';
  return failures == 0 ? 0 : 1;
}

}  // namespace
