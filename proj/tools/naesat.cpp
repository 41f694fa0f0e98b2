#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "naesat/firstmoment.hpp"
#include "naesat/instance.hpp"
#include "naesat/io.hpp"
#include "naesat/parallel.hpp"
#include "naesat/rng.hpp"
#include "naesat/tworsb.hpp"
#include "naesat/verify.hpp"

using namespace naesat;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Globals {
  std::uint64_t seed = 0;
  int threads = 1;
  double tol = 0;  // 0 keeps the library defaults
  std::string out, csv;
  bool json = false;
  bool no_timestamp = false;
  std::string command;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string timestamp() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

Json provenance(const Globals& g, const Json& params) {
  Json p;
  p["tool"] = "naesat";
  p["version"] = kVersion;
  p["command"] = g.command;
  p["seed"] = g.seed;
  p["params"] = params;
  if (!g.no_timestamp) p["timestamp"] = timestamp();
  return p;
}

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty())
    std::cout << text;
  else
    write_text_file(g.out, text);
}

void emit_json(const Globals& g, const Json& params, Json body) {
  Json doc;
  doc["provenance"] = provenance(g, params);
  for (auto it = body.begin(); it != body.end(); ++it) doc[it.key()] = it.value();
  emit(g, doc.dump(2) + "\n");
}

// Tabular output: CSV with '#' provenance lines by default, JSON with --json; --csv FILE also writes CSV there.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

void emit_table(const Globals& g, const Json& params, const Table& t, const Json& extra = Json::object()) {
  std::ostringstream csv;
  const Json prov = provenance(g, params);
  csv << "# " << prov.dump() << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) csv << (i ? "," : "") << t.columns[i];
  csv << "\n";
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) csv << (i ? "," : "") << num(r[i]);
    csv << "\n";
  }
  if (!g.csv.empty()) write_text_file(g.csv, csv.str());
  if (g.json) {
    Json body = extra;
    Json rows = Json::array();
    for (const auto& r : t.rows) {
      Json row;
      for (std::size_t i = 0; i < r.size(); ++i) row[t.columns[i]] = r[i];
      rows.push_back(row);
    }
    body["rows"] = rows;
    emit_json(g, params, body);
  } else if (g.csv.empty() || !g.out.empty()) {
    emit(g, csv.str());
  }
}

// "lo:hi:n" with n >= 2.
std::vector<double> parse_grid(const std::string& spec, bool logarithmic) {
  double lo = 0, hi = 0;
  int n = 0;
  char c1 = 0, c2 = 0;
  std::istringstream is(spec);
  if (!(is >> lo >> c1 >> hi >> c2 >> n) || c1 != ':' || c2 != ':' || n < 2 || !(hi > lo))
    throw InvalidInput("grid must be lo:hi:n with lo < hi and n >= 2, got \"" + spec + "\"");
  if (logarithmic) return log_grid(lo, hi, n);
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  return g;
}

SpOptions sp_options(const Globals& g) {
  SpOptions o;
  if (g.tol > 0) o.tol = g.tol;
  return o;
}

RootOptions root_options(const Globals& g) {
  RootOptions o;
  o.sp = sp_options(g);
  if (g.tol > 0) o.tol = g.tol;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random regular k-NAE-SAT: 1RSB energy, Gardner threshold and 2RSB perturbation test"};
  app.fallthrough();
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--threads", g.threads, "Worker threads for scans")->check(CLI::PositiveNumber);
  app.add_option("--tol", g.tol, "Numerical tolerance override");
  app.add_option("--out", g.out, "Write the primary output to FILE");
  app.add_option("--csv", g.csv, "Write tabular output as CSV to FILE");
  app.add_flag("--json", g.json, "Print tabular output as JSON");
  app.add_flag("--no-timestamp", g.no_timestamp, "Omit the timestamp from the provenance header");

  int k = 3, trials = 1, cap = kDefaultNCap, max_nodes = 20;
  long long d = 3, n = 3;
  double alpha = 0, y = 1, zeta = 0.05, damping = 0.7, dreal = 0;
  std::string in, c_grid, alpha_grid, filter;
  bool direct = false, find_threshold = false, corrupt_s = false;

  auto* gen = app.add_subcommand("gen", "Sample a d-regular k-NAE-SAT instance");
  gen->add_option("--k", k)->required();
  gen->add_option("--d", d)->required();
  gen->add_option("--n", n)->required();

  auto* solve = app.add_subcommand("solve", "Exact ground state of an instance file");
  solve->add_option("--in", in)->required();
  solve->add_option("--cap", cap, "Largest N for exhaustive search");

  auto* mc = app.add_subcommand("mc", "Monte Carlo statistics of the exact ground-state energy density");
  mc->add_option("--k", k)->required();
  mc->add_option("--d", d)->required();
  mc->add_option("--n", n)->required();
  mc->add_option("--trials", trials)->required();
  mc->add_option("--cap", cap);

  auto* tree = app.add_subcommand("tree-check", "Compare the tree energy formula against brute force");
  tree->add_option("--in", in, "Tree JSON; random trees when omitted");
  tree->add_option("--trials", trials);
  tree->add_option("--k", k);
  tree->add_option("--max-nodes", max_nodes);

  auto* sp = app.add_subcommand("sp", "Solve the survey-propagation fixed point");
  sp->add_option("--k", k)->required();
  sp->add_option("--alpha", alpha)->required();
  sp->add_option("--y", y)->required();
  sp->add_option("--damping", damping);

  auto* curve = app.add_subcommand("energy-curve", "1RSB energy and bounds along a c grid");
  curve->add_option("--k", k)->required();
  curve->add_option("--c-grid", c_grid, "lo:hi:n")->required();

  auto* bnd = app.add_subcommand("bounds", "First-moment lower bound and the interpolation gap");
  bnd->add_option("--k", k)->required();
  bnd->add_option("--alpha", alpha)->required();

  auto* gard = app.add_subcommand("gardner", "Gardner stability along an alpha grid");
  gard->add_option("--k", k)->required();
  gard->add_option("--alpha-grid", alpha_grid, "lo:hi:n (log-spaced)");
  gard->add_flag("--find-threshold", find_threshold, "Locate the supremum crossing of branch*lambda = 1");

  auto* pert = app.add_subcommand("perturb", "2RSB perturbation expansion at a fixed point");
  pert->add_option("--k", k)->required();
  pert->add_option("--d", dreal)->required();
  pert->add_option("--y", y)->required();
  pert->add_option("--zeta", zeta)->required();
  pert->add_flag("--direct", direct, "Also evaluate the 2RSB functional by enumeration");

  auto* inst = app.add_subcommand("instability", "Compare the expansion sign flip with the Gardner crossing");
  inst->add_option("--k", k)->required();
  inst->add_option("--alpha-grid", alpha_grid, "lo:hi:n (log-spaced)");

  auto* ver = app.add_subcommand("verify", "Run the identity and oracle suite");
  ver->add_option("--filter", filter, "Only modules whose name contains this text");
  ver->add_flag("--corrupt-s", corrupt_s, "Test hook: perturb the central binomial table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::invalid_input);
  }
  g.command = app.get_subcommands().front()->get_name();

  try {
    if (*gen) {
      const Instance i = generate(make_params(k, d, n), g.seed);
      emit(g, instance_to_json(i).dump() + "\n");
    } else if (*solve) {
      const Instance i = instance_from_json(read_json_file(in));
      const GroundState gs = exact_ground_state(i, cap);
      emit_json(g, {{"in", in}, {"cap", cap}},
                {{"k", i.k()},
                 {"d", i.d()},
                 {"n", i.n()},
                 {"m", i.m()},
                 {"e_min_count", gs.energy},
                 {"e_min", static_cast<double>(gs.energy) / i.n()},
                 {"count_min", gs.count}});
    } else if (*mc) {
      const ModelParams p = make_params(k, d, n);
      const EminStats s = sample_emin_stats(p, trials, g.seed, cap, g.threads);
      Table t{{"k", "d", "n", "trials", "mean_emin", "std_emin", "min", "max"},
              {{double(k), double(d), double(n), double(trials), s.mean, s.stddev, s.min, s.max}}};
      emit_table(g, {{"k", k}, {"d", d}, {"n", n}, {"trials", trials}}, t);
    } else if (*tree) {
      Json rows = Json::array();
      int failures = 0;
      auto run = [&](const BoundaryTree& bt) {
        const int f = tree_energy_formula(bt), b = tree_energy_brute(bt);
        failures += f != b;
        rows.push_back({{"formula", f}, {"brute", b}, {"n_vars", bt.n_vars}, {"n_clauses", bt.n_clauses}});
      };
      if (!in.empty()) {
        run(tree_from_json(read_json_file(in)));
      } else {
        Xoshiro256 rng(g.seed);
        for (int t = 0; t < trials; ++t) run(random_tree(rng, k, max_nodes));
      }
      emit_json(g, {{"in", in}, {"trials", trials}, {"k", k}, {"max_nodes", max_nodes}},
                {{"trees", rows.size()}, {"failures", failures}, {"results", rows}});
      if (failures) return static_cast<int>(ExitCode::no_convergence);
    } else if (*sp) {
      SpOptions o = sp_options(g);
      o.damping = damping;
      const double dd = alpha * k;
      const SpPoint pt = sp_solve(k, dd, y, o);
      emit_json(g, {{"k", k}, {"alpha", alpha}, {"y", y}, {"damping", damping}},
                {{"x", pt.x},
                 {"w", pt.w},
                 {"residual", pt.residual},
                 {"iterations", pt.iterations},
                 {"in_mbullet", pt.in_mbullet},
                 {"derivative", sp_derivative(k, dd, y, pt.x)}});
    } else if (*curve) {
      const std::vector<double> cs = parse_grid(c_grid, false);
      Table t{{"k", "c", "alpha", "y_star", "Gamma", "x", "w", "F", "e_onersb", "e_lbd", "gap"}, {}};
      t.rows.resize(cs.size());
      const RootOptions ro = root_options(g);
      parallel_for(static_cast<int>(cs.size()), g.threads, [&](int i) {
        const double a = cs[i] * density_scale(k);
        const RootResult r = solve_ystar(k, a * k, ro);
        double el = NAN, gp = NAN;
        try {
          const BoundsReport b = bounds(k, a, ro.sp);
          el = b.e_lbd;
          gp = b.gap;
        } catch (const InvalidInput&) {
        }
        t.rows[i] = {double(k), cs[i], a, r.y_star, r.Gamma_at_root, r.at_root.x, r.at_root.w, r.at_root.F,
                     r.e_onersb, el, gp};
      });
      emit_table(g, {{"k", k}, {"c_grid", c_grid}}, t);
    } else if (*bnd) {
      const BoundsReport b = bounds(k, alpha, sp_options(g));
      emit_json(g, {{"k", k}, {"alpha", alpha}},
                {{"p_ubd", b.p_ubd},
                 {"eta", b.eta},
                 {"e_lbd", b.e_lbd},
                 {"y_eta", b.y_eta},
                 {"F", b.F},
                 {"gap", b.gap},
                 {"x_p", b.x_p}});
    } else if (*gard) {
      GardnerScanOptions o;
      o.threads = g.threads;
      o.root = root_options(g);
      if (!alpha_grid.empty()) {
        const std::vector<double> grid = parse_grid(alpha_grid, true);
        o.alpha_lo = grid.front();
        o.alpha_hi = grid.back();
        o.n_grid = static_cast<int>(grid.size());
      }
      const GardnerScan s = gardner_scan(k, o);
      Table t{{"alpha", "c", "y_star", "x", "w", "lambda", "branch_lambda"}, {}};
      for (const GardnerPoint& p : s.points) t.rows.push_back({p.alpha, p.c, p.y_star, p.x, p.w, p.lambda, p.branch_lambda});
      Json extra = {{"crossings", s.crossings}, {"found", s.found}};
      if (s.found) {
        extra["alpha_ga"] = s.alpha_ga;
        extra["alpha_ga_k3_over_4k"] = s.alpha_ga * k * k * k / std::ldexp(1.0, 2 * k);
      }
      const Json params = {{"k", k}, {"alpha_grid", alpha_grid}, {"n_grid", o.n_grid}};
      if (find_threshold) {
        if (!s.found) throw NoConvergence("gardner: no crossing of branch*lambda = 1 on the grid");
        emit_json(g, params, extra);
      } else {
        emit_table(g, params, t, extra);
      }
    } else if (*pert) {
      const SpPoint pt = sp_solve(k, dreal, y, sp_options(g));
      const PerturbationSetup s = perturbation(pt.x, y, zeta);
      const Expansion e = delta_phi_expansion(k, dreal, y, pt.x, s);
      const StabilityBundle b = build_matrices(k, dreal, y, pt);
      Json body = {{"x", pt.x}, {"expansion", e.value}, {"expansion_raw", e.raw}, {"branch_lambda", b.branch_lambda}};
      if (direct) {
        const int di = static_cast<int>(std::lround(dreal));
        if (std::abs(di - dreal) > 0) throw InvalidInput("--direct needs an integer d");
        const double base = phi_2rsb(y, y, q_ii(pt.x), k, di);
        const double moved = phi_2rsb(s.y1, s.y2, perturbed_q(s, pt.x), k, di);
        body["phi_base"] = base;
        body["phi_perturbed"] = moved;
        body["residual"] = moved - base - e.value;
      }
      emit_json(g, {{"k", k}, {"d", dreal}, {"y", y}, {"zeta", zeta}, {"direct", direct}}, body);
    } else if (*inst) {
      GardnerScanOptions o;
      o.threads = g.threads;
      o.root = root_options(g);
      if (!alpha_grid.empty()) {
        const std::vector<double> grid = parse_grid(alpha_grid, true);
        o.alpha_lo = grid.front();
        o.alpha_hi = grid.back();
        o.n_grid = static_cast<int>(grid.size());
      }
      const InstabilityScan s = instability_scan(k, o);
      Table t{{"alpha", "branch_lambda_minus_1", "coefficient"}, {}};
      for (std::size_t i = 0; i < s.grid.size(); ++i)
        t.rows.push_back({s.grid[i], s.lambda_values[i], s.coefficient_values[i]});
      Json extra = {{"lambda_crossings", s.lambda_crossings},
                    {"coefficient_crossings", s.coefficient_crossings},
                    {"found", s.found}};
      if (s.found) {
        extra["alpha_lambda"] = s.alpha_lambda;
        extra["alpha_coefficient"] = s.alpha_coefficient;
        extra["relative_difference"] = std::abs(s.alpha_coefficient / s.alpha_lambda - 1);
      }
      emit_table(g, {{"k", k}, {"alpha_grid", alpha_grid}, {"n_grid", o.n_grid}}, t, extra);
    } else if (*ver) {
      if (corrupt_s) set_corrupt_S_hook(true);
      const std::vector<CheckResult> res = run_verify(filter);
      std::ostringstream os;
      int failed = 0;
      for (const CheckResult& r : res) {
        failed += !r.passed;
        os << (r.passed ? "PASS " : "FAIL ") << r.module << " | " << r.identity << " | " << r.inputs
           << " | error " << num(r.observed) << " (tol " << num(r.tolerance) << ")\n";
      }
      os << res.size() - failed << "/" << res.size() << " checks passed\n";
      emit(g, os.str());
      if (res.empty()) throw InvalidInput("verify: filter \"" + filter + "\" matches no module");
      if (failed) return static_cast<int>(ExitCode::no_convergence);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::invalid_input);
  }
  return 0;
}
