// One line per acceptance criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "naesat/firstmoment.hpp"
#include "naesat/gardner.hpp"
#include "naesat/instance.hpp"
#include "naesat/tworsb.hpp"
#include "naesat/wp.hpp"

using namespace naesat;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Point {
  int k;
  double c, d;
};

std::vector<Point> matrix(std::initializer_list<int> ks) {
  std::vector<Point> out;
  for (int k : ks)
    for (double c : {1.5, 3.0, 10.0, 100.0}) out.push_back({k, c, c * k * density_scale(k)});
  return out;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

Outcome identities() {
  double worst = 0;
  const std::vector<double> ws{0.01, 0.05, 0.2, 0.5, 0.9}, ys{0.0, 0.3, 1.0, 3.0, 8.0};
  for (double y : ys) {
    const auto t = binomial_tails(y, 200);
    const double p = energy_params(y).p;
    for (long l = 1; l <= 200; ++l) {
      const double lhs = t->P[l] + t->Q[l] / 2;
      const double rhs = l % 2 == 0 ? t->P[l - 1] : t->P[l - 1] + (1 - p) * t->Q[l - 1];
      worst = std::max(worst, rel(lhs, rhs));
    }
    for (double w : ws) {
      const KernelTable kt = kernel_table(200, w, y, {.full_range = true});
      for (long l = kt.lo; l <= kt.hi; ++l) {
        const double g = kt.G(l) * kt.S(l);
        if (g > 1e-250) worst = std::max(worst, rel(kt.A(l) * kt.Q(l), g));
      }
    }
  }
  double worst_ratio = 0;
  for (int i = 0; i < 20; ++i) {
    const double w = 0.005 + 0.045 * (i % 5), y = 0.25 + 0.9 * (i / 5), d = 12 + 47 * i;
    const double lhs = std::exp(log_dfz(d, w, y) - kernel_table(d - 1, w, y).logZ());
    const double rhs = 1 - w * (1 - var_update(w, y, d)) * (1 - energy_params(y).AM);
    worst_ratio = std::max(worst_ratio, rel(lhs, rhs));
  }
  double worst_hfz = 0, worst_f0 = 0;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      const double x = i / 9.0, w = j / 9.0;
      worst_f0 = std::max(worst_f0, std::abs(free_energy(6, 150, 0, x, w)));
      if (j == 0) {
        for (double y : {0.5, 2.0}) {
          const double wx = clause_update(x, 6);
          worst_hfz = std::max(worst_hfz, rel(std::exp(log_hfz(6, x, y)), std::exp(log_efz(x, wx, y))));
        }
      }
    }
  bool gamma_ok = true;
  for (double y = 0; y <= 20; y += 0.05)
    for (double c : {0.5, 2.0, 50.0}) {
      const double g = gamma_of(c, y), G = Gamma_of(c, y);
      gamma_ok = gamma_ok && G >= g / 2 * (1 - 1e-14) && G <= g * (1 + 1e-14);
    }
  Outcome o;
  o.pass = worst < 1e-12 && worst_ratio < 1e-12 && worst_hfz < 1e-14 && worst_f0 < 1e-12 && gamma_ok;
  o.detail = "kernel/recurrence rel " + fmt(worst) + ", dfz ratio rel " + fmt(worst_ratio) + ", hfz-efz rel " +
             fmt(worst_hfz) + ", |F(y=0)| " + fmt(worst_f0) + ", gamma/2<=Gamma<=gamma " + (gamma_ok ? "ok" : "violated");
  return o;
}

Outcome tree_formula() {
  Xoshiro256 rng(20240601);
  int bad = 0;
  for (int t = 0; t < 100; ++t) {
    const BoundaryTree tree = random_tree(rng, 3, 20);
    bad += tree_energy_formula(tree) != tree_energy_brute(tree);
  }
  return {bad == 0, std::to_string(bad) + " mismatches on 100 trees"};
}

Outcome stationarity() {
  double worst_st = 0, worst_dual = 0;
  for (const Point& p : matrix({8, 10, 12})) {
    const RootResult r = solve_ystar(p.k, p.d);
    const OneRsbValue& v = r.at_root;
    const Stationarity s = stationarity_check(p.k, p.d, r.y_star, v.x, v.w);
    worst_st = std::max({worst_st, std::abs(s.dF_dx) / (1 + std::abs(s.F)), std::abs(s.dF_dw) / (1 + std::abs(s.F))});
    worst_dual = std::max(worst_dual, std::abs(v.e + dF_dy(p.k, p.d, r.y_star)) / std::abs(v.e));
  }
  return {worst_st < 1e-6 && worst_dual < 1e-5,
          "max |dF|/(1+|F|) " + fmt(worst_st) + " (tol 1e-6), max |e+F'|/|e| " + fmt(worst_dual) + " (tol 1e-5)"};
}

Outcome root() {
  int bad_sign = 0, bad_band = 0, bad_convex = 0;
  double worst_band = 0, min_f2 = std::numeric_limits<double>::infinity();
  for (const Point& p : matrix({8, 10, 12, 14})) {
    const double ylo = y_for_gamma(p.c, 0.25), yhi = std::min(y_for_gamma(p.c, 4.0), 50.0);
    const std::vector<double> ys = log_grid(ylo, yhi, 80);
    int changes = 0;
    double prev = evaluate_onersb(p.k, p.d, ys[0]).Sigma;
    for (std::size_t i = 1; i < ys.size(); ++i) {
      const double s = evaluate_onersb(p.k, p.d, ys[i]).Sigma;
      changes += (s < 0) != (prev < 0);
      prev = s;
    }
    bad_sign += changes != 1;
    const RootResult r = solve_ystar(p.k, p.d);
    const double tol = 0.2 - 0.025 * (p.k - 8);
    worst_band = std::max(worst_band, std::abs(r.Gamma_at_root - 1) / tol);
    bad_band += std::abs(r.Gamma_at_root - 1) > tol;
    const std::vector<double> f2 =
        convexity_check(p.k, p.d, linspace(y_for_gamma(p.c, 0.5), y_for_gamma(p.c, 2.0), 20));
    for (double v : f2) {
      min_f2 = std::min(min_f2, v);
      bad_convex += !(v > 0);
    }
  }
  return {bad_sign == 0 && bad_band == 0 && bad_convex == 0,
          std::to_string(bad_sign) + " points without exactly one Sigma sign change, " + std::to_string(bad_band) +
              " Gamma(y*) outside band (worst |Gamma-1|/tol " + fmt(worst_band) + "), " + std::to_string(bad_convex) +
              " non-positive F'' (min " + fmt(min_f2) + ")"};
}

Outcome ordering() {
  int bad = 0;
  double min_gap = std::numeric_limits<double>::infinity(), min_slack = min_gap;
  for (const Point& p : matrix({8, 10, 12})) {
    const double alpha = p.d / p.k;
    const BoundsReport b = bounds(p.k, alpha);
    const RootResult r = solve_ystar(p.k, p.d);
    min_gap = std::min(min_gap, b.gap);
    min_slack = std::min(min_slack, r.e_onersb - b.e_lbd);
    bad += !(b.gap > 0) + !(b.e_lbd <= r.e_onersb);
  }
  int bad_x = 0;
  for (int k : {8, 10, 12})
    for (int i = 1; i <= 200; ++i) bad_x += correction_x(i / 200.0, k) > std::pow(2.0, -k / 2.0);
  return {bad == 0 && bad_x == 0, "min gap " + fmt(min_gap) + ", min e1RSB - e_lbd " + fmt(min_slack) + ", " +
                                      std::to_string(bad_x) + " x(p) above 2^(-k/2)"};
}

Outcome stability() {
  double worst_brute = 0;
  for (int d : {4, 5})
    for (double y : {0.5, 1.0, 2.5})
      for (double x : {0.15, 0.3, 0.6}) {
        const StabilityBundle b = build_matrices(3, d, y, x);
        const Mat9 brute = brute_force_B(3, d, y, x);
        for (int i = 0; i < 7; ++i)
          for (int j = 0; j < 7; ++j)
            worst_brute = std::max(worst_brute, brute(i, j) == 0 ? std::abs(b.B(i, j)) : rel(b.B(i, j), brute(i, j)));
      }
  double worst_res = 0, worst_eig = 0, worst_col = 0, worst_z = 0;
  for (const Point& p : matrix({8, 10, 12})) {
    const RootResult r = solve_ystar(p.k, p.d);
    const StabilityBundle b = build_matrices(p.k, p.d, r.y_star, r.at_root.x);
    worst_res = std::max(worst_res, (b.B * b.xi - b.lambda * b.xi).cwiseAbs().maxCoeff());
    worst_eig = std::max({worst_eig, rel(b.lambda, top_eigenvalue(b.B4)), rel(b.lambda, top_eigenvalue(b.Bneq))});
    for (int i = 0; i < 3; ++i)
      worst_col = std::max({worst_col, std::abs(b.B.row(i).head(3).sum() - 1), std::abs(b.Bhat.row(i).head(3).sum() - 1)});
    worst_z = std::max(worst_z, rel(b.Zdot, b.Zdot_kernel));
  }
  return {worst_brute < 1e-10 && worst_res < 1e-10 && worst_eig < 1e-10 && worst_col < 1e-8 && worst_z < 1e-12,
          "B vs brute rel " + fmt(worst_brute) + ", |B xi - lambda xi| " + fmt(worst_res) + ", lambda vs eigen rel " +
              fmt(worst_eig) + ", column sums " + fmt(worst_col) + ", Zdot rel " + fmt(worst_z)};
}

Outcome gardner_scaling() {
  GardnerScanOptions opt;
  opt.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  double lo = std::numeric_limits<double>::infinity(), hi = 0, worst_flip = 0;
  int missing = 0;
  std::ostringstream ratios;
  for (int k = 8; k <= 14; ++k) {
    const InstabilityScan s = instability_scan(k, opt);
    if (!s.found) {
      ++missing;
      ratios << " k" << k << "=none";
      continue;
    }
    const double ratio = s.alpha_lambda * std::pow(k, 3) / std::pow(4.0, k);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    worst_flip = std::max(worst_flip, rel(s.alpha_coefficient, s.alpha_lambda));
    ratios << " k" << k << "=" << fmt(ratio);
  }
  const double spread = hi / lo;
  return {missing == 0 && spread < 3 && worst_flip < 1e-4,
          "alpha_Ga k^3/4^k:" + ratios.str() + ", spread " + fmt(spread) + " (tol 3), flip vs crossing rel " +
              fmt(worst_flip) + " (tol 1e-4)"};
}

Outcome two_rsb() {
  double worst_id = 0;
  for (double x : {0.1, 0.3, 0.6})
    for (double y : {0.5, 1.0, 2.5})
      worst_id = std::max(worst_id, rel(phi_2rsb(y, y, q_ii(x), 3, 4), free_energy(3, 4, y, x, clause_update(x, 3)) / y));
  const int k = 3, d = 7;
  const double y = 2.0;
  const SpPoint pt = sp_solve(k, d, y);
  const AuxMatrices m = aux_matrices(k, y, pt.x);
  const StabilityBundle b = build_matrices(k, d, y, pt);
  const double g = std::exp(-y / 2);
  const Vec9 bx = b.Bhat * b.xi;
  double aux = std::max((m.Pi * b.xi).cwiseAbs().maxCoeff(), (m.P * m.Gamma * m.P).cwiseAbs().maxCoeff());
  aux = std::max({aux, rel(bx.dot(m.Gamma * b.xi), (1 - g) * g * (1 - pt.x) * pt.x * pt.x * pt.w),
                  rel(bx.dot(m.Xi * b.xi), (1 - g) * (1 - std::exp(-y)) * (1 - pt.x) * pt.x * pt.x * pt.w)});
  const double base = phi_2rsb(y, y, q_ii(pt.x), k, d);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const std::vector<double> zetas{0.02, 0.03, 0.045, 0.07, 0.1};
  for (double z : zetas) {
    const PerturbationSetup s = perturbation(pt.x, y, z);
    const double direct = phi_2rsb(s.y1, s.y2, perturbed_q(s, pt.x), k, d) - base;
    const double lr = std::log(std::abs(direct - delta_phi_expansion(k, d, y, pt.x, s).value)), lz = std::log(z);
    sx += lz;
    sy += lr;
    sxx += lz * lz;
    sxy += lz * lr;
  }
  const double n = static_cast<double>(zetas.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {worst_id < 1e-10 && aux < 1e-12 && std::abs(slope - 6) <= 0.5,
          "Phi(y,y,Q_II) vs F/y rel " + fmt(worst_id) + ", aux identities " + fmt(aux) + ", residual slope " +
              fmt(slope) + " (6 +- 0.5)"};
}

Outcome interpolation() {
  const int k = 3, trials = 200;
  const int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::ostringstream out;
  bool ok = true;
  for (int d : {3, 6})
    for (int n : {12, 18, 24}) {
      const EminStats s = sample_emin_stats(make_params(k, d, n), trials, 1000 * d + n, kDefaultNCap, threads);
      const double alpha = static_cast<double>(d) / k;
      const double lbd = alpha < alpha_floor(k) ? 0.0 : e_lbd(alpha, k);
      const double floor = lbd - 3 * s.stddev / std::sqrt(static_cast<double>(trials));
      ok = ok && s.mean >= floor;
      out << " d" << d << "N" << n << "=" << fmt(s.mean);
    }
  return {ok, "mean e_min:" + out.str() + " (soft check against e_lbd, 0 below the first-moment floor)"};
}

}  // namespace

int main() {
  struct Item {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Item> items{
      {"1 exact identities", identities},          {"2 tree formula", tree_formula},
      {"3 SP stationarity and dual energy", stationarity}, {"4 1RSB root", root},
      {"5 bound ordering", ordering},              {"6 stability matrices", stability},
      {"7 Gardner scaling", gardner_scaling},      {"8 2RSB oracle", two_rsb},
      {"9 interpolation consistency", interpolation},
  };
  int failed = 0;
  for (const Item& it : items) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = it.run();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("%s criterion %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", it.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, items.size());
  return failed == 0 ? 0 : 1;
}
