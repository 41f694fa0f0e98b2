#include "naesat/gardner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "naesat/firstmoment.hpp"
#include "naesat/parallel.hpp"

namespace naesat {

int pair_index(Warning a, Warning b) {
  for (int i = 0; i < 9; ++i)
    if (kPairs[i][0] == a && kPairs[i][1] == b) return i;
  return -1;
}

const char* pair_name(int i) {
  static const char* names[9] = {"ff", "00", "11", "f0", "f1", "0f", "1f", "01", "10"};
  return names[i];
}

double rho_of(Warning w, double x) { return w == Warning::free ? x : (1 - x) / 2; }
double psi_of(Warning w, double wv) { return w == Warning::free ? 1 - wv : wv / 2; }

SSums s_sums(double d, double w, double y) {
  if (!(d >= 2)) throw InvalidInput("s_sums needs d >= 2");
  SSums s;
  s.d = d;
  s.w = w;
  s.y = y;
  const KernelTable t = kernel_table(d - 2, w, y);
  const double p = t.e.p;
  s.log_scale = t.logZ0 == -std::numeric_limits<double>::infinity() ? t.logZf : t.logZ0;
  const long double shift = s.log_scale;
  const double lq1 = std::log1p(-p);
  long double S0 = 0, S1 = 0, S2 = 0, Sge1 = 0;
  for (long l = t.lo; l <= t.hi; ++l) {
    const long double la = t.logA[l - t.lo] - shift;
    if (la == -std::numeric_limits<double>::infinity()) continue;
    Sge1 += std::exp(la) * t.P(l);
    if (l % 2 == 0) {
      S0 += std::exp(la + t.tails->logQ[l]);
      const long m = l / 2;
      if (m >= 1) S2 += std::exp(la + t.tails->logQ[l] + y + std::log(static_cast<long double>(m) / (m + 1)));
    } else {
      const long m = (l - 1) / 2;
      S1 += std::exp(la + t.tails->logQ[l - 1] + lq1 + std::log(static_cast<long double>(l) / (m + 1)));
    }
  }
  s.S0 = static_cast<double>(S0);
  s.S1 = static_cast<double>(S1);
  s.S2 = static_cast<double>(S2);
  s.Sge1 = static_cast<double>(Sge1);
  s.Sge2 = static_cast<double>(Sge1 - S1);
  return s;
}

double zdot_from_s(const SSums& s) { return s.S0 + 2 * (1 + std::expm1(-s.y) * s.w / 2) * s.Sge1; }

namespace {

// Output of the plain clause rule when the other k-2 inputs are all 0 (case 0), all 1 (case 1), mixed (case 2).
Warning clause_out(Warning in, int rest_case) {
  if (rest_case == 2) return Warning::free;
  const Warning common = rest_case == 0 ? Warning::zero : Warning::one;
  if (in != common) return Warning::free;
  return common == Warning::zero ? Warning::one : Warning::zero;
}

int sgn(Warning w) { return w == Warning::zero ? -1 : (w == Warning::one ? 1 : 0); }

Warning var_out(long balance) {
  return balance > 0 ? Warning::one : (balance < 0 ? Warning::zero : Warning::free);
}

double pair_rho(int i, double x) { return rho_of(kPairs[i][0], x); }
double pair_psi(int i, double w) { return psi_of(kPairs[i][0], w); }

}  // namespace

Vec9 gardner_xi(double x, double y) {
  const double r0 = (1 - x) / 2, rf = x, g = std::exp(-y / 2);
  Vec9 xi;
  xi << -2 * r0 * g, -rf, -rf, r0, r0, rf * g, rf * g, 0, 0;
  return xi;
}

StabilityBundle build_matrices(int k, double d, double y, const SpPoint& pt) {
  return build_matrices(k, d, y, pt.x);
}

StabilityBundle build_matrices(int k, double d, double y, double x) {
  SpPoint pt;
  pt.x = x;
  pt.w = clause_update(x, k);
  if (k < 2 || !(d >= 2)) throw InvalidInput("build_matrices needs k >= 2 and d >= 2");
  StabilityBundle b;
  b.k = k;
  b.d = d;
  b.y = y;
  b.x = pt.x;
  b.w = pt.w;
  b.rho0 = (1 - pt.x) / 2;
  b.rhof = pt.x;
  b.psi0 = pt.w / 2;
  b.psif = 1 - pt.w;
  b.r = std::pow(b.rho0, k - 2);
  b.S = s_sums(d, pt.w, y);
  b.Zdot = zdot_from_s(b.S);
  b.Zdot_kernel = std::exp(kernel_table(d - 1, pt.w, y).logZ() - b.S.log_scale);
  b.x_tilde = var_update(pt.w, y, d);
  b.fixed_point_residual = std::abs(b.x_tilde - pt.x);
  const double r = b.r, ey = std::exp(-y);
  const double S0 = b.S.S0, S1 = b.S.S1, Sg2 = b.S.Sge2, Sg1 = b.S.Sge1;

  enum { ff, z0, z1, f0, f1, zf, of, zo, oz };
  auto put_sym = [](Mat9& m, int i, int j, double v) {
    m(i, j) = v;
    m(kSwap01[i], kSwap01[j]) = v;
  };

  b.Nhat.setZero();
  put_sym(b.Nhat, ff, ff, 1);
  for (int j : {z0, f0, zf}) put_sym(b.Nhat, ff, j, 1 - r);
  put_sym(b.Nhat, z0, z1, r);
  put_sym(b.Nhat, f0, f1, r);
  put_sym(b.Nhat, zf, of, r);

  b.N.setZero();
  put_sym(b.N, ff, ff, S0);
  for (int j : {ff, f1, of}) put_sym(b.N, z0, j, Sg1);
  put_sym(b.N, ff, f0, (1 - r) * S0);
  put_sym(b.N, ff, zf, (1 - r) * S0);
  put_sym(b.N, z0, z1, r * S0 + Sg1);
  put_sym(b.N, z0, zf, (1 - r) * S1 + Sg2);
  put_sym(b.N, ff, z0, (1 - r) * S0 + r * S1 * ey);
  put_sym(b.N, z0, z0, (1 - r) * Sg1 + r * Sg2 * ey);
  put_sym(b.N, z0, f0, (1 - r) * Sg1 + r * Sg2 * ey);
  put_sym(b.N, f0, f1, r * S0);
  put_sym(b.N, f0, zf, r * S1);
  put_sym(b.N, zf, f0, r * S1 * ey);
  put_sym(b.N, zf, of, r * S0);

  b.Bhat.setZero();
  b.B.setZero();
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) {
      b.Bhat(i, j) = pair_rho(j, pt.x) * b.Nhat(i, j) / pair_psi(i, pt.w);
      b.B(i, j) = pair_rho(j, pt.x) * b.N(i, j) / (b.Zdot * pair_rho(i, b.x_tilde));
    }

  // Generic route: clause part from the three cases of the other k-2 inputs,
  // variable part from the balance classes of the other d-2 messages.
  const double case_p[3] = {r, r, 1 - 2 * r};
  b.Nhat_full.setZero();
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j)
      for (int c = 0; c < 3; ++c)
        if (clause_out(kPairs[j][0], c) == kPairs[i][0] && clause_out(kPairs[j][1], c) == kPairs[i][1])
          b.Nhat_full(i, j) += case_p[c];
  const long bal[5] = {-2, -1, 0, 1, 2};
  const double bal_w[5] = {Sg2, S1, S0, S1, Sg2};
  b.Ndot.setZero();
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j)
      for (int c = 0; c < 5; ++c) {
        const Warning wh = kPairs[j][0], sh = kPairs[j][1];
        if (var_out(bal[c] + sgn(wh)) != kPairs[i][0] || var_out(bal[c] + sgn(sh)) != kPairs[i][1]) continue;
        const bool opposes = (bal[c] > 0 && sh == Warning::zero) || (bal[c] < 0 && sh == Warning::one);
        b.Ndot(i, j) += bal_w[c] * (opposes ? ey : 1.0);
      }
  b.N_full = b.Ndot * b.Nhat_full;
  b.Bhat_full.setZero();
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 9; ++j) b.Bhat_full(i, j) = pair_rho(j, pt.x) * b.Nhat_full(i, j) / pair_psi(i, pt.w);
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j) b.B_full(i, j) = pair_rho(j, pt.x) * b.N_full(i, j) / (b.Zdot * pair_rho(i, b.x_tilde));

  b.B4 = b.B.block<4, 4>(3, 3);
  b.Bneq = b.B_full.block<6, 6>(3, 3);
  b.lambda = r * (S0 + S1 * std::exp(-y / 2)) / b.Zdot;
  b.xi = gardner_xi(pt.x, y);
  b.branch = (d - 1) * (k - 1);
  b.branch_lambda = b.branch * b.lambda;
  return b;
}

double gardner_lambda(int k, double d, double y, double x) {
  const double w = clause_update(x, k);
  const SSums s = s_sums(d, w, y);
  return std::pow((1 - x) / 2, k - 2) * (s.S0 + s.S1 * std::exp(-y / 2)) / zdot_from_s(s);
}

Mat9 brute_force_B(int k, int d, double y, double x) {
  const int branch = (d - 1) * (k - 1);
  if (k < 2 || d < 2) throw InvalidInput("brute_force_B needs k >= 2 and d >= 2");
  if (branch > 16) throw ResourceCap("brute_force_B: branch (d-1)(k-1) exceeds 16");
  const Warning vals[3] = {Warning::zero, Warning::one, Warning::free};
  const int rest_n = branch - 1;
  std::vector<int> digit(rest_n, 0);
  long double num[9][9] = {};
  long double den[3] = {};
  std::vector<Warning> clause_in(k - 1), var_in(d - 1);
  long total = 1;
  for (int i = 0; i < rest_n; ++i) total *= 3;
  for (long it = 0; it < total; ++it) {
    long double weight = 1;
    for (int i = 0; i < rest_n; ++i) weight *= rho_of(vals[digit[i]], x);
    // Clauses 1..d-2 are fixed by the rest; clause 0 holds the varied input at slot 0.
    for (int a = 1; a < d - 1; ++a) {
      for (int j = 0; j < k - 1; ++j) clause_in[j] = vals[digit[a * (k - 1) + j - 1]];
      var_in[a] = wp_clause_plain(clause_in);
    }
    Warning vout[3];
    int phi[3];
    for (int f = 0; f < 3; ++f) {
      clause_in[0] = vals[f];
      for (int j = 1; j < k - 1; ++j) clause_in[j] = vals[digit[j - 1]];
      var_in[0] = wp_clause_plain(clause_in);
      vout[f] = wp_var(var_in);
      phi[f] = phi_var(var_in);
      den[static_cast<int>(vout[f])] += rho_of(vals[f], x) * weight * std::exp(-y * static_cast<long double>(phi[f]));
    }
    for (int a = 0; a < 3; ++a)
      for (int s = 0; s < 3; ++s) {
        const int col = pair_index(vals[a], vals[s]);
        const int row = pair_index(vout[a], vout[s]);
        num[row][col] += rho_of(vals[a], x) * weight * std::exp(-y * static_cast<long double>(phi[s]));
      }
    for (int i = 0; i < rest_n; ++i) {
      if (++digit[i] < 3) break;
      digit[i] = 0;
    }
  }
  Mat9 B = Mat9::Zero();
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j)
      if (num[i][j] != 0) B(i, j) = static_cast<double>(num[i][j] / den[static_cast<int>(kPairs[i][0])]);
  return B;
}

Mat9 brute_force_Bhat(int k, double x) {
  if (k < 2 || k > 14) throw ResourceCap("brute_force_Bhat needs 2 <= k <= 14");
  const Warning vals[3] = {Warning::zero, Warning::one, Warning::free};
  const int rest_n = k - 2;
  long total = 1;
  for (int i = 0; i < rest_n; ++i) total *= 3;
  std::vector<int> digit(rest_n, 0);
  std::vector<Warning> in(k - 1);
  long double num[9][9] = {};
  long double den[3] = {};
  for (long it = 0; it < total; ++it) {
    long double weight = 1;
    for (int i = 0; i < rest_n; ++i) {
      weight *= rho_of(vals[digit[i]], x);
      in[i + 1] = vals[digit[i]];
    }
    Warning out[3];
    for (int f = 0; f < 3; ++f) {
      in[0] = vals[f];
      out[f] = wp_clause_plain(in);
      den[static_cast<int>(out[f])] += rho_of(vals[f], x) * weight;
    }
    for (int a = 0; a < 3; ++a)
      for (int s = 0; s < 3; ++s)
        num[pair_index(out[a], out[s])][pair_index(vals[a], vals[s])] += rho_of(vals[a], x) * weight;
    for (int i = 0; i < rest_n; ++i) {
      if (++digit[i] < 3) break;
      digit[i] = 0;
    }
  }
  Mat9 B = Mat9::Zero();
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j)
      if (num[i][j] != 0) B(i, j) = static_cast<double>(num[i][j] / den[static_cast<int>(kPairs[i][0])]);
  return B;
}

double top_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) best = std::max(best, es.eigenvalues()[i].real());
  return best;
}

GardnerPoint gardner_point(int k, double alpha, const RootOptions& opt) {
  GardnerPoint g;
  g.alpha = alpha;
  g.d = alpha * k;
  g.c = alpha / density_scale(k);
  RootOptions o = opt;
  o.dual = false;
  const RootResult root = solve_ystar(k, g.d, o);
  g.y_star = root.y_star;
  g.x = root.at_root.x;
  g.w = root.at_root.w;
  g.lambda = gardner_lambda(k, g.d, g.y_star, g.x);
  g.branch_lambda = (g.d - 1) * (k - 1) * g.lambda;
  return g;
}

GardnerPoint gardner_point_or_nan(int k, double alpha, const RootOptions& opt) {
  try {
    return gardner_point(k, alpha, opt);
  } catch (const NoConvergence&) {
    GardnerPoint g;
    g.alpha = alpha;
    g.d = alpha * k;
    g.c = alpha / density_scale(k);
    g.y_star = g.x = g.w = g.lambda = g.branch_lambda = std::numeric_limits<double>::quiet_NaN();
    return g;
  }
}

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0 && hi > lo) || n < 2) throw InvalidInput("log_grid needs 0 < lo < hi and n >= 2");
  std::vector<double> g(n);
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) g[i] = std::exp(a + (b - a) * i / (n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}


CrossingScan scan_crossings(const std::function<double(double)>& f, const std::vector<double>& grid,
                            double rel_tol, int threads) {
  CrossingScan s;
  s.grid = grid;
  s.values.assign(grid.size(), 0);
  parallel_for(static_cast<int>(grid.size()), threads, [&](int i) { s.values[i] = f(grid[i]); });
  std::vector<std::pair<std::size_t, std::size_t>> brackets;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    if (std::isfinite(s.values[i]) && std::isfinite(s.values[i + 1]) && (s.values[i] < 0) != (s.values[i + 1] < 0))
      brackets.push_back({i, i + 1});
  s.crossings.assign(brackets.size(), 0);
  parallel_for(static_cast<int>(brackets.size()), threads, [&](int j) {
    double a = grid[brackets[j].first], b = grid[brackets[j].second];
    const bool neg_a = s.values[brackets[j].first] < 0;
    while (b - a > rel_tol * 0.5 * (a + b)) {
      const double m = 0.5 * (a + b);
      ((f(m) < 0) == neg_a ? a : b) = m;
    }
    s.crossings[j] = 0.5 * (a + b);
  });
  return s;
}

GardnerScan gardner_scan(int k, const GardnerScanOptions& opt) {
  GardnerScan out;
  out.k = k;
  const double lo = opt.alpha_lo > 0 ? opt.alpha_lo : alpha_sat_approx(k);
  const double hi = opt.alpha_hi > 0 ? opt.alpha_hi : std::ldexp(1.0, 2 * k) / k;
  const std::vector<double> grid = log_grid(lo, hi, opt.n_grid);
  out.points.resize(grid.size());
  parallel_for(static_cast<int>(grid.size()), opt.threads,
               [&](int i) { out.points[i] = gardner_point_or_nan(k, grid[i], opt.root); });
  std::vector<std::pair<std::size_t, std::size_t>> brackets;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    if (std::isfinite(out.points[i].branch_lambda) && std::isfinite(out.points[i + 1].branch_lambda) &&
        (out.points[i].branch_lambda < 1) != (out.points[i + 1].branch_lambda < 1))
      brackets.push_back({i, i + 1});
  out.crossings.assign(brackets.size(), 0);
  parallel_for(static_cast<int>(brackets.size()), opt.threads, [&](int j) {
    double a = grid[brackets[j].first], b = grid[brackets[j].second];
    const bool below_a = out.points[brackets[j].first].branch_lambda < 1;
    while (b - a > opt.rel_tol * 0.5 * (a + b)) {
      const double m = 0.5 * (a + b);
      ((gardner_point(k, m, opt.root).branch_lambda < 1) == below_a ? a : b) = m;
    }
    out.crossings[j] = 0.5 * (a + b);
  });
  out.found = !out.crossings.empty();
  if (out.found) out.alpha_ga = *std::max_element(out.crossings.begin(), out.crossings.end());
  return out;
}

}  // namespace naesat
