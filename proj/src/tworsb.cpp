#include "naesat/tworsb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "naesat/parallel.hpp"

namespace naesat {

TrioMeasure trio(double p0, double p1, double pf) {
  TrioMeasure t;
  t.p = {p0, p1, pf};
  return t;
}

TrioMeasure unit_trio(Warning w) {
  TrioMeasure t;
  t.p = {0, 0, 0};
  t.p[static_cast<int>(w)] = 1;
  return t;
}

void FiniteQ::validate(double tol) const {
  if (mass.empty() || mass.size() != atoms.size()) throw InvalidInput("FiniteQ: empty or mismatched support");
  double total = 0;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    if (!(mass[i] >= 0)) throw InvalidInput("FiniteQ: negative mass");
    double s = 0;
    for (double v : atoms[i].p) {
      if (!(v >= -tol)) throw InvalidInput("FiniteQ: atom has a negative entry");
      s += v;
    }
    if (std::abs(s - 1) > tol) throw InvalidInput("FiniteQ: atom does not sum to one");
    total += mass[i];
  }
  if (std::abs(total - 1) > tol) throw InvalidInput("FiniteQ: masses do not sum to one");
}

FiniteQ q_ii(double x) {
  FiniteQ q;
  for (Warning w : {Warning::zero, Warning::one, Warning::free}) {
    q.mass.push_back(rho_of(w, x));
    q.atoms.push_back(unit_trio(w));
  }
  return q;
}

namespace {

void check_temperatures(double y1, double y2) {
  if (!(y1 > 0) || !(y2 > 0)) throw InvalidInput("2RSB functional needs positive y1 and y2");
  if (y1 > y2) throw InvalidInput("2RSB functional needs y1 <= y2");
}

// Binomial coefficient as a double, for enumeration budgets.
double choose(double n, double r) {
  double c = 1;
  for (int i = 1; i <= r; ++i) c = c * (n - r + i) / i;
  return c;
}

}  // namespace

double big_g(double y1, double y2, const FiniteQ& q, int k, const TwoRsbOptions& opt) {
  check_temperatures(y1, y2);
  q.validate();
  const int s = static_cast<int>(q.mass.size());
  if (std::pow(s, k) > static_cast<double>(opt.max_terms))
    throw ResourceCap("big_g: support^k exceeds the enumeration cap");
  const long double a = -std::expm1(-y2);
  const long double power = y1 / y2;
  std::vector<int> idx(k, 0);
  long double total = 0;
  for (;;) {
    long double m = 1, all0 = 1, all1 = 1;
    for (int i : idx) {
      m *= q.mass[i];
      all0 *= q.atoms[i].p[0];
      all1 *= q.atoms[i].p[1];
    }
    if (m > 0) total += m * std::pow(1 - a * (all0 + all1), power);
    int j = 0;
    while (j < k && ++idx[j] == s) idx[j++] = 0;
    if (j == k) break;
  }
  return static_cast<double>(total);
}

double big_w(double y1, double y2, const FiniteQ& q, int k, int d, const TwoRsbOptions& opt) {
  check_temperatures(y1, y2);
  q.validate();
  if (k < 2 || d < 1) throw InvalidInput("big_w needs k >= 2 and d >= 1");
  const int s = static_cast<int>(q.mass.size());
  if (std::pow(s, k - 1) > 1e6) throw ResourceCap("big_w: support^(k-1) exceeds the clause-type cap");

  // Clause types: the k-1 inputs of one clause determine its outgoing law and mass.
  struct ClauseType {
    long double mass;
    long double psi[3];
  };
  std::vector<ClauseType> types;
  {
    std::vector<int> idx(k - 1, 0);
    for (;;) {
      long double m = 1, all0 = 1, all1 = 1;
      for (int i : idx) {
        m *= q.mass[i];
        all0 *= q.atoms[i].p[0];
        all1 *= q.atoms[i].p[1];
      }
      if (m > 0) types.push_back({m, {all1, all0, 1 - all0 - all1}});
      int j = 0;
      while (j < k - 1 && ++idx[j] == s) idx[j++] = 0;
      if (j == k - 1) break;
    }
  }
  const int t = static_cast<int>(types.size());
  if (choose(t + d - 1, d) > static_cast<double>(opt.max_terms))
    throw ResourceCap("big_w: number of clause-type multisets exceeds the enumeration cap");

  const long double power = y1 / y2;
  std::vector<long double> pen(d + 1);
  for (int m = 0; m <= d; ++m) pen[m] = std::exp(-static_cast<long double>(y2) * m);
  std::vector<long double> lfact(d + 1, 0);
  for (int m = 1; m <= d; ++m) lfact[m] = lfact[m - 1] + std::log(static_cast<long double>(m));

  // dp[a][b]: weight of a zero-warnings and b one-warnings among the clauses chosen so far.
  std::vector<std::vector<long double>> dp(d + 1, std::vector<long double>(d + 1, 0));
  long double total = 0;

  auto finish = [&](const std::vector<int>& counts) {
    for (auto& row : dp) std::fill(row.begin(), row.end(), 0.0L);
    dp[0][0] = 1;
    int placed = 0;
    long double log_coef = lfact[d], weight = 1;
    for (int ti = 0; ti < t; ++ti) {
      const int c = counts[ti];
      if (c == 0) continue;
      log_coef -= lfact[c];
      weight *= std::pow(types[ti].mass, static_cast<long double>(c));
      const long double* p = types[ti].psi;
      for (int rep = 0; rep < c; ++rep, ++placed) {
        for (int a = placed; a >= 0; --a)
          for (int b = placed - a; b >= 0; --b) {
            const long double v = dp[a][b];
            if (v == 0) continue;
            dp[a][b] = v * p[2];
            dp[a + 1][b] += v * p[0];
            dp[a][b + 1] += v * p[1];
          }
      }
    }
    long double inner = 0;
    for (int a = 0; a <= d; ++a)
      for (int b = 0; a + b <= d; ++b)
        if (dp[a][b] != 0) inner += dp[a][b] * pen[std::min(a, b)];
    total += std::exp(log_coef) * weight * std::pow(inner, power);
  };

  std::vector<int> counts(t, 0);
  // Enumerate compositions of d into t nonnegative parts.
  auto rec = [&](auto&& self, int ti, int left) -> void {
    if (ti == t - 1) {
      counts[ti] = left;
      finish(counts);
      return;
    }
    for (int c = left; c >= 0; --c) {
      counts[ti] = c;
      self(self, ti + 1, left - c);
    }
  };
  rec(rec, 0, d);
  return static_cast<double>(total);
}

double phi_2rsb(double y1, double y2, const FiniteQ& q, int k, int d, const TwoRsbOptions& opt) {
  const double w = big_w(y1, y2, q, k, d, opt);
  const double g = big_g(y1, y2, q, k, opt);
  const double alpha = static_cast<double>(d) / k;
  return (std::log(w) - alpha * (k - 1) * std::log(g)) / y1;
}

namespace {

double phibar(Warning a, Warning b) {
  return (a == Warning::zero && b == Warning::one) || (a == Warning::one && b == Warning::zero) ? 1.0 : 0.0;
}

}  // namespace

AuxMatrices aux_matrices(int k, double y, double x) {
  const double w = clause_update(x, k);
  AuxMatrices m;
  m.P.setZero();
  for (int i = 0; i < 3; ++i) m.P(i, i) = 1;
  const Warning all[3] = {Warning::zero, Warning::one, Warning::free};
  for (int i = 0; i < 9; ++i) {
    const Warning wh = kPairs[i][0], sh = kPairs[i][1];
    for (int j = 0; j < 9; ++j) {
      const Warning wd = kPairs[j][0], sd = kPairs[j][1];
      const double base = psi_of(wh, w) * rho_of(wd, x);
      const double e = std::exp(-y * phibar(sd, sh));
      m.Pi(i, j) = base * e;
      m.Xi(i, j) = base * std::exp(y * (phibar(wd, wh) - phibar(wd, sh) - phibar(sd, wh)));
      m.Gamma(i, j) = base * e * (phibar(sd, sh) - phibar(wd, wh));
      // Rows of Theta are (v r), columns (w s); nonzero only when v = w.
      const Warning v = kPairs[i][0], r = kPairs[i][1];
      double th = 0;
      if (v == wd)
        for (Warning u : all) th += psi_of(u, w) * std::exp(y * (phibar(wd, u) - phibar(r, u) - phibar(sd, u)));
      m.Theta(i, j) = th * rho_of(wd, x);
    }
  }
  return m;
}

PerturbationSetup zero_perturbation(double y) {
  PerturbationSetup s;
  s.y1 = s.y2 = y;
  return s;
}

PerturbationSetup perturbation(double x, double y, double zeta) {
  if (!(zeta >= 0 && zeta < 1)) throw InvalidInput("perturbation needs 0 <= zeta < 1");
  PerturbationSetup s;
  s.zeta = zeta;
  s.nu = 1 - zeta;
  s.y1 = y;
  s.y2 = y / s.nu;
  const double r0 = (1 - x) / 2, rf = x, g = std::exp(-y / 2);
  s.varpi << 2 * (1 - g) * r0, -(1 - g) * rf, -(1 - g) * rf, 0, 0, 0, 0, 0, 0;
  s.sigma << -2 * r0, -rf * g, -rf * g, r0, r0, rf * g, rf * g, 0, 0;
  const double z2 = zeta * zeta;
  s.delta_vec = z2 * s.varpi;
  s.delta[static_cast<int>(Warning::free)] = s.delta_vec(0);
  s.delta[static_cast<int>(Warning::zero)] = s.delta_vec(1);
  s.delta[static_cast<int>(Warning::one)] = s.delta_vec(2);
  s.eps = z2 / s.nu * s.sigma;
  s.pi.setZero();
  for (int i = 0; i < 3; ++i) s.pi(i) = s.delta_vec(i) * s.eps(i);
  s.tau = s.delta_vec + s.nu * (s.eps + s.pi);
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j)
      if (kPairs[i][0] == kPairs[j][0])
        s.Upsilon(i, j) = s.eps(pair_index(kPairs[j][0], kPairs[i][1])) * s.eps(j);
  return s;
}

FiniteQ perturbed_q(const PerturbationSetup& s, double x) {
  FiniteQ q;
  for (Warning w : {Warning::zero, Warning::one, Warning::free}) {
    TrioMeasure a = unit_trio(w);
    for (Warning t : {Warning::zero, Warning::one, Warning::free})
      a.p[static_cast<int>(t)] += s.eps(pair_index(w, t));
    q.atoms.push_back(a);
    q.mass.push_back(rho_of(w, x) * (1 + s.delta[static_cast<int>(w)]));
  }
  q.validate(1e-10);
  return q;
}

Expansion delta_phi_expansion(int k, double d, double y, double x, const PerturbationSetup& s) {
  const StabilityBundle b = build_matrices(k, d, y, x);
  const AuxMatrices m = aux_matrices(k, y, x);
  const double z = s.zeta, nu = s.nu;
  const Vec9 bt = b.Bhat * s.tau;
  const Mat9 mid = (m.Pi - y * z * m.Gamma) / nu - z * m.Xi;
  const Vec9 grow = b.branch * (b.B * s.tau) - s.tau;
  Expansion e;
  e.bracket = bt.dot(mid * grow);
  const double plain = (m.P * (m.Pi - y * z / nu * m.Gamma) * s.tau).sum();
  e.linear = plain - nu * z / 2 * s.Upsilon.cwiseProduct(m.Theta).sum();
  const double a = d * (k - 1) / 2, c = d * (k - 1) * (d * k - d - k) / 2;
  e.raw = a * e.bracket - c * plain * plain;
  e.efz = std::exp(log_efz(x, b.w, y));
  e.value = (a * e.bracket / e.efz - c * std::pow(e.linear / e.efz, 2)) / y;
  return e;
}

InstabilityPoint instability_point(int k, double alpha, const RootOptions& opt) {
  const GardnerPoint g = gardner_point(k, alpha, opt);
  InstabilityPoint p;
  p.alpha = alpha;
  p.d = g.d;
  p.y_star = g.y_star;
  p.x = g.x;
  const StabilityBundle b = build_matrices(k, g.d, g.y_star, g.x);
  const AuxMatrices m = aux_matrices(k, g.y_star, g.x);
  p.lambda = b.lambda;
  p.branch_lambda = b.branch_lambda;
  const Vec9 bx = b.Bhat * b.xi;
  p.gamma_product = bx.dot(m.Gamma * b.xi);
  p.xi_product = bx.dot(m.Xi * b.xi);
  const Vec9 grow = b.branch * (b.B * b.xi) - b.xi;
  p.coefficient = bx.dot((-g.y_star * m.Gamma - m.Xi) * grow);
  return p;
}

InstabilityScan instability_scan(int k, const GardnerScanOptions& opt) {
  InstabilityScan out;
  out.k = k;
  const double lo = opt.alpha_lo > 0 ? opt.alpha_lo : alpha_sat_approx(k);
  const double hi = opt.alpha_hi > 0 ? opt.alpha_hi : std::ldexp(1.0, 2 * k) / k;
  out.grid = log_grid(lo, hi, opt.n_grid);
  const int n = static_cast<int>(out.grid.size());
  out.lambda_values.resize(n);
  out.coefficient_values.resize(n);
  parallel_for(n, opt.threads, [&](int i) {
    try {
      const InstabilityPoint p = instability_point(k, out.grid[i], opt.root);
      out.lambda_values[i] = p.branch_lambda - 1;
      out.coefficient_values[i] = p.coefficient;
    } catch (const NoConvergence&) {
      out.lambda_values[i] = out.coefficient_values[i] = std::numeric_limits<double>::quiet_NaN();
    }
  });
  // Each sign change is refined by its own bisection on its own quantity.
  struct Job {
    std::size_t i;
    bool coefficient;
  };
  std::vector<Job> jobs;
  auto flips = [](const std::vector<double>& v, std::size_t i) {
    return std::isfinite(v[i]) && std::isfinite(v[i + 1]) && (v[i] < 0) != (v[i + 1] < 0);
  };
  for (std::size_t i = 0; i + 1 < out.grid.size(); ++i) {
    if (flips(out.lambda_values, i)) jobs.push_back({i, false});
    if (flips(out.coefficient_values, i)) jobs.push_back({i, true});
  }
  std::vector<double> roots(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), opt.threads, [&](int j) {
    const Job& job = jobs[j];
    auto f = [&](double a) {
      if (job.coefficient) return instability_point(k, a, opt.root).coefficient;
      return gardner_point(k, a, opt.root).branch_lambda - 1;
    };
    const std::vector<double>& vals = job.coefficient ? out.coefficient_values : out.lambda_values;
    double a = out.grid[job.i], b = out.grid[job.i + 1];
    const bool neg_a = vals[job.i] < 0;
    while (b - a > opt.rel_tol * 0.5 * (a + b)) {
      const double m = 0.5 * (a + b);
      ((f(m) < 0) == neg_a ? a : b) = m;
    }
    roots[j] = 0.5 * (a + b);
  });
  for (std::size_t j = 0; j < jobs.size(); ++j)
    (jobs[j].coefficient ? out.coefficient_crossings : out.lambda_crossings).push_back(roots[j]);
  out.found = !out.lambda_crossings.empty() && !out.coefficient_crossings.empty();
  if (!out.lambda_crossings.empty()) out.alpha_lambda = out.lambda_crossings.back();
  if (!out.coefficient_crossings.empty()) out.alpha_coefficient = out.coefficient_crossings.back();
  return out;
}

}  // namespace naesat
