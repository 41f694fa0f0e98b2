#include "naesat/onersb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace naesat {

double log_hfz(int k, double x, double y) {
  return std::log1p(-std::pow(1 - x, k) * -std::expm1(-y) / std::ldexp(1.0, k - 1));
}

double log_efz(double x, double w, double y) { return std::log1p(-(1 - x) * w * -std::expm1(-y) / 2); }

double free_energy(int k, double d, double y, double x, double w) {
  const double alpha = d / k;
  const double lh = log_hfz(k, x, y), le = log_efz(x, w, y);
  if (!std::isfinite(lh) || !std::isfinite(le)) throw InvalidInput("free_energy: non-positive normalizer");
  return log_dfz(d, w, y) + alpha * lh - alpha * k * le;
}

double energy_var(double d, double w, double y) {
  const KernelTable t = kernel_table(d, w, y);
  const double p = t.e.p;
  const double lz = t.logZ();
  long double acc = 0;
  for (long l = std::max(t.lo, 1L); l <= t.hi; ++l) {
    // H_l = E[min(X, l-X)] with X ~ Bin(l, p), weighted by e^{-y min} through A_l.
    double H;
    if (l % 2 == 0) {
      const long j = l / 2;
      H = 4.0 * j * p * t.P(l - 1) - j * t.Q(l);
    } else {
      H = 2.0 * l * p * t.P(l - 1);
    }
    acc += std::exp(static_cast<long double>(t.logA[l - t.lo]) - lz) * H;
  }
  return static_cast<double>(acc);
}

double energy_edge(double x, double w, double y) {
  const EnergyParams e = energy_params(y);
  return w * 0.5 * std::exp(-y) / (1 / (1 - x) - w * (1 - e.AM));
}

double energy(int k, double d, double y, double x, double w) {
  return energy_var(d, w, y) - d / k * (k - 1) * energy_edge(x, w, y);
}

OneRsbValue evaluate_onersb(int k, double d, double y, const SpOptions& opt) {
  const SpPoint pt = sp_solve(k, d, y, opt);
  OneRsbValue v;
  v.y = y;
  v.x = pt.x;
  v.w = pt.w;
  v.log_dfz = log_dfz(d, pt.w, y);
  v.hfz = std::exp(log_hfz(k, pt.x, y));
  v.efz = std::exp(log_efz(pt.x, pt.w, y));
  v.F = free_energy(k, d, y, pt.x, pt.w);
  v.e = energy(k, d, y, pt.x, pt.w);
  v.Sigma = v.F + y * v.e;
  const KernelTable t = kernel_table(d - 1, pt.w, y);
  v.mean_L_AM = t.meanL_AM;
  v.mean_L_GM = t.meanL_GM;
  return v;
}

double dF_dy(int k, double d, double y, double h, const SpOptions& opt) {
  const SpPoint a = sp_solve(k, d, y + h, opt), b = sp_solve(k, d, y - h, opt);
  return (free_energy(k, d, y + h, a.x, a.w) - free_energy(k, d, y - h, b.x, b.w)) / (2 * h);
}

std::vector<double> convexity_check(int k, double d, const std::vector<double>& ys, double h,
                                    const SpOptions& opt) {
  std::vector<double> out;
  for (double y : ys) {
    double f[3];
    for (int i = 0; i < 3; ++i) {
      const double yy = y + (i - 1) * h;
      const SpPoint pt = sp_solve(k, d, yy, opt);
      f[i] = free_energy(k, d, yy, pt.x, pt.w);
    }
    out.push_back((f[0] - 2 * f[1] + f[2]) / (h * h));
  }
  return out;
}

Stationarity stationarity_check(int k, double d, double y, double x, double w, double h) {
  Stationarity s;
  s.F = free_energy(k, d, y, x, w);
  // Five-point stencil; steps are relative because F curves on the scale of x and w.
  auto deriv = [&](auto f, double at) {
    const double s1 = h * std::max(std::abs(at), 1e-300);
    return (-f(at + 2 * s1) + 8 * f(at + s1) - 8 * f(at - s1) + f(at - 2 * s1)) / (12 * s1);
  };
  s.dF_dx = deriv([&](double v) { return free_energy(k, d, y, v, w); }, x);
  s.dF_dw = deriv([&](double v) { return free_energy(k, d, y, x, v); }, w);
  return s;
}

double alpha_sat_approx(int k) { return density_scale(k) - 2; }

RootResult solve_ystar(int k, double d, const RootOptions& opt) {
  const double c = c_of(k, d);
  RootResult r;
  double lo = y_for_gamma(c, opt.gamma_lo);
  double hi = std::min(y_for_gamma(c, opt.gamma_hi), opt.y_cap);
  if (!std::isfinite(lo) || lo >= hi) throw InvalidInput("solve_ystar: empty y bracket for this density");
  r.bracket_lo = lo;
  r.bracket_hi = hi;
  auto sigma = [&](double y) {
    const OneRsbValue v = evaluate_onersb(k, d, y, opt.sp);
    r.trace.push_back({y, v.Sigma});
    return v.Sigma;
  };
  double slo = sigma(lo), shi = sigma(hi);
  r.Sigma_lo = slo;
  r.Sigma_hi = shi;
  if (!(slo > 0 && shi < 0)) {
    std::ostringstream os;
    os << "solve_ystar: no sign change of Sigma on [" << lo << ", " << hi << "]: Sigma = " << slo << ", "
       << shi;
    throw NoConvergence(os.str());
  }
  // Illinois false position on the sign-changing bracket.
  double a = lo, b = hi, sa = slo, sb = shi;
  double ym = 0.5 * (a + b), sm = 0;
  int side = 0;
  for (int it = 0; it < 200; ++it) {
    ym = (a * sb - b * sa) / (sb - sa);
    if (!(ym > a && ym < b)) ym = 0.5 * (a + b);
    sm = sigma(ym);
    if (std::abs(sm) < opt.tol * 1e-3 || b - a < 1e-15 * b) break;
    if (sm > 0) {
      a = ym;
      sa = sm;
      if (side == -1) sb /= 2;
      side = -1;
    } else {
      b = ym;
      sb = sm;
      if (side == 1) sa /= 2;
      side = 1;
    }
  }
  // One Newton polish with Sigma' = -y F'' from second differences.
  {
    const double h = 1e-4 * std::max(1.0, ym);
    const std::vector<double> f2 = convexity_check(k, d, {ym}, h, opt.sp);
    const double dS = -ym * f2[0];
    if (dS < 0 && std::isfinite(dS)) {
      const double yn = ym - sm / dS;
      if (yn > lo && yn < hi) {
        const double sn = sigma(yn);
        if (std::abs(sn) < std::abs(sm)) {
          ym = yn;
          sm = sn;
        }
      }
    }
  }
  r.y_star = ym;
  r.Sigma_at_root = sm;
  r.at_root = evaluate_onersb(k, d, ym, opt.sp);
  r.e_onersb = r.at_root.e;
  r.Gamma_at_root = Gamma_of(c, ym);

  if (!opt.dual) return r;
  // Golden-section minimum of F(y)/y over the bracket.
  auto fy = [&](double y) {
    const SpPoint pt = sp_solve(k, d, y, opt.sp);
    return free_energy(k, d, y, pt.x, pt.w) / y;
  };
  const double g = 0.5 * (std::sqrt(5.0) - 1);
  double u = lo, v = hi;
  double x1 = v - g * (v - u), x2 = u + g * (v - u);
  double f1 = fy(x1), f2 = fy(x2);
  for (int it = 0; it < 200 && v - u > 1e-10 * v; ++it) {
    if (f1 < f2) {
      v = x2;
      x2 = x1;
      f2 = f1;
      x1 = v - g * (v - u);
      f1 = fy(x1);
    } else {
      u = x1;
      x1 = x2;
      f1 = f2;
      x2 = u + g * (v - u);
      f2 = fy(x2);
    }
  }
  r.y_argmin = 0.5 * (u + v);
  r.min_F_over_y = std::min(f1, f2);
  return r;
}

}  // namespace naesat
