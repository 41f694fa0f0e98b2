#include "naesat/firstmoment.hpp"

#include <cmath>
#include <sstream>

#include "naesat/onersb.hpp"

namespace naesat {

double eta(double p, int k) {
  if (!(p >= 0 && p <= 1)) throw InvalidInput("eta needs p in [0,1]");
  const double K = std::ldexp(1.0, k - 1);
  return (1 - p) * (K - 1) / (K - (1 - p));
}

double c_of_p(double p, int k) {
  if (!(p > 0 && p <= 1)) throw InvalidInput("c(p) needs p in (0,1]");
  const double K = std::ldexp(1.0, k - 1);
  const double a = (K - 1 + p) * std::log1p(p / (K - 1));
  const double b = p < 1 ? (1 - p) * std::log1p(-p) : 0.0;
  return 1 / (a + b);
}

double alpha_ubd(double p, int k) { return c_of_p(p, k) * density_scale(k); }

double alpha_floor(int k) { return alpha_ubd(1.0, k); }

double p_ubd(double alpha, int k) {
  if (!(alpha >= alpha_floor(k))) {
    std::ostringstream os;
    os.precision(17);
    os << "alpha = " << alpha << " is below the first-moment floor " << alpha_floor(k) << " for k = " << k;
    throw InvalidInput(os.str());
  }
  double lo = 1e-12, hi = 1;
  if (alpha >= alpha_ubd(lo, k)) return lo;
  // alpha_ubd is decreasing in p.
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    (alpha_ubd(mid, k) > alpha ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double e_lbd(double alpha, int k) { return alpha * (1 - p_ubd(alpha, k)) / std::ldexp(1.0, k - 1); }

double f_eta(double alpha, double e, int k, double eta_value) {
  if (!(eta_value > 0 && eta_value <= 1)) throw InvalidInput("f_eta needs eta in (0,1]");
  const double t = std::ldexp(1.0, 1 - k);
  return kLn2 - e * std::log(eta_value) + alpha * std::log1p(-t + t * eta_value);
}

double correction_x(double p, int k) {
  const double c = c_of_p(p, k);
  const double se = std::sqrt(eta(p, k));
  const double num = std::exp(-k * kLn2 * 2 * c * (1 - se) * (1 - se));
  return std::sqrt(num / std::max(c * k * se, 1.0));
}

BoundsReport bounds(int k, double alpha, const SpOptions& opt) {
  BoundsReport b;
  b.k = k;
  b.alpha = alpha;
  b.p_ubd = p_ubd(alpha, k);
  b.eta = eta(b.p_ubd, k);
  b.e_lbd = alpha * (1 - b.p_ubd) / std::ldexp(1.0, k - 1);
  b.y_eta = -std::log(b.eta);
  const double d = alpha * k;
  const SpPoint pt = sp_solve(k, d, b.y_eta, opt);
  b.F = free_energy(k, d, b.y_eta, pt.x, pt.w);
  b.gap = f_eta(alpha, b.e_lbd, k, b.eta) - (b.F + b.y_eta * b.e_lbd);
  b.x_p = correction_x(b.p_ubd, k);
  b.gap_over_x = b.gap / b.x_p;
  return b;
}

double gap(int k, double alpha, const SpOptions& opt) { return bounds(k, alpha, opt).gap; }

}  // namespace naesat
