#include "naesat/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace naesat {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
std::atomic<bool> g_corrupt_S{false};
std::atomic<unsigned> g_hook_epoch{0};

double log_sum_exp(const std::vector<double>& v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  long double s = 0;
  for (double x : v) s += std::exp(static_cast<long double>(x - m));
  return m + static_cast<double>(std::log(s));
}

// Unnormalized log pmf of Bin(n, q) over [lo, hi] by ratio recurrence from the mode.
void log_binomial_weights(double n, double q, long lo, long hi, std::vector<double>& out) {
  out.assign(hi - lo + 1, kNegInf);
  if (q <= 0) {
    if (lo == 0) out[0] = 0;
    return;
  }
  if (q >= 1) {
    out[hi - lo] = 0;
    return;
  }
  const long double logit = std::log(static_cast<long double>(q)) - std::log1p(-static_cast<long double>(q));
  long mode = static_cast<long>(std::floor((n + 1) * q));
  mode = std::clamp(mode, lo, hi);
  out[mode - lo] = 0;
  long double acc = 0;
  for (long l = mode; l < hi; ++l) {
    acc += std::log((static_cast<long double>(n) - l) / (l + 1)) + logit;
    out[l + 1 - lo] = static_cast<double>(acc);
  }
  acc = 0;
  for (long l = mode; l > lo; --l) {
    acc -= std::log((static_cast<long double>(n) - (l - 1)) / l) + logit;
    out[l - 1 - lo] = static_cast<double>(acc);
  }
}

struct Window {
  long lo, hi;
};

Window binomial_window(double n, double q, long top, const KernelOptions& opt) {
  if (opt.full_range) return {0, top};
  const double mu = n * q;
  const double sd = std::sqrt(std::max(0.0, n * q * (1 - q)));
  const double half = opt.sigmas * sd + opt.margin;
  long lo = static_cast<long>(std::floor(mu - half));
  long hi = static_cast<long>(std::ceil(mu + half));
  return {std::clamp(lo, 0L, top), std::clamp(hi, 0L, top)};
}

}  // namespace

void set_corrupt_S_hook(bool on) {
  g_corrupt_S = on;
  ++g_hook_epoch;
}

EnergyParams energy_params(double y) {
  if (!(y >= 0)) throw InvalidInput("y must be nonnegative");
  EnergyParams e;
  e.y = y;
  e.p = 1.0 / (1.0 + std::exp(y));
  e.AM = 0.5 * (1.0 + std::exp(-y));
  e.GM = std::exp(-0.5 * y);
  return e;
}

double gamma_of(double c, double y) {
  const double t = -std::expm1(-0.5 * y);
  return 2 * c * t * t;
}

double Gamma_of(double c, double y) {
  // 1 - (1+y)e^{-y} computed without cancellation for small y.
  const double v = -std::expm1(-y) - y * std::exp(-y);
  return c * v;
}

double y_for_gamma(double c, double g) {
  const double r = std::sqrt(g / (2 * c));
  if (r >= 1) return std::numeric_limits<double>::infinity();
  return -2 * std::log1p(-r);
}

std::shared_ptr<const BinomialTails> binomial_tails(double y, long lmax) {
  thread_local std::shared_ptr<const BinomialTails> cache;
  thread_local unsigned cache_epoch = 0;
  if (cache && cache->y == y && cache->lmax() >= lmax && cache_epoch == g_hook_epoch) return cache;
  lmax = std::max(lmax, cache && cache->y == y ? 2 * cache->lmax() : lmax);
  auto t = std::make_shared<BinomialTails>();
  t->y = y;
  t->P.resize(lmax + 1);
  t->Q.resize(lmax + 1);
  t->S.resize(lmax + 1);
  t->logQ.resize(lmax + 1);
  // log p and log(1-p) for p = 1/(1+e^y).
  const long double ly = y;
  const long double log_q = -std::log1p(std::exp(-ly));
  const long double log_p = -ly + log_q;
  const long double q = std::exp(log_q);
  const long double log4pq = std::log(4.0L) + log_p + log_q;
  const bool corrupt = g_corrupt_S;
  long double S = 1, logS = 0, P = 0, Qprev = 0;
  for (long l = 0; l <= lmax; ++l) {
    if (l % 2 == 0) {
      if (l > 0) {
        S *= static_cast<long double>(l - 1) / l;
        logS += std::log(static_cast<long double>(l - 1) / l);
      }
      const long double lq = logS + (l / 2) * log4pq;
      const long double Q = std::exp(lq);
      if (l > 0) P -= Q / 2;
      Qprev = Q;
      t->S[l] = static_cast<double>(corrupt && l >= 2 ? S * (1 + 1e-6L) : S);
      t->Q[l] = static_cast<double>(Q);
      t->logQ[l] = static_cast<double>(lq);
    } else {
      P += q * Qprev;
      t->S[l] = 0;
      t->Q[l] = 0;
      t->logQ[l] = kNegInf;
    }
    t->P[l] = static_cast<double>(std::max<long double>(P, 0));
  }
  cache = t;
  cache_epoch = g_hook_epoch;
  return cache;
}

double KernelTable::A(long l) const {
  if (l < lo || l > hi) return 0;
  return std::exp(logA[l - lo]);
}

double KernelTable::G(long l) const {
  if (l < lo || l > hi) return 0;
  return std::exp(logG[l - lo]);
}

double KernelTable::Z0() const { return std::exp(logZ0); }
double KernelTable::Zf() const { return std::exp(logZf); }

double KernelTable::logZ() const {
  if (logZ0 == kNegInf) return logZf;
  const double a = std::log(2.0) + logZ0;
  const double m = std::max(a, logZf);
  return m + std::log(std::exp(a - m) + std::exp(logZf - m));
}

KernelTable kernel_table(double n, double w, double y, const KernelOptions& opt) {
  if (!(n >= 0)) throw InvalidInput("kernel_table needs n >= 0");
  if (!(w >= 0 && w <= 1)) throw InvalidInput("kernel_table needs w in [0,1]");
  KernelTable t;
  t.n = n;
  t.w = w;
  t.y = y;
  t.e = energy_params(y);
  const long top = static_cast<long>(std::floor(n + 1e-9));
  const double shrinkA = w * (1 - t.e.AM), shrinkG = w * (1 - t.e.GM);
  const double qA = w * t.e.AM / (1 - shrinkA);
  const double qG = w * t.e.GM / (1 - shrinkG);
  const Window wa = binomial_window(n, qA, top, opt);
  const Window wg = binomial_window(n, qG, top, opt);
  t.lo = std::min(wa.lo, wg.lo);
  t.hi = std::max(wa.hi, wg.hi);
  t.tails = binomial_tails(t.e.y, std::max(t.hi, 2L));

  std::vector<double> ra, rg;
  log_binomial_weights(n, qA, t.lo, t.hi, ra);
  log_binomial_weights(n, qG, t.lo, t.hi, rg);
  // Log of (1 - w(1-AM))^n, the total mass of the A weights.
  const double normA = n * std::log1p(-shrinkA) - log_sum_exp(ra);
  const double normG = n * std::log1p(-shrinkG) - log_sum_exp(rg);
  t.logA.resize(ra.size());
  t.logG.resize(rg.size());
  long double z0 = 0, zf = 0, l0 = 0, lf = 0;
  for (long l = t.lo; l <= t.hi; ++l) {
    const std::size_t i = static_cast<std::size_t>(l - t.lo);
    t.logA[i] = ra[i] + normA;
    t.logG[i] = rg[i] + normG;
    const long double pa = std::exp(static_cast<long double>(ra[i]) + normA) * t.P(l);
    const long double pg = std::exp(static_cast<long double>(rg[i]) + normG) * t.S(l);
    z0 += pa;
    zf += pg;
    l0 += pa * l;
    lf += pg * l;
  }
  t.logZ0 = z0 > 0 ? static_cast<double>(std::log(z0)) : kNegInf;
  t.logZf = zf > 0 ? static_cast<double>(std::log(zf)) : kNegInf;
  t.meanL_AM = z0 > 0 ? static_cast<double>(l0 / z0) : 0;
  t.meanL_GM = zf > 0 ? static_cast<double>(lf / zf) : 0;
  return t;
}

double clause_update(double x, int k) { return 2 * std::pow(1 - x, k - 1) / std::ldexp(1.0, k - 1); }

namespace {
double x_from_table(const KernelTable& t) {
  if (t.logZ0 == kNegInf) return 1;
  const double r = std::exp(t.logZf - t.logZ0);
  return r / (2 + r);
}
}  // namespace

double var_update(double w, double y, double d) {
  if (!(d >= 1)) throw InvalidInput("var_update needs d >= 1");
  return x_from_table(kernel_table(d - 1, w, y));
}

double sp_map(double x, int k, double d, double y) { return var_update(clause_update(x, k), y, d); }

double sp_derivative(int k, double d, double y, double x) {
  const double w = clause_update(x, k);
  const KernelTable t = kernel_table(d - 1, w, y);
  const double xt = x_from_table(t);
  return (k - 1) * xt * (1 - xt) * (t.meanL_AM - t.meanL_GM) / ((1 - w) * (1 - x));
}

double log_dfz(double d, double w, double y) { return kernel_table(d, w, y).logZ(); }

SpPoint sp_solve(int k, double d, double y, const SpOptions& opt) {
  if (k < 2) throw InvalidInput("sp_solve needs k >= 2");
  if (!(d >= 1)) throw InvalidInput("sp_solve needs d >= 1");
  if (!(y >= 0)) throw InvalidInput("sp_solve needs y >= 0");
  SpPoint pt;
  pt.y = y;
  const double cap = 1.0 / (static_cast<double>(k) * k);
  double x = opt.x0 >= 0 ? opt.x0 : 0.5 * cap;
  std::ostringstream trace;
  bool done = false;
  for (long it = 1; it <= opt.max_iter; ++it) {
    const double xn = sp_map(x, k, d, y);
    if (!std::isfinite(xn)) break;
    if (std::abs(xn - x) < opt.tol) {
      x = xn;
      pt.iterations = it;
      done = true;
      break;
    }
    if (it <= 5) trace << ' ' << x;
    x = (1 - opt.damping) * x + opt.damping * xn;
  }
  if (!done) {
    double a = 0, b = cap;
    double ga = sp_map(a, k, d, y) - a, gb = sp_map(b, k, d, y) - b;
    if (!(ga > 0 && gb < 0))
      throw NoConvergence("sp_solve: damped iteration did not converge (start" + trace.str() +
                          ") and map(x)-x has no sign change on [0, 1/k^2]");
    for (int it = 0; it < 200 && b - a > 1e-17; ++it) {
      const double mid = 0.5 * (a + b);
      const double gm = sp_map(mid, k, d, y) - mid;
      (gm > 0 ? a : b) = mid;
      ++pt.iterations;
    }
    x = 0.5 * (a + b);
    pt.bisected = true;
  }
  pt.x = x;
  pt.w = clause_update(x, k);
  pt.residual = std::abs(sp_map(x, k, d, y) - x);
  pt.in_mbullet = x <= cap;
  pt.gamma_ratio = gamma_of(c_of(k, d), y);
  return pt;
}

}  // namespace naesat
