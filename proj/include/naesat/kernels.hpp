#pragma once

#include <memory>
#include <vector>

#include "naesat/core.hpp"

namespace naesat {

// Shorthands attached to the Parisi parameter y >= 0.
struct EnergyParams {
  double y = 0;
  double p = 0.5;   // 1/(1+e^y)
  double AM = 1;    // (1+e^{-y})/2
  double GM = 1;    // e^{-y/2}
};

EnergyParams energy_params(double y);

// gamma(y) = 2c(1-e^{-y/2})^2 and Gamma(y) = c(1-(1+y)e^{-y}).
double gamma_of(double c, double y);
double Gamma_of(double c, double y);
// Inverse of gamma_of in y; +infinity when g >= 2c.
double y_for_gamma(double c, double g);

// P_l = Pr[Bin(l,p) < l/2], Q_l = Pr[Bin(l,p) = l/2], S_l = Pr[Bin(l,1/2) = l/2]
// for l = 0..lmax, built by one forward recurrence in extended precision.
struct BinomialTails {
  double y = 0;
  std::vector<double> P, Q, S, logQ;
  long lmax() const { return static_cast<long>(P.size()) - 1; }
};

// Cached per thread for the most recent y.
std::shared_ptr<const BinomialTails> binomial_tails(double y, long lmax);

// Verification hook: when set, S_l is scaled by (1 + 1e-6) for l >= 2 so the
// identity suite can demonstrate that it detects a broken kernel.
void set_corrupt_S_hook(bool on);

// Binomial kernel sums for n slots. A_l = C(n,l)(w AM)^l (1-w)^{n-l} and
// G_l = C(n,l)(w GM)^l (1-w)^{n-l} are held as logs over the window
// [lo, hi]; P_l, Q_l, S_l come from the shared tails. n may be non-integer, in
// which case the generalized binomial series is truncated at floor(n).
struct KernelTable {
  double n = 0, w = 0, y = 0;
  EnergyParams e;
  long lo = 0, hi = 0;
  std::vector<double> logA, logG;  // index l - lo
  std::shared_ptr<const BinomialTails> tails;
  double logZ0 = 0;  // log sum A_l P_l
  double logZf = 0;  // log sum G_l S_l (= log sum A_l Q_l)
  double meanL_AM = 0;  // sum l A_l P_l / Z0
  double meanL_GM = 0;  // sum l G_l S_l / Zf

  double A(long l) const;
  double G(long l) const;
  double P(long l) const { return tails->P[l]; }
  double Q(long l) const { return tails->Q[l]; }
  double S(long l) const { return tails->S[l]; }
  double Z0() const;
  double Zf() const;
  double Z() const { return 2 * Z0() + Zf(); }
  double logZ() const;
};

struct KernelOptions {
  bool full_range = false;  // ignore the window and sum over 0..floor(n)
  double sigmas = 12;       // half-width in standard deviations
  double margin = 40;       // additive slack for small means
};

KernelTable kernel_table(double n, double w, double y, const KernelOptions& opt = {});

// w = 2(1-x)^{k-1}/2^{k-1}.
double clause_update(double x, int k);
// x~ = Zf/(2 Z0 + Zf) with n = d-1.
double var_update(double w, double y, double d);
double sp_map(double x, int k, double d, double y);

struct SpOptions {
  double x0 = -1;  // default 1/(2k^2)
  double damping = 0.7;
  double tol = 1e-13;
  long max_iter = 100000;
};

struct SpPoint {
  double y = 0, x = 0, w = 0;
  double residual = 0;
  long iterations = 0;
  bool bisected = false;
  bool in_mbullet = false;  // x <= 1/k^2
  double gamma_ratio = 0;   // gamma(y) at this point, reported only
};

SpPoint sp_solve(int k, double d, double y, const SpOptions& opt = {});

// d x~/dx of the composed map at x, exact chain rule through the kernel means.
double sp_derivative(int k, double d, double y, double x);

// Variable normalizer over d slots: dfz = 2 Z0(d) + Zf(d), as a log.
double log_dfz(double d, double w, double y);

}  // namespace naesat
