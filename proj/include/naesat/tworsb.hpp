#pragma once

#include <array>
#include <vector>

#include "naesat/gardner.hpp"

namespace naesat {

// Probability vector on {0,1,f}, indexed by Warning.
struct TrioMeasure {
  std::array<double, 3> p{0, 0, 1};
  double operator[](Warning w) const { return p[static_cast<int>(w)]; }
};

TrioMeasure trio(double p0, double p1, double pf);
TrioMeasure unit_trio(Warning w);

struct FiniteQ {
  std::vector<double> mass;
  std::vector<TrioMeasure> atoms;
  void validate(double tol = 1e-12) const;  // throws InvalidInput
};

// Three point masses at the unit vectors with masses (rho0, rho0, rhof).
FiniteQ q_ii(double x);

struct TwoRsbOptions {
  long max_terms = 20000000;  // outer enumeration cap
};

// Clause functional: sum over Q^k of [sum_{s in {0,1,f}^k} e^{-y2 phi(s)} prod rho_j(s_j)]^{y1/y2}.
double big_g(double y1, double y2, const FiniteQ& q, int k, const TwoRsbOptions& opt = {});
// Variable functional over the d clauses of k-1 inputs each.
double big_w(double y1, double y2, const FiniteQ& q, int k, int d, const TwoRsbOptions& opt = {});
// (1/y1) ln W - alpha (k-1)/y1 ln G.
double phi_2rsb(double y1, double y2, const FiniteQ& q, int k, int d, const TwoRsbOptions& opt = {});

struct AuxMatrices {
  Mat9 Pi, Xi, Gamma, Theta, P;
};

AuxMatrices aux_matrices(int k, double y, double x);

struct PerturbationSetup {
  double zeta = 0, nu = 1, y1 = 0, y2 = 0;
  std::array<double, 3> delta{};  // per warning, indexed by Warning
  Vec9 delta_vec = Vec9::Zero();  // diagonal embedding of delta
  Vec9 eps = Vec9::Zero();
  Vec9 pi = Vec9::Zero();
  Vec9 tau = Vec9::Zero();
  Vec9 varpi = Vec9::Zero(), sigma = Vec9::Zero();
  Mat9 Upsilon = Mat9::Zero();
};

// delta = zeta^2 varpi and eps = zeta^2 sigma / nu, with xi = varpi + sigma.
PerturbationSetup perturbation(double x, double y, double zeta);
PerturbationSetup zero_perturbation(double y);
// Point masses at 1_w + eps_w. with masses rho_w (1 + delta_w).
FiniteQ perturbed_q(const PerturbationSetup& s, double x);

struct Expansion {
  double bracket = 0;   // (Bhat tau, ((Pi - y zeta Gamma)/nu - zeta Xi)(branch B - I) tau)
  double linear = 0;    // (1, P(Pi - y zeta Gamma/nu) tau) - (nu zeta/2)(1, (Upsilon o Theta) 1)
  double raw = 0;       // the displayed combination without normalization
  double efz = 1;       // G(y, y, Q_II)
  double value = 0;     // normalized: (1/y)[(d(k-1)/2) bracket/efz - (d(k-1)(dk-d-k)/2)(linear/efz)^2]
};

Expansion delta_phi_expansion(int k, double d, double y, double x, const PerturbationSetup& s);

// Coefficient of zeta^5 in the expansion along tau = zeta^2 xi, up to the positive
// factor d(k-1)/(2 y efz): (Bhat xi, (-y Gamma - Xi)(branch B - I) xi).
struct InstabilityPoint {
  double alpha = 0, d = 0, y_star = 0, x = 0;
  double lambda = 0, branch_lambda = 0;
  double coefficient = 0;
  double gamma_product = 0;  // (Bhat xi, Gamma xi)
  double xi_product = 0;     // (Bhat xi, Xi xi)
};

InstabilityPoint instability_point(int k, double alpha, const RootOptions& opt = {});

struct InstabilityScan {
  int k = 0;
  std::vector<double> grid;
  std::vector<double> coefficient_values, lambda_values;  // lambda_values holds branch lambda - 1
  std::vector<double> lambda_crossings;       // branch lambda = 1
  std::vector<double> coefficient_crossings;  // sign flips of the leading coefficient
  double alpha_lambda = 0, alpha_coefficient = 0;
  bool found = false;
};

InstabilityScan instability_scan(int k, const GardnerScanOptions& opt = {});

}  // namespace naesat
