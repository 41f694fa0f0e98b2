#pragma once

#include "naesat/kernels.hpp"

namespace naesat {

// eta(p) = (1-p)(2^{k-1}-1) / (2^{k-1}-(1-p)).
double eta(double p, int k);
// Normalized density at which the annealed bound vanishes for energy parameter p.
double c_of_p(double p, int k);
double alpha_ubd(double p, int k);
// Smallest density with a defined inverse, c(1) 2^{k-1} ln 2.
double alpha_floor(int k);
// Solves alpha_ubd(p) = alpha on [1e-12, 1]; throws InvalidInput below the floor.
double p_ubd(double alpha, int k);
double e_lbd(double alpha, int k);
// log 2 - e log eta + alpha log(1 - 2/2^k + 2 eta/2^k).
double f_eta(double alpha, double e, int k, double eta_value);
double correction_x(double p, int k);

struct BoundsReport {
  int k = 0;
  double alpha = 0;
  double p_ubd = 0, eta = 0, e_lbd = 0;
  double y_eta = 0;  // -log eta
  double F = 0;      // 1RSB free energy at y_eta
  double gap = 0;    // f_eta(alpha, e_lbd) - (F + y_eta e_lbd)
  double x_p = 0;
  double gap_over_x = 0;
};

BoundsReport bounds(int k, double alpha, const SpOptions& opt = {});
double gap(int k, double alpha, const SpOptions& opt = {});

}  // namespace naesat
