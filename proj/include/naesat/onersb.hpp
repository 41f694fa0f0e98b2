#pragma once

#include <string>
#include <vector>

#include "naesat/kernels.hpp"

namespace naesat {

struct OneRsbValue {
  double y = 0, x = 0, w = 0;
  double F = 0, e = 0, Sigma = 0;
  double hfz = 1, efz = 1;  // clause and edge normalizers (equal when w = w(x))
  double log_dfz = 0;
  double mean_L_AM = 0, mean_L_GM = 0;
};

double log_hfz(int k, double x, double y);
double log_efz(double x, double w, double y);

// F(x,w,y) = log dfz(w) + alpha log hfz - alpha k log efz.
double free_energy(int k, double d, double y, double x, double w);

// Variable part of the energy: expected min(l0,l1) under the d-slot measure.
double energy_var(double d, double w, double y);
// Clause/edge part: w(AM - 1/2) / ((1-x)^{-1} - w(1-AM)).
double energy_edge(double x, double w, double y);
// e = energy_var - alpha(k-1) energy_edge.
double energy(int k, double d, double y, double x, double w);

OneRsbValue evaluate_onersb(int k, double d, double y, const SpOptions& opt = {});

struct RootOptions {
  double gamma_lo = 0.25;
  double gamma_hi = 4.0;
  double y_cap = 50.0;  // used when gamma_hi is unreachable (c <= gamma_hi/2)
  double tol = 1e-10;
  bool dual = true;  // also minimize F(y)/y over the bracket
  SpOptions sp;
};

struct RootResult {
  double y_star = 0;
  double Gamma_at_root = 0;
  double e_onersb = 0;
  double Sigma_at_root = 0;
  double bracket_lo = 0, bracket_hi = 0;
  double Sigma_lo = 0, Sigma_hi = 0;
  double min_F_over_y = 0;  // minimum of F(y)/y over the bracket
  double y_argmin = 0;
  OneRsbValue at_root;
  std::vector<std::pair<double, double>> trace;  // (y, Sigma) visited
};

RootResult solve_ystar(int k, double d, const RootOptions& opt = {});

struct Stationarity {
  double dF_dx = 0;
  double dF_dw = 0;
  double F = 0;
};

// Partial derivatives of F at (x, w); h is the step relative to each coordinate.
Stationarity stationarity_check(int k, double d, double y, double x, double w, double h = 1e-3);

// Second central differences of F(y) along y, re-solving the fixed point at each node.
std::vector<double> convexity_check(int k, double d, const std::vector<double>& ys, double h = 1e-3,
                                    const SpOptions& opt = {});

// Central differences of F(y) along the fixed-point curve.
double dF_dy(int k, double d, double y, double h = 1e-5, const SpOptions& opt = {});

double alpha_sat_approx(int k);

}  // namespace naesat
