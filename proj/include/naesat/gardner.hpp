#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <vector>

#include "naesat/onersb.hpp"
#include "naesat/wp.hpp"

namespace naesat {

using Mat9 = Eigen::Matrix<double, 9, 9>;
using Vec9 = Eigen::Matrix<double, 9, 1>;

// Pair index order: ff, 00, 11, f0, f1, 0f, 1f, 01, 10.
inline constexpr std::array<std::array<Warning, 2>, 9> kPairs{{
    {Warning::free, Warning::free},
    {Warning::zero, Warning::zero},
    {Warning::one, Warning::one},
    {Warning::free, Warning::zero},
    {Warning::free, Warning::one},
    {Warning::zero, Warning::free},
    {Warning::one, Warning::free},
    {Warning::zero, Warning::one},
    {Warning::one, Warning::zero},
}};
// Image of each pair index under the 0 <-> 1 relabeling.
inline constexpr std::array<int, 9> kSwap01{0, 2, 1, 4, 3, 6, 5, 8, 7};
int pair_index(Warning a, Warning b);
const char* pair_name(int i);

// The sums are stored divided by exp(log_scale) so that huge degrees do not underflow;
// every consumer uses ratios.
struct SSums {
  double d = 0, w = 0, y = 0;
  double log_scale = 0;
  double S0 = 0, S1 = 0, S2 = 0, Sge1 = 0, Sge2 = 0;
};

// S_i over d-2 slots, in the AM form S_i = sum_l A_l Pr[Bin(l,p) = (l-i)/2].
SSums s_sums(double d, double w, double y);
// Zdot = S_0 + 2(1 - (1-e^{-y}) w/2) S_{>=1}, on the same scale as the sums.
double zdot_from_s(const SSums& s);

struct StabilityBundle {
  int k = 0;
  double d = 0, y = 0, x = 0, w = 0;
  double rho0 = 0, rhof = 0, psi0 = 0, psif = 0;
  double r = 0;  // rho0^{k-2}
  SSums S;
  double Zdot = 0;         // from the S-sums, divided by exp(S.log_scale)
  double Zdot_kernel = 0;  // 2 Z0 + Zf over d-1 slots, same scale
  double x_tilde = 0;  // SP image of x; equals x at a fixed point
  double fixed_point_residual = 0;
  Mat9 Nhat, Bhat;  // listed clause entries, 7x7 block
  Mat9 N, B;        // listed variable entries, 7x7 block
  Mat9 Nhat_full, Ndot, N_full, Bhat_full, B_full;  // generic 9x9 route
  Eigen::Matrix4d B4;
  Eigen::Matrix<double, 6, 6> Bneq;  // indices f0, f1, 0f, 1f, 01, 10 from the generic route
  double lambda = 0;
  Vec9 xi = Vec9::Zero();
  double branch = 0;  // (d-1)(k-1)
  double branch_lambda = 0;
};

double rho_of(Warning w, double x);
double psi_of(Warning w, double wv);

StabilityBundle build_matrices(int k, double d, double y, const SpPoint& pt);
// Same for an arbitrary input law x; variable-side denominators use the SP image of x.
StabilityBundle build_matrices(int k, double d, double y, double x);
// Listed closed forms only (no generic route); used by scans.
double gardner_lambda(int k, double d, double y, double x);

// Direct enumeration of the full stability matrix over {0,1,f}^(branch-1).
Mat9 brute_force_B(int k, int d, double y, double x);
// Direct enumeration of the clause stability matrix over {0,1,f}^(k-2).
Mat9 brute_force_Bhat(int k, double x);

// Largest real part among the eigenvalues.
double top_eigenvalue(const Eigen::MatrixXd& m);

Vec9 gardner_xi(double x, double y);

struct GardnerPoint {
  double alpha = 0, c = 0, d = 0;
  double y_star = 0, x = 0, w = 0;
  double lambda = 0, branch_lambda = 0;
};

GardnerPoint gardner_point(int k, double alpha, const RootOptions& opt = {});
// As gardner_point, but returns NaN fields when Sigma has no root (no 1RSB condensation at this alpha).
GardnerPoint gardner_point_or_nan(int k, double alpha, const RootOptions& opt = {});

struct CrossingScan {
  std::vector<double> grid;
  std::vector<double> values;     // f on the grid
  std::vector<double> crossings;  // refined roots, ascending
};

// Evaluates f on a grid (in parallel), then bisects every sign change between finite values to relative
// width rel_tol.
CrossingScan scan_crossings(const std::function<double(double)>& f, const std::vector<double>& grid,
                            double rel_tol, int threads);

std::vector<double> log_grid(double lo, double hi, int n);

struct GardnerScan {
  int k = 0;
  std::vector<GardnerPoint> points;
  std::vector<double> crossings;
  bool found = false;
  double alpha_ga = 0;  // supremum crossing
};

struct GardnerScanOptions {
  int n_grid = 64;
  double alpha_lo = 0;  // default alpha_sat_approx(k)
  double alpha_hi = 0;  // default 4^k/k
  double rel_tol = 1e-6;
  int threads = 1;
  RootOptions root;
};

GardnerScan gardner_scan(int k, const GardnerScanOptions& opt = {});

}  // namespace naesat
