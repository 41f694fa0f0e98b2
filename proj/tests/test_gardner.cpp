#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "naesat/gardner.hpp"

using namespace naesat;

namespace {

// S_i over n = d-2 slots in the geometric-mean form, summed over the full range in long double.
long double s_oracle(long n, double w, double y, int i) {
  const long double gm = std::exp(-y / 2.0L);
  long double s = 0;
  for (long l = i; l <= n; l += 2) {
    const long double lc = std::lgammal(n + 1.0L) - std::lgammal(l + 1.0L) - std::lgammal(n - l + 1.0L);
    const long double lh = std::lgammal(l + 1.0L) - std::lgammal((l - i) / 2 + 1.0L) - std::lgammal((l + i) / 2 + 1.0L);
    s += std::exp(lc + l * std::log(w * gm) + (n - l) * std::log1p(-static_cast<long double>(w)) + lh -
                  l * std::log(2.0L));
  }
  return s / std::pow(gm, i);
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("S sums") {
  const SSums two = s_sums(2, 0.3, 1.1);
  CHECK(two.S0 * std::exp(two.log_scale) == doctest::Approx(1).epsilon(1e-14));
  CHECK(two.S1 == 0);
  CHECK(two.Sge1 == 0);
  for (double w : {0.1, 0.5})
    for (double y : {0.3, 2.0}) {
      const SSums s = s_sums(4, w, y);
      const double gm = std::exp(-y / 2);
      CHECK(s.S0 * std::exp(s.log_scale) == doctest::Approx((1 - w) * (1 - w) + w * w * gm * gm / 2).epsilon(1e-13));
    }
  for (double d : {7.0, 60.0, 500.0, 2000.0})
    for (double w : {0.002, 0.03, 0.2})
      for (double y : {0.4, 1.5}) {
        const SSums s = s_sums(d, w, y);
        const double scale = std::exp(s.log_scale);
        const long n = static_cast<long>(d) - 2;
        CHECK(rel(s.S0 * scale, static_cast<double>(s_oracle(n, w, y, 0))) < 1e-11);
        CHECK(rel(s.S1 * scale, static_cast<double>(s_oracle(n, w, y, 1))) < 1e-11);
        CHECK(rel(s.S2 * scale, static_cast<double>(s_oracle(n, w, y, 2))) < 1e-11);
        long double ge1 = 0;
        for (int i = 1; i <= n; ++i) ge1 += s_oracle(n, w, y, i);
        CHECK(rel(s.Sge1 * scale, static_cast<double>(ge1)) < 1e-11);
        CHECK(s.Sge2 == doctest::Approx(s.Sge1 - s.S1).epsilon(1e-12));
        CHECK(s.S0 >= 0);
        CHECK(s.S1 >= 0);
        CHECK(s.Sge2 >= 0);
      }
  CHECK_THROWS_AS(s_sums(1, 0.1, 1), InvalidInput);
}

TEST_CASE("Zdot from S-sums equals the kernel normalizer") {
  for (double d : {5.0, 80.0, 1234.5})
    for (double x : {0.01, 0.2}) {
      const StabilityBundle b = build_matrices(6, d, 1.3, x);
      CHECK(rel(b.Zdot, b.Zdot_kernel) < 1e-12);
    }
  // Very large degree where the unscaled sums underflow.
  const double d = 1.5e7;
  const StabilityBundle big = build_matrices(14, d, 0.02, 1e-5);
  CHECK(std::isfinite(big.Zdot));
  CHECK(big.Zdot > 0);
  CHECK(rel(big.Zdot, big.Zdot_kernel) < 1e-10);
}

TEST_CASE("closed form against enumeration") {
  for (int d : {4, 5})
    for (double y : {0.5, 1.0, 2.5})
      for (double x : {0.15, 0.3, 0.6}) {
        const StabilityBundle b = build_matrices(3, d, y, x);
        const Mat9 brute = brute_force_B(3, d, y, x);
        for (int i = 0; i < 7; ++i)
          for (int j = 0; j < 7; ++j) {
            if (brute(i, j) == 0)
              CHECK(std::abs(b.B(i, j)) < 1e-15);
            else
              CHECK(rel(b.B(i, j), brute(i, j)) < 1e-10);
          }
        for (int j = 0; j < 9; ++j) {
          CHECK(brute(7, j) == 0);
          CHECK(brute(8, j) == 0);
        }
      }
  for (int k : {3, 5, 7})
    for (double x : {0.05, 0.4}) {
      const StabilityBundle b = build_matrices(k, 50, 1.0, x);
      const Mat9 brute = brute_force_Bhat(k, x);
      for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 7; ++j) CHECK(std::abs(b.Bhat(i, j) - brute(i, j)) <= 1e-12 * (1 + std::abs(brute(i, j))));
    }
  CHECK_THROWS_AS(brute_force_B(3, 10, 1, 0.3), ResourceCap);
}

TEST_CASE("eigenvalue and eigenvector") {
  struct Case {
    int k;
    double c, y;
  };
  for (Case c : {Case{6, 3, 1.0}, Case{8, 2, 1.5}, Case{10, 5, 0.7}}) {
    const double d = c.c * c.k * density_scale(c.k);
    const SpPoint pt = sp_solve(c.k, d, c.y);
    const StabilityBundle b = build_matrices(c.k, d, c.y, pt);
    CHECK(rel(b.lambda, top_eigenvalue(b.B4)) < 1e-10);
    CHECK(rel(b.lambda, top_eigenvalue(b.Bneq)) < 1e-10);
    CHECK(b.branch_lambda == doctest::Approx(b.branch * b.lambda).epsilon(1e-15));
    const Vec9 r = b.B * b.xi - b.lambda * b.xi;
    CHECK(r.cwiseAbs().maxCoeff() < 1e-10 * b.xi.cwiseAbs().maxCoeff());
    CHECK(b.xi(7) == 0);
    CHECK(b.xi(8) == 0);
    for (int i = 0; i < 3; ++i) {
      CHECK(b.B.row(i).head(3).sum() == doctest::Approx(1).epsilon(1e-8));
      CHECK(b.Bhat.row(i).head(3).sum() == doctest::Approx(1).epsilon(1e-8));
    }
    for (int i = 0; i < 9; ++i) {
      CHECK(std::abs(b.xi(kSwap01[i])) == doctest::Approx(std::abs(b.xi(i))).epsilon(1e-14));
      for (int j = 0; j < 9; ++j) {
        CHECK(b.B(kSwap01[i], kSwap01[j]) == doctest::Approx(b.B(i, j)).epsilon(1e-14));
        CHECK(b.Bhat(kSwap01[i], kSwap01[j]) == doctest::Approx(b.Bhat(i, j)).epsilon(1e-14));
      }
    }
    CHECK(rel(gardner_lambda(c.k, d, c.y, pt.x), b.lambda) < 1e-12);
  }
  for (int k : {3, 4, 7}) {
    const double x = 0.3;
    CHECK(build_matrices(k, 2, 0.7, x).lambda == doctest::Approx(std::pow((1 - x) / 2, k - 2)).epsilon(1e-14));
  }
}

TEST_CASE("threshold bisection contract") {
  GardnerScanOptions opt;
  opt.n_grid = 24;
  const GardnerScan scan = gardner_scan(8, opt);
  REQUIRE(scan.found);
  const double a = scan.alpha_ga;
  CHECK(a == scan.crossings.back());
  CHECK(a <= std::pow(4.0, 8) / 8);
  CHECK(gardner_point(8, a * 0.99).branch_lambda < 1);
  CHECK(gardner_point(8, a * 1.01).branch_lambda > 1);
  const GardnerPoint at = gardner_point(8, a);
  CHECK(std::abs(at.branch_lambda - 1) < 1e-4);
  const double ratio = a * 512 / std::pow(4.0, 8);
  CHECK(ratio > 1);
  CHECK(ratio < 4);
}

TEST_CASE("scan helpers") {
  const std::vector<double> g = log_grid(1, 1000, 4);
  REQUIRE(g.size() == 4);
  CHECK(g[1] == doctest::Approx(10));
  const CrossingScan cs =
      scan_crossings([](double a) { return (a - 3) * (a - 70); }, log_grid(1, 100, 9), 1e-9, 2);
  REQUIRE(cs.crossings.size() == 2);
  CHECK(cs.crossings[0] == doctest::Approx(3).epsilon(1e-8));
  CHECK(cs.crossings[1] == doctest::Approx(70).epsilon(1e-8));
  const CrossingScan gaps = scan_crossings(
      [](double a) { return a < 5 ? std::nan("") : a - 30; }, log_grid(1, 100, 9), 1e-9, 1);
  REQUIRE(gaps.crossings.size() == 1);
  CHECK(gaps.crossings[0] == doctest::Approx(30).epsilon(1e-8));
}
