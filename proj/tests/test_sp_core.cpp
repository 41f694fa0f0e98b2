#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "naesat/kernels.hpp"

using namespace naesat;

namespace {

long double log_choose(long n, long j) {
  return std::lgammal(n + 1.0L) - std::lgammal(j + 1.0L) - std::lgammal(n - j + 1.0L);
}

long double binom_pmf(long n, long j, long double p) {
  if (p == 0) return j == 0 ? 1 : 0;
  return std::exp(log_choose(n, j) + j * std::log(p) + (n - j) * std::log1p(-p));
}

// Pr[Bin(l,p) < l/2], Pr[= l/2] by summing the mass function.
void direct_PQ(long l, long double p, long double& P, long double& Q) {
  P = Q = 0;
  for (long j = 0; j <= l; ++j) {
    if (2 * j < l) P += binom_pmf(l, j, p);
    if (2 * j == l) Q += binom_pmf(l, j, p);
  }
}

// Variable normalizer over n slots by summing over the counts (l0, l1) of 0- and 1-warnings.
void double_sum(long n, long double w, long double y, long double& Z0, long double& Zf) {
  Z0 = Zf = 0;
  for (long l0 = 0; l0 <= n; ++l0)
    for (long l1 = 0; l0 + l1 <= n; ++l1) {
      const long l = l0 + l1;
      const long double t = std::exp(log_choose(n, l) + log_choose(l, l0) + l * std::log(w / 2) +
                                     (n - l) * std::log1p(-w) - y * std::min(l0, l1));
      if (l0 > l1) Z0 += t;
      if (l0 == l1) Zf += t;
    }
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("energy parameters") {
  for (double y : {0.0, 0.3, 1.0, 4.0, 20.0}) {
    const EnergyParams e = energy_params(y);
    CHECK(e.AM >= 0.5);
    CHECK(e.AM <= 1);
    CHECK(e.GM > 0);
    CHECK(e.GM <= 1);
    CHECK(e.p > 0);
    CHECK(e.p <= 0.5);
    for (double c : {0.5, 2.0}) {
      CHECK(Gamma_of(c, y) >= gamma_of(c, y) / 2 - 1e-15);
      CHECK(Gamma_of(c, y) <= gamma_of(c, y) + 1e-15);
    }
  }
  CHECK(y_for_gamma(2, gamma_of(2, 1.7)) == doctest::Approx(1.7).epsilon(1e-12));
  CHECK(std::isinf(y_for_gamma(1, 2)));
}

TEST_CASE("binomial tails") {
  const auto t0 = binomial_tails(0, 200);
  CHECK(t0->P[0] == 0);
  CHECK(t0->S[4] == doctest::Approx(0.375).epsilon(1e-15));
  CHECK(t0->P[2] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(t0->Q[2] == doctest::Approx(0.5).epsilon(1e-15));
  for (long l = 0; l <= 200; ++l) CHECK(std::abs(2 * t0->P[l] + t0->Q[l] - 1) < 1e-13);
  for (double y : {0.2, 1.0, 3.0}) {
    const auto t = binomial_tails(y, 200);
    const double p = energy_params(y).p;
    for (long l = 0; l <= 200; ++l) {
      long double P, Q, S, dummy;
      direct_PQ(l, p, P, Q);
      direct_PQ(l, 0.5L, dummy, S);
      CHECK(std::abs(t->P[l] - static_cast<double>(P)) <= 1e-12 * std::max<double>(P, 1e-300) + 1e-300);
      if (l % 2 == 0) CHECK(rel(t->Q[l], static_cast<double>(Q)) < 1e-11);
      if (l % 2 == 1) CHECK(t->S[l] == 0);
      if (l % 2 == 0) CHECK(rel(t->S[l], static_cast<double>(S)) < 1e-11);
      CHECK(std::pow(energy_params(y).AM, l) * (2 * t->P[l] + t->Q[l]) <= 1 + 1e-14);
      CHECK(t->P[l] + t->Q[l] <= 1 + 1e-14);
      if (l >= 1) {
        const double lhs = t->P[l] + t->Q[l] / 2;
        const double rhs = l % 2 == 0 ? t->P[l - 1] : t->P[l - 1] + (1 - p) * t->Q[l - 1];
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(rhs, 1e-300));
      }
    }
  }
}

TEST_CASE("kernel identity A Q = G S") {
  for (double w : {0.01, 0.2, 0.7})
    for (double y : {0.0, 0.5, 2.5}) {
      const KernelTable kt = kernel_table(200, w, y, {.full_range = true});
      for (long l = kt.lo; l <= std::min(kt.hi, 200L); ++l) {
        const double a = kt.A(l) * kt.Q(l), g = kt.G(l) * kt.S(l);
        if (g > 1e-280) CHECK(rel(a, g) < 1e-12);
      }
    }
}

TEST_CASE("kernel sums against the double-sum oracle") {
  struct Case {
    long n;
    double w, y;
  };
  for (Case c : {Case{49, 0.05, 0.3}, Case{10, 0.4, 1.2}, Case{1, 0.3, 0.7}, Case{80, 0.02, 3.0}}) {
    long double Z0, Zf;
    double_sum(c.n, c.w, c.y, Z0, Zf);
    const KernelTable kt = kernel_table(static_cast<double>(c.n), c.w, c.y);
    CHECK(rel(kt.Z0(), static_cast<double>(Z0)) < 1e-12);
    CHECK(rel(kt.Zf(), static_cast<double>(Zf)) < 1e-12);
    const double x = var_update(c.w, c.y, static_cast<double>(c.n + 1));
    CHECK(rel(x, static_cast<double>(Zf / (2 * Z0 + Zf))) < 1e-12);
  }
}

TEST_CASE("truncated window agrees with the full range") {
  for (double n : {50.0, 400.0, 1999.0})
    for (double w : {0.003, 0.05})
      for (double y : {0.4, 2.0}) {
        const KernelTable a = kernel_table(n, w, y), b = kernel_table(n, w, y, {.full_range = true});
        CHECK(rel(a.Z0(), b.Z0()) < 1e-12);
        CHECK(rel(a.Zf(), b.Zf()) < 1e-12);
      }
}

TEST_CASE("clause update") {
  CHECK(clause_update(1, 5) == 0);
  CHECK(clause_update(0, 3) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(clause_update(0.1, 4) == doctest::Approx(0.18225).epsilon(1e-14));
  for (int k = 3; k <= 12; ++k)
    for (double x = 0; x <= 1; x += 0.05) {
      const double w = clause_update(x, k);
      CHECK(w >= 0);
      CHECK(w <= 4.0 / std::ldexp(1.0, k) + 1e-15);
    }
}

TEST_CASE("variable update") {
  CHECK(var_update(0, 1.3, 30) == 1);
  for (double y : {0.0, 0.4, 5.0})
    for (double w : {0.0, 0.1, 0.6, 1.0}) CHECK(var_update(w, y, 2) == doctest::Approx(1 - w).epsilon(1e-14));
  for (double y : {0.3, 1.5}) {
    double prev = 2;
    for (double w = 0; w <= 0.5; w += 0.01) {
      const double x = var_update(w, y, 40);
      CHECK(x >= 0);
      CHECK(x <= 1);
      CHECK(x <= prev + 1e-15);
      prev = x;
    }
  }
}

TEST_CASE("fixed point solver") {
  const int k = 10;
  const double d = 2 * k * density_scale(k);
  const double y = y_for_gamma(2, 1);
  const SpPoint pt = sp_solve(k, d, y);
  CHECK(pt.x > 0);
  CHECK(pt.x < 1.0 / (k * k));
  CHECK(pt.in_mbullet);
  CHECK(pt.x == doctest::Approx(0.0017990196265859134).epsilon(1e-9));
  CHECK(pt.residual < 1e-13);
  CHECK(pt.w == clause_update(pt.x, k));
  CHECK(std::abs(var_update(pt.w, y, d) - pt.x) <= pt.residual + 1e-16);
  const SpPoint again = sp_solve(k, d, y, {.x0 = pt.x});
  CHECK(std::abs(again.x - pt.x) < 1e-13);
  CHECK(again.iterations <= 2);

  SpOptions few;
  few.max_iter = 5;
  CHECK_THROWS_AS(sp_solve(3, 4, 1, few), NoConvergence);
  CHECK_THROWS_AS(sp_solve(3, 4, -1), InvalidInput);
}

TEST_CASE("derivative of the composed map") {
  struct Case {
    int k;
    double d, y;
  };
  for (Case c : {Case{10, 2 * 10 * density_scale(10), 1.386}, Case{6, 3 * 6 * density_scale(6), 1.0},
                 Case{8, 1.5 * 8 * density_scale(8), 2.0}, Case{5, 4 * 5 * density_scale(5), 1.0}}) {
    const SpPoint pt = sp_solve(c.k, c.d, c.y);
    REQUIRE(pt.in_mbullet);
    const double h = 1e-6;
    const double fd = (sp_map(pt.x + h, c.k, c.d, c.y) - sp_map(pt.x - h, c.k, c.d, c.y)) / (2 * h);
    const double an = sp_derivative(c.k, c.d, c.y, pt.x);
    CHECK(rel(an, fd) < 1e-4);
    CHECK(std::abs(an) < 1);
  }
  // d = 2: x~ = 1 - w(x) so the derivative is 2(k-1)(1-x)^{k-2}/2^{k-1}.
  for (int k : {3, 5}) {
    const double x = 0.3;
    const double expect = 2 * (k - 1) * std::pow(1 - x, k - 2) / std::ldexp(1.0, k - 1);
    CHECK(sp_derivative(k, 2, 0.9, x) == doctest::Approx(expect).epsilon(1e-10));
  }
}
