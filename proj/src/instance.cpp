#include "naesat/instance.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "naesat/parallel.hpp"
#include "naesat/rng.hpp"

namespace naesat {

ModelParams make_params(int k, long long d, long long n) {
  if (k < 2) throw InvalidInput("k must be at least 2");
  if (d < 1) throw InvalidInput("d must be at least 1");
  if (n < 1) throw InvalidInput("n must be at least 1");
  if ((n * d) % k != 0)
    throw InvalidInput("n*d = " + std::to_string(n * d) + " is not divisible by k = " +
                       std::to_string(k));
  ModelParams p;
  p.k = k;
  p.d = d;
  p.n = n;
  p.m = n * d / k;
  p.alpha = static_cast<double>(d) / k;
  p.c = p.alpha / density_scale(k);
  p.D = d * (k - 1);
  p.branch = (d - 1) * (k - 1);
  return p;
}

long long degree_for_c(int k, double c) {
  if (k < 2 || !(c > 0)) throw InvalidInput("degree_for_c needs k >= 2 and c > 0");
  return std::max(1LL, std::llround(c * density_scale(k) * k));
}

Instance make_instance(const ModelParams& params, std::vector<Edge> edges) {
  Instance inst;
  inst.params = params;
  inst.edges = std::move(edges);
  const long n = params.n, m = params.m, d = params.d, k = params.k;
  if (static_cast<long>(inst.edges.size()) != n * d)
    throw InvalidInput("edge count " + std::to_string(inst.edges.size()) + " != n*d");
  std::vector<int> vfill(n, 0), cfill(m, 0);
  inst.var_edges.assign(n * d, -1);
  inst.clause_edges.assign(m * k, -1);
  for (long e = 0; e < static_cast<long>(inst.edges.size()); ++e) {
    const Edge& ed = inst.edges[e];
    if (ed.var < 0 || ed.var >= n || ed.clause < 0 || ed.clause >= m || (ed.lit != 0 && ed.lit != 1))
      throw InvalidInput("edge " + std::to_string(e) + " out of range");
    if (vfill[ed.var] >= d) throw InvalidInput("variable " + std::to_string(ed.var) + " exceeds degree d");
    if (cfill[ed.clause] >= k) throw InvalidInput("clause " + std::to_string(ed.clause) + " exceeds degree k");
    inst.var_edges[ed.var * d + vfill[ed.var]++] = static_cast<int>(e);
    inst.clause_edges[ed.clause * k + cfill[ed.clause]++] = static_cast<int>(e);
  }
  return inst;
}

Instance generate(const ModelParams& params, std::uint64_t seed) {
  const ModelParams p = make_params(params.k, params.d, params.n);
  const long total = p.n * p.d;
  std::vector<int> slots(total);
  for (long i = 0; i < total; ++i) slots[i] = static_cast<int>(i / p.k);
  Xoshiro256 rng(seed);
  for (long i = total - 1; i > 0; --i) {
    const long j = static_cast<long>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(slots[i], slots[j]);
  }
  std::vector<Edge> edges(total);
  for (long i = 0; i < total; ++i) {
    edges[i].var = static_cast<int>(i / p.d);
    edges[i].clause = slots[i];
    edges[i].lit = rng.bit();
  }
  return make_instance(p, std::move(edges));
}

int hamiltonian(const Instance& inst, const Assignment& x) {
  if (static_cast<long long>(x.size()) != inst.params.n)
    throw InvalidInput("assignment length " + std::to_string(x.size()) + " != n");
  int h = 0;
  for (int a = 0; a < inst.m(); ++a) {
    const int* es = inst.edges_of_clause(a);
    int ones = 0;
    for (int j = 0; j < inst.k(); ++j) {
      const Edge& e = inst.edges[es[j]];
      ones += (e.lit ^ x[e.var]) & 1;
    }
    if (ones == 0 || ones == inst.k()) ++h;
  }
  return h;
}

bool has_repeated_variable(const Instance& inst) {
  for (int a = 0; a < inst.m(); ++a) {
    const int* es = inst.edges_of_clause(a);
    for (int i = 0; i < inst.k(); ++i)
      for (int j = i + 1; j < inst.k(); ++j)
        if (inst.edges[es[i]].var == inst.edges[es[j]].var) return true;
  }
  return false;
}

GroundState exact_ground_state(const Instance& inst, int n_cap) {
  const int n = inst.n(), d = inst.d(), k = inst.k(), m = inst.m();
  if (n > n_cap || n > 62)
    throw ResourceCap("n = " + std::to_string(n) + " exceeds the exact-solver cap " + std::to_string(n_cap));
  // Per variable: incident clause and literal, flattened.
  std::vector<int> vc(static_cast<long>(n) * d);
  std::vector<std::uint8_t> vl(static_cast<long>(n) * d);
  for (int v = 0; v < n; ++v)
    for (int j = 0; j < d; ++j) {
      const Edge& e = inst.edges[inst.edges_of_var(v)[j]];
      vc[v * d + j] = e.clause;
      vl[v * d + j] = static_cast<std::uint8_t>(e.lit);
    }
  std::vector<int> ones(m, 0);
  for (const Edge& e : inst.edges) ones[e.clause] += e.lit;
  int h = 0;
  for (int a = 0; a < m; ++a) h += (ones[a] == 0 || ones[a] == k);

  // H(x) = H(complement of x): walk the half-cube with x_{n-1} = 0 and double the count.
  std::vector<std::uint8_t> x(n, 0);
  int best = h;
  std::uint64_t count = 1;
  const std::uint64_t steps = std::uint64_t{1} << (n - 1);
  for (std::uint64_t i = 1; i < steps; ++i) {
    const int v = std::countr_zero(i);
    const std::uint8_t xv = x[v] ^= 1;
    const int* cs = &vc[v * d];
    const std::uint8_t* ls = &vl[v * d];
    for (int j = 0; j < d; ++j) {
      int& o = ones[cs[j]];
      const int before = (o == 0 || o == k);
      o += ((ls[j] ^ xv) & 1) ? 1 : -1;
      h += (o == 0 || o == k) - before;
    }
    if (h < best) {
      best = h;
      count = 1;
    } else if (h == best) {
      ++count;
    }
  }
  return {best, 2 * count};
}

EminStats sample_emin_stats(const ModelParams& params, int trials, std::uint64_t seed, int n_cap,
                            int threads) {
  if (trials < 1) throw InvalidInput("trials must be at least 1");
  const ModelParams p = make_params(params.k, params.d, params.n);
  if (p.n > n_cap) throw ResourceCap("n exceeds the exact-solver cap");
  std::vector<double> e(trials);
  parallel_for(trials, threads, [&](int t) {
    const Instance inst = generate(p, stream_seed(seed, static_cast<std::uint64_t>(t)));
    e[t] = static_cast<double>(exact_ground_state(inst, n_cap).energy) / static_cast<double>(p.n);
  });
  EminStats s;
  s.trials = trials;
  double sum = 0;
  for (double v : e) sum += v;
  s.mean = sum / trials;
  double ss = 0;
  for (double v : e) ss += (v - s.mean) * (v - s.mean);
  s.stddev = trials > 1 ? std::sqrt(ss / (trials - 1)) : 0.0;
  s.min = *std::min_element(e.begin(), e.end());
  s.max = *std::max_element(e.begin(), e.end());
  return s;
}

}  // namespace naesat
