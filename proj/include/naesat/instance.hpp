#pragma once

#include <cstdint>
#include <vector>

#include "naesat/core.hpp"

namespace naesat {

struct Edge {
  int var = 0;
  int clause = 0;
  int lit = 0;
};

// Labeled bipartite multigraph. var_edges holds d edge indices per variable,
// clause_edges holds k edge indices per clause, both in edge order.
struct Instance {
  ModelParams params;
  std::vector<Edge> edges;
  std::vector<int> var_edges;
  std::vector<int> clause_edges;

  int k() const { return params.k; }
  int d() const { return static_cast<int>(params.d); }
  int n() const { return static_cast<int>(params.n); }
  int m() const { return static_cast<int>(params.m); }
  const int* edges_of_var(int v) const { return var_edges.data() + static_cast<long>(v) * d(); }
  const int* edges_of_clause(int a) const { return clause_edges.data() + static_cast<long>(a) * k(); }
};

using Assignment = std::vector<std::uint8_t>;

// Builds adjacency from an explicit edge list; checks degree regularity.
Instance make_instance(const ModelParams& params, std::vector<Edge> edges);

// Configuration-model sample: clause half-edges Fisher-Yates shuffled against
// the fixed variable half-edge order, literals uniform.
Instance generate(const ModelParams& params, std::uint64_t seed);

// Number of clauses whose literal values L xor x are all equal.
int hamiltonian(const Instance& inst, const Assignment& x);

// True if some clause contains the same variable twice.
bool has_repeated_variable(const Instance& inst);

struct GroundState {
  int energy = 0;
  std::uint64_t count = 0;
};

inline constexpr int kDefaultNCap = 28;

// Exhaustive minimum of H over all 2^N assignments by a Gray-code walk.
GroundState exact_ground_state(const Instance& inst, int n_cap = kDefaultNCap);

struct EminStats {
  int trials = 0;
  double mean = 0;
  double stddev = 0;  // sample standard deviation, 0 for a single trial
  double min = 0;
  double max = 0;
};

EminStats sample_emin_stats(const ModelParams& params, int trials, std::uint64_t seed,
                            int n_cap = kDefaultNCap, int threads = 1);

}  // namespace naesat
