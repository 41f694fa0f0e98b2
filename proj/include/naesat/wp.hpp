#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "naesat/instance.hpp"
#include "naesat/rng.hpp"

namespace naesat {

// Warning alphabet {0, 1, f}; f absorbs xor.
enum class Warning : std::uint8_t { zero = 0, one = 1, free = 2 };

inline Warning warning_of(int b) { return b ? Warning::one : Warning::zero; }
inline char warning_char(Warning w) { return w == Warning::free ? 'f' : (w == Warning::one ? '1' : '0'); }

inline Warning wxor(Warning a, int lit) {
  if (a == Warning::free) return Warning::free;
  return warning_of(static_cast<int>(a) ^ (lit & 1));
}
inline Warning wxor(Warning a, Warning b) {
  if (a == Warning::free || b == Warning::free) return Warning::free;
  return warning_of(static_cast<int>(a) ^ static_cast<int>(b));
}

struct LitWarning {
  int lit = 0;
  Warning w = Warning::free;
};

// Clause update: 0 if every input reads L_g xor w_g = L_e xor 1, 1 if every
// input reads L_e xor 0, f otherwise (including the empty input).
Warning wp_clause(std::span<const LitWarning> inputs, int out_lit);

// Literal-free clause update used by the recursions (all literals 0).
Warning wp_clause_plain(std::span<const Warning> inputs);

// Variable update: majority of non-free inputs, f on a tie.
Warning wp_var(std::span<const Warning> inputs);

int phi_var(std::span<const Warning> inputs);
// 1 iff the literal-adjusted values are all equal and not f.
int phi_clause(std::span<const Warning> adjusted);
int phi_edge(Warning wdot, Warning what);

// Per-edge pair (variable-to-clause, clause-to-variable).
struct WarningConfig {
  std::vector<Warning> wdot;
  std::vector<Warning> what;
};

// Index of the first edge violating a variable or clause relation, if any.
std::optional<int> first_invalid_edge(const Instance& inst, const WarningConfig& wc);

// Bethe energy; throws InvalidInput naming the offending edge if wc is not valid.
int bethe_energy(const Instance& inst, const WarningConfig& wc);

// Bipartite tree with variables at the leaves. Clause degrees may differ.
struct BoundaryTree {
  int n_vars = 0;
  int n_clauses = 0;
  std::vector<Edge> edges;
  // Frozen variable-to-clause warning on each leaf edge.
  std::vector<std::pair<int, Warning>> boundary;
};

struct TreeAdjacency {
  std::vector<std::vector<int>> var_edges;
  std::vector<std::vector<int>> clause_edges;
  std::vector<int> boundary_of_edge;  // -1, 0 or 1
};

// Checks tree shape, leaf boundary and literal ranges; throws InvalidInput.
TreeAdjacency check_tree(const BoundaryTree& tree);

WarningConfig tree_wp(const BoundaryTree& tree);

// Sum of local penalties over internal variables, clauses and internal edges.
int tree_energy_formula(const BoundaryTree& tree);

inline constexpr int kTreeEnumerationCapBits = 22;

// Minimum violated clauses over internal assignments with leaves pinned.
int tree_energy_brute(const BoundaryTree& tree);

// Random tree with clause arity k and at most max_nodes vertices.
BoundaryTree random_tree(Xoshiro256& rng, int k, int max_nodes);

}  // namespace naesat
