#include "naesat/wp.hpp"

#include <algorithm>
#include <functional>
#include <string>

namespace naesat {

Warning wp_clause(std::span<const LitWarning> inputs, int out_lit) {
  if (inputs.empty()) return Warning::free;
  bool all_one = true, all_zero = true;
  for (const LitWarning& in : inputs) {
    const Warning v = wxor(in.w, in.lit);
    if (v == Warning::free) return Warning::free;
    const int b = static_cast<int>(v);
    all_one = all_one && b == (out_lit ^ 1);
    all_zero = all_zero && b == out_lit;
  }
  if (all_one) return Warning::zero;
  if (all_zero) return Warning::one;
  return Warning::free;
}

Warning wp_clause_plain(std::span<const Warning> inputs) {
  if (inputs.empty()) return Warning::free;
  const Warning first = inputs[0];
  if (first == Warning::free) return Warning::free;
  for (Warning w : inputs)
    if (w != first) return Warning::free;
  return first == Warning::one ? Warning::zero : Warning::one;
}

Warning wp_var(std::span<const Warning> inputs) {
  int l0 = 0, l1 = 0;
  for (Warning w : inputs) {
    l0 += w == Warning::zero;
    l1 += w == Warning::one;
  }
  if (l0 > l1) return Warning::zero;
  if (l1 > l0) return Warning::one;
  return Warning::free;
}

int phi_var(std::span<const Warning> inputs) {
  int l0 = 0, l1 = 0;
  for (Warning w : inputs) {
    l0 += w == Warning::zero;
    l1 += w == Warning::one;
  }
  return std::min(l0, l1);
}

int phi_clause(std::span<const Warning> adjusted) {
  if (adjusted.empty() || adjusted[0] == Warning::free) return 0;
  for (Warning w : adjusted)
    if (w != adjusted[0]) return 0;
  return 1;
}

int phi_edge(Warning wdot, Warning what) { return wxor(wdot, what) == Warning::one ? 1 : 0; }

namespace {

Warning var_rule(const Instance& inst, const WarningConfig& wc, int v, int skip) {
  std::vector<Warning> in;
  const int* es = inst.edges_of_var(v);
  for (int j = 0; j < inst.d(); ++j)
    if (es[j] != skip) in.push_back(wc.what[es[j]]);
  return wp_var(in);
}

Warning clause_rule(const Instance& inst, const WarningConfig& wc, int a, int skip) {
  std::vector<LitWarning> in;
  const int* es = inst.edges_of_clause(a);
  for (int j = 0; j < inst.k(); ++j)
    if (es[j] != skip) in.push_back({inst.edges[es[j]].lit, wc.wdot[es[j]]});
  return wp_clause(in, inst.edges[skip].lit);
}

}  // namespace

std::optional<int> first_invalid_edge(const Instance& inst, const WarningConfig& wc) {
  const int ne = static_cast<int>(inst.edges.size());
  if (static_cast<int>(wc.wdot.size()) != ne || static_cast<int>(wc.what.size()) != ne) return 0;
  for (int e = 0; e < ne; ++e) {
    const Edge& ed = inst.edges[e];
    if (wc.wdot[e] != var_rule(inst, wc, ed.var, e)) return e;
    if (wc.what[e] != clause_rule(inst, wc, ed.clause, e)) return e;
  }
  return std::nullopt;
}

int bethe_energy(const Instance& inst, const WarningConfig& wc) {
  if (auto bad = first_invalid_edge(inst, wc))
    throw InvalidInput("warning configuration violates a relation at edge " + std::to_string(*bad));
  int total = 0;
  std::vector<Warning> buf;
  for (int v = 0; v < inst.n(); ++v) {
    buf.clear();
    for (int j = 0; j < inst.d(); ++j) buf.push_back(wc.what[inst.edges_of_var(v)[j]]);
    total += phi_var(buf);
  }
  for (int a = 0; a < inst.m(); ++a) {
    buf.clear();
    for (int j = 0; j < inst.k(); ++j) {
      const int e = inst.edges_of_clause(a)[j];
      buf.push_back(wxor(wc.wdot[e], inst.edges[e].lit));
    }
    total += phi_clause(buf);
  }
  for (std::size_t e = 0; e < inst.edges.size(); ++e) total -= phi_edge(wc.wdot[e], wc.what[e]);
  return total;
}

TreeAdjacency check_tree(const BoundaryTree& tree) {
  TreeAdjacency adj;
  if (tree.n_vars < 1 || tree.n_clauses < 1) throw InvalidInput("tree needs a variable and a clause");
  const int ne = static_cast<int>(tree.edges.size());
  if (ne != tree.n_vars + tree.n_clauses - 1) throw InvalidInput("edge count does not match a tree");
  adj.var_edges.assign(tree.n_vars, {});
  adj.clause_edges.assign(tree.n_clauses, {});
  for (int e = 0; e < ne; ++e) {
    const Edge& ed = tree.edges[e];
    if (ed.var < 0 || ed.var >= tree.n_vars || ed.clause < 0 || ed.clause >= tree.n_clauses ||
        (ed.lit != 0 && ed.lit != 1))
      throw InvalidInput("tree edge " + std::to_string(e) + " out of range");
    adj.var_edges[ed.var].push_back(e);
    adj.clause_edges[ed.clause].push_back(e);
  }
  // Connectivity by union-find over the n_vars + n_clauses vertices.
  std::vector<int> parent(tree.n_vars + tree.n_clauses);
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
  std::function<int(int)> find = [&](int i) { return parent[i] == i ? i : parent[i] = find(parent[i]); };
  for (const Edge& ed : tree.edges) {
    const int a = find(ed.var), b = find(tree.n_vars + ed.clause);
    if (a == b) throw InvalidInput("tree contains a cycle or a repeated edge");
    parent[a] = b;
  }
  for (int v = 0; v < tree.n_vars; ++v)
    if (adj.var_edges[v].empty()) throw InvalidInput("isolated variable " + std::to_string(v));
  adj.boundary_of_edge.assign(ne, -1);
  for (const auto& [e, w] : tree.boundary) {
    if (e < 0 || e >= ne) throw InvalidInput("boundary edge out of range");
    if (w == Warning::free) throw InvalidInput("boundary warnings must be 0 or 1");
    if (adj.var_edges[tree.edges[e].var].size() != 1)
      throw InvalidInput("boundary edge " + std::to_string(e) + " is not a leaf edge");
    adj.boundary_of_edge[e] = static_cast<int>(w);
  }
  for (int v = 0; v < tree.n_vars; ++v)
    if (adj.var_edges[v].size() == 1 && adj.boundary_of_edge[adj.var_edges[v][0]] < 0)
      throw InvalidInput("leaf variable " + std::to_string(v) + " has no frozen warning");
  return adj;
}

WarningConfig tree_wp(const BoundaryTree& tree) {
  const TreeAdjacency adj = check_tree(tree);
  const int ne = static_cast<int>(tree.edges.size());
  std::vector<int> dot_done(ne, 0), hat_done(ne, 0);
  WarningConfig wc{std::vector<Warning>(ne, Warning::free), std::vector<Warning>(ne, Warning::free)};
  std::function<Warning(int)> wdot, what;
  wdot = [&](int e) -> Warning {
    if (dot_done[e]) return wc.wdot[e];
    Warning r;
    if (adj.boundary_of_edge[e] >= 0) {
      r = warning_of(adj.boundary_of_edge[e]);
    } else {
      std::vector<Warning> in;
      for (int f : adj.var_edges[tree.edges[e].var])
        if (f != e) in.push_back(what(f));
      r = wp_var(in);
    }
    dot_done[e] = 1;
    return wc.wdot[e] = r;
  };
  what = [&](int e) -> Warning {
    if (hat_done[e]) return wc.what[e];
    std::vector<LitWarning> in;
    for (int f : adj.clause_edges[tree.edges[e].clause])
      if (f != e) in.push_back({tree.edges[f].lit, wdot(f)});
    const Warning r = wp_clause(in, tree.edges[e].lit);
    hat_done[e] = 1;
    return wc.what[e] = r;
  };
  for (int e = 0; e < ne; ++e) {
    wdot(e);
    what(e);
  }
  return wc;
}

int tree_energy_formula(const BoundaryTree& tree) {
  const TreeAdjacency adj = check_tree(tree);
  const WarningConfig wc = tree_wp(tree);
  int total = 0;
  std::vector<Warning> buf;
  for (int v = 0; v < tree.n_vars; ++v) {
    if (adj.var_edges[v].size() < 2) continue;
    buf.clear();
    for (int e : adj.var_edges[v]) buf.push_back(wc.what[e]);
    total += phi_var(buf);
    for (int e : adj.var_edges[v]) total -= phi_edge(wc.wdot[e], wc.what[e]);
  }
  for (int a = 0; a < tree.n_clauses; ++a) {
    buf.clear();
    for (int e : adj.clause_edges[a]) buf.push_back(wxor(wc.wdot[e], tree.edges[e].lit));
    total += phi_clause(buf);
  }
  return total;
}

int tree_energy_brute(const BoundaryTree& tree) {
  const TreeAdjacency adj = check_tree(tree);
  std::vector<int> internal;
  std::vector<int> x(tree.n_vars, 0);
  for (int v = 0; v < tree.n_vars; ++v) {
    if (adj.var_edges[v].size() >= 2)
      internal.push_back(v);
    else
      x[v] = adj.boundary_of_edge[adj.var_edges[v][0]];
  }
  if (static_cast<int>(internal.size()) > kTreeEnumerationCapBits)
    throw ResourceCap("tree has too many internal variables for enumeration");
  int best = tree.n_clauses + 1;
  const std::uint64_t total = std::uint64_t{1} << internal.size();
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    for (std::size_t i = 0; i < internal.size(); ++i) x[internal[i]] = (mask >> i) & 1;
    int h = 0;
    for (int a = 0; a < tree.n_clauses; ++a) {
      int ones = 0;
      for (int e : adj.clause_edges[a]) ones += tree.edges[e].lit ^ x[tree.edges[e].var];
      const int deg = static_cast<int>(adj.clause_edges[a].size());
      h += (ones == 0 || ones == deg);
    }
    best = std::min(best, h);
  }
  return best;
}

BoundaryTree random_tree(Xoshiro256& rng, int k, int max_nodes) {
  if (k < 2 || max_nodes < k + 1) throw InvalidInput("random_tree needs k >= 2 and room for one clause");
  BoundaryTree t;
  auto add_clause = [&](int anchor) {
    const int a = t.n_clauses++;
    int have = 0;
    if (anchor >= 0) {
      t.edges.push_back({anchor, a, rng.bit()});
      ++have;
    }
    for (; have < k; ++have) t.edges.push_back({t.n_vars++, a, rng.bit()});
  };
  add_clause(-1);
  while (t.n_vars + t.n_clauses + k <= max_nodes && rng.uniform() < 0.85)
    add_clause(static_cast<int>(rng.below(static_cast<std::uint64_t>(t.n_vars))));
  std::vector<int> deg(t.n_vars, 0);
  for (const Edge& e : t.edges) ++deg[e.var];
  for (int e = 0; e < static_cast<int>(t.edges.size()); ++e)
    if (deg[t.edges[e].var] == 1) t.boundary.push_back({e, warning_of(rng.bit())});
  return t;
}

}  // namespace naesat
