#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "crnkit/error.hpp"
#include "crnkit/network.hpp"

namespace crn {

using ClassicalState = std::vector<double>;
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// x^s with the multi-index convention 0^0 = 1.
inline double mass_action_monomial(std::span<const double> x, const CountVector& s) {
  double p = 1.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::int64_t e = 0; e < s[i]; ++e) p *= x[i];
  return p;
}

// ---------------------------------------------------------------------------
// Exact linear algebra over ℚ

struct RationalEchelon {
  std::vector<std::vector<Rational>> rows;  // reduced row echelon form
  std::vector<std::size_t> pivots;          // pivot column of each nonzero row
  std::size_t cols = 0;

  std::size_t rank() const { return pivots.size(); }
};

inline RationalEchelon reduced_row_echelon(const IntMatrix& m) {
  RationalEchelon e;
  e.cols = m.cols;
  e.rows.assign(m.rows, std::vector<Rational>(m.cols));
  for (std::size_t r = 0; r < m.rows; ++r)
    for (std::size_t c = 0; c < m.cols; ++c) e.rows[r][c] = Rational(m(r, c));

  std::size_t lead = 0;
  for (std::size_t c = 0; c < m.cols && lead < m.rows; ++c) {
    std::size_t p = lead;
    while (p < m.rows && e.rows[p][c] == 0) ++p;
    if (p == m.rows) continue;
    std::swap(e.rows[p], e.rows[lead]);
    const Rational inv = Rational(1) / e.rows[lead][c];
    for (auto& v : e.rows[lead]) v *= inv;
    for (std::size_t r = 0; r < m.rows; ++r) {
      if (r == lead || e.rows[r][c] == 0) continue;
      const Rational f = e.rows[r][c];
      for (std::size_t cc = c; cc < m.cols; ++cc) e.rows[r][cc] -= f * e.rows[lead][cc];
    }
    e.pivots.push_back(c);
    ++lead;
  }
  e.rows.resize(lead);
  return e;
}

inline std::size_t rational_rank(const IntMatrix& m) { return reduced_row_echelon(m).rank(); }

inline IntMatrix transpose(const IntMatrix& m) {
  IntMatrix t(m.cols, m.rows);
  for (std::size_t r = 0; r < m.rows; ++r)
    for (std::size_t c = 0; c < m.cols; ++c) t(c, r) = m(r, c);
  return t;
}

/// Scale a rational vector to coprime integers with positive leading entry.
inline std::vector<std::int64_t> to_primitive_integer(const std::vector<Rational>& v) {
  BigInt lcm = 1;
  for (const auto& x : v) {
    const BigInt d = boost::multiprecision::denominator(x);
    lcm = lcm / boost::multiprecision::gcd(lcm, d) * d;
  }
  std::vector<BigInt> ints;
  BigInt g = 0;
  for (const auto& x : v) {
    BigInt n = boost::multiprecision::numerator(x) * (lcm / boost::multiprecision::denominator(x));
    g = boost::multiprecision::gcd(g, n);
    ints.push_back(n);
  }
  std::vector<std::int64_t> out(v.size(), 0);
  if (g == 0) return out;
  int sign = 0;
  for (const auto& n : ints)
    if (n != 0) {
      sign = n > 0 ? 1 : -1;
      break;
    }
  for (std::size_t i = 0; i < ints.size(); ++i) out[i] = static_cast<std::int64_t>(sign * ints[i] / g);
  return out;
}

/// Basis of {w : M w = 0} read off the echelon form, one vector per free column.
inline std::vector<std::vector<Rational>> rational_null_space(const IntMatrix& m) {
  const auto e = reduced_row_echelon(m);
  std::vector<bool> is_pivot(m.cols, false);
  for (auto p : e.pivots) is_pivot[p] = true;
  std::vector<std::vector<Rational>> basis;
  for (std::size_t f = 0; f < m.cols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Rational> w(m.cols, Rational(0));
    w[f] = 1;
    for (std::size_t r = 0; r < e.pivots.size(); ++r) w[e.pivots[r]] = -e.rows[r][f];
    basis.push_back(std::move(w));
  }
  return basis;
}

// ---------------------------------------------------------------------------
// Graph structure of the complex graph

/// Connected components of the undirected complex graph, each sorted, ordered by smallest member.
inline std::vector<std::vector<std::size_t>> linkage_classes(const ComplexGraph& g) {
  const std::size_t n = g.vertices.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  std::function<std::size_t(std::size_t)> find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (const auto& e : g.edges) {
    auto a = find(e.source), b = find(e.target);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::vector<std::size_t>> classes;
  std::vector<std::ptrdiff_t> slot(n, -1);
  for (std::size_t v = 0; v < n; ++v) {
    const auto root = find(v);
    if (slot[root] < 0) {
      slot[root] = static_cast<std::ptrdiff_t>(classes.size());
      classes.emplace_back();
    }
    classes[static_cast<std::size_t>(slot[root])].push_back(v);
  }
  return classes;
}

/// Tarjan's algorithm, iterative. Returns a component id per vertex.
inline std::vector<std::size_t> strongly_connected_components(const ComplexGraph& g,
                                                              std::size_t* count = nullptr) {
  const std::size_t n = g.vertices.size();
  constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& e : g.edges) adj[e.source].push_back(e.target);

  std::vector<std::size_t> index(n, unvisited), low(n, 0), comp(n, unvisited), stack;
  std::vector<bool> on_stack(n, false);
  std::size_t next_index = 0, next_comp = 0;

  struct Frame {
    std::size_t v;
    std::size_t edge;
  };
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != unvisited) continue;
    std::vector<Frame> call{{root, 0}};
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      auto& f = call.back();
      if (f.edge < adj[f.v].size()) {
        const auto w = adj[f.v][f.edge++];
        if (index[w] == unvisited) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      const auto v = f.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] == index[v]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = next_comp;
        } while (w != v);
        ++next_comp;
      }
    }
  }
  if (count) *count = next_comp;
  return comp;
}

/// Every linkage class is strongly connected. SCCs refine linkage classes,
/// so it suffices to compare the counts.
inline bool is_weakly_reversible(const ComplexGraph& g) {
  std::size_t scc_count = 0;
  strongly_connected_components(g, &scc_count);
  return scc_count == linkage_classes(g).size();
}

// ---------------------------------------------------------------------------
// Conservation laws and deficiency

/// Integer weights w with w · (t(τ) − s(τ)) = 0 for every transition.
struct ConservedVector {
  std::vector<std::int64_t> weights;

  std::int64_t dot(const CountVector& n) const {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) s += weights[i] * n[i];
    return s;
  }
  double dot(std::span<const double> x) const {
    double s = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) s += static_cast<double>(weights[i]) * x[i];
    return s;
  }

  friend bool operator==(const ConservedVector&, const ConservedVector&) = default;
  friend auto operator<=>(const ConservedVector& a, const ConservedVector& b) { return a.weights <=> b.weights; }
};

inline bool is_conserved(const Network& net, const ConservedVector& w) {
  for (const auto& t : net.transitions()) {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < net.num_species(); ++i) s += w.weights[i] * (t.output[i] - t.input[i]);
    if (s != 0) return false;
  }
  return true;
}

/// Canonical integer basis of the left null space of the stoichiometric matrix.
inline std::vector<ConservedVector> conserved_quantities(const Network& net) {
  const auto gamma_t = transpose(stoichiometric_matrix(net));
  std::vector<ConservedVector> out;
  for (const auto& v : rational_null_space(gamma_t)) out.push_back({to_primitive_integer(v)});
  std::sort(out.begin(), out.end());
  return out;
}

struct StructureReport {
  std::size_t num_complexes = 0;
  std::vector<std::vector<std::size_t>> linkage_classes;
  bool weakly_reversible = true;
  std::size_t stoichiometric_rank = 0;
  std::size_t deficiency = 0;
  std::vector<ConservedVector> conserved_basis;
  std::vector<CountVector> complexes;
};

inline StructureReport analyze_structure(const Network& net) {
  StructureReport r;
  const auto g = complex_graph(net);
  r.complexes = g.vertices;
  r.num_complexes = g.vertices.size();
  r.linkage_classes = linkage_classes(g);
  r.weakly_reversible = is_weakly_reversible(g);
  r.stoichiometric_rank = rational_rank(stoichiometric_matrix(net));
  const auto d = static_cast<std::int64_t>(r.num_complexes) - static_cast<std::int64_t>(r.linkage_classes.size()) -
                 static_cast<std::int64_t>(r.stoichiometric_rank);
  // Nonnegative for every reaction network; a violation means the rank is wrong.
  if (d < 0) throw Error(ErrorCode::Dim, "negative deficiency; internal rank computation failed");
  r.deficiency = static_cast<std::size_t>(d);
  r.conserved_basis = conserved_quantities(net);
  return r;
}

/// |K| − ℓ − rank.
inline std::size_t deficiency(const Network& net) { return analyze_structure(net).deficiency; }

// ---------------------------------------------------------------------------
// Complex balance

struct ComplexBalanceEntry {
  CountVector complex;
  double production = 0.0;   // Σ over τ with t(τ) = κ of r(τ) c^{s(τ)}
  double consumption = 0.0;  // Σ over τ with s(τ) = κ of r(τ) c^{s(τ)}
  double residual = 0.0;     // production − consumption
};

struct ComplexBalanceReport {
  bool balanced = true;
  double max_abs_residual = 0.0;
  double threshold = 0.0;
  std::vector<ComplexBalanceEntry> complexes;
};

inline void check_state(const Network& net, std::span<const double> c) {
  if (c.size() != net.num_species())
    throw Error(ErrorCode::Dim, "state has length " + std::to_string(c.size()) + ", network has " +
                                    std::to_string(net.num_species()) + " species");
}

/// Balanced iff max |residual| ≤ tol · (1 + largest per-complex throughput).
inline ComplexBalanceReport complex_balance(const Network& net, std::span<const double> c, double tol) {
  check_state(net, c);
  const auto g = complex_graph(net);
  ComplexBalanceReport rep;
  rep.complexes.resize(g.vertices.size());
  for (std::size_t v = 0; v < g.vertices.size(); ++v) rep.complexes[v].complex = g.vertices[v];
  for (const auto& e : g.edges) {
    const auto& t = net.transitions()[e.transition];
    const double flux = t.rate * mass_action_monomial(c, t.input);
    rep.complexes[e.source].consumption += flux;
    rep.complexes[e.target].production += flux;
  }
  double throughput = 0.0;
  for (auto& entry : rep.complexes) {
    entry.residual = entry.production - entry.consumption;
    rep.max_abs_residual = std::max(rep.max_abs_residual, std::abs(entry.residual));
    throughput = std::max({throughput, entry.production, entry.consumption});
  }
  rep.threshold = tol * (1.0 + throughput);
  rep.balanced = rep.max_abs_residual <= rep.threshold;
  return rep;
}

inline bool is_complex_balanced(const Network& net, std::span<const double> c, double tol) {
  return complex_balance(net, c, tol).balanced;
}

}  // namespace crn
