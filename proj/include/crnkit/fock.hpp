#pragma once

// Truncated Fock-space representation of the master equation.
//
// A mixed state Ψ = Σ ψ_n z^n is stored as the coefficient vector ψ over a
// rectangular box 0 ≤ n_i ≤ cap_i, flattened row-major in species order (the
// last species varies fastest, the zero state has index 0). Operators are
// sparse column-compressed matrices over the same enumeration.
//
// Boundary policy ("truncate-pair"): a transition firing from n whose target
// leaves the box is dropped together with its diagonal loss term. Columns of
// the Hamiltonian then sum to zero and every conserved sector is preserved,
// at the cost of altered dynamics within `margin` states of the upper caps.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "crnkit/error.hpp"
#include "crnkit/network.hpp"
#include "crnkit/structure.hpp"

namespace crn {

class TruncationBox {
 public:
  TruncationBox() = default;
  explicit TruncationBox(std::vector<std::int64_t> caps) : caps_(std::move(caps)), strides_(caps_.size()) {
    std::size_t stride = 1;
    for (std::size_t i = caps_.size(); i-- > 0;) {
      if (caps_[i] < 1) throw Error(ErrorCode::Box, "caps must be >= 1");
      strides_[i] = stride;
      stride *= static_cast<std::size_t>(caps_[i] + 1);
    }
    size_ = stride;
  }

  std::size_t num_species() const noexcept { return caps_.size(); }
  std::size_t size() const noexcept { return size_; }
  const std::vector<std::int64_t>& caps() const noexcept { return caps_; }
  std::int64_t cap(std::size_t i) const { return caps_[i]; }

  template <typename Vec>
  bool contains(const Vec& n) const {
    for (std::size_t i = 0; i < caps_.size(); ++i)
      if (n[i] < 0 || n[i] > caps_[i]) return false;
    return true;
  }

  template <typename Vec>
  std::size_t index(const Vec& n) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < caps_.size(); ++i) idx += static_cast<std::size_t>(n[i]) * strides_[i];
    return idx;
  }

  CountVector state(std::size_t flat) const {
    std::vector<std::int64_t> n(caps_.size());
    for (std::size_t i = 0; i < caps_.size(); ++i) {
      n[i] = static_cast<std::int64_t>(flat / strides_[i]);
      flat %= strides_[i];
    }
    return CountVector(std::move(n));
  }

  std::size_t stride(std::size_t i) const { return strides_[i]; }

  friend bool operator==(const TruncationBox& a, const TruncationBox& b) { return a.caps_ == b.caps_; }

 private:
  std::vector<std::int64_t> caps_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 1;
};

/// Width of the boundary layer affected by truncation: the largest single
/// coefficient in any input or output complex.
inline std::int64_t interior_margin(const Network& net) { return net.max_coefficient(); }

/// cap_i = ceil(c_i + 10 sqrt(c_i)) + margin, at least 8.
inline TruncationBox default_box(std::span<const double> c, std::int64_t margin) {
  std::vector<std::int64_t> caps;
  for (double ci : c)
    caps.push_back(std::max<std::int64_t>(8, static_cast<std::int64_t>(std::ceil(ci + 10 * std::sqrt(ci))) + margin));
  return TruncationBox(std::move(caps));
}

/// Is n at least `margin` below every cap?
inline bool is_interior(const TruncationBox& box, const CountVector& n, std::int64_t margin) {
  for (std::size_t i = 0; i < box.num_species(); ++i)
    if (box.cap(i) - n[i] < margin) return false;
  return true;
}

struct MixedState {
  TruncationBox box;
  std::vector<double> weights;

  double total() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

  static MixedState pure(const TruncationBox& box, const CountVector& n) {
    if (!box.contains(n)) throw Error(ErrorCode::Box, "pure state outside truncation box");
    MixedState s{box, std::vector<double>(box.size(), 0.0)};
    s.weights[box.index(n)] = 1.0;
    return s;
  }
};

/// Column-compressed sparse real matrix over a truncation box.
class SparseOperator {
 public:
  struct Entry {
    std::size_t row;
    double value;
  };

  SparseOperator() : SparseOperator(TruncationBox{}) {}
  explicit SparseOperator(TruncationBox box) : box_(std::move(box)), col_ptr_(box_.size() + 1, 0) {}

  /// Builds from per-column row→value maps, dropping explicit zeros.
  static SparseOperator from_columns(TruncationBox box, const std::vector<std::map<std::size_t, double>>& cols) {
    SparseOperator op(std::move(box));
    for (std::size_t c = 0; c < cols.size(); ++c) {
      for (const auto& [r, v] : cols[c])
        if (v != 0.0) op.entries_.push_back({r, v});
      op.col_ptr_[c + 1] = op.entries_.size();
    }
    return op;
  }

  const TruncationBox& box() const noexcept { return box_; }
  std::size_t dim() const noexcept { return box_.size(); }
  std::size_t nnz() const noexcept { return entries_.size(); }

  std::span<const Entry> column(std::size_t c) const {
    return {entries_.data() + col_ptr_[c], col_ptr_[c + 1] - col_ptr_[c]};
  }

  double at(std::size_t r, std::size_t c) const {
    for (const auto& e : column(c))
      if (e.row == r) return e.value;
    return 0.0;
  }

  double max_abs_entry() const {
    double m = 0.0;
    for (const auto& e : entries_) m = std::max(m, std::abs(e.value));
    return m;
  }

  double max_abs_diagonal() const {
    double m = 0.0;
    for (std::size_t c = 0; c < dim(); ++c) m = std::max(m, std::abs(at(c, c)));
    return m;
  }

  double column_sum(std::size_t c) const {
    double s = 0.0;
    for (const auto& e : column(c)) s += e.value;
    return s;
  }

  std::vector<double> apply(std::span<const double> x) const {
    std::vector<double> y(dim(), 0.0);
    for (std::size_t c = 0; c < dim(); ++c) {
      if (x[c] == 0.0) continue;
      for (const auto& e : column(c)) y[e.row] += e.value * x[c];
    }
    return y;
  }

  /// Calls f(row, col, value) for every stored entry, column by column.
  template <typename F>
  void for_each(F&& f) const {
    for (std::size_t c = 0; c < dim(); ++c)
      for (const auto& e : column(c)) f(e.row, c, e.value);
  }

 private:
  TruncationBox box_;
  std::vector<std::size_t> col_ptr_;
  std::vector<Entry> entries_;
};

namespace detail {
inline void require_same_box(const SparseOperator& a, const SparseOperator& b) {
  if (!(a.box() == b.box())) throw Error(ErrorCode::Box, "operators are defined on different truncation boxes");
}
}  // namespace detail

inline SparseOperator multiply(const SparseOperator& a, const SparseOperator& b) {
  detail::require_same_box(a, b);
  std::vector<std::map<std::size_t, double>> cols(a.dim());
  for (std::size_t j = 0; j < b.dim(); ++j)
    for (const auto& eb : b.column(j))
      for (const auto& ea : a.column(eb.row)) cols[j][ea.row] += ea.value * eb.value;
  return SparseOperator::from_columns(a.box(), cols);
}

inline SparseOperator linear_combination(double alpha, const SparseOperator& a, double beta, const SparseOperator& b) {
  detail::require_same_box(a, b);
  std::vector<std::map<std::size_t, double>> cols(a.dim());
  for (std::size_t j = 0; j < a.dim(); ++j) {
    for (const auto& e : a.column(j)) cols[j][e.row] += alpha * e.value;
    for (const auto& e : b.column(j)) cols[j][e.row] += beta * e.value;
  }
  return SparseOperator::from_columns(a.box(), cols);
}

/// [A, B] = AB − BA.
inline SparseOperator commutator(const SparseOperator& a, const SparseOperator& b) {
  detail::require_same_box(a, b);
  return linear_combination(1.0, multiply(a, b), -1.0, multiply(b, a));
}

inline SparseOperator diagonal_operator(const TruncationBox& box, const std::vector<double>& diag) {
  std::vector<std::map<std::size_t, double>> cols(box.size());
  for (std::size_t n = 0; n < box.size(); ++n) cols[n][n] = diag[n];
  return SparseOperator::from_columns(box, cols);
}

inline SparseOperator identity_operator(const TruncationBox& box) {
  return diagonal_operator(box, std::vector<double>(box.size(), 1.0));
}

/// a_i: z^n ↦ n_i z^{n − e_i}.
inline SparseOperator annihilation(std::size_t i, const TruncationBox& box) {
  if (i >= box.num_species()) throw Error(ErrorCode::Dim, "species index out of range");
  std::vector<std::map<std::size_t, double>> cols(box.size());
  for (std::size_t n = 0; n < box.size(); ++n) {
    const auto ni = box.state(n)[i];
    if (ni > 0) cols[n][n - box.stride(i)] = static_cast<double>(ni);
  }
  return SparseOperator::from_columns(box, cols);
}

/// a_i†: z^n ↦ z^{n + e_i}; states at the cap map to zero.
inline SparseOperator creation(std::size_t i, const TruncationBox& box) {
  if (i >= box.num_species()) throw Error(ErrorCode::Dim, "species index out of range");
  std::vector<std::map<std::size_t, double>> cols(box.size());
  for (std::size_t n = 0; n < box.size(); ++n)
    if (box.state(n)[i] < box.cap(i)) cols[n][n + box.stride(i)] = 1.0;
  return SparseOperator::from_columns(box, cols);
}

/// N_i = a_i† a_i, diagonal with eigenvalue n_i.
inline SparseOperator number_operator(std::size_t i, const TruncationBox& box) {
  if (i >= box.num_species()) throw Error(ErrorCode::Dim, "species index out of range");
  std::vector<double> diag(box.size());
  for (std::size_t n = 0; n < box.size(); ++n) diag[n] = static_cast<double>(box.state(n)[i]);
  return diagonal_operator(box, diag);
}

/// O = Σ w_i N_i, diagonal with eigenvalue w·n.
inline SparseOperator linear_observable(const ConservedVector& w, const TruncationBox& box) {
  if (w.weights.size() != box.num_species()) throw Error(ErrorCode::Dim, "weight vector length mismatch");
  std::vector<double> diag(box.size());
  for (std::size_t n = 0; n < box.size(); ++n) diag[n] = static_cast<double>(w.dot(box.state(n)));
  return diagonal_operator(box, diag);
}

/// H = Σ_τ r(τ) (a†^{t(τ)} − a†^{s(τ)}) a^{s(τ)} under the truncate-pair policy.
inline SparseOperator hamiltonian(const Network& net, const TruncationBox& box) {
  if (box.num_species() != net.num_species()) throw Error(ErrorCode::Dim, "box does not match network");
  const std::size_t k = net.num_species();
  std::vector<std::map<std::size_t, double>> cols(box.size());
  std::vector<std::int64_t> target(k);
  for (std::size_t col = 0; col < box.size(); ++col) {
    const auto n = box.state(col);
    for (const auto& t : net.transitions()) {
      const double rate = t.rate * falling_factorial(n, t.input);
      if (rate == 0.0) continue;
      for (std::size_t i = 0; i < k; ++i) target[i] = n[i] - t.input[i] + t.output[i];
      if (!box.contains(target)) continue;
      cols[col][box.index(target)] += rate;
      cols[col][col] -= rate;
    }
  }
  return SparseOperator::from_columns(box, cols);
}

struct CoherentState {
  MixedState state;
  double tail_mass = 0.0;  // Poisson mass outside the box
};

inline double log_poisson(double mean, std::int64_t n) {
  if (mean == 0.0) return n == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  const auto nd = static_cast<double>(n);
  return nd * std::log(mean) - mean - std::lgamma(nd + 1.0);
}

/// Ψ_c = e^{c·z} / e^{c}: independent Poisson(c_i) weights, not renormalized.
inline CoherentState coherent_state(std::span<const double> c, const TruncationBox& box) {
  if (c.size() != box.num_species()) throw Error(ErrorCode::Dim, "state length does not match box");
  for (double ci : c)
    if (ci < 0.0 || !std::isfinite(ci)) throw Error(ErrorCode::NegC, "coherent state needs c >= 0");
  const std::size_t k = c.size();
  std::vector<std::vector<double>> log_marginal(k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::int64_t n = 0; n <= box.cap(i); ++n) log_marginal[i].push_back(log_poisson(c[i], n));

  CoherentState out{{box, std::vector<double>(box.size())}, 0.0};
  for (std::size_t idx = 0; idx < box.size(); ++idx) {
    const auto n = box.state(idx);
    double lw = 0.0;
    for (std::size_t i = 0; i < k; ++i) lw += log_marginal[i][static_cast<std::size_t>(n[i])];
    out.state.weights[idx] = std::exp(lw);
  }
  // Tail via marginals: 1 − Π_i P(N_i ≤ cap_i) avoids cancellation in the flat sum.
  double inside = 1.0;
  for (std::size_t i = 0; i < k; ++i) {
    double m = 0.0;
    for (double lw : log_marginal[i]) m += std::exp(lw);
    inside *= std::min(1.0, m);
  }
  out.tail_mass = std::max(0.0, 1.0 - inside);
  return out;
}

/// RK4 integration of dΨ/dt = HΨ up to time t with step dt (last step shortened).
inline MixedState evolve_master(const SparseOperator& h, const MixedState& psi0, double t, double dt) {
  if (!(psi0.box == h.box())) throw Error(ErrorCode::Box, "state and operator boxes differ");
  if (t < 0.0) throw Error(ErrorCode::Dt, "negative evolution time");
  const double diag = h.max_abs_diagonal();
  if (!(dt > 0.0) || (diag > 0.0 && dt > 0.5 / diag))
    throw Error(ErrorCode::Dt, "dt must satisfy 0 < dt <= 0.5 / max|H_nn| = " + std::to_string(diag > 0 ? 0.5 / diag : 0));

  MixedState psi = psi0;
  if (t == 0.0) return psi;
  const std::size_t dim = psi.weights.size();
  const auto steps = static_cast<std::size_t>(std::ceil(t / dt - 1e-9));
  std::vector<double> tmp(dim);
  double now = 0.0;
  for (std::size_t s = 1; s <= steps; ++s) {
    const double next = s == steps ? t : static_cast<double>(s) * dt;
    const double step = next - now;
    auto& x = psi.weights;
    const auto k1 = h.apply(x);
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = x[i] + step / 2 * k1[i];
    const auto k2 = h.apply(tmp);
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = x[i] + step / 2 * k2[i];
    const auto k3 = h.apply(tmp);
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = x[i] + step * k3[i];
    const auto k4 = h.apply(tmp);
    for (std::size_t i = 0; i < dim; ++i) {
      x[i] += step / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
      if (x[i] < 0.0) {
        if (x[i] < -1e-12) throw Error(ErrorCode::Neg, "probability weight went negative; reduce dt");
        x[i] = 0.0;
      }
    }
    now = next;
  }
  return psi;
}

struct AckResidual {
  double interior_l1 = 0.0;
  double full_l1 = 0.0;
  std::int64_t margin = 0;
  std::size_t interior_states = 0;
  double tail_mass = 0.0;
};

/// ℓ1 norm of HΨ over the whole box and over states at least `margin` below every cap.
inline AckResidual residual_of(const SparseOperator& h, const MixedState& psi, std::int64_t margin) {
  const auto r = h.apply(psi.weights);
  AckResidual out;
  out.margin = margin;
  for (std::size_t idx = 0; idx < r.size(); ++idx) {
    const double a = std::abs(r[idx]);
    out.full_l1 += a;
    if (is_interior(psi.box, psi.box.state(idx), margin)) {
      out.interior_l1 += a;
      ++out.interior_states;
    }
  }
  return out;
}

/// Residual of the coherent state Ψ_c under the network's Hamiltonian.
inline AckResidual ack_residual(const Network& net, std::span<const double> c, const TruncationBox& box) {
  check_state(net, c);
  const auto coherent = coherent_state(c, box);
  auto out = residual_of(hamiltonian(net, box), coherent.state, interior_margin(net));
  out.tail_mass = coherent.tail_mass;
  return out;
}

/// Restricts ψ to the sector {n : w·n = λ} and renormalizes to total mass 1.
inline MixedState project_onto(const MixedState& psi, const ConservedVector& w, std::int64_t lambda) {
  if (w.weights.size() != psi.box.num_species()) throw Error(ErrorCode::Dim, "weight vector length mismatch");
  MixedState out = psi;
  double mass = 0.0;
  for (std::size_t idx = 0; idx < out.weights.size(); ++idx) {
    if (w.dot(psi.box.state(idx)) != lambda) out.weights[idx] = 0.0;
    mass += out.weights[idx];
  }
  if (!(mass > 0.0))
    throw Error(ErrorCode::EmptySector, "no probability mass where w.n = " + std::to_string(lambda));
  for (auto& v : out.weights) v /= mass;
  return out;
}

/// Probability mass per sector value λ = w·n.
inline std::map<std::int64_t, double> sector_masses(const MixedState& psi, const ConservedVector& w) {
  std::map<std::int64_t, double> out;
  for (std::size_t idx = 0; idx < psi.weights.size(); ++idx) out[w.dot(psi.box.state(idx))] += psi.weights[idx];
  return out;
}

struct SymmetryResult {
  MixedState state;
  ClassicalState predicted_c;
};

/// exp(sO) Ψ_c renormalized over the box, with O = Σ w_i N_i; should equal the
/// coherent state at c'_i = e^{s w_i} c_i.
inline SymmetryResult apply_symmetry(std::span<const double> c, const ConservedVector& w, double s,
                                     const TruncationBox& box) {
  if (w.weights.size() != box.num_species()) throw Error(ErrorCode::Dim, "weight vector length mismatch");
  const auto coherent = coherent_state(c, box);
  double max_exponent = 0.0;
  for (std::size_t i = 0; i < box.num_species(); ++i)
    max_exponent += std::abs(s * static_cast<double>(w.weights[i])) * static_cast<double>(box.cap(i));
  if (max_exponent > std::log(std::numeric_limits<double>::max()))
    throw Error(ErrorCode::Overflow, "exp(s O) exceeds the double range on this box");

  // Work in logs so the rescaled weights stay representable before renormalizing.
  std::vector<double> logw(box.size());
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t idx = 0; idx < box.size(); ++idx) {
    const double base = coherent.state.weights[idx];
    logw[idx] = base > 0.0 ? std::log(base) + s * static_cast<double>(w.dot(box.state(idx)))
                           : -std::numeric_limits<double>::infinity();
    peak = std::max(peak, logw[idx]);
  }
  SymmetryResult out{{box, std::vector<double>(box.size(), 0.0)}, {}};
  double total = 0.0;
  for (std::size_t idx = 0; idx < box.size(); ++idx) {
    out.state.weights[idx] = std::exp(logw[idx] - peak);
    total += out.state.weights[idx];
  }
  for (auto& v : out.state.weights) v /= total;
  for (std::size_t i = 0; i < c.size(); ++i)
    out.predicted_c.push_back(std::exp(s * static_cast<double>(w.weights[i])) * c[i]);
  return out;
}

/// Dense column-major copy; only for small boxes (≤ 4096 states).
inline std::vector<double> to_dense(const SparseOperator& op) {
  if (op.dim() > 4096) throw Error(ErrorCode::Box, "dense fallback limited to 4096 states");
  std::vector<double> d(op.dim() * op.dim(), 0.0);
  op.for_each([&](std::size_t r, std::size_t c, double v) { d[c * op.dim() + r] = v; });
  return d;
}

}  // namespace crn
