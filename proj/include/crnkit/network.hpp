#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "crnkit/error.hpp"

namespace crn {

/// Dense vector of nonnegative species counts in the network's species order.
/// Used both for complexes (reactant/product multisets) and for pure states.
class CountVector {
 public:
  using value_type = std::int64_t;

  CountVector() = default;
  explicit CountVector(std::size_t k) : counts_(k, 0) {}
  explicit CountVector(std::vector<value_type> counts) : counts_(std::move(counts)) { check(); }
  CountVector(std::initializer_list<value_type> counts) : counts_(counts) { check(); }

  std::size_t size() const noexcept { return counts_.size(); }
  bool empty() const noexcept { return counts_.empty(); }
  value_type operator[](std::size_t i) const { return counts_[i]; }

  void set(std::size_t i, value_type v) {
    if (v < 0) throw Error(ErrorCode::Dim, "negative entry in CountVector");
    counts_[i] = v;
  }
  void add(std::size_t i, value_type v) { set(i, counts_[i] + v); }

  auto begin() const noexcept { return counts_.begin(); }
  auto end() const noexcept { return counts_.end(); }
  const std::vector<value_type>& values() const noexcept { return counts_; }

  bool is_zero() const {
    return std::all_of(counts_.begin(), counts_.end(), [](value_type v) { return v == 0; });
  }
  value_type total() const {
    value_type s = 0;
    for (auto v : counts_) s += v;
    return s;
  }
  value_type max_entry() const {
    value_type m = 0;
    for (auto v : counts_) m = std::max(m, v);
    return m;
  }

  friend bool operator==(const CountVector&, const CountVector&) = default;
  friend auto operator<=>(const CountVector& a, const CountVector& b) { return a.counts_ <=> b.counts_; }

 private:
  void check() const {
    for (auto v : counts_)
      if (v < 0) throw Error(ErrorCode::Dim, "negative entry in CountVector");
  }

  std::vector<value_type> counts_;
};

/// Signed net change t(τ) − s(τ).
inline std::vector<std::int64_t> difference(const CountVector& to, const CountVector& from) {
  std::vector<std::int64_t> d(to.size());
  for (std::size_t i = 0; i < to.size(); ++i) d[i] = to[i] - from[i];
  return d;
}

/// Π_i n_i (n_i − 1) ··· (n_i − s_i + 1): ordered ways to pick s_i of the n_i instances.
inline double falling_factorial(const CountVector& n, const CountVector& s) {
  double f = 1.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (n[i] < s[i]) return 0.0;
    for (std::int64_t j = 0; j < s[i]; ++j) f *= static_cast<double>(n[i] - j);
  }
  return f;
}

struct Transition {
  CountVector input;
  CountVector output;
  double rate = 1.0;
  std::string label;

  bool is_self_loop() const { return input == output; }

  friend bool operator==(const Transition&, const Transition&) = default;
};

/// A stochastic Petri net: ordered species plus rated transitions.
/// Immutable once constructed; the constructor enforces the structural invariants.
class Network {
 public:
  Network() = default;
  Network(std::vector<std::string> species, std::vector<Transition> transitions)
      : species_(std::move(species)), transitions_(std::move(transitions)) {
    std::unordered_set<std::string> seen;
    for (const auto& s : species_) {
      if (s.empty()) throw Error(ErrorCode::Syntax, "empty species name");
      if (!seen.insert(s).second) throw Error(ErrorCode::Syntax, "duplicate species '" + s + "'");
    }
    for (std::size_t j = 0; j < transitions_.size(); ++j) {
      const auto& t = transitions_[j];
      if (t.input.size() != species_.size() || t.output.size() != species_.size())
        throw Error(ErrorCode::Dim, "transition " + std::to_string(j) + " has wrong complex length");
      if (!(t.rate > 0.0) || !std::isfinite(t.rate))
        throw Error(ErrorCode::Rate, "transition " + std::to_string(j) + " has non-positive rate");
    }
  }

  const std::vector<std::string>& species() const noexcept { return species_; }
  const std::vector<Transition>& transitions() const noexcept { return transitions_; }
  std::size_t num_species() const noexcept { return species_.size(); }
  std::size_t num_transitions() const noexcept { return transitions_.size(); }

  std::optional<std::size_t> species_index(const std::string& name) const {
    auto it = std::find(species_.begin(), species_.end(), name);
    if (it == species_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - species_.begin());
  }

  /// Self-loops are legal but contribute nothing; reported for diagnostics.
  std::vector<std::string> warnings() const {
    std::vector<std::string> out;
    for (std::size_t j = 0; j < transitions_.size(); ++j)
      if (transitions_[j].is_self_loop())
        out.push_back("transition " + std::to_string(j) + " is a self-loop (input equals output)");
    return out;
  }

  /// Largest single-species coefficient over all complexes; the boundary
  /// layer width for truncated operators.
  std::int64_t max_coefficient() const {
    std::int64_t m = 0;
    for (const auto& t : transitions_) m = std::max({m, t.input.max_entry(), t.output.max_entry()});
    return m;
  }

  friend bool operator==(const Network&, const Network&) = default;

 private:
  std::vector<std::string> species_;
  std::vector<Transition> transitions_;
};

/// Deduplicated complexes in lexicographic order.
inline std::vector<CountVector> complexes(const Network& net) {
  std::set<CountVector> set;
  for (const auto& t : net.transitions()) {
    set.insert(t.input);
    set.insert(t.output);
  }
  return {set.begin(), set.end()};
}

struct ComplexEdge {
  std::size_t source;
  std::size_t target;
  std::size_t transition;
  friend bool operator==(const ComplexEdge&, const ComplexEdge&) = default;
};

struct ComplexGraph {
  std::vector<CountVector> vertices;
  std::vector<ComplexEdge> edges;

  std::size_t index_of(const CountVector& c) const {
    auto it = std::lower_bound(vertices.begin(), vertices.end(), c);
    return static_cast<std::size_t>(it - vertices.begin());
  }
};

inline ComplexGraph complex_graph(const Network& net) {
  ComplexGraph g;
  g.vertices = complexes(net);
  g.edges.reserve(net.num_transitions());
  for (std::size_t j = 0; j < net.num_transitions(); ++j) {
    const auto& t = net.transitions()[j];
    g.edges.push_back({g.index_of(t.input), g.index_of(t.output), j});
  }
  return g;
}

/// Row-major dense integer matrix.
struct IntMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::int64_t> data;

  IntMatrix() = default;
  IntMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0) {}

  std::int64_t& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  std::int64_t operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::vector<std::int64_t> column(std::size_t c) const {
    std::vector<std::int64_t> v(rows);
    for (std::size_t r = 0; r < rows; ++r) v[r] = (*this)(r, c);
    return v;
  }

  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;
};

/// k × |T| matrix whose column j is output − input of transition j.
inline IntMatrix stoichiometric_matrix(const Network& net) {
  IntMatrix m(net.num_species(), net.num_transitions());
  for (std::size_t j = 0; j < net.num_transitions(); ++j) {
    const auto& t = net.transitions()[j];
    for (std::size_t i = 0; i < net.num_species(); ++i) m(i, j) = t.output[i] - t.input[i];
  }
  return m;
}

// ---------------------------------------------------------------------------
// Petri net (bipartite) view

struct PetriEdge {
  enum class Direction { SpeciesToTransition, TransitionToSpecies };
  Direction direction;
  std::size_t species;
  std::size_t transition;
  std::int64_t multiplicity;
  friend bool operator==(const PetriEdge&, const PetriEdge&) = default;
};

struct PetriBipartite {
  std::vector<std::string> species;
  std::vector<std::string> transitions;
  std::vector<PetriEdge> edges;

  /// One line per edge: `FROM -> TO xMULT`.
  std::string edge_list() const {
    std::ostringstream os;
    for (const auto& e : edges) {
      if (e.direction == PetriEdge::Direction::SpeciesToTransition)
        os << species[e.species] << " -> " << transitions[e.transition];
      else
        os << transitions[e.transition] << " -> " << species[e.species];
      os << " x" << e.multiplicity << '\n';
    }
    return os.str();
  }
};

inline std::string transition_name(const Network& net, std::size_t j) {
  const auto& label = net.transitions()[j].label;
  return label.empty() ? "t" + std::to_string(j) : label;
}

inline PetriBipartite to_petri_bipartite(const Network& net) {
  PetriBipartite p;
  p.species = net.species();
  for (std::size_t j = 0; j < net.num_transitions(); ++j) p.transitions.push_back(transition_name(net, j));
  for (std::size_t j = 0; j < net.num_transitions(); ++j) {
    const auto& t = net.transitions()[j];
    for (std::size_t i = 0; i < net.num_species(); ++i)
      if (t.input[i] > 0) p.edges.push_back({PetriEdge::Direction::SpeciesToTransition, i, j, t.input[i]});
    for (std::size_t i = 0; i < net.num_species(); ++i)
      if (t.output[i] > 0) p.edges.push_back({PetriEdge::Direction::TransitionToSpecies, i, j, t.output[i]});
  }
  return p;
}

/// The input and output multiplicity functions i, o : S × T → ℕ as k × |T| matrices.
inline std::pair<IntMatrix, IntMatrix> petri_multiplicities(const Network& net) {
  IntMatrix in(net.num_species(), net.num_transitions());
  IntMatrix out(net.num_species(), net.num_transitions());
  for (std::size_t j = 0; j < net.num_transitions(); ++j)
    for (std::size_t i = 0; i < net.num_species(); ++i) {
      in(i, j) = net.transitions()[j].input[i];
      out(i, j) = net.transitions()[j].output[i];
    }
  return {in, out};
}

inline Network from_petri_multiplicities(std::vector<std::string> species, const IntMatrix& in,
                                         const IntMatrix& out, const std::vector<double>& rates,
                                         const std::vector<std::string>& labels = {}) {
  if (in.rows != species.size() || out.rows != species.size() || in.cols != out.cols ||
      rates.size() != in.cols)
    throw Error(ErrorCode::Dim, "Petri multiplicity matrices do not match species/rates");
  std::vector<Transition> ts;
  for (std::size_t j = 0; j < in.cols; ++j) {
    Transition t{CountVector(in.column(j)), CountVector(out.column(j)), rates[j], {}};
    if (j < labels.size()) t.label = labels[j];
    ts.push_back(std::move(t));
  }
  return Network(std::move(species), std::move(ts));
}

}  // namespace crn
