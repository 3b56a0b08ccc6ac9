#pragma once

// CSV / JSON / coordinate-text exports. Numbers are written in shortest
// round-trip form so repeated runs are byte-identical.

#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "crnkit/fock.hpp"
#include "crnkit/network.hpp"
#include "crnkit/parser.hpp"
#include "crnkit/rate.hpp"
#include "crnkit/ssa.hpp"
#include "crnkit/structure.hpp"

namespace crn::io {

using nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

inline std::string number(double v) { return format_rate(v); }

inline ordered_json to_json(const std::vector<std::int64_t>& v) {
  auto a = ordered_json::array();
  for (auto x : v) a.push_back(x);
  return a;
}

inline ordered_json structure_json(const StructureReport& r) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["num_complexes"] = r.num_complexes;
  auto cx = ordered_json::array();
  for (const auto& c : r.complexes) cx.push_back(to_json(c.values()));
  j["complexes"] = cx;
  j["linkage_classes"] = r.linkage_classes;
  j["weakly_reversible"] = r.weakly_reversible;
  j["stoich_rank"] = r.stoichiometric_rank;
  j["deficiency"] = r.deficiency;
  auto basis = ordered_json::array();
  for (const auto& w : r.conserved_basis) basis.push_back(to_json(w.weights));
  j["conserved_basis"] = basis;
  return j;
}

inline ordered_json balance_json(const ComplexBalanceReport& r) {
  ordered_json j;
  j["complex_balanced"] = r.balanced;
  j["max_abs_residual"] = r.max_abs_residual;
  j["threshold"] = r.threshold;
  auto arr = ordered_json::array();
  for (const auto& e : r.complexes) {
    ordered_json row;
    row["complex"] = to_json(e.complex.values());
    row["production"] = e.production;
    row["consumption"] = e.consumption;
    row["residual"] = e.residual;
    arr.push_back(row);
  }
  j["complexes"] = arr;
  return j;
}

inline std::string header(const std::vector<std::string>& species, const std::string& first, const std::string& last) {
  std::string h = first;
  for (const auto& s : species) {
    if (!h.empty()) h += ",";
    h += s;
  }
  if (!last.empty()) h += (h.empty() ? "" : ",") + last;
  return h + "\n";
}

/// `t,<species...>`
inline std::string trajectory_csv(const Network& net, const Trajectory& traj) {
  std::string out = header(net.species(), "t", "");
  for (std::size_t r = 0; r < traj.times.size(); ++r) {
    out += number(traj.times[r]);
    for (double x : traj.states[r]) out += "," + number(x);
    out += "\n";
  }
  return out;
}

inline std::string jump_trajectory_csv(const Network& net, const JumpTrajectory& traj) {
  std::string out = header(net.species(), "t", "");
  for (std::size_t r = 0; r < traj.times.size(); ++r) {
    out += number(traj.times[r]);
    for (auto n : traj.states[r]) out += "," + std::to_string(n);
    out += "\n";
  }
  return out;
}

/// `<species...>,count,frequency`
inline std::string histogram_csv(const Network& net, const Histogram& h) {
  std::string out = header(net.species(), "", "count,frequency");
  for (const auto& [n, c] : h.counts()) {
    for (auto v : n) out += std::to_string(v) + ",";
    out += std::to_string(c) + "," + number(h.frequency(n)) + "\n";
  }
  return out;
}

/// `<species...>,probability`, one row per state with weight above 1e-15.
inline std::string mixed_state_csv(const Network& net, const MixedState& psi) {
  std::string out = header(net.species(), "", "probability");
  for (std::size_t idx = 0; idx < psi.weights.size(); ++idx) {
    if (!(psi.weights[idx] > 1e-15)) continue;
    for (auto v : psi.box.state(idx)) out += std::to_string(v) + ",";
    out += number(psi.weights[idx]) + "\n";
  }
  return out;
}

/// Coordinate format: `caps c1 c2 ...` then `row col value` per stored entry.
inline std::string operator_text(const SparseOperator& op) {
  std::ostringstream os;
  os << "caps";
  for (auto c : op.box().caps()) os << ' ' << c;
  os << '\n';
  op.for_each([&](std::size_t r, std::size_t c, double v) { os << r << ' ' << c << ' ' << number(v) << '\n'; });
  return os.str();
}

}  // namespace crn::io
