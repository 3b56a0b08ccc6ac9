#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "CLI11.hpp"
#include "crnkit/crnkit.hpp"

namespace crn::cli {
namespace {

using io::ordered_json;

struct UsageError {
  std::string message;
};

// Parse diagnostics were already printed; exit 1 without another message.
struct AlreadyReported {};

struct Options {
  std::string input;
  std::string out;
  double tol = 1e-9;
  std::string caps;
  std::uint64_t seed = 42;
  double t_end = 10.0;
  double dt = 0.0;
  // per-subcommand
  std::string c;
  std::string x0;
  std::string n0;
  std::string method = "rk4";
  double output_interval = 0.0;
  bool histogram = false;
  double burn_in = 50.0;
  std::size_t samples = 100'000;
  double interval = 1.0;
  std::optional<double> symmetry_s;
  std::vector<std::int64_t> lambdas;
  std::string operator_out;
};

std::vector<double> parse_reals(const std::string& flag, const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string token = text.substr(pos, comma - pos);
    double v = 0.0;
    auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (token.empty() || res.ec != std::errc{} || res.ptr != token.data() + token.size())
      throw UsageError{flag + ": cannot parse '" + token + "' as a number"};
    out.push_back(v);
    pos = comma + 1;
  }
  return out;
}

std::vector<std::int64_t> parse_counts(const std::string& flag, const std::string& text) {
  std::vector<std::int64_t> out;
  for (double v : parse_reals(flag, text)) {
    if (v < 0 || v != std::floor(v)) throw UsageError{flag + ": expected nonnegative integers"};
    out.push_back(static_cast<std::int64_t>(v));
  }
  return out;
}

std::vector<double> require_state(const Network& net, const std::string& flag, const std::string& text) {
  if (text.empty()) throw UsageError{flag + " is required"};
  auto v = parse_reals(flag, text);
  if (v.size() != net.num_species())
    throw UsageError{flag + ": expected " + std::to_string(net.num_species()) + " values"};
  return v;
}

TruncationBox box_for(const Options& o, const Network& net, std::span<const double> c) {
  if (o.caps.empty()) return default_box(c, interior_margin(net));
  auto caps = parse_counts("--caps", o.caps);
  if (caps.size() == 1 && net.num_species() > 1) caps.assign(net.num_species(), caps[0]);
  if (caps.size() != net.num_species())
    throw UsageError{"--caps: expected 1 or " + std::to_string(net.num_species()) + " values"};
  for (auto cap : caps)
    if (cap < 1) throw UsageError{"--caps: caps must be >= 1"};
  return TruncationBox(caps);
}

Network load(const Options& o, std::ostream& err) {
  std::ifstream in(o.input);
  if (!in) throw UsageError{"cannot read '" + o.input + "'"};
  std::stringstream buf;
  buf << in.rdbuf();
  auto result = parse_network(buf.str());
  for (const auto& d : result.diagnostics) err << o.input << ":" << d.to_string() << "\n";
  if (!result.ok()) throw AlreadyReported{};
  return std::move(*result.network);
}

ordered_json real_array(std::span<const double> v) {
  auto a = ordered_json::array();
  for (double x : v) a.push_back(x);
  return a;
}

void emit(const Options& o, std::ostream& out, const std::string& text) {
  if (o.out.empty() || o.out == "-") {
    out << text;
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw UsageError{"--out: cannot write '" + o.out + "'"};
  f << text;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

// --------------------------------------------------------------------------

int cmd_parse(const Options& o, std::ostream& out, std::ostream& err) {
  emit(o, out, format_network(load(o, err)) + "\n");
  return 0;
}

int cmd_analyze(const Options& o, std::ostream& out, std::ostream& err) {
  const auto net = load(o, err);
  auto j = io::structure_json(analyze_structure(net));
  auto species = ordered_json::array();
  for (const auto& s : net.species()) species.push_back(s);
  j["species"] = species;
  emit(o, out, dump(j));
  return 0;
}

int cmd_rate(const Options& o, std::ostream& out, std::ostream& err) {
  const auto net = load(o, err);
  const auto x0 = require_state(net, "--x0", o.x0);
  RateOptions ro;
  if (o.method == "rk45")
    ro.method = RateMethod::Rk45Adaptive;
  else if (o.method != "rk4")
    throw UsageError{"--method: expected rk4 or rk45"};
  ro.step = o.dt;
  ro.output_interval = o.output_interval;
  emit(o, out, io::trajectory_csv(net, integrate_rate(net, x0, o.t_end, ro)));
  return 0;
}

int cmd_equilibrium(const Options& o, std::ostream& out, std::ostream& err) {
  const auto net = load(o, err);
  const auto x0 = require_state(net, "--x0", o.x0);
  const auto c = find_equilibrium(net, x0, o.tol);
  ordered_json j;
  j["schema_version"] = io::kSchemaVersion;
  j["x0"] = real_array(x0);
  j["equilibrium"] = real_array(c);
  j["rate_field_inf_norm"] = inf_norm(rate_vector_field(net, c));
  j["complex_balanced"] = is_complex_balanced(net, c, std::max(o.tol, 1e-8));
  emit(o, out, dump(j));
  return 0;
}

int cmd_master(const Options& o, std::ostream& out, std::ostream& err) {
  const auto net = load(o, err);
  MixedState psi0;
  TruncationBox box;
  if (!o.c.empty()) {
    const auto c = require_state(net, "--c", o.c);
    box = box_for(o, net, c);
    psi0 = coherent_state(c, box).state;
  } else {
    const auto n0 = parse_counts("--n0", o.n0.empty() ? throw UsageError{"--n0 or --c is required"} : o.n0);
    if (n0.size() != net.num_species()) throw UsageError{"--n0: wrong number of values"};
    std::vector<double> as_real(n0.begin(), n0.end());
    box = box_for(o, net, as_real);
    psi0 = MixedState::pure(box, CountVector(n0));
  }
  const auto h = hamiltonian(net, box);
  if (!o.operator_out.empty()) {
    std::ofstream f(o.operator_out);
    if (!f) throw UsageError{"--operator-out: cannot write '" + o.operator_out + "'"};
    f << io::operator_text(h);
  }
  const double diag = h.max_abs_diagonal();
  const double dt = o.dt > 0.0 ? o.dt : (diag > 0.0 ? std::min(0.01, 0.4 / diag) : 0.01);
  emit(o, out, io::mixed_state_csv(net, evolve_master(h, psi0, o.t_end, dt)));
  return 0;
}

int cmd_ack(const Options& o, std::ostream& out, std::ostream& err) {
  const auto net = load(o, err);
  const auto c = require_state(net, "--c", o.c);
  const auto box = box_for(o, net, c);
  const auto balance = complex_balance(net, c, o.tol);
  const auto res = ack_residual(net, c, box);
  ordered_json j;
  j["schema_version"] = io::kSchemaVersion;
  j["c"] = real_array(c);
  j["caps"] = io::to_json(box.caps());
  j["complex_balanced"] = balance.balanced;
  j["interior_residual_l1"] = res.interior_l1;
  j["full_residual_l1"] = res.full_l1;
  j["margin"] = res.margin;
  j["interior_states"] = res.interior_states;
  j["tail_mass"] = res.tail_mass;
  j["balance"] = io::balance_json(balance);
  emit(o, out, dump(j));
  return balance.balanced ? 0 : 1;
}

int cmd_ssa(const Options& o, std::ostream& out, std::ostream& err) {
  const auto net = load(o, err);
  if (o.n0.empty()) throw UsageError{"--n0 is required"};
  const auto n0 = parse_counts("--n0", o.n0);
  if (n0.size() != net.num_species()) throw UsageError{"--n0: wrong number of values"};
  if (o.histogram) {
    SamplingPlan plan{o.burn_in, o.samples, o.interval};
    emit(o, out, io::histogram_csv(net, stationary_histogram(net, CountVector(n0), plan, o.seed)));
  } else {
    emit(o, out, io::jump_trajectory_csv(net, simulate(net, CountVector(n0), o.t_end, o.seed)));
  }
  return 0;
}

int cmd_noether(const Options& o, std::ostream& out, std::ostream& err) {
  const auto net = load(o, err);
  const auto basis = conserved_quantities(net);
  std::vector<double> c = o.c.empty() ? std::vector<double>(net.num_species(), 1.0) : require_state(net, "--c", o.c);
  const auto box = box_for(o, net, c);
  const auto h = hamiltonian(net, box);

  ordered_json j;
  j["schema_version"] = io::kSchemaVersion;
  j["caps"] = io::to_json(box.caps());
  bool all_commute = true;
  auto conserved = ordered_json::array();
  for (const auto& w : basis) {
    const double worst = commutator(h, linear_observable(w, box)).max_abs_entry();
    const bool ok = worst <= 1e-14;
    all_commute = all_commute && ok;
    ordered_json row;
    row["weights"] = io::to_json(w.weights);
    row["commutator_max_abs"] = worst;
    row["commutes"] = ok;
    conserved.push_back(row);
  }
  j["conserved"] = conserved;
  j["all_commute"] = all_commute;

  if (!o.c.empty() && !basis.empty()) {
    const auto& w = basis.front();
    const double s = o.symmetry_s.value_or(std::log(2.0));
    const auto sym = apply_symmetry(c, w, s, box);
    const auto expected = coherent_state(sym.predicted_c, box).state;
    const double mass = expected.total();
    double worst = 0.0;
    for (std::size_t idx = 0; idx < box.size(); ++idx) {
      const double e = expected.weights[idx] / mass;
      if (e > 0.0 && is_interior(box, box.state(idx), interior_margin(net)))
        worst = std::max(worst, std::abs(sym.state.weights[idx] - e) / e);
    }
    ordered_json sj;
    sj["weights"] = io::to_json(w.weights);
    sj["s"] = s;
    sj["c"] = real_array(c);
    sj["predicted_c"] = real_array(sym.predicted_c);
    sj["max_rel_error_interior"] = worst;
    j["symmetry"] = sj;

    auto projections = ordered_json::array();
    const auto coherent = coherent_state(c, box).state;
    for (auto lambda : o.lambdas) {
      const auto projected = project_onto(coherent, w, lambda);
      const auto res = residual_of(h, projected, interior_margin(net));
      ordered_json pj;
      pj["lambda"] = lambda;
      pj["interior_residual_l1"] = res.interior_l1;
      pj["full_residual_l1"] = res.full_l1;
      projections.push_back(pj);
    }
    j["projections"] = projections;
  }
  emit(o, out, dump(j));
  return all_commute ? 0 : 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"crnkit: mass-action reaction network engine"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("input", o.input, "network file (.crn)")->required();
    sub->add_option("--out", o.out, "output path (default stdout)");
    sub->add_option("--tol", o.tol, "tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--caps", o.caps, "truncation caps N[,N...]");
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--t-end", o.t_end, "end time")->check(CLI::PositiveNumber);
    sub->add_option("--dt", o.dt, "time step")->check(CLI::PositiveNumber);
  };

  std::vector<std::pair<CLI::App*, int (*)(const Options&, std::ostream&, std::ostream&)>> commands;
  auto add = [&](const char* name, const char* help, auto fn) {
    auto* sub = app.add_subcommand(name, help);
    common(sub);
    commands.emplace_back(sub, fn);
    return sub;
  };

  add("parse", "validate and print canonical form", cmd_parse);
  add("analyze", "structure report (JSON)", cmd_analyze);
  auto* rate = add("rate", "integrate the rate equation (CSV)", cmd_rate);
  rate->add_option("--x0", o.x0, "initial concentrations a,b,...");
  rate->add_option("--method", o.method, "rk4 | rk45");
  rate->add_option("--output-interval", o.output_interval, "time between CSV rows (0 = every step)");
  auto* eq = add("equilibrium", "find a rate-equation equilibrium (JSON)", cmd_equilibrium);
  eq->add_option("--x0", o.x0, "initial concentrations a,b,...");
  auto* master = add("master", "evolve the master equation (CSV distribution)", cmd_master);
  master->add_option("--n0", o.n0, "initial pure state");
  master->add_option("--c", o.c, "initial coherent state");
  master->add_option("--operator-out", o.operator_out, "write the Hamiltonian in coordinate format");
  auto* ack = add("ack", "complex balance + coherent-state residual certificate (JSON)", cmd_ack);
  ack->add_option("--c", o.c, "classical state a,b,...");
  auto* ssa = add("ssa", "Gillespie simulation (CSV)", cmd_ssa);
  ssa->add_option("--n0", o.n0, "initial counts");
  ssa->add_flag("--histogram", o.histogram, "emit a stationary histogram instead of a trajectory");
  ssa->add_option("--burn-in", o.burn_in, "discarded initial time")->check(CLI::NonNegativeNumber);
  ssa->add_option("--samples", o.samples, "number of snapshots")->check(CLI::PositiveNumber);
  ssa->add_option("--interval", o.interval, "time between snapshots")->check(CLI::PositiveNumber);
  auto* noether = add("noether", "commutator, symmetry and projection checks (JSON)", cmd_noether);
  noether->add_option("--c", o.c, "complex-balanced state for the demos");
  noether->add_option("--s", o.symmetry_s, "symmetry parameter (default ln 2)");
  noether->add_option("--lambda", o.lambdas, "sector values to project onto")->delimiter(',');

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    for (const auto& [sub, fn] : commands)
      if (sub->parsed()) return fn(o, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.message << "\n";
    return 2;
  } catch (const AlreadyReported&) {
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace crn::cli
