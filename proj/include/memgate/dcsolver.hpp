#pragma once

// DC operating points by damped Newton on the nodal (KCL) equations, 1-D
// sweeps and 2-D surfaces with continuation, and plateau metrics.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "memgate/devices.hpp"
#include "memgate/errors.hpp"
#include "memgate/netlist.hpp"

namespace memgate {

using InputMap = std::map<std::string, double>;

struct SolverOptions {
  double residual_tol = 1e-12;  // A, per node
  double step_tol = 1e-9;       // V, last Newton update once the residual is met
  double step_clamp = 0.1;      // V per iteration
  int max_iterations = 200;
  double clamp_margin = 0.5;  // node voltages stay within [-margin, vdd + margin]
};

struct OperatingPoint {
  std::vector<double> node_voltages;        // indexed by NodeId, fixed nodes included
  std::vector<double> transistor_currents;  // drain -> source, circuit order
  std::vector<double> memristor_currents;   // a -> b, circuit order
  double residual_norm = 0.0;               // max |KCL residual| over unknown nodes
  int iterations = 0;
  bool used_fallback = false;

  double voltage(NodeId id) const { return node_voltages.at(id); }
};

namespace detail {

struct Assembly {
  Eigen::VectorXd f;  // net current leaving each unknown node
  Eigen::MatrixXd j;  // df/dv
};

// unknown[node] is the row of an unknown node, or -1 for fixed potentials.
inline void assemble(const GateCircuit& c, const std::vector<double>& v,
                     const std::vector<int>& unknown, Assembly& out, bool with_jacobian) {
  const Eigen::Index n = static_cast<Eigen::Index>(
      std::count_if(unknown.begin(), unknown.end(), [](int r) { return r >= 0; }));
  out.f.setZero(n);
  if (with_jacobian) out.j.setZero(n, n);
  for (const auto& t : c.transistors()) {
    const auto e = mosfet_eval<double>(t.params, v[t.gate], v[t.source], v[t.drain]);
    const NodeId term[3] = {t.gate, t.source, t.drain};
    const double grad[3] = {e.d_vg, e.d_vs, e.d_vd};
    const int rd = unknown[t.drain], rs = unknown[t.source];
    if (rd >= 0) out.f[rd] += e.current;
    if (rs >= 0) out.f[rs] -= e.current;
    if (!with_jacobian) continue;
    for (int k = 0; k < 3; ++k) {
      const int col = unknown[term[k]];
      if (col < 0) continue;
      if (rd >= 0) out.j(rd, col) += grad[k];
      if (rs >= 0) out.j(rs, col) -= grad[k];
    }
  }
  for (const auto& m : c.memristors()) {
    const double g = m.state.conductance();
    const double i = (v[m.a] - v[m.b]) * g;
    const int ra = unknown[m.a], rb = unknown[m.b];
    if (ra >= 0) out.f[ra] += i;
    if (rb >= 0) out.f[rb] -= i;
    if (!with_jacobian) continue;
    if (ra >= 0) {
      out.j(ra, ra) += g;
      if (rb >= 0) out.j(ra, rb) -= g;
    }
    if (rb >= 0) {
      out.j(rb, rb) += g;
      if (ra >= 0) out.j(rb, ra) -= g;
    }
  }
}

struct NewtonResult {
  bool converged = false;
  double residual = std::numeric_limits<double>::infinity();
  int iterations = 0;
};

// Damped Newton over the nodes flagged in `unknown`; everything else in `v`
// is held fixed. Updates `v` in place.
inline NewtonResult newton(const GateCircuit& c, std::vector<double>& v,
                           const std::vector<int>& unknown, const SolverOptions& opt) {
  const double lo = -opt.clamp_margin, hi = c.vdd() + opt.clamp_margin;
  std::vector<NodeId> rows;
  for (NodeId i = 0; i < unknown.size(); ++i)
    if (unknown[i] >= 0) rows.push_back(i);

  NewtonResult res;
  Assembly a;
  std::vector<double> trial = v;
  for (int it = 0; it < opt.max_iterations; ++it) {
    assemble(c, v, unknown, a, true);
    const double resid = a.f.size() ? a.f.cwiseAbs().maxCoeff() : 0.0;
    res.residual = resid;
    res.iterations = it;
    if (a.f.size() == 0) {
      res.converged = true;
      return res;
    }
    Eigen::VectorXd dx = a.j.completeOrthogonalDecomposition().solve(-a.f);
    if (!dx.allFinite()) break;
    const double biggest = dx.cwiseAbs().maxCoeff();
    if (resid <= opt.residual_tol && biggest <= opt.step_tol) {
      // The remaining update is tiny; taking it leaves an error of order its square.
      for (std::size_t r = 0; r < rows.size(); ++r)
        v[rows[r]] = std::clamp(v[rows[r]] + dx[static_cast<Eigen::Index>(r)], lo, hi);
      res.converged = true;
      return res;
    }
    if (biggest > opt.step_clamp) dx *= opt.step_clamp / biggest;

    // Backtrack on the residual 2-norm; a Newton direction always descends.
    const double norm0 = a.f.norm();
    double alpha = 1.0;
    Assembly probe;
    for (int halving = 0; halving < 30; ++halving) {
      trial = v;
      for (std::size_t r = 0; r < rows.size(); ++r)
        trial[rows[r]] = std::clamp(v[rows[r]] + alpha * dx[static_cast<Eigen::Index>(r)], lo, hi);
      assemble(c, trial, unknown, probe, false);
      if (probe.f.norm() <= (1.0 - 1e-4 * alpha) * norm0 || resid <= opt.residual_tol) break;
      alpha *= 0.5;
    }
    v.swap(trial);
  }
  assemble(c, v, unknown, a, false);
  res.residual = a.f.size() ? a.f.cwiseAbs().maxCoeff() : 0.0;
  res.iterations = opt.max_iterations;
  res.converged = res.residual <= opt.residual_tol;
  return res;
}

inline void check_inputs(const GateCircuit& c, const InputMap& inputs) {
  for (const auto& name : c.input_names()) {
    auto it = inputs.find(name);
    if (it == inputs.end()) throw RangeError("solve_dc: missing input '" + name + "'");
    const double x = it->second;
    if (!std::isfinite(x) || x < 0.0 || x > c.vdd())
      throw RangeError("solve_dc: input '" + name + "' = " + std::to_string(x) +
                       " V outside [0, vdd]");
  }
  for (const auto& [name, _] : inputs)
    if (!c.has_input(name)) throw RangeError("solve_dc: circuit has no input '" + name + "'");
}

}  // namespace detail

// Net current leaving `node` into the devices attached to it.
inline double current_leaving(const GateCircuit& c, const OperatingPoint& op, NodeId node) {
  double i = 0.0;
  for (std::size_t k = 0; k < c.transistors().size(); ++k) {
    const auto& t = c.transistors()[k];
    if (t.drain == node) i += op.transistor_currents[k];
    if (t.source == node) i -= op.transistor_currents[k];
  }
  for (std::size_t k = 0; k < c.memristors().size(); ++k) {
    const auto& m = c.memristors()[k];
    if (m.a == node) i += op.memristor_currents[k];
    if (m.b == node) i -= op.memristor_currents[k];
  }
  return i;
}

// Current drawn from the supply rail.
inline double supply_current(const GateCircuit& c, const OperatingPoint& op) {
  return current_leaving(c, op, c.rail(NodeKind::rail_vdd));
}

inline OperatingPoint solve_dc(const GateCircuit& c, const InputMap& inputs,
                               const std::optional<OperatingPoint>& guess = std::nullopt,
                               const SolverOptions& opt = {}) {
  detail::check_inputs(c, inputs);
  const auto& nodes = c.nodes();
  std::vector<double> v(nodes.size(), 0.5 * c.vdd());
  std::vector<int> unknown(nodes.size(), -1);
  int rows = 0;
  for (NodeId i = 0; i < nodes.size(); ++i) {
    switch (nodes[i].kind) {
      case NodeKind::rail_vdd: v[i] = c.vdd(); break;
      case NodeKind::rail_gnd: v[i] = 0.0; break;
      case NodeKind::input: v[i] = inputs.at(nodes[i].name); break;
      default:
        unknown[i] = rows++;
        if (guess && guess->node_voltages.size() == nodes.size())
          v[i] = std::clamp(guess->node_voltages[i], -opt.clamp_margin,
                            c.vdd() + opt.clamp_margin);
    }
  }

  auto result = detail::newton(c, v, unknown, opt);
  bool fallback = false;
  if (!result.converged) {
    // Bisection on the output potential: with the output pinned, the rest of
    // the network is solved by Newton and the net current leaving the output
    // grows monotonically with its potential.
    fallback = true;
    const NodeId out = c.output();
    std::vector<int> inner = unknown;
    inner[out] = -1;
    int r = 0;
    for (auto& x : inner)
      if (x >= 0) x = r++;
    std::vector<double> w = v;
    double best = result.residual;
    auto net_out = [&](double vo) {
      w[out] = vo;
      auto ir = detail::newton(c, w, inner, opt);
      best = std::min(best, ir.residual);
      if (!ir.converged) throw ConvergenceError("solve_dc: inner solve failed during bisection", best);
      detail::Assembly a;
      std::vector<int> only_out(nodes.size(), -1);
      only_out[out] = 0;
      detail::assemble(c, w, only_out, a, false);
      return a.f[0];
    };
    double lo = -opt.clamp_margin, hi = c.vdd() + opt.clamp_margin;
    double flo = net_out(lo);
    double fhi = net_out(hi);
    if (flo > 0.0 || fhi < 0.0)
      throw ConvergenceError("solve_dc: output current not bracketed", best);
    for (int k = 0; k < 200 && hi - lo > 1e-15; ++k) {
      const double mid = 0.5 * (lo + hi);
      const double fm = net_out(mid);
      if (fm < 0.0) lo = mid; else hi = mid;
    }
    net_out(0.5 * (lo + hi));
    v = w;
    result = detail::newton(c, v, unknown, opt);
    if (!result.converged)
      throw ConvergenceError("solve_dc: no convergence after bisection fallback",
                             std::min(best, result.residual));
  }

  OperatingPoint op;
  op.node_voltages = v;
  op.residual_norm = result.residual;
  op.iterations = result.iterations;
  op.used_fallback = fallback;
  for (const auto& t : c.transistors())
    op.transistor_currents.push_back(mosfet_current(t.params, v[t.gate], v[t.source], v[t.drain]));
  for (const auto& m : c.memristors())
    op.memristor_currents.push_back(memristor_current(m.state, v[m.a], v[m.b]));
  return op;
}

inline double solve_output(const GateCircuit& c, const InputMap& inputs) {
  return solve_dc(c, inputs).voltage(c.output());
}

struct SweepTrace {
  std::vector<double> input_values;
  std::vector<double> output_values;
  std::string config_label;
};

inline void check_grid(const std::vector<double>& grid, const char* who) {
  if (grid.empty()) throw RangeError(std::string(who) + ": empty grid");
  if (grid.size() < 2) return;
  const bool up = grid[1] > grid[0];
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (up ? !(grid[i] > grid[i - 1]) : !(grid[i] < grid[i - 1]))
      throw RangeError(std::string(who) + ": grid is not strictly monotone");
  }
}

// One solve per grid point; by default each point starts from the previous
// solution (continuation). Errors carry the failing grid index.
inline SweepTrace sweep_1d(const GateCircuit& c, const std::string& port,
                           const std::vector<double>& grid, const InputMap& fixed = {},
                           std::string label = {}, bool warm_start = true,
                           const std::optional<OperatingPoint>& seed = std::nullopt) {
  check_grid(grid, "sweep_1d");
  if (!c.has_input(port)) throw RangeError("sweep_1d: circuit has no input '" + port + "'");
  SweepTrace trace;
  trace.config_label = std::move(label);
  InputMap in = fixed;
  std::optional<OperatingPoint> prev = seed;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    in[port] = grid[i];
    try {
      auto op = solve_dc(c, in, warm_start ? prev : std::nullopt);
      trace.input_values.push_back(grid[i]);
      trace.output_values.push_back(op.voltage(c.output()));
      prev = std::move(op);
    } catch (const ConvergenceError& e) {
      throw ConvergenceError(std::string(e.what()) + " at grid index " + std::to_string(i),
                             e.best_residual());
    } catch (const RangeError& e) {
      throw RangeError(std::string(e.what()) + " at grid index " + std::to_string(i));
    }
  }
  return trace;
}

struct Surface {
  std::vector<double> grid_a;
  std::vector<double> grid_b;
  std::vector<double> values;  // row-major: values[i * grid_b.size() + j]

  double at(std::size_t i, std::size_t j) const { return values.at(i * grid_b.size() + j); }
};

// Strip-by-strip: input A held at each grid value while B is swept. Every row
// is warm-started along B; the first point of a row starts from the previous
// row's first point.
inline Surface surface_2d(const GateCircuit& c, const std::string& port_a,
                          const std::vector<double>& grid_a, const std::string& port_b,
                          const std::vector<double>& grid_b, const InputMap& fixed = {}) {
  check_grid(grid_a, "surface_2d (a)");
  check_grid(grid_b, "surface_2d (b)");
  Surface s{grid_a, grid_b, {}};
  s.values.reserve(grid_a.size() * grid_b.size());
  InputMap in = fixed;
  std::optional<OperatingPoint> row_seed;
  for (std::size_t i = 0; i < grid_a.size(); ++i) {
    in[port_a] = grid_a[i];
    std::optional<OperatingPoint> prev = row_seed;
    for (std::size_t j = 0; j < grid_b.size(); ++j) {
      in[port_b] = grid_b[j];
      try {
        auto op = solve_dc(c, in, prev);
        s.values.push_back(op.voltage(c.output()));
        if (j == 0) row_seed = op;
        prev = std::move(op);
      } catch (const ConvergenceError& e) {
        throw ConvergenceError(std::string(e.what()) + " at (" + std::to_string(i) + "," +
                                   std::to_string(j) + ")",
                               e.best_residual());
      }
    }
  }
  return s;
}

// Coarse steps over the whole supply range with a finer band; the end point
// vdd is always included.
inline std::vector<double> strip_protocol_grid(double vdd, double coarse = 0.1, double fine = 0.05,
                                               double fine_lo = 0.5, double fine_hi = 0.8) {
  std::vector<double> g;
  auto add = [&](double x) {
    x = std::round(x * 1e9) / 1e9;
    if (x >= 0.0 && x <= vdd + 1e-12) g.push_back(std::min(x, vdd));
  };
  const int nc = static_cast<int>(std::floor(vdd / coarse + 1e-9));
  for (int k = 0; k <= nc; ++k) add(k * coarse);
  const int nf = static_cast<int>(std::floor((fine_hi - fine_lo) / fine + 1e-9));
  for (int k = 0; k <= nf; ++k) add(fine_lo + k * fine);
  add(vdd);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end(), [](double a, double b) { return std::abs(a - b) < 1e-9; }),
          g.end());
  return g;
}

inline std::vector<double> linear_grid(double start, double stop, std::size_t points) {
  if (points < 2) throw RangeError("linear_grid: need at least two points");
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i)
    g[i] = start + (stop - start) * static_cast<double>(i) / static_cast<double>(points - 1);
  g.back() = stop;
  return g;
}

struct PlateauMetrics {
  double altitude = 0.0;
  double width = 0.0;
  double altitude_input = 0.0;
};

inline constexpr double kPlateauSlope = 0.25;

// Altitude: output at the interior point of minimum |dV_out/dV_in| among
// points whose output lies away from the two saturated rail levels (inner 90%
// of the output swing). Width: extent of the connected run of points around
// it with |slope| <= 0.25.
inline PlateauMetrics plateau_metrics(const SweepTrace& trace) {
  const auto& x = trace.input_values;
  const auto& y = trace.output_values;
  const std::size_t n = x.size();
  if (n < 5 || y.size() != n) throw RangeError("plateau_metrics: need at least 5 points");
  std::vector<double> slope(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) slope[i] = (y[i + 1] - y[i - 1]) / (x[i + 1] - x[i - 1]);

  const auto [ymin_it, ymax_it] = std::minmax_element(y.begin(), y.end());
  const double span = *ymax_it - *ymin_it;
  const double band_lo = *ymin_it + 0.05 * span, band_hi = *ymax_it - 0.05 * span;

  std::optional<std::size_t> best;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (y[i] < band_lo || y[i] > band_hi) continue;
    if (!best || std::abs(slope[i]) < std::abs(slope[*best])) best = i;
  }
  PlateauMetrics m;
  if (!best) {
    // Step-like trace: no interior level at all.
    std::size_t steep = 1;
    for (std::size_t i = 1; i + 1 < n; ++i)
      if (std::abs(slope[i]) > std::abs(slope[steep])) steep = i;
    m.altitude = y[steep];
    m.altitude_input = x[steep];
    m.width = 0.0;
    return m;
  }
  const std::size_t c = *best;
  m.altitude = y[c];
  m.altitude_input = x[c];
  if (std::abs(slope[c]) > kPlateauSlope) return m;
  std::size_t lo = c, hi = c;
  while (lo > 1 && std::abs(slope[lo - 1]) <= kPlateauSlope) --lo;
  while (hi + 2 < n && std::abs(slope[hi + 1]) <= kPlateauSlope) ++hi;
  m.width = std::abs(x[hi] - x[lo]);
  return m;
}

enum class Modality { ratio_fixed, sum_fixed };

struct ResistancePair {
  double r_up;
  double r_dn;
};

struct ModalitySpec {
  Modality mode;
  double c;  // R_UP/R_DN (ratio_fixed) or R_UP + R_DN in ohm (sum_fixed)
  std::vector<ResistancePair> points;

  void validate() const {
    if (points.empty()) throw RangeError("modality: no points");
    for (const auto& p : points) {
      if (!(p.r_up > 0.0 && p.r_dn > 0.0)) throw RangeError("modality: non-positive resistance");
      const double got = mode == Modality::ratio_fixed ? p.r_up / p.r_dn : p.r_up + p.r_dn;
      if (std::abs(got - c) > 1e-9 * std::abs(c))
        throw RangeError("modality: point violates the family constraint");
    }
  }
};

// (k * r_up, k * r_dn) for every scale factor k.
inline ModalitySpec ratio_fixed_family(double r_up, double r_dn, const std::vector<double>& scales) {
  ModalitySpec s{Modality::ratio_fixed, r_up / r_dn, {}};
  for (double k : scales) s.points.push_back({k * r_up, k * r_dn});
  return s;
}

inline ModalitySpec sum_fixed_family(double total, const std::vector<double>& r_up_values) {
  ModalitySpec s{Modality::sum_fixed, total, {}};
  for (double r : r_up_values) s.points.push_back({r, total - r});
  return s;
}

using InverterTemplate = std::function<GateCircuit(double r_up, double r_dn)>;

struct ModalityPoint {
  ResistancePair point;
  PlateauMetrics metrics;
  SweepTrace trace;
};

inline std::vector<ModalityPoint> modality_family(const InverterTemplate& make,
                                                  const ModalitySpec& spec,
                                                  const std::vector<double>& grid,
                                                  const std::string& port = "in") {
  spec.validate();
  std::vector<ModalityPoint> out;
  for (const auto& p : spec.points) {
    const GateCircuit c = make(p.r_up, p.r_dn);
    auto trace = sweep_1d(c, port, grid);
    auto m = plateau_metrics(trace);
    out.push_back({p, m, std::move(trace)});
  }
  return out;
}

}  // namespace memgate
