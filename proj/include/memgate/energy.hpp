#pragma once

// Charge and energy bookkeeping for one output transition of an inverter
// reduced to a two-resistor divider (R1 to the supply, R2 to ground) driving
// an output capacitance. The output relaxes exponentially with time constant
// R1||R2 * C_out; l is the settling time in units of that constant.

#include <cmath>
#include <limits>
#include <utility>

#include "memgate/dcsolver.hpp"
#include "memgate/errors.hpp"
#include "memgate/netlist.hpp"

namespace memgate {

inline constexpr double kDefaultOutputCapacitance = 10e-15;  // F

struct DividerModel {
  double r1 = 1e6;      // ohm, supply side
  double r2 = 1e6;      // ohm, ground side
  double c_out = 10e-15;
  double vdd = 1.65;
  double v_out_1 = 0.0;  // V, output before the transition
  double v_out_2 = 0.0;  // V, equilibrium after it (= vdd * q_div)

  double delta_v() const { return v_out_2 - v_out_1; }

  void validate() const {
    if (!(r1 > 0.0 && r2 > 0.0)) throw DomainError("divider: resistances must be > 0");
    if (!(c_out > 0.0)) throw DomainError("divider: c_out must be > 0");
    if (!(vdd > 0.0)) throw DomainError("divider: vdd must be > 0");
    const double expect = vdd * r2 / (r1 + r2);
    if (std::abs(v_out_2 - expect) > 1e-12 * std::abs(expect) + 1e-300)
      throw DomainError("divider: v_out_2 must equal vdd * r2 / (r1 + r2)");
  }
};

inline double q_div(double r1, double r2) {
  if (!(r1 > 0.0) || !(r2 > 0.0)) throw DomainError("q_div: resistances must be > 0");
  return r2 / (r1 + r2);
}

inline double r_parallel(double r1, double r2) { return r1 * r2 / (r1 + r2); }

// Builds a consistent model: the target level follows from the divider.
inline DividerModel make_divider(double r1, double r2, double c_out, double vdd, double v_out_1) {
  DividerModel m{r1, r2, c_out, vdd, v_out_1, vdd * q_div(r1, r2)};
  m.validate();
  return m;
}

// Energy of one full-swing toggle of a digital inverter: C_out * VDD^2 / 2.
inline double e_flip(double c_out, double vdd) {
  if (c_out < 0.0 || vdd < 0.0) throw DomainError("e_flip: arguments must be >= 0");
  return c_out * vdd * vdd / 2.0;
}

struct EnergyReport {
  double q_div = 0.0;
  double r_parallel = 0.0;
  double t_set = 0.0;
  double l = 0.0;
  double q_leak = 0.0;    // C, static current through both branches
  double q_charge = 0.0;  // C, signed charging term
  double q_tot = 0.0;
  double q_tot_alt = 0.0;  // same total, written in terms of q_div only
  double q_ideal = 0.0;    // C_out * dV_out
  double e_upper = 0.0;    // J
  double e_flip_ref = 0.0;
  double settling_fraction = 0.0;  // |V_out(t_set) - V_out,2| / |dV_out| = e^-l
  bool mirrored = false;           // dV_out < 0 was reflected for e_upper
};

// Total charge drawn from the supply while the output settles for l time
// constants, and the upper bound on dissipated energy.
inline EnergyReport q_tot(const DividerModel& m, double l) {
  m.validate();
  if (!(l >= 0.0)) throw DomainError("q_tot: l must be >= 0");
  EnergyReport r;
  r.l = l;
  r.q_div = q_div(m.r1, m.r2);
  r.r_parallel = r_parallel(m.r1, m.r2);
  r.t_set = l * r.r_parallel * m.c_out;
  const double dv = m.delta_v();
  const double settle = -std::expm1(-l);  // 1 - e^-l
  r.q_leak = r.t_set * m.vdd / (m.r1 + m.r2);
  r.q_charge = m.c_out * dv * r.q_div * settle;
  r.q_tot = r.q_leak + r.q_charge;
  r.q_tot_alt = l * m.c_out * m.vdd * r.q_div * (1.0 - r.q_div) + r.q_charge;
  r.q_ideal = m.c_out * dv;
  r.e_flip_ref = e_flip(m.c_out, m.vdd);
  r.settling_fraction = std::exp(-l);

  // The bound is stated for a rising output; a falling one is mirrored.
  r.mirrored = dv < 0.0;
  const double dv_pos = std::abs(dv);
  r.e_upper = r.t_set * m.vdd * m.vdd / (m.r1 + m.r2) + m.vdd * m.c_out * dv_pos * settle;
  return r;
}

inline double e_upper(const DividerModel& m, double l) { return q_tot(m, l).e_upper; }

// Charge expressed in digital output toggles of C_out * VDD each.
inline double toggle_equivalents(double q, double c_out, double vdd) {
  if (!(c_out > 0.0) || !(vdd > 0.0)) throw DomainError("toggle_equivalents: c_out, vdd must be > 0");
  return q / (c_out * vdd);
}

// Reduce a solved inverter-family gate at input v_in to its two effective
// branch resistances. Below 1e-15 A of branch current the cut-off side is
// assigned 1/g_min and the conducting side keeps the observed voltage ratio.
inline DividerModel effective_divider(const GateCircuit& c, double v_in, double c_out,
                                      double v_out_1 = 0.0) {
  if (!is_inverter_family(c.family()))
    throw ShapeError(std::string("effective_divider: expected an inverter, got ") +
                     family_name(c.family()));
  const auto op = solve_dc(c, {{"in", v_in}});
  const double vdd = c.vdd();
  const double vout = op.voltage(c.output());
  const double i = supply_current(c, op);

  double g_floor = std::numeric_limits<double>::infinity();
  for (const auto& t : c.transistors())
    if (t.params.g_min > 0.0) g_floor = std::min(g_floor, t.params.g_min);
  if (!std::isfinite(g_floor)) g_floor = 1e-15;

  const double drop_up = vdd - vout, drop_dn = vout;
  double r1, r2;
  if (std::abs(i) >= 1e-15 && drop_up > 0.0 && drop_dn > 0.0) {
    r1 = drop_up / i;
    r2 = drop_dn / i;
  } else {
    const double r_cut = 1.0 / g_floor;
    const bool up_cut = drop_up >= drop_dn;
    const double drop_cut = std::max(up_cut ? drop_up : drop_dn, 1e-300);
    const double drop_on = std::max(up_cut ? drop_dn : drop_up, 0.0);
    const double r_on = std::max(r_cut * drop_on / drop_cut, kResistanceFloor);
    r1 = up_cut ? r_cut : r_on;
    r2 = up_cut ? r_on : r_cut;
  }
  return make_divider(r1, r2, c_out, vdd, v_out_1);
}

struct TransientResult {
  double q_tot = 0.0;     // C drawn from the supply
  double q_charge = 0.0;  // part of it carried by the capacitor transient
  double e_dissipated = 0.0;  // J burnt in R1 and R2
};

// Trapezoidal integration of the supply current and of the resistive
// dissipation along V_out(t) = V_out,2 - dV * exp(-t / (R1||R2 C_out)).
inline TransientResult transient_oracle(const DividerModel& m, double l, double dt_fraction = 1e-4) {
  m.validate();
  if (!(dt_fraction > 0.0) || dt_fraction > 1e-3)
    throw DomainError("transient_oracle: dt_fraction must be in (0, 1e-3]");
  if (!(l >= 0.0)) throw DomainError("transient_oracle: l must be >= 0");
  const double tau = r_parallel(m.r1, m.r2) * m.c_out;
  const double t_end = l * tau;
  const auto steps = static_cast<long>(std::ceil(l / dt_fraction));
  TransientResult r;
  if (steps == 0) return r;
  const double dt = t_end / static_cast<double>(steps);
  const double dv = m.delta_v();
  auto sample = [&](double t, double& i_vdd, double& i_cap, double& p) {
    const double v = m.v_out_2 - dv * std::exp(-t / tau);
    i_vdd = (m.vdd - v) / m.r1;
    i_cap = (m.v_out_2 - v) / m.r1;
    p = (m.vdd - v) * (m.vdd - v) / m.r1 + v * v / m.r2;
  };
  double i0, c0, p0;
  sample(0.0, i0, c0, p0);
  for (long k = 1; k <= steps; ++k) {
    double i1, c1, p1;
    sample(static_cast<double>(k) * dt, i1, c1, p1);
    r.q_tot += 0.5 * (i0 + i1) * dt;
    r.q_charge += 0.5 * (c0 + c1) * dt;
    r.e_dissipated += 0.5 * (p0 + p1) * dt;
    i0 = i1;
    c0 = c1;
    p0 = p1;
  }
  return r;
}

}  // namespace memgate
