#pragma once

// Read-out stage: a plain CMOS inverter fed from a mirror supply. V_OUT1 is
// the ordinary digitised output; the mirror compares the inverter's
// shoot-through current against a reference (on-target detection) or copies
// it to an output terminal (current output).

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>

#include "memgate/dcsolver.hpp"
#include "memgate/devices.hpp"
#include "memgate/errors.hpp"
#include "memgate/netlist.hpp"

namespace memgate {

struct ReadoutParams {
  MosfetParams pmos;
  MosfetParams nmos;
  double vdd = 1.65;
  double i_ref = 1.2e-6;  // A
  double mirror_gain = 1.0;
  double ambiguity_margin = 0.165;  // V from either rail
  // Optional current-limiting resistors in the inverter's pull-up and
  // pull-down branches; the 1 ohm floor means "not fitted".
  double r_limit_up = kResistanceFloor;
  double r_limit_dn = kResistanceFloor;

  void validate() const {
    pmos.validate();
    nmos.validate();
    if (pmos.polarity != Polarity::p || nmos.polarity != Polarity::n)
      throw RangeError("readout: device polarities swapped");
    if (!(vdd > 0.0)) throw RangeError("readout: vdd must be > 0");
    if (!(i_ref > 0.0)) throw RangeError("readout: i_ref must be > 0");
    if (!(mirror_gain > 0.0)) throw RangeError("readout: mirror_gain must be > 0");
    if (!(ambiguity_margin > 0.0 && ambiguity_margin < vdd / 2.0))
      throw RangeError("readout: ambiguity_margin must lie in (0, vdd/2)");
    if (!(r_limit_up > 0.0 && r_limit_dn > 0.0))
      throw RangeError("readout: limiter resistances must be > 0");
  }
};

// nMOS at the default sizing and a pMOS widened until both devices share the
// same k'W/L, which puts the shoot-through peak on the switch point.
inline ReadoutParams default_readout(double vdd = 1.65) {
  ReadoutParams p;
  p.nmos = default_nmos();
  p.pmos = default_pmos();
  p.pmos.w = p.nmos.w * p.nmos.k_prime / p.pmos.k_prime * (p.pmos.l / p.nmos.l);
  p.vdd = vdd;
  p.ambiguity_margin = 0.1 * vdd;
  return p;
}

inline GateCircuit readout_inverter(const ReadoutParams& p) {
  return build_inverter_2t2r(p.pmos, p.nmos, fixed_resistor(p.r_limit_up),
                             fixed_resistor(p.r_limit_dn), p.vdd);
}

enum class Bit { zero, one, ambiguous };

inline const char* bit_name(Bit b) {
  switch (b) {
    case Bit::zero: return "0";
    case Bit::one: return "1";
    case Bit::ambiguous: return "x";
  }
  return "?";
}

struct DigitizationResult {
  Bit bit = Bit::ambiguous;
  double v_out1 = 0.0;
  double i_shoot = 0.0;
  bool on_target = false;
  double v_out2 = 0.0;
  double i_out = 0.0;
};

// Input level where the read-out inverter sits at mid-supply (bisection).
inline double switch_point(const ReadoutParams& p) {
  p.validate();
  const auto c = readout_inverter(p);
  auto f = [&](double v) { return solve_output(c, {{"in", v}}) - p.vdd / 2.0; };
  double lo = 0.0, hi = p.vdd;
  double flo = f(lo), fhi = f(hi);
  if (flo < 0.0 || fhi > 0.0 || (flo == 0.0 && fhi == 0.0))
    throw ConfigError("switch_point: read-out output never crosses vdd/2");
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

inline DigitizationResult digitize(const ReadoutParams& p, double v_mid) {
  p.validate();
  if (!(v_mid >= 0.0 && v_mid <= p.vdd)) throw RangeError("digitize: v_mid outside [0, vdd]");
  const auto c = readout_inverter(p);
  const auto op = solve_dc(c, {{"in", v_mid}});
  DigitizationResult r;
  r.v_out1 = op.voltage(c.output());
  r.i_shoot = supply_current(c, op);
  if (r.v_out1 >= p.vdd - p.ambiguity_margin) r.bit = Bit::one;
  else if (r.v_out1 <= p.ambiguity_margin) r.bit = Bit::zero;
  else r.bit = Bit::ambiguous;
  r.on_target = r.i_shoot >= p.i_ref;
  r.v_out2 = r.on_target ? 0.0 : p.vdd;
  r.i_out = p.mirror_gain * r.i_shoot;
  return r;
}

inline DigitizationResult on_target(const ReadoutParams& p, double v_mid) { return digitize(p, v_mid); }

inline double mirrored_current(const ReadoutParams& p, double v_mid) {
  return digitize(p, v_mid).i_out;
}

inline double shoot_through(const ReadoutParams& p, double v_mid) {
  return digitize(p, v_mid).i_shoot;
}

struct Window {
  double lo = 0.0;
  double hi = 0.0;
  bool empty = true;
  double width() const { return empty ? 0.0 : hi - lo; }
};

// Input level of maximum shoot-through current, by golden-section search
// around the switch point.
inline double shoot_through_peak(const ReadoutParams& p) {
  const double sp = switch_point(p);
  double a = std::max(0.0, sp - 0.1), b = std::min(p.vdd, sp + 0.1);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = shoot_through(p, x1), f2 = shoot_through(p, x2);
  while (b - a > 1e-9) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = shoot_through(p, x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = shoot_through(p, x1);
    }
  }
  return 0.5 * (a + b);
}

// The contiguous v_mid interval where the shoot-through current reaches
// i_ref. Both edges are found by bisection from the current peak.
inline Window on_target_window(const ReadoutParams& p) {
  p.validate();
  const double peak = shoot_through_peak(p);
  Window w;
  if (shoot_through(p, peak) < p.i_ref) return w;
  auto above = [&](double v) { return shoot_through(p, v) >= p.i_ref; };
  auto edge = [&](double outside, double inside) {
    if (above(outside)) return outside;
    while (std::abs(inside - outside) > 1e-9) {
      const double mid = 0.5 * (inside + outside);
      if (above(mid)) inside = mid; else outside = mid;
    }
    return inside;
  };
  w.lo = edge(0.0, peak);
  w.hi = edge(p.vdd, peak);
  w.empty = false;
  return w;
}

}  // namespace memgate
