#pragma once

// Texel: an analogue inverter (pull-up r0, pull-down r1) whose mid-node drives
// a current-output read-out. The texel sources most current when its input
// makes the mid-node sit on the read-out switch point; r1 sets that input.
// An array sums texel currents into a common load resistor.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "memgate/dcsolver.hpp"
#include "memgate/devices.hpp"
#include "memgate/errors.hpp"
#include "memgate/netlist.hpp"
#include "memgate/readout.hpp"

namespace memgate {

struct TexelConfig {
  MosfetParams pmos;
  MosfetParams nmos;
  MemristorState r0;  // pull-up, held fixed
  MemristorState r1;  // pull-down, the stored value
  ReadoutParams readout;
  double vdd = 1.65;

  void validate() const {
    pmos.validate();
    nmos.validate();
    r0.validate();
    r1.validate();
    readout.validate();
    if (!(vdd > 0.0)) throw RangeError("texel: vdd must be > 0");
    if (std::abs(readout.vdd - vdd) > 1e-12) throw RangeError("texel: read-out vdd differs");
  }

  // r0 sits between the supply and the pMOS source, so it degenerates the
  // pull-up; r1 sits between the mid-node and the nMOS drain.
  GateCircuit inverter() const {
    return build_general_inverter_4r(pmos, nmos, r0, fixed_resistor(), r1, fixed_resistor(), vdd);
  }
};

// Discrete-transistor sizing for the texel stage (nMOS 100 um, pMOS 400 um)
// with a 4 kohm degeneration resistor; stored states then land near 10-20 kohm.
// The read-out mirrors half of its shoot-through current.
inline TexelConfig default_texel(double r1 = 14.8e3, double vdd = 1.65) {
  TexelConfig t;
  t.nmos = default_nmos();
  t.pmos = default_pmos();
  t.nmos.w = 100.0;
  t.pmos.w = 400.0;
  t.r0 = make_memristor(4e3, 1e3, 1e6);
  t.r1 = make_memristor(r1, 1e3, 1e6);
  t.readout = default_readout(vdd);
  t.readout.mirror_gain = 0.5;
  t.vdd = vdd;
  return t;
}

inline double texel_mid(const TexelConfig& t, double v_in) {
  if (!(v_in >= 0.0 && v_in <= t.vdd)) throw RangeError("texel: v_in outside [0, vdd]");
  return solve_output(t.inverter(), {{"in", v_in}});
}

inline double texel_current(const TexelConfig& t, double v_in) {
  const double v_mid = std::clamp(texel_mid(t, v_in), 0.0, t.vdd);
  return mirrored_current(t.readout, v_mid);
}

// Input at which the mid-node equals the read-out switch point; V_MID falls
// monotonically with v_in, so plain bisection applies.
inline double peak_input(const TexelConfig& t, double tol = 1e-7) {
  t.validate();
  const double v_opt = switch_point(t.readout);
  const auto c = t.inverter();
  auto mid = [&](double v) { return solve_output(c, {{"in", v}}); };
  const double at_lo = mid(0.0), at_hi = mid(t.vdd);
  if (!(v_opt <= at_lo && v_opt >= at_hi)) {
    std::ostringstream os;
    os << "peak_input: switch point " << v_opt << " V outside mid-node range [" << at_hi << ", "
       << at_lo << "] V";
    throw UnreachableTargetError(os.str(), at_hi, at_lo);
  }
  double lo = 0.0, hi = t.vdd;
  while (hi - lo > tol) {
    const double m = 0.5 * (lo + hi);
    if (mid(m) > v_opt) lo = m; else hi = m;
  }
  return 0.5 * (lo + hi);
}

struct TexelArrayConfig {
  std::vector<TexelConfig> texels;
  double r_load = 300e3;
  double vdd = 1.65;

  void validate() const {
    if (texels.empty()) throw RangeError("texel array: no texels");
    if (!(r_load > 0.0)) throw RangeError("texel array: r_load must be > 0");
    for (const auto& t : texels) {
      t.validate();
      if (std::abs(t.vdd - vdd) > 1e-12) throw RangeError("texel array: mixed supplies");
    }
  }
};

inline TexelArrayConfig default_texel_array(double vdd = 1.65) {
  TexelArrayConfig a;
  a.vdd = vdd;
  for (double r : {19.5e3, 14.8e3, 12.7e3, 10.6e3}) a.texels.push_back(default_texel(r, vdd));
  return a;
}

// Chooses r1 for every texel so that its peak input lands on the target.
// Peak input grows with r1, so each texel is a 1-D bisection in log(r1).
inline TexelArrayConfig program_template(const TexelArrayConfig& array,
                                         const std::vector<double>& targets,
                                         double tol = 1e-5) {
  array.validate();
  if (targets.size() != array.texels.size())
    throw RangeError("program_template: need one target per texel");
  TexelArrayConfig out = array;
  for (std::size_t k = 0; k < out.texels.size(); ++k) {
    TexelConfig t = out.texels[k];
    auto peak_at = [&](double r) {
      TexelConfig probe = t;
      probe.r1 = memristor_program(t.r1, r);
      return peak_input(probe);
    };
    // Fixed point: the current state already hits the target.
    if (std::abs(peak_at(t.r1.resistance) - targets[k]) <= tol) continue;
    double lo = t.r1.r_min, hi = t.r1.r_max;
    const double p_lo = peak_at(lo), p_hi = peak_at(hi);
    if (targets[k] < p_lo - tol || targets[k] > p_hi + tol) {
      std::ostringstream os;
      os << "program_template: texel " << k + 1 << " target " << targets[k]
         << " V outside achievable [" << p_lo << ", " << p_hi << "] V";
      throw UnreachableTargetError(os.str(), p_lo, p_hi);
    }
    for (int it = 0; it < 200; ++it) {
      const double mid = std::sqrt(lo * hi);
      const double p = peak_at(mid);
      if (std::abs(p - targets[k]) <= tol || hi / lo < 1.0 + 1e-12) {
        lo = hi = mid;
        break;
      }
      if (p < targets[k]) lo = mid; else hi = mid;
    }
    t.r1 = memristor_program(t.r1, std::sqrt(lo * hi));
    out.texels[k] = t;
  }
  return out;
}

struct MatchResult {
  double v_out = 0.0;
  std::vector<double> per_texel_current;
  bool clipped = false;
};

inline MatchResult array_match(const TexelArrayConfig& array, const std::vector<double>& inputs) {
  if (inputs.size() != array.texels.size())
    throw RangeError("array_match: need one input per texel");
  MatchResult r;
  double total = 0.0;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const double i = texel_current(array.texels[k], inputs[k]);
    r.per_texel_current.push_back(i);
    total += i;
  }
  const double v = array.r_load * total;
  r.clipped = v > array.vdd;
  r.v_out = std::clamp(v, 0.0, array.vdd);
  return r;
}

}  // namespace memgate
