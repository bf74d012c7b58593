#pragma once

// Compact device models used by the DC solver: a level-1 square-law MOSFET
// with channel-length modulation and a minimum drain-source conductance, and
// an ohmic memristor whose resistance is programmed between solves.

#include <cmath>
#include <sstream>
#include <string>

#include "memgate/errors.hpp"

namespace memgate {

enum class Polarity { n, p };

struct MosfetParams {
  Polarity polarity = Polarity::n;
  double v_th = 0.5;        // V, magnitude
  double k_prime = 170e-6;  // A/V^2
  double w = 1.0;           // um
  double l = 3.5;           // um
  double lambda = 0.05;     // 1/V
  double g_min = 1e-12;     // S

  double aspect() const { return w / l; }
  double beta() const { return k_prime * aspect(); }

  void validate() const {
    if (!(v_th > 0.0)) throw RangeError("mosfet: v_th must be > 0");
    if (!(k_prime > 0.0)) throw RangeError("mosfet: k_prime must be > 0");
    if (!(w > 0.0) || !(l > 0.0)) throw RangeError("mosfet: w and l must be > 0");
    if (!std::isfinite(aspect())) throw RangeError("mosfet: W/L is not finite");
    if (!(lambda >= 0.0)) throw RangeError("mosfet: lambda must be >= 0");
    if (!(g_min >= 0.0)) throw RangeError("mosfet: g_min must be >= 0");
  }

  friend bool operator==(const MosfetParams&, const MosfetParams&) = default;
};

// Default transistors: 0.35 um-class square-law parameters with the baseline
// sizing W1 = 1 um / L1 = 3.5 um (nMOS) and W2 = 12 um / L2 = 3.5 um (pMOS).
inline MosfetParams default_nmos() {
  return {Polarity::n, 0.5, 170e-6, 1.0, 3.5, 0.05, 1e-12};
}

inline MosfetParams default_pmos() {
  return {Polarity::p, 0.65, 58e-6, 12.0, 3.5, 0.05, 1e-12};
}

// Discrete-transistor preset: same process, both devices 100x wider. Needed
// when memristor states sit in the 10-100 kohm range.
inline MosfetParams discrete_nmos() {
  auto p = default_nmos();
  p.w *= 100.0;
  return p;
}

inline MosfetParams discrete_pmos() {
  auto p = default_pmos();
  p.w *= 100.0;
  return p;
}

// Same parameters, opposite polarity.
inline MosfetParams mirrored(MosfetParams p) {
  p.polarity = p.polarity == Polarity::n ? Polarity::p : Polarity::n;
  return p;
}

// Drain-to-source channel current and its partials with respect to the gate,
// source and drain potentials.
template <class T>
struct MosfetEval {
  T current{};
  T d_vg{};
  T d_vs{};
  T d_vd{};
};

namespace detail {

// Forward-biased (v_ds >= 0) square law. Returns I and dI/dv_ov, dI/dv_ds.
template <class T>
void square_law(T beta, T lambda, T v_ov, T v_ds, T& i, T& di_ov, T& di_ds) {
  if (v_ov <= T(0)) {
    i = di_ov = di_ds = T(0);
    return;
  }
  const T clm = T(1) + lambda * v_ds;
  if (v_ds < v_ov) {
    const T core = v_ov * v_ds - v_ds * v_ds / T(2);
    i = beta * core * clm;
    di_ov = beta * v_ds * clm;
    di_ds = beta * (v_ov - v_ds) * clm + beta * core * lambda;
  } else {
    const T core = v_ov * v_ov / T(2);
    i = beta * core * clm;
    di_ov = beta * v_ov * clm;
    di_ds = beta * core * lambda;
  }
}

// nMOS evaluation with source/drain symmetry; the terminal at the lower
// potential acts as the source.
template <class T>
MosfetEval<T> eval_ntype(const MosfetParams& p, T vg, T vs, T vd) {
  const T beta = static_cast<T>(p.beta());
  const T lambda = static_cast<T>(p.lambda);
  const T vth = static_cast<T>(p.v_th);
  MosfetEval<T> e;
  T i, di_ov, di_ds;
  if (vd >= vs) {
    square_law(beta, lambda, vg - vs - vth, vd - vs, i, di_ov, di_ds);
    e.current = i;
    e.d_vg = di_ov;
    e.d_vs = -di_ov - di_ds;
    e.d_vd = di_ds;
  } else {
    square_law(beta, lambda, vg - vd - vth, vs - vd, i, di_ov, di_ds);
    e.current = -i;
    e.d_vg = -di_ov;
    e.d_vd = di_ov + di_ds;
    e.d_vs = -di_ds;
  }
  const T gmin = static_cast<T>(p.g_min);
  e.current += gmin * (vd - vs);
  e.d_vd += gmin;
  e.d_vs -= gmin;
  return e;
}

}  // namespace detail

// Current flowing into the drain and out of the source. pMOS devices are
// evaluated by reflection: I_p(vg, vs, vd) = -I_n(-vg, -vs, -vd).
template <class T = double>
MosfetEval<T> mosfet_eval(const MosfetParams& p, T v_g, T v_s, T v_d) {
  if (p.polarity == Polarity::n) return detail::eval_ntype<T>(p, v_g, v_s, v_d);
  auto e = detail::eval_ntype<T>(p, -v_g, -v_s, -v_d);
  // d/dv of -I_n(-v) is +I_n'(-v)
  e.current = -e.current;
  return e;
}

template <class T = double>
T mosfet_current(const MosfetParams& p, T v_g, T v_s, T v_d) {
  return mosfet_eval<T>(p, v_g, v_s, v_d).current;
}

struct Conductances {
  double d_vg;
  double d_vs;
  double d_vd;
};

inline Conductances mosfet_conductances(const MosfetParams& p, double v_g, double v_s,
                                        double v_d) {
  const auto e = mosfet_eval<double>(p, v_g, v_s, v_d);
  return {e.d_vg, e.d_vs, e.d_vd};
}

struct MemristorState {
  double resistance = 10e3;  // ohm
  double r_min = 100.0;
  double r_max = 100e6;
  double read_voltage_ref = 0.2;  // V, the read-out bias used to characterise states

  void validate() const {
    if (!(r_min > 0.0)) throw RangeError("memristor: r_min must be > 0");
    if (!(r_min <= r_max)) throw RangeError("memristor: r_min must be <= r_max");
    if (resistance < r_min || resistance > r_max) {
      std::ostringstream os;
      os << "memristor: resistance " << resistance << " outside [" << r_min << ", " << r_max
         << "]";
      throw RangeError(os.str());
    }
  }

  double conductance() const { return 1.0 / resistance; }

  friend bool operator==(const MemristorState&, const MemristorState&) = default;
};

inline MemristorState make_memristor(double r, double r_min = 100.0, double r_max = 100e6) {
  MemristorState m{r, r_min, r_max, 0.2};
  m.validate();
  return m;
}

// Stand-in for "no memristor": a non-programmable 1 ohm link.
inline constexpr double kResistanceFloor = 1.0;

inline MemristorState fixed_resistor(double r = kResistanceFloor) {
  return MemristorState{r, r, r, 0.2};
}

inline MemristorState memristor_program(const MemristorState& m, double target) {
  if (target < m.r_min) {
    std::ostringstream os;
    os << "memristor: target " << target << " ohm below r_min " << m.r_min;
    throw RangeError(os.str());
  }
  if (target > m.r_max) {
    std::ostringstream os;
    os << "memristor: target " << target << " ohm above r_max " << m.r_max;
    throw RangeError(os.str());
  }
  MemristorState out = m;
  out.resistance = target;
  return out;
}

// Ohmic branch current from terminal a to terminal b.
inline double memristor_current(const MemristorState& m, double v_a, double v_b) {
  return (v_a - v_b) / m.resistance;
}

}  // namespace memgate
