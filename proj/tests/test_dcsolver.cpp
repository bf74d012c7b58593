#include <gtest/gtest.h>

#include <cmath>

#include "memgate/dcsolver.hpp"

using namespace memgate;

namespace {

constexpr double kVdd = 1.65;

GateCircuit inverter(double r_up, double r_dn, MosfetParams p = default_pmos(),
                     MosfetParams n = default_nmos()) {
  return build_inverter_2t2r(p, n, make_memristor(r_up), make_memristor(r_dn), kVdd);
}

GateCircuit nand() {
  return build_nand_4t3r(default_pmos(), default_pmos(), default_nmos(), default_nmos(),
                         make_memristor(0.35e6), make_memristor(50e3), make_memristor(0.4e6), kVdd);
}

std::vector<double> full_grid(std::size_t n = 166) { return linear_grid(0.0, kVdd, n); }

void expect_kcl(const GateCircuit& c, const OperatingPoint& op) {
  for (NodeId id : c.unknown_nodes()) EXPECT_LE(std::abs(current_leaving(c, op, id)), 1e-12);
  EXPECT_LE(op.residual_norm, 1e-12);
}

}  // namespace

TEST(SolveDc, RailOutputsWithoutLeakage) {
  auto p = default_pmos(), n = default_nmos();
  p.g_min = n.g_min = 0.0;
  // Without g_min a cut-off device leaves its internal node undetermined,
  // so compare the output only.
  const auto c = inverter(4e6, 6e6, p, n);
  EXPECT_NEAR(solve_output(c, {{"in", 0.0}}), kVdd, 1e-9);
  EXPECT_NEAR(solve_output(c, {{"in", kVdd}}), 0.0, 1e-9);
}

TEST(SolveDc, RailOutputsDiscreteDevices) {
  const auto c = inverter(106e3, 110e3, discrete_pmos(), discrete_nmos());
  EXPECT_NEAR(solve_output(c, {{"in", 0.0}}), kVdd, 1e-6);
  EXPECT_NEAR(solve_output(c, {{"in", kVdd}}), 0.0, 1e-6);
}

TEST(SolveDc, KclHoldsAcrossTheSweep) {
  const auto c = inverter(4e6, 6e6);
  for (double v : full_grid(34)) expect_kcl(c, solve_dc(c, {{"in", v}}));
  const auto g = nand();
  for (double a : {0.0, 0.6, 1.2, kVdd})
    for (double b : {0.0, 0.7, kVdd}) expect_kcl(g, solve_dc(g, {{"a", a}, {"b", b}}));
}

TEST(SolveDc, VoltagesStayInClampRange) {
  const auto c = inverter(4e6, 6e6);
  for (double v : full_grid(34)) {
    const auto op = solve_dc(c, {{"in", v}});
    for (double x : op.node_voltages) {
      EXPECT_GE(x, -0.5);
      EXPECT_LE(x, kVdd + 0.5);
    }
  }
}

TEST(SolveDc, MidPlateauFollowsDivider) {
  const auto c = inverter(4e6, 6e6);
  EXPECT_NEAR(solve_output(c, {{"in", 0.8}}), 0.99, 0.05 * 0.99);
}

TEST(SolveDc, InputChecks) {
  const auto c = inverter(4e6, 6e6);
  EXPECT_THROW(solve_dc(c, {{"in", -0.1}}), RangeError);
  EXPECT_THROW(solve_dc(c, {{"in", 2.0}}), RangeError);
  EXPECT_THROW(solve_dc(c, {}), RangeError);
  EXPECT_THROW(solve_dc(c, {{"in", 0.5}, {"zz", 0.5}}), RangeError);
}

TEST(SolveDc, DeterministicAndGuessIndependent) {
  const auto c = inverter(4e6, 6e6);
  const auto a = solve_dc(c, {{"in", 0.73}});
  const auto b = solve_dc(c, {{"in", 0.73}});
  EXPECT_EQ(a.node_voltages, b.node_voltages);
  const auto seed = solve_dc(c, {{"in", 1.4}});
  EXPECT_NEAR(solve_dc(c, {{"in", 0.73}}, seed).voltage(c.output()), a.voltage(c.output()), 1e-9);
}

TEST(SolveDc, SupplyCurrentMatchesBranches) {
  const auto c = inverter(4e6, 6e6);
  const auto op = solve_dc(c, {{"in", 0.8}});
  EXPECT_NEAR(supply_current(c, op), op.memristor_currents[0], 1e-15);
  EXPECT_NEAR(op.memristor_currents[0], op.memristor_currents[1], 1e-14);
}

TEST(Sweep, TracesAreMonotoneInverters) {
  for (auto [u, d] : {std::pair{4e6, 6e6}, {10e6, 10e6}, {2e6, 18e6}, {18e6, 2e6}}) {
    const auto t = sweep_1d(inverter(u, d), "in", full_grid());
    for (std::size_t i = 1; i < t.output_values.size(); ++i)
      EXPECT_LE(t.output_values[i], t.output_values[i - 1] + 1e-6);
  }
}

TEST(Sweep, WarmStartMatchesColdSolves) {
  const auto c = inverter(4e6, 6e6);
  const auto warm = sweep_1d(c, "in", full_grid(67));
  const auto cold = sweep_1d(c, "in", full_grid(67), {}, "", false);
  for (std::size_t i = 0; i < warm.output_values.size(); ++i)
    EXPECT_NEAR(warm.output_values[i], cold.output_values[i], 1e-9);
}

TEST(Sweep, ReversedGridGivesReversedTrace) {
  const auto c = inverter(4e6, 6e6);
  auto g = full_grid(34);
  const auto fwd = sweep_1d(c, "in", g);
  std::reverse(g.begin(), g.end());
  const auto rev = sweep_1d(c, "in", g);
  for (std::size_t i = 0; i < g.size(); ++i)
    EXPECT_NEAR(fwd.output_values[i], rev.output_values[g.size() - 1 - i], 1e-9);
}

TEST(Sweep, EqualMemristorsCrossMidSupply) {
  auto p = default_pmos();
  p.w = default_nmos().w * default_nmos().k_prime / p.k_prime;
  p.v_th = default_nmos().v_th;
  const auto t = sweep_1d(inverter(10e6, 10e6, p), "in", full_grid());
  bool above = false, below = false;
  for (double v : t.output_values) {
    above |= v > kVdd / 2;
    below |= v < kVdd / 2;
  }
  EXPECT_TRUE(above && below);
}

TEST(Sweep, GridErrors) {
  const auto c = inverter(4e6, 6e6);
  EXPECT_THROW(sweep_1d(c, "in", {}), RangeError);
  EXPECT_THROW(sweep_1d(c, "in", {0.1, 0.1, 0.2}), RangeError);
  EXPECT_THROW(sweep_1d(c, "a", {0.1, 0.2}), RangeError);
  try {
    sweep_1d(c, "in", {0.1, 0.2, 1.9});
    FAIL();
  } catch (const RangeError& e) {
    EXPECT_NE(std::string(e.what()).find("grid index 2"), std::string::npos);
  }
}

TEST(Sweep, HighStatesGiveWiderPlateauThanLowStates) {
  const auto g = full_grid();
  const auto hh = plateau_metrics(
      sweep_1d(inverter(106e3, 110e3, discrete_pmos(), discrete_nmos()), "in", g));
  const auto ll = plateau_metrics(
      sweep_1d(inverter(10.5e3, 11.5e3, discrete_pmos(), discrete_nmos()), "in", g));
  EXPECT_GT(hh.width, ll.width);
}

TEST(Surface, RowsAndReductions) {
  const auto c = nand();
  const auto grid = linear_grid(0.0, kVdd, 12);
  const auto s = surface_2d(c, "a", grid, "b", grid);
  ASSERT_EQ(s.values.size(), grid.size() * grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) EXPECT_NEAR(s.at(0, j), kVdd, 1e-6);
  const auto red = sweep_1d(c, "b", grid, {{"a", kVdd}});
  for (std::size_t j = 0; j < grid.size(); ++j)
    EXPECT_NEAR(s.at(grid.size() - 1, j), red.output_values[j], 1e-3);
}

TEST(Surface, StripProtocolGrid) {
  const auto g = strip_protocol_grid(kVdd);
  const std::vector<double> expect{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.55, 0.6, 0.65, 0.7, 0.75,
                                   0.8, 0.9, 1.0, 1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.65};
  ASSERT_EQ(g.size(), expect.size());
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(g[i], expect[i], 1e-12);
}

TEST(Plateau, StepTraceHasNoWidth) {
  SweepTrace t;
  for (int i = 0; i <= 20; ++i) {
    t.input_values.push_back(0.05 * i);
    t.output_values.push_back(i < 10 ? 1.0 : 0.0);
  }
  EXPECT_DOUBLE_EQ(plateau_metrics(t).width, 0.0);
}

TEST(Plateau, ShortTraceRejected) {
  SweepTrace t{{0.0, 0.1, 0.2, 0.3}, {1.0, 1.0, 0.0, 0.0}, ""};
  EXPECT_THROW(plateau_metrics(t), RangeError);
}

TEST(Plateau, BaselineAltitudeNearDivider) {
  const auto m = plateau_metrics(sweep_1d(inverter(4e6, 6e6), "in", full_grid()));
  EXPECT_NEAR(m.altitude, 0.99, 0.05 * 0.99);
  EXPECT_GT(m.width, 0.1);
  EXPECT_LE(m.width, kVdd);
}

TEST(Plateau, DividerLimitWithLargeMemristors) {
  // Transistor on-resistance here is tens of kohm; 50x that is comfortably met.
  for (auto [u, d] : {std::pair{8e6, 12e6}, {12e6, 8e6}, {5e6, 15e6}}) {
    const auto m = plateau_metrics(sweep_1d(inverter(u, d), "in", full_grid()));
    EXPECT_NEAR(m.altitude, kVdd * d / (u + d), 0.05 * kVdd);
  }
}

TEST(Modality, FamiliesRespectConstraints) {
  const auto r = ratio_fixed_family(4e6, 6e6, {0.5, 1.0, 2.0});
  EXPECT_NO_THROW(r.validate());
  const auto s = sum_fixed_family(20e6, {4e6, 8e6, 12e6, 16e6});
  EXPECT_NO_THROW(s.validate());
  ModalitySpec bad{Modality::sum_fixed, 20e6, {{4e6, 15e6}}};
  EXPECT_THROW(bad.validate(), RangeError);
  EXPECT_THROW((ModalitySpec{Modality::ratio_fixed, 1.0, {}}).validate(), RangeError);
}

TEST(Modality, RatioFixedKeepsAltitudeAndMovesWidth) {
  auto make = [](double u, double d) { return inverter(u, d); };
  const auto res = modality_family(make, ratio_fixed_family(10e6, 10e6, {0.5, 1.0, 2.0}), full_grid());
  ASSERT_EQ(res.size(), 3u);
  for (const auto& p : res) EXPECT_NEAR(p.metrics.altitude, res[1].metrics.altitude, 0.05 * kVdd);
  EXPECT_LE(res[0].metrics.width, res[1].metrics.width);
  EXPECT_LE(res[1].metrics.width, res[2].metrics.width);
  EXPECT_LT(res[0].metrics.width, res[2].metrics.width);
}

TEST(Modality, SumFixedAltitudeFallsAsRupGrows) {
  auto make = [](double u, double d) { return inverter(u, d); };
  const auto res = modality_family(make, sum_fixed_family(20e6, {4e6, 8e6, 12e6, 16e6}), full_grid());
  for (std::size_t i = 1; i < res.size(); ++i) EXPECT_LT(res[i].metrics.altitude, res[i - 1].metrics.altitude);
  for (const auto& p : res) EXPECT_NEAR(p.metrics.width, res[0].metrics.width, 0.1 * kVdd);
}

TEST(Modality, SinglePointFamily) {
  auto make = [](double u, double d) { return inverter(u, d); };
  EXPECT_EQ(modality_family(make, ratio_fixed_family(4e6, 6e6, {1.0}), full_grid(34)).size(), 1u);
}

TEST(General, SourceResistorDegeneratesThePullUp) {
  // A resistor on the source side lowers V_GS, so moving it off the drain
  // side changes the curve: the equivalence only holds for two-terminal
  // elements.
  const auto f = fixed_resistor();
  const auto r = make_memristor(2e6), r3 = make_memristor(3e6);
  const auto drain = build_general_inverter_4r(default_pmos(), default_nmos(), f, r, r3, f, kVdd);
  const auto source = build_general_inverter_4r(default_pmos(), default_nmos(), r, f, r3, f, kVdd);
  const auto d = solve_output(drain, {{"in", 0.6}});
  const auto s = solve_output(source, {{"in", 0.6}});
  EXPECT_GT(std::abs(d - s), 1e-4);
  EXPECT_LT(s, d);
}
