#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "memgate/energy.hpp"

using namespace memgate;

TEST(Divider, Fraction) {
  EXPECT_DOUBLE_EQ(q_div(1e6, 1e6), 0.5);
  EXPECT_DOUBLE_EQ(q_div(4e6, 6e6), 0.6);
  EXPECT_THROW(q_div(0.0, 1e6), DomainError);
  EXPECT_THROW(q_div(1e6, -1.0), DomainError);
  EXPECT_DOUBLE_EQ(r_parallel(2e6, 2e6), 1e6);
}

TEST(Divider, ModelValidation) {
  EXPECT_NO_THROW(make_divider(1e6, 1e6, 10e-15, 1.65, 0.0));
  DividerModel bad{1e6, 1e6, 10e-15, 1.65, 0.0, 1.0};
  EXPECT_THROW(bad.validate(), DomainError);
  EXPECT_THROW(make_divider(1e6, 1e6, 0.0, 1.65, 0.0), DomainError);
}

TEST(Charge, HandComputedCase) {
  // R1 = R2 = 1 Mohm, C = 10 fF, 0 -> 0.825 V, l = 1.
  const auto m = make_divider(1e6, 1e6, 10e-15, 1.65, 0.0);
  const auto r = q_tot(m, 1.0);
  const double tau = 0.5e6 * 10e-15;
  EXPECT_NEAR(r.t_set, tau, 1e-24);
  EXPECT_NEAR(r.q_leak, tau * 1.65 / 2e6, 1e-30);
  EXPECT_NEAR(r.q_charge, 10e-15 * 0.825 * 0.5 * (1.0 - std::exp(-1.0)), 1e-30);
  EXPECT_NEAR(r.q_ideal, 10e-15 * 0.825, 1e-30);
}

TEST(Charge, TwoFormsAgree) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> lr(3.0, 8.0), ll(0.0, 10.0), lv(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double r1 = std::pow(10.0, lr(rng)), r2 = std::pow(10.0, lr(rng));
    const double vdd = 0.5 + 3.0 * lv(rng);
    const auto m = make_divider(r1, r2, 1e-15 + 1e-13 * lv(rng), vdd, vdd * lv(rng));
    const auto r = q_tot(m, ll(rng));
    EXPECT_LE(std::abs(r.q_tot - r.q_tot_alt), 1e-9 * std::max(std::abs(r.q_tot), 1e-300));
  }
}

TEST(Charge, SettledOutputHasNoChargingTerm) {
  const auto m = make_divider(2e6, 2e6, 10e-15, 1.65, 0.825);
  const auto r = q_tot(m, 4.0);
  EXPECT_EQ(r.q_charge, 0.0);
  EXPECT_GT(r.q_leak, 0.0);
}

TEST(Charge, SettlingFraction) {
  const auto r = q_tot(make_divider(1e6, 1e6, 10e-15, 1.65, 0.0), 4.0);
  EXPECT_NEAR(r.settling_fraction, std::exp(-4.0), 1e-15);
  EXPECT_LE(r.settling_fraction, 0.02);
  EXPECT_THROW(q_tot(make_divider(1e6, 1e6, 10e-15, 1.65, 0.0), -1.0), DomainError);
}

TEST(Charge, FallingOutputIsMirroredForTheBound) {
  const auto r = q_tot(make_divider(6e6, 4e6, 10e-15, 1.65, 1.65), 4.0);
  EXPECT_TRUE(r.mirrored);
  EXPECT_LT(r.q_charge, 0.0);
  EXPECT_LE(1.65 * r.q_tot, r.e_upper);
}

TEST(Transient, MatchesClosedForm) {
  for (auto [r1, r2, v1] : {std::tuple{1e6, 1e6, 0.0}, {4e6, 6e6, 0.0}, {6e6, 4e6, 1.65}, {1e4, 1e7, 0.3}}) {
    const auto m = make_divider(r1, r2, 10e-15, 1.65, v1);
    for (double l : {1.0, 4.0, 8.0}) {
      const auto r = q_tot(m, l);
      const auto t = transient_oracle(m, l);
      EXPECT_NEAR(t.q_tot, r.q_tot, 1e-3 * std::abs(r.q_tot));
      EXPECT_LE(t.e_dissipated, r.e_upper * (1.0 + 1e-9));
    }
  }
}

TEST(Transient, RejectsCoarseSteps) {
  const auto m = make_divider(1e6, 1e6, 10e-15, 1.65, 0.0);
  EXPECT_THROW(transient_oracle(m, 4.0, 0.01), DomainError);
  EXPECT_EQ(transient_oracle(m, 0.0).q_tot, 0.0);
}

TEST(Toggles, ChargeInToggleUnits) {
  EXPECT_NEAR(e_flip(10e-15, 1.65), 0.5 * 10e-15 * 1.65 * 1.65, 1e-30);
  // 1.25 fC per toggle at 1.65 V.
  EXPECT_NEAR(toggle_equivalents(46e-15, 1.25e-15 / 1.65, 1.65), 36.8, 1e-9);
  EXPECT_THROW(toggle_equivalents(1e-15, 0.0, 1.65), DomainError);
}

TEST(EffectiveDivider, PlateauAndCutoff) {
  const auto c = build_inverter_2t2r(default_pmos(), default_nmos(), make_memristor(4e6),
                                     make_memristor(6e6), 1.65);
  const auto mid = effective_divider(c, 0.8, 10e-15);
  EXPECT_NEAR(mid.v_out_2, solve_output(c, {{"in", 0.8}}), 1e-9);
  EXPECT_GT(mid.r1, 4e6);
  EXPECT_GT(mid.r2, 6e6);
  const auto off = effective_divider(c, 0.0, 10e-15);
  EXPECT_GT(off.v_out_2, 1.64);
  EXPECT_GT(off.r2, 1e11);
  const auto nand = build_nand_4t3r(default_pmos(), default_pmos(), default_nmos(), default_nmos(),
                                    make_memristor(1e6), make_memristor(1e6), make_memristor(1e6), 1.65);
  EXPECT_THROW(effective_divider(nand, 0.5, 10e-15), ShapeError);
}
