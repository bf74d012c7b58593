#include <gtest/gtest.h>

#include "memgate/chain.hpp"

using namespace memgate;

namespace {

GateCircuit inverter() {
  return build_inverter_2t2r(default_pmos(), default_nmos(), make_memristor(4e6), make_memristor(6e6),
                             1.65);
}

GateCircuit nand() {
  return build_nand_4t3r(default_pmos(), default_pmos(), default_nmos(), default_nmos(),
                         make_memristor(3.5e6), make_memristor(0.5e6), make_memristor(4e6), 1.65);
}

}  // namespace

TEST(Chain, DoubleInversion) {
  const auto e = chain(inverter(), inverter(), "in");
  // Megohm memristors turn the 1 pS leakage into microvolts.
  EXPECT_NEAR(e({{"in", 0.0}}), 0.0, 1e-4);
  EXPECT_NEAR(e({{"in", 1.65}}), 1.65, 1e-4);
}

TEST(Chain, IdentitySecondStage) {
  const auto inv = inverter();
  const auto e = chain(as_evaluator(inv), identity_evaluator("x", 1.65), "x");
  for (double v : {0.0, 0.4, 0.8, 1.2, 1.65}) EXPECT_EQ(e({{"in", v}}), solve_output(inv, {{"in", v}}));
}

TEST(Chain, InverterIntoNandInputs) {
  const auto e = chain(inverter(), nand(), "a");
  EXPECT_EQ(e.inputs, (std::vector<std::string>{"in", "b"}));
  // A low input drives A high; the gate then inverts B.
  EXPECT_NEAR(e({{"in", 0.0}, {"b", 1.65}}), solve_output(nand(), {{"a", 1.65}, {"b", 1.65}}), 1e-6);
  EXPECT_THROW(chain(inverter(), nand(), "c"), ShapeError);
}

TEST(Chain, LowADrivesOutputHighForAnyB) {
  // Output stays at the supply whenever the NAND's A input is low enough,
  // whatever B is.
  const auto g = nand();
  for (double a : {0.0, 0.2, 0.4})
    for (int j = 0; j <= 11; ++j) EXPECT_NEAR(solve_output(g, {{"a", a}, {"b", 0.15 * j}}), 1.65, 0.02);
}
