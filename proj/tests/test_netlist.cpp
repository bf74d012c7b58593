#include <gtest/gtest.h>

#include <queue>
#include <set>

#include "memgate/netlist.hpp"

using namespace memgate;

namespace {

GateCircuit baseline_inverter() {
  return build_inverter_2t2r(default_pmos(), default_nmos(), make_memristor(4e6), make_memristor(6e6),
                             1.65);
}

GateCircuit baseline_nand() {
  return build_nand_4t3r(default_pmos(), default_pmos(), default_nmos(), default_nmos(),
                         make_memristor(3.5e6), make_memristor(0.5e6), make_memristor(4e6), 1.65);
}

GeneralNandMemristors seven(double r) {
  const auto m = make_memristor(r);
  return {m, m, m, m, m, m, m};
}

// Is `to` reachable from `from` through conducting elements, skipping the
// memristor named `skip` and never passing through node `avoid`?
bool reachable(const GateCircuit& c, NodeId from, NodeId to, const std::string& skip, NodeId avoid) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (const auto& t : c.transistors()) edges.emplace_back(t.source, t.drain);
  for (const auto& m : c.memristors())
    if (m.name != skip) edges.emplace_back(m.a, m.b);
  std::set<NodeId> seen{from};
  std::queue<NodeId> q;
  q.push(from);
  while (!q.empty()) {
    const auto n = q.front();
    q.pop();
    if (n == to) return true;
    for (auto [a, b] : edges) {
      const NodeId other = a == n ? b : b == n ? a : n;
      if (other != n && other != avoid && seen.insert(other).second) q.push(other);
    }
  }
  return false;
}

}  // namespace

TEST(Builders, ProduceValidCircuits) {
  EXPECT_NO_THROW(baseline_inverter().validate());
  EXPECT_NO_THROW(baseline_nand().validate());
  const auto m = make_memristor(1e6);
  EXPECT_NO_THROW(build_general_inverter_4r(default_pmos(), default_nmos(), m, m, m, m, 1.65));
  EXPECT_NO_THROW(
      build_general_nand_7r(default_pmos(), default_pmos(), default_nmos(), default_nmos(), seven(1e6), 1.65));
}

TEST(Builders, PortsAndFamilies) {
  const auto inv = baseline_inverter();
  EXPECT_EQ(inv.family(), GateFamily::inverter_2t2r);
  EXPECT_EQ(inv.input_names(), std::vector<std::string>{"in"});
  EXPECT_EQ(inv.nodes()[inv.output()].name, "out");
  const auto nand = baseline_nand();
  EXPECT_EQ(nand.input_names(), (std::vector<std::string>{"a", "b"}));
  EXPECT_TRUE(is_nand_family(nand.family()));
  EXPECT_FALSE(is_inverter_family(nand.family()));
}

TEST(Builders, RejectSwappedPolarity) {
  EXPECT_THROW(build_inverter_2t2r(default_nmos(), default_nmos(), make_memristor(1e6),
                                   make_memristor(1e6), 1.65),
               ShapeError);
  EXPECT_THROW(build_nand_4t3r(default_pmos(), default_pmos(), default_pmos(), default_nmos(),
                               make_memristor(1e6), make_memristor(1e6), make_memristor(1e6), 1.65),
               ShapeError);
}

TEST(Builders, DegreesOfFreedom) {
  EXPECT_EQ(count_dofs(baseline_inverter()), 2u);
  const auto m = make_memristor(1e6);
  EXPECT_EQ(count_dofs(build_general_inverter_4r(default_pmos(), default_nmos(), m, m, m, m, 1.65)), 4u);
  EXPECT_EQ(count_dofs(build_general_nand_7r(default_pmos(), default_pmos(), default_nmos(),
                                             default_nmos(), seven(1e6), 1.65)),
            7u);
  EXPECT_EQ(count_dofs(baseline_nand()), 3u);
  // A fixed 1 ohm link is not a degree of freedom.
  const auto f = fixed_resistor();
  EXPECT_EQ(count_dofs(build_general_inverter_4r(default_pmos(), default_nmos(), m, f, m, f, 1.65)), 2u);
}

TEST(Builders, EachInverterMemristorCarriesItsRailPath) {
  const auto c = baseline_inverter();
  const NodeId vdd = c.rail(NodeKind::rail_vdd), gnd = c.rail(NodeKind::rail_gnd), out = c.output();
  EXPECT_TRUE(reachable(c, vdd, out, "", gnd));
  EXPECT_TRUE(reachable(c, gnd, out, "", vdd));
  EXPECT_FALSE(reachable(c, vdd, out, "r_up", gnd));
  EXPECT_FALSE(reachable(c, gnd, out, "r_dn", vdd));
}

TEST(Validate, CatchesStructuralErrors) {
  GateCircuit no_out(GateFamily::inverter_2t2r, 1.65);
  no_out.add_node("vdd", NodeKind::rail_vdd);
  no_out.add_node("gnd", NodeKind::rail_gnd);
  EXPECT_THROW(no_out.validate(), ShapeError);

  GateCircuit floating(GateFamily::inverter_2t2r, 1.65);
  floating.add_node("vdd", NodeKind::rail_vdd);
  floating.add_node("gnd", NodeKind::rail_gnd);
  const auto in = floating.add_node("in", NodeKind::input);
  const auto out = floating.add_node("out", NodeKind::output);
  const auto x = floating.add_node("x", NodeKind::internal);
  floating.add_transistor("mn", default_nmos(), in, x, out);
  EXPECT_THROW(floating.validate(), ShapeError);

  GateCircuit loaded_input(GateFamily::inverter_2t2r, 1.65);
  const auto v = loaded_input.add_node("vdd", NodeKind::rail_vdd);
  loaded_input.add_node("gnd", NodeKind::rail_gnd);
  const auto i2 = loaded_input.add_node("in", NodeKind::input);
  const auto o2 = loaded_input.add_node("out", NodeKind::output);
  loaded_input.add_memristor("r", make_memristor(1e3), i2, o2);
  loaded_input.add_transistor("mp", default_pmos(), i2, v, o2);
  EXPECT_THROW(loaded_input.validate(), ShapeError);
}

TEST(Circuit, WithMemristorLeavesOriginal) {
  const auto c = baseline_inverter();
  const auto d = c.with_memristor("r_up", 1e6);
  EXPECT_DOUBLE_EQ(c.memristor("r_up").state.resistance, 4e6);
  EXPECT_DOUBLE_EQ(d.memristor("r_up").state.resistance, 1e6);
  EXPECT_THROW(c.with_memristor("r_zz", 1e6), ShapeError);
  EXPECT_THROW(c.with_memristor("r_up", 1.0), RangeError);
}

TEST(Duality, SwapsRailsAndPolarities) {
  const auto nand = baseline_nand();
  const auto nor = build_nor_dual(nand);
  EXPECT_EQ(nor.family(), GateFamily::nor_4t3r);
  for (std::size_t i = 0; i < nand.transistors().size(); ++i) {
    EXPECT_NE(nand.transistors()[i].params.polarity, nor.transistors()[i].params.polarity);
    EXPECT_EQ(nand.transistors()[i].params.v_th, nor.transistors()[i].params.v_th);
  }
  for (std::size_t i = 0; i < nand.memristors().size(); ++i)
    EXPECT_EQ(nand.memristors()[i].state, nor.memristors()[i].state);
  EXPECT_EQ(nor.nodes()[nor.rail(NodeKind::rail_gnd)].name, "gnd");
  EXPECT_EQ(nor.rail(NodeKind::rail_gnd), nand.rail(NodeKind::rail_vdd));
}

TEST(Duality, IsAnInvolution) {
  const auto nand = baseline_nand();
  EXPECT_EQ(build_nor_dual(build_nor_dual(nand)), nand);
  const auto g = build_general_nand_7r(default_pmos(), default_pmos(), default_nmos(), default_nmos(),
                                       seven(2e6), 1.65);
  EXPECT_EQ(build_nor_dual(build_nor_dual(g)), g);
}

TEST(Duality, RejectsInverters) { EXPECT_THROW(build_nor_dual(baseline_inverter()), ShapeError); }
