#pragma once

// Gate topologies as device graphs with named ports.
//
// Every builder returns an immutable GateCircuit. Rails and input ports are
// fixed-potential nodes; output and internal nodes are the unknowns of the DC
// problem. Inputs only ever drive transistor gates, so they draw no current.

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "memgate/devices.hpp"
#include "memgate/errors.hpp"

namespace memgate {

enum class NodeKind { rail_vdd, rail_gnd, input, output, internal };

using NodeId = std::size_t;

struct Node {
  std::string name;
  NodeKind kind;
  friend bool operator==(const Node&, const Node&) = default;
};

struct TransistorInstance {
  std::string name;
  MosfetParams params;
  NodeId gate;
  NodeId source;
  NodeId drain;
  friend bool operator==(const TransistorInstance&, const TransistorInstance&) = default;
};

struct MemristorInstance {
  std::string name;
  MemristorState state;
  NodeId a;
  NodeId b;
  friend bool operator==(const MemristorInstance&, const MemristorInstance&) = default;
};

enum class GateFamily { inverter_2t2r, inverter_4r, nand_4t3r, nand_7r, nor_4t3r, nor_7r };

inline const char* family_name(GateFamily f) {
  switch (f) {
    case GateFamily::inverter_2t2r: return "inverter_2t2r";
    case GateFamily::inverter_4r: return "inverter_4r";
    case GateFamily::nand_4t3r: return "nand_4t3r";
    case GateFamily::nand_7r: return "nand_7r";
    case GateFamily::nor_4t3r: return "nor_4t3r";
    case GateFamily::nor_7r: return "nor_7r";
  }
  return "?";
}

inline bool is_inverter_family(GateFamily f) {
  return f == GateFamily::inverter_2t2r || f == GateFamily::inverter_4r;
}

inline bool is_nand_family(GateFamily f) {
  return f == GateFamily::nand_4t3r || f == GateFamily::nand_7r || f == GateFamily::nor_4t3r ||
         f == GateFamily::nor_7r;
}

class GateCircuit {
 public:
  GateCircuit(GateFamily family, double vdd) : family_(family), vdd_(vdd) {}

  NodeId add_node(std::string name, NodeKind kind) {
    nodes_.push_back({std::move(name), kind});
    return nodes_.size() - 1;
  }
  void add_transistor(std::string name, const MosfetParams& p, NodeId g, NodeId s, NodeId d) {
    transistors_.push_back({std::move(name), p, g, s, d});
  }
  void add_memristor(std::string name, const MemristorState& m, NodeId a, NodeId b) {
    memristors_.push_back({std::move(name), m, a, b});
  }

  GateFamily family() const { return family_; }
  double vdd() const { return vdd_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<TransistorInstance>& transistors() const { return transistors_; }
  const std::vector<MemristorInstance>& memristors() const { return memristors_; }

  std::optional<NodeId> find_node(const std::string& name) const {
    for (NodeId i = 0; i < nodes_.size(); ++i)
      if (nodes_[i].name == name) return i;
    return std::nullopt;
  }

  NodeId node(const std::string& name) const {
    auto id = find_node(name);
    if (!id) throw ShapeError("circuit has no node named '" + name + "'");
    return *id;
  }

  NodeId rail(NodeKind kind) const {
    for (NodeId i = 0; i < nodes_.size(); ++i)
      if (nodes_[i].kind == kind) return i;
    throw ShapeError("circuit has no rail of the requested kind");
  }

  NodeId output() const {
    for (NodeId i = 0; i < nodes_.size(); ++i)
      if (nodes_[i].kind == NodeKind::output) return i;
    throw ShapeError("circuit has no output node");
  }

  std::vector<std::string> input_names() const {
    std::vector<std::string> names;
    for (const auto& n : nodes_)
      if (n.kind == NodeKind::input) names.push_back(n.name);
    return names;
  }

  bool has_input(const std::string& name) const {
    auto id = find_node(name);
    return id && nodes_[*id].kind == NodeKind::input;
  }

  // Nodes whose potential the DC solver determines, in node order.
  std::vector<NodeId> unknown_nodes() const {
    std::vector<NodeId> ids;
    for (NodeId i = 0; i < nodes_.size(); ++i)
      if (nodes_[i].kind == NodeKind::output || nodes_[i].kind == NodeKind::internal)
        ids.push_back(i);
    return ids;
  }

  MemristorInstance& memristor(const std::string& name) {
    for (auto& m : memristors_)
      if (m.name == name) return m;
    throw ShapeError("circuit has no memristor named '" + name + "'");
  }
  const MemristorInstance& memristor(const std::string& name) const {
    return const_cast<GateCircuit*>(this)->memristor(name);
  }

  // Copy with one memristor reprogrammed; the original is left untouched.
  GateCircuit with_memristor(const std::string& name, double resistance) const {
    GateCircuit c = *this;
    auto& m = c.memristor(name);
    m.state = memristor_program(m.state, resistance);
    return c;
  }

  // Throws ShapeError describing the first violated structural rule.
  void validate() const;

  friend bool operator==(const GateCircuit&, const GateCircuit&) = default;

 private:
  friend GateCircuit build_nor_dual(const GateCircuit&);

  GateFamily family_;
  double vdd_;
  std::vector<Node> nodes_;
  std::vector<TransistorInstance> transistors_;
  std::vector<MemristorInstance> memristors_;
};

inline void GateCircuit::validate() const {
  if (!(vdd_ > 0.0)) throw ShapeError("circuit: vdd must be > 0");
  std::size_t n_vdd = 0, n_gnd = 0, n_out = 0;
  for (const auto& n : nodes_) {
    n_vdd += n.kind == NodeKind::rail_vdd;
    n_gnd += n.kind == NodeKind::rail_gnd;
    n_out += n.kind == NodeKind::output;
  }
  if (n_vdd != 1 || n_gnd != 1) throw ShapeError("circuit: need exactly one vdd and one gnd rail");
  if (n_out != 1) throw ShapeError("circuit: need exactly one output node");

  for (const auto& t : transistors_) {
    t.params.validate();
    for (NodeId id : {t.gate, t.source, t.drain})
      if (id >= nodes_.size()) throw ShapeError("circuit: transistor " + t.name + " dangles");
    if (nodes_[t.source].kind == NodeKind::input || nodes_[t.drain].kind == NodeKind::input)
      throw ShapeError("circuit: input node carries channel current via " + t.name);
  }
  for (const auto& m : memristors_) {
    m.state.validate();
    if (m.a >= nodes_.size() || m.b >= nodes_.size())
      throw ShapeError("circuit: memristor " + m.name + " dangles");
    if (nodes_[m.a].kind == NodeKind::input || nodes_[m.b].kind == NodeKind::input)
      throw ShapeError("circuit: input node carries current via " + m.name);
  }

  // Union-find over conducting edges (channels, memristors).
  std::vector<NodeId> parent(nodes_.size());
  std::iota(parent.begin(), parent.end(), NodeId{0});
  auto find = [&](NodeId x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto unite = [&](NodeId a, NodeId b) { parent[find(a)] = find(b); };
  for (const auto& t : transistors_) unite(t.source, t.drain);
  for (const auto& m : memristors_) unite(m.a, m.b);
  // Rails are joined through the supply itself.
  unite(rail(NodeKind::rail_vdd), rail(NodeKind::rail_gnd));
  const NodeId rails = find(rail(NodeKind::rail_vdd));
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    const auto k = nodes_[i].kind;
    if ((k == NodeKind::output || k == NodeKind::internal) && find(i) != rails)
      throw ShapeError("circuit: node '" + nodes_[i].name + "' has no path to a rail");
  }
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].kind != NodeKind::input) continue;
    bool drives = std::any_of(transistors_.begin(), transistors_.end(),
                              [&](const TransistorInstance& t) { return t.gate == i; });
    if (!drives) throw ShapeError("circuit: input '" + nodes_[i].name + "' drives nothing");
  }
}

namespace detail {

inline void expect_polarity(const MosfetParams& p, Polarity want, const char* who) {
  if (p.polarity != want)
    throw ShapeError(std::string(who) + ": wrong transistor polarity");
}

}  // namespace detail

// VDD -> pMOS -> R_UP -> OUT -> R_DN -> nMOS -> GND, both gates on "in".
// The memristors sit on the drain side of each transistor.
inline GateCircuit build_inverter_2t2r(const MosfetParams& pmos, const MosfetParams& nmos,
                                       const MemristorState& r_up, const MemristorState& r_dn,
                                       double vdd) {
  detail::expect_polarity(pmos, Polarity::p, "inverter pull-up");
  detail::expect_polarity(nmos, Polarity::n, "inverter pull-down");
  GateCircuit c(GateFamily::inverter_2t2r, vdd);
  const auto v = c.add_node("vdd", NodeKind::rail_vdd);
  const auto g = c.add_node("gnd", NodeKind::rail_gnd);
  const auto in = c.add_node("in", NodeKind::input);
  const auto out = c.add_node("out", NodeKind::output);
  const auto up = c.add_node("up", NodeKind::internal);
  const auto dn = c.add_node("dn", NodeKind::internal);
  c.add_transistor("mp", pmos, in, v, up);
  c.add_memristor("r_up", r_up, up, out);
  c.add_memristor("r_dn", r_dn, out, dn);
  c.add_transistor("mn", nmos, in, g, dn);
  c.validate();
  return c;
}

// VDD -> R_A -> pMOS -> R_B -> OUT -> R_C -> nMOS -> R_D -> GND.
// R_A and R_D source-degenerate the transistors; R_B and R_C load the drains.
inline GateCircuit build_general_inverter_4r(const MosfetParams& pmos, const MosfetParams& nmos,
                                             const MemristorState& r_a,
                                             const MemristorState& r_b,
                                             const MemristorState& r_c,
                                             const MemristorState& r_d, double vdd) {
  detail::expect_polarity(pmos, Polarity::p, "inverter pull-up");
  detail::expect_polarity(nmos, Polarity::n, "inverter pull-down");
  GateCircuit c(GateFamily::inverter_4r, vdd);
  const auto v = c.add_node("vdd", NodeKind::rail_vdd);
  const auto g = c.add_node("gnd", NodeKind::rail_gnd);
  const auto in = c.add_node("in", NodeKind::input);
  const auto out = c.add_node("out", NodeKind::output);
  const auto ps = c.add_node("ps", NodeKind::internal);
  const auto pd = c.add_node("pd", NodeKind::internal);
  const auto nd = c.add_node("nd", NodeKind::internal);
  const auto ns = c.add_node("ns", NodeKind::internal);
  c.add_memristor("r_a", r_a, v, ps);
  c.add_transistor("mp", pmos, in, ps, pd);
  c.add_memristor("r_b", r_b, pd, out);
  c.add_memristor("r_c", r_c, out, nd);
  c.add_transistor("mn", nmos, in, ns, nd);
  c.add_memristor("r_d", r_d, ns, g);
  c.validate();
  return c;
}

// Fuzzy NAND: two parallel pull-ups (pMOS_A + M_A, pMOS_B + M_B) into OUT and
// a series pull-down OUT -> M_C -> nMOS_A -> nMOS_B -> GND.
inline GateCircuit build_nand_4t3r(const MosfetParams& pmos_a, const MosfetParams& pmos_b,
                                   const MosfetParams& nmos_a, const MosfetParams& nmos_b,
                                   const MemristorState& m_a, const MemristorState& m_b,
                                   const MemristorState& m_c, double vdd) {
  detail::expect_polarity(pmos_a, Polarity::p, "nand pull-up A");
  detail::expect_polarity(pmos_b, Polarity::p, "nand pull-up B");
  detail::expect_polarity(nmos_a, Polarity::n, "nand pull-down A");
  detail::expect_polarity(nmos_b, Polarity::n, "nand pull-down B");
  GateCircuit c(GateFamily::nand_4t3r, vdd);
  const auto v = c.add_node("vdd", NodeKind::rail_vdd);
  const auto g = c.add_node("gnd", NodeKind::rail_gnd);
  const auto a = c.add_node("a", NodeKind::input);
  const auto b = c.add_node("b", NodeKind::input);
  const auto out = c.add_node("out", NodeKind::output);
  const auto xa = c.add_node("xa", NodeKind::internal);
  const auto xb = c.add_node("xb", NodeKind::internal);
  const auto xc = c.add_node("xc", NodeKind::internal);
  const auto xm = c.add_node("xm", NodeKind::internal);
  c.add_transistor("mp_a", pmos_a, a, v, xa);
  c.add_memristor("m_a", m_a, xa, out);
  c.add_transistor("mp_b", pmos_b, b, v, xb);
  c.add_memristor("m_b", m_b, xb, out);
  c.add_memristor("m_c", m_c, out, xc);
  c.add_transistor("mn_a", nmos_a, a, xm, xc);
  c.add_transistor("mn_b", nmos_b, b, g, xm);
  c.validate();
  return c;
}

// Memristors of the fully general NAND. Each pull-up transistor has a source
// resistor and a drain resistor; the pull-down stack is
// OUT -> r_e -> nMOS_A -> r_f -> nMOS_B -> r_g -> GND, so r_f both
// source-degenerates nMOS_A and loads the drain of nMOS_B.
struct GeneralNandMemristors {
  MemristorState r_a;  // VDD -> pMOS_A source
  MemristorState r_b;  // pMOS_A drain -> OUT
  MemristorState r_c;  // VDD -> pMOS_B source
  MemristorState r_d;  // pMOS_B drain -> OUT
  MemristorState r_e;  // OUT -> nMOS_A drain
  MemristorState r_f;  // nMOS_A source -> nMOS_B drain (shared)
  MemristorState r_g;  // nMOS_B source -> GND
};

inline GateCircuit build_general_nand_7r(const MosfetParams& pmos_a, const MosfetParams& pmos_b,
                                         const MosfetParams& nmos_a, const MosfetParams& nmos_b,
                                         const GeneralNandMemristors& m, double vdd) {
  detail::expect_polarity(pmos_a, Polarity::p, "nand pull-up A");
  detail::expect_polarity(pmos_b, Polarity::p, "nand pull-up B");
  detail::expect_polarity(nmos_a, Polarity::n, "nand pull-down A");
  detail::expect_polarity(nmos_b, Polarity::n, "nand pull-down B");
  GateCircuit c(GateFamily::nand_7r, vdd);
  const auto v = c.add_node("vdd", NodeKind::rail_vdd);
  const auto g = c.add_node("gnd", NodeKind::rail_gnd);
  const auto a = c.add_node("a", NodeKind::input);
  const auto b = c.add_node("b", NodeKind::input);
  const auto out = c.add_node("out", NodeKind::output);
  const auto pas = c.add_node("pas", NodeKind::internal);
  const auto pad = c.add_node("pad", NodeKind::internal);
  const auto pbs = c.add_node("pbs", NodeKind::internal);
  const auto pbd = c.add_node("pbd", NodeKind::internal);
  const auto nad = c.add_node("nad", NodeKind::internal);
  const auto nas = c.add_node("nas", NodeKind::internal);
  const auto nbd = c.add_node("nbd", NodeKind::internal);
  const auto nbs = c.add_node("nbs", NodeKind::internal);
  c.add_memristor("r_a", m.r_a, v, pas);
  c.add_transistor("mp_a", pmos_a, a, pas, pad);
  c.add_memristor("r_b", m.r_b, pad, out);
  c.add_memristor("r_c", m.r_c, v, pbs);
  c.add_transistor("mp_b", pmos_b, b, pbs, pbd);
  c.add_memristor("r_d", m.r_d, pbd, out);
  c.add_memristor("r_e", m.r_e, out, nad);
  c.add_transistor("mn_a", nmos_a, a, nas, nad);
  c.add_memristor("r_f", m.r_f, nas, nbd);
  c.add_transistor("mn_b", nmos_b, b, nbs, nbd);
  c.add_memristor("r_g", m.r_g, nbs, g);
  c.validate();
  return c;
}

inline GateFamily dual_family(GateFamily f) {
  switch (f) {
    case GateFamily::nand_4t3r: return GateFamily::nor_4t3r;
    case GateFamily::nor_4t3r: return GateFamily::nand_4t3r;
    case GateFamily::nand_7r: return GateFamily::nor_7r;
    case GateFamily::nor_7r: return GateFamily::nand_7r;
    default: throw ShapeError(std::string("no NAND/NOR dual for ") + family_name(f));
  }
}

// Exchange the supplies: rails swap roles (and names), every transistor flips
// polarity with otherwise identical parameters, memristors keep their states.
// Applying it twice gives back the original circuit.
inline GateCircuit build_nor_dual(const GateCircuit& nand) {
  if (!is_nand_family(nand.family()))
    throw ShapeError(std::string("build_nor_dual: expected a NAND-family gate, got ") +
                     family_name(nand.family()));
  GateCircuit c = nand;
  c.family_ = dual_family(nand.family());
  for (auto& n : c.nodes_) {
    if (n.kind == NodeKind::rail_vdd) {
      n.kind = NodeKind::rail_gnd;
      n.name = "gnd";
    } else if (n.kind == NodeKind::rail_gnd) {
      n.kind = NodeKind::rail_vdd;
      n.name = "vdd";
    }
  }
  for (auto& t : c.transistors_) t.params = mirrored(t.params);
  c.validate();
  return c;
}

inline std::size_t count_dofs(const GateCircuit& c) {
  return static_cast<std::size_t>(
      std::count_if(c.memristors().begin(), c.memristors().end(),
                    [](const MemristorInstance& m) { return m.state.r_min < m.state.r_max; }));
}

}  // namespace memgate
