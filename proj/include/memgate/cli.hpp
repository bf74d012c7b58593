#pragma once

// Command drivers behind the memgate executable. Each command reads its
// section of a RunConfig, writes CSV (and optionally SVG) files under the
// output directory and prints a short summary to `log`. Data files carry no
// timestamps, so identical configs give byte-identical trees.

#include <algorithm>
#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "memgate/config.hpp"
#include "memgate/dcsolver.hpp"
#include "memgate/energy.hpp"
#include "memgate/netlist.hpp"
#include "memgate/readout.hpp"
#include "memgate/report.hpp"
#include "memgate/spikesort.hpp"
#include "memgate/stats.hpp"
#include "memgate/texel.hpp"

namespace memgate {

namespace fs = std::filesystem;

inline double divider_level(const InverterSpec& s, double vdd) {
  if (s.general) return vdd * (s.r_c + s.r_d) / (s.r_a + s.r_b + s.r_c + s.r_d);
  return vdd * s.r_dn / (s.r_up + s.r_dn);
}

inline std::string trace_csv(const std::string& x_name, const SweepTrace& t) {
  std::string out = x_name + ",v_out\n";
  for (std::size_t i = 0; i < t.input_values.size(); ++i)
    out += fmt_volts(t.input_values[i]) + "," + fmt_volts(t.output_values[i]) + "\n";
  return out;
}

inline void cmd_sweep(const RunConfig& c, std::ostream& log) {
  if (!c.sweep) throw ConfigError("sweep: section missing from config");
  const auto& sec = *c.sweep;
  std::vector<Series> series;
  std::string summary = "label,altitude,width,altitude_input,divider\n";
  for (const auto& spec : sec.configs) {
    const auto circuit = spec.build(c.vdd);
    const auto trace = sweep_1d(circuit, "in", sec.grid, {}, spec.label);
    write_file(c.output_dir / ("sweep_" + spec.label + ".csv"), trace_csv("v_in", trace));
    series.push_back({spec.label, trace.input_values, trace.output_values});
    if (trace.input_values.size() >= 5) {
      const auto m = plateau_metrics(trace);
      summary += fmt::format("{},{},{},{},{}\n", spec.label, fmt_volts(m.altitude), fmt_volts(m.width),
                             fmt_volts(m.altitude_input), fmt_volts(divider_level(spec, c.vdd)));
      log << fmt::format("{}: plateau altitude {:.4f} V (divider {:.4f} V), width {:.4f} V\n",
                         spec.label, m.altitude, divider_level(spec, c.vdd), m.width);
    }
  }
  write_file(c.output_dir / "sweep_summary.csv", summary);
  if (c.emit_svg)
    write_file(c.output_dir / "sweep.svg",
               line_plot("Transfer characteristics", "V_IN (V)", "V_OUT (V)", series));
}

inline std::string surface_csv(const Surface& s) {
  std::string out = "v_a,v_b,v_out\n";
  for (std::size_t i = 0; i < s.grid_a.size(); ++i)
    for (std::size_t j = 0; j < s.grid_b.size(); ++j)
      out += fmt_volts(s.grid_a[i]) + "," + fmt_volts(s.grid_b[j]) + "," + fmt_volts(s.at(i, j)) + "\n";
  return out;
}

inline GateCircuit surface_nand(const RunConfig& c) {
  const auto& s = *c.surface;
  return build_nand_4t3r(c.devices.pmos, c.devices.pmos, c.devices.nmos, c.devices.nmos,
                         make_memristor(s.m_a), make_memristor(s.m_b), make_memristor(s.m_c), c.vdd);
}

// Correlation of a NAND surface with VDD * [1 - (1 - r_a)(1 - r_b)], where
// r_a and r_b are the two inverter reductions normalised to [0, 1].
inline double reduction_correlation(const Surface& s, const SweepTrace& red_a, const SweepTrace& red_b,
                                    double vdd) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < s.grid_a.size(); ++i)
    for (std::size_t j = 0; j < s.grid_b.size(); ++j) {
      const double ra = red_a.output_values[i] / vdd, rb = red_b.output_values[j] / vdd;
      x.push_back(s.at(i, j));
      y.push_back(vdd * (1.0 - (1.0 - ra) * (1.0 - rb)));
    }
  return pearson(x, y);
}

inline void cmd_surface(const RunConfig& c, std::ostream& log) {
  if (!c.surface) throw ConfigError("surface: section missing from config");
  const auto& sec = *c.surface;
  const auto nand = surface_nand(c);
  const auto s = surface_2d(nand, "a", sec.grid_a, "b", sec.grid_b);
  write_file(c.output_dir / "surface.csv", surface_csv(s));
  const auto red_b = sweep_1d(nand, "b", sec.grid_b, {{"a", c.vdd}}, "reduction_b");
  const auto red_a = sweep_1d(nand, "a", sec.grid_a, {{"b", c.vdd}}, "reduction_a");
  write_file(c.output_dir / "reduction_a.csv", trace_csv("v_a", red_a));
  write_file(c.output_dir / "reduction_b.csv", trace_csv("v_b", red_b));
  log << fmt::format("surface: {} x {} points, correlation with reduction product {:.4f}\n",
                     sec.grid_a.size(), sec.grid_b.size(), reduction_correlation(s, red_a, red_b, c.vdd));
  if (sec.nor) {
    const auto nor = build_nor_dual(nand);
    write_file(c.output_dir / "nor_surface.csv", surface_csv(surface_2d(nor, "a", sec.grid_a, "b", sec.grid_b)));
  }
  if (c.emit_svg) {
    write_file(c.output_dir / "surface.svg",
               heat_map("NAND output", "V_B (V)", "V_A (V)", s.grid_a, s.grid_b, s.values));
    write_file(c.output_dir / "reductions.svg",
               line_plot("Inverter reductions", "input (V)", "V_OUT (V)",
                         {{"A (B = VDD)", red_a.input_values, red_a.output_values},
                          {"B (A = VDD)", red_b.input_values, red_b.output_values}}));
  }
}

inline DividerModel energy_model(const RunConfig& c, const EnergyModelSpec& m, double c_out) {
  if (m.inverter) return effective_divider(m.inverter->build(c.vdd), m.v_in, c_out, m.v_out_1);
  return make_divider(m.r1, m.r2, c_out, c.vdd, m.v_out_1);
}

inline double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

inline void cmd_energy(const RunConfig& c, std::ostream& log) {
  if (!c.energy) throw ConfigError("energy: section missing from config");
  const auto& sec = *c.energy;
  std::string out =
      "model,l,r1,r2,v_out_1,v_out_2,q_leak,q_charge,q_tot,q_tot_alt,identity_rel,q_transient,"
      "oracle_rel,e_upper,e_transient,settling_fraction,toggle_equivalents\n";
  double worst_identity = 0.0, worst_oracle = 0.0;
  bool bound_ok = true;
  for (const auto& spec : sec.models) {
    const auto m = energy_model(c, spec, sec.c_out);
    for (double l : sec.l_grid) {
      const auto r = q_tot(m, l);
      const auto t = transient_oracle(m, l, sec.dt_fraction);
      const double id = rel_diff(r.q_tot, r.q_tot_alt), orc = rel_diff(r.q_tot, t.q_tot);
      worst_identity = std::max(worst_identity, id);
      worst_oracle = std::max(worst_oracle, orc);
      bound_ok = bound_ok && c.vdd * r.q_tot <= r.e_upper * (1.0 + 1e-12);
      out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", spec.label, fmt_volts(l),
                         fmt_sci(m.r1), fmt_sci(m.r2), fmt_volts(m.v_out_1), fmt_volts(m.v_out_2),
                         fmt_sci(r.q_leak), fmt_sci(r.q_charge), fmt_sci(r.q_tot), fmt_sci(r.q_tot_alt),
                         fmt_sci(id), fmt_sci(t.q_tot), fmt_sci(orc), fmt_sci(r.e_upper),
                         fmt_sci(t.e_dissipated), fmt_volts(r.settling_fraction),
                         fmt_volts(toggle_equivalents(r.q_tot, sec.c_out, c.vdd)));
    }
  }
  write_file(c.output_dir / "energy.csv", out);
  log << fmt::format("energy: identity max rel diff {:.3e}, transient max rel diff {:.3e}, "
                     "vdd*q_tot <= e_upper: {}\n",
                     worst_identity, worst_oracle, bound_ok ? "yes" : "NO");
}

inline void cmd_digitize(const RunConfig& c, std::ostream& log) {
  if (!c.digitize) throw ConfigError("digitize: section missing from config");
  const auto& sec = *c.digitize;
  const auto inv = sec.inverter.build(c.vdd);
  const auto trace = sweep_1d(inv, "in", sec.grid, {}, sec.inverter.label);
  std::string out = "v_in,v_mid,v_out1,bit,i_out,on_target\n";
  std::vector<double> hits;
  std::vector<Series> plot(2);
  plot[0].name = "V_OUT1";
  plot[1].name = "I_OUT (uA)";
  for (std::size_t i = 0; i < trace.input_values.size(); ++i) {
    const double v_mid = std::clamp(trace.output_values[i], 0.0, c.vdd);
    const auto d = digitize(c.readout, v_mid);
    out += fmt::format("{},{},{},{},{},{}\n", fmt_volts(trace.input_values[i]), fmt_volts(v_mid),
                       fmt_volts(d.v_out1), bit_name(d.bit), fmt_sci(d.i_out), d.on_target ? 1 : 0);
    if (d.on_target) hits.push_back(trace.input_values[i]);
    plot[0].x.push_back(trace.input_values[i]);
    plot[0].y.push_back(d.v_out1);
    plot[1].x.push_back(trace.input_values[i]);
    plot[1].y.push_back(d.i_out * 1e6);
  }
  write_file(c.output_dir / "digitize.csv", out);

  std::string win = "i_ref,v_mid_lo,v_mid_hi,width,in_range\n";
  std::vector<double> refs{c.readout.i_ref};
  refs.insert(refs.end(), sec.i_ref_scan.begin(), sec.i_ref_scan.end());
  for (double i_ref : refs) {
    auto p = c.readout;
    p.i_ref = i_ref;
    const auto w = on_target_window(p);
    const bool ok = !w.empty && w.width() >= 0.020 && w.width() <= 0.300;
    win += fmt::format("{},{},{},{},{}\n", fmt_sci(i_ref), w.empty ? "" : fmt_volts(w.lo),
                       w.empty ? "" : fmt_volts(w.hi), fmt_volts(w.width()), ok ? 1 : 0);
  }
  write_file(c.output_dir / "digitize_window.csv", win);
  const auto w = on_target_window(c.readout);
  log << fmt::format("digitize: on-target window {:.1f} mV wide on V_MID ({} 20-300 mV)", 1e3 * w.width(),
                     !w.empty && w.width() >= 0.020 && w.width() <= 0.300 ? "within" : "OUTSIDE");
  if (!hits.empty())
    log << fmt::format("; on target for V_IN in [{:.4f}, {:.4f}] V", hits.front(), hits.back());
  log << "\n";
  if (c.emit_svg) write_file(c.output_dir / "digitize.svg", line_plot("Read-out", "V_IN (V)", "", plot));
}

inline TexelArrayConfig texel_array(const RunConfig& c, const TexelSection& sec) {
  TexelArrayConfig a;
  a.vdd = c.vdd;
  a.r_load = sec.r_load;
  for (double r : sec.r1) {
    auto t = default_texel(r, c.vdd);
    t.r0 = make_memristor(sec.r0, 1e3, 1e6);
    t.readout = c.readout;
    t.readout.mirror_gain = sec.mirror_gain;
    a.texels.push_back(t);
  }
  a.validate();
  return a;
}

inline void cmd_texel(const RunConfig& c, std::ostream& log) {
  if (!c.texel) throw ConfigError("texel: section missing from config");
  const auto& sec = *c.texel;
  SpikeDataset data;
  try {
    data = load_dataset(sec.dataset.string());
  } catch (const IoError& e) {
    throw ConfigError(std::string("texel: ") + e.what());
  }
  const ExperimentSettings settings{sec.v_trig, sec.gain, sec.offset, sec.sample_offset};
  auto array = texel_array(c, sec);

  std::vector<double> targets = sec.program_targets;
  if (sec.target_class) {
    const auto clean = exclude_corrupted(data, sec.v_trig, sec.sample_offset);
    auto m = select_lmh(clean, *sec.target_class, sec.v_trig, sec.sample_offset)[1];
    adjust_and_round(m, sec.gain, sec.offset);
    targets = m.rounded;
  }
  if (!targets.empty()) array = program_template(array, targets);

  std::vector<double> before;
  for (const auto& t : array.texels) before.push_back(t.r1.resistance);
  const auto rows = run_experiment(data, array, settings);

  std::string arr = "texel,r0,r1_before_run,r1_after_run,v_pk\n";
  for (std::size_t k = 0; k < array.texels.size(); ++k) {
    const auto& t = array.texels[k];
    if (t.r1.resistance != before[k]) throw Error("texel: stored state changed during the run");
    arr += fmt::format("TXL{},{},{},{},{}\n", k + 1, fmt_sci(t.r0.resistance), fmt_sci(before[k]),
                       fmt_sci(t.r1.resistance), fmt_volts(peak_input(t)));
  }
  write_file(c.output_dir / "texel_array.csv", arr);

  std::string rep = "class,tag,txl1,txl2,txl3,txl4,v_out\n";
  std::vector<std::string> labels;
  std::vector<double> values;
  for (const auto& r : rows) {
    rep += fmt::format("{},{}", r.class_label, tag_name(r.tag));
    for (double v : r.inputs) rep += "," + fmt_volts(v, 4);
    rep += "," + fmt_volts(r.v_out, 4) + "\n";
    labels.push_back(std::to_string(r.class_label) + tag_name(r.tag));
    values.push_back(r.v_out);
  }
  write_file(c.output_dir / "texel_report.csv", rep);

  std::map<std::vector<double>, std::vector<std::string>> shared;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].shared) shared[rows[i].inputs].push_back(labels[i]);
  for (const auto& [in, names] : shared) {
    log << "texel: rows";
    for (const auto& n : names) log << " " << n;
    log << " share one input vector and were evaluated once\n";
  }
  std::vector<std::size_t> order(rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] > values[b]; });
  log << "texel: ranking";
  for (auto i : order) log << fmt::format(" {}={:.4f}", labels[i], values[i]);
  log << "\n";
  if (sec.target_class && order.size() >= 2) {
    const bool top = rows[order[0]].class_label == *sec.target_class &&
                     rows[order[1]].class_label == *sec.target_class;
    log << fmt::format("texel: top two ranks {} class {}\n", top ? "belong to" : "do NOT both belong to",
                       *sec.target_class);
  }
  if (c.emit_svg) {
    const double y_max = std::max(c.vdd, *std::max_element(values.begin(), values.end()));
    write_file(c.output_dir / "texel.svg", bar_chart("Texel array response", labels, values, y_max));
  }
}

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"sweep", "surface", "energy", "texel", "digitize"};
  return names;
}

inline void run_command(const std::string& name, const RunConfig& c, std::ostream& log) {
  if (name == "sweep") cmd_sweep(c, log);
  else if (name == "surface") cmd_surface(c, log);
  else if (name == "energy") cmd_energy(c, log);
  else if (name == "texel") cmd_texel(c, log);
  else if (name == "digitize") cmd_digitize(c, log);
  else throw ConfigError("unknown command '" + name + "'");
}

}  // namespace memgate
