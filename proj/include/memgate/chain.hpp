#pragma once

// Gate chaining. Gate inputs only see transistor gates, so they draw no DC
// current and a downstream gate does not load the stage driving it; the
// composite is evaluated by solving the stages one after another.

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "memgate/dcsolver.hpp"
#include "memgate/errors.hpp"
#include "memgate/netlist.hpp"

namespace memgate {

struct Evaluator {
  std::vector<std::string> inputs;
  double vdd = 0.0;
  std::function<double(const InputMap&)> eval;

  double operator()(const InputMap& in) const { return eval(in); }
};

inline Evaluator as_evaluator(const GateCircuit& c) {
  c.validate();
  return {c.input_names(), c.vdd(), [c](const InputMap& in) { return solve_output(c, in); }};
}

// Passes the named input straight through.
inline Evaluator identity_evaluator(const std::string& port, double vdd) {
  return {{port}, vdd, [port](const InputMap& in) { return in.at(port); }};
}

// Output of `first` drives input `port` of `second`. The composite takes the
// union of first's inputs and second's remaining inputs; a name present in
// both is one shared signal.
inline Evaluator chain(const Evaluator& first, const Evaluator& second, const std::string& port) {
  if (std::find(second.inputs.begin(), second.inputs.end(), port) == second.inputs.end())
    throw ShapeError("chain: second stage has no input '" + port + "'");
  std::vector<std::string> names = first.inputs;
  for (const auto& n : second.inputs)
    if (n != port && std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
  std::vector<std::string> first_in = first.inputs;
  std::vector<std::string> second_in = second.inputs;
  return {names, second.vdd, [=](const InputMap& in) {
            InputMap a;
            for (const auto& n : first_in) a[n] = in.at(n);
            const double mid = std::clamp(first(a), 0.0, second.vdd);
            InputMap b;
            for (const auto& n : second_in) b[n] = n == port ? mid : in.at(n);
            return second(b);
          }};
}

inline Evaluator chain(const GateCircuit& first, const GateCircuit& second, const std::string& port) {
  return chain(as_evaluator(first), as_evaluator(second), port);
}

}  // namespace memgate
