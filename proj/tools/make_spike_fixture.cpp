// Writes the synthetic spike dataset used by the texel experiment.
//
// Each class gets eleven single-spike waveforms. Their four post-trigger
// samples are chosen so that, after gain 0.1 and offset 0.66 V, the low,
// typical and high instances land on fixed texel input levels; the other
// eight instances interpolate between them. One extra waveform per class
// carries a second spike inside the sampling window.

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <fmt/format.h>

namespace {

using Levels = std::array<double, 4>;

struct ClassLevels {
  int label;
  Levels low, mid, high;  // adjusted volts
};

const ClassLevels kClasses[] = {
    {1, {0.6991, 0.6888, 0.6788, 0.6705}, {0.7115, 0.7014, 0.6926, 0.6863},
     {0.7151, 0.7055, 0.6971, 0.6904}},
    {2, {0.7164, 0.7058, 0.6983, 0.6923}, {0.7347, 0.7231, 0.7149, 0.7094},
     {0.7400, 0.7270, 0.7163, 0.7071}},
    {3, {0.7450, 0.7397, 0.7329, 0.7266}, {0.7592, 0.7510, 0.7427, 0.7350},
     {0.7757, 0.7657, 0.7546, 0.7443}},
};

constexpr int kLength = 48;
constexpr double kGain = 0.1, kOffset = 0.66;

Levels raw_of(const Levels& adj) {
  Levels r;
  for (int i = 0; i < 4; ++i) r[i] = (adj[i] - kOffset) / kGain;
  return r;
}

Levels lerp(const Levels& a, const Levels& b, double t) {
  Levels r;
  for (int i = 0; i < 4; ++i) r[i] = a[i] + t * (b[i] - a[i]);
  return r;
}

// Crossing at index k: a two-sample rise to the peak, a monotone fall onto
// the four sampled values, then an exponential tail.
std::vector<double> spike(const Levels& raw, int k, int seed) {
  std::vector<double> s(kLength, 0.0);
  for (int i = 0; i < k - 1; ++i) s[i] = 0.02 * std::sin(0.7 * (i + seed));
  s[k - 1] = 1.0;
  s[k] = 2.2;
  s[k + 1] = 3.0;
  const double top = 2.6, floor = raw[0] + 0.1;
  for (int j = 2; j <= 6; ++j) s[k + j] = top + (floor - top) * (j - 2) / 4.0;
  for (int j = 0; j < 4; ++j) s[k + 7 + j] = raw[j];
  for (int i = k + 11; i < kLength; ++i) s[i] = raw[3] * std::exp(-(i - k - 10) / 4.0);
  return s;
}

std::string row(int label, const std::vector<double>& s) {
  std::string out = std::to_string(label);
  for (double v : s) {
    if (v == 0.0) v = 0.0;
    out += fmt::format(",{:.10f}", v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string path = argc > 1 ? argv[1] : "data/spikes_synthetic.csv";
  std::ofstream f(path);
  if (!f) {
    std::cerr << "cannot write " << path << "\n";
    return 2;
  }
  f << "# synthetic spike waveforms: class, then " << kLength << " samples (V)\n";
  int seed = 0;
  for (const auto& c : kClasses) {
    const Levels lo = raw_of(c.low), mid = raw_of(c.mid), hi = raw_of(c.high);
    std::vector<Levels> inst;
    inst.push_back(mid);
    for (double t : {0.2, 0.4, 0.6, 0.8}) inst.push_back(lerp(lo, mid, t));
    inst.push_back(hi);
    for (double t : {0.2, 0.4, 0.6, 0.8}) inst.push_back(lerp(mid, hi, t));
    inst.push_back(lo);
    for (std::size_t i = 0; i < inst.size(); ++i) {
      const int k = 8 + static_cast<int>(i % 3);
      f << row(c.label, spike(inst[i], k, seed++)) << "\n";
    }
    // Second spike eight samples after the first crossing.
    auto bad = spike(mid, 9, seed++);
    bad[9 + 8] = 2.4;
    f << row(c.label, bad) << "\n";
  }
  return 0;
}
