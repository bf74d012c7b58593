#pragma once

// Spike-waveform front end for the texel array: load labelled waveforms,
// trigger on the first threshold crossing, sample four points after it, pick
// low/typical/high instances per class and map them onto texel inputs.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "memgate/errors.hpp"
#include "memgate/texel.hpp"

namespace memgate {

struct Waveform {
  int class_label = 0;
  std::vector<double> samples;
};

struct SpikeDataset {
  std::vector<Waveform> waveforms;
  std::string source;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

}  // namespace detail

// CSV, one waveform per row: integer class, then the samples in volts.
// Blank lines and lines starting with '#' are skipped.
inline SpikeDataset parse_dataset(std::istream& in, const std::string& source) {
  SpikeDataset d;
  d.source = source;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    Waveform w;
    std::size_t col = 0, start = 0;
    while (true) {
      const auto comma = t.find(',', start);
      const auto field = t.substr(start, comma == std::string_view::npos ? t.size() - start : comma - start);
      if (col == 0) {
        if (!detail::parse_number(field, w.class_label))
          throw ParseError(source + ": bad class label '" +
                               std::string(field) + "'",
                           line_no);
      } else {
        double v;
        if (!detail::parse_number(field, v) || !std::isfinite(v))
          throw ParseError(source + ": bad sample in column " +
                               std::to_string(col + 1),
                           line_no);
        w.samples.push_back(v);
      }
      ++col;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (w.samples.empty())
      throw ParseError(source + ": row has no samples", line_no);
    if (!d.waveforms.empty() && w.samples.size() != d.waveforms.front().samples.size()) {
      std::ostringstream os;
      os << source << ":" << line_no << ": " << w.samples.size() << " samples, expected "
         << d.waveforms.front().samples.size();
      throw ShapeError(os.str());
    }
    d.waveforms.push_back(std::move(w));
  }
  if (d.waveforms.empty()) throw ParseError(source + ": no waveforms", line_no);
  return d;
}

inline SpikeDataset load_dataset(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open dataset '" + path + "'");
  return parse_dataset(f, path);
}

inline constexpr std::size_t kSampleOffset = 7;
inline constexpr std::size_t kSampleCount = 4;

inline std::optional<std::size_t> first_crossing(const std::vector<double>& s, double v_trig) {
  for (std::size_t k = 0; k < s.size(); ++k)
    if (s[k] > v_trig) return k;
  return std::nullopt;
}

// Samples k+offset .. k+offset+3 after the first index k above v_trig.
inline std::vector<double> trigger_and_sample(const std::vector<double>& samples, double v_trig,
                                              std::size_t offset = kSampleOffset) {
  const auto k = first_crossing(samples, v_trig);
  if (!k) throw NoTriggerError("waveform never exceeds v_trig");
  if (*k + offset + kSampleCount > samples.size()) {
    std::ostringstream os;
    os << "waveform crosses at index " << *k << " but has only " << samples.size() << " samples";
    throw TruncationError(os.str());
  }
  return {samples.begin() + static_cast<std::ptrdiff_t>(*k + offset),
          samples.begin() + static_cast<std::ptrdiff_t>(*k + offset + kSampleCount)};
}

// A second rising crossing within [k+1, k+offset+3] means another spike
// overlaps the sampling window.
inline bool is_corrupted(const std::vector<double>& s, double v_trig,
                         std::size_t offset = kSampleOffset) {
  const auto k = first_crossing(s, v_trig);
  if (!k) return false;
  const std::size_t end = std::min(s.size() - 1, *k + offset + kSampleCount - 1);
  for (std::size_t i = *k + 1; i <= end; ++i)
    if (s[i] > v_trig && s[i - 1] <= v_trig) return true;
  return false;
}

inline SpikeDataset exclude_corrupted(const SpikeDataset& d, double v_trig,
                                      std::size_t offset = kSampleOffset) {
  SpikeDataset out;
  out.source = d.source;
  for (const auto& w : d.waveforms)
    if (!is_corrupted(w.samples, v_trig, offset)) out.waveforms.push_back(w);
  return out;
}

enum class Tag { L, M, H };

inline const char* tag_name(Tag t) {
  switch (t) {
    case Tag::L: return "L";
    case Tag::M: return "M";
    case Tag::H: return "H";
  }
  return "?";
}

struct TexelInputVector {
  int class_label = 0;
  Tag tag = Tag::M;
  std::size_t index = 0;  // row in the dataset it came from
  std::vector<double> raw;
  std::vector<double> adjusted;
  std::vector<double> rounded;
};

// 10 mV rounding, halves away from zero. The value is first snapped to 1e-8
// so that 0.745 stored as 0.74499999... still counts as a half.
inline double round_10mv(double v) {
  const double snapped = std::round(v * 1e8) / 1e8;
  return std::round(snapped * 100.0) / 100.0;
}

inline void adjust_and_round(TexelInputVector& t, double gain = 0.1, double offset = 0.66) {
  t.adjusted.clear();
  t.rounded.clear();
  for (double r : t.raw) {
    const double a = gain * r + offset;
    t.adjusted.push_back(a);
    t.rounded.push_back(round_10mv(a));
  }
}

// L, M and H instances of one class, ranked by the mean of their four raw
// samples. Ties keep dataset order; M is the lower median.
inline std::vector<TexelInputVector> select_lmh(const SpikeDataset& d, int class_label, double v_trig,
                                                std::size_t offset = kSampleOffset) {
  std::vector<TexelInputVector> cand;
  for (std::size_t i = 0; i < d.waveforms.size(); ++i) {
    const auto& w = d.waveforms[i];
    if (w.class_label != class_label) continue;
    TexelInputVector t;
    t.class_label = class_label;
    t.index = i;
    try {
      t.raw = trigger_and_sample(w.samples, v_trig, offset);
    } catch (const Error& e) {
      throw Error("class " + std::to_string(class_label) + ", row " + std::to_string(i + 1) + ": " +
                  e.what());
    }
    cand.push_back(std::move(t));
  }
  if (cand.size() < 3) {
    std::ostringstream os;
    os << "select_lmh: class " << class_label << " has " << cand.size() << " instances, need 3";
    throw RangeError(os.str());
  }
  auto mean = [](const TexelInputVector& t) {
    return std::accumulate(t.raw.begin(), t.raw.end(), 0.0) / static_cast<double>(t.raw.size());
  };
  std::stable_sort(cand.begin(), cand.end(),
                   [&](const auto& a, const auto& b) { return mean(a) < mean(b); });
  std::vector<TexelInputVector> out{cand.front(), cand[(cand.size() - 1) / 2], cand.back()};
  out[0].tag = Tag::L;
  out[1].tag = Tag::M;
  out[2].tag = Tag::H;
  return out;
}

struct ExperimentRow {
  int class_label = 0;
  Tag tag = Tag::M;
  std::vector<double> inputs;  // rounded texel inputs
  double v_out = 0.0;
  bool clipped = false;
  bool shared = false;  // same input vector as another row, evaluated once
};

struct ExperimentSettings {
  double v_trig = 1.5;
  double gain = 0.1;
  double offset = 0.66;
  std::size_t sample_offset = kSampleOffset;
};

inline std::vector<int> class_labels(const SpikeDataset& d) {
  std::vector<int> out;
  for (const auto& w : d.waveforms) out.push_back(w.class_label);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Rows come out class by class in ascending label order, L, M, H within a
// class. Corrupted waveforms are dropped first.
inline std::vector<ExperimentRow> run_experiment(const SpikeDataset& d, const TexelArrayConfig& array,
                                                 const ExperimentSettings& s = {}) {
  array.validate();
  if (array.texels.size() != kSampleCount)
    throw RangeError("run_experiment: the array needs exactly 4 texels");
  const auto clean = exclude_corrupted(d, s.v_trig, s.sample_offset);
  std::vector<ExperimentRow> rows;
  for (int label : class_labels(clean)) {
    for (auto& t : select_lmh(clean, label, s.v_trig, s.sample_offset)) {
      adjust_and_round(t, s.gain, s.offset);
      ExperimentRow r;
      r.class_label = label;
      r.tag = t.tag;
      r.inputs = t.rounded;
      rows.push_back(std::move(r));
    }
  }
  std::map<std::vector<double>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < rows.size(); ++i) groups[rows[i].inputs].push_back(i);
  for (const auto& [inputs, idx] : groups) {
    for (double v : inputs)
      if (!(v >= 0.0 && v <= array.vdd)) {
        const auto& r = rows[idx.front()];
        std::ostringstream os;
        os << "run_experiment: class " << r.class_label << " " << tag_name(r.tag) << " input " << v
           << " V outside [0, vdd]";
        throw RangeError(os.str());
      }
    const auto m = array_match(array, inputs);
    for (auto i : idx) {
      rows[i].v_out = m.v_out;
      rows[i].clipped = m.clipped;
      rows[i].shared = idx.size() > 1;
    }
  }
  return rows;
}

}  // namespace memgate
