#pragma once

// Sample sets: the seven reference tuples and seeded random draws.

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "randers/errors.hpp"
#include "randers/s3_model.hpp"

namespace randers {

/// One reference evaluation point.  `entries` lists the (i, k) matrix
/// entries, 0-based, that were originally tabulated for this tuple.
struct ReferenceSample {
  std::string label;
  ChartPoint p;
  TangentCoords y;
  double K = 0;
  std::array<std::string, 7> text;  // inputs as written, e.g. "1/137"
  std::vector<std::pair<int, int>> entries;

  MetricSpec spec() const { return MetricSpec::make(K, +1, +1); }
};

/// Parses a decimal or a rational "a/b".
inline double parse_rational(const std::string& s) {
  const auto slash = s.find('/');
  auto num = [&s](const std::string& t) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      throw ConfigError("not a number: '" + s + "'");
    }
    if (used != t.size()) throw ConfigError("not a number: '" + s + "'");
    return v;
  };
  if (slash == std::string::npos) return num(s);
  const double d = num(s.substr(slash + 1));
  if (d == 0) throw ConfigError("zero denominator in '" + s + "'");
  return num(s.substr(0, slash)) / d;
}

namespace detail {

inline ReferenceSample make_reference(std::string label, std::array<std::string, 7> text,
                                      std::vector<std::pair<int, int>> entries) {
  ReferenceSample r;
  r.label = std::move(label);
  r.p = {parse_rational(text[0]), parse_rational(text[1]), parse_rational(text[2])};
  r.y = {parse_rational(text[3]), parse_rational(text[4]), parse_rational(text[5])};
  r.K = parse_rational(text[6]);
  r.text = std::move(text);
  r.entries = std::move(entries);
  return r;
}

}  // namespace detail

/// The seven reference tuples (right hemisphere, positive drift sign).
inline const std::vector<ReferenceSample>& reference_samples() {
  static const std::vector<ReferenceSample> samples = {
      detail::make_reference("A", {"1.0", "2.0", "-3.0", "3.1416", "2.78", "137.0", "29.0"}, {{0, 0}, {1, 2}}),
      detail::make_reference("B", {"9.0", "7.0", "-5.0", "3.1416", "2.78", "137.0", "31.0"}, {{0, 1}}),
      detail::make_reference("C", {"9", "7", "-5", "31416", "278", "137", "31"}, {{0, 2}}),
      detail::make_reference("D", {"131", "17", "-59", "61413", "872", "1/137", "2"}, {{1, 0}}),
      detail::make_reference("E", {"1", "2", "-3", "71", "5", "1/137", "29"}, {{1, 1}, {2, 2}}),
      detail::make_reference("F", {"1", "2", "3", "5", "7", "11", "13"}, {{2, 0}}),
      detail::make_reference("G", {"199.7", "-2.4168", "3.5", "59", "79", "119", "357"}, {{2, 1}}),
  };
  return samples;
}

/// Reads the fixture format: header line, then
/// label,x,y,z,u,v,w,K,entries with entries like "1:1 2:3" (1-based).
inline std::vector<ReferenceSample> load_reference_samples(std::istream& is) {
  std::vector<ReferenceSample> out;
  std::string line;
  bool header = true;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 9) throw ConfigError("reference fixture line " + std::to_string(lineno) + ": need 9 fields");
    std::array<std::string, 7> text;
    for (int i = 0; i < 7; ++i) text[i] = cells[1 + i];
    std::vector<std::pair<int, int>> entries;
    std::stringstream es(cells[8]);
    std::string e;
    while (es >> e) {
      const auto colon = e.find(':');
      if (colon == std::string::npos) throw ConfigError("bad entry '" + e + "'");
      entries.emplace_back(std::stoi(e.substr(0, colon)) - 1, std::stoi(e.substr(colon + 1)) - 1);
    }
    out.push_back(detail::make_reference(cells[0], text, entries));
  }
  return out;
}

inline std::vector<ReferenceSample> load_reference_samples(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open " + path);
  return load_reference_samples(is);
}

/// Box from which random samples are drawn.
struct SampleRanges {
  double position = 3.0;  // x, y, z uniform in [-position, position]
  double velocity = 5.0;  // u, v, w uniform in [-velocity, velocity]
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Uniform in [-r, r] from (seed, index, stream, slot), independent of call order.
inline double hashed_uniform(std::uint64_t seed, std::uint64_t index, std::uint64_t stream, std::uint64_t slot,
                             double r) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ index);
  h = splitmix64(h ^ (stream << 32) ^ slot);
  const double unit = static_cast<double>(h >> 11) * 0x1.0p-53;
  return (2 * unit - 1) * r;
}

}  // namespace detail

struct RandomSample {
  ChartPoint p;
  TangentCoords y;
};

/// Sample `index` of the stream selected by `seed`.  Velocities shorter than
/// 1e-3 of the range are redrawn.
inline RandomSample random_sample(std::uint64_t seed, std::size_t index, const SampleRanges& ranges = {}) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    auto U = [&](std::uint64_t slot, double r) { return detail::hashed_uniform(seed, index, attempt, slot, r); };
    RandomSample s{{U(0, ranges.position), U(1, ranges.position), U(2, ranges.position)},
                   {U(3, ranges.velocity), U(4, ranges.velocity), U(5, ranges.velocity)}};
    const double n = std::sqrt(s.y.u * s.y.u + s.y.v * s.y.v + s.y.w * s.y.w);
    if (n > 1e-3 * ranges.velocity) return s;
  }
}

/// A second, independent tangent vector for sample `index` (flag edges and
/// similar), drawn in the velocity box.
inline TangentCoords random_tangent(std::uint64_t seed, std::size_t index, std::uint64_t stream,
                                    const SampleRanges& ranges = {}) {
  auto U = [&](std::uint64_t slot) { return detail::hashed_uniform(seed, index, 1000 + stream, slot, ranges.velocity); };
  return {U(0), U(1), U(2)};
}

inline std::vector<RandomSample> random_samples(std::uint64_t seed, std::size_t count,
                                                const SampleRanges& ranges = {}) {
  std::vector<RandomSample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_sample(seed, i, ranges));
  return out;
}

}  // namespace randers
