#include "fowf/harness/inflow.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "fowf/csv.hpp"
#include "fowf/error.hpp"

namespace fowf::harness {

namespace {

std::size_t bracket(const std::vector<double>& t, double time) {
  if (time <= t.front()) return 0;
  if (time >= t.back()) return t.size() - 2;
  const auto it = std::upper_bound(t.begin(), t.end(), time);
  return static_cast<std::size_t>(it - t.begin()) - 1;
}

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(salt), static_cast<std::uint32_t>(salt >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

plant::WindVector InflowSeries::at(double time) const {
  if (t.size() == 1) return {u[0], v[0], w[0]};
  const std::size_t k = bracket(t, time);
  const double a = std::clamp((time - t[k]) / (t[k + 1] - t[k]), 0.0, 1.0);
  return {u[k] + a * (u[k + 1] - u[k]), v[k] + a * (v[k + 1] - v[k]), w[k] + a * (w[k + 1] - w[k])};
}

void InflowSeries::validate(const std::string& what) const {
  if (t.empty() || t.size() != u.size() || t.size() != v.size() || t.size() != w.size())
    throw ConfigError("harness", what + ": inflow columns are empty or of unequal length");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) throw ConfigError("harness", what + ": inflow time is not strictly increasing");
}

InflowSeries InflowSeries::scaled(double factor) const {
  InflowSeries s = *this;
  for (auto& x : s.u) x *= factor;
  for (auto& x : s.v) x *= factor;
  for (auto& x : s.w) x *= factor;
  return s;
}

std::vector<plant::WindVector> InflowBoundary::at(double time) const {
  std::vector<plant::WindVector> out;
  out.reserve(columns.size());
  for (const auto& c : columns) out.push_back(c.at(time));
  return out;
}

void InflowBoundary::check_covers(double duration) const {
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const auto& s = columns[c];
    if (s.t.front() > 1e-9 || s.t.back() < duration - 1e-9) {
      std::ostringstream os;
      os << "inflow for column " << c << " covers [" << s.t.front() << ", " << s.t.back() << "] s, need [0, "
         << duration << "]";
      throw ConfigError("harness", os.str());
    }
    for (double u : s.u)
      if (!(u > 0.0)) throw ConfigError("harness", "freestream speed must stay positive");
  }
}

InflowSeries synth_inflow(const SynthSpec& spec, std::uint64_t seed) {
  if (!(spec.ti >= 0.0)) throw ConfigError("harness", "turbulence intensity must be non-negative");
  if (!(spec.mean > 0.0) || !(spec.dt > 0.0) || !(spec.duration > 0.0) || !(spec.cutoff > 0.0))
    throw ConfigError("harness", "synthetic inflow needs positive mean, dt, duration and cutoff");
  auto rng = stream(seed, 0x1f1f);
  std::normal_distribution<double> g(0.0, 1.0);
  const double tau = 1.0 / (2.0 * M_PI * spec.cutoff);
  const double a = std::exp(-spec.dt / tau);
  const double b = std::sqrt(1.0 - a * a);
  const auto n = static_cast<std::size_t>(std::ceil(spec.duration / spec.dt)) + 1;
  InflowSeries s;
  s.t.resize(n);
  s.u.resize(n);
  s.v.resize(n);
  s.w.resize(n);
  double nu = g(rng), nv = g(rng), nw = g(rng);
  const double su = spec.ti * spec.mean;
  for (std::size_t k = 0; k < n; ++k) {
    s.t[k] = spec.dt * static_cast<double>(k);
    s.u[k] = spec.mean + su * nu;
    s.v[k] = spec.lateral_ratio * su * nv;
    s.w[k] = spec.vertical_ratio * su * nw;
    nu = a * nu + b * g(rng);
    nv = a * nv + b * g(rng);
    nw = a * nw + b * g(rng);
  }
  return s;
}

InflowSeries read_inflow_csv(const std::string& path, double max_gap) {
  const auto t = read_csv(path, "harness");
  InflowSeries s;
  s.t = t.column("time_s");
  s.u = t.column("u");
  s.v = t.column("v");
  s.w = t.column("w");
  s.validate("'" + path + "'");
  for (std::size_t i = 1; i < s.t.size(); ++i)
    if (s.t[i] - s.t[i - 1] > max_gap) {
      std::ostringstream os;
      os << "'" << path << "': gap of " << s.t[i] - s.t[i - 1] << " s at t = " << s.t[i - 1] << " s";
      throw ConfigError("harness", os.str());
    }
  return s;
}

InflowBoundary ingest_inflow(const std::vector<std::string>& paths, const std::vector<double>& scale) {
  if (paths.size() != scale.size()) throw ConfigError("harness", "one scale factor per inflow file");
  InflowBoundary b;
  for (std::size_t c = 0; c < paths.size(); ++c) {
    if (!(scale[c] > 0.0)) throw ConfigError("harness", "scale factors must be positive");
    b.columns.push_back(read_inflow_csv(paths[c]).scaled(scale[c]));
  }
  return b;
}

InflowBoundary synth_boundary(const SynthSpec& spec, const std::vector<double>& scale, std::uint64_t seed) {
  InflowBoundary b;
  for (std::size_t c = 0; c < scale.size(); ++c) {
    if (!(scale[c] > 0.0)) throw ConfigError("harness", "scale factors must be positive");
    b.columns.push_back(synth_inflow(spec, seed + 1000003ULL * c).scaled(scale[c]));
  }
  return b;
}

void write_inflow_csv(const std::string& path, const InflowSeries& s) {
  write_csv(path, {"time_s", "u", "v", "w"}, {&s.t, &s.u, &s.v, &s.w}, "harness");
}

double RawRegulation::at(double time) const {
  if (t.empty()) return 0.0;
  if (time <= t.front()) return value.front();
  const auto it = std::upper_bound(t.begin(), t.end(), time);
  return value[static_cast<std::size_t>(it - t.begin()) - 1];
}

RawRegulation synth_regd(const RegulationSpec& spec, std::uint64_t seed) {
  if (!(spec.time_constant > 0.0) || !(spec.period > 0.0) || !(spec.duration > 0.0))
    throw ConfigError("harness", "regulation signal needs positive time constant, period and duration");
  auto rng = stream(seed, 0x5e6d);
  std::normal_distribution<double> g(0.0, 1.0);
  // Second-order (two cascaded first-order) filtered noise: smooth, not periodic.
  const double a = std::exp(-spec.period / spec.time_constant);
  const double b = std::sqrt(1.0 - a * a);
  const auto n = static_cast<std::size_t>(std::ceil(spec.duration / spec.period)) + 1;
  RawRegulation r;
  double x1 = 0.0, x2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    r.t.push_back(spec.period * static_cast<double>(k));
    // the cascade output variance is (1 + a^2) / (1 - a^2) times that of x1
    const double z = x2 * std::sqrt((1.0 - a * a) / (1.0 + a * a));
    r.value.push_back(std::tanh(0.8 * z));
    x1 = a * x1 + b * g(rng);
    x2 = a * x2 + b * x1;
  }
  return r;
}

RawRegulation read_regd_csv(const std::string& path) {
  const auto t = read_csv(path, "harness");
  RawRegulation r;
  r.t = t.column("time_s");
  r.value = t.column("value");
  for (std::size_t i = 1; i < r.t.size(); ++i)
    if (!(r.t[i] > r.t[i - 1])) throw ConfigError("harness", "'" + path + "': time is not strictly increasing");
  if (r.t.empty()) throw ConfigError("harness", "'" + path + "' has no samples");
  return r;
}

void write_regd_csv(const std::string& path, const RawRegulation& r) {
  write_csv(path, {"time_s", "value"}, {&r.t, &r.value}, "harness");
}

}  // namespace fowf::harness
