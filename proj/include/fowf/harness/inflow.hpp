#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fowf/plant/aero.hpp"

namespace fowf::harness {

/// Uniformly or non-uniformly sampled (u, v, w) series, linearly interpolated.
struct InflowSeries {
  std::vector<double> t, u, v, w;

  plant::WindVector at(double time) const;
  void validate(const std::string& what) const;
  InflowSeries scaled(double factor) const;
  double end_time() const { return t.empty() ? 0.0 : t.back(); }
};

/// Per-column freestream for the front turbine of each column.
struct InflowBoundary {
  std::vector<InflowSeries> columns;

  std::vector<plant::WindVector> at(double time) const;
  /// Throws ConfigError when some u <= 0 or coverage ends before `duration`.
  void check_covers(double duration) const;
};

struct SynthSpec {
  double mean = 13.5;        // m/s
  double ti = 0.05;          // sigma_u / mean
  double cutoff = 0.05;      // Hz, first-order filter corner
  double lateral_ratio = 0.5;   // sigma_v / sigma_u
  double vertical_ratio = 0.3;  // sigma_w / sigma_u
  double duration = 2900.0;  // s
  double dt = 0.1;           // s
};

/// Mean plus first-order filtered white noise, unit-variance before scaling.
InflowSeries synth_inflow(const SynthSpec& spec, std::uint64_t seed);

/// CSV `time_s,u,v,w`; time strictly increasing with gaps <= max_gap.
InflowSeries read_inflow_csv(const std::string& path, double max_gap = 5.0);

/// One file per column, each scaled by its factor.
InflowBoundary ingest_inflow(const std::vector<std::string>& paths, const std::vector<double>& scale);

/// Synthetic boundary with per-column seeds derived from `seed`.
InflowBoundary synth_boundary(const SynthSpec& spec, const std::vector<double>& scale, std::uint64_t seed);

void write_inflow_csv(const std::string& path, const InflowSeries& s);

/// Regulation signal in [-1, 1], sampled every `period` seconds.
struct RegulationSpec {
  double time_constant = 60.0;  // s, correlation time of the underlying process
  double period = 2.0;          // s
  double duration = 2900.0;     // s
  double amplitude = 3.0;       // MW
  double mean = 30.0;           // MW
};

struct RawRegulation {
  std::vector<double> t, value;  // value in [-1, 1]
  /// Zero-order hold.
  double at(double time) const;
};

RawRegulation synth_regd(const RegulationSpec& spec, std::uint64_t seed);
RawRegulation read_regd_csv(const std::string& path);
void write_regd_csv(const std::string& path, const RawRegulation& r);

}  // namespace fowf::harness
