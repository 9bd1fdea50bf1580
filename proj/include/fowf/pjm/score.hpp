#pragma once

#include <span>
#include <string>
#include <vector>

namespace fowf::pjm {

struct ScoreConfig {
  double period = 10.0;      // s between samples
  double window = 300.0;     // s, T_W
  double max_delay = 300.0;  // s
  double pass_threshold = 0.75;
};

/// Generation and setpoint in MW on a uniform grid.
struct PowerPair {
  std::vector<double> p_gen;
  std::vector<double> p_sp;
  double start = 0.0;
  double period = 10.0;

  double duration() const { return period * static_cast<double>(p_sp.size()); }
  /// Throws ConfigError on length mismatch or a period other than `expected_period`.
  void validate(double expected_period = 10.0) const;
};

/// 1 - mean(|P_gen - P_sp|) / mean(P_sp).
double precision_score(const PowerPair& pair);

/// |delta - T_W| / T_W; DomainError outside [0, T_W].
double delay_score(double delta, double window = 300.0);

/// Pearson correlation, population normalization. DomainError on zero variance.
double correlation_score(std::span<const double> x, std::span<const double> y);

struct DelaySearch {
  double delta_star = 0.0;
  double s_d = 1.0;
  double s_c = 0.0;
  std::vector<double> combined;  // S_D + S_C per tested shift, index = delta / period
  bool tail_limited = false;     // some shifts ran past the data
  bool degenerate = false;       // zero variance at the chosen shift, S_C taken as 0
};

/// Exhaustive search over delta = 0, period, ..., max_delay. The setpoint
/// window starts at sample `first`; generation is read over the same window
/// shifted by delta. Ties go to the smaller delta.
DelaySearch find_delta_star(const PowerPair& pair, std::size_t first, const ScoreConfig& cfg = {});

struct IntervalScore {
  double t0 = 0.0;
  double delta_star = 0.0;
  double s_d = 0.0;
  double s_c = 0.0;
  double s_p = 0.0;
  double s = 0.0;
  bool tail_limited = false;
  bool degenerate = false;
};

struct Scorecard {
  std::vector<IntervalScore> intervals;
  double s_p = 0.0;
  double composite = 0.0;          // mean of interval scores, unclamped
  double composite_clamped = 0.0;  // clamped to [0, 1]
  bool pass = false;
};

/// S_P over the whole pair, then per disjoint T_W interval the delta search
/// and S = (S_D + S_C + S_P) / 3. Pass iff the clamped composite >= threshold.
Scorecard composite_score(const PowerPair& pair, const ScoreConfig& cfg = {});

struct RegulationSignal {
  std::vector<double> values;  // MW
  std::size_t clipped = 0;
};

/// mean + amplitude * raw, raw clipped to [-1, 1].
RegulationSignal normalize_regd_signal(std::span<const double> raw, double amplitude = 3.0,
                                       double mean = 30.0);

/// Averages (t, v) samples over [t0 + k period, t0 + (k+1) period).
/// Intervals without samples take the previous value.
std::vector<double> resample_mean(std::span<const double> t, std::span<const double> v, double t0,
                                  double t1, double period);

/// CSV `time_s,p_gen_mw,p_sp_mw`.
PowerPair read_power_pair(const std::string& path);
void write_power_pair(const std::string& path, const PowerPair& pair);

std::string scorecard_json(const Scorecard& card, int indent = 2);
void write_scorecard(const std::string& json_path, const std::string& csv_path, const Scorecard& card);

}  // namespace fowf::pjm
