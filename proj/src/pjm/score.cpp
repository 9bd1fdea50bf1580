#include "fowf/pjm/score.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numeric>
#include <sstream>

#include "fowf/csv.hpp"
#include "fowf/error.hpp"

namespace fowf::pjm {

namespace {

std::size_t samples_per(double span, double period) {
  return static_cast<std::size_t>(std::lround(span / period));
}

}  // namespace

void PowerPair::validate(double expected_period) const {
  if (p_gen.size() != p_sp.size()) throw ConfigError("pjm", "P_gen and P_sp lengths differ");
  if (p_sp.empty()) throw ConfigError("pjm", "empty power series");
  if (std::abs(period - expected_period) > 1e-9) {
    std::ostringstream os;
    os << "sample period " << period << " s, expected " << expected_period << " s";
    throw ConfigError("pjm", os.str());
  }
}

double precision_score(const PowerPair& pair) {
  if (pair.p_gen.size() != pair.p_sp.size() || pair.p_sp.empty())
    throw ConfigError("pjm", "P_gen and P_sp must be non-empty and of equal length");
  const double n = static_cast<double>(pair.p_sp.size());
  const double mean_sp = std::accumulate(pair.p_sp.begin(), pair.p_sp.end(), 0.0) / n;
  if (mean_sp == 0.0) throw DomainError("pjm", "mean setpoint is zero");
  double err = 0.0;
  for (std::size_t i = 0; i < pair.p_sp.size(); ++i) err += std::abs(pair.p_gen[i] - pair.p_sp[i]);
  return 1.0 - err / n / mean_sp;
}

double delay_score(double delta, double window) {
  if (!(delta >= 0.0 && delta <= window)) {
    std::ostringstream os;
    os << "delay " << delta << " s outside [0, " << window << "]";
    throw DomainError("pjm", os.str());
  }
  return std::abs((delta - window) / window);
}

double correlation_score(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty()) throw DomainError("pjm", "correlation needs equal non-empty series");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  const double scale = 1e-24 * std::max({1.0, mx * mx, my * my}) * n;
  if (sxx <= scale || syy <= scale) throw DomainError("pjm", "undefined correlation: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

DelaySearch find_delta_star(const PowerPair& pair, std::size_t first, const ScoreConfig& cfg) {
  const std::size_t len = samples_per(cfg.window, cfg.period);
  const std::size_t shifts = samples_per(cfg.max_delay, cfg.period) + 1;
  if (first + len > pair.p_sp.size()) throw DomainError("pjm", "interval runs past the data");
  std::span<const double> sp(pair.p_sp.data() + first, len);
  DelaySearch out;
  double best = -1e300;
  for (std::size_t k = 0; k < shifts; ++k) {
    if (first + k + len > pair.p_gen.size()) {
      out.tail_limited = true;
      break;
    }
    std::span<const double> gen(pair.p_gen.data() + first + k, len);
    const double delta = static_cast<double>(k) * cfg.period;
    const double sd = delay_score(delta, cfg.window);
    double sc = 0.0;
    bool degenerate = false;
    try {
      sc = correlation_score(gen, sp);
    } catch (const DomainError&) {
      degenerate = true;
    }
    out.combined.push_back(sd + sc);
    if (sd + sc > best) {
      best = sd + sc;
      out.delta_star = delta;
      out.s_d = sd;
      out.s_c = sc;
      out.degenerate = degenerate;
    }
  }
  return out;
}

Scorecard composite_score(const PowerPair& pair, const ScoreConfig& cfg) {
  pair.validate(cfg.period);
  Scorecard card;
  card.s_p = precision_score(pair);
  const std::size_t len = samples_per(cfg.window, cfg.period);
  const std::size_t n_int = pair.p_sp.size() / len;
  if (n_int == 0) throw DomainError("pjm", "test shorter than one scoring interval");
  double sum = 0.0;
  for (std::size_t i = 0; i < n_int; ++i) {
    const auto d = find_delta_star(pair, i * len, cfg);
    IntervalScore s;
    s.t0 = pair.start + static_cast<double>(i * len) * cfg.period;
    s.delta_star = d.delta_star;
    s.s_d = d.s_d;
    s.s_c = d.s_c;
    s.s_p = card.s_p;
    s.s = (s.s_d + s.s_c + s.s_p) / 3.0;
    s.tail_limited = d.tail_limited;
    s.degenerate = d.degenerate;
    sum += s.s;
    card.intervals.push_back(s);
  }
  card.composite = sum / static_cast<double>(n_int);
  card.composite_clamped = std::clamp(card.composite, 0.0, 1.0);
  card.pass = card.composite_clamped >= cfg.pass_threshold;
  return card;
}

RegulationSignal normalize_regd_signal(std::span<const double> raw, double amplitude, double mean) {
  RegulationSignal out;
  out.values.reserve(raw.size());
  for (double r : raw) {
    const double c = std::clamp(r, -1.0, 1.0);
    if (c != r) ++out.clipped;
    out.values.push_back(mean + amplitude * c);
  }
  return out;
}

std::vector<double> resample_mean(std::span<const double> t, std::span<const double> v, double t0,
                                  double t1, double period) {
  if (t.size() != v.size()) throw DomainError("pjm", "time and value lengths differ");
  const std::size_t n = samples_per(t1 - t0, period);
  std::vector<double> out(n, 0.0);
  std::vector<std::size_t> count(n, 0);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double rel = (t[i] - t0) / period;
    if (rel < -1e-9) continue;
    const auto k = static_cast<std::size_t>(std::floor(rel + 1e-9));
    if (k >= n) continue;
    out[k] += v[i];
    ++count[k];
  }
  double last = v.empty() ? 0.0 : v.front();
  for (std::size_t k = 0; k < n; ++k) {
    if (count[k]) {
      out[k] /= static_cast<double>(count[k]);
      last = out[k];
    } else {
      out[k] = last;
    }
  }
  return out;
}

PowerPair read_power_pair(const std::string& path) {
  const auto t = read_csv(path, "pjm");
  const auto& time = t.column("time_s");
  PowerPair p;
  p.p_gen = t.column("p_gen_mw");
  p.p_sp = t.column("p_sp_mw");
  if (time.size() < 2) throw IoError("pjm", "'" + path + "' needs at least two samples");
  p.start = time.front();
  p.period = time[1] - time[0];
  for (std::size_t i = 1; i < time.size(); ++i)
    if (std::abs(time[i] - time[i - 1] - p.period) > 1e-6)
      throw IoError("pjm", "'" + path + "' is not uniformly sampled");
  return p;
}

void write_power_pair(const std::string& path, const PowerPair& pair) {
  std::vector<double> time(pair.p_sp.size());
  for (std::size_t i = 0; i < time.size(); ++i) time[i] = pair.start + pair.period * static_cast<double>(i);
  write_csv(path, {"time_s", "p_gen_mw", "p_sp_mw"}, {&time, &pair.p_gen, &pair.p_sp}, "pjm");
}

std::string scorecard_json(const Scorecard& card, int indent) {
  nlohmann::json j;
  j["precision"] = card.s_p;
  j["composite"] = card.composite;
  j["composite_clamped"] = card.composite_clamped;
  j["pass"] = card.pass;
  j["intervals"] = nlohmann::json::array();
  for (const auto& s : card.intervals) {
    j["intervals"].push_back({{"t0", s.t0},
                              {"delta_star", s.delta_star},
                              {"delay", s.s_d},
                              {"correlation", s.s_c},
                              {"precision", s.s_p},
                              {"score", s.s},
                              {"tail_limited", s.tail_limited},
                              {"degenerate_variance", s.degenerate}});
  }
  return j.dump(indent);
}

void write_scorecard(const std::string& json_path, const std::string& csv_path, const Scorecard& card) {
  std::ofstream js(json_path);
  if (!js) throw IoError("pjm", "cannot write '" + json_path + "'");
  js << scorecard_json(card) << '\n';
  std::vector<double> t0, ds, sd, sc, sp, s;
  for (const auto& i : card.intervals) {
    t0.push_back(i.t0);
    ds.push_back(i.delta_star);
    sd.push_back(i.s_d);
    sc.push_back(i.s_c);
    sp.push_back(i.s_p);
    s.push_back(i.s);
  }
  write_csv(csv_path, {"t0_s", "delta_star_s", "delay", "correlation", "precision", "score"},
            {&t0, &ds, &sd, &sc, &sp, &s}, "pjm");
}

}  // namespace fowf::pjm
