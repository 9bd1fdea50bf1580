#include "fowf/wake/wake.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "fowf/error.hpp"

namespace fowf::wake {

namespace {

constexpr double kCtCeiling = 1.0 - 1e-6;

double softplus(double z) {
  if (z > 30.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

double initial_deficit(double u_inf, double ct) {
  if (!(ct >= 0.0 && ct < 1.0)) {
    std::ostringstream os;
    os << "thrust coefficient " << ct << " outside [0, 1)";
    throw DomainError("wake", os.str());
  }
  return u_inf * (1.0 - std::sqrt(1.0 - ct));
}

double wake_diameter(double kappa, double k_w, double rotor_radius) {
  return 1.0 + k_w * softplus(kappa / (rotor_radius * std::sqrt(2.0)));
}

double wake_diameter_slope(double kappa, double k_w, double rotor_radius) {
  const double s = rotor_radius * std::sqrt(2.0);
  return k_w * logistic(kappa / s) / s;
}

double pair_deficit(double delta_u0, double kappa, double k_w, double rotor_radius) {
  const double d = wake_diameter(kappa, k_w, rotor_radius);
  return delta_u0 / (d * d) * (1.0 + std::erf(kappa / (rotor_radius * std::sqrt(2.0))));
}

double aggregate_deficit(const std::vector<UpstreamTerm>& upstream, double rotor_radius) {
  double sum = 0.0;
  for (const auto& t : upstream) sum += pair_deficit(t.delta_u0, t.kappa, t.k_w, rotor_radius);
  return sum;
}

double super_gaussian_disk_average(double wake_diameter, double order) {
  constexpr int kPoints = 400;
  double sum = 0.0;
  for (int i = 0; i < kPoints; ++i) {
    const double rho = (i + 0.5) / kPoints;
    sum += 2.0 * rho * std::exp(-std::pow(rho / wake_diameter, order));
  }
  return sum / kPoints;
}

void WakeConfig::validate() const {
  auto bad = [](const std::string& m) { throw ConfigError("wake", m); };
  if (!(dx > 0.0)) bad("dx must be positive");
  if (!(gaussian_width > 0.0)) bad("gaussian_width must be positive");
  if (!(k_w >= 0.0)) bad("k_w must be non-negative");
  if (!(rotor_radius > 0.0)) bad("rotor_radius must be positive");
  if (!(extra_decay >= 0.0)) bad("extra_decay must be non-negative");
  if (!(super_gaussian_order > 0.0)) bad("super_gaussian_order must be positive");
  if (!(upstream_margin >= 0.0 && downstream_margin >= 0.0)) bad("margins must be non-negative");
}

WakeColumn::WakeColumn(std::vector<double> stations, const WakeConfig& cfg)
    : cfg_(cfg), stations_(std::move(stations)) {
  cfg_.validate();
  if (stations_.empty()) throw ConfigError("wake", "column has no turbines");
  if (!std::is_sorted(stations_.begin(), stations_.end()))
    throw ConfigError("wake", "stations must be ordered upstream to downstream");
  const double x0 = stations_.front() - cfg_.upstream_margin;
  const double x1 = stations_.back() + cfg_.downstream_margin;
  const auto n_cells = static_cast<std::size_t>(std::ceil((x1 - x0) / cfg_.dx)) + 1;
  x_.resize(n_cells);
  for (std::size_t k = 0; k < n_cells; ++k) x_[k] = x0 + cfg_.dx * static_cast<double>(k);

  const std::size_t nt = stations_.size();
  station_cell_.resize(nt);
  deficit_.assign(nt, std::vector<double>(n_cells, 0.0));
  gauss_.assign(nt, std::vector<double>(n_cells, 0.0));
  expansion_.assign(nt, std::vector<double>(n_cells, 0.0));
  shape_.assign(nt, std::vector<double>(n_cells, 0.0));
  scratch_.resize(n_cells);

  for (std::size_t n = 0; n < nt; ++n) {
    const auto ks = static_cast<std::size_t>(std::lround((stations_[n] - x0) / cfg_.dx));
    station_cell_[n] = ks;
    const double s = x_[ks];
    double mass = 0.0;
    for (std::size_t k = ks + 1; k < n_cells; ++k) {
      const double r = (x_[k] - s) / cfg_.gaussian_width;
      gauss_[n][k] = std::exp(-0.5 * r * r);
      mass += gauss_[n][k] * cfg_.dx;
    }
    if (mass <= 0.0) throw ConfigError("wake", "no grid cells behind the last station");
    for (auto& g : gauss_[n]) g /= mass;
    for (std::size_t k = ks; k < n_cells; ++k) {
      const double kappa = x_[k] - s;
      const double d = wake_diameter(kappa, cfg_.k_w, cfg_.rotor_radius);
      expansion_[n][k] = 2.0 * wake_diameter_slope(kappa, cfg_.k_w, cfg_.rotor_radius) / d;
      shape_[n][k] = super_gaussian_disk_average(d, cfg_.super_gaussian_order);
    }
  }
}

double WakeColumn::decay(std::size_t n, std::size_t k, double u) const {
  double w = cfg_.extra_decay;
  if (cfg_.expansion_decay) w += u * expansion_[n][k];
  return w;
}

double WakeColumn::source_strength(double u, double delta_u0) { return u * delta_u0; }

WakeStepInfo WakeColumn::step(const std::vector<TurbineForcing>& forcing, double dt) {
  if (forcing.size() != turbines()) throw ConfigError("wake", "forcing size does not match the column");
  if (!(dt > 0.0)) throw DomainError("wake", "dt must be positive");
  WakeStepInfo info;
  for (const auto& f : forcing) {
    if (!(f.inflow_speed >= 0.0) || !std::isfinite(f.inflow_speed))
      throw DomainError("wake", "advection speed must be finite and non-negative");
    info.courant = std::max(info.courant, f.inflow_speed * dt / cfg_.dx);
  }
  if (info.courant > 1.0 + 1e-12) {
    std::ostringstream os;
    os << "CFL violated: u*dt/dx = " << info.courant << " with dt = " << dt << " s, dx = " << cfg_.dx
       << " m";
    throw DomainError("wake", os.str());
  }

  const std::size_t nc = cells();
  for (std::size_t n = 0; n < turbines(); ++n) {
    const auto& f = forcing[n];
    double ct = f.ct;
    if (ct >= 1.0) {
      ct = kCtCeiling;
      info.ct_clamped = true;
    }
    ct = std::max(ct, 0.0);
    const double u = f.inflow_speed;
    const double du0 = initial_deficit(u, ct);
    const double s = source_strength(u, du0);
    const double c = u * dt / cfg_.dx;
    auto& field = deficit_[n];
    const auto& g = gauss_[n];
    const std::size_t ks = station_cell_[n];
    scratch_ = field;
    for (std::size_t k = 0; k < ks; ++k) field[k] = 0.0;
    field[ks] = du0;
    for (std::size_t k = ks + 1; k < nc; ++k) {
      double v = scratch_[k] - c * (scratch_[k] - scratch_[k - 1]);
      v *= std::exp(-decay(n, k, u) * dt);
      v += dt * s * g[k];
      field[k] = std::max(v, 0.0);
    }
  }
  return info;
}

void WakeColumn::set_steady(const std::vector<TurbineForcing>& forcing) {
  if (forcing.size() != turbines()) throw ConfigError("wake", "forcing size does not match the column");
  for (std::size_t n = 0; n < turbines(); ++n) {
    const double ct = std::clamp(forcing[n].ct, 0.0, kCtCeiling);
    const double u = forcing[n].inflow_speed;
    const double du0 = initial_deficit(u, ct);
    const double s = source_strength(u, du0);
    auto& field = deficit_[n];
    const std::size_t ks = station_cell_[n];
    std::fill(field.begin(), field.end(), 0.0);
    field[ks] = du0;
    const double a = u / cfg_.dx;
    for (std::size_t k = ks + 1; k < cells(); ++k) {
      const double denom = a + decay(n, k, u);
      field[k] = denom > 0.0 ? std::max((a * field[k - 1] + s * gauss_[n][k]) / denom, 0.0) : 0.0;
    }
  }
}

double WakeColumn::sample(const std::vector<double>& field, double xq) const {
  const double pos = (xq - x_.front()) / cfg_.dx;
  if (pos <= 0.0) return field.front();
  const auto k = static_cast<std::size_t>(pos);
  if (k + 1 >= field.size()) return field.back();
  const double t = pos - static_cast<double>(k);
  return (1.0 - t) * field[k] + t * field[k + 1];
}

double WakeColumn::velocity(double u_front, double x_query, const std::vector<double>& directions,
                            bool* floored) const {
  if (x_query < x_.front() - 1e-9 || x_query > x_.back() + 1e-9)
    throw DomainError("wake", "query point outside the wake grid");
  double u = u_front;
  for (std::size_t n = 0; n < turbines(); ++n) {
    if (stations_[n] >= x_query - 1e-9) continue;
    const double nx = directions.empty() ? 1.0 : directions[n];
    u -= nx * sample(deficit_[n], x_query) * sample(shape_[n], x_query);
  }
  if (floored) *floored = u < 0.0;
  return std::max(u, 0.0);
}

std::vector<double> WakeColumn::station_velocities(double u_front,
                                                   const std::vector<double>& directions) const {
  std::vector<double> out(turbines());
  for (std::size_t n = 0; n < turbines(); ++n) out[n] = velocity(u_front, x_[station_cell_[n]], directions);
  return out;
}

void WakeColumn::write_csv(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw IoError("wake", "cannot open " + path);
  f << "x";
  for (std::size_t n = 0; n < turbines(); ++n) f << ",deficit_" << n;
  f << '\n' << std::setprecision(10);
  for (std::size_t k = 0; k < cells(); ++k) {
    f << x_[k];
    for (std::size_t n = 0; n < turbines(); ++n) f << ',' << deficit_[n][k];
    f << '\n';
  }
}

double advection_speed(double u_inf, double ct) {
  return u_inf * std::sqrt(std::max(1.0 - std::clamp(ct, 0.0, kCtCeiling), 0.0));
}

void DelayLine::settle(double nu, double u_a) {
  if (!(kappa > 0.0) || !(u_a > 0.0)) throw DomainError("wake", "delay line needs kappa > 0 and U_a > 0");
  advection = u_a;
  tau = kappa / u_a;
  state = nu;
}

DelayStep step_delay_line(DelayLine& d, double nu, double u_a, double dt) {
  if (!(d.kappa > 0.0) || !(u_a > 0.0)) {
    std::ostringstream os;
    os << "non-positive delay: kappa = " << d.kappa << " m, U_a = " << u_a << " m/s";
    throw DomainError("wake", os.str());
  }
  const double tau = d.kappa / u_a;
  DelayStep out;
  if (d.tau > 0.0 && std::abs(tau - d.tau) > 0.5 * d.tau) out.fast_tau_change = true;
  out.zeta = 2.0 * d.state - nu;
  const double a = std::exp(-2.0 * dt / tau);
  d.state = a * d.state + (1.0 - a) * nu;
  d.tau = tau;
  d.advection = u_a;
  return out;
}

}  // namespace fowf::wake
