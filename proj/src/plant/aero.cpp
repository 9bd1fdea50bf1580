#include "fowf/plant/aero.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <sstream>

#include "fowf/error.hpp"

namespace fowf::plant {

namespace {

bool strictly_increasing(const std::vector<double>& axis) {
  for (std::size_t i = 1; i < axis.size(); ++i) {
    if (!(axis[i] > axis[i - 1])) return false;
  }
  return true;
}

bool is_uniform(const std::vector<double>& axis) {
  if (axis.size() < 3) return true;
  const double step = axis[1] - axis[0];
  for (std::size_t i = 2; i < axis.size(); ++i) {
    if (std::abs((axis[i] - axis[i - 1]) - step) > 1e-9 * std::abs(step)) return false;
  }
  return true;
}

// Heier-type empirical power coefficient; beta in degrees.
double empirical_cp(double lambda, double beta_deg) {
  if (lambda <= 0.0) return 0.0;
  const double inv = 1.0 / (lambda + 0.08 * beta_deg) - 0.035 / (beta_deg * beta_deg * beta_deg + 1.0);
  return 0.5176 * (116.0 * inv - 0.4 * beta_deg - 5.0) * std::exp(-21.0 * inv) + 0.0068 * lambda;
}

// Axial induction a in [0, 1/3] with 4 a (1 - a)^2 = c.
double induction_from_power(double c) {
  if (c <= 0.0) return 0.0;
  if (c >= AeroSurfaces::kBetzLimit) return 1.0 / 3.0;
  double lo = 0.0;
  double hi = 1.0 / 3.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (4.0 * mid * (1.0 - mid) * (1.0 - mid) < c) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double WindVector::magnitude() const { return std::sqrt(u * u + v * v + w * w); }

AeroSurfaces::AeroSurfaces(std::vector<double> lambda, std::vector<double> beta,
                           std::vector<double> cp, std::vector<double> ct)
    : lambda_(std::move(lambda)), beta_(std::move(beta)), cp_(std::move(cp)), ct_(std::move(ct)) {
  if (lambda_.size() < 2 || beta_.size() < 2) {
    throw ConfigError("plant", "aero tables need at least 2 points per axis");
  }
  if (!strictly_increasing(lambda_) || !strictly_increasing(beta_)) {
    throw ConfigError("plant", "aero table axes must be strictly increasing");
  }
  const std::size_t n = lambda_.size() * beta_.size();
  if (cp_.size() != n || ct_.size() != n) {
    throw ConfigError("plant", "aero tables are not rectangular");
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (!std::isfinite(cp_[k]) || !std::isfinite(ct_[k])) {
      throw ConfigError("plant", "aero tables contain non-finite values");
    }
    cp_[k] = std::clamp(cp_[k], 0.0, kBetzLimit);
    ct_[k] = std::clamp(ct_[k], 0.0, kMaxThrustCoefficient);
  }
  lambda_uniform_ = is_uniform(lambda_);
  beta_uniform_ = is_uniform(beta_);
  lambda_inv_step_ = 1.0 / (lambda_[1] - lambda_[0]);
  beta_inv_step_ = 1.0 / (beta_[1] - beta_[0]);
}

AeroSurfaces::AxisHit AeroSurfaces::locate(const std::vector<double>& axis, double value,
                                           bool uniform, double inv_step) {
  const std::size_t last = axis.size() - 1;
  if (!(value > axis.front())) return {0, 0.0, value < axis.front()};
  if (!(value < axis.back())) return {last - 1, 1.0, value > axis.back()};
  std::size_t i;
  if (uniform) {
    i = std::min(static_cast<std::size_t>((value - axis.front()) * inv_step), last - 1);
  } else {
    i = static_cast<std::size_t>(std::upper_bound(axis.begin(), axis.end(), value) - axis.begin()) - 1;
    i = std::min(i, last - 1);
  }
  return {i, (value - axis[i]) / (axis[i + 1] - axis[i]), false};
}

AeroCoefficients AeroSurfaces::lookup(double lambda, double beta) const {
  if (cp_.empty()) throw ConfigError("plant", "aero surfaces are empty");
  const AxisHit a = locate(lambda_, lambda, lambda_uniform_, lambda_inv_step_);
  const AxisHit b = locate(beta_, beta, beta_uniform_, beta_inv_step_);
  const std::size_t nb = beta_.size();
  const std::size_t k00 = a.index * nb + b.index;
  const std::size_t k10 = k00 + nb;
  const double w00 = (1.0 - a.frac) * (1.0 - b.frac);
  const double w01 = (1.0 - a.frac) * b.frac;
  const double w10 = a.frac * (1.0 - b.frac);
  const double w11 = a.frac * b.frac;
  AeroCoefficients out;
  out.cp = w00 * cp_[k00] + w01 * cp_[k00 + 1] + w10 * cp_[k10] + w11 * cp_[k10 + 1];
  out.ct = w00 * ct_[k00] + w01 * ct_[k00 + 1] + w10 * ct_[k10] + w11 * ct_[k10 + 1];
  out.clamped = a.clamped || b.clamped;
  return out;
}

AeroSurfaces make_default_surfaces(double rotor_efficiency) {
  if (!(rotor_efficiency > 0.0 && rotor_efficiency <= 1.0)) {
    throw ConfigError("plant", "rotor_efficiency must lie in (0, 1]");
  }
  std::vector<double> lambda;
  std::vector<double> beta;
  for (int i = 0; i <= 72; ++i) lambda.push_back(0.25 * i);
  for (int j = 0; j <= 100; ++j) beta.push_back(0.01 * j);
  std::vector<double> cp;
  std::vector<double> ct;
  cp.reserve(lambda.size() * beta.size());
  ct.reserve(lambda.size() * beta.size());
  for (double l : lambda) {
    for (double b : beta) {
      const double c = std::clamp(empirical_cp(l, b * 180.0 / std::numbers::pi), 0.0,
                                  AeroSurfaces::kBetzLimit);
      const double a = induction_from_power(c / rotor_efficiency);
      cp.push_back(c);
      ct.push_back(4.0 * a * (1.0 - a));
    }
  }
  return AeroSurfaces(std::move(lambda), std::move(beta), std::move(cp), std::move(ct));
}

AeroSurfaces load_aero_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("plant", "cannot open aero table '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw IoError("plant", "empty aero table '" + path + "'");
  line.erase(std::remove_if(line.begin(), line.end(), ::isspace), line.end());
  if (line != "lambda,beta,cp,ct") {
    throw IoError("plant", "aero table header must be 'lambda,beta,cp,ct' in '" + path + "'");
  }
  std::map<std::pair<double, double>, std::pair<double, double>> rows;
  std::map<double, int> lambdas;
  std::map<double, int> betas;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double l, b, cp, ct;
    if (!(ss >> l >> b >> cp >> ct)) {
      throw IoError("plant", "bad row " + std::to_string(lineno) + " in '" + path + "'");
    }
    rows[{l, b}] = {cp, ct};
    lambdas[l] = 0;
    betas[b] = 0;
  }
  std::vector<double> la;
  std::vector<double> be;
  for (const auto& [k, _] : lambdas) la.push_back(k);
  for (const auto& [k, _] : betas) be.push_back(k);
  if (rows.size() != la.size() * be.size()) {
    throw IoError("plant", "aero table '" + path + "' is not a full rectangular grid");
  }
  std::vector<double> cp;
  std::vector<double> ct;
  for (double l : la) {
    for (double b : be) {
      const auto& v = rows.at({l, b});
      cp.push_back(v.first);
      ct.push_back(v.second);
    }
  }
  return AeroSurfaces(std::move(la), std::move(be), std::move(cp), std::move(ct));
}

void save_aero_csv(const AeroSurfaces& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("plant", "cannot write aero table '" + path + "'");
  out << "lambda,beta,cp,ct\n" << std::setprecision(17);
  for (std::size_t i = 0; i < s.lambda_axis().size(); ++i) {
    for (std::size_t j = 0; j < s.beta_axis().size(); ++j) {
      out << s.lambda_axis()[i] << ',' << s.beta_axis()[j] << ',' << s.cp_at(i, j) << ','
          << s.ct_at(i, j) << '\n';
    }
  }
}

double tip_speed_ratio(double omega_r, double wind_speed, const TurbineParams& p) {
  if (!(wind_speed > 0.0)) throw DomainError("plant", "tip-speed ratio needs positive wind speed");
  return p.rotor_radius * omega_r / wind_speed;
}

double aero_power(double omega_r, double beta, const WindVector& wind, const TurbineParams& p,
                  const AeroSurfaces& s) {
  const double speed = wind.magnitude();
  if (speed <= 0.0) return 0.0;
  const AeroCoefficients c = s.lookup(tip_speed_ratio(omega_r, speed, p), beta);
  return 0.5 * p.air_density * p.swept_area() * c.cp * speed * speed * speed;
}

double aero_torque(double omega_r, double beta, const WindVector& wind, const TurbineParams& p,
                   const AeroSurfaces& s) {
  const double power = aero_power(omega_r, beta, wind, p, s);
  if (omega_r <= 0.0) {
    if (power != 0.0) {
      throw SingularityError("plant", "aerodynamic torque requested at zero rotor speed");
    }
    return 0.0;
  }
  return power / omega_r;
}

Thrust aero_thrust(double omega_r, double beta, const WindVector& wind, const TurbineParams& p,
                   const AeroSurfaces& s) {
  const double speed = wind.magnitude();
  if (speed <= 0.0) return {};
  const AeroCoefficients c = s.lookup(tip_speed_ratio(omega_r, speed, p), beta);
  return {0.5 * p.air_density * p.swept_area() * c.ct * speed * speed, c.ct, c.clamped};
}

}  // namespace fowf::plant
