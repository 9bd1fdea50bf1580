#include "fowf/lpv/lpv.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "fowf/error.hpp"

namespace fowf::lpv {

using farm::ClosedLoopState;
using plant::TurbineState;

void LinearModel::validate() const {
  const auto n = a.rows();
  if (a.cols() != n) throw ConfigError("lpv", "A must be square");
  if (b.rows() != n) throw ConfigError("lpv", "B row count must match A");
  if (c.cols() != n) throw ConfigError("lpv", "C column count must match A");
  if (d.rows() != c.rows() || d.cols() != b.cols()) throw ConfigError("lpv", "D shape must be outputs x inputs");
  if (x0.size() != n || u0.size() != b.cols() || y0.size() != c.rows()) {
    throw ConfigError("lpv", "operating-point offsets do not match the model dimensions");
  }
}

TrimResult find_trim(const Dynamics& f, const VectorXd& x_guess, const VectorXd& u,
                     const VectorXd& steps, const TrimOptions& opt) {
  const Eigen::Index n = x_guess.size();
  std::vector<Eigen::Index> free_idx;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (opt.free.empty() || opt.free[static_cast<std::size_t>(i)]) free_idx.push_back(i);
  }
  const auto nf = static_cast<Eigen::Index>(free_idx.size());
  auto scaled = [&](const VectorXd& r) { return VectorXd(r.cwiseQuotient(steps)); };

  TrimResult out;
  out.x = x_guess;
  VectorXd r = f(out.x, u);
  for (int it = 0; it < opt.max_iterations; ++it) {
    out.residual = r.cwiseAbs().maxCoeff();
    out.iterations = it;
    if (out.residual < opt.tolerance) return out;

    MatrixXd jac(n, nf);
    for (Eigen::Index k = 0; k < nf; ++k) {
      const Eigen::Index j = free_idx[static_cast<std::size_t>(k)];
      VectorXd xp = out.x;
      VectorXd xm = out.x;
      xp(j) += steps(j);
      xm(j) -= steps(j);
      // d(scaled residual) / d(scaled coordinate)
      jac.col(k) = (scaled(f(xp, u)) - scaled(f(xm, u))) / 2.0;
    }
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(jac);
    cod.setThreshold(1e-12);
    if (cod.rank() < std::min(n, nf)) out.singular = true;
    const VectorXd dz = cod.solve(-scaled(r));

    const double r0 = scaled(r).norm();
    double lambda = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls) {
      VectorXd trial = out.x;
      for (Eigen::Index k = 0; k < nf; ++k) {
        const Eigen::Index j = free_idx[static_cast<std::size_t>(k)];
        trial(j) += lambda * dz(k) * steps(j);
      }
      const VectorXd rt = f(trial, u);
      if (rt.allFinite() && scaled(rt).norm() < (1.0 - 1e-4 * lambda) * r0) {
        out.x = trial;
        r = rt;
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) break;
  }
  out.residual = r.cwiseAbs().maxCoeff();
  if (out.residual < opt.tolerance) return out;
  std::ostringstream msg;
  msg << "trim did not converge: residual norm " << out.residual << " after " << out.iterations
      << " iterations" << (out.singular ? " (singular Jacobian)" : "");
  throw SolverError("lpv", msg.str());
}

LinearModel linearize_at(const Dynamics& f, const OutputMap& g, const VectorXd& x0,
                         const VectorXd& u0, const VectorXd& x_steps, const VectorXd& u_steps) {
  LinearModel m;
  m.x0 = x0;
  m.u0 = u0;
  m.y0 = g(x0, u0);
  m.a = central_jacobian([&](const VectorXd& x) { return f(x, u0); }, x0, x_steps);
  m.b = central_jacobian([&](const VectorXd& u) { return f(x0, u); }, u0, u_steps);
  m.c = central_jacobian([&](const VectorXd& x) { return g(x, u0); }, x0, x_steps);
  m.d = central_jacobian([&](const VectorXd& u) { return g(x0, u); }, u0, u_steps);
  m.trim_residual = f(x0, u0).cwiseAbs().maxCoeff();
  return m;
}

VectorXd closed_loop_vector(const ClosedLoopState& s) {
  VectorXd v(ClosedLoopState::kSize);
  for (int i = 0; i < ClosedLoopState::kSize; ++i) v(i) = s.get(i);
  return v;
}

ClosedLoopState closed_loop_from_vector(const VectorXd& v, const farm::TurbineModel& m) {
  if (v.size() != ClosedLoopState::kSize) throw ConfigError("lpv", "closed-loop vector has wrong size");
  ClosedLoopState s;
  for (int i = 0; i < ClosedLoopState::kSize; ++i) s.set(i, v(i));
  s.ctrl.weight = control::sigmoid_weight(s.ctrl.wind_filtered, m.controller.blend);
  return s;
}

Dynamics closed_loop_dynamics(const farm::TurbineModel& m) {
  return [&m](const VectorXd& x, const VectorXd& u) {
    const auto s = closed_loop_from_vector(x, m);
    const auto d = farm::closed_loop_derivative(s, u(0), {u(1), u(2), u(3)}, m);
    return VectorXd(Eigen::Map<const VectorXd>(d.data(), ClosedLoopState::kSize));
  };
}

OutputMap closed_loop_outputs(const farm::TurbineModel& m) {
  return [&m](const VectorXd& x, const VectorXd& u) {
    const auto s = closed_loop_from_vector(x, m);
    const auto o = farm::closed_loop_outputs(s, u(0), {u(1), u(2), u(3)}, m);
    VectorXd y(3);
    y << o.power, o.omega_r, o.ct;
    return y;
  };
}

VectorXd closed_loop_state_steps(const farm::TurbineModel& m) {
  VectorXd h(ClosedLoopState::kSize);
  for (int i = 0; i < 3; ++i) {
    h(i) = 1e-3;                           // translations (m)
    h(i + 3) = 1e-5;                       // rotations (rad)
    h(i + TurbineState::kSurgeRate) = 1e-4;
    h(i + TurbineState::kRollRate) = 1e-6;
  }
  h(TurbineState::kTwist) = 1e-8;
  h(TurbineState::kOmegaR) = 1e-5;
  h(TurbineState::kOmegaG) = 1e-5 * m.params.gear_ratio;
  h(ClosedLoopState::kIntError) = 1e-5;
  h(ClosedLoopState::kWindFiltered) = 1e-3;
  return h;
}

ClosedLoopState trim_guess(const farm::TurbineModel& model, double omega_r, double wind_speed) {
  // Solved on the stiff drivetrain; a two-mass shaft then takes the static
  // twist that carries the aerodynamic torque.
  farm::TurbineModel m = model;
  m.params.drivetrain = plant::DrivetrainMode::kStiff;
  const auto& p = m.params;
  const plant::WindVector inflow{wind_speed, 0.0, 0.0};
  ClosedLoopState s = ClosedLoopState::initial(omega_r, wind_speed, m);
  s.plant[TurbineState::kSurge] = 0.0;
  s.plant[TurbineState::kPitch] = 0.0;
  const double k_surge = p.restoring(TurbineState::kSurge);
  const double k_pitch = p.restoring(TurbineState::kPitch);

  // With e = 0 and the platform at rest, everything is fixed by int_e: it sets
  // pitch and torque, pitch sets thrust, thrust sets the static platform
  // offsets, which feed back into the pitch law.
  auto settle = [&](double int_e) {
    s.ctrl.int_e = int_e;
    for (int it = 0; it < 50; ++it) {
      const double hub = plant::hub_relative_wind(s.plant, inflow, p).magnitude();
      const auto ev = control::evaluate_controller(omega_r, s.plant, hub, s.ctrl, m.controller, p);
      const auto loads = plant::rotor_loads(s.plant, ev.eta.beta, inflow, p, m.aero());
      const double surge = k_surge > 0.0 ? loads.thrust / k_surge : 0.0;
      const double pitch = k_pitch > 0.0 ? loads.thrust * p.hub_height / k_pitch : 0.0;
      const double change = std::abs(surge - s.plant[TurbineState::kSurge]) +
                            std::abs(pitch - s.plant[TurbineState::kPitch]);
      s.plant[TurbineState::kSurge] = surge;
      s.plant[TurbineState::kPitch] = pitch;
      if (change < 1e-12) break;
    }
    return farm::closed_loop_derivative(s, omega_r, inflow, m)[TurbineState::kOmegaR];
  };

  // Rotor acceleration falls as int_e grows (more torque, more pitch).
  double lo = -10.0;
  double hi = 10.0;
  while (settle(lo) < 0.0 && lo > -1e4) lo *= 4.0;
  while (settle(hi) > 0.0 && hi < 1e4) hi *= 4.0;
  if (settle(lo) < 0.0 || settle(hi) > 0.0) {
    throw SolverError("lpv", "no controller equilibrium at omega_r = " + std::to_string(omega_r) +
                                 " rad/s, wind = " + std::to_string(wind_speed) + " m/s");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (settle(mid) > 0.0 ? lo : hi) = mid;
  }
  settle(0.5 * (lo + hi));
  if (model.params.drivetrain == plant::DrivetrainMode::kTwoMass) {
    const double hub = plant::hub_relative_wind(s.plant, inflow, p).magnitude();
    const auto ev = control::evaluate_controller(omega_r, s.plant, hub, s.ctrl, m.controller, p);
    const auto loads = plant::rotor_loads(s.plant, ev.eta.beta, inflow, p, m.aero());
    s.plant[TurbineState::kTwist] = loads.torque / model.params.drivetrain_stiffness;
  }
  return s;
}

LinearModel linearize_turbine(const farm::TurbineModel& m, double omega_r, double wind_speed,
                              const VectorXd* warm) {
  if (!(omega_r > 0.0) || !(wind_speed > 0.0)) {
    throw DomainError("lpv", "operating point needs positive rotor speed and wind speed");
  }
  const auto f = closed_loop_dynamics(m);
  const auto g = closed_loop_outputs(m);
  const VectorXd steps = closed_loop_state_steps(m);
  VectorXd u(4);
  u << omega_r, wind_speed, 0.0, 0.0;

  // The scalar search is nearly exact; the neighbour's trim only stands in
  // when that search cannot bracket an equilibrium.
  VectorXd guess;
  try {
    guess = closed_loop_vector(trim_guess(m, omega_r, wind_speed));
  } catch (const SolverError&) {
    if (warm == nullptr || warm->size() != ClosedLoopState::kSize) throw;
    guess = *warm;
  }
  guess(TurbineState::kOmegaR) = omega_r;
  guess(ClosedLoopState::kWindFiltered) = wind_speed;
  guess(TurbineState::kOmegaG) = m.params.gear_ratio * omega_r;
  if (m.params.drivetrain == plant::DrivetrainMode::kStiff) guess(TurbineState::kTwist) = 0.0;

  TrimOptions opt;
  opt.free.assign(ClosedLoopState::kSize, true);
  opt.free[TurbineState::kOmegaR] = false;
  if (m.params.drivetrain == plant::DrivetrainMode::kStiff) {
    opt.free[TurbineState::kOmegaG] = false;
    opt.free[TurbineState::kTwist] = false;
  }
  const TrimResult trim = find_trim(f, guess, u, steps, opt);

  VectorXd u_steps(4);
  u_steps << 1e-5, 1e-3, 1e-3, 1e-3;
  LinearModel lm = linearize_at(f, g, trim.x, u, steps, u_steps);
  lm.omega_r = omega_r;
  lm.wind_speed = wind_speed;
  lm.trim_residual = trim.residual;
  return lm;
}

void LpvGrid::validate() const {
  if (omega_nodes.empty() || wind_nodes.empty()) throw ConfigError("lpv", "LPV grid has no nodes");
  if (!std::is_sorted(omega_nodes.begin(), omega_nodes.end()) ||
      std::adjacent_find(omega_nodes.begin(), omega_nodes.end()) != omega_nodes.end() ||
      !std::is_sorted(wind_nodes.begin(), wind_nodes.end()) ||
      std::adjacent_find(wind_nodes.begin(), wind_nodes.end()) != wind_nodes.end()) {
    throw ConfigError("lpv", "LPV grid axes must be strictly increasing");
  }
  if (models.size() != omega_nodes.size() * wind_nodes.size()) {
    throw ConfigError("lpv", "LPV grid is missing nodes: expected " +
                                 std::to_string(omega_nodes.size() * wind_nodes.size()) + ", got " +
                                 std::to_string(models.size()));
  }
  for (const auto& mdl : models) {
    mdl.validate();
    if (mdl.a.rows() != models.front().a.rows() || mdl.b.cols() != models.front().b.cols() ||
        mdl.c.rows() != models.front().c.rows()) {
      throw ConfigError("lpv", "LPV grid nodes have different dimensions");
    }
  }
}

namespace {

struct Bracket {
  std::size_t lo = 0;
  std::size_t hi = 0;
  double w = 0.0;  // weight of hi
  bool clamped = false;
};

Bracket bracket(const std::vector<double>& axis, double v) {
  Bracket b;
  if (axis.size() == 1) return b;
  if (v <= axis.front()) {
    b.clamped = v < axis.front();
    b.hi = 1;
    return b;
  }
  if (v >= axis.back()) {
    b.clamped = v > axis.back();
    b.lo = axis.size() - 2;
    b.hi = axis.size() - 1;
    b.w = 1.0;
    return b;
  }
  const auto it = std::upper_bound(axis.begin(), axis.end(), v);
  b.hi = static_cast<std::size_t>(it - axis.begin());
  b.lo = b.hi - 1;
  b.w = (v - axis[b.lo]) / (axis[b.hi] - axis[b.lo]);
  return b;
}

using Corners = ScheduleWeights;

Corners corners(const LpvGrid& grid, double omega_r, double wind_speed) {
  if (!std::isfinite(omega_r) || !std::isfinite(wind_speed)) {
    throw DomainError("lpv", "scheduling variables must be finite");
  }
  Bracket bo = bracket(grid.omega_nodes, omega_r);
  Bracket bw = bracket(grid.wind_nodes, wind_speed);
  if (grid.interpolation == Interpolation::kNearest) {
    bo.w = bo.w < 0.5 ? 0.0 : 1.0;
    bw.w = bw.w < 0.5 ? 0.0 : 1.0;
  }
  const std::size_t nw = grid.wind_nodes.size();
  Corners c;
  c.idx = {bo.lo * nw + bw.lo, bo.lo * nw + bw.hi, bo.hi * nw + bw.lo, bo.hi * nw + bw.hi};
  c.w = {(1 - bo.w) * (1 - bw.w), (1 - bo.w) * bw.w, bo.w * (1 - bw.w), bo.w * bw.w};
  c.clamped = bo.clamped || bw.clamped;
  return c;
}

}  // namespace

ScheduleWeights schedule_weights(const LpvGrid& grid, double omega_r, double wind_speed) {
  return corners(grid, omega_r, wind_speed);
}

LinearModel schedule(const LpvGrid& grid, double omega_r, double wind_speed, ScheduleInfo* info) {
  const Corners c = corners(grid, omega_r, wind_speed);
  if (info != nullptr) info->clamped = c.clamped;
  // Exact copy at nodes so the stored model comes back bit-for-bit.
  for (std::size_t k = 0; k < 4; ++k) {
    if (c.w[k] == 1.0) {
      LinearModel out = grid.models[c.idx[k]];
      return out;
    }
  }
  const LinearModel& m0 = grid.models[c.idx[0]];
  LinearModel out;
  out.a = MatrixXd::Zero(m0.a.rows(), m0.a.cols());
  out.b = MatrixXd::Zero(m0.b.rows(), m0.b.cols());
  out.c = MatrixXd::Zero(m0.c.rows(), m0.c.cols());
  out.d = MatrixXd::Zero(m0.d.rows(), m0.d.cols());
  out.x0 = VectorXd::Zero(m0.x0.size());
  out.u0 = VectorXd::Zero(m0.u0.size());
  out.y0 = VectorXd::Zero(m0.y0.size());
  for (std::size_t k = 0; k < 4; ++k) {
    if (c.w[k] == 0.0) continue;
    const LinearModel& mk = grid.models[c.idx[k]];
    out.a += c.w[k] * mk.a;
    out.b += c.w[k] * mk.b;
    out.c += c.w[k] * mk.c;
    out.d += c.w[k] * mk.d;
    out.x0 += c.w[k] * mk.x0;
    out.u0 += c.w[k] * mk.u0;
    out.y0 += c.w[k] * mk.y0;
    out.omega_r += c.w[k] * mk.omega_r;
    out.wind_speed += c.w[k] * mk.wind_speed;
    out.trim_residual = std::max(out.trim_residual, mk.trim_residual);
  }
  return out;
}

std::vector<double> default_omega_nodes() {
  std::vector<double> v;
  for (int k = 0; k <= 8; ++k) v.push_back((8.0 + 0.5 * k) * std::numbers::pi / 30.0);
  return v;
}

std::vector<double> default_wind_nodes() {
  std::vector<double> v;
  for (int k = 0; k <= 8; ++k) v.push_back(8.0 + 2.0 * k);
  return v;
}

LpvGrid build_lpv_grid(const farm::TurbineModel& m, const std::vector<double>& omega_nodes,
                       const std::vector<double>& wind_nodes, int workers) {
  LpvGrid grid;
  grid.omega_nodes = omega_nodes;
  grid.wind_nodes = wind_nodes;
  const std::size_t nw = wind_nodes.size();
  grid.models.resize(omega_nodes.size() * nw);

  // Each omega row is trimmed along the wind axis with the previous node as
  // the warm start; rows are independent.
  auto build_row = [&](std::size_t i) {
    VectorXd warm;
    for (std::size_t j = 0; j < nw; ++j) {
      LinearModel lm = linearize_turbine(m, omega_nodes[i], wind_nodes[j], j > 0 ? &warm : nullptr);
      warm = lm.x0;
      grid.models[i * nw + j] = std::move(lm);
    }
  };
  const std::size_t rows = omega_nodes.size();
  const auto nthreads = static_cast<std::size_t>(std::max(1, workers));
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < rows; ++i) build_row(i);
  } else {
    std::vector<std::exception_ptr> errors(rows);
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < rows; i += nthreads) {
          try {
            build_row(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  grid.validate();
  return grid;
}

LpvStep step_lpv(const LinearModel& m, const VectorXd& x, const VectorXd& u, double dt) {
  if (!(dt > 0.0)) throw DomainError("lpv", "step_lpv needs dt > 0");
  const Discretized z = zoh_discretize(m.a, m.b, dt);
  const VectorXd dx = x - m.x0;
  const VectorXd du = u - m.u0;
  LpvStep out;
  out.y = m.y0 + m.c * dx + m.d * du;
  out.x = m.x0 + z.ad * dx + z.bd * du;
  return out;
}

DiscreteLpv::DiscreteLpv(LpvGrid grid, double dt, int omega_index, int wind_index)
    : grid_(std::move(grid)), dt_(dt), omega_index_(omega_index), wind_index_(wind_index) {
  if (!(dt > 0.0)) throw DomainError("lpv", "discrete LPV needs dt > 0");
  grid_.validate();
  nodes_.reserve(grid_.models.size());
  for (const auto& m : grid_.models) {
    const Discretized z = zoh_discretize(m.a, m.b, dt);
    const Eigen::Index n = m.a.rows(), k = m.b.cols(), q = m.c.rows();
    Node nd{z.ad, z.bd, MatrixXd(n + q, n + k + 1)};
    nd.affine.block(0, 0, n, n) = z.ad;
    nd.affine.block(0, n, n, k) = z.bd;
    nd.affine.block(0, n + k, n, 1) = m.x0 - z.ad * m.x0 - z.bd * m.u0;
    nd.affine.block(n, 0, q, n) = m.c;
    nd.affine.block(n, n, q, k) = m.d;
    nd.affine.block(n, n + k, q, 1) = m.y0 - m.c * m.x0 - m.d * m.u0;
    nodes_.push_back(std::move(nd));
  }
}

void DiscreteLpv::step_into(const VectorXd& x, const VectorXd& u, Workspace& ws, ScheduleInfo* info) const {
  const Corners c = corners(grid_, x(omega_index_), x(wind_index_));
  if (info != nullptr) info->clamped = c.clamped;
  const Eigen::Index n = x.size(), k = u.size();
  const Eigen::Index q = nodes_.front().affine.rows() - n;
  ws.z.resize(n + k + 1);
  ws.z.head(n) = x;
  ws.z.segment(n, k) = u;
  ws.z(n + k) = 1.0;
  ws.out.setZero(n + q);
  for (std::size_t j = 0; j < 4; ++j) {
    if (c.w[j] == 0.0) continue;
    ws.out.noalias() += c.w[j] * (nodes_[c.idx[j]].affine * ws.z);
  }
}

LpvStep DiscreteLpv::step(const VectorXd& x, const VectorXd& u, ScheduleInfo* info) const {
  const Corners c = corners(grid_, x(omega_index_), x(wind_index_));
  if (info != nullptr) info->clamped = c.clamped;
  const Eigen::Index n = x.size();
  LpvStep out;
  out.x = VectorXd::Zero(n);
  out.y = VectorXd::Zero(grid_.models.front().c.rows());
  // Interpolating each node's affine map is the same as interpolating the
  // matrices and offsets, since the weights sum to one.
  for (std::size_t k = 0; k < 4; ++k) {
    if (c.w[k] == 0.0) continue;
    const LinearModel& m = grid_.models[c.idx[k]];
    const Node& nd = nodes_[c.idx[k]];
    const VectorXd dx = x - m.x0;
    const VectorXd du = u - m.u0;
    out.x += c.w[k] * (m.x0 + nd.ad * dx + nd.bd * du);
    out.y += c.w[k] * (m.y0 + m.c * dx + m.d * du);
  }
  return out;
}

namespace {

void write_block(std::ostream& os, const std::string& name, const MatrixXd& mat) {
  os << "# " << name << ' ' << mat.rows() << ' ' << mat.cols() << '\n';
  for (Eigen::Index i = 0; i < mat.rows(); ++i) {
    for (Eigen::Index j = 0; j < mat.cols(); ++j) {
      if (j) os << ',';
      os << mat(i, j);
    }
    os << '\n';
  }
}

MatrixXd read_block(std::istream& is, const std::string& name, const std::string& path) {
  std::string line;
  while (std::getline(is, line) && line.find_first_not_of(" \t\r") == std::string::npos) {
  }
  std::istringstream hs(line);
  std::string hash, got;
  Eigen::Index rows = 0, cols = 0;
  if (!(hs >> hash >> got >> rows >> cols) || hash != "#" || got != name) {
    throw IoError("lpv", "expected block '" + name + "' in '" + path + "'");
  }
  MatrixXd mat(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!std::getline(is, line)) throw IoError("lpv", "truncated block '" + name + "' in '" + path + "'");
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream rs(line);
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (!(rs >> mat(i, j))) throw IoError("lpv", "bad row in block '" + name + "' of '" + path + "'");
    }
  }
  return mat;
}

}  // namespace

void save_lpv_grid(const LpvGrid& grid, const std::string& dir) {
  grid.validate();
  std::filesystem::create_directories(dir);
  nlohmann::json idx;
  idx["format"] = "fowf-lpv-grid";
  idx["version"] = 1;
  idx["omega_nodes_rad_s"] = grid.omega_nodes;
  idx["wind_nodes_m_s"] = grid.wind_nodes;
  idx["interpolation"] = grid.interpolation == Interpolation::kBilinear ? "bilinear" : "nearest";
  idx["inputs"] = {"omega_c", "u_x", "u_y", "u_z"};
  idx["outputs"] = {"power_w", "omega_r", "ct"};
  nlohmann::json files = nlohmann::json::array();
  for (std::size_t i = 0; i < grid.omega_nodes.size(); ++i) {
    for (std::size_t j = 0; j < grid.wind_nodes.size(); ++j) {
      const LinearModel& m = grid.node(i, j);
      const std::string name = "node_" + std::to_string(i) + "_" + std::to_string(j) + ".csv";
      std::ofstream os(std::filesystem::path(dir) / name);
      if (!os) throw IoError("lpv", "cannot write '" + name + "' in '" + dir + "'");
      os << std::setprecision(17);
      write_block(os, "A", m.a);
      write_block(os, "B", m.b);
      write_block(os, "C", m.c);
      write_block(os, "D", m.d);
      write_block(os, "x0", m.x0);
      write_block(os, "u0", m.u0);
      write_block(os, "y0", m.y0);
      files.push_back({{"omega_index", i},
                       {"wind_index", j},
                       {"file", name},
                       {"omega_r", m.omega_r},
                       {"wind_speed", m.wind_speed},
                       {"trim_residual", m.trim_residual}});
    }
  }
  idx["nodes"] = files;
  std::ofstream js(std::filesystem::path(dir) / "index.json");
  if (!js) throw IoError("lpv", "cannot write index.json in '" + dir + "'");
  js << idx.dump(2) << '\n';
}

LpvGrid load_lpv_grid(const std::string& dir) {
  const auto index_path = std::filesystem::path(dir) / "index.json";
  std::ifstream js(index_path);
  if (!js) throw IoError("lpv", "cannot open '" + index_path.string() + "'");
  nlohmann::json idx;
  try {
    js >> idx;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("lpv", "malformed '" + index_path.string() + "': " + e.what());
  }
  LpvGrid grid;
  try {
    grid.omega_nodes = idx.at("omega_nodes_rad_s").get<std::vector<double>>();
    grid.wind_nodes = idx.at("wind_nodes_m_s").get<std::vector<double>>();
    grid.interpolation =
        idx.value("interpolation", std::string("bilinear")) == "nearest" ? Interpolation::kNearest
                                                                        : Interpolation::kBilinear;
    grid.models.resize(grid.omega_nodes.size() * grid.wind_nodes.size());
    std::vector<bool> seen(grid.models.size(), false);
    for (const auto& node : idx.at("nodes")) {
      const auto i = node.at("omega_index").get<std::size_t>();
      const auto j = node.at("wind_index").get<std::size_t>();
      if (i >= grid.omega_nodes.size() || j >= grid.wind_nodes.size()) {
        throw IoError("lpv", "node index out of range in '" + index_path.string() + "'");
      }
      const auto path = (std::filesystem::path(dir) / node.at("file").get<std::string>()).string();
      std::ifstream is(path);
      if (!is) throw IoError("lpv", "cannot open '" + path + "'");
      LinearModel m;
      m.a = read_block(is, "A", path);
      m.b = read_block(is, "B", path);
      m.c = read_block(is, "C", path);
      m.d = read_block(is, "D", path);
      m.x0 = read_block(is, "x0", path);
      m.u0 = read_block(is, "u0", path);
      m.y0 = read_block(is, "y0", path);
      m.omega_r = node.at("omega_r").get<double>();
      m.wind_speed = node.at("wind_speed").get<double>();
      m.trim_residual = node.value("trim_residual", 0.0);
      const std::size_t k = i * grid.wind_nodes.size() + j;
      grid.models[k] = std::move(m);
      seen[k] = true;
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
      throw IoError("lpv", "LPV grid in '" + dir + "' is missing nodes");
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError("lpv", "malformed '" + index_path.string() + "': " + e.what());
  }
  grid.validate();
  return grid;
}

}  // namespace fowf::lpv
