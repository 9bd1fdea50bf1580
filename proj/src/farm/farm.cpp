#include "fowf/farm/farm.hpp"

#include <sstream>

#include "fowf/error.hpp"
#include "fowf/lpv/lpv.hpp"

namespace fowf::farm {

std::vector<double> Layout::stations() const {
  std::vector<double> s(static_cast<std::size_t>(rows));
  for (int r = 0; r < rows; ++r) s[static_cast<std::size_t>(r)] = spacing * r;
  return s;
}

void Layout::validate() const {
  if (rows < 1 || columns < 1) throw ConfigError("farm", "layout needs at least one row and column");
  if (!(spacing > 0.0)) throw ConfigError("farm", "row spacing must be positive");
}

FarmModel::FarmModel(TurbineModel model, wake::WakeConfig wake, Layout layout)
    : model_(std::move(model)), wake_cfg_(wake), layout_(layout) {
  layout_.validate();
  wake_cfg_.rotor_radius = model_.params.rotor_radius;
  for (int c = 0; c < layout_.columns; ++c) wakes_.emplace_back(layout_.stations(), wake_cfg_);
  states_.resize(static_cast<std::size_t>(layout_.turbines()));
  for (auto& s : states_) s = ClosedLoopState::initial(1.0, 10.0, model_);
}

FarmModel::FarmModel(TurbineModel model, Layout layout, std::vector<wake::WakeColumn> wakes,
                     std::vector<ClosedLoopState> states)
    : model_(std::move(model)), layout_(layout), states_(std::move(states)), wakes_(std::move(wakes)) {
  layout_.validate();
  if (wakes_.size() != static_cast<std::size_t>(layout_.columns) ||
      states_.size() != static_cast<std::size_t>(layout_.turbines()))
    throw ConfigError("farm", "wake columns or states do not match the layout");
  wake_cfg_ = wakes_.front().config();
}

void FarmModel::initialize(const std::vector<plant::WindVector>& freestream,
                           const std::vector<double>& omega_c) {
  if (freestream.size() != static_cast<std::size_t>(layout_.columns) ||
      omega_c.size() != static_cast<std::size_t>(layout_.turbines()))
    throw ConfigError("farm", "freestream or command size does not match the layout");
  for (int c = 0; c < layout_.columns; ++c) {
    auto& col = wakes_[static_cast<std::size_t>(c)];
    const double u_front = freestream[static_cast<std::size_t>(c)].u;
    std::vector<wake::TurbineForcing> forcing(col.turbines());
    for (int r = 0; r < layout_.rows; ++r) {
      const auto i = static_cast<std::size_t>(layout_.index(c, r));
      col.set_steady(forcing);
      const double u = col.velocity(u_front, col.stations()[static_cast<std::size_t>(r)]);
      try {
        states_[i] = lpv::trim_guess(model_, omega_c[i], u);
      } catch (const SolverError&) {
        states_[i] = ClosedLoopState::initial(omega_c[i], u, model_);
      }
      const auto out = closed_loop_outputs(states_[i], omega_c[i], {u, 0.0, 0.0}, model_);
      forcing[static_cast<std::size_t>(r)] = {u, out.ct, 1.0};
    }
    col.set_steady(forcing);
  }
}

FarmSample FarmModel::sample(const std::vector<plant::WindVector>& freestream,
                             const std::vector<double>& omega_c) const {
  FarmSample fs;
  fs.turbines.resize(states_.size());
  for (int c = 0; c < layout_.columns; ++c) {
    const auto& col = wakes_[static_cast<std::size_t>(c)];
    const auto& fw = freestream[static_cast<std::size_t>(c)];
    for (int r = 0; r < layout_.rows; ++r) {
      const auto i = static_cast<std::size_t>(layout_.index(c, r));
      auto& ts = fs.turbines[i];
      ts.inflow = col.velocity(fw.u, col.stations()[static_cast<std::size_t>(r)], {}, &ts.inflow_floored);
      ts.out = closed_loop_outputs(states_[i], omega_c[i], {ts.inflow, fw.v, fw.w}, model_);
      fs.power += ts.out.power;
    }
  }
  return fs;
}

FarmSample FarmModel::step(const std::vector<plant::WindVector>& freestream,
                           const std::vector<double>& omega_c, double dt) {
  if (freestream.size() != static_cast<std::size_t>(layout_.columns) || omega_c.size() != states_.size())
    throw ConfigError("farm", "freestream or command size does not match the layout");
  FarmSample fs = sample(freestream, omega_c);
  std::vector<wake::TurbineForcing> forcing(static_cast<std::size_t>(layout_.rows));
  for (int c = 0; c < layout_.columns; ++c) {
    const auto& fw = freestream[static_cast<std::size_t>(c)];
    for (int r = 0; r < layout_.rows; ++r) {
      const auto i = static_cast<std::size_t>(layout_.index(c, r));
      const auto& ts = fs.turbines[i];
      try {
        states_[i] = step_closed_loop(states_[i], omega_c[i], {ts.inflow, fw.v, fw.w}, dt, model_);
      } catch (const Error& e) {
        std::ostringstream os;
        os << "turbine " << i << ": " << e.what();
        throw DivergenceError("farm", os.str());
      }
      forcing[static_cast<std::size_t>(r)] = {ts.inflow, ts.out.ct, 1.0};
    }
    wakes_[static_cast<std::size_t>(c)].step(forcing, dt);
  }
  return fs;
}

ClosedLoopState to_stiff(const ClosedLoopState& x, const TurbineModel& stiff) {
  ClosedLoopState y = x;
  plant::enforce_constraints(y.plant, stiff.params);
  return y;
}

}  // namespace fowf::farm
