#pragma once

#include <vector>

#include "fowf/farm/closed_loop.hpp"
#include "fowf/wake/wake.hpp"

namespace fowf::farm {

/// Rows along the flow, columns side by side. Turbine index = column * rows + row.
struct Layout {
  int rows = 4;
  int columns = 2;
  double spacing = 882.0;  // m between rows

  int turbines() const { return rows * columns; }
  int index(int column, int row) const { return column * rows + row; }
  std::vector<double> stations() const;
  void validate() const;
};

/// Per-turbine quantities at one sample.
struct TurbineSample {
  ClosedLoopOutputs out;
  double inflow = 0.0;  // streamwise inflow after the upstream wakes (m/s)
  bool inflow_floored = false;
};

struct FarmSample {
  std::vector<TurbineSample> turbines;
  double power = 0.0;  // W, sum of generator powers
};

/// Closed-loop turbines coupled through one wake column per layout column.
class FarmModel {
 public:
  FarmModel(TurbineModel model, wake::WakeConfig wake, Layout layout);
  /// Adopts existing wake columns and turbine states.
  FarmModel(TurbineModel model, Layout layout, std::vector<wake::WakeColumn> wakes,
            std::vector<ClosedLoopState> states);

  const Layout& layout() const { return layout_; }
  const TurbineModel& model() const { return model_; }
  const std::vector<ClosedLoopState>& states() const { return states_; }
  std::vector<ClosedLoopState>& states() { return states_; }
  const std::vector<wake::WakeColumn>& wakes() const { return wakes_; }
  std::vector<wake::WakeColumn>& wakes() { return wakes_; }

  /// Equilibrium turbines and steady wakes for constant freestream and commands.
  void initialize(const std::vector<plant::WindVector>& freestream, const std::vector<double>& omega_c);

  /// Outputs at the current sample without advancing.
  FarmSample sample(const std::vector<plant::WindVector>& freestream,
                    const std::vector<double>& omega_c) const;

  /// Records the current sample, then advances turbines (inflow held over dt)
  /// and wakes (forced by the sampled C_T and inflow). Returns the sample.
  FarmSample step(const std::vector<plant::WindVector>& freestream, const std::vector<double>& omega_c,
                  double dt);

 private:
  TurbineModel model_;
  wake::WakeConfig wake_cfg_;
  Layout layout_;
  std::vector<ClosedLoopState> states_;
  std::vector<wake::WakeColumn> wakes_;
};

/// The same state on a stiff drivetrain (generator locked to the rotor).
ClosedLoopState to_stiff(const ClosedLoopState& x, const TurbineModel& stiff);

}  // namespace fowf::farm
