#pragma once

#include <functional>
#include <vector>

namespace fowf::mpc {

struct OptimizerOptions {
  int max_iterations = 30;
  int memory = 6;                 // L-BFGS pairs
  double gradient_step = 1e-2;    // central difference step, in variable units
  double tolerance = 1e-6;        // projected-gradient infinity norm
  double relative_decrease = 1e-9;  // stop when the cost falls by less than this fraction
  double armijo = 1e-4;
  int max_backtracks = 20;
  int workers = 1;                // concurrent cost evaluations for the gradient
};

struct OptimizerResult {
  std::vector<double> x;
  double cost = 0.0;
  double initial_cost = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool iteration_limit = false;
  std::vector<double> history;  // accepted cost per iteration, starting with the initial point
};

using CostFunction = std::function<double(const std::vector<double>&)>;

/// Projects x onto [lower, upper] componentwise.
void project(std::vector<double>& x, const std::vector<double>& lower, const std::vector<double>& upper);

/// Central-difference gradient; steps that would leave the box become
/// one-sided. Evaluations run on `workers` threads, results are placed by
/// index so the output does not depend on scheduling.
std::vector<double> fd_gradient(const CostFunction& f, const std::vector<double>& x,
                                const std::vector<double>& lower, const std::vector<double>& upper,
                                double step, int workers, int* evaluations = nullptr);

/// Projected limited-memory quasi-Newton descent over a box. Non-finite or
/// throwing cost evaluations count as +inf. Only decreasing steps are
/// accepted, so the returned cost never exceeds the starting cost.
OptimizerResult minimize_box(const CostFunction& f, std::vector<double> x0, const std::vector<double>& lower,
                             const std::vector<double>& upper, const OptimizerOptions& opt = {});

}  // namespace fowf::mpc
