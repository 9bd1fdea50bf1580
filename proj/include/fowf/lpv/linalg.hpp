#pragma once

#include <functional>
#include <string>

#include <Eigen/Dense>

namespace fowf::lpv {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Solves A^T X + X A + Q = 0 through the Kronecker form. Meant for the
/// small (n <= ~20) systems used in gain synthesis.
MatrixXd solve_lyapunov(const MatrixXd& a, const MatrixXd& q);

struct CareResult {
  MatrixXd p;       // stabilizing solution
  MatrixXd k;       // R^-1 B^T P
  double residual = 0.0;  // ||A^T P + P A - P B R^-1 B^T P + Q||_F / ||Q||_F
  int iterations = 0;
  std::string method;  // "newton-kleinman" or "doubling"
};

/// Continuous algebraic Riccati equation A^T P + P A - P B R^-1 B^T P + Q = 0.
/// Newton-Kleinman from a pole-shifting stabilizing gain, falling back to a
/// structure-preserving doubling iteration. Throws SolverError when neither
/// reaches `tolerance` or (A, B) cannot be stabilized.
CareResult solve_care(const MatrixXd& a, const MatrixXd& b, const MatrixXd& q, const MatrixXd& r,
                      double tolerance = 1e-10);

/// Doubling iteration alone, exposed for cross-checks.
CareResult solve_care_doubling(const MatrixXd& a, const MatrixXd& b, const MatrixXd& q,
                               const MatrixXd& r, double tolerance = 1e-10);

double care_residual(const MatrixXd& a, const MatrixXd& b, const MatrixXd& q, const MatrixXd& r,
                     const MatrixXd& p);

/// A gain K with A - B K Hurwitz, from the shifted Lyapunov construction.
MatrixXd stabilizing_gain(const MatrixXd& a, const MatrixXd& b);

double spectral_abscissa(const MatrixXd& a);
bool is_hurwitz(const MatrixXd& a);

struct Discretized {
  MatrixXd ad;
  MatrixXd bd;
};

/// Exact zero-order-hold discretization via the block matrix exponential.
Discretized zoh_discretize(const MatrixXd& a, const MatrixXd& b, double dt);

using VectorFunction = std::function<VectorXd(const VectorXd&)>;

/// Central finite-difference Jacobian with per-coordinate steps.
MatrixXd central_jacobian(const VectorFunction& f, const VectorXd& x, const VectorXd& steps);

}  // namespace fowf::lpv
