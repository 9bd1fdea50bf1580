#include "fowf/lpv/linalg.hpp"

#include <cmath>
#include <limits>

#include <unsupported/Eigen/MatrixFunctions>

#include "fowf/error.hpp"

namespace fowf::lpv {

MatrixXd solve_lyapunov(const MatrixXd& a, const MatrixXd& q) {
  const Eigen::Index n = a.rows();
  // vec(A^T X + X A) = (I kron A^T + A^T kron I) vec(X)
  const MatrixXd at = a.transpose();
  MatrixXd big = MatrixXd::Zero(n * n, n * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index row = j * n + i;
      for (Eigen::Index k = 0; k < n; ++k) {
        big(row, j * n + k) += at(i, k);  // (A^T X)_{ij} = sum_k A^T_{ik} X_{kj}
        big(row, k * n + i) += a(k, j);   // (X A)_{ij} = sum_k X_{ik} A_{kj}
      }
    }
  }
  const VectorXd rhs = -Eigen::Map<const VectorXd>(q.data(), n * n);
  Eigen::FullPivLU<MatrixXd> lu(big);
  if (!lu.isInvertible()) throw SolverError("lpv", "Lyapunov operator is singular");
  VectorXd sol = lu.solve(rhs);
  MatrixXd x = Eigen::Map<MatrixXd>(sol.data(), n, n);
  return 0.5 * (x + x.transpose());
}

double spectral_abscissa(const MatrixXd& a) {
  if (a.size() == 0) return -std::numeric_limits<double>::infinity();
  Eigen::EigenSolver<MatrixXd> es(a, false);
  return es.eigenvalues().real().maxCoeff();
}

bool is_hurwitz(const MatrixXd& a) { return spectral_abscissa(a) < 0.0; }

double care_residual(const MatrixXd& a, const MatrixXd& b, const MatrixXd& q, const MatrixXd& r,
                     const MatrixXd& p) {
  const MatrixXd g = b * r.ldlt().solve(b.transpose());
  const MatrixXd res = a.transpose() * p + p * a - p * g * p + q;
  const double qn = q.norm();
  return res.norm() / (qn > 0.0 ? qn : 1.0);
}

MatrixXd stabilizing_gain(const MatrixXd& a, const MatrixXd& b) {
  const Eigen::Index n = a.rows();
  // Shift so that -(A + alpha I) is Hurwitz, solve
  // (A + alpha I) W + W (A + alpha I)^T = 2 B B^T, then K = 2 B^T W^-1 moves
  // every closed-loop pole left of -alpha.
  Eigen::EigenSolver<MatrixXd> es(a, false);
  const double min_re = es.eigenvalues().real().minCoeff();
  const double alpha = std::max(0.0, -min_re) + 1e-3 * (1.0 + a.norm());
  const MatrixXd shifted = a + alpha * MatrixXd::Identity(n, n);
  // solve_lyapunov handles M^T X + X M + Q = 0; use M = -shifted^T.
  const MatrixXd w = solve_lyapunov(-shifted.transpose(), 2.0 * b * b.transpose());
  Eigen::LDLT<MatrixXd> ldlt(w);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw SolverError("lpv", "pair (A, B) is not stabilizable by pole shifting");
  }
  return 2.0 * ldlt.solve(b).transpose();
}

CareResult solve_care_doubling(const MatrixXd& a, const MatrixXd& b, const MatrixXd& q,
                               const MatrixXd& r, double tolerance) {
  const Eigen::Index n = a.rows();
  const MatrixXd eye = MatrixXd::Identity(n, n);
  const MatrixXd g = b * r.ldlt().solve(b.transpose());
  const double gamma = 1.5 * std::max(1.0, a.norm());  // above the spectral radius
  const MatrixXd ag = a - gamma * eye;
  Eigen::PartialPivLU<MatrixXd> ag_lu(ag);
  const MatrixXd ag_inv = ag_lu.inverse();
  const MatrixXd z1 = ag + g * ag_inv.transpose() * q;
  const MatrixXd z2 = ag.transpose() + q * ag_inv * g;
  const MatrixXd z1_inv = z1.partialPivLu().inverse();
  const MatrixXd z2_inv = z2.partialPivLu().inverse();
  MatrixXd e = eye + 2.0 * gamma * z1_inv;
  MatrixXd gk = 2.0 * gamma * ag_inv * g * z2_inv;
  MatrixXd hk = 2.0 * gamma * z2_inv * q * ag_inv;

  CareResult out;
  out.method = "doubling";
  for (int it = 1; it <= 60; ++it) {
    const MatrixXd w = (eye + gk * hk).partialPivLu().inverse();
    const MatrixXd e_next = e * w * e;
    const MatrixXd g_next = gk + e * w * gk * e.transpose();
    const MatrixXd h_next = hk + e.transpose() * hk * w * e;
    const double change = (h_next - hk).norm() / std::max(1.0, h_next.norm());
    e = e_next;
    gk = g_next;
    hk = h_next;
    out.iterations = it;
    if (!hk.allFinite()) break;
    if (change < 1e-15) break;
  }
  out.p = 0.5 * (hk + hk.transpose());
  out.k = r.ldlt().solve(b.transpose() * out.p);
  out.residual = care_residual(a, b, q, r, out.p);
  if (!out.p.allFinite() || !(out.residual < tolerance) || !is_hurwitz(a - b * out.k)) {
    throw SolverError("lpv", "doubling iteration did not converge (residual " +
                                 std::to_string(out.residual) + ")");
  }
  return out;
}

CareResult solve_care(const MatrixXd& a, const MatrixXd& b, const MatrixXd& q, const MatrixXd& r,
                      double tolerance) {
  if (a.rows() != a.cols() || b.rows() != a.rows() || q.rows() != a.rows() ||
      q.cols() != a.rows() || r.rows() != b.cols() || r.cols() != b.cols()) {
    throw ConfigError("lpv", "CARE dimensions are inconsistent");
  }
  Eigen::LDLT<MatrixXd> r_ldlt(r);
  if (r_ldlt.info() != Eigen::Success || !r_ldlt.isPositive() || r_ldlt.vectorD().minCoeff() <= 0.0) {
    throw ConfigError("lpv", "R must be positive definite");
  }
  std::string newton_failure;
  try {
    MatrixXd k = is_hurwitz(a) ? MatrixXd::Zero(b.cols(), a.rows()) : stabilizing_gain(a, b);
    MatrixXd p;
    CareResult out;
    out.method = "newton-kleinman";
    double prev_res = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= 100; ++it) {
      const MatrixXd acl = a - b * k;
      if (!is_hurwitz(acl)) throw SolverError("lpv", "Newton-Kleinman iterate lost stability");
      p = solve_lyapunov(acl, q + k.transpose() * r * k);
      k = r_ldlt.solve(b.transpose() * p);
      out.iterations = it;
      const double res = care_residual(a, b, q, r, p);
      if (res < 1e-3 * tolerance || (res < tolerance && res >= 0.5 * prev_res)) break;
      prev_res = res;
    }
    out.p = p;
    out.k = k;
    out.residual = care_residual(a, b, q, r, p);
    if (out.residual < tolerance && is_hurwitz(a - b * k)) return out;
    newton_failure = "residual " + std::to_string(out.residual);
  } catch (const SolverError& e) {
    newton_failure = e.what();
  }
  try {
    return solve_care_doubling(a, b, q, r, tolerance);
  } catch (const SolverError& e) {
    throw SolverError("lpv", "CARE synthesis failed: Newton-Kleinman (" + newton_failure +
                                 "), doubling (" + e.what() + ")");
  }
}

Discretized zoh_discretize(const MatrixXd& a, const MatrixXd& b, double dt) {
  if (!(dt > 0.0)) throw DomainError("lpv", "ZOH discretization needs dt > 0");
  const Eigen::Index n = a.rows();
  const Eigen::Index m = b.cols();
  MatrixXd block = MatrixXd::Zero(n + m, n + m);
  block.topLeftCorner(n, n) = a * dt;
  block.topRightCorner(n, m) = b * dt;
  const MatrixXd e = block.exp();
  return {e.topLeftCorner(n, n), e.topRightCorner(n, m)};
}

MatrixXd central_jacobian(const VectorFunction& f, const VectorXd& x, const VectorXd& steps) {
  const VectorXd f0 = f(x);
  MatrixXd jac(f0.size(), x.size());
  VectorXd xp = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = steps(j);
    xp(j) = x(j) + h;
    const VectorXd fp = f(xp);
    xp(j) = x(j) - h;
    const VectorXd fm = f(xp);
    xp(j) = x(j);
    jac.col(j) = (fp - fm) / (2.0 * h);
  }
  return jac;
}

}  // namespace fowf::lpv
