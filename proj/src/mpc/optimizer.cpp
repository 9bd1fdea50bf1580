#include "fowf/mpc/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <limits>
#include <thread>

#include "fowf/error.hpp"

namespace fowf::mpc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_eval(const CostFunction& f, const std::vector<double>& x) {
  try {
    const double v = f(x);
    return std::isfinite(v) ? v : kInf;
  } catch (const Error&) {
    return kInf;
  }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Variables at a bound with the gradient pushing outward are held.
std::vector<bool> free_set(const std::vector<double>& x, const std::vector<double>& g,
                           const std::vector<double>& lo, const std::vector<double>& hi) {
  std::vector<bool> free(x.size(), true);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double tol = 1e-12 * (1.0 + std::abs(hi[i] - lo[i]));
    if ((x[i] <= lo[i] + tol && g[i] > 0.0) || (x[i] >= hi[i] - tol && g[i] < 0.0)) free[i] = false;
  }
  return free;
}

double projected_gradient_norm(const std::vector<double>& x, const std::vector<double>& g,
                               const std::vector<double>& lo, const std::vector<double>& hi) {
  double n = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double moved = std::clamp(x[i] - g[i], lo[i], hi[i]) - x[i];
    n = std::max(n, std::abs(moved));
  }
  return n;
}

}  // namespace

void project(std::vector<double>& x, const std::vector<double>& lower, const std::vector<double>& upper) {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
}

std::vector<double> fd_gradient(const CostFunction& f, const std::vector<double>& x,
                                const std::vector<double>& lower, const std::vector<double>& upper,
                                double step, int workers, int* evaluations) {
  const std::size_t n = x.size();
  std::vector<double> plus(n), minus(n), hp(n), hm(n);
  auto job = [&](std::size_t k) {
    const std::size_t i = k / 2;
    std::vector<double> y = x;
    if (k % 2 == 0) {
      y[i] = std::min(x[i] + step, upper[i]);
      hp[i] = y[i] - x[i];
      plus[i] = safe_eval(f, y);
    } else {
      y[i] = std::max(x[i] - step, lower[i]);
      hm[i] = x[i] - y[i];
      minus[i] = safe_eval(f, y);
    }
  };
  const std::size_t jobs = 2 * n;
  const int w = std::max(1, std::min<int>(workers, static_cast<int>(jobs)));
  if (w == 1) {
    for (std::size_t k = 0; k < jobs; ++k) job(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < w; ++t)
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < jobs; k = next++) job(k);
      });
    for (auto& th : pool) th.join();
  }
  if (evaluations) *evaluations += static_cast<int>(jobs);
  std::vector<double> g(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double h = hp[i] + hm[i];
    if (h > 0.0 && std::isfinite(plus[i]) && std::isfinite(minus[i])) g[i] = (plus[i] - minus[i]) / h;
  }
  return g;
}

OptimizerResult minimize_box(const CostFunction& f, std::vector<double> x0, const std::vector<double>& lower,
                             const std::vector<double>& upper, const OptimizerOptions& opt) {
  if (x0.size() != lower.size() || x0.size() != upper.size())
    throw ConfigError("mpc", "optimizer bounds do not match the variable count");
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (!(lower[i] <= upper[i])) throw ConfigError("mpc", "optimizer bounds are not ordered");
  project(x0, lower, upper);

  OptimizerResult res;
  res.x = x0;
  res.cost = safe_eval(f, x0);
  res.evaluations = 1;
  res.initial_cost = res.cost;
  res.history.push_back(res.cost);
  if (!std::isfinite(res.cost)) throw SolverError("mpc", "cost is not finite at the starting point");

  std::deque<std::vector<double>> s_hist, y_hist;
  auto g = fd_gradient(f, res.x, lower, upper, opt.gradient_step, opt.workers, &res.evaluations);
  const std::size_t n = x0.size();

  for (int it = 0; it < opt.max_iterations; ++it) {
    if (projected_gradient_norm(res.x, g, lower, upper) < opt.tolerance) return res;
    const auto free = free_set(res.x, g, lower, upper);

    // two-loop recursion on the free variables
    std::vector<double> q(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) q[i] = free[i] ? g[i] : 0.0;
    const std::size_t m = s_hist.size();
    std::vector<double> alpha(m), rho(m);
    for (std::size_t k = m; k-- > 0;) {
      rho[k] = 1.0 / dot(y_hist[k], s_hist[k]);
      alpha[k] = rho[k] * dot(s_hist[k], q);
      for (std::size_t i = 0; i < n; ++i) q[i] -= alpha[k] * y_hist[k][i];
    }
    double gamma = 1.0;
    if (m > 0) gamma = dot(s_hist.back(), y_hist.back()) / dot(y_hist.back(), y_hist.back());
    for (auto& v : q) v *= gamma;
    for (std::size_t k = 0; k < m; ++k) {
      const double beta = rho[k] * dot(y_hist[k], q);
      for (std::size_t i = 0; i < n; ++i) q[i] += s_hist[k][i] * (alpha[k] - beta);
    }
    std::vector<double> d(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) d[i] = free[i] ? -q[i] : 0.0;
    if (dot(d, g) >= 0.0) {
      for (std::size_t i = 0; i < n; ++i) d[i] = free[i] ? -g[i] : 0.0;
      s_hist.clear();
      y_hist.clear();
    }
    // scale a steepest-descent first step to the box size
    double t = 1.0;
    if (m == 0) {
      double dmax = 0.0, span = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        dmax = std::max(dmax, std::abs(d[i]));
        span = std::max(span, upper[i] - lower[i]);
      }
      if (dmax > 0.0) t = std::min(1.0, 0.25 * span / dmax);
    }

    bool accepted = false;
    std::vector<double> x_new;
    double c_new = kInf;
    for (int b = 0; b <= opt.max_backtracks; ++b, t *= 0.5) {
      x_new = res.x;
      for (std::size_t i = 0; i < n; ++i) x_new[i] += t * d[i];
      project(x_new, lower, upper);
      double decrease = 0.0;
      for (std::size_t i = 0; i < n; ++i) decrease += g[i] * (x_new[i] - res.x[i]);
      c_new = safe_eval(f, x_new);
      ++res.evaluations;
      if (c_new < res.cost && c_new <= res.cost + opt.armijo * decrease) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (!s_hist.empty()) {
        s_hist.clear();
        y_hist.clear();
        continue;
      }
      return res;
    }
    const auto g_new = fd_gradient(f, x_new, lower, upper, opt.gradient_step, opt.workers, &res.evaluations);
    std::vector<double> s(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = x_new[i] - res.x[i];
      y[i] = g_new[i] - g[i];
    }
    if (dot(s, y) > 1e-12 * std::sqrt(dot(s, s) * dot(y, y))) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      if (static_cast<int>(s_hist.size()) > opt.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
      }
    }
    const double old = res.cost;
    res.x = std::move(x_new);
    res.cost = c_new;
    g = g_new;
    res.iterations = it + 1;
    res.history.push_back(res.cost);
    if (old - c_new <= opt.relative_decrease * std::abs(old)) return res;
  }
  res.iteration_limit = true;
  return res;
}

}  // namespace fowf::mpc
