#pragma once

// Closed and semi-closed forms for the mean-reverting affine model
// (beta < 0): the overshoot-mode probability G_0, the homogeneous basis of
// the Weber-reduced operator, its Green kernel, and the Volterra solution
// for the discounted transform G_q.

#include <algorithm>
#include <cmath>
#include <array>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <vector>

#include "fptlab/numerics.hpp"
#include "fptlab/specfun.hpp"

namespace fptlab {

inline constexpr double kResonanceThreshold = 1e-10;

namespace detail {

/// Throws a resonance error when D_{nu+1}(z(a)) is negligible next to
/// D_nu(z(a)).
inline void check_resonance(double log_d_nu_a, double log_d_nu1_a, double threshold) {
  if (!(log_d_nu1_a - log_d_nu_a >= std::log(threshold)))
    throw NumericalError(ErrorKind::Resonance, "D_{nu+1}(z(a)) is numerically zero", std::exp(log_d_nu1_a - log_d_nu_a));
}

inline double sqrt2_over_sigma_sqrt_b(const WeberContext& c) {
  return std::numbers::sqrt2 / (c.params.sigma * std::sqrt(c.b));
}

}  // namespace detail

/// G_0 and its derivative at the undiscounted order nu = nu_0:
///   G_0'(x) = -(sqrt2 lambda/(sigma sqrt b)) e^{p(x)-p(a)} D_nu(z(x)) / D_{nu+1}(z(a)).
class OvershootClosedForm {
 public:
  explicit OvershootClosedForm(const ModelParams& params, double resonance_threshold = kResonanceThreshold)
      : ctx_(make_context(params, 0.0)) {
    const double za = ctx_.z(ctx_.params.a);
    log_d_nu_a_ = log_pcf_d(ctx_.nu_q, za);
    log_d_nu1_a_ = log_pcf_d(ctx_.nu_q + 1.0, za);
    detail::check_resonance(log_d_nu_a_, log_d_nu1_a_, resonance_threshold);
    log_coef_ = std::log(ctx_.params.lambda * detail::sqrt2_over_sigma_sqrt_b(ctx_)) - ctx_.p(ctx_.params.a) -
                log_d_nu1_a_;
  }

  const WeberContext& context() const { return ctx_; }

  double prime(double x) const {
    return -std::exp(log_coef_ + ctx_.p(x) + log_pcf_d(ctx_.nu_q, ctx_.z(x)));
  }

  double value(double x) const {
    const double a = ctx_.params.a;
    require(x <= a, ErrorKind::Domain, "g0: x must be <= a");
    if (x == a) return 0.0;
    return composite_gauss([this](double y) { return -prime(y); }, x, a);
  }

  /// G_0 at increasing points xs (all <= a), accumulated from a leftwards
  /// one interval at a time.
  std::vector<double> values(const std::vector<double>& xs) const {
    const double a = ctx_.params.a;
    require(std::is_sorted(xs.begin(), xs.end()) && (xs.empty() || xs.back() <= a), ErrorKind::Domain,
            "g0 values: points must be increasing and <= a");
    std::vector<double> out(xs.size());
    double acc = 0.0, right = a;
    for (std::size_t i = xs.size(); i-- > 0;) {
      acc += composite_gauss([this](double y) { return -prime(y); }, xs[i], right);
      right = xs[i];
      out[i] = acc;
    }
    return out;
  }

  /// (sqrt2 lambda/(sigma sqrt b)) D_nu(z(a)) / D_{nu+1}(z(a))
  double slope() const { return std::exp(log_coef_ + ctx_.p(ctx_.params.a) + log_d_nu_a_); }

 private:
  WeberContext ctx_;
  double log_d_nu_a_ = 0.0;
  double log_d_nu1_a_ = 0.0;
  double log_coef_ = 0.0;
};

inline double g0_prime(const ModelParams& params, double x) {
  require(x < params.a, ErrorKind::Domain, "g0_prime: x must be < a");
  return OvershootClosedForm(params).prime(x);
}

/// P_x(J+) = G_0(x) = int_x^a (-G_0'(y)) dy.
inline double g0(const ModelParams& params, double x) { return OvershootClosedForm(params).value(x); }

/// P_x(C0) = 1 - G_0(x).
inline double creeping_prob(const ModelParams& params, double x) { return 1.0 - g0(params, x); }

/// Coefficient c in G_0(x) = c (a - x) + o(a - x) as x -> a-.
inline double boundary_slope(const ModelParams& params) { return OvershootClosedForm(params).slope(); }

/// psi_q = e^p D_nu(z), psi~_q = e^p D_nu(-z) and chi_q = psi~_q + r psi_q
/// with r = D_{nu+1}(-z(a)) / D_{nu+1}(z(a)), so that B_a chi_q = 0 for
/// B_a w = (sigma^2/2) w'(a) + (alpha - b a) w(a). Immutable after
/// construction.
class HomogeneousBasis {
 public:
  HomogeneousBasis(const ModelParams& params, double q, double resonance_threshold = kResonanceThreshold)
      : ctx_(make_context(params, q)) {
    const double a = ctx_.params.a;
    const double za = ctx_.z(a);
    const double nu = ctx_.nu_q;
    log_d_nu_a_ = log_pcf_d(nu, za);
    log_d_nu1_a_ = log_pcf_d(nu + 1.0, za);
    detail::check_resonance(log_d_nu_a_, log_d_nu1_a_, resonance_threshold);
    log_ratio_ = log_pcf_d(nu + 1.0, -za) - log_d_nu1_a_;
    boundary_psi_ = ctx_.params.sigma * std::sqrt(ctx_.b) / std::numbers::sqrt2 *
                    std::exp(ctx_.p(a) + log_d_nu1_a_);
    // K = W e^{-2p} is constant in x (Abel); evaluated directly at a.
    kernel_constant_ = ctx_.z1 * (std::exp(log_d_nu_a_ + log_pcf_d(nu + 1.0, -za)) +
                                  std::exp(log_d_nu1_a_ + log_pcf_d(nu, -za)));
    wronskian_a_ = kernel_constant_ * std::exp(2.0 * ctx_.p(a));
    log_w0_coef_ = std::log(ctx_.params.lambda * detail::sqrt2_over_sigma_sqrt_b(ctx_)) - ctx_.p(a) - log_d_nu1_a_;
  }

  const WeberContext& context() const { return ctx_; }
  double q() const { return ctx_.q; }
  double ratio() const { return std::exp(log_ratio_); }
  double log_ratio() const { return log_ratio_; }
  /// B_a psi_q = (sigma sqrt b / sqrt 2) e^{p(a)} D_{nu+1}(z(a)).
  double boundary_psi() const { return boundary_psi_; }
  /// W e^{-2p}, constant in x.
  double kernel_constant() const { return kernel_constant_; }

  /// log D_nu(z(x)) and log(D_nu(-z(x)) + r D_nu(z(x))).
  double log_d1(double x) const { return log_pcf_d(ctx_.nu_q, ctx_.z(x)); }
  double log_d2(double x) const {
    return log_d2_from(log_pcf_d(ctx_.nu_q, -ctx_.z(x)), log_pcf_d(ctx_.nu_q, ctx_.z(x)));
  }
  double log_d2_from(double log_d_minus, double log_d_plus) const {
    return detail::log_add_exp(log_d_minus, log_ratio_ + log_d_plus);
  }

  double log_psi(double x) const { return ctx_.p(x) + log_d1(x); }
  double psi(double x) const { return std::exp(log_psi(x)); }
  double psi_tilde(double x) const { return std::exp(ctx_.p(x) + log_pcf_d(ctx_.nu_q, -ctx_.z(x))); }
  double chi(double x) const { return std::exp(ctx_.p(x) + log_d2(x)); }

  double psi_prime(double x) const {
    const double z = ctx_.z(x);
    const auto d = pcf_d_pair(ctx_.nu_q, z);
    return std::exp(ctx_.p(x)) * (ctx_.dp(x) * d.d_nu + ctx_.z1 * (0.5 * z * d.d_nu - d.d_nu_plus_1));
  }

  double chi_prime(double x) const {
    const double z = ctx_.z(x);
    const auto dp = pcf_d_pair(ctx_.nu_q, z);
    const auto dm = pcf_d_pair(ctx_.nu_q, -z);
    const double r = ratio();
    const double d_plus = ctx_.z1 * (0.5 * z * dp.d_nu - dp.d_nu_plus_1);
    const double d_minus = ctx_.z1 * (0.5 * z * dm.d_nu + dm.d_nu_plus_1);
    return std::exp(ctx_.p(x)) * (ctx_.dp(x) * (dm.d_nu + r * dp.d_nu) + d_minus + r * d_plus);
  }

  /// W(x) = W(a) exp(2 (p(x) - p(a))), Abel's identity from the reference
  /// point a.
  double wronskian(double x) const { return wronskian_a_ * std::exp(2.0 * (ctx_.p(x) - ctx_.p(ctx_.params.a))); }

  /// psi chi' - psi' chi evaluated from the basis functions.
  double wronskian_direct(double x) const { return psi(x) * chi_prime(x) - psi_prime(x) * chi(x); }

  /// B_a applied to a function given its value and derivative at a.
  double boundary_operator(double value_a, double derivative_a) const {
    const auto& p = ctx_.params;
    return 0.5 * p.sigma * p.sigma * derivative_a + (p.alpha - ctx_.b * p.a) * value_a;
  }

  /// w_q^{(0)}(x) = -(sqrt2 lambda/(sigma sqrt b)) e^{p(x)-p(a)} D_{nu_q}(z(x)) / D_{nu_q+1}(z(a)).
  double w0(double x) const { return -std::exp(log_w0_coef_ + ctx_.p(x) + log_d1(x)); }
  double log_w0_coefficient() const { return log_w0_coef_; }

  /// Coefficients (c2, c1, c0) of L_q = c2 d^2 + c1 d + c0 at x.
  std::array<double, 3> operator_coefficients(double x) const {
    const auto& p = ctx_.params;
    const double drift = p.alpha - ctx_.b * x;
    return {0.5 * p.sigma * p.sigma, drift - 0.5 * p.eta * p.sigma * p.sigma,
            -ctx_.b - p.eta * drift - p.lambda - ctx_.q};
  }

 private:
  WeberContext ctx_;
  double log_d_nu_a_ = 0.0;
  double log_d_nu1_a_ = 0.0;
  double log_ratio_ = 0.0;
  double boundary_psi_ = 0.0;
  double kernel_constant_ = 0.0;
  double wronskian_a_ = 0.0;
  double log_w0_coef_ = 0.0;
};

inline double w0_term(const ModelParams& params, double q, double x) {
  require(x <= params.a, ErrorKind::Domain, "w0_term: x must be <= a");
  return HomogeneousBasis(params, q).w0(x);
}

/// Gamma_q(x, y) = 2/(sigma^2 W(y)) psi(min(x, y)) chi(max(x, y)), in log space.
inline double green_kernel(const HomogeneousBasis& basis, double x, double y) {
  const auto& c = basis.context();
  const double lo = std::min(x, y), hi = std::max(x, y);
  const double s2 = c.params.sigma * c.params.sigma;
  return 2.0 / (s2 * basis.kernel_constant()) *
         std::exp(c.p(lo) + c.p(hi) - 2.0 * c.p(y) + basis.log_d1(lo) + basis.log_d2(hi));
}

struct OperatorResidual {
  double value = 0.0;
  double scale = 0.0;  // sum of absolute term magnitudes
  double relative() const { return scale > 0.0 ? std::abs(value) / scale : std::abs(value); }
};

/// L_q u at x by central differences.
inline OperatorResidual weber_residual(const HomogeneousBasis& basis, const std::function<double(double)>& u,
                                       double x, double h) {
  const auto c = basis.operator_coefficients(x);
  const double u0 = u(x), u1 = fd::d1(u, x, h), u2 = fd::d2(u, x, h);
  return {c[0] * u2 + c[1] * u1 + c[2] * u0, std::abs(c[0] * u2) + std::abs(c[1] * u1) + std::abs(c[2] * u0)};
}

// ---------------------------------------------------------------------------
// Volterra solution

struct VolterraOptions {
  double tol = 1e-10;
  int max_iter = 100;
  int nodes_per_cell = 12;
  double max_cell = 0.1;
  /// Upper bound on the change of each log-scaled weight across one cell.
  double max_log_change = 2.0;
  /// Left cut where psi_q falls below this fraction of its maximum.
  double cut_ratio = 1e-12;
  std::optional<double> x_min;
  bool estimate_truncation = false;
  double resonance_threshold = kResonanceThreshold;
};

struct VolterraSolution {
  double q = 0.0;
  double x_min = 0.0;
  double a = 0.0;
  std::vector<double> grid;  // strictly increasing, ends at a
  std::vector<double> w_values;
  std::vector<double> w0_values;
  std::vector<double> f_values;  // int_x^a w at the nodes (= -G_q)
  int iterations = 0;
  double sup_delta = 0.0;
  bool converged = false;
  std::vector<double> delta_history;
  /// Mean ratio of successive sup-norm changes (NaN when < 3 iterations).
  double contraction_ratio = std::numeric_limits<double>::quiet_NaN();
  /// sup |G_q(cut) - G_q(doubled cut)| over the right half of the grid (NaN
  /// unless requested).
  double truncation_error = std::numeric_limits<double>::quiet_NaN();
  int nodes_per_cell = 0;

  std::size_t cells() const { return (grid.size() - 1) / static_cast<std::size_t>(nodes_per_cell - 1); }

  /// G_q(x) = -int_x^a w_q, from the cell interpolant of w_q.
  double g(double x) const {
    const std::size_t base = cell_base(x);
    const std::size_t m1 = nodes_per_cell - 1;
    const double half = 0.5 * (grid[base + m1] - grid[base]);
    const ChebyshevCell& cell = cell_rule();
    const double xi = std::clamp((x - grid[base]) / half - 1.0, -1.0, 1.0);
    const double to_x = half * cell.integrate_to(w_values.begin() + base, xi);
    const double whole = half * cell.integrate_to(w_values.begin() + base, 1.0);
    return -(f_values[base + m1] + whole - to_x);
  }

  /// w_q(x) from the cell interpolant.
  double w(double x) const {
    const std::size_t base = cell_base(x);
    const double xl = grid[base], xr = grid[base + nodes_per_cell - 1];
    return cell_rule().interpolate(w_values.begin() + base, std::clamp(2.0 * (x - xl) / (xr - xl) - 1.0, -1.0, 1.0));
  }

  /// Index of the first node of the cell containing x.
  std::size_t cell_base(double x) const {
    require(x >= x_min && x <= a, ErrorKind::Domain, "volterra solution: x outside [x_min, a]");
    const std::size_t m1 = nodes_per_cell - 1;
    std::size_t lo = 0, hi = cells();
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      if (grid[mid * m1] <= x) lo = mid; else hi = mid;
    }
    return lo * m1;
  }

  const ChebyshevCell& cell_rule() const {
    if (!rule_ || rule_->size() != nodes_per_cell) rule_ = std::make_shared<ChebyshevCell>(nodes_per_cell);
    return *rule_;
  }

 private:
  mutable std::shared_ptr<ChebyshevCell> rule_;
};

namespace detail {

inline double find_left_cut(const HomogeneousBasis& basis, double cut_ratio) {
  const double a = basis.context().params.a;
  const double target = std::log(cut_ratio);
  double best = basis.log_psi(a);
  for (int k = 1; k <= 200000; ++k) {
    const double x = a - 0.05 * k;
    const double lp = basis.log_psi(x);
    best = std::max(best, lp);
    if (lp < best + target) return x;
  }
  throw Error(ErrorKind::Convergence, "volterra: psi_q does not decay to the cut ratio");
}

/// Cell edges on [x_min, a], right to left, limiting the change of every
/// log-scaled weight across a cell.
inline std::vector<double> build_cells(const HomogeneousBasis& basis, double x_min, const VolterraOptions& opt) {
  const auto& c = basis.context();
  const double a = c.params.a;
  struct Logs {
    double s, t, prod;
  };
  auto logs = [&](double x) {
    const double l1 = basis.log_d1(x);
    const double l2 = basis.log_d2(x);
    return Logs{-c.p(x) + l1, -c.p(x) + l2, l1 + l2};
  };
  std::vector<double> edges{a};
  double x = a;
  Logs lx = logs(a);
  double h = opt.max_cell;
  while (x > x_min) {
    h = std::min(opt.max_cell, 1.5 * h);
    for (;;) {
      const double xl = std::max(x - h, x_min);
      const Logs ll = logs(xl);
      const double change = std::max({std::abs(ll.s - lx.s), std::abs(ll.t - lx.t), std::abs(ll.prod - lx.prod),
                                      std::abs(c.p(xl) - c.p(x))});
      if (change <= opt.max_log_change || h < 1e-6) {
        x = xl;
        lx = ll;
        break;
      }
      h *= 0.5;
    }
    if (x - x_min < 1e-9 * (a - x_min)) x = x_min;
    edges.push_back(x);
  }
  std::reverse(edges.begin(), edges.end());
  return edges;
}

inline VolterraSolution solve_on_cut(const HomogeneousBasis& basis, double x_min, const VolterraOptions& opt) {
  const auto& c = basis.context();
  const auto& p = c.params;
  const ChebyshevCell cell(opt.nodes_per_cell);
  const int m = cell.size();
  const auto edges = build_cells(basis, x_min, opt);
  const std::size_t nc = edges.size() - 1;
  const std::size_t n = nc * (m - 1) + 1;
  auto node = [m](std::size_t k, int j) { return k * (m - 1) + j; };

  VolterraSolution sol;
  sol.q = c.q;
  sol.x_min = x_min;
  sol.a = p.a;
  sol.nodes_per_cell = m;
  sol.grid.resize(n);
  std::vector<double> s(n), t(n), log_prod(n), half(nc);
  sol.w0_values.resize(n);
  for (std::size_t k = 0; k < nc; ++k) {
    half[k] = 0.5 * (edges[k + 1] - edges[k]);
    for (int j = 0; j < m; ++j) {
      const double x = (j == 0) ? edges[k] : (j == m - 1) ? edges[k + 1]
                                                         : edges[k] + half[k] * (cell.nodes()[j] + 1.0);
      sol.grid[node(k, j)] = x;
    }
  }
  const double log_coef = basis.log_w0_coefficient();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = sol.grid[i];
    const double z = c.z(x);
    const double l1 = log_pcf_d(c.nu_q, z);
    const double l2 = basis.log_d2_from(log_pcf_d(c.nu_q, -z), l1);
    s[i] = -c.p(x) + l1;
    t[i] = -c.p(x) + l2;
    log_prod[i] = l1 + l2;
    sol.w0_values[i] = -std::exp(log_coef + c.p(x) + l1);
  }

  const double gain = p.eta * c.q * 2.0 / (p.sigma * p.sigma * basis.kernel_constant());
  std::vector<double> w = sol.w0_values, f(n), A(n), B(n), w_next(n);

  auto integrate_f = [&] {
    f[n - 1] = 0.0;
    for (std::size_t k = nc; k-- > 0;) {
      const double right = f[node(k, m - 1)];
      for (int j = 0; j < m - 1; ++j) {
        double acc = 0.0;
        for (int i = 0; i < m; ++i) acc += cell.T(j, i) * w[node(k, i)];
        f[node(k, j)] = right + half[k] * acc;
      }
    }
  };

  for (int iter = 1; iter <= opt.max_iter; ++iter) {
    integrate_f();
    if (gain == 0.0) {
      w_next = sol.w0_values;
    } else {
      A[0] = 0.0;
      for (std::size_t k = 0; k < nc; ++k) {
        const double left = A[node(k, 0)];
        for (int j = 1; j < m; ++j) {
          const double sj = s[node(k, j)];
          double acc = 0.0;
          for (int i = 0; i < m; ++i) acc += cell.S(j, i) * std::exp(s[node(k, i)] - sj) * f[node(k, i)];
          A[node(k, j)] = std::exp(s[node(k, 0)] - sj) * left + half[k] * acc;
        }
      }
      B[n - 1] = 0.0;
      for (std::size_t k = nc; k-- > 0;) {
        const double right = B[node(k, m - 1)];
        for (int j = 0; j < m - 1; ++j) {
          const double tj = t[node(k, j)];
          double acc = 0.0;
          for (int i = 0; i < m; ++i) acc += cell.T(j, i) * std::exp(t[node(k, i)] - tj) * f[node(k, i)];
          B[node(k, j)] = std::exp(t[node(k, m - 1)] - tj) * right + half[k] * acc;
        }
      }
      for (std::size_t i = 0; i < n; ++i) w_next[i] = sol.w0_values[i] + gain * std::exp(log_prod[i]) * (A[i] + B[i]);
    }
    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) delta = std::max(delta, std::abs(w_next[i] - w[i]));
    w.swap(w_next);
    sol.iterations = iter;
    sol.sup_delta = delta;
    sol.delta_history.push_back(delta);
    if (!std::isfinite(delta)) break;
    if (delta <= opt.tol) {
      sol.converged = true;
      break;
    }
  }
  sol.w_values = w;
  integrate_f();
  sol.f_values = f;

  const auto& hist = sol.delta_history;
  if (hist.size() >= 3) {
    double log_sum = 0.0;
    int cnt = 0;
    for (std::size_t i = 1; i < hist.size(); ++i) {
      if (hist[i] > 0.0 && hist[i - 1] > 0.0) {
        log_sum += std::log(hist[i] / hist[i - 1]);
        ++cnt;
      }
    }
    if (cnt > 0) sol.contraction_ratio = std::exp(log_sum / cnt);
  }
  return sol;
}

}  // namespace detail

/// Neumann iteration for
///   w_q(x) = w_q^{(0)}(x) + eta q int_{x_min}^a Gamma_q(x, y) (int_y^a w_q) dy
/// on a fixed composite Chebyshev-Lobatto discretisation of [x_min, a].
/// The Green integral is split into its psi and chi halves, each carried as a
/// log-scaled running integral so no e^{p} factor is ever formed on its own.
inline VolterraSolution solve_wq(const HomogeneousBasis& basis, const VolterraOptions& opt = {}) {
  const double a = basis.context().params.a;
  const double x_min = opt.x_min ? *opt.x_min : detail::find_left_cut(basis, opt.cut_ratio);
  require(x_min < a, ErrorKind::Domain, "volterra: x_min must be below a");
  auto sol = detail::solve_on_cut(basis, x_min, opt);
  if (!sol.converged)
    throw NumericalError(ErrorKind::Convergence,
                         "volterra: no convergence after " + std::to_string(sol.iterations) + " iterations",
                         sol.sup_delta);
  if (opt.estimate_truncation) {
    const auto wide = detail::solve_on_cut(basis, a - 2.0 * (a - x_min), opt);
    double err = 0.0;
    const double mid = 0.5 * (x_min + a);
    for (double x : sol.grid)
      if (x >= mid) err = std::max(err, std::abs(sol.g(x) - wide.g(x)));
    sol.truncation_error = err;
  }
  return sol;
}

inline VolterraSolution solve_wq(const ModelParams& params, double q, const VolterraOptions& opt = {}) {
  return solve_wq(HomogeneousBasis(params, q, opt.resonance_threshold), opt);
}

inline double gq_from_solution(const VolterraSolution& sol, double x) {
  if (x < sol.x_min) throw Error(ErrorKind::Domain, "gq_from_solution: x below the solution grid");
  return sol.g(x);
}

// ---------------------------------------------------------------------------
// Residual checks

/// R_q(x) = (sigma^2/2) g'' + (alpha + beta x) g' + lambda I_q - (lambda + q) g + lambda e^{-eta (a - x)},
/// I_q(x) = int_x^a g(y) eta e^{-eta (y - x)} dy. Derivatives by finite
/// differences (one-sided when the stencil would cross a).
inline double oide_residual(const ModelParams& p, double q, const std::function<double(double)>& g, double x,
                            double h = 0.0) {
  require(x < p.a, ErrorKind::Domain, "oide_residual: x must be < a");
  if (h <= 0.0) h = fd::step(x);
  double g1, g2;
  if (x + 2.0 * h <= p.a) {
    g1 = fd::d1(g, x, h);
    g2 = fd::d2(g, x, h);
  } else {
    g1 = fd::d1_backward(g, x, h);
    g2 = fd::d2_backward(g, x, h);
  }
  const double iq = composite_gauss([&](double y) { return g(y) * p.eta * std::exp(-p.eta * (y - x)); }, x, p.a);
  return 0.5 * p.sigma * p.sigma * g2 + (p.alpha + p.beta * x) * g1 + p.lambda * iq - (p.lambda + q) * g(x) +
         p.lambda * std::exp(-p.eta * (p.a - x));
}

/// (sigma^2/2) g''(a-) + (alpha + beta a) g'(a-) + lambda, one-sided.
inline double compatibility_residual(const ModelParams& p, const std::function<double(double)>& g, double h = 1e-3) {
  return 0.5 * p.sigma * p.sigma * fd::d2_backward(g, p.a, h) + (p.alpha + p.beta * p.a) * fd::d1_backward(g, p.a, h) +
         p.lambda;
}

/// (sigma^2/2) g''' + (alpha + beta x - eta sigma^2/2) g'' + (beta - eta (alpha + beta x) - lambda - q) g' + eta q g.
inline OperatorResidual third_order_residual(const ModelParams& p, double q, const std::function<double(double)>& g,
                                             double x, double h = 1e-2) {
  double g1, g2, g3;
  if (x + 3.0 * h <= p.a) {
    g1 = fd::d1(g, x, h);
    g2 = fd::d2(g, x, h);
    g3 = fd::d3(g, x, h);
  } else {
    g1 = fd::d1_backward(g, x, h);
    g2 = fd::d2_backward(g, x, h);
    g3 = fd::d3_backward(g, x, h);
  }
  const double drift = p.alpha + p.beta * x;
  const double t3 = 0.5 * p.sigma * p.sigma * g3;
  const double t2 = (drift - 0.5 * p.eta * p.sigma * p.sigma) * g2;
  const double t1 = (p.beta - p.eta * drift - p.lambda - q) * g1;
  const double t0 = p.eta * q * g(x);
  return {t3 + t2 + t1 + t0, std::abs(t3) + std::abs(t2) + std::abs(t1) + std::abs(t0)};
}

/// m_q(x) = (G_0(x) - G_q(x)) / q.
inline double small_q_slope(const ModelParams& params, double x, double q, const VolterraOptions& opt = {}) {
  require(q > 0.0, ErrorKind::Domain, "small_q_slope: q must be > 0");
  const auto sol = solve_wq(params, q, opt);
  return (g0(params, x) - gq_from_solution(sol, x)) / q;
}

}  // namespace fptlab
