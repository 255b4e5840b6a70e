#pragma once

// Parabolic-cylinder functions D_nu(z) for nu <= 0 and the Weber-reduction
// quantities of the mean-reverting affine model.

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>

#include "fptlab/core.hpp"
#include "fptlab/model.hpp"

namespace fptlab {

inline constexpr double kPcfTolerance = 1e-10;

namespace detail {

inline double log_add_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (std::isinf(b) && b < 0) return a;
  return a + std::log1p(std::exp(b - a));
}

// One rule per thread: integrate() is non-const and extends its tables lazily.
inline boost::math::quadrature::tanh_sinh<double>& tanh_sinh_rule() {
  thread_local boost::math::quadrature::tanh_sinh<double> rule(15);
  return rule;
}

inline boost::math::quadrature::exp_sinh<double>& exp_sinh_rule() {
  thread_local boost::math::quadrature::exp_sinh<double> rule(12);
  return rule;
}

/// log of  int_0^inf t^{-nu-1} exp(-z t - t^2/2) dt  for nu < 0.
///
/// The integrand exp(g(t)), g = c log t - z t - t^2/2 with c = -nu-1, is
/// split at its interior maximum t_s (or a unit-scale point when g is
/// monotone); each panel is normalised by its own peak so no panel can
/// overflow. For -1 < nu < 0 the t^c singularity at 0 is removed by
/// t = u^{1/(-nu)}.
inline double log_pcf_integral(double nu, double z, double tol, double* rel_error) {
  const double c = -nu - 1.0;
  const double m = -nu;
  auto logt_term = [c](double t) { return c == 0.0 ? 0.0 : c * std::log(t); };
  auto g = [&](double t) { return logt_term(t) - z * t - 0.5 * t * t; };
  auto h = [z](double t) { return -z * t - 0.5 * t * t; };

  // Positive root of t^2 + z t - c = 0 when it exists.
  double t_s;
  const double disc = z * z + 4.0 * c;
  if (c > 0.0) {
    const double r = std::sqrt(disc);
    t_s = z >= 0.0 ? 2.0 * c / (z + r) : 0.5 * (-z + r);
  } else if (z < 0.0 && disc > 0.0) {
    t_s = 0.5 * (-z + std::sqrt(disc));
  } else {
    t_s = 1.0 / (1.0 + std::abs(z));
  }

  double err_l = 0.0, err_r = 0.0, l1 = 0.0;
  double log_left;
  if (c >= 0.0) {
    const double g_ref = g(t_s);
    const double left = tanh_sinh_rule().integrate(
        [&](double t) { return t <= 0.0 ? (c == 0.0 ? std::exp(-g_ref) : 0.0) : std::exp(g(t) - g_ref); }, 0.0,
        t_s, tol, &err_l, &l1);
    log_left = g_ref + std::log(left);
    err_l = left > 0.0 ? err_l / left : 0.0;
  } else {
    // h is concave with its maximum at t = -z; clamp to the panel.
    const double t_peak = std::clamp(-z, 0.0, t_s);
    const double h_ref = h(t_peak);
    const double u_end = std::pow(t_s, m);
    const double left = tanh_sinh_rule().integrate(
        [&](double u) { return std::exp(h(std::pow(u, 1.0 / m)) - h_ref); }, 0.0, u_end, tol, &err_l, &l1);
    log_left = h_ref - std::log(m) + std::log(left);
    err_l = left > 0.0 ? err_l / left : 0.0;
  }

  const double g_s = g(t_s);
  const double right = exp_sinh_rule().integrate([&](double t) { return std::exp(g(t) - g_s); }, t_s,
                                                 std::numeric_limits<double>::infinity(), tol, &err_r, &l1);
  const double log_right = g_s + std::log(right);
  err_r = right > 0.0 ? err_r / right : 0.0;

  const double total = log_add_exp(log_left, log_right);
  if (rel_error) {
    const double wl = std::exp(log_left - total), wr = std::exp(log_right - total);
    *rel_error = wl * err_l + wr * err_r;
  }
  return total;
}

}  // namespace detail

/// log D_nu(z) for nu <= 0 (D_nu > 0 there), to relative accuracy `tol`.
inline double log_pcf_d(double nu, double z, double tol = kPcfTolerance) {
  if (!(nu <= 0.0)) throw Error(ErrorKind::Domain, "pcf_d: order must be <= 0, got " + std::to_string(nu));
  if (!std::isfinite(z)) throw Error(ErrorKind::Domain, "pcf_d: non-finite argument");
  if (nu == 0.0) return -0.25 * z * z;
  double rel_err = 0.0;
  const double log_int = detail::log_pcf_integral(nu, z, std::min(tol, 1e-13), &rel_err);
  if (!(rel_err <= tol) || !std::isfinite(log_int))
    throw NumericalError(ErrorKind::Accuracy,
                         "pcf_d: quadrature did not converge (nu=" + std::to_string(nu) + ", z=" + std::to_string(z) + ")",
                         rel_err);
  return -0.25 * z * z - std::lgamma(-nu) + log_int;
}

/// D_nu(z) for nu <= 0 via
/// D_nu(z) = e^{-z^2/4} / Gamma(-nu) * int_0^inf t^{-nu-1} e^{-z t - t^2/2} dt.
inline double pcf_d(double nu, double z, double tol = kPcfTolerance) { return std::exp(log_pcf_d(nu, z, tol)); }

struct PcfPair {
  double d_nu;
  double d_nu_plus_1;
};

/// (D_nu(z), D_{nu+1}(z)); requires nu + 1 <= 0.
inline PcfPair pcf_d_pair(double nu, double z, double tol = kPcfTolerance) {
  if (!(nu + 1.0 <= 0.0)) throw Error(ErrorKind::Domain, "pcf_d_pair: need nu + 1 <= 0");
  return {pcf_d(nu, z, tol), pcf_d(nu + 1.0, z, tol)};
}

/// dD_nu/dz = (z/2) D_nu(z) - D_{nu+1}(z).
inline double pcf_d_derivative(double nu, double z) {
  const auto pr = pcf_d_pair(nu, z);
  return 0.5 * z * pr.d_nu - pr.d_nu_plus_1;
}

/// Derived quantities of the Weber reduction for beta < 0:
///   b = -beta, nu_q = -1 - (lambda + q)/b,
///   p(x) = -alpha x/sigma^2 + b x^2/(2 sigma^2) + eta x/2,
///   z(x) = sqrt(2)/(sigma sqrt(b)) (-b x + alpha + eta sigma^2/2).
struct WeberContext {
  ModelParams params;
  double q = 0.0;
  double b = 0.0;
  double nu_q = 0.0;
  double p1 = 0.0;  // p(x) = p1 x + p2 x^2
  double p2 = 0.0;
  double z0 = 0.0;  // z(x) = z0 + z1 x
  double z1 = 0.0;

  double p(double x) const { return (p1 + p2 * x) * x; }
  double dp(double x) const { return p1 + 2.0 * p2 * x; }
  double z(double x) const { return z0 + z1 * x; }
};

inline WeberContext make_context(const ModelParams& params, double q) {
  params.validate();
  if (!(params.beta < 0.0))
    throw Error(ErrorKind::Unsupported, "closed forms need beta < 0 (mean reversion), got beta=" + std::to_string(params.beta));
  if (!(q >= 0.0)) throw Error(ErrorKind::Domain, "discount rate q must be >= 0");
  WeberContext ctx;
  ctx.params = params;
  ctx.q = q;
  ctx.b = -params.beta;
  ctx.nu_q = -1.0 - (params.lambda + q) / ctx.b;
  const double s2 = params.sigma * params.sigma;
  ctx.p1 = -params.alpha / s2 + 0.5 * params.eta;
  ctx.p2 = ctx.b / (2.0 * s2);
  const double scale = std::numbers::sqrt2 / (params.sigma * std::sqrt(ctx.b));
  ctx.z0 = scale * (params.alpha + 0.5 * params.eta * s2);
  ctx.z1 = -scale * ctx.b;
  if (!(ctx.nu_q + 1.0 < 0.0)) throw Error(ErrorKind::Domain, "weber context: nu_q + 1 must be < 0");
  return ctx;
}

}  // namespace fptlab
