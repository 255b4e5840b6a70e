#pragma once

// Small numerical kernels shared by the analytic module: a Chebyshev-Lobatto
// cell rule with its integration matrix, a composite Gauss-Legendre rule and
// finite-difference stencils.

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "fptlab/core.hpp"

namespace fptlab {

/// m Chebyshev-Lobatto points on [-1, 1] (endpoints included) with
/// barycentric weights and the matrix S[j][i] = int_{-1}^{xi_j} l_i.
class ChebyshevCell {
 public:
  explicit ChebyshevCell(int m) : m_(m), nodes_(m), bary_(m), S_(static_cast<std::size_t>(m) * m) {
    require(m >= 3 && m <= 20, ErrorKind::Domain, "chebyshev cell: need 3 <= m <= 20");
    for (int j = 0; j < m; ++j) {
      nodes_[j] = -std::cos(std::numbers::pi * j / (m - 1));
      bary_[j] = (j % 2 == 0 ? 1.0 : -1.0) * ((j == 0 || j == m - 1) ? 0.5 : 1.0);
    }
    nodes_[0] = -1.0;
    nodes_[m - 1] = 1.0;
    std::vector<double> basis(m);
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < m; ++i) S_[j * m + i] = 0.0;
      if (j == 0) continue;
      const double lo = -1.0, hi = nodes_[j];
      const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
      for (std::size_t g = 0; g < Rule::abscissa().size(); ++g) {
        for (int sign : {-1, 1}) {
          if (g == 0 && sign == 1 && Rule::abscissa()[0] == 0.0) continue;
          const double xi = mid + sign * half * Rule::abscissa()[g];
          lagrange_basis(xi, basis);
          for (int i = 0; i < m; ++i) S_[j * m + i] += half * Rule::weights()[g] * basis[i];
        }
      }
    }
  }

  int size() const { return m_; }
  const std::vector<double>& nodes() const { return nodes_; }
  double S(int j, int i) const { return S_[static_cast<std::size_t>(j) * m_ + i]; }
  /// int_{xi_j}^{1} l_i
  double T(int j, int i) const { return S(m_ - 1, i) - S(j, i); }

  /// All Lagrange basis values at xi.
  void lagrange_basis(double xi, std::vector<double>& out) const {
    out.assign(m_, 0.0);
    double denom = 0.0;
    for (int i = 0; i < m_; ++i) {
      const double d = xi - nodes_[i];
      if (d == 0.0) {
        out.assign(m_, 0.0);
        out[i] = 1.0;
        return;
      }
      out[i] = bary_[i] / d;
      denom += out[i];
    }
    for (auto& v : out) v /= denom;
  }

  /// Interpolant of `values` at xi.
  template <class It>
  double interpolate(It values, double xi) const {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < m_; ++i) {
      const double d = xi - nodes_[i];
      if (d == 0.0) return values[i];
      const double c = bary_[i] / d;
      num += c * values[i];
      den += c;
    }
    return num / den;
  }

  /// int_{-1}^{xi} of the interpolant of `values`.
  template <class It>
  double integrate_to(It values, double xi) const {
    const double half = 0.5 * (xi + 1.0), mid = 0.5 * (xi - 1.0);
    double s = 0.0;
    for (std::size_t g = 0; g < Rule::abscissa().size(); ++g) {
      for (int sign : {-1, 1}) {
        if (g == 0 && sign == 1 && Rule::abscissa()[0] == 0.0) continue;
        s += Rule::weights()[g] * interpolate(values, mid + sign * half * Rule::abscissa()[g]);
      }
    }
    return half * s;
  }

 private:
  // 10-point Gauss-Legendre: exact for the degree <= 19 basis polynomials.
  using Rule = boost::math::quadrature::gauss<double, 10>;

  int m_;
  std::vector<double> nodes_;
  std::vector<double> bary_;
  std::vector<double> S_;
};

/// Composite 20-point Gauss-Legendre on [lo, hi] with panels of width
/// `panel` laid out from hi leftwards (the last panel is partial). The panel
/// layout depends only on hi, so the result is smooth in lo.
inline double composite_gauss(const std::function<double(double)>& f, double lo, double hi, double panel = 0.05) {
  using Rule = boost::math::quadrature::gauss<double, 20>;
  if (!(hi > lo)) return 0.0;
  double total = 0.0;
  double right = hi;
  while (right > lo) {
    const double left = std::max(lo, right - panel);
    total += Rule::integrate(f, left, right);
    right = left;
  }
  return total;
}

namespace fd {

/// Step for second derivatives: about eps^{1/4} times the local scale,
/// balancing O(h^4) truncation against O(eps/h^2) cancellation.
inline double step(double x, double scale = 1.0) { return 1e-3 * std::max(scale, std::abs(x) * 0.1 + 0.1); }

inline double d1(const std::function<double(double)>& f, double x, double h) {
  return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
}

inline double d2(const std::function<double(double)>& f, double x, double h) {
  return (-f(x - 2 * h) + 16 * f(x - h) - 30 * f(x) + 16 * f(x + h) - f(x + 2 * h)) / (12 * h * h);
}

inline double d3(const std::function<double(double)>& f, double x, double h) {
  return (f(x - 3 * h) - 8 * f(x - 2 * h) + 13 * f(x - h) - 13 * f(x + h) + 8 * f(x + 2 * h) - f(x + 3 * h)) /
         (8 * h * h * h);
}

/// Backward (one-sided) O(h^4) first derivative at x using f on [x - 4h, x].
inline double d1_backward(const std::function<double(double)>& f, double x, double h) {
  return (25 * f(x) - 48 * f(x - h) + 36 * f(x - 2 * h) - 16 * f(x - 3 * h) + 3 * f(x - 4 * h)) / (12 * h);
}

/// Backward O(h^4) second derivative at x using f on [x - 5h, x].
inline double d2_backward(const std::function<double(double)>& f, double x, double h) {
  return (45 * f(x) - 154 * f(x - h) + 214 * f(x - 2 * h) - 156 * f(x - 3 * h) + 61 * f(x - 4 * h) -
          10 * f(x - 5 * h)) /
         (12 * h * h);
}

/// Backward O(h^3) third derivative at x using f on [x - 5h, x].
inline double d3_backward(const std::function<double(double)>& f, double x, double h) {
  return (17 * f(x) - 71 * f(x - h) + 118 * f(x - 2 * h) - 98 * f(x - 3 * h) + 41 * f(x - 4 * h) -
          7 * f(x - 5 * h)) /
         (4 * h * h * h);
}

}  // namespace fd

}  // namespace fptlab
