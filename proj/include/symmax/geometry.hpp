#ifndef SYMMAX_GEOMETRY_HPP
#define SYMMAX_GEOMETRY_HPP

#include <array>
#include <cstdio>
#include <string>
#include <utility>

#include "symmax/errors.hpp"
#include "symmax/exprlang.hpp"
#include "symmax/types.hpp"

namespace symmax {

/// Evaluated 3-metric at one point: g_ij, g^ij and sqrt(det g).
struct MetricSample {
  Mat3 g_lower;
  Mat3 g_upper;
  double sqrt_det;
};

/// Holonomic coordinate chart given by the covariant metric components.
///
/// Only the six independent components are stored, so g_ij == g_ji holds
/// structurally. Charts are time independent.
class Chart {
public:
  /// Order of `components`: g11, g12, g13, g22, g23, g33.
  Chart(std::string name, std::array<Expr, 6> components)
      : name_(std::move(name)), g_(std::move(components)) {}

  static Chart cartesian() {
    return Chart("cartesian", {Expr::constant(1), Expr::constant(0),
                               Expr::constant(0), Expr::constant(1),
                               Expr::constant(0), Expr::constant(1)});
  }

  /// (x1, x2, x3) = (r, phi, z); g = diag(1, r^2, 1).
  static Chart cylindrical() {
    return Chart("cylindrical", {Expr::constant(1), Expr::constant(0),
                                 Expr::constant(0), Expr::parse("x1^2"),
                                 Expr::constant(0), Expr::constant(1)});
  }

  const std::string &name() const noexcept { return name_; }
  const std::array<Expr, 6> &components() const noexcept { return g_; }

  /// Component g_ij for 0-based i, j.
  const Expr &component(int i, int j) const {
    static constexpr int slot[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
    return g_[static_cast<std::size_t>(slot[i][j])];
  }

  Mat3 evaluate(const Point3 &x) const {
    Mat3 g{};
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j)
        g[i][j] = g[j][i] = component(i, j).eval(x);
    return g;
  }

private:
  std::string name_;
  std::array<Expr, 6> g_;
};

inline constexpr double max_metric_condition = 1e12;

inline std::string format_point(const Point3 &x) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "(%.6g, %.6g, %.6g)", x[0], x[1], x[2]);
  return buf;
}

/// Throws DegenerateMetricError unless g is positive definite and
/// reasonably conditioned at `x`.
inline MetricSample metric_at(const Chart &chart, const Point3 &x) {
  const Mat3 g = chart.evaluate(x);
  const double minor1 = g[0][0];
  const double minor2 = g[0][0] * g[1][1] - g[0][1] * g[1][0];
  const double det = determinant(g);
  if (!(minor1 > 0.0) || !(minor2 > 0.0) || !(det > 0.0))
    throw DegenerateMetricError("metric of chart \"" + chart.name() +
                                "\" is not positive definite at " +
                                format_point(x));
  MetricSample m{g, inverse(g, det), std::sqrt(det)};
  if (condition_estimate(m.g_lower, m.g_upper) > max_metric_condition)
    throw DegenerateMetricError("metric of chart \"" + chart.name() +
                                "\" is ill-conditioned at " + format_point(x));
  return m;
}

enum class Variance { upper, lower };

/// Sign of the permutation (i, j, k) of (0, 1, 2); 0 on a repeated index.
inline constexpr int permutation_sign(int i, int j, int k) {
  if (i == j || j == k || i == k)
    return 0;
  // (0,1,2), (1,2,0), (2,0,1) are even.
  return ((j - i + 3) % 3 == 1) ? 1 : -1;
}

/// Weighted Levi-Civita tensor: sqrt(g) eps_ijk (lower) or eps^ijk / sqrt(g)
/// (upper). Indices are 0-based.
inline double levi_civita(double sqrt_det, Variance variance, int i, int j,
                          int k) {
  const int s = permutation_sign(i, j, k);
  if (s == 0)
    return 0.0;
  return variance == Variance::lower ? s * sqrt_det : s / sqrt_det;
}

/// v_i = g_ij v^j
inline Vec3 lower_index(const Vec3 &v_upper, const MetricSample &m) {
  return mat_vec(m.g_lower, v_upper);
}

/// v^i = g^ij v_j
inline Vec3 raise_index(const Vec3 &v_lower, const MetricSample &m) {
  return mat_vec(m.g_upper, v_lower);
}

} // namespace symmax

#endif // SYMMAX_GEOMETRY_HPP
