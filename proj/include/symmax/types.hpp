#ifndef SYMMAX_TYPES_HPP
#define SYMMAX_TYPES_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace symmax {

using Point3 = std::array<double, 3>;
using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

inline constexpr double pi = 3.14159265358979323846;

inline constexpr Mat3 identity3() {
  return {{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};
}

inline Vec3 mat_vec(const Mat3 &m, const Vec3 &v) {
  Vec3 out{};
  for (std::size_t i = 0; i < 3; ++i)
    out[i] = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2];
  return out;
}

/// m^T v
inline Vec3 mat_t_vec(const Mat3 &m, const Vec3 &v) {
  Vec3 out{};
  for (std::size_t i = 0; i < 3; ++i)
    out[i] = m[0][i] * v[0] + m[1][i] * v[1] + m[2][i] * v[2];
  return out;
}

inline Mat3 mat_mul(const Mat3 &a, const Mat3 &b) {
  Mat3 out{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
  return out;
}

inline double determinant(const Mat3 &m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

/// Closed-form adjugate inverse. Caller checks the determinant first.
inline Mat3 inverse(const Mat3 &m, double det) {
  const double s = 1.0 / det;
  Mat3 out{};
  out[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) * s;
  out[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * s;
  out[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * s;
  out[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) * s;
  out[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * s;
  out[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * s;
  out[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) * s;
  out[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * s;
  out[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * s;
  return out;
}

inline double frobenius_norm(const Mat3 &m) {
  double sum = 0.0;
  for (const auto &row : m)
    for (double x : row)
      sum += x * x;
  return std::sqrt(sum);
}

/// Upper bound on the 2-norm condition number, ||m||_F ||m^-1||_F.
inline double condition_estimate(const Mat3 &m, const Mat3 &inv) {
  return frobenius_norm(m) * frobenius_norm(inv);
}

/// Max-row-sum norm.
inline double inf_norm(const Mat3 &m) {
  double best = 0.0;
  for (const auto &row : m)
    best = std::max(best, std::abs(row[0]) + std::abs(row[1]) + std::abs(row[2]));
  return best;
}

} // namespace symmax

#endif // SYMMAX_TYPES_HPP
