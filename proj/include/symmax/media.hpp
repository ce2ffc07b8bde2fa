#ifndef SYMMAX_MEDIA_HPP
#define SYMMAX_MEDIA_HPP

#include <array>
#include <string>
#include <utility>

#include "symmax/errors.hpp"
#include "symmax/exprlang.hpp"
#include "symmax/geometry.hpp"
#include "symmax/types.hpp"

namespace symmax {

struct MediumSample {
  Mat3 eps;
  Mat3 eps_inv;
  Mat3 mu;
  Mat3 mu_inv;
};

/// Constitutive tensors D^i = eps^i_j E^j, B^i = mu^i_j H^j as mixed-index
/// fields. Components are stored row-major (eps^1_1, eps^1_2, ..., eps^3_3)
/// with no symmetry imposed.
class Medium {
public:
  using Tensor = std::array<Expr, 9>;

  Medium(std::string name, Tensor eps, Tensor mu)
      : name_(std::move(name)), eps_(std::move(eps)), mu_(std::move(mu)) {}

  static Tensor identity_tensor() { return diagonal(Expr::constant(1)); }

  static Tensor diagonal(const Expr &d) { return diagonal(d, d, d); }

  static Tensor diagonal(const Expr &d1, const Expr &d2, const Expr &d3) {
    const Expr z = Expr::constant(0);
    return {d1, z, z, z, d2, z, z, z, d3};
  }

  static Medium vacuum() {
    return Medium("vacuum", identity_tensor(), identity_tensor());
  }

  /// eps = (2 - r^2/R^2) I inside r < R, 1 outside; r measured from the
  /// coordinate origin. mu = I.
  static Medium luneburg(double radius) {
    const std::string R2 = detail::format_literal(radius * radius);
    const std::string u = "(1 - (x1^2 + x2^2 + x3^2) / " + R2 + ")";
    const Expr profile = Expr::parse("1 + (" + u + " + abs" + u + ") / 2");
    return Medium("luneburg", diagonal(profile), identity_tensor());
  }

  /// eps = eps_parallel along `axis` (0-based), eps_perp across it. mu = I.
  static Medium uniaxial(double eps_perp, double eps_parallel, int axis) {
    std::array<Expr, 3> d{Expr::constant(eps_perp), Expr::constant(eps_perp),
                          Expr::constant(eps_perp)};
    d[static_cast<std::size_t>(axis)] = Expr::constant(eps_parallel);
    return Medium("uniaxial", diagonal(d[0], d[1], d[2]), identity_tensor());
  }

  const std::string &name() const noexcept { return name_; }
  const Tensor &eps() const noexcept { return eps_; }
  const Tensor &mu() const noexcept { return mu_; }

private:
  std::string name_;
  Tensor eps_;
  Tensor mu_;
};

inline constexpr double max_medium_condition = 1e8;

namespace detail {
inline Mat3 evaluate_tensor(const Medium::Tensor &t, const Point3 &x) {
  Mat3 m{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      m[i][j] = t[3 * i + j].eval(x);
  return m;
}

inline Mat3 checked_inverse(const Mat3 &m, const char *which,
                            const Medium &medium, const Point3 &x) {
  const double det = determinant(m);
  if (det == 0.0 || !std::isfinite(det))
    throw SingularTensorError(std::string(which) + " of medium \"" +
                              medium.name() + "\" is singular at " +
                              format_point(x));
  Mat3 inv = inverse(m, det);
  if (!(condition_estimate(m, inv) < max_medium_condition))
    throw SingularTensorError(std::string(which) + " of medium \"" +
                              medium.name() + "\" is ill-conditioned at " +
                              format_point(x));
  return inv;
}
} // namespace detail

inline MediumSample sample_medium(const Medium &m, const Point3 &x) {
  MediumSample s{};
  s.eps = detail::evaluate_tensor(m.eps(), x);
  s.mu = detail::evaluate_tensor(m.mu(), x);
  s.eps_inv = detail::checked_inverse(s.eps, "eps", m, x);
  s.mu_inv = detail::checked_inverse(s.mu, "mu", m, x);
  return s;
}

} // namespace symmax

#endif // SYMMAX_MEDIA_HPP
