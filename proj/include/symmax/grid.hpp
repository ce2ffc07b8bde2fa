#ifndef SYMMAX_GRID_HPP
#define SYMMAX_GRID_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "symmax/errors.hpp"
#include "symmax/geometry.hpp"
#include "symmax/types.hpp"

namespace symmax {

using Lattice = std::vector<double>;

/// Periodic structured grid. Node (a, b, c) sits at origin + (a h1, b h2, c h3)
/// and indices wrap modulo n. Storage is x1-fastest, then x2, then x3.
///
/// `stencil_order` selects the central difference used by `partial`: 2 is the
/// default three-point stencil, 4 the five-point one. Both are antisymmetric
/// and translation invariant, so summation by parts and stencil commutation
/// hold for either.
class Grid3 {
public:
  Grid3(std::array<int, 3> n, Point3 origin, std::array<double, 3> extent,
        int stencil_order = 2)
      : n_(n), origin_(origin), extent_(extent), order_(stencil_order) {
    auto problems = validate(n, extent, stencil_order);
    if (!problems.empty())
      throw ConfigError(std::move(problems));
    for (std::size_t a = 0; a < 3; ++a)
      h_[a] = extent_[a] / n_[a];
  }

  static std::vector<std::string> validate(const std::array<int, 3> &n,
                                           const std::array<double, 3> &extent,
                                           int stencil_order) {
    std::vector<std::string> problems;
    for (std::size_t a = 0; a < 3; ++a) {
      const std::string axis = std::to_string(a + 1);
      if (n[a] < 4)
        problems.push_back("n" + axis + " >= 4 required (got " +
                           std::to_string(n[a]) + ")");
      if (!(extent[a] > 0.0) || !std::isfinite(extent[a]))
        problems.push_back("extent" + axis + " must be a positive number");
    }
    if (stencil_order != 2 && stencil_order != 4)
      problems.push_back("stencil order must be 2 or 4 (got " +
                         std::to_string(stencil_order) + ")");
    return problems;
  }

  int n(int axis) const { return n_[static_cast<std::size_t>(axis)]; }
  const std::array<int, 3> &shape() const noexcept { return n_; }
  const Point3 &origin() const noexcept { return origin_; }
  const std::array<double, 3> &extent() const noexcept { return extent_; }
  double spacing(int axis) const { return h_[static_cast<std::size_t>(axis)]; }
  double min_spacing() const { return std::min({h_[0], h_[1], h_[2]}); }
  double cell_volume() const { return h_[0] * h_[1] * h_[2]; }
  int stencil_order() const noexcept { return order_; }

  std::size_t size() const {
    return static_cast<std::size_t>(n_[0]) * n_[1] * n_[2];
  }

  std::size_t index(int a, int b, int c) const {
    return static_cast<std::size_t>(a) +
           static_cast<std::size_t>(n_[0]) *
               (static_cast<std::size_t>(b) + static_cast<std::size_t>(n_[1]) * c);
  }

  std::array<int, 3> node(std::size_t idx) const {
    const int a = static_cast<int>(idx % n_[0]);
    idx /= n_[0];
    const int b = static_cast<int>(idx % n_[1]);
    return {a, b, static_cast<int>(idx / n_[1])};
  }

  Point3 point(int a, int b, int c) const {
    return {origin_[0] + a * h_[0], origin_[1] + b * h_[1],
            origin_[2] + c * h_[2]};
  }

  Point3 point(std::size_t idx) const {
    const auto [a, b, c] = node(idx);
    return point(a, b, c);
  }

  friend bool operator==(const Grid3 &, const Grid3 &) = default;

private:
  std::array<int, 3> n_;
  Point3 origin_;
  std::array<double, 3> extent_;
  std::array<double, 3> h_{};
  int order_;
};

/// Samples a point function on every node.
template <class F> Lattice sample_lattice(const Grid3 &grid, F &&f) {
  Lattice out(grid.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = f(grid.point(i));
  return out;
}

/// Central difference along `axis` (0-based) with periodic wraparound.
inline void partial(const Grid3 &grid, std::span<const double> f, int axis,
                    std::span<double> out) {
  const int n0 = grid.n(0), n1 = grid.n(1), n2 = grid.n(2);
  const int len = grid.n(axis);
  const std::size_t stride = axis == 0 ? 1
                             : axis == 1 ? static_cast<std::size_t>(n0)
                                         : static_cast<std::size_t>(n0) * n1;
  const double h = grid.spacing(axis);
  const bool fourth = grid.stencil_order() == 4;
  const double w1 = fourth ? 8.0 / (12.0 * h) : 1.0 / (2.0 * h);
  const double w2 = 1.0 / (12.0 * h);
  for (int c = 0; c < n2; ++c)
    for (int b = 0; b < n1; ++b)
      for (int a = 0; a < n0; ++a) {
        const int pos = axis == 0 ? a : axis == 1 ? b : c;
        const std::size_t idx = grid.index(a, b, c);
        const std::size_t base = idx - static_cast<std::size_t>(pos) * stride;
        auto at = [&](int offset) {
          const int k = ((pos + offset) % len + len) % len;
          return f[base + static_cast<std::size_t>(k) * stride];
        };
        double d = w1 * (at(1) - at(-1));
        if (fourth)
          d -= w2 * (at(2) - at(-2));
        out[idx] = d;
      }
}

inline Lattice partial(const Grid3 &grid, std::span<const double> f, int axis) {
  Lattice out(grid.size());
  partial(grid, f, axis, out);
  return out;
}

/// Transpose of `partial` under the flat lattice inner product. The stencil
/// is antisymmetric, so this is exactly -partial.
inline void partial_transpose(const Grid3 &grid, std::span<const double> f,
                              int axis, std::span<double> out) {
  partial(grid, f, axis, out);
  for (double &x : out)
    x = -x;
}

inline Lattice sqrt_det_lattice(const Grid3 &grid, const Chart &chart) {
  return sample_lattice(grid, [&chart](const Point3 &x) {
    return metric_at(chart, x).sqrt_det;
  });
}

/// (1/sqrt g) d_i (sqrt g B^i) for contravariant components B^i.
inline Lattice divergence(const Grid3 &grid,
                          const std::array<std::span<const double>, 3> &b_upper,
                          std::span<const double> sqrt_det) {
  const std::size_t n = grid.size();
  Lattice out(n, 0.0), weighted(n), d(n);
  for (int axis = 0; axis < 3; ++axis) {
    const auto &comp = b_upper[static_cast<std::size_t>(axis)];
    for (std::size_t i = 0; i < n; ++i)
      weighted[i] = sqrt_det[i] * comp[i];
    partial(grid, weighted, axis, d);
    for (std::size_t i = 0; i < n; ++i)
      out[i] += d[i];
  }
  for (std::size_t i = 0; i < n; ++i)
    out[i] /= sqrt_det[i];
  return out;
}

inline Lattice divergence(const Grid3 &grid,
                          const std::array<std::span<const double>, 3> &b_upper,
                          const Chart &chart) {
  return divergence(grid, b_upper, sqrt_det_lattice(grid, chart));
}

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v)
    m = std::max(m, std::abs(x));
  return m;
}

inline constexpr std::array<const char *, 6> component_names = {
    "E1", "E2", "E3", "H1", "H2", "H3"};

/// Generalized coordinates q^n = (E^1, E^2, E^3, H^1, H^2, H^3), contravariant,
/// on every node. Components are stored one lattice after another.
class FieldState {
public:
  static constexpr int components = 6;

  explicit FieldState(const Grid3 &grid)
      : grid_(grid), data_(components * grid.size(), 0.0) {}

  const Grid3 &grid() const noexcept { return grid_; }
  std::size_t nodes() const { return grid_.size(); }

  std::span<double> component(int n) {
    return {data_.data() + static_cast<std::size_t>(n) * nodes(), nodes()};
  }
  std::span<const double> component(int n) const {
    return {data_.data() + static_cast<std::size_t>(n) * nodes(), nodes()};
  }

  double &at(int n, std::size_t node) {
    return data_[static_cast<std::size_t>(n) * nodes() + node];
  }
  double at(int n, std::size_t node) const {
    return data_[static_cast<std::size_t>(n) * nodes() + node];
  }

  /// Flat storage: entry n * nodes() + node.
  std::span<double> flat() { return data_; }
  std::span<const double> flat() const { return data_; }

  template <class F> void fill(F &&f) {
    for (std::size_t i = 0; i < nodes(); ++i) {
      const std::array<double, 6> v = f(grid_.point(i));
      for (int n = 0; n < components; ++n)
        at(n, i) = v[static_cast<std::size_t>(n)];
    }
  }

  /// this += s * other
  FieldState &add_scaled(double s, const FieldState &other) {
    for (std::size_t i = 0; i < data_.size(); ++i)
      data_[i] += s * other.data_[i];
    return *this;
  }

  FieldState &scale(double s) {
    for (double &x : data_)
      x *= s;
    return *this;
  }

  double max_abs() const { return symmax::max_abs(data_); }

  friend bool operator==(const FieldState &, const FieldState &) = default;

private:
  Grid3 grid_;
  std::vector<double> data_;
};

/// Uniform deviate in [-1, 1) from the top 53 bits of a 64-bit draw.
inline double uniform_pm1(std::mt19937_64 &rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
}

/// Every entry uniform in [-1, 1) from mt19937_64 seeded with `seed`.
inline FieldState random_field(const Grid3 &grid, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  FieldState s(grid);
  for (double &x : s.flat())
    x = uniform_pm1(rng);
  return s;
}

/// Flat inner product sum over nodes and components.
inline double dot(const FieldState &a, const FieldState &b) {
  const auto x = a.flat();
  const auto y = b.flat();
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    s += x[i] * y[i];
  return s;
}

/// Writes one snapshot: header x1,...,H3, one row per node, x1 fastest.
inline void write_snapshot(const std::string &path, const FieldState &q) {
  std::ofstream out(path);
  if (!out)
    throw Error("cannot open snapshot file " + path);
  out << "x1,x2,x3,E1,E2,E3,H1,H2,H3\n";
  char buf[32];
  for (std::size_t i = 0; i < q.nodes(); ++i) {
    const Point3 x = q.grid().point(i);
    for (int k = 0; k < 3; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", x[static_cast<std::size_t>(k)]);
      out << buf << ',';
    }
    for (int n = 0; n < FieldState::components; ++n) {
      std::snprintf(buf, sizeof buf, "%.17g", q.at(n, i));
      out << buf << (n + 1 < FieldState::components ? ',' : '\n');
    }
  }
  if (!out)
    throw Error("failed writing snapshot file " + path);
}

} // namespace symmax

#endif // SYMMAX_GRID_HPP
