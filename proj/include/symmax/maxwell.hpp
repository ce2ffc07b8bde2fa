#ifndef SYMMAX_MAXWELL_HPP
#define SYMMAX_MAXWELL_HPP

// Source-free Maxwell equations in a time-independent holonomic chart,
// reduced to the evolution system
//
//   dE^i/dt =  c (eps^-1)^i_l e^{ljk} d_j H_k
//   dH^i/dt = -c (mu^-1)^i_l  e^{ljk} d_j E_k
//
// with e^{ljk} = eps^{ljk} / sqrt(g) and covariant E_k = g_kr E^r, H_k = g_kr H^r.
// The divergence constraints are not evolved; verify_redundancy shows the
// discrete flow preserves them.

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "symmax/doubling.hpp"
#include "symmax/errors.hpp"
#include "symmax/geometry.hpp"
#include "symmax/grid.hpp"
#include "symmax/media.hpp"
#include "symmax/types.hpp"

namespace symmax {

struct ConstraintNorms {
  double div_b;
  double div_d;
};

class MaxwellOperator {
public:
  MaxwellOperator(Chart chart, Medium medium, const Grid3 &grid, double c)
      : chart_(std::move(chart)), medium_(std::move(medium)), grid_(grid), c_(c) {
    if (!(c > 0.0) || !std::isfinite(c))
      throw Error("light speed must be positive");
    const std::size_t n = grid_.size();
    metric_.reserve(n);
    media_.reserve(n);
    sqrt_det_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Point3 x = grid_.point(i);
      metric_.push_back(metric_at(chart_, x));
      media_.push_back(sample_medium(medium_, x));
      sqrt_det_.push_back(metric_.back().sqrt_det);
    }
  }

  const Grid3 &grid() const noexcept { return grid_; }
  const Chart &chart() const noexcept { return chart_; }
  const Medium &medium() const noexcept { return medium_; }
  double light_speed() const noexcept { return c_; }
  const MetricSample &metric(std::size_t node) const { return metric_[node]; }
  const MediumSample &medium_sample(std::size_t node) const { return media_[node]; }
  const Lattice &sqrt_det() const noexcept { return sqrt_det_; }

  FieldState apply(const FieldState &q) const {
    FieldState out(grid_);
    const auto cov_e = lower(q, 0);
    const auto cov_h = lower(q, 3);
    const auto curl_h = curl(cov_h);
    const auto curl_e = curl(cov_e);
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      const MediumSample &m = media_[i];
      for (std::size_t a = 0; a < 3; ++a) {
        double se = 0.0, sh = 0.0;
        for (std::size_t l = 0; l < 3; ++l) {
          se += m.eps_inv[a][l] * curl_h[l][i];
          sh += m.mu_inv[a][l] * curl_e[l][i];
        }
        out.at(static_cast<int>(a), i) = c_ * se;
        out.at(static_cast<int>(a) + 3, i) = -c_ * sh;
      }
    }
    return out;
  }

  /// Exact transpose of apply under the flat inner product: the stages of
  /// apply transposed in reverse order.
  FieldState apply_transpose(const FieldState &p) const {
    const std::size_t n = grid_.size();
    // Constitutive contraction and light speed. w_h feeds the H-derivative
    // chain (from the E rows of apply), w_e the E-derivative chain.
    std::array<Lattice, 3> w_h, w_e;
    for (auto &w : w_h)
      w.assign(n, 0.0);
    for (auto &w : w_e)
      w.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const MediumSample &m = media_[i];
      for (std::size_t l = 0; l < 3; ++l) {
        double sh = 0.0, se = 0.0;
        for (std::size_t a = 0; a < 3; ++a) {
          sh += m.eps_inv[a][l] * p.at(static_cast<int>(a), i);
          se += m.mu_inv[a][l] * p.at(static_cast<int>(a) + 3, i);
        }
        w_h[l][i] = c_ * sh;
        w_e[l][i] = -c_ * se;
      }
    }
    FieldState out(grid_);
    raise_transpose(curl_transpose(w_e), out, 0);
    raise_transpose(curl_transpose(w_h), out, 3);
    return out;
  }

  /// Pointwise maps D = eps E (block 0) and B = mu H (block 3).
  std::array<Lattice, 3> induction(const FieldState &q, int block) const {
    std::array<Lattice, 3> out;
    for (auto &o : out)
      o.resize(grid_.size());
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      const Mat3 &t = block == 0 ? media_[i].eps : media_[i].mu;
      const Vec3 v{q.at(block, i), q.at(block + 1, i), q.at(block + 2, i)};
      const Vec3 d = mat_vec(t, v);
      for (std::size_t a = 0; a < 3; ++a)
        out[a][i] = d[a];
    }
    return out;
  }

  /// (1/8pi) sum (E_i D^i + H_i B^i) sqrt(g) h1 h2 h3
  double energy(const FieldState &q) const {
    const auto d = induction(q, 0);
    const auto b = induction(q, 3);
    double sum = 0.0;
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      const Vec3 e_cov = lower_index({q.at(0, i), q.at(1, i), q.at(2, i)}, metric_[i]);
      const Vec3 h_cov = lower_index({q.at(3, i), q.at(4, i), q.at(5, i)}, metric_[i]);
      double local = 0.0;
      for (std::size_t a = 0; a < 3; ++a)
        local += e_cov[a] * d[a][i] + h_cov[a] * b[a][i];
      sum += local * sqrt_det_[i];
    }
    return sum * grid_.cell_volume() / (8.0 * pi);
  }

  /// Max-norms of the weighted divergences of B = mu H and D = eps E.
  ConstraintNorms constraint_norms(const FieldState &q) const {
    const auto b = induction(q, 3);
    const auto d = induction(q, 0);
    return {max_abs(divergence(grid_, spans(b), sqrt_det_)),
            max_abs(divergence(grid_, spans(d), sqrt_det_))};
  }

  /// Advisory bound on the local wave-speed amplification relative to c.
  double wave_speed_gain() const {
    double gain = 0.0;
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      const double medium_gain =
          std::sqrt(inf_norm(media_[i].eps_inv) * inf_norm(media_[i].mu_inv));
      gain = std::max(gain, medium_gain * inf_norm(metric_[i].g_lower) /
                                metric_[i].sqrt_det);
    }
    return gain;
  }

  /// Covariant components g_kr q^{block + r}.
  std::array<Lattice, 3> lower(const FieldState &q, int block) const {
    std::array<Lattice, 3> out;
    for (auto &o : out)
      o.resize(grid_.size());
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      const Vec3 v = lower_index({q.at(block, i), q.at(block + 1, i), q.at(block + 2, i)},
                                 metric_[i]);
      for (std::size_t k = 0; k < 3; ++k)
        out[k][i] = v[k];
    }
    return out;
  }

  /// e^{ljk} d_j X_k for covariant X.
  std::array<Lattice, 3> curl(const std::array<Lattice, 3> &x) const {
    const std::size_t n = grid_.size();
    std::array<Lattice, 3> out;
    for (auto &o : out)
      o.assign(n, 0.0);
    Lattice d(n);
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        if (j == k)
          continue;
        partial(grid_, x[static_cast<std::size_t>(k)], j, d);
        for (int l = 0; l < 3; ++l) {
          if (permutation_sign(l, j, k) == 0)
            continue;
          auto &o = out[static_cast<std::size_t>(l)];
          for (std::size_t i = 0; i < n; ++i)
            o[i] += levi_civita(sqrt_det_[i], Variance::upper, l, j, k) * d[i];
        }
      }
    return out;
  }

private:
  static std::array<std::span<const double>, 3>
  spans(const std::array<Lattice, 3> &v) {
    return {std::span<const double>(v[0]), std::span<const double>(v[1]),
            std::span<const double>(v[2])};
  }

  /// Transpose of `curl`: z_jk = e^{ljk} w_l pointwise, then d_j^T.
  std::array<Lattice, 3> curl_transpose(const std::array<Lattice, 3> &w) const {
    const std::size_t n = grid_.size();
    std::array<Lattice, 3> out;
    for (auto &o : out)
      o.assign(n, 0.0);
    Lattice z(n), d(n);
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        if (j == k)
          continue;
        const int l = 3 - j - k;
        for (std::size_t i = 0; i < n; ++i)
          z[i] = levi_civita(sqrt_det_[i], Variance::upper, l, j, k) *
                 w[static_cast<std::size_t>(l)][i];
        partial_transpose(grid_, z, j, d);
        auto &o = out[static_cast<std::size_t>(k)];
        for (std::size_t i = 0; i < n; ++i)
          o[i] += d[i];
      }
    return out;
  }

  /// Transpose of `lower` (g is symmetric), written into q^{block + r}.
  void raise_transpose(const std::array<Lattice, 3> &x, FieldState &out,
                       int block) const {
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      const Vec3 v = mat_t_vec(metric_[i].g_lower, {x[0][i], x[1][i], x[2][i]});
      for (std::size_t r = 0; r < 3; ++r)
        out.at(block + static_cast<int>(r), i) = v[r];
    }
  }

  Chart chart_;
  Medium medium_;
  Grid3 grid_;
  double c_;
  std::vector<MetricSample> metric_;
  std::vector<MediumSample> media_;
  Lattice sqrt_det_;
};

static_assert(EvolutionOperator<MaxwellOperator>);

inline MaxwellOperator build_maxwell_operator(const Chart &chart,
                                              const Medium &medium,
                                              const Grid3 &grid, double c) {
  return MaxwellOperator(chart, medium, grid, c);
}

inline ConstraintNorms constraint_norms(const MaxwellOperator &op,
                                        const FieldState &q) {
  return op.constraint_norms(q);
}

struct RedundancyReport {
  /// max |d/dt div B| and |d/dt div D| along the flow (chain rule).
  double ddt_div_b;
  double ddt_div_d;
  /// max of the telescoping sums of mixed second partials of the covariant
  /// E and H components.
  double mixed_e;
  double mixed_h;
  double scale;
  double tolerance;
  bool pass;
};

/// Time derivative of the divergence constraints along the discrete flow,
/// computed two ways. Both vanish to rounding error on any q.
///
/// Pass threshold is tolerance * scale with scale = ||q||_inf max(1, sqrt g)
/// max(1, |g_ij|) max(1, c).
inline RedundancyReport verify_redundancy(const MaxwellOperator &op,
                                          const FieldState &q,
                                          double tolerance = 1e-11) {
  const Grid3 &grid = op.grid();
  const FieldState q_dot = op.apply(q);
  const auto span3 = [](const std::array<Lattice, 3> &v) {
    return std::array<std::span<const double>, 3>{v[0], v[1], v[2]};
  };
  const auto b_dot = op.induction(q_dot, 3);
  const auto d_dot = op.induction(q_dot, 0);
  RedundancyReport r{};
  r.ddt_div_b = max_abs(divergence(grid, span3(b_dot), op.sqrt_det()));
  r.ddt_div_d = max_abs(divergence(grid, span3(d_dot), op.sqrt_det()));

  // sum_l d_l (eps^{ljk} d_j X_k): for E this is
  // E_{3,21} - E_{2,31} + E_{1,32} - E_{3,12} + E_{2,13} - E_{1,23}.
  auto telescoping = [&grid](const std::array<Lattice, 3> &x) {
    Lattice sum(grid.size(), 0.0);
    for (int l = 0; l < 3; ++l)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
          const int s = permutation_sign(l, j, k);
          if (s == 0)
            continue;
          const Lattice inner = partial(grid, x[static_cast<std::size_t>(k)], j);
          const Lattice outer = partial(grid, inner, l);
          for (std::size_t i = 0; i < sum.size(); ++i)
            sum[i] += s * outer[i];
        }
    return max_abs(sum);
  };
  r.mixed_e = telescoping(op.lower(q, 0));
  r.mixed_h = telescoping(op.lower(q, 3));

  double sqrt_g = 1.0, g_max = 1.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    sqrt_g = std::max(sqrt_g, op.metric(i).sqrt_det);
    for (const auto &row : op.metric(i).g_lower)
      for (double g : row)
        g_max = std::max(g_max, std::abs(g));
  }
  r.scale = q.max_abs() * sqrt_g * g_max * std::max(1.0, op.light_speed());
  r.tolerance = tolerance;
  const double bound = tolerance * r.scale;
  r.pass = r.ddt_div_b <= bound && r.ddt_div_d <= bound &&
           r.mixed_e <= bound && r.mixed_h <= bound;
  return r;
}

/// Momentum equation from the continuum variational formula
///
///   p_n' = -p_m df^m/dq^n + d_j (p_m df^m/dq^n_{,j}),
///
/// with the outer d_j replaced by the grid stencil and the metric
/// derivatives d_j g_kr taken from the chart expressions by a fine
/// five-point difference of step `metric_fd_step`. In a constant metric the
/// first term vanishes.
inline FieldState continuum_momentum_rhs(const MaxwellOperator &op,
                                         const FieldState &p,
                                         double metric_fd_step = 1e-3) {
  const Grid3 &grid = op.grid();
  const std::size_t n = grid.size();
  const double c = op.light_speed();
  FieldState out(grid);

  // flux[block][r][j]: p_m df^m/dq^{block+r}_{,j}
  std::array<std::array<std::array<Lattice, 3>, 3>, 2> flux;
  for (auto &b : flux)
    for (auto &r : b)
      for (auto &j : r)
        j.assign(n, 0.0);

  for (std::size_t node = 0; node < n; ++node) {
    const MetricSample &g = op.metric(node);
    const MediumSample &m = op.medium_sample(node);
    const Point3 x = grid.point(node);

    // dg[j][k][r] = d_j g_kr
    std::array<Mat3, 3> dg{};
    for (int j = 0; j < 3; ++j) {
      const double h = metric_fd_step * std::max(1.0, std::abs(x[static_cast<std::size_t>(j)]));
      auto shifted = [&](double s) {
        Point3 y = x;
        y[static_cast<std::size_t>(j)] += s * h;
        return op.chart().evaluate(y);
      };
      const Mat3 gp1 = shifted(1), gm1 = shifted(-1), gp2 = shifted(2), gm2 = shifted(-2);
      for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t r = 0; r < 3; ++r)
          dg[static_cast<std::size_t>(j)][k][r] =
              (8.0 * (gp1[k][r] - gm1[k][r]) - (gp2[k][r] - gm2[k][r])) / (12.0 * h);
    }

    // Source rows: E rows (p_0..2, coefficient c eps^-1) feed dq^{3+r};
    // H rows (p_3..5, coefficient -c mu^-1) feed dq^r.
    for (int src = 0; src < 2; ++src) {
      const Mat3 &inv = src == 0 ? m.eps_inv : m.mu_inv;
      const double sign = src == 0 ? c : -c;
      const int target = src == 0 ? 1 : 0; // flux block: 0 -> E, 1 -> H
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
          if (j == k)
            continue;
          const int l = 3 - j - k;
          // sum_i p_i K^i_jk with K^i_jk = sign inv^i_l e^{ljk}
          double pk = 0.0;
          for (std::size_t i = 0; i < 3; ++i)
            pk += p.at(3 * src + static_cast<int>(i), node) *
                  inv[i][static_cast<std::size_t>(l)];
          pk *= sign * levi_civita(g.sqrt_det, Variance::upper, l, j, k);
          for (std::size_t r = 0; r < 3; ++r) {
            flux[static_cast<std::size_t>(target)][r][static_cast<std::size_t>(j)][node] +=
                pk * g.g_lower[static_cast<std::size_t>(k)][r];
            out.at(3 * target + static_cast<int>(r), node) -=
                pk * dg[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)][r];
          }
        }
    }
  }

  Lattice d(n);
  for (int block = 0; block < 2; ++block)
    for (int r = 0; r < 3; ++r)
      for (int j = 0; j < 3; ++j) {
        partial(grid, flux[static_cast<std::size_t>(block)][static_cast<std::size_t>(r)]
                          [static_cast<std::size_t>(j)],
                j, d);
        auto comp = out.component(3 * block + r);
        for (std::size_t i = 0; i < n; ++i)
          comp[i] += d[i];
      }
  return out;
}

// ---------------------------------------------------------------------------
// Lagrangian irregularity probe.

/// Velocities dA^alpha/dt and spatial gradients d_i A^alpha at one point of
/// Cartesian vacuum, with A^0 = phi.
struct LagrangianProbe {
  std::array<double, 4> a_dot{};
  std::array<std::array<double, 3>, 4> a_grad{}; // a_grad[alpha][i]
  double fd_step = 1e-3;
};

using Mat4 = std::array<std::array<double, 4>, 4>;

/// L = (E^2 - B^2) / 8pi with E_i = -d_i phi - (1/c) dA_i/dt and
/// B^i = eps^{ikl} d_k A_l.
inline double lagrangian_density(const std::array<double, 4> &a_dot,
                                 const std::array<std::array<double, 3>, 4> &a_grad,
                                 double c) {
  double e2 = 0.0, b2 = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double e = -a_grad[0][i] - a_dot[i + 1] / c;
    e2 += e * e;
  }
  for (int i = 0; i < 3; ++i) {
    double b = 0.0;
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l) {
        const int s = permutation_sign(i, k, l);
        if (s != 0)
          b += s * a_grad[static_cast<std::size_t>(l) + 1][static_cast<std::size_t>(k)];
      }
    b2 += b * b;
  }
  return (e2 - b2) / (8.0 * pi);
}

/// d^2 L / dAdot^alpha dAdot^beta by central second differences. The step is
/// probe.fd_step * c, since the velocities enter L only through Adot / c.
inline Mat4 hessian_of_lagrangian(const LagrangianProbe &probe, double c) {
  const double h = probe.fd_step * c;
  auto L = [&](std::array<double, 4> v) {
    return lagrangian_density(v, probe.a_grad, c);
  };
  Mat4 out{};
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = a; b < 4; ++b) {
      double value;
      if (a == b) {
        auto vp = probe.a_dot, vm = probe.a_dot;
        vp[a] += h;
        vm[a] -= h;
        value = (L(vp) - 2.0 * L(probe.a_dot) + L(vm)) / (h * h);
      } else {
        auto shift = [&](double sa, double sb) {
          auto v = probe.a_dot;
          v[a] += sa * h;
          v[b] += sb * h;
          return L(v);
        };
        value = (shift(1, 1) - shift(1, -1) - shift(-1, 1) + shift(-1, -1)) /
                (4.0 * h * h);
      }
      out[a][b] = out[b][a] = value;
    }
  }
  return out;
}

/// Laplace expansion along the first row.
inline double determinant4(const Mat4 &m) {
  double det = 0.0;
  for (std::size_t col = 0; col < 4; ++col) {
    Mat3 minor{};
    for (std::size_t r = 1; r < 4; ++r) {
      std::size_t cc = 0;
      for (std::size_t k = 0; k < 4; ++k)
        if (k != col)
          minor[r - 1][cc++] = m[r][k];
    }
    const double sign = (col % 2 == 0) ? 1.0 : -1.0;
    det += sign * m[0][col] * determinant(minor);
  }
  return det;
}

struct IrregularityReport {
  double c;
  std::vector<LagrangianProbe> probes;
  std::vector<Mat4> hessians;
  double expected_block;   // 1 / (4 pi c^2)
  double max_row0;         // max |H_{0 beta}| over probes
  double max_abs_det;
  double max_block_error;  // relative to expected_block
  double max_probe_spread; // max |H(probe) - H(probe_0)| / expected_block
  bool pass;
};

/// Runs the Hessian on a fixed probe and ten random ones (seeded).
inline IrregularityReport irregularity_report(double c, std::uint64_t seed = 2015,
                                              double fd_tol = 1e-8,
                                              double block_tol = 1e-6) {
  IrregularityReport rep{};
  rep.c = c;
  rep.expected_block = 1.0 / (4.0 * pi * c * c);

  LagrangianProbe fixed;
  fixed.a_dot = {0.5 * c, -0.25 * c, 0.75 * c, 0.1 * c};
  fixed.a_grad = {{{0.3, -0.2, 0.1}, {0.4, 0.5, -0.6}, {-0.7, 0.2, 0.9}, {0.1, -0.8, 0.3}}};
  rep.probes.push_back(fixed);
  std::mt19937_64 rng(seed);
  for (int k = 0; k < 10; ++k) {
    LagrangianProbe p;
    for (double &v : p.a_dot)
      v = c * uniform_pm1(rng);
    for (auto &row : p.a_grad)
      for (double &v : row)
        v = uniform_pm1(rng);
    rep.probes.push_back(p);
  }

  const double s = rep.expected_block;
  for (const auto &probe : rep.probes) {
    const Mat4 h = hessian_of_lagrangian(probe, c);
    rep.hessians.push_back(h);
    for (std::size_t b = 0; b < 4; ++b)
      rep.max_row0 = std::max({rep.max_row0, std::abs(h[0][b]), std::abs(h[b][0])});
    rep.max_abs_det = std::max(rep.max_abs_det, std::abs(determinant4(h)));
    for (std::size_t i = 1; i < 4; ++i)
      for (std::size_t j = 1; j < 4; ++j) {
        const double expected = i == j ? s : 0.0;
        rep.max_block_error = std::max(rep.max_block_error, std::abs(h[i][j] - expected) / s);
      }
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        rep.max_probe_spread = std::max(
            rep.max_probe_spread, std::abs(h[i][j] - rep.hessians.front()[i][j]) / s);
  }
  rep.pass = rep.max_row0 <= fd_tol * s && rep.max_abs_det <= fd_tol * s * s * s &&
             rep.max_block_error <= block_tol && rep.max_probe_spread <= block_tol;
  return rep;
}

} // namespace symmax

#endif // SYMMAX_MAXWELL_HPP
