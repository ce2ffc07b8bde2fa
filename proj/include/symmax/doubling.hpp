#ifndef SYMMAX_DOUBLING_HPP
#define SYMMAX_DOUBLING_HPP

// Doubling of variables: a first-order system q' = f(q) becomes the q-half of
// a canonical system on R^{2s} with H = p_n f^n. For linear f = L q the second
// group of Hamilton equations is p' = -L^T p.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <iterator>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "symmax/errors.hpp"
#include "symmax/grid.hpp"

namespace symmax {

/// Matrix-free linear evolution map with its transpose under the flat
/// lattice inner product: <p, apply(q)> == <apply_transpose(p), q>.
template <class Op>
concept EvolutionOperator = requires(const Op &op, const FieldState &q) {
  { op.grid() } -> std::convertible_to<const Grid3 &>;
  { op.apply(q) } -> std::same_as<FieldState>;
  { op.apply_transpose(q) } -> std::same_as<FieldState>;
};

/// Point xi = (q, p) of the doubled phase space. Flat coordinate a < 6N is
/// q.flat()[a]; a >= 6N is p.flat()[a - 6N].
struct DoubledState {
  FieldState q;
  FieldState p;

  explicit DoubledState(const Grid3 &grid) : q(grid), p(grid) {}

  DoubledState(FieldState q_, FieldState p_) : q(std::move(q_)), p(std::move(p_)) {
    if (!(q.grid() == p.grid()))
      throw Error("coordinates and momenta live on different grids");
  }

  const Grid3 &grid() const noexcept { return q.grid(); }

  /// Half dimension s * N (s = 6 components per node).
  std::size_t half_size() const { return q.flat().size(); }
  std::size_t size() const { return 2 * half_size(); }

  double &operator[](std::size_t a) {
    return a < half_size() ? q.flat()[a] : p.flat()[a - half_size()];
  }
  double operator[](std::size_t a) const {
    return a < half_size() ? q.flat()[a] : p.flat()[a - half_size()];
  }

  DoubledState &add_scaled(double s, const DoubledState &other) {
    q.add_scaled(s, other.q);
    p.add_scaled(s, other.p);
    return *this;
  }

  DoubledState &scale(double s) {
    q.scale(s);
    p.scale(s);
    return *this;
  }

  double max_abs() const { return std::max(q.max_abs(), p.max_abs()); }

  friend bool operator==(const DoubledState &, const DoubledState &) = default;
};

/// H = sum_nodes p_n f^n(q), without the cell-volume weight.
template <EvolutionOperator Op>
double hamiltonian_lattice_sum(const Op &op, const DoubledState &st) {
  return dot(st.p, op.apply(st.q));
}

/// H = sum_nodes p_n f^n(q) h1 h2 h3, the discrete Hamiltonian density integral.
template <EvolutionOperator Op>
double hamiltonian(const Op &op, const DoubledState &st) {
  return hamiltonian_lattice_sum(op, st) * st.grid().cell_volume();
}

/// (q', p') = (f(q), -L^T p). The q-half is op.apply itself.
template <EvolutionOperator Op>
DoubledState hamilton_rhs(const Op &op, const DoubledState &st) {
  FieldState p_dot = op.apply_transpose(st.p);
  p_dot.scale(-1.0);
  return DoubledState(op.apply(st.q), std::move(p_dot));
}

struct FirstGroupReport {
  double max_difference;
  bool pass;
};

/// The q-half of the Hamilton equations reproduces the original system.
template <EvolutionOperator Op>
FirstGroupReport check_first_group_identity(const Op &op, const FieldState &q) {
  const DoubledState st(q, FieldState(q.grid()));
  const FieldState direct = op.apply(q);
  const DoubledState rhs = hamilton_rhs(op, st);
  double diff = 0.0;
  for (std::size_t i = 0; i < direct.flat().size(); ++i)
    diff = std::max(diff, std::abs(rhs.q.flat()[i] - direct.flat()[i]));
  return {diff, diff == 0.0};
}

struct TransposeReport {
  double max_relative_defect;
  int pairs;
  bool pass;
};

/// Dot-product test of the transpose contract on random (q, p) pairs. The
/// defect is normalized by sum |p_i (Lq)_i|, which does not cancel.
template <EvolutionOperator Op>
TransposeReport check_transpose(const Op &op, int pairs, std::uint64_t seed,
                                double tolerance = 1e-12) {
  std::mt19937_64 seeds(seed);
  double worst = 0.0;
  for (int k = 0; k < pairs; ++k) {
    const FieldState q = random_field(op.grid(), seeds());
    const FieldState p = random_field(op.grid(), seeds());
    const FieldState lq = op.apply(q);
    const FieldState ltp = op.apply_transpose(p);
    double scale = 0.0;
    for (std::size_t i = 0; i < lq.flat().size(); ++i)
      scale += std::abs(p.flat()[i] * lq.flat()[i]);
    const double defect = std::abs(dot(p, lq) - dot(ltp, q));
    worst = std::max(worst, scale > 0.0 ? defect / scale : defect);
  }
  return {worst, pairs, worst <= tolerance};
}

/// Real-valued function on the doubled phase space. `support`, when set,
/// lists every flat coordinate the value can depend on; the bracket then
/// leaves all other partial derivatives at zero instead of probing them.
struct Functional {
  std::function<double(const DoubledState &)> eval;
  std::optional<std::vector<std::size_t>> support;
};

/// xi^a
inline Functional coordinate_functional(std::size_t a) {
  return {[a](const DoubledState &st) { return st[a]; },
          std::vector<std::size_t>{a}};
}

/// q^n at a node.
inline Functional q_functional(const Grid3 &grid, int n, std::size_t node) {
  return coordinate_functional(static_cast<std::size_t>(n) * grid.size() + node);
}

/// p_n at a node.
inline Functional p_functional(const Grid3 &grid, int n, std::size_t node) {
  const std::size_t half = FieldState::components * grid.size();
  return coordinate_functional(half + static_cast<std::size_t>(n) * grid.size() +
                               node);
}

template <EvolutionOperator Op>
Functional hamiltonian_functional(const Op &op) {
  return {[&op](const DoubledState &st) { return hamiltonian(op, st); },
          std::nullopt};
}

namespace detail {

class Prober {
public:
  Prober(const DoubledState &st, double fd_step) : work_(st), fd_step_(fd_step) {}

  /// Central difference dA/dxi^a with step fd_step * max(1, |xi^a|).
  double derivative(const Functional &f, std::size_t a) {
    const double x = work_[a];
    const double h = fd_step_ * std::max(1.0, std::abs(x));
    const double xp = x + h;
    const double xm = x - h;
    work_[a] = xp;
    const double fp = f.eval(work_);
    work_[a] = xm;
    const double fm = f.eval(work_);
    work_[a] = x;
    if (!std::isfinite(fp) || !std::isfinite(fm))
      throw EvaluationError("functional returned a non-finite value while "
                            "probing coordinate " + std::to_string(a));
    return (fp - fm) / (xp - xm);
  }

private:
  DoubledState work_;
  double fd_step_;
};

inline bool depends_on(const Functional &f, std::size_t a) {
  return !f.support ||
         std::find(f.support->begin(), f.support->end(), a) != f.support->end();
}

} // namespace detail

/// {A, B} = Omega^{ab} dA/dxi^a dB/dxi^b with Omega = (0 I; -I 0), gradients
/// by central differences.
inline double poisson_bracket(const Functional &A, const Functional &B,
                              const DoubledState &st, double fd_step = 1e-4) {
  if (!(fd_step > 0.0))
    throw Error("poisson_bracket: fd_step must be positive");
  const std::size_t half = st.half_size();

  // Canonical pairs (q^i, p_i) that may contribute, in ascending order: a
  // pair counts only if both functionals can depend on it.
  auto pair_set = [half](const std::vector<std::size_t> &s) {
    std::vector<std::size_t> out;
    for (std::size_t a : s)
      out.push_back(a % half);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };
  std::vector<std::size_t> pairs;
  if (A.support && B.support) {
    const auto pa = pair_set(*A.support), pb = pair_set(*B.support);
    std::set_intersection(pa.begin(), pa.end(), pb.begin(), pb.end(),
                          std::back_inserter(pairs));
  } else if (A.support || B.support) {
    pairs = pair_set(A.support ? *A.support : *B.support);
  } else {
    pairs.resize(half);
    for (std::size_t i = 0; i < half; ++i)
      pairs[i] = i;
  }

  detail::Prober prober(st, fd_step);
  auto grad = [&prober](const Functional &f, std::size_t a) {
    return detail::depends_on(f, a) ? prober.derivative(f, a) : 0.0;
  };
  double sum = 0.0;
  for (std::size_t i : pairs) {
    const double aq = grad(A, i);
    const double ap = grad(A, i + half);
    const double bq = grad(B, i);
    const double bp = grad(B, i + half);
    sum += aq * bp - ap * bq;
  }
  return sum;
}

/// {A, B} as a functional in its own right, for nested brackets.
inline Functional bracket_functional(Functional A, Functional B,
                                     double fd_step = 1e-4) {
  std::optional<std::vector<std::size_t>> support;
  if (A.support && B.support) {
    std::vector<std::size_t> s = *A.support;
    s.insert(s.end(), B.support->begin(), B.support->end());
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    support = std::move(s);
  }
  return {[A = std::move(A), B = std::move(B), fd_step](const DoubledState &st) {
            return poisson_bracket(A, B, st, fd_step);
          },
          std::move(support)};
}

/// 1/2 xi_S^T Q xi_S + l^T xi_S with symmetric Q on a support S, entries
/// uniform in [-1, 1).
inline Functional random_quadratic_functional(const std::vector<std::size_t> &pool,
                                              std::size_t size, std::mt19937_64 &rng) {
  std::vector<std::size_t> s = pool;
  std::shuffle(s.begin(), s.end(), rng);
  s.resize(std::min(size, s.size()));
  const std::size_t m = s.size();
  std::vector<double> Q(m * m), l(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j)
      Q[i * m + j] = Q[j * m + i] = uniform_pm1(rng);
  for (double &x : l)
    x = uniform_pm1(rng);
  auto eval = [s, Q, l](const DoubledState &st) {
    const std::size_t m = s.size();
    double v = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double xi = st[s[i]];
      double row = 0.0;
      for (std::size_t j = 0; j < m; ++j)
        row += Q[i * m + j] * st[s[j]];
      v += xi * (l[i] + 0.5 * row);
    }
    return v;
  };
  return {eval, s};
}

struct BracketReport {
  double canonical_error;     // max |{q^n, p_m} - delta| and |{q, q}|, |{p, p}|
  double antisymmetry_defect; // max |{A, B} + {B, A}|
  double jacobi_defect;       // relative to the largest nested bracket
  double flow_error;          // max |{q^n, H} - vol f^n|, |{p_n, H} - vol p'_n|
  bool pass;
};

/// Bracket axioms on a handful of nodes and random quadratic functionals.
template <EvolutionOperator Op>
BracketReport check_bracket_axioms(const Op &op, const DoubledState &st,
                                   std::uint64_t seed, double fd_step = 1e-4) {
  const Grid3 &g = op.grid();
  const std::size_t half = st.half_size();
  std::mt19937_64 rng(seed);
  BracketReport r{};

  std::vector<std::size_t> nodes{0, g.size() / 3, g.size() - 1};
  for (int n = 0; n < FieldState::components; ++n)
    for (int m = 0; m < FieldState::components; ++m)
      for (std::size_t a : nodes)
        for (std::size_t b : nodes) {
          const double expected = (n == m && a == b) ? 1.0 : 0.0;
          const double qp = poisson_bracket(q_functional(g, n, a), p_functional(g, m, b), st, fd_step);
          const double qq = poisson_bracket(q_functional(g, n, a), q_functional(g, m, b), st, fd_step);
          const double pp = poisson_bracket(p_functional(g, n, a), p_functional(g, m, b), st, fd_step);
          r.canonical_error = std::max({r.canonical_error, std::abs(qp - expected),
                                        std::abs(qq), std::abs(pp)});
        }

  std::vector<std::size_t> pool;
  for (int k = 0; k < 6; ++k) {
    const std::size_t a = static_cast<std::size_t>(rng() % half);
    pool.push_back(a);
    pool.push_back(a + half);
  }
  for (int trial = 0; trial < 4; ++trial) {
    const Functional A = random_quadratic_functional(pool, 8, rng);
    const Functional B = random_quadratic_functional(pool, 8, rng);
    const Functional C = random_quadratic_functional(pool, 8, rng);
    r.antisymmetry_defect =
        std::max(r.antisymmetry_defect, std::abs(poisson_bracket(A, B, st, fd_step) +
                                                 poisson_bracket(B, A, st, fd_step)));
    const double j1 = poisson_bracket(A, bracket_functional(B, C, fd_step), st, fd_step);
    const double j2 = poisson_bracket(B, bracket_functional(C, A, fd_step), st, fd_step);
    const double j3 = poisson_bracket(C, bracket_functional(A, B, fd_step), st, fd_step);
    const double largest = std::max({std::abs(j1), std::abs(j2), std::abs(j3), 1e-300});
    r.jacobi_defect = std::max(r.jacobi_defect, std::abs(j1 + j2 + j3) / largest);
  }

  const Functional H = hamiltonian_functional(op);
  const FieldState f = op.apply(st.q);
  const FieldState p_dot = hamilton_rhs(op, st).p;
  const double vol = g.cell_volume();
  double scale = 1.0;
  for (int n = 0; n < FieldState::components; ++n)
    for (std::size_t a : nodes) {
      r.flow_error = std::max(
          {r.flow_error,
           std::abs(poisson_bracket(q_functional(g, n, a), H, st, fd_step) - vol * f.at(n, a)),
           std::abs(poisson_bracket(p_functional(g, n, a), H, st, fd_step) -
                    vol * p_dot.at(n, a))});
      scale = std::max({scale, vol * std::abs(f.at(n, a)), vol * std::abs(p_dot.at(n, a))});
    }
  r.flow_error /= scale;

  r.pass = r.canonical_error <= 1e-6 && r.antisymmetry_defect == 0.0 &&
           r.jacobi_defect <= 1e-5 && r.flow_error <= 1e-6;
  return r;
}

} // namespace symmax

#endif // SYMMAX_DOUBLING_HPP
