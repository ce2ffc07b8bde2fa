#ifndef SYMMAX_INTEGRATE_HPP
#define SYMMAX_INTEGRATE_HPP

#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "symmax/doubling.hpp"
#include "symmax/errors.hpp"

namespace symmax {

enum class Method { rk4, implicit_midpoint };

inline const char *method_name(Method m) {
  return m == Method::rk4 ? "rk4" : "implicit_midpoint";
}

struct StepperSpec {
  Method method = Method::rk4;
  double dt = 1e-3;
  double midpoint_tol = 1e-12;
  int midpoint_max_iter = 50;
};

struct MonitorRecord {
  double t;
  double hamiltonian;
  double energy;
  double div_b;
  double div_d;
};

/// Classical four-stage Runge-Kutta on the joint (q, p) derivative.
template <EvolutionOperator Op>
DoubledState rk4_step(const Op &op, const DoubledState &st, double dt) {
  const DoubledState k1 = hamilton_rhs(op, st);
  DoubledState y = st;
  y.add_scaled(0.5 * dt, k1);
  const DoubledState k2 = hamilton_rhs(op, y);
  y = st;
  y.add_scaled(0.5 * dt, k2);
  const DoubledState k3 = hamilton_rhs(op, y);
  y = st;
  y.add_scaled(dt, k3);
  const DoubledState k4 = hamilton_rhs(op, y);
  DoubledState out = st;
  out.add_scaled(dt / 6.0, k1);
  out.add_scaled(dt / 3.0, k2);
  out.add_scaled(dt / 3.0, k3);
  out.add_scaled(dt / 6.0, k4);
  return out;
}

/// Solves x+ = x + dt F((x + x+)/2) by fixed-point iteration, starting from
/// an explicit Euler guess. Converged when the update falls below
/// midpoint_tol * ||x||_inf.
template <EvolutionOperator Op>
DoubledState implicit_midpoint_step(const Op &op, const DoubledState &st,
                                    const StepperSpec &spec) {
  const double scale = st.max_abs();
  DoubledState next = st;
  next.add_scaled(spec.dt, hamilton_rhs(op, st));
  double residual = 0.0;
  for (int iter = 0; iter < spec.midpoint_max_iter; ++iter) {
    DoubledState mid = st;
    mid.add_scaled(1.0, next).scale(0.5);
    DoubledState candidate = st;
    candidate.add_scaled(spec.dt, hamilton_rhs(op, mid));
    residual = 0.0;
    for (std::size_t a = 0; a < candidate.size(); ++a)
      residual = std::max(residual, std::abs(candidate[a] - next[a]));
    next = std::move(candidate);
    if (residual <= spec.midpoint_tol * scale)
      return next;
  }
  throw DivergenceError(scale > 0.0 ? residual / scale : residual,
                        spec.midpoint_max_iter);
}

template <EvolutionOperator Op>
DoubledState step(const Op &op, const DoubledState &st, const StepperSpec &spec) {
  if (!(spec.dt != 0.0) || !std::isfinite(spec.dt))
    throw Error("time step must be finite and nonzero");
  return spec.method == Method::rk4 ? rk4_step(op, st, spec.dt)
                                    : implicit_midpoint_step(op, st, spec);
}

/// Monitor values at one instant. Energy and divergence norms are filled
/// when the operator provides them (MaxwellOperator does), zero otherwise.
template <EvolutionOperator Op>
MonitorRecord monitor(const Op &op, const DoubledState &st, double t) {
  MonitorRecord r{t, hamiltonian(op, st), 0.0, 0.0, 0.0};
  if constexpr (requires { op.energy(st.q); })
    r.energy = op.energy(st.q);
  if constexpr (requires { op.constraint_norms(st.q); }) {
    const auto norms = op.constraint_norms(st.q);
    r.div_b = norms.div_b;
    r.div_d = norms.div_d;
  }
  return r;
}

/// Name of the first non-finite entry, if any.
inline std::optional<std::string> first_non_finite(const DoubledState &st) {
  const Grid3 &grid = st.grid();
  for (int half = 0; half < 2; ++half) {
    const FieldState &f = half == 0 ? st.q : st.p;
    for (int n = 0; n < FieldState::components; ++n)
      for (std::size_t i = 0; i < f.nodes(); ++i)
        if (!std::isfinite(f.at(n, i))) {
          const auto [a, b, c] = grid.node(i);
          return std::string(half == 0 ? "q" : "p") + "[" + component_names[n] +
                 "] at node (" + std::to_string(a) + ", " + std::to_string(b) +
                 ", " + std::to_string(c) + ")";
        }
  }
  return std::nullopt;
}

struct RunResult {
  DoubledState final_state;
  std::vector<MonitorRecord> series;
};

/// Called after every step with the step count and the new state.
using StepObserver = std::function<void(long, double, const DoubledState &)>;

/// Records t = 0, every `monitor_every` steps, and the final step.
template <EvolutionOperator Op>
RunResult run(const Op &op, const DoubledState &st0, const StepperSpec &spec,
              long n_steps, long monitor_every,
              const StepObserver &observer = nullptr) {
  if (n_steps < 1)
    throw Error("n_steps must be at least 1");
  if (monitor_every < 1)
    throw Error("monitor_every must be at least 1");
  RunResult result{st0, {}};
  result.series.push_back(monitor(op, st0, 0.0));
  for (long k = 1; k <= n_steps; ++k) {
    try {
      result.final_state = step(op, result.final_state, spec);
    } catch (const DivergenceError &e) {
      throw DivergenceError(e.residual(), e.iterations(), k);
    } catch (const Error &e) {
      throw StepError(k, e.what());
    }
    if (auto bad = first_non_finite(result.final_state))
      throw BlowUpError(k, *bad);
    const double t = static_cast<double>(k) * spec.dt;
    if (observer)
      observer(k, t, result.final_state);
    if (k % monitor_every == 0 || k == n_steps)
      result.series.push_back(monitor(op, result.final_state, t));
  }
  return result;
}

/// Advisory time-step bound dt <= 0.5 h_min / (c gain). Returns a warning
/// message when violated.
inline std::optional<std::string> cfl_warning(const StepperSpec &spec, double h_min,
                                              double c, double gain) {
  const double bound = 0.5 * h_min / (c * std::max(gain, 1e-300));
  if (std::abs(spec.dt) <= bound)
    return std::nullopt;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "dt = %.6g exceeds the advisory stability bound %.6g", spec.dt,
                bound);
  return std::string(buf);
}

/// CSV with header t,hamiltonian,energy,div_b,div_d at 17 significant digits.
inline void write_monitor_csv(std::ostream &out,
                              const std::vector<MonitorRecord> &series,
                              const std::vector<std::string> &comments = {}) {
  for (const auto &c : comments)
    out << "# " << c << '\n';
  out << "t,hamiltonian,energy,div_b,div_d\n";
  char buf[192];
  for (const auto &r : series) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t,
                  r.hamiltonian, r.energy, r.div_b, r.div_d);
    out << buf;
  }
}

} // namespace symmax

#endif // SYMMAX_INTEGRATE_HPP
