// Acceptance checks: one PASS/FAIL line per criterion; exit status 1 if any fail.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "dense_oracle.hpp"
#include "symmax/doubling.hpp"
#include "symmax/integrate.hpp"
#include "symmax/maxwell.hpp"

using namespace symmax;

namespace {

int failures = 0;

void report(int id, const char *what, bool pass, const std::string &detail, double secs) {
  std::printf("criterion %d %-24s %s  %s  [%.2f s]\n", id, what, pass ? "PASS" : "FAIL",
              detail.c_str(), secs);
  std::fflush(stdout);
  if (!pass)
    ++failures;
}

std::string fmt(const char *f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

template <class F> void timed(int id, const char *what, F &&body) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string detail;
  const bool pass = body(detail);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(id, what, pass, detail, secs);
}

DoubledState random_state(const Grid3 &g, std::uint64_t seed) {
  return DoubledState(random_field(g, seed), random_field(g, seed + 1000));
}

FieldState plane_wave(const Grid3 &g) {
  FieldState q(g);
  q.fill([](const Point3 &x) {
    const double v = std::cos(x[0]);
    return std::array<double, 6>{0, v, 0, 0, 0, v};
  });
  return q;
}

double relative_l2(const FieldState &a, const FieldState &b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.flat().size(); ++i) {
    const double d = a.flat()[i] - b.flat()[i];
    num += d * d;
    den += b.flat()[i] * b.flat()[i];
  }
  return std::sqrt(num / den);
}

Expr E(const char *s) { return Expr::parse(s); }

Chart wavy_chart() {
  return Chart("wavy", {E("1 + 0.3 * sin(x2)"), E("0.1 * sin(x1 + x2)"), Expr::constant(0),
                        E("1 + 0.2 * cos(x1)"), Expr::constant(0), Expr::constant(1)});
}

Medium wavy_medium() {
  return Medium("wavy", Medium::diagonal(E("2 + sin(x1)"), E("2 + cos(x2)"), Expr::constant(2)),
                Medium::diagonal(E("1.5 + 0.5 * sin(x1 + x2)"), Expr::constant(1),
                                 Expr::constant(1.2)));
}

} // namespace

int main() {
  timed(1, "irregularity", [](std::string &d) {
    bool pass = true;
    for (double c : {1.0, 29979245800.0}) {
      const auto r = irregularity_report(c);
      pass = pass && r.pass;
      d += fmt("c=%g: row0=%.1e det=%.1e block_err=%.1e; ", c, r.max_row0, r.max_abs_det,
               r.max_block_error);
    }
    return pass;
  });

  timed(2, "redundancy", [](std::string &d) {
    bool pass = true;
    auto probe = [&](const char *label, const MaxwellOperator &op, std::uint64_t seed) {
      const FieldState q = random_field(op.grid(), seed);
      const auto r = verify_redundancy(op, q);
      const double worst = std::max({r.ddt_div_b, r.ddt_div_d, r.mixed_e, r.mixed_h});
      const double bound = 1e-11 * q.max_abs();
      pass = pass && worst < bound;
      d += fmt("%s %.1e/%.1e; ", label, worst, bound);
    };
    const Grid3 cart({16, 16, 16}, {0, 0, 0}, {1, 1, 1});
    probe("cartesian", MaxwellOperator(Chart::cartesian(), Medium::vacuum(), cart, 1.0), 1);
    const Grid3 cyl({16, 16, 16}, {1, 0, 0}, {1, 2 * pi, 1});
    probe("cylindrical", MaxwellOperator(Chart::cylindrical(), Medium::vacuum(), cyl, 1.0), 2);

    const Grid3 g({64, 4, 4}, {0, 0, 0}, {2 * pi, 1, 1});
    const MaxwellOperator op(Chart::cartesian(), Medium::vacuum(), g, 1.0);
    const FieldState q = plane_wave(g);
    StepperSpec spec;
    spec.dt = 2 * pi / 2000;
    const auto run_result = run(op, DoubledState(q, FieldState(g)), spec, 2000, 20);
    double div = 0.0;
    for (const auto &rec : run_result.series)
      div = std::max({div, rec.div_b, rec.div_d});
    const double bound = 1e-10 * q.max_abs();
    pass = pass && div < bound;
    d += fmt("plane-wave run %.1e/%.1e", div, bound);
    return pass;
  });

  timed(3, "doubling structure", [](std::string &d) {
    const Grid3 g({8, 8, 8}, {0, 0, 0}, {1, 1, 1});
    const MaxwellOperator op(Chart::cartesian(), Medium::vacuum(), g, 1.0);
    const auto first = check_first_group_identity(op, random_field(g, 3));
    const auto br = check_bracket_axioms(op, random_state(g, 4), 2015);
    const auto tr = check_transpose(op, 100, 5);
    d = fmt("first_group=%.1e canonical=%.1e antisym=%.1e jacobi=%.1e transpose=%.1e",
            first.max_difference, br.canonical_error, br.antisymmetry_defect,
            br.jacobi_defect, tr.max_relative_defect);
    return first.max_difference == 0.0 && br.canonical_error <= 1e-6 &&
           br.antisymmetry_defect == 0.0 && br.jacobi_defect <= 1e-5 &&
           tr.max_relative_defect <= 1e-12 && tr.pairs == 100;
  });

  timed(4, "dense oracle", [](std::string &d) {
    const Grid3 g({4, 4, 4}, {0, 0, 0}, {1, 1, 1});
    const MaxwellOperator op(Chart::cartesian(), Medium::vacuum(), g, 1.0);
    const oracle::Dense L = oracle::vacuum_cartesian_matrix(g, 1.0);
    const oracle::Dense Lt = oracle::transpose(L);
    const DoubledState st = random_state(g, 6);
    const auto x = oracle::to_vector(st);

    const auto lq = oracle::matvec(L, oracle::to_vector(st.q));
    const auto p = oracle::to_vector(st.p);
    double h = 0.0, h_scale = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      h += p[i] * lq[i];
      h_scale += std::abs(p[i] * lq[i]);
    }
    h *= g.cell_volume();
    h_scale *= g.cell_volume();
    const double h_err = std::abs(hamiltonian(op, st) - h) / h_scale;

    const auto rhs_expected = oracle::doubled_apply(L, Lt, x);
    const double rhs_err = oracle::max_diff(oracle::to_vector(hamilton_rhs(op, st)),
                                            rhs_expected) /
                           oracle::max_abs(rhs_expected);

    const double dt = 0.01;
    const auto step_expected = oracle::taylor_exp(L, Lt, x, dt, 4);
    const double step_err =
        oracle::max_diff(oracle::to_vector(rk4_step(op, st, dt)), step_expected) /
        oracle::max_abs(step_expected);

    const double T = 0.4;
    std::vector<double> exact = x;
    for (int k = 0; k < 8; ++k)
      exact = oracle::taylor_exp(L, Lt, exact, T / 8, 40);
    auto global_error = [&](int steps) {
      DoubledState s = st;
      for (int k = 0; k < steps; ++k)
        s = rk4_step(op, s, T / steps);
      return oracle::max_diff(oracle::to_vector(s), exact);
    };
    const double order = std::log2(global_error(8) / global_error(16));
    d = fmt("H=%.1e rhs=%.1e step=%.1e order=%.2f", h_err, rhs_err, step_err, order);
    return h_err <= 1e-12 && rhs_err <= 1e-12 && step_err <= 1e-12 && order >= 3.9;
  });

  timed(5, "plane wave and midpoint", [](std::string &d) {
    auto period_error = [](int order) {
      const Grid3 g({64, 4, 4}, {0, 0, 0}, {2 * pi, 1, 1}, order);
      const MaxwellOperator op(Chart::cartesian(), Medium::vacuum(), g, 1.0);
      const FieldState q = plane_wave(g);
      StepperSpec spec;
      spec.dt = 2 * pi / 2000;
      const auto r = run(op, DoubledState(q, FieldState(g)), spec, 2000, 2000);
      return relative_l2(r.final_state.q, q);
    };
    const double e4 = period_error(4), e2 = period_error(2);

    const Grid3 g({64, 4, 4}, {0, 0, 0}, {2 * pi, 1, 1});
    const MaxwellOperator op(Chart::cartesian(), Medium::vacuum(), g, 1.0);
    FieldState p(g);
    p.fill([](const Point3 &x) {
      const double v = std::sin(x[0]);
      return std::array<double, 6>{0, v, 0, 0, 0, 0.5 * v};
    });
    StepperSpec spec;
    spec.method = Method::implicit_midpoint;
    spec.dt = 2 * pi / 2000;
    const auto r = run(op, DoubledState(plane_wave(g), p), spec, 1000, 10);
    const double h0 = r.series.front().hamiltonian, e0 = r.series.front().energy;
    double dh = 0.0, de = 0.0;
    for (const auto &rec : r.series) {
      dh = std::max(dh, std::abs(rec.hamiltonian - h0) / std::abs(h0));
      de = std::max(de, std::abs(rec.energy - e0) / e0);
    }
    d = fmt("L2 err %.2e (order 2 stencil: %.2e, info); midpoint dH/H=%.1e (tol %.0e) "
            "dE/E=%.1e",
            e4, e2, dh, 10 * spec.midpoint_tol, de);
    return e4 < 1e-3 && dh <= 10 * spec.midpoint_tol && de <= 1e-6;
  });

  timed(6, "continuum adjoint", [](std::string &d) {
    auto error_at = [](int n) {
      const Grid3 g({n, n, 4}, {0, 0, 0}, {2 * pi, 2 * pi, 1});
      const MaxwellOperator op(wavy_chart(), wavy_medium(), g, 1.0);
      FieldState p(g);
      p.fill([](const Point3 &x) {
        return std::array<double, 6>{std::sin(x[0]), std::cos(x[1]), std::sin(x[0] + x[1]),
                                     std::cos(x[0]) * std::sin(x[1]), std::sin(2 * x[1]),
                                     std::cos(x[0] - x[1])};
      });
      FieldState discrete = op.apply_transpose(p);
      discrete.scale(-1.0);
      const FieldState cont = continuum_momentum_rhs(op, p);
      double m = 0.0;
      for (std::size_t i = 0; i < cont.flat().size(); ++i)
        m = std::max(m, std::abs(discrete.flat()[i] - cont.flat()[i]));
      return m;
    };
    const double e32 = error_at(32), e64 = error_at(64);
    const double rate = std::log2(e32 / e64);
    d = fmt("err(32)=%.2e err(64)=%.2e rate=%.2f", e32, e64, rate);
    return rate >= 1.9;
  });

  std::printf("%s\n", failures == 0 ? "ALL PASS" : "SOME CRITERIA FAILED");
  return failures == 0 ? 0 : 1;
}
