#ifndef SYMMAX_SCENARIO_HPP
#define SYMMAX_SCENARIO_HPP

// Scenario files: sectioned key = value text.
//
//   file     = { line } ;
//   line     = blank | comment | section | entry ;
//   comment  = "#" { any } ;                 (also allowed after an entry)
//   section  = "[" name "]" ;
//   entry    = key "=" value ;
//   value    = text up to end of line or "#", trimmed ;
//
// Reals are constant Expr strings ("2*pi", "1/3"); triples are three values
// separated by commas. See README for the key list per section.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "symmax/doubling.hpp"
#include "symmax/errors.hpp"
#include "symmax/exprlang.hpp"
#include "symmax/geometry.hpp"
#include "symmax/grid.hpp"
#include "symmax/integrate.hpp"
#include "symmax/maxwell.hpp"
#include "symmax/media.hpp"

namespace symmax {

enum class InitialKind { zero, plane_wave, gaussian_pulse };
enum class MomentaKind { zero, random };

struct InitialSpec {
  InitialKind kind = InitialKind::zero;
  int axis = 1;         // propagation axis, 1-based
  int polarization = 2; // E component, 1-based
  int k_index = 1;
  double amplitude = 1.0;
  std::optional<Point3> center; // default: grid centre
  std::optional<double> width;  // default: extent_min / 10
  MomentaKind momenta = MomentaKind::zero;
  std::uint64_t seed = 2015;
};

struct Scenario {
  std::string name;
  std::string source; // path or label used in messages
  double c = 1.0;
  Chart chart = Chart::cartesian();
  Medium medium = Medium::vacuum();
  std::array<int, 3> n{};
  Point3 origin{0, 0, 0};
  std::array<double, 3> extent{};
  int stencil_order = 2;
  InitialSpec initial;
  StepperSpec stepper;
  long steps = 0;
  long monitor_every = 1;
  long snapshot_every = 0;
  std::string output_dir;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  int line;
  int column; // 1-based column of the first value character
};

using Section = std::map<std::string, Entry>;

struct Located {
  std::string source;
  std::vector<std::string> problems;

  void add(int line, int column, const std::string &msg) {
    problems.push_back(source + ":" + std::to_string(line) + ":" + std::to_string(column) +
                       ": " + msg);
  }
  void add(const Entry &e, const std::string &key, const std::string &msg) {
    add(e.line, e.column, key + ": " + msg);
  }
};

inline const std::map<std::string, std::set<std::string>> &known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"scenario", {"name", "c"}},
      {"chart", {"type", "g11", "g12", "g13", "g22", "g23", "g33"}},
      {"medium",
       {"type", "radius", "eps_perp", "eps_par", "axis", "eps11", "eps12", "eps13", "eps21",
        "eps22", "eps23", "eps31", "eps32", "eps33", "mu11", "mu12", "mu13", "mu21", "mu22",
        "mu23", "mu31", "mu32", "mu33"}},
      {"grid", {"n", "origin", "extent", "stencil_order"}},
      {"initial",
       {"type", "axis", "polarization", "k_index", "amplitude", "center", "width", "momenta",
        "seed"}},
      {"stepper", {"method", "dt", "midpoint_tol", "midpoint_max_iter"}},
      {"run", {"steps", "monitor_every", "snapshot_every", "output_dir"}},
  };
  return keys;
}

class Reader {
public:
  Reader(std::map<std::string, Section> sections, Located &log)
      : sections_(std::move(sections)), log_(log) {}

  const Entry *find(const std::string &sec, const std::string &key) const {
    const auto s = sections_.find(sec);
    if (s == sections_.end())
      return nullptr;
    const auto e = s->second.find(key);
    return e == s->second.end() ? nullptr : &e->second;
  }

  bool has(const std::string &sec, const std::string &key) const {
    return find(sec, key) != nullptr;
  }

  void require(const std::string &sec, const std::string &key) {
    if (!has(sec, key))
      log_.problems.push_back(log_.source + ": missing required key '" + key +
                              "' in [" + sec + "]");
  }

  std::optional<Expr> expr(const std::string &sec, const std::string &key) {
    const Entry *e = find(sec, key);
    if (!e)
      return std::nullopt;
    return parse_expr(*e, key, 0, e->value);
  }

  std::optional<Expr> parse_expr(const Entry &e, const std::string &key, std::size_t offset,
                                 std::string_view text) {
    const std::string src(text);
    try {
      return Expr::parse(src);
    } catch (const ParseError &err) {
      log_.add(e.line, e.column + static_cast<int>(offset + err.offset()),
               key + ": expected " + err.expected());
    } catch (const UnknownIdentifierError &err) {
      log_.add(e.line, e.column + static_cast<int>(offset + err.offset()),
               key + ": unknown identifier '" + err.name() + "'");
    }
    return std::nullopt;
  }

  std::optional<double> constant(const Entry &e, const std::string &key, std::size_t offset,
                                 std::string_view text) {
    const auto ex = parse_expr(e, key, offset, text);
    if (!ex)
      return std::nullopt;
    if (!ex->is_constant()) {
      log_.add(e.line, e.column + static_cast<int>(offset), key + ": must be a constant");
      return std::nullopt;
    }
    try {
      return ex->eval({0, 0, 0});
    } catch (const Error &err) {
      log_.add(e.line, e.column + static_cast<int>(offset), key + ": " + err.what());
      return std::nullopt;
    }
  }

  template <class T> void real(const std::string &sec, const std::string &key, T &out) {
    if (const Entry *e = find(sec, key))
      if (auto v = constant(*e, key, 0, e->value))
        out = *v;
  }

  template <class T> void integer(const std::string &sec, const std::string &key, T &out) {
    const Entry *e = find(sec, key);
    if (!e)
      return;
    long long v = 0;
    const char *first = e->value.data(), *last = first + e->value.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
      log_.add(*e, key, "expected an integer, got '" + e->value + "'");
      return;
    }
    out = static_cast<T>(v);
  }

  void triple(const std::string &sec, const std::string &key, std::array<double, 3> &out) {
    const Entry *e = find(sec, key);
    if (!e)
      return;
    const auto parts = split(*e, key);
    if (parts.size() != 3)
      return;
    std::array<double, 3> v{};
    bool ok = true;
    for (std::size_t i = 0; i < 3; ++i) {
      const auto c = constant(*e, key, parts[i].first, parts[i].second);
      ok = ok && c.has_value();
      if (c)
        v[i] = *c;
    }
    if (ok)
      out = v;
  }

  void int_triple(const std::string &sec, const std::string &key, std::array<int, 3> &out) {
    const Entry *e = find(sec, key);
    if (!e)
      return;
    const auto parts = split(*e, key);
    if (parts.size() != 3)
      return;
    std::array<int, 3> v{};
    for (std::size_t i = 0; i < 3; ++i) {
      const std::string_view s = parts[i].second;
      int x = 0;
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
      if (ec != std::errc() || ptr != s.data() + s.size()) {
        log_.add(e->line, e->column + static_cast<int>(parts[i].first),
                 key + ": expected an integer, got '" + std::string(s) + "'");
        return;
      }
      v[i] = x;
    }
    out = v;
  }

  std::string word(const std::string &sec, const std::string &key,
                   const std::string &fallback, std::initializer_list<const char *> allowed) {
    const Entry *e = find(sec, key);
    if (!e)
      return fallback;
    for (const char *a : allowed)
      if (e->value == a)
        return e->value;
    std::string list;
    for (const char *a : allowed)
      list += (list.empty() ? "" : ", ") + std::string(a);
    log_.add(*e, key, "unknown value '" + e->value + "' (expected one of: " + list + ")");
    return fallback;
  }

  void forbid_unless(const std::string &sec, bool allowed_now,
                     std::initializer_list<const char *> keys, const std::string &why) {
    if (allowed_now)
      return;
    for (const char *k : keys)
      if (const Entry *e = find(sec, k))
        log_.add(*e, k, "not used " + why);
  }

  Located &log() { return log_; }

private:
  // Comma-separated pieces as (offset into value, text).
  std::vector<std::pair<std::size_t, std::string_view>> split(const Entry &e,
                                                              const std::string &key) {
    std::vector<std::pair<std::size_t, std::string_view>> parts;
    const std::string_view v = e.value;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = v.find(',', start);
      const std::string_view raw = v.substr(start, comma == std::string_view::npos
                                                       ? std::string_view::npos
                                                       : comma - start);
      const std::string_view t = trim(raw);
      const std::size_t lead = t.empty() ? 0 : static_cast<std::size_t>(t.data() - raw.data());
      parts.emplace_back(start + lead, t);
      if (comma == std::string_view::npos)
        break;
      start = comma + 1;
    }
    if (parts.size() != 3) {
      log_.add(e, key, "expected three comma-separated values, got " +
                           std::to_string(parts.size()));
      parts.clear();
    }
    return parts;
  }

  std::map<std::string, Section> sections_;
  Located &log_;
};

inline std::map<std::string, Section> parse_sections(std::string_view text, Located &log) {
  std::map<std::string, Section> sections;
  std::string current;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos
                                                                          : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    const std::string_view t = trim(line);
    if (t.empty())
      continue;
    const int col = static_cast<int>(t.data() - line.data()) + 1;
    if (t.front() == '[') {
      if (t.back() != ']') {
        log.add(line_no, col + static_cast<int>(t.size()), "expected ']'");
        current.clear();
        continue;
      }
      current = std::string(trim(t.substr(1, t.size() - 2)));
      if (!known_keys().count(current)) {
        log.add(line_no, col + 1, "unknown section [" + current + "]");
        current = "?";
      } else if (sections.count(current)) {
        log.add(line_no, col + 1, "duplicate section [" + current + "]");
      }
      sections[current];
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      log.add(line_no, col, "expected 'key = value'");
      continue;
    }
    const std::string key(trim(t.substr(0, eq)));
    const std::string_view raw_value = t.substr(eq + 1);
    const std::string_view value = trim(raw_value);
    const int value_col =
        col + static_cast<int>(eq + 1) +
        static_cast<int>(value.empty() ? 0 : value.data() - raw_value.data());
    if (current.empty()) {
      log.add(line_no, col, "entry '" + key + "' before any [section]");
      continue;
    }
    if (current == "?")
      continue;
    if (key.empty()) {
      log.add(line_no, col, "missing key before '='");
      continue;
    }
    if (!known_keys().at(current).count(key)) {
      log.add(line_no, col, "unknown key '" + key + "' in [" + current + "]");
      continue;
    }
    if (value.empty()) {
      log.add(line_no, value_col, key + ": missing value");
      continue;
    }
    auto &sec = sections[current];
    if (sec.count(key)) {
      log.add(line_no, col, "duplicate key '" + key + "' in [" + current + "]");
      continue;
    }
    sec[key] = Entry{std::string(value), line_no, value_col};
  }
  return sections;
}

inline std::string format_node(const Grid3 &g, std::size_t i) {
  const auto [a, b, c] = g.node(i);
  return "node (" + std::to_string(a) + ", " + std::to_string(b) + ", " + std::to_string(c) +
         "), x = " + format_point(g.point(i));
}

} // namespace detail

/// Semantic checks on an assembled scenario; every problem is listed.
inline std::vector<std::string> validate_scenario(const Scenario &s) {
  std::vector<std::string> problems;
  auto add = [&](const std::string &m) { problems.push_back(s.source + ": " + m); };
  if (s.name.empty())
    add("scenario name must not be empty");
  if (!(s.c > 0.0) || !std::isfinite(s.c))
    add("c must be positive");
  const auto grid_problems = Grid3::validate(s.n, s.extent, s.stencil_order);
  for (const auto &p : grid_problems)
    add(p);
  if (!(s.stepper.dt > 0.0) || !std::isfinite(s.stepper.dt))
    add("dt must be positive");
  if (!(s.stepper.midpoint_tol > 0.0))
    add("midpoint_tol must be positive");
  if (s.stepper.midpoint_max_iter < 1)
    add("midpoint_max_iter >= 1 required (got " + std::to_string(s.stepper.midpoint_max_iter) +
        ")");
  if (s.steps < 1)
    add("steps >= 1 required (got " + std::to_string(s.steps) + ")");
  if (s.monitor_every < 1)
    add("monitor_every >= 1 required (got " + std::to_string(s.monitor_every) + ")");
  if (s.snapshot_every < 0)
    add("snapshot_every >= 0 required (got " + std::to_string(s.snapshot_every) + ")");
  const InitialSpec &in = s.initial;
  if (in.kind != InitialKind::zero) {
    if (in.polarization < 1 || in.polarization > 3)
      add("polarization must be 1, 2 or 3");
  }
  if (in.kind == InitialKind::plane_wave) {
    if (in.axis < 1 || in.axis > 3)
      add("axis must be 1, 2 or 3");
    else if (in.axis == in.polarization)
      add("polarization must differ from the propagation axis");
    if (in.k_index == 0)
      add("k_index must be nonzero");
  }
  if (in.kind == InitialKind::gaussian_pulse && in.width && !(*in.width > 0.0))
    add("width must be positive");

  // Chart and medium on every node; the first failure of each is reported.
  if (grid_problems.empty()) {
    const Grid3 g(s.n, s.origin, s.extent, s.stencil_order);
    for (std::size_t i = 0; i < g.size(); ++i) {
      try {
        metric_at(s.chart, g.point(i));
      } catch (const Error &e) {
        add("chart '" + s.chart.name() + "' fails at " + detail::format_node(g, i) + ": " +
            e.what());
        break;
      }
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
      try {
        sample_medium(s.medium, g.point(i));
      } catch (const Error &e) {
        add("medium '" + s.medium.name() + "' fails at " + detail::format_node(g, i) + ": " +
            e.what());
        break;
      }
    }
  }
  return problems;
}

/// Parses scenario text. Throws ConfigError listing every problem found.
inline Scenario parse_scenario(std::string_view text, const std::string &source = "<scenario>") {
  detail::Located log{source, {}};
  detail::Reader rd(detail::parse_sections(text, log), log);
  Scenario s;
  s.source = source;

  rd.require("scenario", "name");
  if (const auto *e = rd.find("scenario", "name"))
    s.name = e->value;
  rd.real("scenario", "c", s.c);

  const std::string chart = rd.word("chart", "type", "cartesian", {"cartesian", "cylindrical", "custom"});
  rd.forbid_unless("chart", chart == "custom", {"g11", "g12", "g13", "g22", "g23", "g33"},
                   "unless type = custom");
  if (chart == "cylindrical") {
    s.chart = Chart::cylindrical();
  } else if (chart == "custom") {
    const char *keys[6] = {"g11", "g12", "g13", "g22", "g23", "g33"};
    std::array<Expr, 6> g;
    for (int k = 0; k < 6; ++k) {
      const bool diag = k == 0 || k == 3 || k == 5;
      g[static_cast<std::size_t>(k)] = Expr::constant(diag ? 1.0 : 0.0);
      if (auto ex = rd.expr("chart", keys[k]))
        g[static_cast<std::size_t>(k)] = *ex;
    }
    s.chart = Chart("custom", g);
  }

  const std::string medium =
      rd.word("medium", "type", "vacuum", {"vacuum", "luneburg", "uniaxial", "custom"});
  rd.forbid_unless("medium", medium == "luneburg", {"radius"}, "unless type = luneburg");
  rd.forbid_unless("medium", medium == "uniaxial", {"eps_perp", "eps_par", "axis"},
                   "unless type = uniaxial");
  if (medium == "luneburg") {
    double radius = 1.0;
    rd.real("medium", "radius", radius);
    if (!(radius > 0.0))
      log.problems.push_back(source + ": medium radius must be positive");
    else
      s.medium = Medium::luneburg(radius);
  } else if (medium == "uniaxial") {
    double perp = 1.0, par = 1.0;
    int axis = 3;
    rd.real("medium", "eps_perp", perp);
    rd.real("medium", "eps_par", par);
    rd.integer("medium", "axis", axis);
    if (axis < 1 || axis > 3)
      log.problems.push_back(source + ": medium axis must be 1, 2 or 3");
    else
      s.medium = Medium::uniaxial(perp, par, axis - 1);
  } else if (medium == "custom") {
    Medium::Tensor eps = Medium::identity_tensor(), mu = Medium::identity_tensor();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const std::string ij = std::to_string(i + 1) + std::to_string(j + 1);
        const std::size_t slot = static_cast<std::size_t>(3 * i + j);
        if (auto ex = rd.expr("medium", "eps" + ij))
          eps[slot] = *ex;
        if (auto ex = rd.expr("medium", "mu" + ij))
          mu[slot] = *ex;
      }
    s.medium = Medium("custom", eps, mu);
  }
  if (medium != "custom")
    for (const char *p : {"eps", "mu"})
      for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j) {
          const std::string key = p + std::to_string(i) + std::to_string(j);
          if (const auto *e = rd.find("medium", key))
            log.add(*e, key, "not used unless type = custom");
        }

  rd.require("grid", "n");
  rd.require("grid", "extent");
  rd.int_triple("grid", "n", s.n);
  rd.triple("grid", "origin", s.origin);
  rd.triple("grid", "extent", s.extent);
  rd.integer("grid", "stencil_order", s.stencil_order);

  const std::string init =
      rd.word("initial", "type", "zero", {"zero", "plane_wave", "gaussian_pulse"});
  s.initial.kind = init == "plane_wave"       ? InitialKind::plane_wave
                   : init == "gaussian_pulse" ? InitialKind::gaussian_pulse
                                              : InitialKind::zero;
  rd.forbid_unless("initial", init == "plane_wave", {"axis", "k_index"},
                   "unless type = plane_wave");
  rd.forbid_unless("initial", init == "gaussian_pulse", {"center", "width"},
                   "unless type = gaussian_pulse");
  rd.integer("initial", "axis", s.initial.axis);
  rd.integer("initial", "polarization", s.initial.polarization);
  rd.integer("initial", "k_index", s.initial.k_index);
  rd.real("initial", "amplitude", s.initial.amplitude);
  if (rd.has("initial", "center")) {
    Point3 c{};
    rd.triple("initial", "center", c);
    s.initial.center = c;
  }
  if (rd.has("initial", "width")) {
    double w = 0.0;
    rd.real("initial", "width", w);
    s.initial.width = w;
  }
  s.initial.momenta =
      rd.word("initial", "momenta", "zero", {"zero", "random"}) == "random" ? MomentaKind::random
                                                                            : MomentaKind::zero;
  rd.integer("initial", "seed", s.initial.seed);

  s.stepper.method = rd.word("stepper", "method", "rk4", {"rk4", "implicit_midpoint"}) == "rk4"
                         ? Method::rk4
                         : Method::implicit_midpoint;
  rd.require("stepper", "dt");
  rd.real("stepper", "dt", s.stepper.dt);
  rd.real("stepper", "midpoint_tol", s.stepper.midpoint_tol);
  rd.integer("stepper", "midpoint_max_iter", s.stepper.midpoint_max_iter);

  rd.require("run", "steps");
  rd.integer("run", "steps", s.steps);
  rd.integer("run", "monitor_every", s.monitor_every);
  rd.integer("run", "snapshot_every", s.snapshot_every);
  if (const auto *e = rd.find("run", "output_dir"))
    s.output_dir = e->value;
  else
    s.output_dir = "output/" + s.name;

  if (!log.problems.empty())
    throw ConfigError(std::move(log.problems));
  return s;
}

inline Scenario load_scenario(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError({path + ": cannot open scenario file"});
  std::stringstream buf;
  buf << in.rdbuf();
  Scenario s = parse_scenario(buf.str(), path);
  auto problems = validate_scenario(s);
  if (!problems.empty())
    throw ConfigError(std::move(problems));
  return s;
}

inline Grid3 make_grid(const Scenario &s) {
  return Grid3(s.n, s.origin, s.extent, s.stencil_order);
}

inline MaxwellOperator make_operator(const Scenario &s) {
  return build_maxwell_operator(s.chart, s.medium, make_grid(s), s.c);
}

/// Initial (q, p). Plane wave: E_b = A cos(k x_a), H_d = +-A cos(k x_a) with
/// (a, b, d) a permutation and the sign chosen so E x H points along +x_a;
/// k = 2 pi k_index / extent_a. Gaussian pulse: E_b = A exp(-r^2 / 2w^2)
/// where r is the periodic distance to the centre in the two coordinates
/// other than b, so the field is uniform along its own direction.
/// Random momenta: random_field(grid, seed), mt19937_64.
inline DoubledState make_initial_state(const Scenario &s, const Grid3 &g) {
  FieldState q(g);
  const InitialSpec &in = s.initial;
  const std::size_t b = static_cast<std::size_t>(in.polarization - 1);
  if (in.kind == InitialKind::plane_wave) {
    const std::size_t a = static_cast<std::size_t>(in.axis - 1);
    const std::size_t d = 3 - a - b;
    const double sign = permutation_sign(static_cast<int>(a), static_cast<int>(b),
                                         static_cast<int>(d));
    const double k = 2 * pi * in.k_index / g.extent()[a];
    q.fill([&](const Point3 &x) {
      std::array<double, 6> v{};
      const double w = in.amplitude * std::cos(k * (x[a] - g.origin()[a]));
      v[b] = w;
      v[3 + d] = sign * w;
      return v;
    });
  } else if (in.kind == InitialKind::gaussian_pulse) {
    Point3 centre;
    for (std::size_t i = 0; i < 3; ++i)
      centre[i] = g.origin()[i] + 0.5 * g.extent()[i];
    if (in.center)
      centre = *in.center;
    const double width =
        in.width ? *in.width : 0.1 * std::min({g.extent()[0], g.extent()[1], g.extent()[2]});
    q.fill([&](const Point3 &x) {
      double r2 = 0.0;
      for (std::size_t i = 0; i < 3; ++i) {
        if (i == b)
          continue;
        const double L = g.extent()[i];
        double dx = std::fmod(x[i] - centre[i], L);
        if (dx > 0.5 * L)
          dx -= L;
        if (dx < -0.5 * L)
          dx += L;
        r2 += dx * dx;
      }
      std::array<double, 6> v{};
      v[b] = in.amplitude * std::exp(-r2 / (2 * width * width));
      return v;
    });
  }
  FieldState p = in.momenta == MomentaKind::random ? random_field(g, in.seed) : FieldState(g);
  return DoubledState(std::move(q), std::move(p));
}

} // namespace symmax

#endif // SYMMAX_SCENARIO_HPP
