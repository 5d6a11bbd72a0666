#include "polyfront/reference_fv.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "polyfront/errors.hpp"

namespace polyfront {

SolutionProfile FvSolution::as_profile() const {
  SolutionProfile p;
  p.states = cells;
  for (std::size_t i = 1; i < cells.size(); ++i) {
    p.breaks.push_back(x0 + static_cast<double>(i) * dx);
  }
  return p;
}

namespace {

// Abscissas where a profile may fail to be smooth.
void add_kinks(const Profile& p, std::vector<double>& out) {
  out.insert(out.end(), p.breaks().begin(), p.breaks().end());
  const auto& q = p.params();
  if (p.kind() == Profile::Kind::kRamp) {
    out.push_back(q[0]);
    out.push_back(q[1]);
  } else if (p.kind() == Profile::Kind::kBump) {
    out.push_back(q[0] - q[1]);
    out.push_back(q[0]);
    out.push_back(q[0] + q[1]);
  }
}

// Cell averages of s, c s and k over [lo, hi], split at the kinks.
std::array<double, 3> cell_average(const InitialData& u,
                                   const std::vector<double>& kinks,
                                   double lo, double hi) {
  static const double kNode[4] = {-0.8611363115940526, -0.3399810435848563,
                                  0.3399810435848563, 0.8611363115940526};
  static const double kWeight[4] = {0.3478548451374538, 0.6521451548625461,
                                    0.6521451548625461, 0.3478548451374538};
  std::vector<double> cuts{lo};
  auto first = std::upper_bound(kinks.begin(), kinks.end(), lo);
  for (auto it = first; it != kinks.end() && *it < hi; ++it) {
    cuts.push_back(*it);
  }
  cuts.push_back(hi);
  std::array<double, 3> sum{0.0, 0.0, 0.0};
  for (std::size_t n = 0; n + 1 < cuts.size(); ++n) {
    double m = 0.5 * (cuts[n] + cuts[n + 1]);
    double h = 0.5 * (cuts[n + 1] - cuts[n]);
    for (int q = 0; q < 4; ++q) {
      double x = m + h * kNode[q];
      double s = u.s(x);
      sum[0] += kWeight[q] * h * s;
      sum[1] += kWeight[q] * h * u.c(x) * s;
      sum[2] += kWeight[q] * h * u.k(x);
    }
  }
  double w = hi - lo;
  return {sum[0] / w, sum[1] / w, sum[2] / w};
}

}  // namespace

FvSolution run_reference_fv(const RunConfig& cfg, int cells, double cfl) {
  if (cells < 10) throw PreconditionError("fv: need at least 10 cells");
  if (!(cfl > 0.0 && cfl <= 0.5)) {
    throw PreconditionError("fv: cfl must lie in (0, 0.5]");
  }
  FluxModel model = make_model(cfg.flux);
  const std::size_t n = static_cast<std::size_t>(cells);
  FvSolution sol;
  sol.x0 = -cfg.window;
  sol.dx = 2.0 * cfg.window / cells;

  std::vector<double> kinks;
  add_kinks(cfg.initial.s, kinks);
  add_kinks(cfg.initial.c, kinks);
  add_kinks(cfg.initial.k, kinks);
  std::sort(kinks.begin(), kinks.end());

  std::vector<double> s(n), cs(n), c(n), k(n);
  for (std::size_t i = 0; i < n; ++i) {
    double lo = sol.x0 + i * sol.dx;
    auto avg = cell_average(cfg.initial, kinks, lo, lo + sol.dx);
    s[i] = avg[0];
    cs[i] = avg[1];
    k[i] = avg[2];
    c[i] = s[i] > 1e-13 ? std::clamp(cs[i] / s[i], 0.0, 1.0)
                        : cfg.initial.c(sol.center(i));
  }
  double xg = sol.x0 - 0.5 * sol.dx;
  State ghost{cfg.initial.s(xg), cfg.initial.c(xg), cfg.initial.k(xg)};
  double f_in = model.f(ghost.s, ghost.c, ghost.k);

  double speed = model.max_speed();
  double dt_max = cfl * sol.dx / speed;
  long steps = static_cast<long>(std::ceil(cfg.T / dt_max));
  double dt = cfg.T / steps;
  double lam = dt / sol.dx;

  std::vector<double> F(n);
  for (long step = 0; step < steps; ++step) {
    long double mass_s = 0, mass_cs = 0;
    for (std::size_t i = 0; i < n; ++i) {
      F[i] = model.f(s[i], c[i], k[i]);
      mass_s += s[i];
      mass_cs += cs[i];
    }
    double fl = f_in, cfl_flux = ghost.c * f_in;
    for (std::size_t i = 0; i < n; ++i) {
      double cf = c[i] * F[i];
      s[i] -= lam * (F[i] - fl);
      cs[i] -= lam * (cf - cfl_flux);
      fl = F[i];
      cfl_flux = cf;
      if (s[i] < -1e-12 || s[i] > 1.0 + 1e-12) {
        throw InvariantViolation("fv: saturation left [0, 1]");
      }
      if (s[i] > 1e-13) c[i] = std::clamp(cs[i] / s[i], 0.0, 1.0);
    }
    long double new_s = 0, new_cs = 0;
    for (std::size_t i = 0; i < n; ++i) {
      new_s += s[i];
      new_cs += cs[i];
    }
    long double want_s = dt * (static_cast<long double>(f_in) - F[n - 1]);
    // cfl_flux holds the outflow c f of the last cell
    long double want_cs =
        dt * (static_cast<long double>(ghost.c) * f_in - cfl_flux);
    double err_s = std::abs(static_cast<double>(
        (new_s - mass_s) * sol.dx - want_s));
    double err_cs = std::abs(static_cast<double>(
        (new_cs - mass_cs) * sol.dx - want_cs));
    if (err_s > 1e-12 || err_cs > 1e-12) {
      throw InvariantViolation("fv: conservation defect above 1e-12");
    }
  }
  sol.cells.resize(n);
  for (std::size_t i = 0; i < n; ++i) sol.cells[i] = State{s[i], c[i], k[i]};
  sol.t = cfg.T;
  sol.steps = steps;
  return sol;
}

}  // namespace polyfront
