#include "polyfront/riemann.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include "polyfront/errors.hpp"
#include "polyfront/profile.hpp"

namespace polyfront {

namespace {

// Speed-order defects below this are rounding and get clamped.
constexpr double kOrderTol = 1e-10;

std::string fmt(const char* pattern, double a, double b = 0, double c = 0) {
  char buf[200];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

}  // namespace

char kind_char(WaveKind kind) {
  switch (kind) {
    case WaveKind::kS: return 'S';
    case WaveKind::kC: return 'C';
    case WaveKind::kK: return 'K';
  }
  return '?';
}

// ---------------------------------------------------------------------------
// Scalar solver

namespace {

// One envelope problem in scan order. Logical index 0 is the left state,
// 1..K the candidate kinks between the states and K + 1 the right state.
// For the upper envelope the scan runs from the larger state downwards and
// the points are reflected through the origin, which turns it into a lower
// envelope.
struct EnvelopeView {
  const std::vector<double>& xs;
  const std::vector<double>& fs;
  const std::vector<long>& cand;
  long lo, hi, first, last;
  bool flip;

  long size() const { return last - first + 2; }
  long kink(long j) const {
    if (j == 0) return flip ? hi : lo;
    if (j == last - first + 1) return flip ? lo : hi;
    return flip ? cand[last - j] : cand[first + j - 1];
  }
  double x(long j) const { return flip ? -xs[kink(j)] : xs[kink(j)]; }
  double y(long j) const { return flip ? -fs[kink(j)] : fs[kink(j)]; }
  double slope(long a, long b) const {
    return (y(b) - y(a)) / (x(b) - x(a));
  }
};

// Convex chain of consecutive logical indices.
struct Piece {
  long a, b;
};

// Lower envelope of pieces given left to right, each a convex chain; the
// result keeps the farthest vertex on collinear runs. The envelope is a
// stack of pieces. A new point pops whole pieces from the top and then
// binary-searches inside the last one it reaches; a long piece is attached
// through the common tangent, found by binary search over the piece. The
// cost therefore follows the number of pieces, not the dropped points.
std::vector<Piece> merge_envelope(const EnvelopeView& v,
                                  const std::vector<Piece>& pieces) {
  std::vector<Piece> env{pieces.front()};
  // j survives the arrival of q: strict left turn at j
  auto keep = [&](long pred, long j, long q) {
    return v.slope(pred, j) < v.slope(j, q);
  };
  // stack piece and last surviving point when q arrives; survival is
  // monotone along the stack, so both searches are binary
  auto touch = [&](long q) -> std::pair<std::size_t, long> {
    // common case: nothing is popped
    const Piece& top = env.back();
    long pred = top.b > top.a ? top.b - 1
                : env.size() > 1 ? env[env.size() - 2].b
                                 : -1;
    if (pred < 0 || keep(pred, top.b, q)) return {env.size() - 1, top.b};
    std::size_t lo = 0, hi = env.size() - 1;
    while (lo < hi) {
      std::size_t mid = lo + (hi - lo + 1) / 2;
      if (keep(env[mid - 1].b, env[mid].a, q)) {
        lo = mid;
      } else {
        hi = mid - 1;
      }
    }
    const Piece& p = env[lo];
    long l = p.a, r = p.b;  // keep holds at l
    while (l < r) {
      long mid = l + (r - l + 1) / 2;
      if (keep(mid - 1, mid, q)) {
        l = mid;
      } else {
        r = mid - 1;
      }
    }
    return {lo, l};
  };
  auto attach = [&](long q, long b) {
    auto [n, t] = touch(q);
    env.resize(n + 1);
    env.back().b = t;
    env.push_back({q, b});
  };
  for (std::size_t n = 1; n < pieces.size(); ++n) {
    const Piece& c = pieces[n];
    if (c.b - c.a < 4) {
      for (long q = c.a; q <= c.b; ++q) attach(q, q);
      continue;
    }
    // first q whose successor is not on or below the tangent from q
    if (v.slope(c.a, c.a + 1) > v.slope(touch(c.a).second, c.a)) {
      attach(c.a, c.b);
      continue;
    }
    long l = c.a + 1, r = c.b;
    while (l < r) {
      long q = l + (r - l) / 2;
      if (v.slope(q, q + 1) <= v.slope(touch(q).second, q)) {
        l = q + 1;
      } else {
        r = q;
      }
    }
    attach(l, c.b);
  }
  return env;
}

}  // namespace

WaveFan solve_scalar_pl(const RegionFlux& flux, double s_l, double s_r) {
  long il = flux.index_of(s_l), ir = flux.index_of(s_r);
  if (il < 0 || ir < 0) {
    throw PreconditionError(
        fmt("scalar solver: state off grid (s_l=%.17g, s_r=%.17g)", s_l, s_r));
  }
  const auto& xs = flux.xs();
  const auto& fs = flux.fs();
  WaveFan fan;
  fan.left = {xs[il], flux.c(), flux.k()};
  fan.right = {xs[ir], flux.c(), flux.k()};
  if (il == ir) return fan;

  // A kink that does not turn the right way locally lies on or beyond the
  // chord of its neighbours and is never a vertex, so only the candidate
  // kinks inside the range take part. Runs of candidates are convex chains.
  const bool up = il < ir;
  long lo = std::min(il, ir), hi = std::max(il, ir);
  const std::vector<long>& cand =
      up ? flux.convex_kinks() : flux.concave_kinks();
  const long first = std::upper_bound(cand.begin(), cand.end(), lo) -
                     cand.begin();
  const long last = std::lower_bound(cand.begin() + first, cand.end(), hi) -
                    cand.begin();
  EnvelopeView v{xs, fs, cand, lo, hi, first, last, !up};
  const long end = v.size() - 1;

  std::vector<long> hull;
  if (last - first <= 32) {
    // short lists: monotone chain scan
    auto cross = [&](long o, long a, long p) {
      return (v.x(a) - v.x(o)) * (v.y(p) - v.y(o)) -
             (v.y(a) - v.y(o)) * (v.x(p) - v.x(o));
    };
    for (long p = 0; p <= end; ++p) {
      while (hull.size() >= 2 &&
             cross(hull[hull.size() - 2], hull.back(), p) <= 0.0) {
        hull.pop_back();
      }
      hull.push_back(p);
    }
  } else {
    const std::vector<long>& rb = up ? flux.convex_runs(false)
                                     : flux.concave_runs(false);
    const std::vector<long>& re = up ? flux.convex_runs(true)
                                     : flux.concave_runs(true);
    std::vector<Piece> pieces{{0, 0}};
    if (up) {
      for (long n = first; n < last;) {
        long e = std::min(re[n], last - 1);
        pieces.push_back({n - first + 1, e - first + 1});
        n = e + 1;
      }
    } else {
      for (long n = last - 1; n >= first;) {
        long b = std::max(rb[n], first);
        pieces.push_back({last - n, last - b});
        n = b - 1;
      }
    }
    pieces.push_back({end, end});
    for (const Piece& p : merge_envelope(v, pieces)) {
      for (long j = p.a; j <= p.b; ++j) hull.push_back(j);
    }
  }

  fan.fronts.reserve(hull.size() - 1);
  for (std::size_t n = 0; n + 1 < hull.size(); ++n) {
    long a = v.kink(hull[n]), b = v.kink(hull[n + 1]);
    Front fr;
    fr.kind = WaveKind::kS;
    fr.speed = (fs[b] - fs[a]) / (xs[b] - xs[a]);
    fr.left = {xs[a], flux.c(), flux.k()};
    fr.right = {xs[b], flux.c(), flux.k()};
    fan.fronts.push_back(fr);
  }
  return fan;
}

// ---------------------------------------------------------------------------
// Auxiliary monotone functions

AuxMonotone::AuxMonotone(Side side, double s0, double c, double k,
                         const FluxModel& model)
    : side_(side), s0_(s0), c_(c), k_(k), model_(&model) {
  GMax m = model.argmax_g(c, k);
  smax_ = m.sigma;
  gmax_ = m.value;
  g0_ = model.g(s0, c, k);
}

double AuxMonotone::g(double sigma) const {
  return model_->family().g(sigma, c_, k_);
}

double AuxMonotone::operator()(double sigma) const {
  if (sigma == s0_) return g0_;
  if (side_ == Side::kLeft) {
    if (sigma < s0_) {
      // max of g on [sigma, s0]
      if (s0_ <= smax_) return g0_;
      if (sigma >= smax_) return g(sigma);
      return gmax_;
    }
    return std::min(g0_, g(sigma));
  }
  if (sigma < s0_) return std::min(g(sigma), g0_);
  // max of g on [s0, sigma]
  if (sigma <= smax_) return g(sigma);
  if (s0_ >= smax_) return g0_;
  return gmax_;
}

AuxMonotone build_GL(double s_L, double c_L, double k,
                     const FluxModel& model) {
  return AuxMonotone(AuxMonotone::Side::kLeft, s_L, c_L, k, model);
}

AuxMonotone build_GR(double s_R, double c_R, double k,
                     const FluxModel& model) {
  return AuxMonotone(AuxMonotone::Side::kRight, s_R, c_R, k, model);
}

// ---------------------------------------------------------------------------
// Minimum jump

WaveFan CWaveSolution::fan() const {
  WaveFan out;
  out.left = left_fan.left;
  out.right = right_fan.right;
  out.fronts = left_fan.fronts;
  if (has_c) {
    Front fr;
    fr.kind = WaveKind::kC;
    fr.speed = lambda_c;
    fr.left = left_fan.right;
    fr.right = right_fan.left;
    out.fronts.push_back(fr);
  }
  out.fronts.insert(out.fronts.end(), right_fan.fronts.begin(),
                    right_fan.fronts.end());
  return out;
}

namespace {

// Smallest root of g = level strictly above s, or largest strictly below.
double root_above(const std::vector<double>& roots, double s) {
  for (double r : roots) {
    if (r > s) return r;
  }
  return -1.0;
}

double root_below(const std::vector<double>& roots, double s) {
  for (auto it = roots.rbegin(); it != roots.rend(); ++it) {
    if (*it < s) return *it;
  }
  return -1.0;
}

}  // namespace

CWaveSolution solve_c_minjump(double s_L, double c_L, double s_R, double c_R,
                              double k, const RegionFlux& left_flux,
                              const RegionFlux& right_flux,
                              const ValueGrid& grid, const FluxModel& model) {
  s_L = left_flux.snap(s_L);
  s_R = right_flux.snap(s_R);
  CWaveSolution sol;
  if (c_L == c_R) {
    sol.left_fan = solve_scalar_pl(left_flux, s_L, s_R);
    sol.right_fan.left = sol.right_fan.right = sol.left_fan.right;
    sol.s_minus = sol.s_plus = s_R;
    sol.gamma = sol.lambda_c = model.g(s_R, c_R, k);
    return sol;
  }
  const FluxFamily& fam = model.family();
  AuxMonotone GL = build_GL(s_L, c_L, k, model);
  AuxMonotone GR = build_GR(s_R, c_R, k, model);

  // G^L - G^R is continuous and non-increasing, >= 0 at 0 and <= 0 at 1.
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-12) {
    double mid = 0.5 * (lo + hi);
    if (GL(mid) - GR(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double mid = 0.5 * (lo + hi);
  double gamma = 0.5 * (GL(mid) + GR(mid));

  // The level is one of a few exact candidates; prefer those over the
  // bisection value.
  double gl = fam.g(s_L, c_L, k), gr = fam.g(s_R, c_R, k);
  double cand[4] = {gl, gr, fam.argmax_g(c_L, k).second,
                    fam.argmax_g(c_R, k).second};
  double best = gamma, dist = 1e-9;
  for (double v : cand) {
    if (std::abs(v - gamma) <= dist) {
      dist = std::abs(v - gamma);
      best = v;
    }
  }
  auto snapped = grid.snap(best, best == gamma ? 1e-9 : kSnapTol);
  if (!snapped) {
    throw InvariantViolation(
        fmt("min-jump level %.17g is not a grid level", gamma));
  }
  gamma = *snapped;

  // a side state keeps its value only when it sits on the chosen level
  // itself; levels closer than the snap tolerance are still distinct
  auto on_level = [&](double g) {
    auto q = grid.snap(g);
    return q && *q == gamma;
  };
  double sm;
  if (on_level(gl)) {
    sm = s_L;
  } else {
    auto roots = fam.g_roots(gamma, c_L, k);
    sm = gl > gamma ? root_above(roots, s_L) : root_below(roots, s_L);
  }
  double sp;
  if (on_level(gr)) {
    sp = s_R;
  } else {
    auto roots = fam.g_roots(gamma, c_R, k);
    sp = gr > gamma ? root_below(roots, s_R) : root_above(roots, s_R);
  }
  if (sm < 0.0 || sp < 0.0) {
    throw InvariantViolation(
        fmt("min-jump projection missing (s_L=%.17g, s_R=%.17g, gamma=%.17g)",
            s_L, s_R, gamma));
  }
  long im = left_flux.index_of(sm), ip = right_flux.index_of(sp);
  if (im < 0 || ip < 0) {
    throw InvariantViolation(
        fmt("min-jump state off grid (s-=%.17g, s+=%.17g, gamma=%.17g)", sm,
            sp, gamma));
  }
  sm = left_flux.xs()[im];
  sp = right_flux.xs()[ip];

  sol.has_c = true;
  sol.s_minus = sm;
  sol.s_plus = sp;
  sol.gamma = gamma;
  sol.lambda_c = gamma;
  sol.left_fan = solve_scalar_pl(left_flux, s_L, sm);
  sol.right_fan = solve_scalar_pl(right_flux, sp, s_R);

  for (Front& fr : sol.left_fan.fronts) {
    if (fr.speed > gamma) {
      if (fr.speed > gamma + kOrderTol) {
        throw InvariantViolation(
            fmt("left fan speed %.17g exceeds c speed %.17g", fr.speed,
                gamma));
      }
      fr.speed = gamma;
    }
  }
  for (Front& fr : sol.right_fan.fronts) {
    if (fr.speed < gamma) {
      if (fr.speed < gamma - kOrderTol) {
        throw InvariantViolation(
            fmt("right fan speed %.17g below c speed %.17g", fr.speed,
                gamma));
      }
      fr.speed = gamma;
    }
  }
  return sol;
}

// ---------------------------------------------------------------------------
// k waves and the global solver

double solve_k(double s_l, double c_l, double k_l, double k_r,
               const FluxModel& model) {
  if (k_l == k_r || s_l == 0.0 || s_l == 1.0) return s_l;
  const FluxFamily& fam = model.family();
  double target = model.f(s_l, c_l, k_l);
  model.f(0.0, c_l, k_r);  // range check
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (fam.f(mid, c_l, k_r) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double rl = std::abs(fam.f(lo, c_l, k_r) - target);
  double rh = std::abs(fam.f(hi, c_l, k_r) - target);
  return rl <= rh ? lo : hi;
}

WaveFan solve_global(const State& left, const State& right,
                     const StripGrids& strip, const FluxModel& model) {
  if (!in_unit_cube(left) || !in_unit_cube(right)) {
    throw DomainError("global solver: state outside [0,1]^3");
  }
  if (strip.k() != right.k) {
    throw PreconditionError("global solver: strip does not match right k");
  }
  WaveFan fan;
  fan.left = left;
  fan.right = right;
  if (left == right) return fan;
  const RegionFlux& lf = strip.flux(left.c);
  double s_m = left.s;
  if (left.k != right.k) {
    s_m = solve_k(left.s, left.c, left.k, right.k, model);
    long m = lf.index_of(s_m);
    if (m < 0) {
      throw InvariantViolation(
          fmt("k-front state %.17g missing from extended grid", s_m));
    }
    s_m = lf.xs()[m];
    Front kf;
    kf.kind = WaveKind::kK;
    kf.speed = 0.0;
    kf.left = left;
    kf.right = {s_m, left.c, right.k};
    fan.fronts.push_back(kf);
  } else {
    s_m = lf.snap(s_m);
  }
  WaveFan sub;
  if (left.c == right.c) {
    sub = solve_scalar_pl(lf, s_m, right.s);
  } else {
    const RegionFlux& rf = strip.flux(right.c);
    sub = solve_c_minjump(s_m, left.c, right.s, right.c, right.k, lf, rf,
                          strip.grid(), model)
              .fan();
  }
  fan.fronts.insert(fan.fronts.end(), sub.fronts.begin(), sub.fronts.end());
  return fan;
}

WaveFan solve_riemann(const State& left, const State& right, double eps,
                      const FluxModel& model) {
  DiscretizedData data =
      DiscretizedData::from_cells(eps, {0.0}, {left, right});
  auto g0 = std::make_shared<ValueGrid>(build_G0(data, model));
  if (left.k == right.k) {
    StripGrids strip(g0, right.k, model);
    return solve_global(left, right, strip, model);
  }
  double s_m = solve_k(left.s, left.c, left.k, right.k, model);
  auto g1 = std::make_shared<ValueGrid>(
      extend_grid(*g0, {State{s_m, left.c, right.k}}, model));
  StripGrids strip(g1, right.k, model);
  return solve_global(left, right, strip, model);
}

}  // namespace polyfront
