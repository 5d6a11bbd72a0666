#ifndef POLYFRONT_TESTS_ORACLES_HPP_
#define POLYFRONT_TESTS_ORACLES_HPP_

// Independent reference computations shared by the unit and acceptance
// tests. None of them calls the code paths they check.

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "polyfront/flux.hpp"
#include "polyfront/grid.hpp"
#include "polyfront/profile.hpp"
#include "polyfront/riemann.hpp"

namespace polyfront {
namespace oracle {

struct HullEdge {
  std::size_t from;
  std::size_t to;
  double speed;
};

// Envelope of the points (xs, fs) from index a to index b by pairwise slope
// enumeration: lower convex for a < b, upper concave for a > b. From the
// current vertex the next one is the chord of least slope, the farthest one
// on ties.
inline std::vector<HullEdge> hull(const std::vector<double>& xs,
                                  const std::vector<double>& fs,
                                  std::size_t a, std::size_t b) {
  std::vector<HullEdge> out;
  std::size_t p = a;
  while (p != b) {
    std::size_t best = p;
    double m = INFINITY;
    if (a < b) {
      for (std::size_t q = p + 1; q <= b; ++q) {
        double s = (fs[q] - fs[p]) / (xs[q] - xs[p]);
        if (s <= m) {
          m = s;
          best = q;
        }
      }
    } else {
      for (std::size_t q = p; q-- > b;) {
        double s = (fs[p] - fs[q]) / (xs[p] - xs[q]);
        if (s <= m) {
          m = s;
          best = q;
        }
      }
    }
    out.push_back({p, best, m});
    p = best;
  }
  return out;
}

// Running extremum of g(., c, k) on a dense grid, anchored at s0: the left
// version is max over [sigma, s0] below s0 and min over [s0, sigma] above;
// the right version swaps max and min.
inline double running_extremum(const FluxModel& m, bool left, double s0,
                               double c, double k, double sigma,
                               int n = 8192) {
  double lo = std::min(s0, sigma), hi = std::max(s0, sigma);
  bool take_max = (sigma <= s0) == left;
  double best = m.g(s0, c, k);
  for (int i = 0; i <= n; ++i) {
    double x = lo + (hi - lo) * i / n;
    double v = m.g(x, c, k);
    best = take_max ? std::max(best, v) : std::min(best, v);
  }
  return best;
}

// The two entropy displays of a C front: with lambda = g(s-, cL, k), for
// s- < s+ some s* splits [s-, s+] so that g(., cL) >= lambda on [s-, s*]
// and g(., cR) >= lambda on [s*, s+]; for s+ < s- the mirror statement with
// <= holds on [s+, s*] (cR) and [s*, s-] (cL). Checked on n samples.
inline bool c_entropy_holds(const FluxModel& m, double s_minus, double s_plus,
                            double cL, double cR, double k, double lambda,
                            int n = 1000, double tol = 1e-10) {
  if (s_minus == s_plus) return true;
  double lo = std::min(s_minus, s_plus), hi = std::max(s_minus, s_plus);
  std::vector<double> xs(n + 1);
  for (int i = 0; i <= n; ++i) xs[i] = lo + (hi - lo) * i / n;
  // first_ok[i]: the lower piece condition holds on xs[0..i]
  // second_ok[i]: the upper piece condition holds on xs[i..n]
  double c_lower = s_minus < s_plus ? cL : cR;
  double c_upper = s_minus < s_plus ? cR : cL;
  auto ok = [&](double v) {
    return s_minus < s_plus ? v >= lambda - tol : v <= lambda + tol;
  };
  std::vector<char> first_ok(n + 1), second_ok(n + 1);
  bool run = true;
  for (int i = 0; i <= n; ++i) {
    run = run && ok(m.g(xs[i], c_lower, k));
    first_ok[i] = run;
  }
  run = true;
  for (int i = n; i >= 0; --i) {
    run = run && ok(m.g(xs[i], c_upper, k));
    second_ok[i] = run;
  }
  // s* may sit at a sample or between two samples
  if (second_ok[0] || first_ok[n]) return true;
  for (int i = 0; i <= n; ++i) {
    if (first_ok[i] && (second_ok[i] || (i < n && second_ok[i + 1]))) {
      return true;
    }
  }
  return false;
}

// Grids of one strip at constant k holding the two states of a c-jump.
struct CJumpSetup {
  std::shared_ptr<StripGrids> strip;
  const RegionFlux* left = nullptr;
  const RegionFlux* right = nullptr;
};

inline CJumpSetup c_jump_setup(const FluxModel& m, double eps, State l,
                               State r) {
  DiscretizedData d = DiscretizedData::from_cells(eps, {0.0}, {l, r});
  auto g = std::make_shared<ValueGrid>(build_G0(d, m));
  CJumpSetup out;
  out.strip = std::make_shared<StripGrids>(g, l.k, m);
  out.left = &out.strip->flux(l.c);
  out.right = &out.strip->flux(r.c);
  return out;
}

}  // namespace oracle
}  // namespace polyfront

#endif  // POLYFRONT_TESTS_ORACLES_HPP_
