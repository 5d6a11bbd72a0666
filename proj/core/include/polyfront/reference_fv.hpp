#ifndef POLYFRONT_REFERENCE_FV_HPP_
#define POLYFRONT_REFERENCE_FV_HPP_

#include <vector>

#include "polyfront/config.hpp"
#include "polyfront/tracker.hpp"

namespace polyfront {

// Cell averages of a first-order finite-volume run on [x0, x0 + n dx].
struct FvSolution {
  double x0 = 0.0;
  double dx = 0.0;
  double t = 0.0;
  long steps = 0;
  std::vector<State> cells;

  double center(std::size_t i) const { return x0 + (i + 0.5) * dx; }
  // Cells as a piecewise-constant profile, extended by the end cells.
  SolutionProfile as_profile() const;
};

// Godunov scheme for (s, cs, k) on [-window, window] up to cfg.T. All wave
// speeds are non-negative, so the exact Riemann flux at an interface is the
// flux of the left cell. Cell averages of the exact initial data start the
// run; the left boundary feeds the far-left state and the right boundary is
// outflow. Throws PreconditionError for cells < 10 or cfl outside (0, 0.5],
// InvariantViolation if conservation fails.
FvSolution run_reference_fv(const RunConfig& cfg, int cells, double cfl);

}  // namespace polyfront

#endif  // POLYFRONT_REFERENCE_FV_HPP_
