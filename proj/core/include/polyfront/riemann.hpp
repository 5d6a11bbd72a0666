#ifndef POLYFRONT_RIEMANN_HPP_
#define POLYFRONT_RIEMANN_HPP_

#include <cstdint>
#include <vector>

#include "polyfront/flux.hpp"
#include "polyfront/grid.hpp"
#include "polyfront/state.hpp"

namespace polyfront {

enum class WaveKind : std::uint8_t { kS, kC, kK };

char kind_char(WaveKind kind);

struct Front {
  WaveKind kind = WaveKind::kS;
  double position = 0.0;
  double speed = 0.0;
  State left;
  State right;
};

// Fronts ordered left to right with non-decreasing speeds.
struct WaveFan {
  std::vector<Front> fronts;
  State left;
  State right;

  bool empty() const { return fronts.empty(); }
  std::size_t size() const { return fronts.size(); }
};

// Entropic solution of s_t + f_pl(s)_x = 0 with data (s_l, s_r), both grid
// points of flux. Lower convex envelope for s_l < s_r, upper concave
// envelope for s_l > s_r; collinear kinks are dropped.
WaveFan solve_scalar_pl(const RegionFlux& flux, double s_l, double s_r);

// Running extremum of g(., c, k) anchored at s0:
//   left  side: max on [sigma, s0] for sigma <= s0, min on [s0, sigma] after
//   right side: min on [sigma, s0] for sigma <= s0, max on [s0, sigma] after
class AuxMonotone {
 public:
  enum class Side { kLeft, kRight };
  AuxMonotone(Side side, double s0, double c, double k,
              const FluxModel& model);
  double operator()(double sigma) const;
  double anchor() const { return s0_; }
  double g(double sigma) const;

 private:
  Side side_;
  double s0_, c_, k_;
  double smax_, gmax_, g0_;
  const FluxModel* model_;
};

AuxMonotone build_GL(double s_L, double c_L, double k, const FluxModel& model);
AuxMonotone build_GR(double s_R, double c_R, double k, const FluxModel& model);

struct CWaveSolution {
  bool has_c = false;
  double s_minus = 0.0;
  double s_plus = 0.0;
  double gamma = 0.0;
  double lambda_c = 0.0;
  WaveFan left_fan;
  WaveFan right_fan;

  // left fan, the c front (if any), right fan.
  WaveFan fan() const;
};

// Minimum-jump solution at a c discontinuity with k fixed. Flux grids and
// the value grid are those of the strip; emitted states are snapped to the
// grids and gamma to a grid level.
CWaveSolution solve_c_minjump(double s_L, double c_L, double s_R, double c_R,
                              double k, const RegionFlux& left_flux,
                              const RegionFlux& right_flux,
                              const ValueGrid& grid, const FluxModel& model);

// s_m with f(s_m, c_l, k_r) = f(s_l, c_l, k_l).
double solve_k(double s_l, double c_l, double k_l, double k_r,
               const FluxModel& model);

// K front (if k jumps) followed by the 2x2 solution at k = right.k. strip
// holds the grids of the strip containing right; when k jumps, s_m must be
// an anchor there.
WaveFan solve_global(const State& left, const State& right,
                     const StripGrids& strip, const FluxModel& model);

// Sets up grids for a lone Riemann problem and solves it.
WaveFan solve_riemann(const State& left, const State& right, double eps,
                      const FluxModel& model);

}  // namespace polyfront

#endif  // POLYFRONT_RIEMANN_HPP_
