#ifndef POLYFRONT_GRID_HPP_
#define POLYFRONT_GRID_HPP_

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include "polyfront/flux.hpp"
#include "polyfront/state.hpp"

namespace polyfront {

// Values closer than this are treated as the same g-level or sigma point.
constexpr double kSnapTol = 1e-10;
// Saturation points closer than this are one kink. Distinct levels stay more
// than half of kSnapTol apart and |g'| stays below about 3, so preimages of
// distinct levels never come this close.
constexpr double kSigmaMerge = 1e-12;

// Where a g-level came from; levels merged by snapping carry the union.
enum LevelSource : unsigned {
  kFromInitial = 1u,
  kFromGrid = 2u,
  kFromMaxima = 4u,
  kFromCrossing = 8u,
  kFromExtension = 16u,
};

// Resolution constant: ceil(sup / eps) * max(N + M, 1).
long build_L(double eps, int N, int M, double c2_sup);
long build_L(double eps, int N, int M, const FluxModel& model);

// The finite set of admissible g-levels, plus the exact sigma values
// ("anchors") that must appear in the saturation grid of a given curve.
class ValueGrid {
 public:
  ValueGrid() = default;
  ValueGrid(double eps, int N, int M, long L);

  double eps() const { return eps_; }
  int N() const { return N_; }
  int M() const { return M_; }
  int NM() const { return N_ + M_ > 0 ? N_ + M_ : 1; }
  long L() const { return L_; }
  int epoch() const { return epoch_; }

  const std::vector<double>& levels() const { return levels_; }
  const std::vector<unsigned>& sources() const { return sources_; }
  std::size_t size() const { return levels_.size(); }

  // Nearest level within tol.
  std::optional<double> snap(double v, double tol = kSnapTol) const;
  bool contains(double v, double tol = kSnapTol) const {
    return snap(v, tol).has_value();
  }
  unsigned source_of(double v, double tol = kSnapTol) const;

  // Levels are staged and merged into the sorted set by commit().
  void stage(double level, unsigned source);
  void add_anchor(double c, double k, double s);
  // Returns the number of genuinely new levels.
  std::size_t commit();

  const std::vector<double>& anchors(double c, double k) const;
  const std::map<std::pair<double, double>, std::vector<double>>&
  all_anchors() const {
    return anchors_;
  }

 private:
  double eps_ = 0.1;
  int N_ = 0;
  int M_ = 0;
  long L_ = 1;
  int epoch_ = 0;
  std::vector<double> levels_;
  std::vector<unsigned> sources_;
  std::vector<std::pair<double, unsigned>> staged_;
  std::map<std::pair<double, double>, std::vector<double>> anchors_;
};

// Piecewise-linear interpolant of f(., c, k) on a saturation grid.
class RegionFlux {
 public:
  RegionFlux() = default;
  RegionFlux(double c, double k, std::vector<double> xs,
             const FluxModel& model);
  // Tabulated values; xs strictly increasing, any range.
  RegionFlux(double c, double k, std::vector<double> xs,
             std::vector<double> fs);

  double c() const { return c_; }
  double k() const { return k_; }
  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& fs() const { return fs_; }
  const std::vector<double>& slopes() const { return slopes_; }
  std::size_t size() const { return xs_.size(); }

  // Interpolated flux and slope of the segment containing s (right segment
  // at a kink).
  double eval(double s) const;
  double slope_at(double s) const;
  // Segment index m with xs[m] <= s < xs[m+1] (last segment for s = 1).
  std::size_t segment(double s) const;

  // Index of the grid point within tol of s, or -1.
  long index_of(double s, double tol = kSnapTol) const;
  // Grid value within tol; throws PreconditionError when off-grid.
  double snap(double s, double tol = kSnapTol) const;

  double max_gap() const;

  // Interior kinks where the interpolant turns strictly left (convex) or
  // strictly right (concave). Only these can be envelope vertices.
  const std::vector<long>& convex_kinks() const { return convex_; }
  const std::vector<long>& concave_kinks() const { return concave_; }
  // For each entry of the lists above, the list positions where its run
  // begins and ends; the entries of a run form a convex (concave) chain.
  const std::vector<long>& convex_runs(bool end) const {
    return end ? convex_end_ : convex_begin_;
  }
  const std::vector<long>& concave_runs(bool end) const {
    return end ? concave_end_ : concave_begin_;
  }

 private:
  void finish();

  double c_ = 0.0;
  double k_ = 0.0;
  std::vector<double> xs_;
  std::vector<double> fs_;
  std::vector<double> slopes_;
  std::vector<long> convex_;
  std::vector<long> concave_;
  std::vector<long> convex_begin_, convex_end_;
  std::vector<long> concave_begin_, concave_end_;
};

struct InterpolationError {
  double value = 0.0;  // sup |f - f_pl|
  double slope = 0.0;  // sup |f' - slope| on segment interiors
};

// Sampled interpolation error on n uniform points of [0,1].
InterpolationError interpolation_error(const RegionFlux& flux,
                                       const FluxModel& model, int n = 1000);

// Transversal crossings of g(., cA, kA) and g(., cB, kB): sigma and level.
std::vector<std::pair<double, double>> find_crossings(
    const FluxModel& model, double cA, double kA, double cB, double kB,
    int scan = 4096);

struct DiscretizedData;

// The initial level set: g at initial states, g at l/L on every curve,
// every maximum of g and every transversal crossing.
ValueGrid build_G0(const DiscretizedData& data, const FluxModel& model);

// Preimages of one level on the curve (c, k), ascending, at most two.
std::vector<double> preimages(double level, double c, double k,
                              const FluxModel& model);

// Saturation grid of the curve (c, k): anchors, l/L points and all
// preimages. Verifies the interpolation estimates.
RegionFlux build_S(const ValueGrid& grid, double c, double k,
                   const FluxModel& model);

// New grid epoch containing g(s, c, k) and the anchor s for every state.
ValueGrid extend_grid(const ValueGrid& grid, const std::vector<State>& states,
                      const FluxModel& model);

// A value grid together with lazily built region fluxes for one k value.
class StripGrids {
 public:
  StripGrids(std::shared_ptr<const ValueGrid> grid, double k,
             FluxModel model);

  const ValueGrid& grid() const { return *grid_; }
  std::shared_ptr<const ValueGrid> grid_ptr() const { return grid_; }
  double k() const { return k_; }
  const FluxModel& model() const { return model_; }
  const RegionFlux& flux(double c) const;

 private:
  std::shared_ptr<const ValueGrid> grid_;
  double k_;
  FluxModel model_;
  mutable std::mutex mu_;
  mutable std::map<double, std::unique_ptr<RegionFlux>> cache_;
};

}  // namespace polyfront

#endif  // POLYFRONT_GRID_HPP_
