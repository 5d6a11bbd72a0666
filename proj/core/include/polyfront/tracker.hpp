#ifndef POLYFRONT_TRACKER_HPP_
#define POLYFRONT_TRACKER_HPP_

#include <limits>
#include <list>
#include <memory>
#include <vector>

#include "polyfront/flux.hpp"
#include "polyfront/grid.hpp"
#include "polyfront/profile.hpp"
#include "polyfront/riemann.hpp"

namespace polyfront {

namespace detail {
class StripRunner;
}

constexpr double kNever = std::numeric_limits<double>::infinity();

// One straight segment of a front's trajectory. Every interaction ends the
// segments involved and starts new ones, so a record never changes after
// t_death is set.
struct FrontRecord {
  WaveKind kind = WaveKind::kS;
  int id = -1;  // C: c-interval on its right; K: strip index
  int strip = 0;
  int region_left = 0;  // c-interval indices on either side
  int region_right = 0;
  double t_birth = 0.0;
  double t_death = kNever;
  double x_birth = 0.0;
  double speed = 0.0;
  State left;
  State right;
  long event = 0;  // creating event, 0 for t = 0
  int rank = 0;    // position inside the creating fan

  double position(double t) const { return x_birth + speed * (t - t_birth); }
  bool alive_at(double t) const { return t_birth <= t && t < t_death; }
};

// A change of the state entering a strip across its left k-jump.
struct InflowRecord {
  double t = 0.0;
  State left;
  int region = 0;
};

struct SimOptions {
  // <= 0: read POLYFRONT_MAX_EVENTS, default 1e7.
  long max_events = 0;
  // Re-check front invariants whenever fronts are created.
  bool check_invariants = true;
};

struct SimCounters {
  long events = 0;
  long collisions = 0;
  long arrivals = 0;
  long inflows = 0;
  long fronts_created = 0;
  long grid_extensions = 0;  // new levels added at k-jumps
  long strip_rebuilds = 0;
};

// Piecewise-constant solution at one time: states[m] lives on
// (breaks[m-1], breaks[m]).
struct SolutionProfile {
  std::vector<double> breaks;
  std::vector<State> states;

  State at(double x) const;
};

class Simulation {
 public:
  Simulation(DiscretizedData data, FluxModel model, SimOptions opt = {});
  ~Simulation();
  Simulation(Simulation&&) noexcept;
  Simulation& operator=(Simulation&&) noexcept;

  // Processes every event with time <= T.
  void advance_to(double T);
  double time() const { return t_; }

  const DiscretizedData& data() const { return data_; }
  const FluxModel& model() const { return model_; }
  const SimCounters& counters() const { return counters_; }
  long max_events() const { return max_events_; }

  int strip_count() const { return static_cast<int>(strips_.size()); }
  const StripGrids& strip_grids(int i) const;
  double strip_left(int i) const;
  double strip_right(int i) const;
  // Flux of c-interval j inside strip i.
  const RegionFlux& region_flux(int i, int j) const;
  const std::vector<FrontRecord>& strip_records(int i) const;
  const std::vector<InflowRecord>& strip_inflows(int i) const;
  std::size_t record_count() const;

  // Fronts alive at t, left to right.
  std::vector<FrontRecord> fronts_at(double t) const;
  SolutionProfile profile(double t) const;
  // Right limits at the given positions.
  std::vector<State> sample(double t, const std::vector<double>& xs) const;
  int c_front_count(double t) const;

 private:
  friend class detail::StripRunner;
  struct Strip;
  void init_strip(Strip& st, std::shared_ptr<const ValueGrid> grid);
  void run_strip(Strip& st, double T);
  std::shared_ptr<const ValueGrid> strip_grid(int i) const;

  DiscretizedData data_;
  FluxModel model_;
  SimOptions opt_;
  long max_events_ = 0;
  double t_ = 0.0;
  std::shared_ptr<const ValueGrid> g0_;
  std::vector<std::unique_ptr<Strip>> strips_;
  SimCounters counters_;
};

// Checks the continuity conditions of one front: S keeps c and k, C keeps
// g and k, K keeps f and c. Returns the largest defect.
double front_defect(const FrontRecord& r, const FluxModel& model);

}  // namespace polyfront

#endif  // POLYFRONT_TRACKER_HPP_
