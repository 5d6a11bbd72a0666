#ifndef POLYFRONT_ENTROPY_HPP_
#define POLYFRONT_ENTROPY_HPP_

#include <functional>
#include <string>
#include <vector>

#include "polyfront/grid.hpp"
#include "polyfront/profile.hpp"
#include "polyfront/tracker.hpp"

namespace polyfront {

// A smooth entropy eta on [0,1] with eta(0) = 0.
struct Entropy {
  std::string id;
  std::function<double(double)> eta;
  std::function<double(double)> d1;
  std::function<double(double)> d2;
  double sup_d1 = 0.0;  // sup |eta'| on [0,1]
  double sup_d2 = 0.0;  // sup |eta''| on [0,1]
  bool convex = true;
};

// "quadratic" (s^2), "quartic" (s^4), "exp" (e^s - 1), "identity" (s).
Entropy entropy_by_id(const std::string& id);
// The convex entropies used by the audits.
std::vector<Entropy> entropy_battery();

// q(s) = integral of eta' * slope over [0, s] for the piecewise-linear flux,
// tabulated by prefix sums.
class EntropyFlux {
 public:
  EntropyFlux(const RegionFlux& flux, const Entropy& eta);
  double operator()(double s) const;

 private:
  const RegionFlux* flux_;
  const Entropy* eta_;
  std::vector<double> prefix_;
};

// Direct evaluation of the same integral, segment by segment.
double entropy_flux_pl(const Entropy& eta, const RegionFlux& flux, double s);

struct FrontProduction {
  int strip = 0;
  std::size_t record = 0;
  WaveKind kind = WaveKind::kS;
  double t_birth = 0.0;
  double t_death = 0.0;
  double x_birth = 0.0;
  double speed = 0.0;
  double d_eta = 0.0;
  double d_q = 0.0;
  double production = 0.0;  // d_q - speed * d_eta
  double jump = 0.0;        // |dc| for C fronts, |dk| for K fronts
  double budget = 0.0;      // C (eps / (N + M) + jump); 0 for S fronts
};

struct EntropyReport {
  std::string entropy;
  double C = 0.0;
  double eps_over_nm = 0.0;
  std::vector<FrontProduction> fronts;
  double max_s_production = 0.0;
  long budget_violations = 0;
  // Smallest constant that would have covered every C and K front.
  double implied_C = 0.0;
};

// C = 4 (1 + |eta'| + |eta''|) (1 + Lip_{c,k} f + sup |f|).
double budget_constant(const Entropy& eta, const FluxModel& model);

// Production of one front record of sim.
double front_production(const Simulation& sim, const FrontRecord& r,
                        const Entropy& eta);

EntropyReport audit_entropy(const Simulation& sim, const Entropy& eta);

struct Rect {
  double t1 = 0.0;
  double t2 = 0.0;
  double x1 = 0.0;
  double x2 = 0.0;
};

// Time a front record spends inside rect, up to the simulated horizon.
double time_in_rect(const FrontRecord& r, const Rect& rect, double t_end);

// Sum over fronts of max(production, 0) times the time spent in rect.
double positive_part_measure(const Simulation& sim, const EntropyReport& rep,
                             const Rect& rect);

// I(v, w) = (v - w) int_w^v (f')^2 - (f(v) - f(w))^2 for the frozen flux
// f(., c, k), evaluated as (b - a) int_a^b (f' - chord)^2.
double jensen_defect(const FluxModel& model, double c, double k, double v,
                     double w);

// phi(t, x) = (1 - (t/t1)^2)^2 * exp(1 - 1 / (1 - u^2)), u = (x - xc) / hw,
// supported in [0, t1] x [xc - hw, xc + hw].
struct TestFunction {
  double t1 = 1.0;
  double xc = 0.0;
  double hw = 1.0;

  double operator()(double t, double x) const;
  double dt(double t, double x) const;
  double dx(double t, double x) const;
};

enum class ResidualMode {
  kApproximate,  // region fluxes and the discretized initial data
  kExact,        // the exact flux and the exact initial data
};

struct Residual {
  double r1 = 0.0;
  double r2 = 0.0;
};

// Weak-form residuals of both conservation laws against phi. The front-sum
// form is exact for piecewise-constant solutions; only the phi integrals are
// approximated. kExact needs the exact initial profiles.
Residual weak_residual(const Simulation& sim, const TestFunction& phi,
                       ResidualMode mode, const InitialData* exact = nullptr);

}  // namespace polyfront

#endif  // POLYFRONT_ENTROPY_HPP_
