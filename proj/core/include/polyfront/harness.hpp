#ifndef POLYFRONT_HARNESS_HPP_
#define POLYFRONT_HARNESS_HPP_

#include <string>
#include <vector>

#include "polyfront/config.hpp"
#include "polyfront/entropy.hpp"
#include "polyfront/tracker.hpp"

namespace polyfront {

DiscretizedData discretize(const RunConfig& cfg, double eps);

struct RunOutput {
  Simulation sim;
  std::vector<EntropyReport> reports;  // one per cfg.entropies
  double wall_seconds = 0.0;
};

// Discretizes, simulates to cfg.T and audits every configured entropy.
// Throws SafeguardAbort, InvariantViolation or ConfigError.
RunOutput run_simulation(const RunConfig& cfg, double eps);

// Exact L1 distance on [a, b] of two piecewise-constant profiles, summed
// over s, c and k.
double l1_distance(const SolutionProfile& p, const SolutionProfile& q,
                   double a, double b);
// L1 distance on [0, T] x [a, b]: exact in x, composite Gauss-Legendre in t.
double l1_distance(const Simulation& p, const Simulation& q, double T,
                   double a, double b, int panels = 128);

// Largest residual over the test functions, against the exact flux and
// the exact initial data.
Residual max_residual(const Simulation& sim, const RunConfig& cfg);

enum class ErrorKind { kNone, kSafeguard, kInvariant, kOther };

struct ConvergenceRow {
  double eps = 0.0;
  double l1_next = 0.0;  // distance to the next eps; NaN on the last row
  double r1 = 0.0;
  double r2 = 0.0;
  double mu_plus = 0.0;  // first configured entropy over cfg.rect()
  long events = 0;
  long fronts = 0;
  double wall_seconds = 0.0;
  bool ok = true;
  ErrorKind error_kind = ErrorKind::kNone;
  std::string error;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  bool partial = false;  // some run aborted
};

// Runs every eps of cfg (concurrently when threads > 1) and fills the table.
ConvergenceTable convergence_study(const RunConfig& cfg, int threads = 0);

// Writes run.json, snapshots.csv, fronts.csv and the entropy reports.
void write_run(const std::string& dir, const RunConfig& cfg, double eps,
               const RunOutput& out);

struct RunDir {
  RunConfig cfg;
  double eps = 0.0;
};
RunDir read_run(const std::string& dir);

// Re-runs a persisted run, checks that fronts.csv is reproduced byte for
// byte and that every persisted front meets its continuity conditions, then
// audits entropy `id` over rect. Writes entropy_<id>.csv and its summary.
struct AuditResult {
  EntropyReport report;
  double mu_plus = 0.0;
  double cap = 0.0;
};
AuditResult audit_run(const std::string& dir, const std::string& id,
                      const Rect& rect);

}  // namespace polyfront

#endif  // POLYFRONT_HARNESS_HPP_
