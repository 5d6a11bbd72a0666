#ifndef POLYFRONT_CSV_HPP_
#define POLYFRONT_CSV_HPP_

#include <ostream>
#include <string>
#include <vector>

#include "polyfront/entropy.hpp"
#include "polyfront/harness.hpp"
#include "polyfront/reference_fv.hpp"
#include "polyfront/riemann.hpp"
#include "polyfront/tracker.hpp"

namespace polyfront {

// Round-trip decimal form of a double.
std::string fmt(double v);

// t,x,s,c,k: one row per constant piece meeting [a, b], x its left end.
void write_snapshots(std::ostream& os, const Simulation& sim,
                     const std::vector<double>& times, double a, double b);
// t,kind,position,speed,sL,cL,kL,sR,cR,kR,t_end: one row per front segment.
void write_fronts(std::ostream& os, const Simulation& sim);
// t,kind,position,speed,t_end,production,budget,jump; open fronts end at
// t_end.
void write_entropy(std::ostream& os, const EntropyReport& rep, double t_end);
// entropy,t1,t2,x1,x2,mu_plus,cap,C,implied_C,max_s_production,violations
void write_entropy_summary(std::ostream& os, const EntropyReport& rep,
                           const Rect& rect, double mu_plus, double cap);
// eps,l1_next,r1,r2,mu_plus,events,fronts,status
void write_convergence(std::ostream& os, const ConvergenceTable& table);
// eps,wall_seconds
void write_timing(std::ostream& os, const ConvergenceTable& table);
// kind,speed,sL,cL,kL,sR,cR,kR
void write_fan(std::ostream& os, const WaveFan& fan);
// x,s,c,k at cell centers
void write_fv(std::ostream& os, const FvSolution& sol);

}  // namespace polyfront

#endif  // POLYFRONT_CSV_HPP_
