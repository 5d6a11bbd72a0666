#include "polyfront/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <tuple>

namespace polyfront {

// Shortest text that reads back to the same double.
std::string fmt(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

void put_state(std::ostream& os, const State& u) {
  os << fmt(u.s) << ',' << fmt(u.c) << ',' << fmt(u.k);
}

}  // namespace

void write_snapshots(std::ostream& os, const Simulation& sim,
                     const std::vector<double>& times, double a, double b) {
  os << "t,x,s,c,k\n";
  for (double t : times) {
    SolutionProfile p = sim.profile(t);
    os << fmt(t) << ',' << fmt(a) << ',';
    put_state(os, p.at(a));
    os << '\n';
    for (std::size_t m = 0; m < p.breaks.size(); ++m) {
      double x = p.breaks[m];
      if (x <= a || x >= b) continue;
      os << fmt(t) << ',' << fmt(x) << ',';
      put_state(os, p.states[m + 1]);
      os << '\n';
    }
  }
}

void write_fronts(std::ostream& os, const Simulation& sim) {
  std::vector<const FrontRecord*> recs;
  for (int i = 0; i < sim.strip_count(); ++i) {
    for (const FrontRecord& r : sim.strip_records(i)) recs.push_back(&r);
  }
  std::stable_sort(recs.begin(), recs.end(),
                   [](const FrontRecord* p, const FrontRecord* q) {
                     return std::tie(p->t_birth, p->x_birth, p->strip) <
                            std::tie(q->t_birth, q->x_birth, q->strip);
                   });
  os << "t,kind,position,speed,sL,cL,kL,sR,cR,kR,t_end\n";
  for (const FrontRecord* r : recs) {
    os << fmt(r->t_birth) << ',' << kind_char(r->kind) << ','
       << fmt(r->x_birth) << ',' << fmt(r->speed) << ',';
    put_state(os, r->left);
    os << ',';
    put_state(os, r->right);
    os << ',' << fmt(std::min(r->t_death, sim.time())) << '\n';
  }
}

void write_entropy(std::ostream& os, const EntropyReport& rep, double t_end) {
  os << "t,kind,position,speed,t_end,production,budget,jump\n";
  for (const FrontProduction& p : rep.fronts) {
    os << fmt(p.t_birth) << ',' << kind_char(p.kind) << ',' << fmt(p.x_birth)
       << ',' << fmt(p.speed) << ',' << fmt(std::min(p.t_death, t_end)) << ','
       << fmt(p.production) << ',' << fmt(p.budget) << ',' << fmt(p.jump)
       << '\n';
  }
}

void write_entropy_summary(std::ostream& os, const EntropyReport& rep,
                           const Rect& rect, double mu_plus, double cap) {
  os << "entropy,t1,t2,x1,x2,mu_plus,cap,C,implied_C,max_s_production,"
        "violations\n";
  os << rep.entropy << ',' << fmt(rect.t1) << ',' << fmt(rect.t2) << ','
     << fmt(rect.x1) << ',' << fmt(rect.x2) << ',' << fmt(mu_plus) << ','
     << fmt(cap) << ',' << fmt(rep.C) << ',' << fmt(rep.implied_C) << ','
     << fmt(rep.max_s_production) << ',' << rep.budget_violations << '\n';
}

void write_convergence(std::ostream& os, const ConvergenceTable& table) {
  os << "eps,l1_next,r1,r2,mu_plus,events,fronts,status\n";
  for (const ConvergenceRow& r : table.rows) {
    os << fmt(r.eps) << ',' << (std::isnan(r.l1_next) ? "" : fmt(r.l1_next))
       << ',' << fmt(r.r1) << ',' << fmt(r.r2) << ',' << fmt(r.mu_plus) << ','
       << r.events << ',' << r.fronts << ',' << (r.ok ? "ok" : "aborted")
       << '\n';
  }
}

void write_timing(std::ostream& os, const ConvergenceTable& table) {
  os << "eps,wall_seconds\n";
  for (const ConvergenceRow& r : table.rows) {
    os << fmt(r.eps) << ',' << fmt(r.wall_seconds) << '\n';
  }
}

void write_fan(std::ostream& os, const WaveFan& fan) {
  os << "kind,speed,sL,cL,kL,sR,cR,kR\n";
  for (const Front& w : fan.fronts) {
    os << kind_char(w.kind) << ',' << fmt(w.speed) << ',';
    put_state(os, w.left);
    os << ',';
    put_state(os, w.right);
    os << '\n';
  }
}

void write_fv(std::ostream& os, const FvSolution& sol) {
  os << "x,s,c,k\n";
  for (std::size_t i = 0; i < sol.cells.size(); ++i) {
    os << fmt(sol.center(i)) << ',';
    put_state(os, sol.cells[i]);
    os << '\n';
  }
}

}  // namespace polyfront
