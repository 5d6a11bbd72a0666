#include "polyfront/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>

#include "polyfront/errors.hpp"
#include "polyfront/quadrature.hpp"

namespace polyfront {

Entropy entropy_by_id(const std::string& id) {
  Entropy e;
  e.id = id;
  if (id == "quadratic") {
    e.eta = [](double s) { return s * s; };
    e.d1 = [](double s) { return 2.0 * s; };
    e.d2 = [](double) { return 2.0; };
    e.sup_d1 = 2.0;
    e.sup_d2 = 2.0;
  } else if (id == "quartic") {
    e.eta = [](double s) { return s * s * s * s; };
    e.d1 = [](double s) { return 4.0 * s * s * s; };
    e.d2 = [](double s) { return 12.0 * s * s; };
    e.sup_d1 = 4.0;
    e.sup_d2 = 12.0;
  } else if (id == "exp") {
    e.eta = [](double s) { return std::expm1(s); };
    e.d1 = [](double s) { return std::exp(s); };
    e.d2 = [](double s) { return std::exp(s); };
    e.sup_d1 = std::exp(1.0);
    e.sup_d2 = std::exp(1.0);
  } else if (id == "identity") {
    e.eta = [](double s) { return s; };
    e.d1 = [](double) { return 1.0; };
    e.d2 = [](double) { return 0.0; };
    e.sup_d1 = 1.0;
    e.sup_d2 = 0.0;
  } else {
    throw ConfigError("unknown entropy '" + id + "'");
  }
  return e;
}

std::vector<Entropy> entropy_battery() {
  return {entropy_by_id("quadratic"), entropy_by_id("quartic"),
          entropy_by_id("exp")};
}

// ---------------------------------------------------------------------------

EntropyFlux::EntropyFlux(const RegionFlux& flux, const Entropy& eta)
    : flux_(&flux), eta_(&eta) {
  const auto& xs = flux.xs();
  const auto& sl = flux.slopes();
  prefix_.resize(xs.size());
  prefix_[0] = 0.0;
  double prev = eta.eta(xs[0]);
  for (std::size_t m = 0; m + 1 < xs.size(); ++m) {
    double next = eta.eta(xs[m + 1]);
    prefix_[m + 1] = prefix_[m] + sl[m] * (next - prev);
    prev = next;
  }
}

double EntropyFlux::operator()(double s) const {
  std::size_t m = flux_->segment(s);
  return prefix_[m] +
         flux_->slopes()[m] * (eta_->eta(s) - eta_->eta(flux_->xs()[m]));
}

double entropy_flux_pl(const Entropy& eta, const RegionFlux& flux, double s) {
  const auto& xs = flux.xs();
  const auto& sl = flux.slopes();
  double q = 0.0;
  for (std::size_t m = 0; m + 1 < xs.size() && xs[m] < s; ++m) {
    double hi = std::min(s, xs[m + 1]);
    q += sl[m] * (eta.eta(hi) - eta.eta(xs[m]));
  }
  return q;
}

// ---------------------------------------------------------------------------

double budget_constant(const Entropy& eta, const FluxModel& model) {
  return 4.0 * (1.0 + eta.sup_d1 + eta.sup_d2) *
         (1.0 + model.lipschitz_ck() + 1.0);
}

namespace {

struct Sides {
  const RegionFlux* left;
  const RegionFlux* right;
};

Sides sides_of(const Simulation& sim, const FrontRecord& r) {
  int li = r.kind == WaveKind::kK ? r.strip - 1 : r.strip;
  return {&sim.region_flux(li, r.region_left),
          &sim.region_flux(r.strip, r.region_right)};
}

class FluxTables {
 public:
  FluxTables(const Simulation& sim, const Entropy& eta)
      : sim_(sim), eta_(eta) {}

  const EntropyFlux& get(const RegionFlux* f) {
    auto it = cache_.find(f);
    if (it == cache_.end()) {
      it = cache_.emplace(f, std::make_unique<EntropyFlux>(*f, eta_)).first;
    }
    return *it->second;
  }

  double production(const FrontRecord& r, double* d_eta, double* d_q) {
    Sides sd = sides_of(sim_, r);
    double de = eta_.eta(r.right.s) - eta_.eta(r.left.s);
    double dq = get(sd.right)(r.right.s) - get(sd.left)(r.left.s);
    if (d_eta) *d_eta = de;
    if (d_q) *d_q = dq;
    return dq - r.speed * de;
  }

 private:
  const Simulation& sim_;
  const Entropy& eta_;
  std::map<const RegionFlux*, std::unique_ptr<EntropyFlux>> cache_;
};

}  // namespace

double front_production(const Simulation& sim, const FrontRecord& r,
                        const Entropy& eta) {
  Sides sd = sides_of(sim, r);
  double de = eta.eta(r.right.s) - eta.eta(r.left.s);
  double dq = entropy_flux_pl(eta, *sd.right, r.right.s) -
              entropy_flux_pl(eta, *sd.left, r.left.s);
  return dq - r.speed * de;
}

EntropyReport audit_entropy(const Simulation& sim, const Entropy& eta) {
  EntropyReport rep;
  rep.entropy = eta.id;
  rep.C = budget_constant(eta, sim.model());
  const DiscretizedData& d = sim.data();
  int nm = d.N() + d.M() > 0 ? d.N() + d.M() : 1;
  rep.eps_over_nm = d.eps / nm;
  FluxTables tables(sim, eta);
  for (int i = 0; i < sim.strip_count(); ++i) {
    const auto& recs = sim.strip_records(i);
    for (std::size_t n = 0; n < recs.size(); ++n) {
      const FrontRecord& r = recs[n];
      FrontProduction p;
      p.strip = i;
      p.record = n;
      p.kind = r.kind;
      p.t_birth = r.t_birth;
      p.t_death = r.t_death;
      p.x_birth = r.x_birth;
      p.speed = r.speed;
      p.production = tables.production(r, &p.d_eta, &p.d_q);
      if (r.kind == WaveKind::kS) {
        rep.max_s_production = std::max(rep.max_s_production, p.production);
      } else {
        p.jump = r.kind == WaveKind::kC ? std::abs(r.right.c - r.left.c)
                                        : std::abs(r.right.k - r.left.k);
        double scale = rep.eps_over_nm + p.jump;
        p.budget = rep.C * scale;
        if (p.production > p.budget) ++rep.budget_violations;
        rep.implied_C =
            std::max(rep.implied_C, std::max(p.production, 0.0) / scale);
      }
      rep.fronts.push_back(p);
    }
  }
  return rep;
}

double time_in_rect(const FrontRecord& r, const Rect& rect, double t_end) {
  double lo = std::max(r.t_birth, rect.t1);
  double hi = std::min({r.t_death, t_end, rect.t2});
  if (!(hi > lo)) return 0.0;
  if (r.speed == 0.0) {
    return (r.x_birth >= rect.x1 && r.x_birth <= rect.x2) ? hi - lo : 0.0;
  }
  double ta = r.t_birth + (rect.x1 - r.x_birth) / r.speed;
  double tb = r.t_birth + (rect.x2 - r.x_birth) / r.speed;
  lo = std::max(lo, ta);
  hi = std::min(hi, tb);
  return hi > lo ? hi - lo : 0.0;
}

double positive_part_measure(const Simulation& sim, const EntropyReport& rep,
                             const Rect& rect) {
  if (rect.t1 < 0.0 || rect.t2 < rect.t1 || rect.t2 > sim.time() ||
      rect.x2 < rect.x1) {
    throw PreconditionError("rectangle outside the simulated history");
  }
  double mu = 0.0;
  for (const FrontProduction& p : rep.fronts) {
    if (p.production <= 0.0) continue;
    FrontRecord r;
    r.t_birth = p.t_birth;
    r.t_death = p.t_death;
    r.x_birth = p.x_birth;
    r.speed = p.speed;
    mu += p.production * time_in_rect(r, rect, sim.time());
  }
  return mu;
}

// ---------------------------------------------------------------------------

double jensen_defect(const FluxModel& model, double c, double k, double v,
                     double w) {
  if (v == w) return 0.0;
  double a = std::min(v, w), b = std::max(v, w);
  double chord = (model.f(b, c, k) - model.f(a, c, k)) / (b - a);
  const FluxFamily& fam = model.family();
  auto sq = [&](double s) {
    double d = fam.df(s, c, k) - chord;
    return d * d;
  };
  return (b - a) * adaptive_simpson(sq, a, b, 1e-10);
}

// ---------------------------------------------------------------------------

double TestFunction::operator()(double t, double x) const {
  if (t < 0.0 || t >= t1) return 0.0;
  double u = (x - xc) / hw;
  if (std::abs(u) >= 1.0) return 0.0;
  double tau = t / t1;
  double p = 1.0 - tau * tau;
  return p * p * std::exp(1.0 - 1.0 / (1.0 - u * u));
}

double TestFunction::dt(double t, double x) const {
  if (t < 0.0 || t >= t1) return 0.0;
  double u = (x - xc) / hw;
  if (std::abs(u) >= 1.0) return 0.0;
  double tau = t / t1;
  double dpsi = -4.0 * tau * (1.0 - tau * tau) / t1;
  return dpsi * std::exp(1.0 - 1.0 / (1.0 - u * u));
}

double TestFunction::dx(double t, double x) const {
  if (t < 0.0 || t >= t1) return 0.0;
  double u = (x - xc) / hw;
  if (std::abs(u) >= 1.0) return 0.0;
  double tau = t / t1;
  double p = 1.0 - tau * tau;
  double w = 1.0 - u * u;
  double chi = std::exp(1.0 - 1.0 / w);
  return p * p * chi * (-2.0 * u / (w * w)) / hw;
}

Residual weak_residual(const Simulation& sim, const TestFunction& phi,
                       ResidualMode mode, const InitialData* exact) {
  if (phi.t1 > sim.time() * (1.0 + 1e-12) || !(phi.t1 > 0.0) ||
      !(phi.hw > 0.0)) {
    throw PreconditionError("test function support outside the history");
  }
  if (mode == ResidualMode::kExact && !exact) {
    throw PreconditionError("exact residual needs the exact initial data");
  }
  const FluxModel& model = sim.model();
  const double xa = phi.xc - phi.hw, xb = phi.xc + phi.hw;
  double r1 = 0.0, r2 = 0.0;
  for (int i = 0; i < sim.strip_count(); ++i) {
    for (const FrontRecord& r : sim.strip_records(i)) {
      double ta = std::max(r.t_birth, 0.0);
      double tb = std::min({r.t_death, sim.time(), phi.t1});
      if (!(tb > ta)) continue;
      double p0 = r.position(ta), p1 = r.position(tb);
      if (std::max(p0, p1) <= xa || std::min(p0, p1) >= xb) continue;
      const State& l = r.left;
      const State& u = r.right;
      double fl, fr;
      if (mode == ResidualMode::kExact) {
        fl = model.f(l.s, l.c, l.k);
        fr = model.f(u.s, u.c, u.k);
      } else {
        Sides sd = sides_of(sim, r);
        fl = sd.left->eval(l.s);
        fr = sd.right->eval(u.s);
      }
      double j1 = r.speed * (u.s - l.s) - (fr - fl);
      double j2 = r.speed * (u.c * u.s - l.c * l.s) - (u.c * fr - l.c * fl);
      if (j1 == 0.0 && j2 == 0.0) continue;
      auto along = [&](double t) { return phi(t, r.position(t)); };
      double w = adaptive_simpson(along, ta, tb, 1e-12);
      r1 += j1 * w;
      r2 += j2 * w;
    }
  }
  if (mode == ResidualMode::kExact) {
    const DiscretizedData& d = sim.data();
    std::vector<double> cuts{xa};
    for (double x : d.breaks) {
      if (x > xa && x < xb) cuts.push_back(x);
    }
    for (const Profile* p : {&exact->s, &exact->c}) {
      for (double x : p->breaks()) {
        if (x > xa && x < xb) cuts.push_back(x);
      }
    }
    cuts.push_back(xb);
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t n = 0; n + 1 < cuts.size(); ++n) {
      double lo = cuts[n], hi = cuts[n + 1];
      if (!(hi > lo)) continue;
      State ue = d.at(0.5 * (lo + hi));
      auto m1 = [&](double x) { return (exact->s(x) - ue.s) * phi(0.0, x); };
      auto m2 = [&](double x) {
        return (exact->c(x) * exact->s(x) - ue.c * ue.s) * phi(0.0, x);
      };
      r1 += adaptive_simpson(m1, lo, hi, 1e-12);
      r2 += adaptive_simpson(m2, lo, hi, 1e-12);
    }
  }
  return {std::abs(r1), std::abs(r2)};
}

}  // namespace polyfront
