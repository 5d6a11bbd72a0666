#include "polyfront/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iterator>
#include <queue>
#include <string>
#include <tuple>

#include "polyfront/errors.hpp"

namespace polyfront {

namespace {

enum EventType { kCollision = 0, kArrival = 1, kInflow = 2 };

struct Event {
  double t;
  double x;
  int type;
  long seq;
  int a;
  int b;
};

struct Later {
  bool operator()(const Event& p, const Event& q) const {
    return std::tie(p.t, p.x, p.type, p.seq) >
           std::tie(q.t, q.x, q.type, q.seq);
  }
};

// Fronts closer than this at an event are treated as meeting there.
double pos_tol(double x) { return 1e-11 * std::max(1.0, std::abs(x)); }

constexpr double kDefectTol = 1e-10;

long default_max_events() {
  if (const char* env = std::getenv("POLYFRONT_MAX_EVENTS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return v;
  }
  return 10'000'000;
}

}  // namespace

State SolutionProfile::at(double x) const {
  auto it = std::upper_bound(breaks.begin(), breaks.end(), x);
  return states[it - breaks.begin()];
}

double front_defect(const FrontRecord& r, const FluxModel& model) {
  const State& l = r.left;
  const State& u = r.right;
  switch (r.kind) {
    case WaveKind::kS:
      return std::max(std::abs(l.c - u.c), std::abs(l.k - u.k));
    case WaveKind::kC:
      return std::max(std::abs(model.g(l.s, l.c, l.k) - model.g(u.s, u.c, u.k)),
                      std::abs(l.k - u.k));
    case WaveKind::kK:
      return std::max(std::abs(model.f(l.s, l.c, l.k) - model.f(u.s, u.c, u.k)),
                      std::abs(l.c - u.c));
  }
  return 0.0;
}

struct Simulation::Strip {
  int index = 0;
  double x_left = -kNever;
  double x_right = kNever;
  double k = 0.0;
  std::shared_ptr<const ValueGrid> grid;
  std::unique_ptr<StripGrids> grids;
  std::vector<FrontRecord> recs;
  std::list<int> order;
  std::vector<std::list<int>::iterator> where;
  std::priority_queue<Event, std::vector<Event>, Later> queue;
  long seq = 0;
  long event_no = 0;
  double t_now = 0.0;
  std::vector<InflowRecord> inflow;
  std::vector<InflowRecord> outflow;
  bool initialized = false;
};

namespace detail {

class StripRunner {
 public:
  using Strip = Simulation::Strip;
  using It = std::list<int>::iterator;

  StripRunner(Simulation& sim, Strip& st) : sim_(sim), st_(st) {}

  void init(std::shared_ptr<const ValueGrid> grid) {
    const DiscretizedData& d = sim_.data_;
    st_.grid = std::move(grid);
    st_.grids = std::make_unique<StripGrids>(st_.grid, st_.k, sim_.model_);
    st_.recs.clear();
    st_.order.clear();
    st_.where.clear();
    st_.queue = {};
    st_.seq = 0;
    st_.event_no = 0;
    st_.t_now = 0.0;
    st_.outflow.clear();

    int rank = 0;
    for (std::size_t m = 0; m < d.breaks.size(); ++m) {
      double x = d.breaks[m];
      if (x < st_.x_left || x >= st_.x_right) continue;
      const State& ul = d.values[m];
      const State& ur = d.values[m + 1];
      int jl = region_of_cell(m), jr = region_of_cell(m + 1);
      WaveFan fan = x == st_.x_left
                        ? solve_global(ul, ur, *st_.grids, sim_.model_)
                        : solve_local(ul, ur, jl, jr, false);
      place(fan, 0.0, x, jl, jr, st_.order.end(), rank);
    }
    for (auto it = st_.order.begin(); it != st_.order.end(); ++it) {
      auto nx = std::next(it);
      if (nx != st_.order.end()) predict_pair(*it, *nx);
    }
    if (!st_.order.empty()) predict_arrival(st_.order.back());
    for (std::size_t n = 0; n < st_.inflow.size(); ++n) {
      push_inflow(n);
    }
    st_.initialized = true;
  }

  void push_inflow(std::size_t n) {
    st_.queue.push({st_.inflow[n].t, st_.x_left, kInflow, st_.seq++,
                    static_cast<int>(n), -1});
  }

  void run(double T) {
    SimCounters& cnt = sim_.counters_;
    while (!st_.queue.empty()) {
      Event ev = st_.queue.top();
      if (ev.t > T) break;
      st_.queue.pop();
      bool done = false;
      switch (ev.type) {
        case kCollision: done = collision(ev); break;
        case kArrival: done = arrival(ev); break;
        case kInflow: done = inflow(ev); break;
      }
      if (!done) continue;
      ++cnt.events;
      if (cnt.events > sim_.max_events_) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "event safeguard exceeded (%ld events) at t=%.17g",
                      sim_.max_events_, ev.t);
        throw SafeguardAbort(buf);
      }
    }
    st_.t_now = T;
  }

 private:
  int region_of_cell(std::size_t m) const {
    const DiscretizedData& d = sim_.data_;
    if (m == 0) return 0;
    return d.c_interval_of(d.breaks[m - 1]);
  }

  double c_of(int j) const { return sim_.data_.c_values.at(j); }

  WaveFan solve_local(const State& ul, const State& ur, int jl, int jr,
                      bool has_k) {
    if (has_k) return solve_global(ul, ur, *st_.grids, sim_.model_);
    if (jl == jr) {
      return solve_scalar_pl(st_.grids->flux(c_of(jl)), ul.s, ur.s);
    }
    if (jl + 1 == jr) {
      const RegionFlux& lf = st_.grids->flux(c_of(jl));
      const RegionFlux& rf = st_.grids->flux(c_of(jr));
      return solve_c_minjump(ul.s, c_of(jl), ur.s, c_of(jr), st_.k, lf, rf,
                             st_.grids->grid(), sim_.model_)
          .fan();
    }
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "interaction spans c-intervals %d..%d in strip %d", jl, jr,
                  st_.index);
    throw InvariantViolation(buf);
  }

  // Inserts the fan at x before `before`; returns the first inserted
  // iterator (or `before` for an empty fan).
  It place(const WaveFan& fan, double t, double x, int jl, int jr, It before,
           int& rank) {
    It first = before;
    bool have_first = false;
    int region = jl;
    for (const Front& f : fan.fronts) {
      FrontRecord r;
      r.kind = f.kind;
      r.strip = st_.index;
      r.t_birth = t;
      r.x_birth = x;
      r.speed = f.speed;
      r.left = f.left;
      r.right = f.right;
      r.event = st_.event_no;
      r.rank = rank++;
      r.region_left = region;
      if (f.kind == WaveKind::kC) {
        r.id = jr;
        region = jr;
      } else if (f.kind == WaveKind::kK) {
        r.id = st_.index;
      }
      r.region_right = region;
      check(r);
      int idx = static_cast<int>(st_.recs.size());
      st_.recs.push_back(r);
      It it = st_.order.insert(before, idx);
      st_.where.push_back(it);
      if (!have_first) {
        first = it;
        have_first = true;
      }
      ++sim_.counters_.fronts_created;
    }
    if (region != jr) {
      throw InvariantViolation("fan does not connect its c-intervals");
    }
    return first;
  }

  void check(const FrontRecord& r) {
    if (!in_unit_cube(r.left) || !in_unit_cube(r.right)) {
      throw InvariantViolation("front state outside [0,1]^3");
    }
    if (!(r.speed >= 0.0)) throw InvariantViolation("negative front speed");
    if (r.kind == WaveKind::kK && r.speed != 0.0) {
      throw InvariantViolation("moving k front");
    }
    if (sim_.opt_.check_invariants) {
      double d = front_defect(r, sim_.model_);
      if (d > kDefectTol) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%c front continuity defect %.3g",
                      kind_char(r.kind), d);
        throw InvariantViolation(buf);
      }
    }
  }

  double pos(int idx, double t) const { return st_.recs[idx].position(t); }

  void predict_pair(int a, int b) {
    const FrontRecord& ra = st_.recs[a];
    const FrontRecord& rb = st_.recs[b];
    if (!(ra.speed > rb.speed)) return;
    double xa = ra.position(st_.t_now), xb = rb.position(st_.t_now);
    double dt = std::max(0.0, (xb - xa) / (ra.speed - rb.speed));
    double t = st_.t_now + dt;
    if (!std::isfinite(t)) return;
    st_.queue.push({t, xa + ra.speed * dt, kCollision, st_.seq++, a, b});
  }

  void predict_arrival(int a) {
    if (!std::isfinite(st_.x_right)) return;
    const FrontRecord& r = st_.recs[a];
    if (!(r.speed > 0.0)) return;
    double xa = r.position(st_.t_now);
    double dt = std::max(0.0, (st_.x_right - xa) / r.speed);
    double t = st_.t_now + dt;
    if (!std::isfinite(t)) return;
    st_.queue.push({t, st_.x_right, kArrival, st_.seq++, a, -1});
  }

  bool alive(int idx) const { return st_.recs[idx].t_death == kNever; }

  void kill(It first, It last_inclusive, double t) {
    It end = std::next(last_inclusive);
    for (It it = first; it != end; ++it) st_.recs[*it].t_death = t;
    st_.order.erase(first, end);
  }

  // Re-predicts around [first, last) after an insertion.
  void repredict(It first, It after) {
    if (first != st_.order.begin() && first != st_.order.end()) {
      predict_pair(*std::prev(first), *first);
    }
    if (after != st_.order.end() && after != st_.order.begin()) {
      predict_pair(*std::prev(after), *after);
    }
    if (after == st_.order.end() && !st_.order.empty()) {
      predict_arrival(st_.order.back());
    }
  }

  bool collision(const Event& ev) {
    int a = ev.a, b = ev.b;
    if (!alive(a) || !alive(b)) return false;
    It ia = st_.where[a], ib = st_.where[b];
    if (std::next(ia) != ib) return false;
    double t = ev.t;
    st_.t_now = t;
    ++st_.event_no;
    ++sim_.counters_.collisions;
    double x = 0.5 * (pos(a, t) + pos(b, t));
    double tol = pos_tol(x);
    It first = ia, last = ib;
    while (first != st_.order.begin()) {
      It p = std::prev(first);
      if (std::abs(pos(*p, t) - x) > tol) break;
      first = p;
    }
    while (std::next(last) != st_.order.end()) {
      It n = std::next(last);
      if (std::abs(pos(*n, t) - x) > tol) break;
      last = n;
    }
    resolve(first, last, t, x);
    return true;
  }

  void resolve(It first, It last, double t, double x) {
    const FrontRecord& rf = st_.recs[*first];
    const FrontRecord& rl = st_.recs[*last];
    State ul = rf.left, ur = rl.right;
    int jl = rf.region_left, jr = rl.region_right;
    int n_c = 0;
    bool has_k = false;
    for (It it = first; it != std::next(last); ++it) {
      n_c += st_.recs[*it].kind == WaveKind::kC;
      has_k |= st_.recs[*it].kind == WaveKind::kK;
    }
    if (n_c > 1) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "%d c fronts meet at x=%.17g t=%.17g",
                    n_c, x, t);
      throw InvariantViolation(buf);
    }
    if (has_k && st_.recs[*first].kind != WaveKind::kK) {
      throw InvariantViolation("front crossed a k front leftwards");
    }
    WaveFan fan = solve_local(ul, ur, jl, jr, has_k);
    It after = std::next(last);
    kill(first, last, t);
    int rank = 0;
    It nf = place(fan, t, x, jl, jr, after, rank);
    repredict(nf, after);
  }

  bool arrival(const Event& ev) {
    int a = ev.a;
    if (!alive(a) || st_.order.empty() || st_.order.back() != a) return false;
    double t = ev.t;
    st_.t_now = t;
    ++st_.event_no;
    ++sim_.counters_.arrivals;
    double x = st_.x_right;
    double tol = pos_tol(x);
    It last = std::prev(st_.order.end());
    It first = last;
    while (first != st_.order.begin()) {
      It p = std::prev(first);
      if (std::abs(pos(*p, t) - x) > tol) break;
      first = p;
    }
    const FrontRecord& rf = st_.recs[*first];
    if (rf.kind == WaveKind::kK) {
      throw InvariantViolation("strip collapsed onto its right k front");
    }
    st_.outflow.push_back({t, rf.left, rf.region_left});
    kill(first, last, t);
    if (!st_.order.empty()) predict_arrival(st_.order.back());
    return true;
  }

  bool inflow(const Event& ev) {
    const InflowRecord& in = st_.inflow[ev.a];
    double t = ev.t;
    st_.t_now = t;
    ++st_.event_no;
    ++sim_.counters_.inflows;
    double x = st_.x_left;
    if (st_.order.empty() ||
        st_.recs[st_.order.front()].kind != WaveKind::kK) {
      throw InvariantViolation("strip lost its k front");
    }
    double tol = pos_tol(x);
    It first = st_.order.begin(), last = first;
    while (std::next(last) != st_.order.end()) {
      It n = std::next(last);
      if (std::abs(pos(*n, t) - x) > tol) break;
      last = n;
    }
    const FrontRecord& rl = st_.recs[*last];
    State ur = rl.right;
    int jr = rl.region_right;
    It after = std::next(last);
    kill(first, last, t);
    WaveFan fan = solve_global(in.left, ur, *st_.grids, sim_.model_);
    int rank = 0;
    It nf = place(fan, t, x, in.region, jr, after, rank);
    repredict(nf, after);
    return true;
  }

  Simulation& sim_;
  Strip& st_;
};

}  // namespace detail

// ---------------------------------------------------------------------------

Simulation::Simulation(DiscretizedData data, FluxModel model, SimOptions opt)
    : data_(std::move(data)), model_(std::move(model)), opt_(opt) {
  max_events_ = opt_.max_events > 0 ? opt_.max_events : default_max_events();
  g0_ = std::make_shared<ValueGrid>(build_G0(data_, model_));
  const int n = data_.N() + 1;
  for (int i = 0; i < n; ++i) {
    auto st = std::make_unique<Strip>();
    st->index = i;
    st->x_left = i == 0 ? -kNever : data_.k_jumps[i - 1];
    st->x_right = i + 1 < n ? data_.k_jumps[i] : kNever;
    st->k = data_.k_values[i];
    strips_.push_back(std::move(st));
  }
  // strip 0 only sees the initial grid; the sweep to t = 0 builds the rest
  detail::StripRunner(*this, *strips_[0]).init(g0_);
  advance_to(0.0);
}

Simulation::~Simulation() = default;
Simulation::Simulation(Simulation&&) noexcept = default;
Simulation& Simulation::operator=(Simulation&&) noexcept = default;

void Simulation::advance_to(double T) {
  if (!(T >= t_)) {
    throw PreconditionError("advance_to: target time before current time");
  }
  bool rebuilt_left = false;
  for (std::size_t i = 0; i < strips_.size(); ++i) {
    Strip& st = *strips_[i];
    if (i == 0) {
      detail::StripRunner(*this, st).run(T);
      continue;
    }
    const Strip& prev = *strips_[i - 1];
    const DiscretizedData& d = data_;
    auto k_state = [&](const State& u) {
      return State{solve_k(u.s, u.c, u.k, st.k, model_), u.c, st.k};
    };
    bool rebuild = !st.initialized || rebuilt_left;
    std::size_t seen = st.inflow.size();
    if (!rebuild) {
      for (std::size_t n = seen; n < prev.outflow.size(); ++n) {
        State m = k_state(prev.outflow[n].left);
        const RegionFlux& f = st.grids->flux(m.c);
        long idx = f.index_of(m.s, 1e-13);
        if (idx < 0) {
          rebuild = true;
          break;
        }
      }
    }
    if (rebuild) {
      std::vector<State> fresh;
      std::size_t cell = d.cell_of(st.x_left);
      fresh.push_back(k_state(d.values[cell - 1]));
      for (const InflowRecord& r : prev.outflow) {
        fresh.push_back(k_state(r.left));
      }
      auto grid = std::make_shared<ValueGrid>(*prev.grid);
      auto next = std::make_shared<ValueGrid>(
          extend_grid(*grid, fresh, model_));
      counters_.grid_extensions +=
          static_cast<long>(next->size() - grid->size());
      if (st.initialized) ++counters_.strip_rebuilds;
      st.inflow = prev.outflow;
      detail::StripRunner runner(*this, st);
      runner.init(next);
      runner.run(T);
      rebuilt_left = true;
    } else {
      detail::StripRunner runner(*this, st);
      for (std::size_t n = seen; n < prev.outflow.size(); ++n) {
        st.inflow.push_back(prev.outflow[n]);
        runner.push_inflow(st.inflow.size() - 1);
      }
      runner.run(T);
      rebuilt_left = false;
    }
  }
  t_ = T;
}

const StripGrids& Simulation::strip_grids(int i) const {
  const Strip& st = *strips_.at(i);
  if (!st.grids) throw PreconditionError("strip not initialized yet");
  return *st.grids;
}

double Simulation::strip_left(int i) const { return strips_.at(i)->x_left; }
double Simulation::strip_right(int i) const { return strips_.at(i)->x_right; }

const RegionFlux& Simulation::region_flux(int i, int j) const {
  return strip_grids(i).flux(data_.c_values.at(j));
}

const std::vector<FrontRecord>& Simulation::strip_records(int i) const {
  return strips_.at(i)->recs;
}

const std::vector<InflowRecord>& Simulation::strip_inflows(int i) const {
  return strips_.at(i)->inflow;
}

std::size_t Simulation::record_count() const {
  std::size_t n = 0;
  for (const auto& st : strips_) n += st->recs.size();
  return n;
}

std::vector<FrontRecord> Simulation::fronts_at(double t) const {
  if (t > t_ || t < 0.0) {
    throw PreconditionError("requested time outside the simulated history");
  }
  std::vector<FrontRecord> out;
  for (const auto& st : strips_) {
    for (const FrontRecord& r : st->recs) {
      // fronts alive at the current horizon have no death time yet
      if (r.alive_at(t) || (t == t_ && r.t_death == kNever && r.t_birth <= t)) {
        out.push_back(r);
      }
    }
  }
  std::sort(out.begin(), out.end(),
            [t](const FrontRecord& a, const FrontRecord& b) {
              double pa = a.position(t), pb = b.position(t);
              if (pa != pb) return pa < pb;
              return std::tie(a.strip, a.t_birth, a.event, a.rank) <
                     std::tie(b.strip, b.t_birth, b.event, b.rank);
            });
  return out;
}

SolutionProfile Simulation::profile(double t) const {
  SolutionProfile p;
  p.states.push_back(data_.values.front());
  for (const FrontRecord& r : fronts_at(t)) {
    double x = r.position(t);
    if (!p.breaks.empty() && p.breaks.back() == x) {
      p.states.back() = r.right;
    } else {
      p.breaks.push_back(x);
      p.states.push_back(r.right);
    }
  }
  return p;
}

std::vector<State> Simulation::sample(double t,
                                      const std::vector<double>& xs) const {
  SolutionProfile p = profile(t);
  std::vector<State> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(p.at(x));
  return out;
}

int Simulation::c_front_count(double t) const {
  int n = 0;
  for (const FrontRecord& r : fronts_at(t)) n += r.kind == WaveKind::kC;
  return n;
}

}  // namespace polyfront
