#include "polyfront/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "polyfront/errors.hpp"
#include "polyfront/profile.hpp"

namespace polyfront {

namespace {
// Half the snap tolerance, so a merged level stays within it of every
// value it absorbed plus rounding.
constexpr double kLevelMergeTol = 0.5 * kSnapTol;
}  // namespace

long build_L(double eps, int N, int M, double c2_sup) {
  if (!(eps > 0.0)) throw PreconditionError("build_L: eps must be positive");
  if (N < 0 || M < 0) throw PreconditionError("build_L: negative count");
  int nm = N + M > 0 ? N + M : 1;
  double r = c2_sup / eps;
  // guard against 3.7 / 0.1 = 37.000000000000007
  long base = static_cast<long>(std::ceil(r * (1.0 - 1e-12)));
  if (base < 1) base = 1;
  return base * nm;
}

long build_L(double eps, int N, int M, const FluxModel& model) {
  return build_L(eps, N, M, model.c2_sup());
}

// ---------------------------------------------------------------------------
// ValueGrid

ValueGrid::ValueGrid(double eps, int N, int M, long L)
    : eps_(eps), N_(N), M_(M), L_(L) {}

std::optional<double> ValueGrid::snap(double v, double tol) const {
  auto it = std::lower_bound(levels_.begin(), levels_.end(), v);
  double best = 0.0, dist = tol;
  bool found = false;
  if (it != levels_.end() && std::abs(*it - v) <= dist) {
    best = *it;
    dist = std::abs(*it - v);
    found = true;
  }
  if (it != levels_.begin() && std::abs(*(it - 1) - v) <= dist) {
    best = *(it - 1);
    found = true;
  }
  if (!found) return std::nullopt;
  return best;
}

unsigned ValueGrid::source_of(double v, double tol) const {
  auto s = snap(v, tol);
  if (!s) return 0u;
  auto it = std::lower_bound(levels_.begin(), levels_.end(), *s);
  return sources_[it - levels_.begin()];
}

void ValueGrid::stage(double level, unsigned source) {
  staged_.emplace_back(level, source);
}

void ValueGrid::add_anchor(double c, double k, double s) {
  auto& v = anchors_[{c, k}];
  auto it = std::lower_bound(v.begin(), v.end(), s);
  if (it == v.end() || *it != s) v.insert(it, s);
}

const std::vector<double>& ValueGrid::anchors(double c, double k) const {
  static const std::vector<double> kEmpty;
  auto it = anchors_.find({c, k});
  return it == anchors_.end() ? kEmpty : it->second;
}

std::size_t ValueGrid::commit() {
  // Existing levels never move or vanish. Staged values are clustered, each
  // cluster is absorbed by a kept level within the merge tolerance or else
  // becomes a new level, so all final levels stay more than the tolerance
  // apart.
  std::sort(staged_.begin(), staged_.end());
  const unsigned exact = kFromInitial | kFromExtension | kFromGrid;
  std::vector<double> added;
  std::vector<unsigned> added_src;
  std::size_t n = 0;
  while (n < staged_.size()) {
    const double start = staged_[n].first;
    unsigned src = 0;
    double rep = start;
    bool rep_exact = false;
    for (; n < staged_.size() && staged_[n].first - start <= kLevelMergeTol;
         ++n) {
      src |= staged_[n].second;
      if (!rep_exact && (staged_[n].second & exact)) {
        rep = staged_[n].first;
        rep_exact = true;
      }
    }
    auto it = std::lower_bound(levels_.begin(), levels_.end(), rep);
    std::size_t near = levels_.size();
    double gap = kLevelMergeTol;
    if (it != levels_.end() && *it - rep <= gap) {
      near = it - levels_.begin();
      gap = *it - rep;
    }
    if (it != levels_.begin() && rep - *(it - 1) <= gap) {
      near = (it - 1) - levels_.begin();
    }
    if (near < levels_.size()) {
      sources_[near] |= src;
    } else if (!added.empty() && rep - added.back() <= kLevelMergeTol) {
      added_src.back() |= src;
    } else {
      added.push_back(rep);
      added_src.push_back(src);
    }
  }
  staged_.clear();

  const std::size_t fresh = added.size();
  if (fresh > 0) {
    std::vector<double> levels;
    std::vector<unsigned> sources;
    levels.reserve(levels_.size() + fresh);
    sources.reserve(levels_.size() + fresh);
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < levels_.size() || j < fresh) {
      if (j == fresh || (i < levels_.size() && levels_[i] < added[j])) {
        levels.push_back(levels_[i]);
        sources.push_back(sources_[i++]);
      } else {
        levels.push_back(added[j]);
        sources.push_back(added_src[j++]);
      }
    }
    levels_ = std::move(levels);
    sources_ = std::move(sources);
  }
  ++epoch_;
  return fresh;
}

// ---------------------------------------------------------------------------
// RegionFlux

RegionFlux::RegionFlux(double c, double k, std::vector<double> xs,
                       const FluxModel& model)
    : c_(c), k_(k), xs_(std::move(xs)) {
  if (xs_.size() < 2 || xs_.front() != 0.0 || xs_.back() != 1.0) {
    throw PreconditionError("region grid must contain 0 and 1");
  }
  fs_.resize(xs_.size());
  for (std::size_t m = 0; m < xs_.size(); ++m) {
    fs_[m] = model.f(xs_[m], c, k);
  }
  finish();
}

RegionFlux::RegionFlux(double c, double k, std::vector<double> xs,
                       std::vector<double> fs)
    : c_(c), k_(k), xs_(std::move(xs)), fs_(std::move(fs)) {
  if (xs_.size() < 2 || xs_.size() != fs_.size()) {
    throw PreconditionError("tabulated flux needs matching xs and fs");
  }
  finish();
}

void RegionFlux::finish() {
  slopes_.resize(xs_.size() - 1);
  for (std::size_t m = 0; m + 1 < xs_.size(); ++m) {
    if (!(xs_[m + 1] > xs_[m])) {
      throw PreconditionError("region grid must be strictly increasing");
    }
    slopes_[m] = (fs_[m + 1] - fs_[m]) / (xs_[m + 1] - xs_[m]);
  }
  convex_.clear();
  concave_.clear();
  for (std::size_t m = 1; m + 1 < xs_.size(); ++m) {
    // same orientation test as the envelope scan in the scalar solver
    double turn = (xs_[m] - xs_[m - 1]) * (fs_[m + 1] - fs_[m - 1]) -
                  (fs_[m] - fs_[m - 1]) * (xs_[m + 1] - xs_[m - 1]);
    if (turn > 0.0) convex_.push_back(static_cast<long>(m));
    if (turn < 0.0) concave_.push_back(static_cast<long>(m));
  }
  // Runs of candidates that form a convex chain among themselves (concave
  // for the second list), judged on the candidates alone.
  auto runs = [&](const std::vector<long>& v, double sign,
                  std::vector<long>& begin, std::vector<long>& end) {
    auto turn = [&](long o, long a, long p) {
      return sign * ((xs_[a] - xs_[o]) * (fs_[p] - fs_[o]) -
                     (fs_[a] - fs_[o]) * (xs_[p] - xs_[o]));
    };
    const long n = static_cast<long>(v.size());
    begin.resize(v.size());
    end.resize(v.size());
    for (long i = 0; i < n; ++i) {
      bool joins = i > 0 && (begin[i - 1] == i - 1 ||
                             turn(v[i - 2], v[i - 1], v[i]) > 0.0);
      begin[i] = joins ? begin[i - 1] : i;
    }
    for (long i = n - 1; i >= 0; --i) {
      end[i] = i + 1 < n && begin[i + 1] == begin[i] ? end[i + 1] : i;
    }
  };
  runs(convex_, 1.0, convex_begin_, convex_end_);
  runs(concave_, -1.0, concave_begin_, concave_end_);
}

std::size_t RegionFlux::segment(double s) const {
  auto it = std::upper_bound(xs_.begin(), xs_.end(), s);
  if (it == xs_.begin()) return 0;
  std::size_t m = static_cast<std::size_t>(it - xs_.begin()) - 1;
  return std::min(m, slopes_.size() - 1);
}

double RegionFlux::eval(double s) const {
  std::size_t m = segment(s);
  return fs_[m] + slopes_[m] * (s - xs_[m]);
}

double RegionFlux::slope_at(double s) const { return slopes_[segment(s)]; }

long RegionFlux::index_of(double s, double tol) const {
  auto it = std::lower_bound(xs_.begin(), xs_.end(), s);
  long best = -1;
  double dist = tol;
  if (it != xs_.end() && std::abs(*it - s) <= dist) {
    best = it - xs_.begin();
    dist = std::abs(*it - s);
  }
  if (it != xs_.begin() && std::abs(*(it - 1) - s) <= dist) {
    best = (it - xs_.begin()) - 1;
  }
  return best;
}

double RegionFlux::snap(double s, double tol) const {
  long m = index_of(s, tol);
  if (m < 0) {
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "state s=%.17g is off the grid of curve (%.6g, %.6g)", s,
                  c_, k_);
    throw PreconditionError(buf);
  }
  return xs_[m];
}

double RegionFlux::max_gap() const {
  double g = 0.0;
  for (std::size_t m = 0; m + 1 < xs_.size(); ++m) {
    g = std::max(g, xs_[m + 1] - xs_[m]);
  }
  return g;
}

InterpolationError interpolation_error(const RegionFlux& flux,
                                       const FluxModel& model, int n) {
  InterpolationError e;
  const auto& xs = flux.xs();
  for (int l = 0; l <= n; ++l) {
    double s = double(l) / n;
    e.value = std::max(e.value,
                       std::abs(model.f(s, flux.c(), flux.k()) - flux.eval(s)));
    std::size_t m = flux.segment(s);
    if (s > xs[m] && s < xs[m + 1]) {
      e.slope = std::max(e.slope, std::abs(model.df(s, flux.c(), flux.k()) -
                                           flux.slopes()[m]));
    }
  }
  return e;
}

// ---------------------------------------------------------------------------
// Construction

std::vector<std::pair<double, double>> find_crossings(
    const FluxModel& model, double cA, double kA, double cB, double kB,
    int scan) {
  const FluxFamily& fam = model.family();
  std::vector<std::pair<double, double>> out;
  if (fam.curve_key(cA, kA) == fam.curve_key(cB, kB)) return out;
  auto d = [&](double s) { return fam.g(s, cA, kA) - fam.g(s, cB, kB); };
  auto slope = [&](double s, double c, double k) {
    const double h = 1e-6;
    double lo = std::max(0.0, s - h), hi = std::min(1.0, s + h);
    return (fam.g(hi, c, k) - fam.g(lo, c, k)) / (hi - lo);
  };
  auto keep = [&](double r) {
    double sa = slope(r, cA, kA), sb = slope(r, cB, kB);
    if (std::abs(sa) > 1e-8 && std::abs(sb) > 1e-8 && (sa > 0) != (sb > 0)) {
      double lv = 0.5 * (fam.g(r, cA, kA) + fam.g(r, cB, kB));
      out.emplace_back(r, lv);
    }
  };
  double prev_s = 1.0 / scan;
  double prev = d(prev_s);
  if (prev == 0.0) keep(prev_s);
  for (int l = 2; l < scan; ++l) {
    double s = double(l) / scan;
    double v = d(s);
    if (v == 0.0) {
      keep(s);
    } else if (prev != 0.0 && (v > 0) != (prev > 0)) {
      double lo = prev_s, hi = s, flo = prev;
      while (hi - lo > 1e-12) {
        double mid = 0.5 * (lo + hi);
        double fm = d(mid);
        if (fm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((fm > 0) == (flo > 0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      keep(0.5 * (lo + hi));
    }
    prev = v;
    prev_s = s;
  }
  return out;
}

namespace {

std::vector<std::pair<double, double>> distinct_curves(
    const DiscretizedData& data) {
  std::set<double> cs(data.c_values.begin(), data.c_values.end());
  std::set<double> ks(data.k_values.begin(), data.k_values.end());
  std::vector<std::pair<double, double>> out;
  for (double c : cs) {
    for (double k : ks) out.emplace_back(c, k);
  }
  return out;
}

}  // namespace

ValueGrid build_G0(const DiscretizedData& data, const FluxModel& model) {
  const int N = data.N(), M = data.M();
  long L = build_L(data.eps, N, M, model);
  ValueGrid grid(data.eps, N, M, L);
  const FluxFamily& fam = model.family();

  for (const State& u : data.values) {
    grid.stage(model.g(u.s, u.c, u.k), kFromInitial);
    grid.add_anchor(u.c, u.k, u.s);
  }

  auto curves = distinct_curves(data);
  std::set<std::pair<double, double>> done;
  for (auto [c, k] : curves) {
    if (!done.insert(fam.curve_key(c, k)).second) continue;
    for (long l = 0; l <= L; ++l) {
      grid.stage(fam.g(double(l) / L, c, k), kFromGrid);
    }
    grid.stage(fam.argmax_g(c, k).second, kFromMaxima);
  }

  std::vector<std::pair<double, double>> reps;
  {
    std::set<std::pair<double, double>> seen;
    for (auto [c, k] : curves) {
      if (seen.insert(fam.curve_key(c, k)).second) reps.emplace_back(c, k);
    }
  }
  for (std::size_t a = 0; a < reps.size(); ++a) {
    for (std::size_t b = a + 1; b < reps.size(); ++b) {
      for (auto [s, lv] : find_crossings(model, reps[a].first,
                                         reps[a].second, reps[b].first,
                                         reps[b].second)) {
        (void)s;
        grid.stage(lv, kFromCrossing);
      }
    }
  }
  grid.commit();
  return grid;
}

std::vector<double> preimages(double level, double c, double k,
                              const FluxModel& model) {
  return model.g_preimages(level, c, k);
}

RegionFlux build_S(const ValueGrid& grid, double c, double k,
                   const FluxModel& model) {
  const FluxFamily& fam = model.family();
  struct Pt {
    double x;
    bool anchor;
  };
  std::vector<Pt> pts;
  const long L = grid.L();
  pts.reserve(static_cast<std::size_t>(L) + 2 * grid.size() + 8);
  for (long l = 0; l <= L; ++l) pts.push_back({double(l) / L, true});
  for (double s : grid.anchors(c, k)) pts.push_back({s, true});
  for (double lv : grid.levels()) {
    for (double r : fam.g_roots(lv, c, k)) {
      pts.push_back({std::clamp(r, 0.0, 1.0), false});
    }
  }
  std::sort(pts.begin(), pts.end(),
            [](const Pt& a, const Pt& b) { return a.x < b.x; });

  std::vector<double> xs;
  xs.reserve(pts.size());
  std::size_t n = 0;
  while (n < pts.size()) {
    std::size_t m = n;
    double start = pts[n].x;
    double rep = start;
    bool have_anchor = false;
    while (m < pts.size() && pts[m].x - start <= kSigmaMerge) {
      if (pts[m].anchor && !have_anchor) {
        rep = pts[m].x;
        have_anchor = true;
      }
      ++m;
    }
    xs.push_back(rep);
    n = m;
  }
  // 0 and 1 are anchors (l = 0 and l = L) and sit at the ends
  xs.front() = 0.0;
  xs.back() = 1.0;

  RegionFlux flux(c, k, std::move(xs), model);
  if (flux.max_gap() > 1.0 / L + 1e-12) {
    throw InvariantViolation("saturation grid mesh exceeds 1/L");
  }
  InterpolationError e = interpolation_error(flux, model, 1000);
  if (e.value > grid.eps() || e.slope > grid.eps() / grid.NM()) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "interpolation estimate violated on (%.6g, %.6g): "
                  "value %.3g slope %.3g",
                  c, k, e.value, e.slope);
    throw InvariantViolation(buf);
  }
  return flux;
}

ValueGrid extend_grid(const ValueGrid& grid, const std::vector<State>& states,
                      const FluxModel& model) {
  ValueGrid out = grid;
  for (const State& u : states) {
    out.stage(model.g(u.s, u.c, u.k), kFromExtension);
    out.add_anchor(u.c, u.k, u.s);
  }
  out.commit();
  return out;
}

// ---------------------------------------------------------------------------

StripGrids::StripGrids(std::shared_ptr<const ValueGrid> grid, double k,
                       FluxModel model)
    : grid_(std::move(grid)), k_(k), model_(std::move(model)) {}

const RegionFlux& StripGrids::flux(double c) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = cache_.find(c);
  if (it == cache_.end()) {
    auto f = std::make_unique<RegionFlux>(build_S(*grid_, c, k_, model_));
    it = cache_.emplace(c, std::move(f)).first;
  }
  return *it->second;
}

}  // namespace polyfront
