#include "polyfront/flux.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <optional>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "polyfront/errors.hpp"

namespace polyfront {

namespace {

constexpr double kRootTol = 1e-15;
// Levels this close to g_max collapse onto the maximum.
constexpr double kLevelSnap = 1e-11;

void check_unit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s=%.17g outside [0,1]", what, v);
    throw DomainError(buf);
  }
}

void check_args(double s, double c, double k) {
  check_unit(s, "sigma");
  check_unit(c, "gamma");
  check_unit(k, "kappa");
}

// Root of a monotone function on [lo, hi] with sign change.
template <class F>
double bisect(F&& fn, double lo, double hi) {
  double flo = fn(lo);
  for (int it = 0; it < 200 && hi - lo > kRootTol; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = fn(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

// ---------------------------------------------------------------------------
// FluxFamily fallbacks

double FluxFamily::dfdc(double s, double c, double k) const {
  const double h = 1e-6;
  double lo = std::max(0.0, c - h), hi = std::min(1.0, c + h);
  return (f(s, hi, k) - f(s, lo, k)) / (hi - lo);
}

double FluxFamily::dfdk(double s, double c, double k) const {
  const double h = 1e-6;
  double lo = std::max(0.0, k - h), hi = std::min(1.0, k + h);
  return (f(s, c, hi) - f(s, c, lo)) / (hi - lo);
}

double FluxFamily::g(double s, double c, double k) const {
  if (s == 0.0) return 0.0;
  return f(s, c, k) / s;
}

double FluxFamily::dg(double s, double c, double k) const {
  if (s == 0.0) return 0.5 * d2f(0.0, c, k);
  return (s * df(s, c, k) - f(s, c, k)) / (s * s);
}

std::pair<double, double> FluxFamily::argmax_g(double c, double k) const {
  double x = bisect([&](double s) { return dg(s, c, k); }, 1e-12, 1.0);
  return {x, g(x, c, k)};
}

std::vector<double> FluxFamily::g_roots(double level, double c,
                                        double k) const {
  auto [smax, gmax] = argmax_g(c, k);
  if (level <= 0.0) return {0.0};
  if (std::abs(level - gmax) <= kLevelSnap) return {smax};
  if (level > gmax) return {};
  auto h = [&](double s) { return g(s, c, k) - level; };
  std::vector<double> out;
  out.push_back(bisect(h, 0.0, smax));
  if (level == 1.0) {
    out.push_back(1.0);
  } else if (level > 1.0) {
    out.push_back(bisect(h, smax, 1.0));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Corey

CoreyFamily::CoreyFamily(double a0, double a_kappa)
    : a0_(a0), a_kappa_(a_kappa) {
  double amin = a0 - std::max(a_kappa, 0.0) * 0.25;
  double amax = a0 - std::min(a_kappa, 0.0) * 0.25;
  if (!(amin > 0.0) || !std::isfinite(amax)) {
    throw ModelViolation("corey: mobility ratio must stay positive");
  }
}

double CoreyFamily::f_a(double s, double a) {
  double r = 1.0 - s;
  return s * s / (s * s + a * r * r);
}

double CoreyFamily::g_a(double s, double a) {
  double r = 1.0 - s;
  return s / (s * s + a * r * r);
}

double CoreyFamily::f(double s, double c, double k) const {
  return f_a(s, a(c, k));
}

double CoreyFamily::df(double s, double c, double k) const {
  double aa = a(c, k), r = 1.0 - s;
  double d = s * s + aa * r * r;
  return 2.0 * aa * s * r / (d * d);
}

double CoreyFamily::d2f(double s, double c, double k) const {
  double aa = a(c, k), r = 1.0 - s;
  double d = s * s + aa * r * r;
  double n = 2.0 * aa * s * r;
  double dn = 2.0 * aa * (1.0 - 2.0 * s);
  double dd = 2.0 * s - 2.0 * aa * r;
  return (dn * d - 2.0 * n * dd) / (d * d * d);
}

double CoreyFamily::dfdc(double s, double c, double k) const {
  double aa = a(c, k), r = 1.0 - s;
  double d = s * s + aa * r * r;
  double dfda = -s * s * r * r / (d * d);
  return dfda * (-a_kappa_ * k * 2.0 * (c - 0.5));
}

double CoreyFamily::dfdk(double s, double c, double k) const {
  double aa = a(c, k), r = 1.0 - s;
  double d = s * s + aa * r * r;
  double dfda = -s * s * r * r / (d * d);
  return dfda * (-a_kappa_ * (c - 0.5) * (c - 0.5));
}

double CoreyFamily::g(double s, double c, double k) const {
  return g_a(s, a(c, k));
}

double CoreyFamily::dg(double s, double c, double k) const {
  double aa = a(c, k), r = 1.0 - s;
  double d = s * s + aa * r * r;
  return (aa - (1.0 + aa) * s * s) / (d * d);
}

std::pair<double, double> CoreyFamily::argmax_g(double c, double k) const {
  double aa = a(c, k);
  double s = std::sqrt(aa / (1.0 + aa));
  return {s, g_a(s, aa)};
}

std::vector<double> CoreyFamily::g_roots_a(double level, double aa) {
  double smax = std::sqrt(aa / (1.0 + aa));
  double gmax = g_a(smax, aa);
  if (level <= 0.0) return {0.0};
  if (std::abs(level - gmax) <= kLevelSnap) return {smax};
  if (level > gmax) return {};
  // level (1+a) s^2 - (2 a level + 1) s + a level = 0
  double disc = 1.0 + 4.0 * aa * level * (1.0 - level);
  if (disc < 0.0) disc = 0.0;
  double q = 0.5 * ((2.0 * aa * level + 1.0) + std::sqrt(disc));
  auto polish = [&](double s, double lo, double hi) {
    double r = 1.0 - s;
    double d = s * s + aa * r * r;
    double gp = (aa - (1.0 + aa) * s * s) / (d * d);
    if (std::abs(gp) > 1e-3) {
      double t = s - (g_a(s, aa) - level) / gp;
      if (t >= lo && t <= hi &&
          std::abs(g_a(t, aa) - level) < std::abs(g_a(s, aa) - level)) {
        return t;
      }
    }
    return s;
  };
  std::vector<double> out;
  double small = std::min(aa * level / q, smax);
  out.push_back(polish(small, 0.0, smax));
  if (level == 1.0) {
    out.push_back(1.0);
  } else if (level > 1.0) {
    double large = std::clamp(q / (level * (1.0 + aa)), smax, 1.0);
    out.push_back(polish(large, smax, 1.0));
  }
  return out;
}

std::vector<double> CoreyFamily::g_roots(double level, double c,
                                         double k) const {
  return g_roots_a(level, a(c, k));
}

// ---------------------------------------------------------------------------
// Validation

void validate_family(const FluxFamily& fam, int n) {
  char buf[160];
  auto fail = [&](const char* what, double c, double k) {
    std::snprintf(buf, sizeof buf, "%s: %s at gamma=%.6g kappa=%.6g",
                  fam.name().c_str(), what, c, k);
    throw ModelViolation(buf);
  };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double c = n == 1 ? 0.5 : double(i) / (n - 1);
      double k = n == 1 ? 0.5 : double(j) / (n - 1);
      if (std::abs(fam.f(0, c, k)) > 1e-10) fail("f(0) != 0", c, k);
      if (std::abs(1 - fam.f(1, c, k)) > 1e-10) fail("f(1) != 1", c, k);
      if (std::abs(fam.df(0, c, k)) > 1e-7) fail("f'(0) != 0", c, k);
      if (std::abs(fam.df(1, c, k)) > 1e-7) fail("f'(1) != 0", c, k);
      if (!(fam.d2f(0, c, k) > 0)) fail("f''(0) <= 0", c, k);
      if (!(fam.d2f(1, c, k) < 0)) fail("f''(1) >= 0", c, k);
      const int m = 1000;
      int sign_changes = 0;
      int last = 1;
      double gprev = fam.g(0, c, k);
      int f2_changes = 0;
      int f2_last = 1;
      for (int l = 1; l <= m; ++l) {
        double s = double(l) / m;
        if (fam.df(s, c, k) < -1e-12) fail("f' < 0", c, k);
        double gv = fam.g(s, c, k);
        double d = gv - gprev;
        gprev = gv;
        if (std::abs(d) > 1e-15) {
          int sg = d > 0 ? 1 : -1;
          if (sg != last) ++sign_changes;
          last = sg;
        }
        if (l < m) {
          double f2 = fam.d2f(s, c, k);
          if (std::abs(f2) > 1e-12) {
            int sg = f2 > 0 ? 1 : -1;
            if (sg != f2_last) ++f2_changes;
            f2_last = sg;
          }
        }
      }
      if (sign_changes != 1) fail("g is not unimodal", c, k);
      if (f2_changes != 1) fail("f'' changes sign more than once", c, k);
    }
  }
}

// ---------------------------------------------------------------------------
// FluxModel

struct FluxModel::Cache {
  std::mutex mu;
  SupSampling sampling;
  std::optional<double> c2;
  std::optional<double> max_df;
  std::optional<double> lip;
};

FluxModel::FluxModel(std::shared_ptr<const FluxFamily> family)
    : family_(std::move(family)), cache_(std::make_shared<Cache>()) {
  if (!family_) throw ModelViolation("null flux family");
  validate_family(*family_);
}

FluxModel FluxModel::corey(double a0, double a_kappa) {
  return FluxModel(std::make_shared<CoreyFamily>(a0, a_kappa));
}

double FluxModel::f(double s, double c, double k) const {
  check_args(s, c, k);
  return std::clamp(family_->f(s, c, k), 0.0, 1.0);
}

double FluxModel::df(double s, double c, double k) const {
  check_args(s, c, k);
  return family_->df(s, c, k);
}

double FluxModel::d2f(double s, double c, double k) const {
  check_args(s, c, k);
  return family_->d2f(s, c, k);
}

double FluxModel::g(double s, double c, double k) const {
  check_args(s, c, k);
  return family_->g(s, c, k);
}

double FluxModel::dg(double s, double c, double k) const {
  check_args(s, c, k);
  return family_->dg(s, c, k);
}

double FluxModel::P(double s, double c, double k) const {
  check_args(s, c, k);
  if (s == 0.0) return 0.0;
  double smax = family_->argmax_g(c, k).first;
  using boost::math::quadrature::gauss_kronrod;
  auto absdg = [&](double x) { return std::abs(family_->dg(x, c, k)); };
  double hi = std::min(s, smax);
  double p = gauss_kronrod<double, 31>::integrate(absdg, 0.0, hi, 15, 1e-10);
  if (s > smax) {
    p += gauss_kronrod<double, 31>::integrate(absdg, smax, s, 15, 1e-10);
  }
  return p;
}

GMax FluxModel::argmax_g(double c, double k) const {
  check_unit(c, "gamma");
  check_unit(k, "kappa");
  auto [s, v] = family_->argmax_g(c, k);
  return {s, v};
}

double FluxModel::inflection(double c, double k) const {
  check_unit(c, "gamma");
  check_unit(k, "kappa");
  auto h = [&](double s) { return family_->d2f(s, c, k); };
  // Locate the bracket on a coarse scan; more than one change is a violation.
  const int m = 1000;
  int changes = 0;
  double lo = 0.0, hi = 1.0;
  // zeros on the scan grid are skipped; a change is counted between
  // consecutive nonzero samples of opposite sign
  double prev = h(0.0), prev_s = 0.0;
  for (int l = 1; l <= m; ++l) {
    double s = double(l) / m;
    double v = h(s);
    if (v == 0.0) continue;
    if (prev != 0.0 && (prev > 0) != (v > 0)) {
      ++changes;
      lo = prev_s;
      hi = s;
    }
    prev = v;
    prev_s = s;
  }
  if (changes != 1) {
    throw ModelViolation("f'' has no single sign change on [0,1]");
  }
  if (h(hi) == 0.0) return hi;
  return bisect(h, lo, hi);
}

CharacteristicSpeeds FluxModel::characteristic_speeds(double s, double c,
                                                      double k) const {
  check_args(s, c, k);
  return {family_->df(s, c, k), family_->g(s, c, k), 0.0};
}

std::vector<double> FluxModel::g_preimages(double level, double c,
                                           double k) const {
  check_unit(c, "gamma");
  check_unit(k, "kappa");
  if (!(level >= 0.0)) throw DomainError("negative g level");
  return family_->g_roots(level, c, k);
}

void FluxModel::set_sup_sampling(SupSampling s) {
  std::lock_guard<std::mutex> lock(cache_->mu);
  cache_->sampling = s;
  cache_->c2.reset();
  cache_->max_df.reset();
}

double FluxModel::c2_sup() const {
  std::lock_guard<std::mutex> lock(cache_->mu);
  if (!cache_->c2) {
    const int nck = cache_->sampling.ck, ns = cache_->sampling.sigma;
    double m0 = 0, m1 = 0, m2 = 0;
    for (int i = 0; i < nck; ++i) {
      double c = double(i) / (nck - 1);
      for (int j = 0; j < nck; ++j) {
        double k = double(j) / (nck - 1);
        for (int l = 0; l < ns; ++l) {
          double s = double(l) / (ns - 1);
          m0 = std::max(m0, std::abs(family_->f(s, c, k)));
          m1 = std::max(m1, std::abs(family_->df(s, c, k)));
          m2 = std::max(m2, std::abs(family_->d2f(s, c, k)));
        }
      }
    }
    cache_->c2 = 1.1 * std::max({m0, m1, m2});
    cache_->max_df = m1;
  }
  return *cache_->c2;
}

double FluxModel::max_speed() const {
  c2_sup();
  std::lock_guard<std::mutex> lock(cache_->mu);
  return *cache_->max_df;
}

double FluxModel::lipschitz_ck() const {
  std::lock_guard<std::mutex> lock(cache_->mu);
  if (!cache_->lip) {
    const int nck = 51, ns = 201;
    double m = 0;
    for (int i = 0; i < nck; ++i) {
      double c = double(i) / (nck - 1);
      for (int j = 0; j < nck; ++j) {
        double k = double(j) / (nck - 1);
        for (int l = 0; l < ns; ++l) {
          double s = double(l) / (ns - 1);
          m = std::max(m, std::abs(family_->dfdc(s, c, k)) +
                              std::abs(family_->dfdk(s, c, k)));
        }
      }
    }
    cache_->lip = m;
  }
  return *cache_->lip;
}

// ---------------------------------------------------------------------------

bool in_unit_cube(const State& u, double tol) {
  auto ok = [tol](double v) { return v >= -tol && v <= 1.0 + tol; };
  return ok(u.s) && ok(u.c) && ok(u.k);
}

std::string to_string(const State& u) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "(%.17g, %.17g, %.17g)", u.s, u.c, u.k);
  return buf;
}

}  // namespace polyfront
