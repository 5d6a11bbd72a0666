#include "polyfront/profile.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "polyfront/errors.hpp"

namespace polyfront {

Profile Profile::constant(double v) {
  Profile p;
  p.kind_ = Kind::kConstant;
  p.values_ = {v};
  return p;
}

Profile Profile::piecewise(std::vector<double> breaks,
                           std::vector<double> values) {
  if (values.size() != breaks.size() + 1) {
    throw ConfigError("piecewise profile needs one more value than breaks");
  }
  for (std::size_t n = 1; n < breaks.size(); ++n) {
    if (!(breaks[n] > breaks[n - 1])) {
      throw ConfigError("piecewise profile breaks must increase strictly");
    }
  }
  Profile p;
  p.kind_ = Kind::kPiecewise;
  p.breaks_ = std::move(breaks);
  p.values_ = std::move(values);
  return p;
}

Profile Profile::ramp(double x0, double x1, double v0, double v1) {
  if (!(x1 > x0)) throw ConfigError("ramp profile needs x0 < x1");
  Profile p;
  p.kind_ = Kind::kRamp;
  p.params_ = {x0, x1, v0, v1};
  return p;
}

Profile Profile::bump(double center, double w, double base, double peak) {
  if (!(w > 0)) throw ConfigError("bump profile needs a positive width");
  Profile p;
  p.kind_ = Kind::kBump;
  p.params_ = {center, w, base, peak};
  return p;
}

Profile Profile::random_piecewise(std::uint64_t seed, int jumps, double xmin,
                                  double xmax,
                                  const std::vector<double>& palette) {
  if (palette.size() < 2 || jumps < 0 || !(xmax > xmin)) {
    throw ConfigError("random profile needs >= 2 palette values and a range");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(xmin, xmax);
  std::vector<double> breaks;
  while (static_cast<int>(breaks.size()) < jumps) {
    double x = pos(rng);
    bool clash = false;
    for (double b : breaks) clash |= std::abs(b - x) < 1e-6 * (xmax - xmin);
    if (!clash) breaks.push_back(x);
  }
  std::sort(breaks.begin(), breaks.end());
  std::uniform_int_distribution<std::size_t> pick(0, palette.size() - 1);
  std::vector<double> values;
  values.push_back(palette[pick(rng)]);
  for (int n = 0; n < jumps; ++n) {
    double v;
    do {
      v = palette[pick(rng)];
    } while (v == values.back());
    values.push_back(v);
  }
  return piecewise(std::move(breaks), std::move(values));
}

double Profile::operator()(double x) const {
  switch (kind_) {
    case Kind::kConstant:
      return values_[0];
    case Kind::kPiecewise: {
      auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
      return values_[it - breaks_.begin()];
    }
    case Kind::kRamp: {
      double x0 = params_[0], x1 = params_[1];
      if (x <= x0) return params_[2];
      if (x >= x1) return params_[3];
      return params_[2] + (params_[3] - params_[2]) * (x - x0) / (x1 - x0);
    }
    case Kind::kBump: {
      double d = x - params_[0], w = params_[1];
      if (std::abs(d) >= w) return params_[2];
      double cs = std::cos(std::numbers::pi * d / (2.0 * w));
      return params_[2] + (params_[3] - params_[2]) * cs * cs;
    }
  }
  return 0.0;
}

std::pair<double, double> Profile::active() const {
  switch (kind_) {
    case Kind::kConstant:
      return {0.0, 0.0};
    case Kind::kPiecewise:
      if (breaks_.empty()) return {0.0, 0.0};
      return {breaks_.front(), breaks_.back()};
    case Kind::kRamp:
      return {params_[0], params_[1]};
    case Kind::kBump:
      return {params_[0] - params_[1], params_[0] + params_[1]};
  }
  return {0.0, 0.0};
}

double Profile::total_variation() const {
  switch (kind_) {
    case Kind::kConstant:
      return 0.0;
    case Kind::kPiecewise: {
      double tv = 0.0;
      for (std::size_t n = 1; n < values_.size(); ++n) {
        tv += std::abs(values_[n] - values_[n - 1]);
      }
      return tv;
    }
    case Kind::kRamp:
      return std::abs(params_[3] - params_[2]);
    case Kind::kBump:
      return 2.0 * std::abs(params_[3] - params_[2]);
  }
  return 0.0;
}

double Profile::min_value() const {
  if (kind_ == Kind::kRamp || kind_ == Kind::kBump) {
    return std::min(params_[2], params_[3]);
  }
  return *std::min_element(values_.begin(), values_.end());
}

double Profile::max_value() const {
  if (kind_ == Kind::kRamp || kind_ == Kind::kBump) {
    return std::max(params_[2], params_[3]);
  }
  return *std::max_element(values_.begin(), values_.end());
}

double Profile::lipschitz() const {
  switch (kind_) {
    case Kind::kRamp:
      return std::abs(params_[3] - params_[2]) / (params_[1] - params_[0]);
    case Kind::kBump:
      return std::abs(params_[3] - params_[2]) * std::numbers::pi /
             (2.0 * params_[1]);
    default:
      return 0.0;
  }
}

// ---------------------------------------------------------------------------
// DiscretizedData

std::size_t DiscretizedData::cell_of(double x) const {
  return static_cast<std::size_t>(
      std::upper_bound(breaks.begin(), breaks.end(), x) - breaks.begin());
}

State DiscretizedData::at(double x) const { return values[cell_of(x)]; }

int DiscretizedData::strip_of(double x) const {
  return static_cast<int>(
      std::upper_bound(k_jumps.begin(), k_jumps.end(), x) - k_jumps.begin());
}

int DiscretizedData::c_interval_of(double x) const {
  return static_cast<int>(
      std::upper_bound(c_jumps.begin(), c_jumps.end(), x) - c_jumps.begin());
}

double DiscretizedData::tv_c() const {
  double tv = 0.0;
  for (std::size_t n = 1; n < c_values.size(); ++n) {
    tv += std::abs(c_values[n] - c_values[n - 1]);
  }
  return tv;
}

double DiscretizedData::tv_k() const {
  double tv = 0.0;
  for (std::size_t n = 1; n < k_values.size(); ++n) {
    tv += std::abs(k_values[n] - k_values[n - 1]);
  }
  return tv;
}

DiscretizedData DiscretizedData::from_cells(double eps,
                                            std::vector<double> breaks,
                                            std::vector<State> values) {
  if (values.size() != breaks.size() + 1) {
    throw PreconditionError("cell data needs one more value than breaks");
  }
  DiscretizedData d;
  d.eps = eps;
  for (const State& u : values) {
    if (!in_unit_cube(u)) {
      throw DomainError("initial state outside [0,1]^3: " + to_string(u));
    }
  }
  d.values.push_back(values[0]);
  for (std::size_t n = 0; n < breaks.size(); ++n) {
    if (n > 0 && !(breaks[n] > breaks[n - 1])) {
      throw PreconditionError("cell breaks must increase strictly");
    }
    if (values[n + 1] == d.values.back()) continue;
    d.breaks.push_back(breaks[n]);
    d.values.push_back(values[n + 1]);
  }
  d.k_values.push_back(d.values[0].k);
  d.c_values.push_back(d.values[0].c);
  for (std::size_t n = 0; n < d.breaks.size(); ++n) {
    if (d.values[n + 1].k != d.values[n].k) {
      d.k_jumps.push_back(d.breaks[n]);
      d.k_values.push_back(d.values[n + 1].k);
    }
    if (d.values[n + 1].c != d.values[n].c) {
      d.c_jumps.push_back(d.breaks[n]);
      d.c_values.push_back(d.values[n + 1].c);
    }
  }
  return d;
}

// ---------------------------------------------------------------------------
// Discretization

namespace {

struct Steps {
  std::vector<double> breaks;
  std::vector<double> values;

  double at(double x) const {
    auto it = std::upper_bound(breaks.begin(), breaks.end(), x);
    return values[it - breaks.begin()];
  }
};

void check_range(const Profile& p, const char* what) {
  if (p.min_value() < 0.0 || p.max_value() > 1.0) {
    throw DomainError(std::string(what) + " profile leaves [0,1]");
  }
}

// Midpoint sampling with sup error below eps.
Steps sample_sup(const Profile& p, double eps) {
  if (p.is_piecewise_constant()) return {p.breaks(), p.values()};
  auto [a, b] = p.active();
  double lip = p.lipschitz();
  long n = static_cast<long>(std::ceil((b - a) * lip / eps)) + 1;
  double h = (b - a) / n;
  Steps st;
  st.values.push_back(p(a));
  for (long m = 0; m < n; ++m) {
    double x = a + m * h;
    double v = p(x + 0.5 * h);
    if (v != st.values.back()) {
      st.breaks.push_back(x);
      st.values.push_back(v);
    }
  }
  if (p(b) != st.values.back()) {
    st.breaks.push_back(b);
    st.values.push_back(p(b));
  }
  return st;
}

double simpson_abs(const Profile& p, double v, double a, double b, int n) {
  double h = (b - a) / n, sum = 0.0;
  for (int m = 0; m <= n; ++m) {
    double w = (m == 0 || m == n) ? 1.0 : (m % 2 ? 4.0 : 2.0);
    sum += w * std::abs(p(a + m * h) - v);
  }
  return sum * h / 3.0;
}

// Left-endpoint sampling on cells aligned with the window start.
Steps sample_l1(const Profile& p, double eps, double w0) {
  if (p.is_piecewise_constant()) return {p.breaks(), p.values()};
  auto [a, b] = p.active();
  for (double h = eps;; h *= 0.5) {
    long m0 = static_cast<long>(std::floor((a - w0) / h));
    Steps st;
    long m = m0;
    double x = w0 + m * h;
    st.values.push_back(p(x));
    double err = 0.0;
    for (; x < b; x = w0 + (++m) * h) {
      double v = p(x);
      if (v != st.values.back()) {
        st.breaks.push_back(x);
        st.values.push_back(v);
      }
      err += simpson_abs(p, v, x, x + h, 8);
    }
    if (p(b) != st.values.back()) {
      st.breaks.push_back(x);
      st.values.push_back(p(b));
    }
    if (err <= eps || h < 1e-9) return st;
  }
}

}  // namespace

DiscretizedData discretize_initial(const Profile& s, const Profile& c,
                                   const Profile& k, double eps,
                                   const DiscretizeOptions& opt) {
  if (!(eps > 0.0)) throw PreconditionError("eps must be positive");
  check_range(s, "s");
  check_range(c, "c");
  check_range(k, "k");
  auto win = opt.window;
  if (!(win.second > win.first)) win = {-1.0 / eps, 1.0 / eps};
  double delta = opt.delta > 0 ? opt.delta : 1e-9 * (win.second - win.first);

  Steps ks = sample_sup(k, eps);
  Steps cs = sample_sup(c, eps);
  Steps ss = sample_l1(s, eps, win.first);

  // keep c-jumps off the k-jump abscissas
  for (double& y : cs.breaks) {
    for (double x : ks.breaks) {
      if (std::abs(y - x) <= delta) y = x + delta;
    }
  }
  for (std::size_t n = 1; n < cs.breaks.size(); ++n) {
    if (!(cs.breaks[n] > cs.breaks[n - 1])) {
      throw PreconditionError("c jumps collapse after the k-jump shift");
    }
  }

  std::vector<double> all;
  all.insert(all.end(), ks.breaks.begin(), ks.breaks.end());
  all.insert(all.end(), cs.breaks.begin(), cs.breaks.end());
  all.insert(all.end(), ss.breaks.begin(), ss.breaks.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());

  std::vector<State> vals;
  vals.reserve(all.size() + 1);
  auto eval = [&](double x) {
    return State{ss.at(x), cs.at(x), ks.at(x)};
  };
  if (all.empty()) {
    vals.push_back(eval(0.0));
  } else {
    vals.push_back(eval(all.front() - 1.0));
    for (std::size_t n = 0; n < all.size(); ++n) {
      double x = n + 1 < all.size() ? 0.5 * (all[n] + all[n + 1])
                                    : all[n] + 1.0;
      vals.push_back(eval(x));
    }
  }
  return DiscretizedData::from_cells(eps, std::move(all), std::move(vals));
}

double l1_error_s(const Profile& s, const DiscretizedData& d, double a,
                  double b) {
  std::vector<double> pts{a};
  for (double x : d.breaks) {
    if (x > a && x < b) pts.push_back(x);
  }
  pts.push_back(b);
  double err = 0.0;
  for (std::size_t n = 0; n + 1 < pts.size(); ++n) {
    double lo = pts[n], hi = pts[n + 1];
    double v = d.at(0.5 * (lo + hi)).s;
    int m = std::max(2, 2 * static_cast<int>(std::ceil((hi - lo) * 64)));
    err += simpson_abs(s, v, lo, hi, m);
  }
  return err;
}

}  // namespace polyfront
