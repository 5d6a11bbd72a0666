#ifndef POLYFRONT_PROFILE_HPP_
#define POLYFRONT_PROFILE_HPP_

#include <cstdint>
#include <utility>
#include <vector>

#include "polyfront/state.hpp"

namespace polyfront {

// A scalar initial profile on the real line. Piecewise-constant profiles are
// right-continuous; analytic ones are constant outside active().
class Profile {
 public:
  enum class Kind { kConstant, kPiecewise, kRamp, kBump };

  static Profile constant(double v);
  // values.size() == breaks.size() + 1, breaks strictly increasing.
  static Profile piecewise(std::vector<double> breaks,
                           std::vector<double> values);
  // Linear from v0 at x0 to v1 at x1, constant outside.
  static Profile ramp(double x0, double x1, double v0, double v1);
  // base + (peak - base) cos^2 bump of half-width w around center.
  static Profile bump(double center, double w, double base, double peak);
  // Piecewise constant with `jumps` uniform break points in [xmin, xmax] and
  // values drawn from palette; adjacent values always differ.
  static Profile random_piecewise(std::uint64_t seed, int jumps, double xmin,
                                  double xmax,
                                  const std::vector<double>& palette);

  Kind kind() const { return kind_; }
  bool is_piecewise_constant() const {
    return kind_ == Kind::kConstant || kind_ == Kind::kPiecewise;
  }
  double operator()(double x) const;
  // Interval outside which the profile is constant.
  std::pair<double, double> active() const;
  double total_variation() const;
  double min_value() const;
  double max_value() const;
  // Largest |slope| of an analytic profile (0 for piecewise constant).
  double lipschitz() const;

  const std::vector<double>& breaks() const { return breaks_; }
  const std::vector<double>& values() const { return values_; }
  // Analytic parameters: (x0, x1, v0, v1) for ramps, (center, w, base, peak)
  // for bumps.
  const std::vector<double>& params() const { return params_; }

 private:
  Kind kind_ = Kind::kConstant;
  std::vector<double> breaks_;
  std::vector<double> values_;
  std::vector<double> params_;
};

struct InitialData {
  Profile s = Profile::constant(0.0);
  Profile c = Profile::constant(0.0);
  Profile k = Profile::constant(0.0);
};

// Piecewise-constant approximate initial data. Cell m is
// (breaks[m-1], breaks[m]) with breaks[-1] = -inf, breaks[n] = +inf.
struct DiscretizedData {
  double eps = 0.1;
  std::vector<double> breaks;
  std::vector<State> values;
  std::vector<double> k_jumps;   // ascending
  std::vector<double> c_jumps;   // ascending
  std::vector<double> k_values;  // k on each strip, k_jumps.size() + 1
  std::vector<double> c_values;  // c on each c-interval, c_jumps.size() + 1

  int N() const { return static_cast<int>(k_jumps.size()); }
  int M() const { return static_cast<int>(c_jumps.size()); }
  // Right-continuous value at x.
  State at(double x) const;
  std::size_t cell_of(double x) const;
  int strip_of(double x) const;
  int c_interval_of(double x) const;
  double tv_c() const;
  double tv_k() const;
  // Build from cell data; merges equal neighbours and fills the jump sets.
  static DiscretizedData from_cells(double eps, std::vector<double> breaks,
                                    std::vector<State> values);
};

struct DiscretizeOptions {
  // Data outside [window.first, window.second] is extended by constants.
  // Empty (first >= second) means (-1/eps, 1/eps).
  std::pair<double, double> window{0.0, 0.0};
  // Shift applied to c-jumps that coincide with k-jumps; <= 0 means
  // 1e-9 * window width.
  double delta = 0.0;
};

// Piecewise-constant data with |c - c_eps|, |k - k_eps| < eps (sup) and
// ||s - s_eps||_L1 <= eps on the window. Piecewise-constant inputs are
// reproduced exactly.
DiscretizedData discretize_initial(const Profile& s, const Profile& c,
                                   const Profile& k, double eps,
                                   const DiscretizeOptions& opt = {});

// L1 distance of s and its discretization on [a, b].
double l1_error_s(const Profile& s, const DiscretizedData& d, double a,
                  double b);

}  // namespace polyfront

#endif  // POLYFRONT_PROFILE_HPP_
