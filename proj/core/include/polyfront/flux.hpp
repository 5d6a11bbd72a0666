#ifndef POLYFRONT_FLUX_HPP_
#define POLYFRONT_FLUX_HPP_

#include <memory>
#include <string>
#include <vector>

#include "polyfront/state.hpp"

namespace polyfront {

// A family of S-shaped fractional-flow curves sigma -> f(sigma, gamma, kappa).
// Implementations provide f and its sigma-derivatives; the remaining hooks
// have generic fallbacks that closed-form families can override.
class FluxFamily {
 public:
  virtual ~FluxFamily() = default;

  virtual std::string name() const = 0;
  virtual double f(double s, double c, double k) const = 0;
  virtual double df(double s, double c, double k) const = 0;
  virtual double d2f(double s, double c, double k) const = 0;

  // Partial derivatives in gamma and kappa. Fallback: central differences.
  virtual double dfdc(double s, double c, double k) const;
  virtual double dfdk(double s, double c, double k) const;

  // g = f / sigma, extended by g(0) = 0.
  virtual double g(double s, double c, double k) const;
  virtual double dg(double s, double c, double k) const;

  // Location and value of the single interior maximum of g.
  virtual std::pair<double, double> argmax_g(double c, double k) const;

  // Solutions of g(sigma) = level in [0,1], ascending, at most two.
  virtual std::vector<double> g_roots(double level, double c,
                                      double k) const;

  // Two curves with the same key are identical. Families that depend on
  // (gamma, kappa) through a scalar parameter return it here; the default
  // returns a key that distinguishes every (c, k) pair.
  virtual std::pair<double, double> curve_key(double c, double k) const {
    return {c, k};
  }
};

// f = s^2 / (s^2 + a (1 - s)^2), a(c, k) = a0 - a_kappa * k * (c - 1/2)^2.
class CoreyFamily : public FluxFamily {
 public:
  explicit CoreyFamily(double a0 = 1.0, double a_kappa = 0.25);

  double a(double c, double k) const {
    double d = c - 0.5;
    return a0_ - a_kappa_ * k * d * d;
  }
  double a0() const { return a0_; }
  double a_kappa() const { return a_kappa_; }

  std::string name() const override { return "corey"; }
  double f(double s, double c, double k) const override;
  double df(double s, double c, double k) const override;
  double d2f(double s, double c, double k) const override;
  double dfdc(double s, double c, double k) const override;
  double dfdk(double s, double c, double k) const override;
  double g(double s, double c, double k) const override;
  double dg(double s, double c, double k) const override;
  std::pair<double, double> argmax_g(double c, double k) const override;
  std::vector<double> g_roots(double level, double c,
                              double k) const override;
  std::pair<double, double> curve_key(double c, double k) const override {
    return {a(c, k), 0.0};
  }

  // Same quantities for a given mobility ratio.
  static double f_a(double s, double a);
  static double g_a(double s, double a);
  static std::vector<double> g_roots_a(double level, double a);

 private:
  double a0_;
  double a_kappa_;
};

struct CharacteristicSpeeds {
  double lambda_s = 0.0;
  double lambda_c = 0.0;
  double lambda_k = 0.0;
};

struct GMax {
  double sigma = 0.0;
  double value = 0.0;
};

// Validated, range-checked front end to a flux family. Copies share the
// family and the lazily computed sup-norm caches.
class FluxModel {
 public:
  // Throws ModelViolation if the family breaks the S-shape conditions.
  explicit FluxModel(std::shared_ptr<const FluxFamily> family);

  static FluxModel corey(double a0 = 1.0, double a_kappa = 0.25);

  const FluxFamily& family() const { return *family_; }
  std::shared_ptr<const FluxFamily> family_ptr() const { return family_; }

  double f(double s, double c, double k) const;
  double df(double s, double c, double k) const;
  double d2f(double s, double c, double k) const;
  double g(double s, double c, double k) const;
  double dg(double s, double c, double k) const;
  double P(double s, double c, double k) const;
  GMax argmax_g(double c, double k) const;
  double inflection(double c, double k) const;
  CharacteristicSpeeds characteristic_speeds(double s, double c,
                                             double k) const;
  std::vector<double> g_preimages(double level, double c, double k) const;

  // Sampled sup over (c, k) of the C^2 norm of f(., c, k), times 1.1.
  double c2_sup() const;
  // Sampled sup of |df/dc| + |df/dk|.
  double lipschitz_ck() const;
  // Sampled sup of |df/dsigma|.
  double max_speed() const;

  // Sample sizes used by c2_sup; tests may shrink them.
  struct SupSampling {
    int ck = 101;
    int sigma = 1001;
  };
  void set_sup_sampling(SupSampling s);

 private:
  struct Cache;
  std::shared_ptr<const FluxFamily> family_;
  std::shared_ptr<Cache> cache_;
};

// Checks the S-shape conditions on an (n x n) grid of (gamma, kappa).
// Throws ModelViolation with a description of the first failure.
void validate_family(const FluxFamily& family, int n = 11);

}  // namespace polyfront

#endif  // POLYFRONT_FLUX_HPP_
