#include <cmath>
#include <memory>
#include <set>

#include "doctest.h"
#include "polyfront/errors.hpp"
#include "polyfront/grid.hpp"
#include "polyfront/profile.hpp"

using namespace polyfront;

namespace {

// Corey with a = 1 composed with h(s) = s + c beta s (1-s) (s - s0). Curves
// of different c cross only at s0; there g slopes down for c = 0 and up for
// c = 1, so the crossing is transversal.
class Crossing : public FluxFamily {
 public:
  static constexpr double kBeta = 0.6;
  static constexpr double kS0 = 0.72;
  static double F(double h) { return h * h / (h * h + (1 - h) * (1 - h)); }
  static double dF(double h) {
    double d = h * h + (1 - h) * (1 - h);
    return 2 * h * (1 - h) / (d * d);
  }
  static double h(double s, double c) {
    return s + c * kBeta * s * (1 - s) * (s - kS0);
  }
  static double dh(double s, double c) {
    return 1 + c * kBeta * (-3 * s * s + 2 * (1 + kS0) * s - kS0);
  }
  std::string name() const override { return "crossing"; }
  double f(double s, double c, double) const override { return F(h(s, c)); }
  double df(double s, double c, double) const override {
    return dF(h(s, c)) * dh(s, c);
  }
  double d2f(double s, double c, double k) const override {
    double e = 1e-5;
    double lo = std::max(0.0, s - e), hi = std::min(1.0, s + e);
    return (df(hi, c, k) - df(lo, c, k)) / (hi - lo);
  }
  // exact slope of g = f / s
  double g_slope(double s, double c) const {
    return (s * df(s, c, 0.0) - f(s, c, 0.0)) / (s * s);
  }
};

DiscretizedData constant_data(State u, double eps) {
  return DiscretizedData::from_cells(eps, {}, {u});
}

}  // namespace

TEST_SUITE("grid") {
  TEST_CASE("resolution constant") {
    CHECK(build_L(0.1, 2, 3, 4.0) == 200);
    CHECK(build_L(0.1, 1, 1, 3.7) == 74);
    CHECK(build_L(0.1, 0, 0, 3.7) == 37);
    CHECK_THROWS_AS(build_L(0.0, 1, 1, 3.7), PreconditionError);
  }

  TEST_CASE("value grid merges near-equal levels and keeps old ones") {
    ValueGrid g(0.1, 0, 0, 10);
    g.stage(0.5, kFromInitial);
    g.stage(0.7, kFromGrid);
    CHECK(g.commit() == 2);
    g.stage(0.5 + 2e-11, kFromExtension);
    g.stage(0.6, kFromExtension);
    CHECK(g.commit() == 1);
    CHECK(g.size() == 3);
    CHECK(g.levels()[0] == 0.5);
    CHECK((g.source_of(0.5) & kFromExtension) != 0);
    CHECK(g.snap(0.6 + 5e-11).value() == 0.6);
    CHECK_FALSE(g.snap(0.65).has_value());
    CHECK(g.epoch() == 2);
  }

  TEST_CASE("constant datum level sets") {
    FluxModel m = FluxModel::corey();
    DiscretizedData d = constant_data({0.5, 0.5, 0.5}, 0.1);
    ValueGrid g = build_G0(d, m);
    CHECK((g.source_of(1.0) & kFromInitial) != 0);
    // a = 1 at c = 1/2: g_max = (1 + sqrt 2) / 2
    CHECK((g.source_of(1.2071067811865475) & kFromMaxima) != 0);
    std::set<double> initial, maxima;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g.sources()[i] & kFromInitial) initial.insert(g.levels()[i]);
      if (g.sources()[i] & kFromMaxima) maxima.insert(g.levels()[i]);
    }
    CHECK(initial.size() == 1);
    CHECK(maxima.size() == 1);
    for (std::size_t i = 0; i < g.size(); ++i) {
      CHECK((g.sources()[i] & kFromCrossing) == 0);
    }
  }

  TEST_CASE("region flux interpolates the model at its nodes") {
    FluxModel m = FluxModel::corey();
    RegionFlux f(0.3, 0.4, {0.0, 0.25, 0.5, 1.0}, m);
    CHECK(f.eval(0.25) == m.f(0.25, 0.3, 0.4));
    CHECK(f.eval(0.375) ==
          doctest::Approx(0.5 * (m.f(0.25, 0.3, 0.4) + m.f(0.5, 0.3, 0.4))));
    CHECK(f.segment(1.0) == 2);
    CHECK(f.segment(0.5) == 2);
    CHECK(f.index_of(0.5 + 1e-12) == 2);
    CHECK(f.index_of(0.6) == -1);
    CHECK_THROWS_AS(f.snap(0.6), PreconditionError);
    CHECK(f.max_gap() == 0.5);
    CHECK_THROWS_AS(RegionFlux(0.3, 0.4, {0.1, 1.0}, m), PreconditionError);
  }

  TEST_CASE("saturation grids carry every preimage and meet the estimates") {
    FluxModel m = FluxModel::corey();
    DiscretizedData d = DiscretizedData::from_cells(
        0.1, {-1.0, 0.0, 1.0},
        {{0.9, 0.1, 0.2}, {0.4, 0.6, 0.2}, {0.2, 0.6, 0.8}, {0.7, 0.3, 0.8}});
    ValueGrid g = build_G0(d, m);
    for (double c : d.c_values) {
      for (double k : d.k_values) {
        RegionFlux f = build_S(g, c, k, m);
        CHECK(f.max_gap() <= 1.0 / g.L() + 1e-12);
        for (double lv : g.levels()) {
          for (double r : m.g_preimages(lv, c, k)) {
            CHECK(f.index_of(r) >= 0);
          }
        }
        auto e = interpolation_error(f, m, 1000);
        CHECK(e.value <= g.eps());
        CHECK(e.slope <= g.eps() / g.NM());
      }
    }
    // initial saturations are kept exactly
    for (const State& u : d.values) {
      RegionFlux f = build_S(g, u.c, u.k, m);
      CHECK(f.xs()[f.index_of(u.s)] == u.s);
    }
  }

  TEST_CASE("crossings match a brute-force scan") {
    auto fam = std::make_shared<Crossing>();
    FluxModel m(fam);
    auto found = find_crossings(m, 0.0, 0.0, 1.0, 0.0);
    // brute force: sign changes of g_A - g_B on 10^6 interior points, kept
    // when the exact slopes have opposite signs
    std::vector<std::pair<double, double>> oracle;
    const int n = 1000000;
    auto diff = [&](double s) { return fam->g(s, 0.0, 0.0) - fam->g(s, 1.0, 0.0); };
    double prev = diff(1.0 / n);
    for (int i = 2; i < n; ++i) {
      double s = double(i) / n;
      double v = diff(s);
      if (v != 0.0 && prev != 0.0 && (v > 0) != (prev > 0)) {
        double x = s - 0.5 / n;
        double sa = fam->g_slope(x, 0.0), sb = fam->g_slope(x, 1.0);
        if ((sa > 0) != (sb > 0)) oracle.emplace_back(x, fam->g(x, 0.0, 0.0));
      }
      if (v != 0.0) prev = v;
    }
    REQUIRE(oracle.size() == 1);
    REQUIRE(found.size() == oracle.size());
    CHECK(std::abs(found[0].first - oracle[0].first) <= 1e-6);
    CHECK(std::abs(found[0].second - oracle[0].second) <= 1e-6);
    CHECK(found[0].first == doctest::Approx(Crossing::kS0).epsilon(1e-10));
    double level = Crossing::F(Crossing::kS0) / Crossing::kS0;
    CHECK(std::abs(found[0].second - level) <= 1e-8);
    // identical curves and Corey curves never cross transversally
    CHECK(find_crossings(m, 0.5, 0.0, 0.5, 1.0).empty());
    FluxModel corey = FluxModel::corey();
    CHECK(find_crossings(corey, 0.1, 1.0, 0.5, 1.0).empty());
  }

  TEST_CASE("crossing levels enter the initial grid") {
    FluxModel m(std::make_shared<Crossing>());
    DiscretizedData d = DiscretizedData::from_cells(
        0.1, {0.0}, {{0.3, 0.0, 0.0}, {0.3, 1.0, 0.0}});
    ValueGrid g = build_G0(d, m);
    double level = Crossing::F(Crossing::kS0) / Crossing::kS0;
    CHECK((g.source_of(level, 1e-8) & kFromCrossing) != 0);
  }

  TEST_CASE("grid extension adds levels and anchors") {
    FluxModel m = FluxModel::corey();
    DiscretizedData d = constant_data({0.5, 0.5, 0.5}, 0.1);
    ValueGrid g = build_G0(d, m);
    State u{0.123456789, 0.5, 0.5};
    ValueGrid h = extend_grid(g, {u}, m);
    CHECK(h.epoch() == g.epoch() + 1);
    CHECK(h.contains(m.g(u.s, u.c, u.k)));
    CHECK_FALSE(g.contains(m.g(u.s, u.c, u.k)));
    RegionFlux f = build_S(h, 0.5, 0.5, m);
    CHECK(f.xs()[f.index_of(u.s)] == u.s);
    StripGrids strip(std::make_shared<ValueGrid>(h), 0.5, m);
    CHECK(&strip.flux(0.5) == &strip.flux(0.5));
  }
}
