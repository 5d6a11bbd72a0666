// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances are fixed here and never adjusted per run.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../support/oracles.hpp"
#include "polyfront/config.hpp"
#include "polyfront/entropy.hpp"
#include "polyfront/harness.hpp"
#include "polyfront/reference_fv.hpp"
#include "polyfront/riemann.hpp"
#include "polyfront/tracker.hpp"

using namespace polyfront;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << "failed: ";
      else detail << "; ";
      detail << what;
      pass = false;
    }
  }
};

std::string data_path(const std::string& name) {
  return std::string(POLYFRONT_TEST_DATA) + "/" + name;
}

bool in_cube(const State& u) {
  return u.s >= 0.0 && u.s <= 1.0 && u.c >= 0.0 && u.c <= 1.0 &&
         u.k >= 0.0 && u.k <= 1.0;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// 1. Endpoint values, flat endpoints and the S-shape of the flux family.
void flux_family(Outcome& out) {
  auto t0 = Clock::now();
  FluxModel m = FluxModel::corey();
  const FluxFamily& fam = m.family();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double h = 1e-5;
  double e_val = 0, e_der = 0, min_d2_0 = INFINITY, max_d2_1 = -INFINITY;
  for (int n = 0; n < 10000; ++n) {
    double c = u(rng), k = u(rng);
    e_val = std::max({e_val, std::abs(m.f(0.0, c, k)),
                      std::abs(1.0 - m.f(1.0, c, k))});
    double d0 = (fam.f(h, c, k) - fam.f(-h, c, k)) / (2 * h);
    double d1 = (fam.f(1 + h, c, k) - fam.f(1 - h, c, k)) / (2 * h);
    e_der = std::max({e_der, std::abs(d0), std::abs(d1)});
    min_d2_0 = std::min(min_d2_0, m.d2f(0.0, c, k));
    max_d2_1 = std::max(max_d2_1, m.d2f(1.0, c, k));
  }
  double wall = seconds_since(t0);
  out.require(e_val <= 1e-10, "endpoint value " + fmt(e_val));
  out.require(e_der <= 1e-7, "endpoint slope " + fmt(e_der));
  out.require(min_d2_0 > 0.0, "f''(0) min " + fmt(min_d2_0));
  out.require(max_d2_1 < 0.0, "f''(1) max " + fmt(max_d2_1));
  out.require(wall < 5.0, "runtime " + fmt(wall) + " s");
  out.detail << (out.pass ? "" : " | ") << "max|f(0)|,|1-f(1)|=" << fmt(e_val)
             << " max|f'|=" << fmt(e_der) << " min f''(0)=" << fmt(min_d2_0)
             << " max f''(1)=" << fmt(max_d2_1) << " wall=" << fmt(wall)
             << "s";
}

// Sup of value and slope errors on n uniform random interior points.
std::pair<double, double> sampled_error(const RegionFlux& flux,
                                        const FluxModel& m,
                                        std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double ev = 0, es = 0;
  for (int i = 0; i < n; ++i) {
    double x = u(rng);
    ev = std::max(ev, std::abs(m.f(x, flux.c(), flux.k()) - flux.eval(x)));
    es = std::max(es,
                  std::abs(m.df(x, flux.c(), flux.k()) - flux.slope_at(x)));
  }
  return {ev, es};
}

// 2. Interpolation estimates for every region flux of an N = 2, M = 3 datum.
void interpolation(Outcome& out) {
  auto t0 = Clock::now();
  FluxModel m = FluxModel::corey();
  Profile s = Profile::ramp(-1.0, 1.0, 0.9, 0.1);
  Profile c = Profile::piecewise({-1.5, -0.2, 0.9}, {0.1, 0.9, 0.3, 0.6});
  Profile k = Profile::piecewise({-0.7, 0.4}, {0.2, 0.9, 0.5});
  std::mt19937_64 rng(202);
  std::ostringstream worst;
  int regions = 0;
  for (double eps : {0.1, 0.05, 0.02}) {
    DiscretizeOptions opt;
    opt.window = {-3.0, 3.0};
    DiscretizedData d = discretize_initial(s, c, k, eps, opt);
    out.require(d.N() == 2 && d.M() == 3, "datum is not N = 2, M = 3");
    double bound_s = eps / (d.N() + d.M());
    ValueGrid g0 = build_G0(d, m);
    std::vector<RegionFlux> fluxes;
    for (double kv : d.k_values) {
      for (double cv : d.c_values) fluxes.push_back(build_S(g0, cv, kv, m));
    }
    // the grids the tracker actually uses after extension at k-jumps
    Simulation sim(d, m);
    sim.advance_to(1.0);
    for (int i = 0; i < sim.strip_count(); ++i) {
      for (std::size_t j = 0; j < d.c_values.size(); ++j) {
        fluxes.push_back(sim.region_flux(i, static_cast<int>(j)));
      }
    }
    double ev = 0, es = 0;
    for (const RegionFlux& f : fluxes) {
      auto [v, sl] = sampled_error(f, m, rng, 1000);
      ev = std::max(ev, v);
      es = std::max(es, sl);
      ++regions;
    }
    out.require(ev <= eps, "value error " + fmt(ev) + " at eps " + fmt(eps));
    out.require(es <= bound_s,
                "slope error " + fmt(es) + " at eps " + fmt(eps));
    worst << " eps=" << eps << ":" << fmt(ev / eps) << "," << fmt(es / bound_s);
  }
  double wall = seconds_since(t0);
  out.require(wall < 30.0, "runtime " + fmt(wall) + " s");
  out.detail << (out.pass ? "" : " | ") << regions
             << " region fluxes, error/bound (value,slope)" << worst.str()
             << " wall=" << fmt(wall) << "s";
}

// 3. Scalar fans against the pairwise-slope envelope.
void scalar_solver(Outcome& out) {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int cases = 0, mismatches = 0;
  double worst = 0.0;
  while (cases < 1000) {
    int kinks = static_cast<int>(u(rng) * 51);  // interior nodes, <= 50
    std::vector<double> xs{0.0, 1.0};
    for (int i = 0; i < kinks; ++i) xs.push_back(u(rng));
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::vector<double> fs;
    for (std::size_t i = 0; i < xs.size(); ++i) fs.push_back(u(rng));
    std::size_t a = static_cast<std::size_t>(u(rng) * xs.size());
    std::size_t b = static_cast<std::size_t>(u(rng) * xs.size());
    if (a == b) continue;
    ++cases;
    RegionFlux f(0.0, 0.0, xs, fs);
    WaveFan fan = solve_scalar_pl(f, xs[a], xs[b]);
    auto ref = oracle::hull(xs, fs, a, b);
    bool ok = fan.size() == ref.size();
    for (std::size_t i = 0; ok && i < ref.size(); ++i) {
      ok = fan.fronts[i].left.s == xs[ref[i].from] &&
           fan.fronts[i].right.s == xs[ref[i].to];
      double e = std::abs(fan.fronts[i].speed - ref[i].speed);
      worst = std::max(worst, e);
      ok = ok && e <= 1e-12;
    }
    mismatches += !ok;
  }
  out.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
  out.detail << (out.pass ? "" : " | ") << cases
             << " cases, max speed error " << fmt(worst);
}

// 4. Minimal-jump C waves: jump conditions, entropy, grid membership and
// speed ordering, plus the worked example.
void min_jump(Outcome& out) {
  FluxModel m = FluxModel::corey();
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double eps_choices[] = {0.1, 0.05, 0.025};
  int with_c = 0, bad_rh = 0, bad_entropy = 0, bad_grid = 0, bad_order = 0;
  double worst_rh = 0.0;
  for (int n = 0; n < 1000; ++n) {
    double k = u(rng);
    State l{u(rng), u(rng), k}, r{u(rng), u(rng), k};
    double eps = eps_choices[n % 3];
    auto setup = oracle::c_jump_setup(m, eps, l, r);
    CWaveSolution sol = solve_c_minjump(l.s, l.c, r.s, r.c, k, *setup.left,
                                        *setup.right, setup.strip->grid(), m);
    if (!sol.has_c) {
      ++bad_rh;  // distinct random c values always need a C wave
      continue;
    }
    ++with_c;
    double lam = sol.lambda_c;
    double fm = m.f(sol.s_minus, l.c, k), fp = m.f(sol.s_plus, r.c, k);
    double rh_s = std::abs(fp - fm - lam * (sol.s_plus - sol.s_minus));
    double rh_c = std::abs(r.c * fp - l.c * fm -
                           lam * (r.c * sol.s_plus - l.c * sol.s_minus));
    worst_rh = std::max({worst_rh, rh_s, rh_c});
    bad_rh += rh_s > 1e-10 || rh_c > 1e-10;
    bad_entropy += !oracle::c_entropy_holds(m, sol.s_minus, sol.s_plus, l.c,
                                            r.c, k, lam, 1000);
    bad_grid += !setup.strip->grid().contains(sol.gamma, 1e-10);
    bool order = true;
    for (const Front& w : sol.left_fan.fronts) order = order && w.speed <= lam;
    for (const Front& w : sol.right_fan.fronts) order = order && w.speed >= lam;
    bad_order += !order;
  }
  out.require(bad_rh == 0, std::to_string(bad_rh) + " jump-condition fails");
  out.require(bad_entropy == 0,
              std::to_string(bad_entropy) + " entropy fails");
  out.require(bad_grid == 0, std::to_string(bad_grid) + " off-grid gammas");
  out.require(bad_order == 0, std::to_string(bad_order) + " order fails");

  State l{0.3, 0.0, 1.0}, r{0.3, 0.5, 1.0};
  auto setup = oracle::c_jump_setup(m, 0.05, l, r);
  CWaveSolution sol = solve_c_minjump(l.s, l.c, r.s, r.c, r.k, *setup.left,
                                      *setup.right, setup.strip->grid(), m);
  out.require(sol.has_c && std::abs(sol.gamma - 0.54608) <= 1e-4 &&
                  std::abs(sol.s_plus - 0.31175) <= 1e-4,
              "worked example gamma " + fmt(sol.gamma) + " s+ " +
                  fmt(sol.s_plus));
  char buf[96];
  std::snprintf(buf, sizeof buf, " gamma=%.6f s+=%.6f", sol.gamma,
                sol.s_plus);
  out.detail << (out.pass ? "" : " | ") << with_c
             << " instances, max RH residual " << fmt(worst_rh)
             << ", worked example" << buf;
}

// 5. Structural invariants on random piecewise-constant scenarios.
void random_scenarios(Outcome& out) {
  std::mt19937_64 rng(505);
  std::uniform_int_distribution<int> ns(1, 20), nc(1, 20), nk(1, 5);
  const std::vector<double> s_pal{0.05, 0.2, 0.4, 0.6, 0.8, 0.95};
  const std::vector<double> c_pal{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  const std::vector<double> k_pal{0.0, 0.25, 0.5, 0.75, 1.0};
  const double T = 2.0;
  double slowest = 0.0, worst_defect = 0.0;
  long total_records = 0;
  int max_c = 0;
  for (int n = 0; n < 20; ++n) {
    RunConfig cfg;
    cfg.T = T;
    cfg.window = 5.0;
    std::uint64_t seed = rng();
    cfg.initial.s = Profile::random_piecewise(seed, ns(rng), -4, 4, s_pal);
    cfg.initial.c = Profile::random_piecewise(seed + 1, nc(rng), -4, 4, c_pal);
    cfg.initial.k = Profile::random_piecewise(seed + 2, nk(rng), -4, 4, k_pal);
    auto t0 = Clock::now();
    Simulation sim(discretize(cfg, 0.05), make_model(cfg.flux));
    sim.advance_to(T);
    double wall = seconds_since(t0);
    slowest = std::max(slowest, wall);
    std::string tag = "scenario " + std::to_string(n) + ": ";
    out.require(wall < 60.0, tag + "runtime " + fmt(wall) + " s");

    auto c_ids = [&](double t) {
      std::vector<int> ids;
      for (const FrontRecord& r : sim.fronts_at(t)) {
        if (r.kind == WaveKind::kC) ids.push_back(r.id);
      }
      return ids;
    };
    std::vector<int> ids0 = c_ids(0.0);
    max_c = std::max(max_c, static_cast<int>(ids0.size()));
    bool same = true;
    for (int i = 1; i <= 16; ++i) same = same && c_ids(T * i / 16.0) == ids0;
    out.require(same, tag + "C fronts changed");

    const auto& kj = sim.data().k_jumps;
    bool k_still = true, cube = true;
    double defect = 0.0;
    for (int i = 0; i < sim.strip_count(); ++i) {
      for (const FrontRecord& r : sim.strip_records(i)) {
        ++total_records;
        defect = std::max(defect, front_defect(r, sim.model()));
        cube = cube && in_cube(r.left) && in_cube(r.right);
        if (r.kind == WaveKind::kK) {
          k_still = k_still && r.speed == 0.0 &&
                    std::find(kj.begin(), kj.end(), r.x_birth) != kj.end();
        }
      }
    }
    worst_defect = std::max(worst_defect, defect);
    out.require(k_still, tag + "K front moved");
    out.require(defect <= 1e-10, tag + "defect " + fmt(defect));
    out.require(cube, tag + "state outside the unit cube");
  }
  out.detail << (out.pass ? "" : " | ") << "20 runs, " << total_records
             << " front records, up to " << max_c << " C fronts, max defect "
             << fmt(worst_defect) << ", slowest " << fmt(slowest) << "s";
}

// Shared runs of the five smooth-saturation scenarios at every eps.
struct CannedRun {
  double eps = 0.0;
  Simulation sim;
  EntropyReport report;
  double r1 = 0.0;
};

struct CannedScenario {
  std::string name;
  RunConfig cfg;
  std::vector<CannedRun> runs;
};

std::vector<CannedScenario>& canned() {
  static std::vector<CannedScenario> all = [] {
    std::vector<CannedScenario> v;
    for (int i = 1; i <= 5; ++i) {
      CannedScenario sc;
      sc.name = "canned_" + std::to_string(i);
      sc.cfg = load_config(data_path(sc.name + ".json"));
      Entropy eta = entropy_by_id("quadratic");
      for (double eps : sc.cfg.eps) {
        Simulation sim(discretize(sc.cfg, eps), make_model(sc.cfg.flux));
        sim.advance_to(sc.cfg.T);
        EntropyReport rep = audit_entropy(sim, eta);
        double r1 = max_residual(sim, sc.cfg).r1;
        sc.runs.push_back({eps, std::move(sim), std::move(rep), r1});
      }
      v.push_back(std::move(sc));
    }
    return v;
  }();
  return all;
}

// 6. Entropy audit with eta = s^2 and stability of the positive part.
void entropy_audit(Outcome& out) {
  std::ostringstream rows;
  for (const CannedScenario& sc : canned()) {
    out.require(sc.cfg.T == 2.0 && sc.cfg.window == 5.0,
                sc.name + " is not on [0,2] x [-5,5]");
    Rect rect{0.1, 2.0, -5.0, 5.0};
    double s_prod = 0.0, lo = INFINITY, hi = 0.0, cap = INFINITY;
    long violations = 0;
    for (const CannedRun& run : sc.runs) {
      s_prod = std::max(s_prod, run.report.max_s_production);
      for (const FrontProduction& fp : run.report.fronts) {
        if (fp.budget > 0.0) violations += fp.production > fp.budget;
      }
      double mu = positive_part_measure(run.sim, run.report, rect);
      lo = std::min(lo, mu);
      hi = std::max(hi, mu);
      const DiscretizedData& d = run.sim.data();
      cap = std::min(cap, run.report.C * sc.cfg.T *
                              (1.0 + d.tv_c() + d.tv_k()));
    }
    out.require(s_prod <= 1e-12, sc.name + " S production " + fmt(s_prod));
    out.require(violations == 0,
                sc.name + " " + std::to_string(violations) +
                    " C/K budget violations");
    bool stable = hi <= 1.5 * lo || hi <= cap;
    out.require(stable, sc.name + " mu+ range " + fmt(lo) + ".." + fmt(hi));
    rows << " " << sc.name << ":mu+=" << fmt(lo) << ".." << fmt(hi);
  }
  out.detail << (out.pass ? "" : " | ") << "eps 0.1..0.0125" << rows.str();
}

// 7. Jensen defect of the frozen flux.
void jensen(Outcome& out) {
  FluxModel m = FluxModel::corey();
  std::mt19937_64 rng(707);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_diag = 0.0, min_off = INFINITY;
  int non_positive = 0;
  for (int i = 0; i < 10; ++i) {
    double c = u(rng), k = u(rng);
    for (int n = 0; n < 100; ++n) {
      double v = u(rng), w = u(rng);
      worst_diag = std::max(worst_diag, std::abs(jensen_defect(m, c, k, v, v)));
      if (v == w) continue;
      double d = jensen_defect(m, c, k, v, w);
      min_off = std::min(min_off, d);
      non_positive += !(d > 0.0);
    }
  }
  out.require(worst_diag <= 1e-12, "I(v,v) up to " + fmt(worst_diag));
  out.require(non_positive == 0,
              std::to_string(non_positive) + " pairs with I <= 0");
  out.detail << (out.pass ? "" : " | ") << "max |I(v,v)|=" << fmt(worst_diag)
             << " min I(v,w)=" << fmt(min_off) << " over 1000 pairs";
}

// 8. Convergence under eps refinement.
void convergence(Outcome& out) {
  std::ostringstream rows;
  for (const CannedScenario& sc : canned()) {
    const auto& runs = sc.runs;
    const double W = sc.cfg.window, T = sc.cfg.T;
    std::vector<double> d;
    for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
      d.push_back(l1_distance(runs[i].sim, runs[i + 1].sim, T, -W, W));
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < d.size(); ++i) {
      decreasing = decreasing && d[i] < d[i - 1];
    }
    out.require(decreasing, sc.name + " L1 distances not decreasing");
    // least-squares C for r1 = C eps; every ratio within 50% of it
    double num = 0.0, den = 0.0;
    for (const CannedRun& r : runs) {
      num += r.r1 * r.eps;
      den += r.eps * r.eps;
    }
    double c_fit = num / den;
    bool stable = c_fit > 0.0;
    for (const CannedRun& r : runs) {
      double ratio = r.r1 / r.eps;
      stable = stable && std::abs(ratio - c_fit) <= 0.5 * c_fit &&
               r.r1 <= 1.5 * c_fit * r.eps;
    }
    out.require(stable, sc.name + " r1/eps unstable around " + fmt(c_fit));
    rows << " " << sc.name << ":L1=" << fmt(d.front()) << ">..>"
         << fmt(d.back()) << ",C=" << fmt(c_fit);
  }
  out.detail << (out.pass ? "" : " | ") << rows.str().substr(1);
}

// 9. Front tracking against the finite-volume reference at T = 1.
void versus_fv(Outcome& out) {
  const std::pair<double, int> ladder[] = {
      {0.05, 500}, {0.025, 1000}, {0.0125, 2000}};
  std::ostringstream rows;
  for (int i = 1; i <= 4; ++i) {
    std::string name = "riemann_" + std::to_string(i);
    RunConfig cfg = load_config(data_path(name + ".json"));
    out.require(cfg.T == 1.0, name + " does not stop at T = 1");
    const double W = cfg.window;
    std::vector<double> d;
    for (auto [eps, cells] : ladder) {
      Simulation sim(discretize(cfg, eps), make_model(cfg.flux));
      sim.advance_to(cfg.T);
      FvSolution fv = run_reference_fv(cfg, cells, 0.45);
      d.push_back(l1_distance(sim.profile(cfg.T), fv.as_profile(), -W, W));
    }
    out.require(d.back() <= 0.05, name + " L1 " + fmt(d.back()));
    out.require(d[1] < d[0] && d[2] < d[1],
                name + " distance not decreasing " + fmt(d[0]) + "," +
                    fmt(d[1]) + "," + fmt(d[2]));
    rows << " " << name << ":" << fmt(d[0]) << ">" << fmt(d[1]) << ">"
         << fmt(d[2]);
  }
  out.detail << (out.pass ? "" : " | ") << rows.str().substr(1);
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<void(Outcome&)> run;
  };
  const std::vector<Criterion> criteria = {
      {"flux family", flux_family},
      {"interpolation estimates", interpolation},
      {"scalar Riemann solver", scalar_solver},
      {"minimal-jump C waves", min_jump},
      {"random scenario invariants", random_scenarios},
      {"entropy audit", entropy_audit},
      {"Jensen defect", jensen},
      {"eps convergence", convergence},
      {"front tracking vs finite volume", versus_fv},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome out;
    auto t0 = Clock::now();
    try {
      criteria[i].run(out);
    } catch (const std::exception& e) {
      out.require(false, std::string("exception: ") + e.what());
    }
    failed += !out.pass;
    std::printf("%s %zu %s: %s (%.1f s)\n", out.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].name, out.detail.str().c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n",
              static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
