#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "polyfront/config.hpp"
#include "polyfront/csv.hpp"
#include "polyfront/errors.hpp"
#include "polyfront/harness.hpp"
#include "polyfront/reference_fv.hpp"

using namespace polyfront;
namespace fs = std::filesystem;

namespace {

const char* kConstant = R"({"initial": {"s": 0.4, "c": 0.3, "k": 0.2}, "T": 1.0})";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("polyfront_unit_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("config parsing and validation") {
    RunConfig cfg = parse_config(kConstant);
    CHECK(cfg.T == 1.0);
    CHECK(cfg.eps.size() == 4);
    CHECK(cfg.snapshot_times() == std::vector<double>{1.0});
    CHECK_THROWS_AS(parse_config(R"({"initial": {"s": 0.4, "c": 0.3, "k": 0.2}, "x": 1})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"initial": {"s": 0.4, "c": 0.3, "k": 0.2, "p": 0}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"initial": {"s": {"type": "ramp", "x0": 0, "x1": 1, "v0": 0, "v1": 1, "w": 2}, "c": 0, "k": 0}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"initial": {"s": 0.4, "c": 0.3, "k": 0.2}, "eps": [0.1, 0.1]})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"initial": {"s": 0.4, "c": 0.3, "k": 0.2}, "T": 0})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"initial": {"s": 1.4, "c": 0.3, "k": 0.2}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"initial": {"s": 0.4, "c": 0.3, "k": 0.2}, "flux": {"a0": 0.1, "a_kappa": 1}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
    CHECK_THROWS_AS(load_config(POLYFRONT_TEST_DATA "/unknown_key.json"),
                    ConfigError);
  }

  TEST_CASE("canonical JSON round trip") {
    RunConfig a = load_config(POLYFRONT_TEST_DATA "/riemann.json");
    RunConfig b = parse_config(to_json(a));
    CHECK(to_json(a) == to_json(b));
    CHECK(b.entropies == a.entropies);
    CHECK(b.initial.c.values() == a.initial.c.values());
  }

  TEST_CASE("random profiles follow the seed") {
    const char* text = R"({"initial": {"s": {"type": "random", "jumps": 6, "xmin": -1, "xmax": 1, "palette": [0.1, 0.5, 0.9]}, "c": 0.5, "k": 0.5}, "seed": 9})";
    RunConfig a = parse_config(text), b = parse_config(text);
    CHECK(a.initial.s.values() == b.initial.s.values());
    CHECK(a.initial.s.breaks().size() == 6);
  }

  TEST_CASE("exact L1 distance of step profiles") {
    SolutionProfile p{{0.0}, {{1.0, 0.0, 0.0}, {0.0, 0.0, 0.0}}};
    SolutionProfile q{{0.5}, {{1.0, 0.0, 0.0}, {0.0, 0.0, 0.0}}};
    CHECK(l1_distance(p, q, -1.0, 1.0) == doctest::Approx(0.5));
    CHECK(l1_distance(p, p, -1.0, 1.0) == 0.0);
    SolutionProfile r{{}, {{0.5, 0.25, 1.0}}};
    CHECK(l1_distance(r, SolutionProfile{{}, {{0.0, 0.0, 0.0}}}, 0.0, 2.0) ==
          doctest::Approx(3.5));
  }

  TEST_CASE("constant data gives zero fronts and residuals") {
    RunConfig cfg = parse_config(kConstant);
    RunOutput out = run_simulation(cfg, 0.1);
    CHECK(out.sim.record_count() == 0);
    Residual r = max_residual(out.sim, cfg);
    CHECK(r.r1 == 0.0);
    CHECK(r.r2 == 0.0);
    CHECK(l1_distance(out.sim, out.sim, 1.0, -5.0, 5.0) == 0.0);
  }

  TEST_CASE("run directory round trip and audit") {
    RunConfig cfg = load_config(POLYFRONT_TEST_DATA "/riemann.json");
    RunOutput out = run_simulation(cfg, 0.1);
    fs::path dir = scratch("run");
    write_run(dir.string(), cfg, 0.1, out);
    for (const char* f : {"run.json", "snapshots.csv", "fronts.csv",
                          "entropy_quadratic.csv", "entropy_quartic.csv",
                          "entropy_quadratic_summary.csv"}) {
      CHECK(fs::exists(dir / f));
    }
    CHECK(slurp(dir / "fronts.csv").rfind("t,kind,position,speed,sL,cL,kL,sR,cR,kR,t_end\n", 0) == 0);
    RunDir rd = read_run(dir.string());
    CHECK(rd.eps == 0.1);
    CHECK(to_json(rd.cfg) == to_json(cfg));
    AuditResult res = audit_run(dir.string(), "exp", {0.1, 1.0, -3.0, 3.0});
    CHECK(res.report.budget_violations == 0);
    CHECK(res.mu_plus <= res.cap);
    CHECK(fs::exists(dir / "entropy_exp_summary.csv"));
    // a second run writes the same bytes
    fs::path again = scratch("run_again");
    write_run(again.string(), cfg, 0.1, run_simulation(cfg, 0.1));
    CHECK(slurp(dir / "fronts.csv") == slurp(again / "fronts.csv"));
    CHECK(slurp(dir / "snapshots.csv") == slurp(again / "snapshots.csv"));
    // tampering is detected
    {
      std::ofstream os(dir / "fronts.csv", std::ios::app);
      os << "9,S,0,1,0.5,0.5,0.5,0.5,0.5,0.5,1\n";
    }
    CHECK_THROWS_AS(audit_run(dir.string(), "quadratic", {0.1, 1.0, -3.0, 3.0}),
                    InvariantViolation);
    fs::remove_all(dir);
    fs::remove_all(again);
  }

  TEST_CASE("finite volumes") {
    RunConfig cfg = parse_config(kConstant);
    FvSolution sol = run_reference_fv(cfg, 50, 0.45);
    for (const State& u : sol.cells) {
      CHECK(u.s == doctest::Approx(0.4).epsilon(1e-13));
      CHECK(u.c == doctest::Approx(0.3).epsilon(1e-13));
    }
    CHECK_THROWS_AS(run_reference_fv(cfg, 5, 0.45), PreconditionError);
    CHECK_THROWS_AS(run_reference_fv(cfg, 50, 0.6), PreconditionError);
    CHECK_THROWS_AS(run_reference_fv(cfg, 50, 0.0), PreconditionError);

    // k jump only: at steady state f is continuous across the jump
    RunConfig kj = parse_config(R"({"initial": {"s": 0.5, "c": 0.3,
      "k": {"type": "piecewise", "breaks": [0.0], "values": [0.1, 0.9]}},
      "T": 6.0, "window": 2.0})");
    FvSolution st = run_reference_fv(kj, 200, 0.45);
    FluxModel m = make_model(kj.flux);
    std::size_t mid = st.cells.size() / 2;
    const State& l = st.cells[mid - 1];
    const State& r = st.cells[mid + 1];
    CHECK(std::abs(m.f(l.s, l.c, l.k) - m.f(r.s, r.c, r.k)) <= 1e-8);
  }

  TEST_CASE("convergence table") {
    RunConfig cfg = load_config(POLYFRONT_TEST_DATA "/riemann.json");
    ConvergenceTable t = convergence_study(cfg, 1);
    REQUIRE(t.rows.size() == 3);
    CHECK_FALSE(t.partial);
    CHECK(t.rows[0].l1_next > t.rows[1].l1_next);
    CHECK(std::isnan(t.rows[2].l1_next));
    std::ostringstream os;
    write_convergence(os, t);
    CHECK(os.str().rfind("eps,l1_next,r1,r2,mu_plus,events,fronts,status\n", 0) == 0);
    cfg.eps = {0.1, 0.05};
    CHECK_THROWS_AS(convergence_study(cfg), ConfigError);
  }
}
