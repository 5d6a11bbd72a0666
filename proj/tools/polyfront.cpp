// Command line front end: simulate, convergence, riemann, audit, fv.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "polyfront/config.hpp"
#include "polyfront/csv.hpp"
#include "polyfront/errors.hpp"
#include "polyfront/harness.hpp"
#include "polyfront/reference_fv.hpp"
#include "polyfront/riemann.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfig = 2;
constexpr int kSafeguard = 3;
constexpr int kInvariant = 4;

std::vector<double> parse_list(const std::string& text, std::size_t n,
                               const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string cell; std::getline(ss, cell, ',');) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw polyfront::ConfigError(std::string(what) + ": bad number '" +
                                   cell + "'");
    }
  }
  if (out.size() != n) {
    throw polyfront::ConfigError(std::string(what) + ": expected " +
                                 std::to_string(n) + " comma-separated values");
  }
  return out;
}

polyfront::State parse_state(const std::string& text, const char* what) {
  auto v = parse_list(text, 3, what);
  return {v[0], v[1], v[2]};
}

int simulate(const std::string& config, double eps, const std::string& out) {
  polyfront::RunConfig cfg = polyfront::load_config(config);
  polyfront::RunOutput run = polyfront::run_simulation(cfg, eps);
  polyfront::write_run(out, cfg, eps, run);
  const auto& n = run.sim.counters();
  std::fprintf(stderr,
               "eps=%g T=%g events=%ld fronts=%zu grid_extensions=%ld "
               "wall=%.3fs\n",
               eps, cfg.T, n.events, run.sim.record_count(),
               n.grid_extensions, run.wall_seconds);
  return kOk;
}

int convergence(const std::string& config, const std::string& out) {
  polyfront::RunConfig cfg = polyfront::load_config(config);
  polyfront::ConvergenceTable table = polyfront::convergence_study(cfg);
  std::filesystem::create_directories(out);
  std::ostringstream conv, timing;
  polyfront::write_convergence(conv, table);
  polyfront::write_timing(timing, table);
  std::ofstream(std::filesystem::path(out) / "convergence.csv") << conv.str();
  std::ofstream(std::filesystem::path(out) / "timing.csv") << timing.str();
  std::cout << conv.str();
  int rc = kOk;
  for (const auto& row : table.rows) {
    if (row.ok) continue;
    std::fprintf(stderr, "eps=%g aborted: %s\n", row.eps, row.error.c_str());
    if (row.error_kind == polyfront::ErrorKind::kInvariant) rc = kInvariant;
    if (row.error_kind == polyfront::ErrorKind::kSafeguard && rc == kOk) {
      rc = kSafeguard;
    }
    if (row.error_kind == polyfront::ErrorKind::kOther && rc == kOk) rc = 1;
  }
  return rc;
}

int riemann(const std::string& left, const std::string& right, double eps,
            double a0, double a_kappa) {
  polyfront::FluxConfig fc;
  fc.a0 = a0;
  fc.a_kappa = a_kappa;
  polyfront::FluxModel model = polyfront::make_model(fc);
  polyfront::WaveFan fan =
      polyfront::solve_riemann(parse_state(left, "--left"),
                               parse_state(right, "--right"), eps, model);
  polyfront::write_fan(std::cout, fan);
  return kOk;
}

int audit(const std::string& dir, const std::string& id,
          const std::string& rect_text) {
  auto v = parse_list(rect_text, 4, "--rect");
  polyfront::Rect rect{v[0], v[1], v[2], v[3]};
  polyfront::AuditResult res = polyfront::audit_run(dir, id, rect);
  polyfront::write_entropy_summary(std::cout, res.report, rect, res.mu_plus,
                                   res.cap);
  return kOk;
}

int fv(const std::string& config, int cells, double cfl,
       const std::string& out) {
  polyfront::RunConfig cfg = polyfront::load_config(config);
  polyfront::FvSolution sol = polyfront::run_reference_fv(cfg, cells, cfl);
  if (out.empty()) {
    polyfront::write_fv(std::cout, sol);
  } else {
    std::ofstream os(out);
    if (!os) throw polyfront::ConfigError("cannot write '" + out + "'");
    polyfront::write_fv(os, sol);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Front tracking for the polymer-flooding system (s, c, k)"};
  app.require_subcommand(1);

  std::string config, out, left, right, run_dir, entropy, rect;
  double eps = 0.05, cfl = 0.45, a0 = 1.0, a_kappa = 0.25;
  int cells = 2000;

  auto* sim = app.add_subcommand("simulate", "Run one simulation");
  sim->add_option("--config", config, "JSON run configuration")->required();
  sim->add_option("--eps", eps, "Approximation parameter")->required();
  sim->add_option("--out", out, "Output directory")->required();

  auto* conv = app.add_subcommand("convergence", "Run the eps sequence");
  conv->add_option("--config", config, "JSON run configuration")->required();
  conv->add_option("--out", out, "Output directory")->required();

  auto* rie = app.add_subcommand("riemann", "Print one Riemann fan as CSV");
  rie->add_option("--left", left, "Left state s,c,k")->required();
  rie->add_option("--right", right, "Right state s,c,k")->required();
  rie->add_option("--eps", eps, "Approximation parameter")->required();
  rie->add_option("--a0", a0, "Mobility ratio at kappa = 0");
  rie->add_option("--a-kappa", a_kappa, "Mobility reduction per unit kappa");

  auto* aud = app.add_subcommand("audit", "Entropy audit of a run directory");
  aud->add_option("--run", run_dir, "Directory written by simulate")
      ->required();
  aud->add_option("--entropy", entropy,
                  "quadratic, quartic, exp or identity")
      ->required();
  aud->add_option("--rect", rect, "t1,t2,xl,xr")->required();

  auto* fvc = app.add_subcommand("fv", "First-order finite-volume run");
  fvc->add_option("--config", config, "JSON run configuration")->required();
  fvc->add_option("--cells", cells, "Number of cells")->required();
  fvc->add_option("--cfl", cfl, "CFL number in (0, 0.5]")->required();
  fvc->add_option("--out", out, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*sim) return simulate(config, eps, out);
    if (*conv) return convergence(config, out);
    if (*rie) return riemann(left, right, eps, a0, a_kappa);
    if (*aud) return audit(run_dir, entropy, rect);
    if (*fvc) return fv(config, cells, cfl, out);
  } catch (const polyfront::SafeguardAbort& e) {
    std::fprintf(stderr, "safeguard abort: %s\n", e.what());
    return kSafeguard;
  } catch (const polyfront::InvariantViolation& e) {
    std::fprintf(stderr, "invariant violation: %s\n", e.what());
    return kInvariant;
  } catch (const polyfront::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const polyfront::ModelViolation& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const polyfront::DomainError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const polyfront::PreconditionError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return kOk;
}
