#include "polyfront/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "polyfront/csv.hpp"
#include "polyfront/errors.hpp"

namespace polyfront {

namespace fs = std::filesystem;
using json = nlohmann::json;

DiscretizedData discretize(const RunConfig& cfg, double eps) {
  if (!(eps > 0.0)) throw ConfigError("eps must be > 0");
  return discretize_initial(cfg.initial.s, cfg.initial.c, cfg.initial.k, eps);
}

RunOutput run_simulation(const RunConfig& cfg, double eps) {
  auto start = std::chrono::steady_clock::now();
  FluxModel model = make_model(cfg.flux);
  SimOptions opt;
  // the environment override beats the configured cap
  if (!std::getenv("POLYFRONT_MAX_EVENTS")) opt.max_events = cfg.max_events;
  RunOutput out{Simulation(discretize(cfg, eps), model, opt), {}, 0.0};
  out.sim.advance_to(cfg.T);
  for (const std::string& id : cfg.entropies) {
    out.reports.push_back(audit_entropy(out.sim, entropy_by_id(id)));
  }
  out.wall_seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start)
                         .count();
  return out;
}

double l1_distance(const SolutionProfile& p, const SolutionProfile& q,
                   double a, double b) {
  if (!(b > a)) return 0.0;
  std::vector<double> cuts{a};
  for (double x : p.breaks) {
    if (x > a && x < b) cuts.push_back(x);
  }
  for (double x : q.breaks) {
    if (x > a && x < b) cuts.push_back(x);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  double sum = 0.0;
  for (std::size_t n = 0; n + 1 < cuts.size(); ++n) {
    double w = cuts[n + 1] - cuts[n];
    if (!(w > 0.0)) continue;
    double m = cuts[n] + 0.5 * w;
    State u = p.at(m), v = q.at(m);
    sum += w * (std::abs(u.s - v.s) + std::abs(u.c - v.c) +
                std::abs(u.k - v.k));
  }
  return sum;
}

double l1_distance(const Simulation& p, const Simulation& q, double T,
                   double a, double b, int panels) {
  static const double kNode[5] = {-0.9061798459386640, -0.5384693101056831,
                                  0.0, 0.5384693101056831, 0.9061798459386640};
  static const double kWeight[5] = {0.2369268850561891, 0.4786286704993665,
                                    0.5688888888888889, 0.4786286704993665,
                                    0.2369268850561891};
  double h = T / panels;
  double sum = 0.0;
  for (int m = 0; m < panels; ++m) {
    double mid = (m + 0.5) * h;
    for (int n = 0; n < 5; ++n) {
      double t = mid + 0.5 * h * kNode[n];
      sum += 0.5 * h * kWeight[n] *
             l1_distance(p.profile(t), q.profile(t), a, b);
    }
  }
  return sum;
}

Residual max_residual(const Simulation& sim, const RunConfig& cfg) {
  Residual out;
  for (const TestFunction& phi : cfg.tests()) {
    Residual r = weak_residual(sim, phi, ResidualMode::kExact, &cfg.initial);
    out.r1 = std::max(out.r1, r.r1);
    out.r2 = std::max(out.r2, r.r2);
  }
  return out;
}

namespace {

void fail(ConvergenceRow& row, ErrorKind kind, const char* what,
          std::optional<RunOutput>& run) {
  row.ok = false;
  row.error_kind = kind;
  row.error = what;
  run.reset();
}

}  // namespace

ConvergenceTable convergence_study(const RunConfig& cfg, int threads) {
  const std::size_t n = cfg.eps.size();
  if (n < 3) throw ConfigError("convergence: need at least 3 eps values");
  std::vector<std::optional<RunOutput>> runs(n);
  ConvergenceTable table;
  table.rows.resize(n);

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      ConvergenceRow& row = table.rows[i];
      row.eps = cfg.eps[i];
      try {
        runs[i].emplace(run_simulation(cfg, cfg.eps[i]));
        const RunOutput& out = *runs[i];
        Residual r = max_residual(out.sim, cfg);
        row.r1 = r.r1;
        row.r2 = r.r2;
        if (!out.reports.empty()) {
          row.mu_plus =
              positive_part_measure(out.sim, out.reports.front(), cfg.rect());
        }
        row.events = out.sim.counters().events;
        row.fronts = static_cast<long>(out.sim.record_count());
        row.wall_seconds = out.wall_seconds;
      } catch (const SafeguardAbort& e) {
        fail(row, ErrorKind::kSafeguard, e.what(), runs[i]);
      } catch (const InvariantViolation& e) {
        fail(row, ErrorKind::kInvariant, e.what(), runs[i]);
      } catch (const std::exception& e) {
        fail(row, ErrorKind::kOther, e.what(), runs[i]);
      }
    }
  };
  if (threads <= 0) {
    threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }
  threads = std::min<int>(threads, static_cast<int>(n));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  for (std::size_t i = 0; i < n; ++i) {
    ConvergenceRow& row = table.rows[i];
    table.partial = table.partial || !row.ok;
    row.l1_next = std::numeric_limits<double>::quiet_NaN();
    if (i + 1 < n && runs[i] && runs[i + 1]) {
      row.l1_next = l1_distance(runs[i]->sim, runs[i + 1]->sim, cfg.T,
                                -cfg.window, cfg.window);
    }
  }
  return table;
}

namespace {

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write '" + path.string() + "'");
  os << text;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double entropy_cap(const Simulation& sim, const EntropyReport& rep) {
  const DiscretizedData& d = sim.data();
  return rep.C * sim.time() * (1.0 + d.tv_c() + d.tv_k());
}

void write_reports(const fs::path& dir, const Simulation& sim,
                   const EntropyReport& rep, const Rect& rect) {
  std::ostringstream a, b;
  write_entropy(a, rep, sim.time());
  write_file(dir / ("entropy_" + rep.entropy + ".csv"), a.str());
  write_entropy_summary(b, rep, rect, positive_part_measure(sim, rep, rect),
                        entropy_cap(sim, rep));
  write_file(dir / ("entropy_" + rep.entropy + "_summary.csv"), b.str());
}

}  // namespace

void write_run(const std::string& dir, const RunConfig& cfg, double eps,
               const RunOutput& out) {
  fs::path root(dir);
  fs::create_directories(root);
  json run;
  run["eps"] = eps;
  run["config"] = json::parse(to_json(cfg));
  write_file(root / "run.json", run.dump(2) + "\n");

  std::ostringstream snap, fronts;
  write_snapshots(snap, out.sim, cfg.snapshot_times(), -cfg.window,
                  cfg.window);
  write_file(root / "snapshots.csv", snap.str());
  write_fronts(fronts, out.sim);
  write_file(root / "fronts.csv", fronts.str());
  for (const EntropyReport& rep : out.reports) {
    write_reports(root, out.sim, rep, cfg.rect());
  }
}

RunDir read_run(const std::string& dir) {
  json j;
  try {
    j = json::parse(read_file(fs::path(dir) / "run.json"));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("run.json: ") + e.what());
  }
  if (!j.is_object() || j.size() != 2 || !j.contains("eps") ||
      !j.contains("config") || !j.at("eps").is_number()) {
    throw ConfigError("run.json: expected {eps, config}");
  }
  return {parse_config(j.at("config").dump()), j.at("eps").get<double>()};
}

namespace {

WaveKind parse_kind(const std::string& s) {
  if (s == "S") return WaveKind::kS;
  if (s == "C") return WaveKind::kC;
  if (s == "K") return WaveKind::kK;
  throw InvariantViolation("fronts.csv: unknown kind '" + s + "'");
}

// Re-checks the continuity conditions of every persisted front.
void check_fronts_csv(const std::string& text, const FluxModel& model) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  long row = 0;
  while (std::getline(in, line)) {
    ++row;
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
    if (f.size() != 11) {
      throw InvariantViolation("fronts.csv: malformed row " +
                               std::to_string(row));
    }
    FrontRecord r;
    r.kind = parse_kind(f[1]);
    r.left = {std::stod(f[4]), std::stod(f[5]), std::stod(f[6])};
    r.right = {std::stod(f[7]), std::stod(f[8]), std::stod(f[9])};
    if (!in_unit_cube(r.left) || !in_unit_cube(r.right)) {
      throw InvariantViolation("fronts.csv: state outside [0,1]^3 at row " +
                               std::to_string(row));
    }
    if (front_defect(r, model) > 1e-10) {
      throw InvariantViolation("fronts.csv: continuity defect at row " +
                               std::to_string(row));
    }
    if (r.kind == WaveKind::kK && std::stod(f[3]) != 0.0) {
      throw InvariantViolation("fronts.csv: moving K front at row " +
                               std::to_string(row));
    }
  }
}

}  // namespace

AuditResult audit_run(const std::string& dir, const std::string& id,
                      const Rect& rect) {
  RunDir rd = read_run(dir);
  RunConfig cfg = rd.cfg;
  entropy_by_id(id);  // validates the id before the re-run
  cfg.entropies = {id};
  RunOutput out = run_simulation(cfg, rd.eps);

  std::string saved = read_file(fs::path(dir) / "fronts.csv");
  std::ostringstream again;
  write_fronts(again, out.sim);
  if (again.str() != saved) {
    throw InvariantViolation("fronts.csv is not reproduced by a re-run");
  }
  check_fronts_csv(saved, out.sim.model());

  AuditResult res;
  res.report = out.reports.front();
  res.mu_plus = positive_part_measure(out.sim, res.report, rect);
  res.cap = entropy_cap(out.sim, res.report);
  write_reports(fs::path(dir), out.sim, res.report, rect);
  return res;
}

}  // namespace polyfront
