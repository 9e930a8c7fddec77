#include "isoflow/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "isoflow/error.hpp"
#include "isoflow/kernels.hpp"
#include "isoflow/probes.hpp"
#include "isoflow/snapshot.hpp"

namespace isoflow {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string step_name(int k, const char* ext) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "step_%06d.%s", k, ext);
  return buf;
}

void ensure_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw InvalidInput("cannot create directory '" + p.string() + "': " + ec.message());
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw InvalidInput("cannot write '" + p.string() + "'");
  return out;
}

void pin_kernels(const RunConfig& c) {
  if (c.reproducible) kernels::force_isa(kernels::Isa::scalar);
}

}  // namespace

Mesh make_mesh(const RunConfig& c, int n) {
  if (!c.mesh.empty()) {
    if (!fs::exists(c.mesh)) throw InvalidInput("mesh file '" + c.mesh + "' does not exist");
    return read_mesh(c.mesh);
  }
  std::array<int, 3> cells = c.n;
  if (n > 0) cells = {n, n, n};
  return build_box_mesh(c.domain(), cells);
}

double gaussian_bump_density(const Box& domain, const Vec3& x, double width) {
  const Vec3 centre = 0.5 * (domain.lower + domain.upper);
  const double l2 = (domain.upper - domain.lower).squaredNorm() / 3.0;
  return 1.0 + 0.5 * std::exp(-(x - centre).squaredNorm() / (width * l2));
}

RunSetup prepare_run(const RunConfig& c, int n) {
  RunSetup s{make_mesh(c, n), c.params, {}, nullptr, {}};
  s.params.forcing = nullptr;
  const Box domain = c.domain();
  auto still = [](const Vec3&) { return Vec3(Vec3::Zero()); };
  if (c.initial == "constant") {
    s.initial = initial_state(s.mesh, [&](const Vec3&) { return c.initial_density; }, still);
  } else if (c.initial == "gaussian_bump") {
    s.initial = initial_state(s.mesh, [&](const Vec3& x) { return gaussian_bump_density(domain, x, c.bump_width); }, still);
  } else if (c.initial == "random") {
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> r(0.5, 2.0), v(-0.5, 0.5);
    s.initial.rho = QScalar(s.mesh.num_cells());
    for (int k = 0; k < s.mesh.num_cells(); ++k) s.initial.rho[k] = c.initial_density * r(rng);
    s.initial.u = CRField(s.mesh);
    for (int f : s.mesh.interior_faces()) s.initial.u[f] = Vec3(v(rng), v(rng), v(rng));
  } else if (c.initial == "manufactured") {
    if (!c.mesh.empty() || (c.extents - Vec3::Ones()).norm() != 0.0)
      throw InvalidInput("manufactured cases are defined on the unit cube");
    auto ref = std::make_shared<const ManufacturedCase>(manufactured_case(c.mms_case));
    s.reference = ref;
    const SchemeParams plain = s.params;
    s.params.forcing = [ref, plain](double t, const Vec3& x) { return ref->forcing(t, x, plain); };
    s.initial = initial_state(s.mesh, [&](const Vec3& x) { return ref->density(0.0, x); },
                              [&](const Vec3& x) { return ref->velocity(0.0, x); });
  } else {
    throw InvalidInput("unknown initial data '" + c.initial + "'");
  }
  if (c.t_end > 0.0)
    s.options.t_end = c.t_end;
  else
    s.options.steps = c.steps;
  return s;
}

std::string steps_csv_header() {
  return "k,t,dt,mass,mass_drift,energy,viscous_dissipation,d_time_density,d_time_velocity,"
         "d_chi_density,d_flux_density,d_velocity_jump,forcing_work,slack";
}

std::string steps_csv_row(const StepReport& r) {
  const DissipationTerms& d = r.dissipation;
  std::string s = std::to_string(r.k);
  for (double v : {r.t, r.dt, r.mass, r.mass_drift, r.energy, r.viscous_dissipation, d.time_density,
                   d.time_velocity, d.chi_density, d.flux_density, d.velocity_jump, r.forcing_work,
                   r.slack})
    s += "," + fmt(v);
  return s;
}

void write_steps_csv(std::ostream& out, const std::vector<StepReport>& rows) {
  out << steps_csv_header() << "\n";
  for (const auto& r : rows) out << steps_csv_row(r) << "\n";
}

double min_density(const Trajectory& tr) {
  double m = std::numeric_limits<double>::infinity();
  for (const State& s : tr.states)
    for (double r : s.rho.values()) m = std::min(m, r);
  return m;
}

RunOutcome run_to_directory(const RunConfig& c, std::ostream& log) {
  pin_kernels(c);
  RunSetup setup = prepare_run(c);
  const fs::path dir = c.output_dir;
  ensure_dir(dir);
  {
    auto out = open_out(dir / "config.txt");
    RunConfig canonical = c;
    canonical.mesh = "mesh.txt";
    out << write_config(canonical);
  }
  write_mesh(dir / "mesh.txt", setup.mesh);
  if (c.save_every > 0) ensure_dir(dir / "snapshots");
  if (c.vtk) ensure_dir(dir / "vtk");

  auto steps = open_out(dir / "steps.csv");
  steps << steps_csv_header() << "\n";
  RunOutcome outcome;
  const StepReport first = initial_report(setup.mesh, setup.initial, setup.params);
  outcome.ledger.push_back(first);
  steps << steps_csv_row(first) << "\n" << std::flush;

  auto save = [&](const State& s, double dt) {
    if (c.save_every > 0) write_snapshot(dir / "snapshots" / step_name(s.k, "txt"), s, dt);
    if (c.vtk) write_vtk(dir / "vtk" / step_name(s.k, "vtk"), setup.mesh, s);
  };
  save(setup.initial, 0.0);
  log << "mesh: " << setup.mesh.num_cells() << " cells, h = " << fmt(setup.mesh.h()) << "\n";

  const Mesh& mesh = setup.mesh;
  const SchemeParams& params = setup.params;
  setup.options.on_step = [&](const State& old, const State& next, double dt, const SolveInfo& info) {
    const StepReport r = step_ledger(mesh, old, next, dt, params, first.mass);
    outcome.ledger.push_back(r);
    steps << steps_csv_row(r) << "\n" << std::flush;
    if (c.save_every > 0 && next.k % c.save_every == 0) save(next, dt);
    log << "step " << next.k << " t = " << fmt(next.t) << " newton " << info.newton_iterations
        << " picard " << info.picard_iterations << " slack " << fmt(r.slack) << "\n";
  };
  outcome.trajectory = run(mesh, setup.initial, params, setup.options);
  const State& last = outcome.trajectory.states.back();
  const bool saved = c.save_every > 0 ? last.k % c.save_every == 0 : last.k == 0;
  if (!saved) save(last, outcome.trajectory.dts.empty() ? 0.0 : outcome.trajectory.dts.back());
  if (!outcome.trajectory.failure.empty()) log << "step failure: " << outcome.trajectory.failure << "\n";
  return outcome;
}

std::vector<StepReport> ledger_from_directory(const fs::path& dir) {
  RunConfig c = read_config(dir / "config.txt");
  c.mesh = (dir / "mesh.txt").string();
  const Mesh mesh = read_mesh(c.mesh);
  SchemeParams params = c.params;
  if (c.initial == "manufactured") {
    auto ref = std::make_shared<const ManufacturedCase>(manufactured_case(c.mms_case));
    const SchemeParams plain = params;
    params.forcing = [ref, plain](double t, const Vec3& x) { return ref->forcing(t, x, plain); };
  }
  std::vector<fs::path> files;
  if (fs::is_directory(dir / "snapshots"))
    for (const auto& e : fs::directory_iterator(dir / "snapshots"))
      if (e.path().extension() == ".txt") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw InvalidInput("no snapshots in '" + (dir / "snapshots").string() + "'");
  Trajectory tr;
  for (const auto& f : files) {
    double dt = 0.0;
    State s = read_snapshot(f, mesh, &dt);
    if (s.k != static_cast<int>(tr.states.size()))
      throw InvalidInput("snapshots are not consecutive steps from 0 (run with save_every = 1)");
    if (!tr.states.empty()) tr.dts.push_back(dt);
    tr.states.push_back(std::move(s));
  }
  return trajectory_ledger(mesh, tr, params);
}

double sweep_alpha(double gamma) { return std::min(0.5, 0.9 * 2.0 * (gamma - 1.0)); }

EnergyLevel energy_level(const RunConfig& c, int n, double gamma) {
  RunConfig cc = c;
  cc.params.gamma = gamma;
  if (!c.params.alpha || gamma != c.params.gamma) cc.params.alpha = sweep_alpha(gamma);
  cc.params.validate();
  RunSetup s = prepare_run(cc, n);
  EnergyLevel e;
  e.n = n;
  e.gamma = gamma;
  e.alpha = cc.params.alpha_value();
  e.h = s.mesh.h();
  const Trajectory tr = run(s.mesh, s.initial, s.params, s.options);
  e.failure = tr.failure;
  e.ledger = trajectory_ledger(s.mesh, tr, s.params);
  e.steps = static_cast<int>(tr.dts.size());
  e.max_slack = -std::numeric_limits<double>::infinity();
  e.min_dissipation = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < e.ledger.size(); ++k) {
    const StepReport& r = e.ledger[k];
    const DissipationTerms& d = r.dissipation;
    e.max_slack = std::max(e.max_slack, r.slack);
    e.min_dissipation = std::min({e.min_dissipation, d.time_density, d.time_velocity, d.chi_density,
                                  d.flux_density, d.velocity_jump});
    e.max_mass_drift = std::max(e.max_mass_drift, std::abs(r.mass_drift));
  }
  e.min_density = min_density(tr);
  return e;
}

ConsistencyLevel consistency_level(const RunConfig& c, int n) {
  RunSetup s = prepare_run(c, n);
  ConsistencyLevel l;
  l.n = n;
  l.h = s.mesh.h();
  const Trajectory tr = run(s.mesh, s.initial, s.params, s.options);
  l.failure = tr.failure;
  l.min_density = min_density(tr);
  if (!tr.failure.empty()) return l;
  l.t_final = tr.states.back().t;
  // The same test functions on every level: psi is supported on [0, t_end).
  const TimeBump psi{c.t_end > 0.0 ? c.t_end : l.t_final};
  for (const auto& tf : default_test_functions(c.domain())) {
    const ConsistencyResiduals r = consistency_residuals(s.mesh, tr, psi, tf, s.params);
    l.functions.push_back(tf.scalar.name);
    l.continuity.push_back(r.continuity);
    l.momentum.push_back(r.momentum);
  }
  return l;
}

ErrorLevel mms_level(const RunConfig& c, int n) {
  RunSetup s = prepare_run(c, n);
  if (!s.reference) throw InvalidInput("mms-convergence needs initial = manufactured");
  ErrorLevel e;
  e.n = n;
  e.h = s.mesh.h();
  const Trajectory tr = run(s.mesh, s.initial, s.params, s.options);
  e.failure = tr.failure;
  e.min_density = min_density(tr);
  if (!tr.failure.empty()) return e;
  const auto ref = s.reference;
  const ErrorNorms err = error_vs_reference(
      s.mesh, tr, [&](double t, const Vec3& x) { return ref->density(t, x); },
      [&](double t, const Vec3& x) { return ref->velocity(t, x); }, c.subbox, s.params);
  e.density = err.density;
  e.velocity = err.velocity;
  return e;
}

namespace {

void write_fit(std::ostream& fits, std::ostream& log, const std::string& quantity,
               const std::string& fn, const std::vector<double>& h, const std::vector<double>& v) {
  bool positive = v.size() >= 3;
  for (double x : v) positive = positive && x > 0.0;
  if (!positive) {
    fits << quantity << "," << fn << ",nan,nan,nan\n";
    log << "  fit " << quantity << " " << fn << ": not enough positive values\n";
    return;
  }
  const LogLogFit f = loglog_fit(h, v);
  fits << quantity << "," << fn << "," << fmt(f.slope) << "," << fmt(f.intercept) << "," << fmt(f.r2) << "\n";
  log << "  fit " << quantity << " " << fn << ": slope " << fmt(f.slope) << " r2 " << fmt(f.r2) << "\n";
}

std::vector<int> study_levels(const RunConfig& c) {
  if (!c.levels.empty()) return c.levels;
  return {c.n[0]};
}

}  // namespace

int run_study(const RunConfig& c, std::ostream& log) {
  pin_kernels(c);
  const fs::path dir = c.output_dir;
  ensure_dir(dir);
  {
    auto out = open_out(dir / "config.txt");
    out << write_config(c);
  }
  const std::vector<int> levels = study_levels(c);
  int status = 0;

  switch (c.study) {
    case StudyKind::none:
      throw InvalidInput("config has no study (set study = energy | consistency | mms-convergence | probes)");

    case StudyKind::energy: {
      auto summary = open_out(dir / "energy.csv");
      summary << "n,gamma,alpha,h,steps,max_slack,min_dissipation,max_mass_drift,min_density,failure\n";
      const std::vector<double> gammas = c.gammas.empty() ? std::vector<double>{c.params.gamma} : c.gammas;
      double worst = -std::numeric_limits<double>::infinity();
      for (double g : gammas)
        for (int n : levels) {
          const EnergyLevel e = energy_level(c, n, g);
          {
            char name[64];
            std::snprintf(name, sizeof name, "steps_n%d_gamma%g.csv", n, g);
            auto out = open_out(dir / name);
            write_steps_csv(out, e.ledger);
          }
          summary << n << "," << fmt(g) << "," << fmt(e.alpha) << "," << fmt(e.h) << "," << e.steps
                  << "," << fmt(e.max_slack) << "," << fmt(e.min_dissipation) << ","
                  << fmt(e.max_mass_drift) << "," << fmt(e.min_density) << "," << e.failure << "\n"
                  << std::flush;
          log << "n " << n << " gamma " << fmt(g) << ": max slack " << fmt(e.max_slack)
              << ", min dissipation entry " << fmt(e.min_dissipation) << "\n";
          worst = std::max(worst, e.max_slack);
          if (!e.failure.empty()) {
            log << "level failed: " << e.failure << "\n";
            return 3;
          }
        }
      log << "max slack over all levels " << fmt(worst) << " (bound 10 tol = " << fmt(10 * c.params.tol)
          << ")\n";
      break;
    }

    case StudyKind::consistency: {
      auto table = open_out(dir / "consistency.csv");
      table << "n,h,function,continuity,momentum\n";
      std::vector<double> hs, total_c, total_m;
      std::vector<ConsistencyLevel> rows;
      for (int n : levels) {
        ConsistencyLevel l = consistency_level(c, n);
        if (!l.failure.empty()) {
          log << "level n = " << n << " failed: " << l.failure << "\n";
          status = 3;
          break;
        }
        double sc = 0.0, sm = 0.0;
        for (std::size_t i = 0; i < l.functions.size(); ++i) {
          table << n << "," << fmt(l.h) << "," << l.functions[i] << "," << fmt(l.continuity[i]) << ","
                << fmt(l.momentum[i]) << "\n";
          sc += l.continuity[i];
          sm += l.momentum[i];
        }
        table << std::flush;
        hs.push_back(l.h);
        total_c.push_back(sc);
        total_m.push_back(sm);
        rows.push_back(std::move(l));
      }
      if (status != 0) return status;
      auto fits = open_out(dir / "fits.csv");
      fits << "quantity,function,slope,intercept,r2\n";
      write_fit(fits, log, "continuity", "all", hs, total_c);
      write_fit(fits, log, "momentum", "all", hs, total_m);
      for (std::size_t i = 0; i < rows.front().functions.size(); ++i) {
        std::vector<double> vc, vm;
        for (const auto& r : rows) {
          vc.push_back(r.continuity[i]);
          vm.push_back(r.momentum[i]);
        }
        write_fit(fits, log, "continuity", rows.front().functions[i], hs, vc);
        write_fit(fits, log, "momentum", rows.front().functions[i], hs, vm);
      }
      break;
    }

    case StudyKind::mms_convergence: {
      auto table = open_out(dir / "errors.csv");
      table << "n,h,density_error,velocity_error,min_density\n";
      std::vector<double> hs, ed, ev;
      for (int n : levels) {
        const ErrorLevel e = mms_level(c, n);
        if (!e.failure.empty()) {
          log << "level n = " << n << " failed: " << e.failure << "\n";
          return 3;
        }
        table << n << "," << fmt(e.h) << "," << fmt(e.density) << "," << fmt(e.velocity) << ","
              << fmt(e.min_density) << "\n"
              << std::flush;
        log << "n " << n << ": density error " << fmt(e.density) << ", velocity error "
            << fmt(e.velocity) << "\n";
        hs.push_back(e.h);
        ed.push_back(e.density);
        ev.push_back(e.velocity);
      }
      auto fits = open_out(dir / "fits.csv");
      fits << "quantity,function,slope,intercept,r2\n";
      write_fit(fits, log, "density_error", c.mms_case, hs, ed);
      write_fit(fits, log, "velocity_error", c.mms_case, hs, ev);
      break;
    }

    case StudyKind::probes: {
      auto table = open_out(dir / "probes.csv");
      table << "probe,n,constant\n";
      for (const auto& s : run_inequality_probes(levels, c.seed)) {
        for (std::size_t i = 0; i < s.levels.size(); ++i)
          table << s.name << "," << s.levels[i] << "," << fmt(s.constants[i]) << "\n";
        log << s.name << ": variation " << fmt(s.variation()) << "\n";
      }
      auto proj = open_out(dir / "projection.csv");
      proj << "n,h,error\n";
      std::vector<double> hs, es;
      for (int n : levels) {
        const Mesh m = build_box_mesh(Box{}, {n, n, n});
        hs.push_back(m.h());
        es.push_back(projection_error(m, projection_sample_field));
        proj << n << "," << fmt(hs.back()) << "," << fmt(es.back()) << "\n";
      }
      if (levels.size() >= 3) {
        auto fits = open_out(dir / "fits.csv");
        fits << "quantity,function,slope,intercept,r2\n";
        write_fit(fits, log, "projection_error", "sample", hs, es);
      }
      break;
    }
  }
  return status;
}

}  // namespace isoflow
