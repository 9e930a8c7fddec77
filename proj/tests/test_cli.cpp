#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "doctest.h"
#include "isoflow/harness.hpp"
#include "isoflow/kernels.hpp"
#include "isoflow/snapshot.hpp"

using namespace isoflow;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("isoflow_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static inline int counter = 0;
};

int cli(const std::string& args, const fs::path& cwd) {
  const std::string cmd = "cd '" + cwd.string() + "' && '" ISOFLOW_CLI "' " + args + " > out.txt 2> err.txt";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::vector<std::vector<std::string>> csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(p);
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> row;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("cli mesh-gen: count, determinism, usage errors") {
  TempDir t;
  REQUIRE(cli("mesh-gen --n 2 2 2 --box 1 1 1 -o a.txt", t.path) == 0);
  REQUIRE(cli("mesh-gen --n 2 2 2 --box 1 1 1 -o b.txt", t.path) == 0);
  const std::string a = slurp(t.path / "a.txt");
  CHECK(a == slurp(t.path / "b.txt"));
  CHECK(read_mesh(t.path / "a.txt").num_cells() == 48);
  CHECK(cli("mesh-gen --n 0 1 1", t.path) == 2);
  CHECK(cli("mesh-gen --n 2 2", t.path) == 2);
  CHECK(cli("mesh-gen", t.path) == 2);
  CHECK(cli("frobnicate", t.path) == 2);
}

TEST_CASE("cli run: constant state, ledger recomputation, library parity") {
  TempDir t;
  write(t.path / "c.cfg", "initial = constant\ninitial_density = 1.5\nn = 3\nsteps = 5\noutput_dir = out\nsave_every = 1\n");
  REQUIRE(cli("run c.cfg", t.path) == 0);
  const auto rows = csv(t.path / "out" / "steps.csv");
  REQUIRE(rows.size() == 7);
  CHECK(rows[0].back() == "slack");
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::abs(std::stod(rows[i].back())) <= 1e-9);
  REQUIRE(cli("ledger out -o again.csv", t.path) == 0);
  CHECK(slurp(t.path / "again.csv") == slurp(t.path / "out" / "steps.csv"));
}

TEST_CASE("cli run: every CSV value matches a direct library computation") {
  TempDir t;
  write(t.path / "b.cfg", "initial = gaussian_bump\nn = 3\nsteps = 3\noutput_dir = out\n");
  REQUIRE(cli("run b.cfg", t.path) == 0);
  RunConfig c = read_config(t.path / "b.cfg");
  kernels::force_isa(kernels::Isa::scalar);
  const RunSetup s = prepare_run(c);
  const Trajectory tr = run(s.mesh, s.initial, s.params, s.options);
  std::ostringstream expected;
  write_steps_csv(expected, trajectory_ledger(s.mesh, tr, s.params));
  CHECK(slurp(t.path / "out" / "steps.csv") == expected.str());
}

TEST_CASE("cli run: reproducible runs give identical ledgers") {
  TempDir t;
  write(t.path / "r.cfg", "initial = random\nseed = 5\nn = 3\nsteps = 2\nreproducible = true\n");
  REQUIRE(cli("run r.cfg -d one", t.path) == 0);
  REQUIRE(cli("run r.cfg -d two", t.path) == 0);
  CHECK(slurp(t.path / "one" / "steps.csv") == slurp(t.path / "two" / "steps.csv"));
  CHECK(slurp(t.path / "one" / "mesh.txt") == slurp(t.path / "two" / "mesh.txt"));
}

TEST_CASE("cli run: input errors") {
  TempDir t;
  write(t.path / "m.cfg", "mesh = missing_mesh.txt\n");
  CHECK(cli("run m.cfg", t.path) == 1);
  CHECK(slurp(t.path / "err.txt").find("missing_mesh.txt") != std::string::npos);
  write(t.path / "k.cfg", "steps = 2\nviscosity = 1\n");
  CHECK(cli("run k.cfg", t.path) == 1);
  CHECK(slurp(t.path / "err.txt").find("unknown key 'viscosity'") != std::string::npos);
  CHECK(cli("run nothere.cfg", t.path) == 1);
  CHECK(slurp(t.path / "err.txt").find("nothere.cfg") != std::string::npos);
  write(t.path / "s.cfg", "study = consistency\nlevels = 2 3\n");
  CHECK(cli("study s.cfg", t.path) == 1);
}

TEST_CASE("cli run: mesh file relative to the config, snapshots and VTK") {
  TempDir t;
  REQUIRE(cli("mesh-gen --n 2 -o cube.txt", t.path) == 0);
  write(t.path / "v.cfg", "mesh = cube.txt\ninitial = gaussian_bump\nsteps = 2\nsave_every = 1\nvtk = true\noutput_dir = out\n");
  REQUIRE(cli("run v.cfg", t.path) == 0);
  CHECK(fs::exists(t.path / "out" / "snapshots" / "step_000002.txt"));
  CHECK(fs::exists(t.path / "out" / "vtk" / "step_000000.vtk"));
  CHECK(slurp(t.path / "out" / "vtk" / "step_000001.vtk").rfind("# vtk DataFile Version 3.0", 0) == 0);
}

TEST_CASE("cli study: energy sweep and probes") {
  TempDir t;
  write(t.path / "e.cfg", "study = energy\nlevels = 2 3\ngammas = 1.2 1.8\nsteps = 2\noutput_dir = e\n");
  REQUIRE(cli("study e.cfg", t.path) == 0);
  const auto rows = csv(t.path / "e" / "energy.csv");
  REQUIRE(rows.size() == 5);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][5]) <= 1e-9);
  CHECK(fs::exists(t.path / "e" / "steps_n3_gamma1.8.csv"));
  write(t.path / "p.cfg", "study = probes\nlevels = 2 3 4\noutput_dir = p\n");
  REQUIRE(cli("study p.cfg", t.path) == 0);
  CHECK(csv(t.path / "p" / "probes.csv").size() == 1 + 8 * 3);
}

TEST_CASE("snapshot round trip is exact") {
  TempDir t;
  const Mesh m = build_box_mesh(Box{Vec3::Zero(), Vec3(1, 2, 1)}, {2, 4, 2});
  State s = initial_state(
      m, [](const Vec3& x) { return 1.0 + std::sin(3 * x[0]) / 3.0; },
      [](const Vec3& x) { return Vec3(x[1] * x[2], -x[0] / 7.0, 1e-17 * x[2]); });
  s.k = 12;
  s.t = 0.1 + 0.2;
  write_snapshot(t.path / "s.txt", s, 1.0 / 3.0);
  double dt = 0.0;
  const State r = read_snapshot(t.path / "s.txt", m, &dt);
  CHECK(r.k == 12);
  CHECK(r.t == s.t);
  CHECK(dt == 1.0 / 3.0);
  CHECK(r.rho.values() == s.rho.values());
  for (int f = 0; f < m.num_faces(); ++f) CHECK(r.u[f] == s.u[f]);
  const Mesh other = build_box_mesh(Box{Vec3::Zero(), Vec3::Ones()}, {1, 1, 1});
  CHECK_THROWS(read_snapshot(t.path / "s.txt", other));
}
