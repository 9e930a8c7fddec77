#include <sstream>

#include "doctest.h"
#include "isoflow/config.hpp"
#include "isoflow/error.hpp"

using namespace isoflow;

namespace {

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("config: defaults and values") {
  const RunConfig d = parse("");
  CHECK(d.params.a == 1.0);
  CHECK(d.params.gamma == 1.4);
  CHECK(d.params.mu == 0.1);
  CHECK(d.params.eta == 0.0);
  CHECK(d.params.ct == 0.5);
  CHECK(d.n == std::array<int, 3>{4, 4, 4});
  CHECK(d.study == StudyKind::none);

  const RunConfig e = parse(
      "n = 3 4 5\nextents = 2 1 1 # c\ngamma = 1.6\nalpha = 0.3\ndt = 0.01\ndt_rule = cfl\n"
      "linear_solver = direct\nt_end = 0.5\ninitial = random\nseed = 42\nreproducible = no\n");
  CHECK(e.n == std::array<int, 3>{3, 4, 5});
  CHECK(e.extents == Vec3(2, 1, 1));
  CHECK(e.params.gamma == 1.6);
  CHECK(*e.params.alpha == 0.3);
  CHECK(*e.params.dt == 0.01);
  CHECK(e.params.dt_rule == DtRule::cfl);
  CHECK(e.params.linear_solver == LinearSolverKind::direct);
  CHECK(e.t_end == 0.5);
  CHECK(e.seed == 42);
  CHECK(!e.reproducible);
  // sub-box defaults to the middle half of the domain
  CHECK(e.subbox.lower == Vec3(0.5, 0.25, 0.25));
  CHECK(e.subbox.upper == Vec3(1.5, 0.75, 0.75));
}

TEST_CASE("config: round trip through the canonical form") {
  const RunConfig a = parse(
      "n = 6\ngamma = 1.25\neta = 0.01\nt_end = 0.2\nstudy = consistency\nlevels = 2 3 4\n"
      "gammas = 1.2 1.8\nsubbox = 0.1 0.2 0.3 0.6 0.7 0.8\nbump_width = 0.07\n");
  const RunConfig b = parse(write_config(a));
  CHECK(write_config(a) == write_config(b));
  CHECK(b.levels == std::vector<int>{2, 3, 4});
  CHECK(b.gammas == std::vector<double>{1.2, 1.8});
  CHECK(b.bump_width == 0.07);
  CHECK(b.subbox.lower == Vec3(0.1, 0.2, 0.3));
}

TEST_CASE("config: errors name the key and line") {
  CHECK(error_of("gamma = 1.4\ngama = 1.4\n") == "line 2: unknown key 'gama'");
  CHECK(error_of("mu = fast\n") == "line 1: key 'mu': expected a number, got 'fast'");
  CHECK(error_of("n = 2 2\n") == "line 1: key 'n': expected 1 or 3 values");
  CHECK(error_of("n = 0\n") == "line 1: key 'n': cells per axis must be in [1, 4096]");
  CHECK(error_of("gamma\n") == "line 1: expected 'key = value'");
  CHECK(error_of("tol =\n") == "line 1: key 'tol': missing value");
  CHECK(error_of("a = 1\na = 2\n") == "line 2: key 'a' repeated (first on line 1)");
  CHECK(error_of("dt_rule = sometimes\n") == "line 1: key 'dt_rule': expected fixed or cfl");
  CHECK(error_of("vtk = maybe\n") == "line 1: key 'vtk': expected true or false, got 'maybe'");
  // semantic checks after parsing
  CHECK(error_of("gamma = 2.5\n").find("gamma") != std::string::npos);
  CHECK(error_of("levels = 4 2 8\n") == "levels must be strictly increasing");
  CHECK(error_of("study = consistency\nlevels = 2 4\n") == "fitted studies need at least 3 levels");
  CHECK(error_of("initial = swirl\n") == "unknown initial data 'swirl'");
  CHECK_THROWS_AS(read_config("/nonexistent/run.cfg"), InvalidInput);
}
