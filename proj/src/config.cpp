#include "isoflow/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "isoflow/error.hpp"

namespace isoflow {

namespace {

std::vector<std::string> tokens(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

struct Parser {
  std::string key;
  int line;

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("key '" + key + "': " + what, line);
  }
  double number(const std::string& t) const {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || end != t.data() + t.size()) fail("expected a number, got '" + t + "'");
    return v;
  }
  long integer(const std::string& t) const {
    long v = 0;
    const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || end != t.data() + t.size()) fail("expected an integer, got '" + t + "'");
    return v;
  }
  std::vector<std::string> count(const std::string& value, std::size_t lo, std::size_t hi) const {
    auto t = tokens(value);
    if (t.size() < lo || t.size() > hi) {
      if (lo == hi) fail("expected " + std::to_string(lo) + " value(s)");
      fail("expected " + std::to_string(lo) + " to " + std::to_string(hi) + " values");
    }
    return t;
  }
  double one_number(const std::string& v) const { return number(count(v, 1, 1)[0]); }
  long one_integer(const std::string& v) const { return integer(count(v, 1, 1)[0]); }
  bool boolean(const std::string& v) const {
    const std::string t = count(v, 1, 1)[0];
    if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
    if (t == "false" || t == "no" || t == "off" || t == "0") return false;
    fail("expected true or false, got '" + t + "'");
  }
  std::string word(const std::string& v) const { return count(v, 1, 1)[0]; }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

const char* to_string(StudyKind k) {
  switch (k) {
    case StudyKind::none: return "none";
    case StudyKind::energy: return "energy";
    case StudyKind::consistency: return "consistency";
    case StudyKind::mms_convergence: return "mms-convergence";
    case StudyKind::probes: return "probes";
  }
  return "none";
}

void RunConfig::validate() const {
  params.validate();
  if (mesh.empty()) {
    for (int k : n)
      if (k < 1) throw InvalidInput("n must be positive");
    if ((extents.array() <= 0.0).any()) throw InvalidInput("extents must be positive");
  }
  if (!(t_end >= 0.0)) throw InvalidInput("t_end must be nonnegative");
  if (t_end == 0.0 && steps < 1) throw InvalidInput("need t_end > 0 or steps >= 1");
  if (save_every < 0) throw InvalidInput("save_every must be nonnegative");
  if (initial != "constant" && initial != "gaussian_bump" && initial != "random" &&
      initial != "manufactured")
    throw InvalidInput("unknown initial data '" + initial + "'");
  if (!(initial_density > 0.0)) throw InvalidInput("initial_density must be positive");
  if (!(bump_width > 0.0)) throw InvalidInput("bump_width must be positive");
  for (std::size_t i = 1; i < levels.size(); ++i)
    if (levels[i] <= levels[i - 1]) throw InvalidInput("levels must be strictly increasing");
  for (int l : levels)
    if (l < 1) throw InvalidInput("levels must be positive");
  if ((study == StudyKind::consistency || study == StudyKind::mms_convergence) && levels.size() < 3)
    throw InvalidInput("fitted studies need at least 3 levels");
  if (study == StudyKind::mms_convergence && initial != "manufactured")
    throw InvalidInput("mms-convergence needs initial = manufactured");
  if ((subbox.upper.array() <= subbox.lower.array()).any()) throw InvalidInput("subbox is empty");
}

RunConfig parse_config(std::istream& in) {
  RunConfig c;
  std::map<std::string, std::function<void(const Parser&, const std::string&)>> keys{
      {"mesh", [&](const Parser& p, const std::string& v) { c.mesh = p.word(v); }},
      {"n",
       [&](const Parser& p, const std::string& v) {
         auto t = p.count(v, 1, 3);
         if (t.size() == 2) p.fail("expected 1 or 3 values");
         for (int i = 0; i < 3; ++i) {
           const long k = p.integer(t[t.size() == 1 ? 0 : i]);
           if (k < 1 || k > 4096) p.fail("cells per axis must be in [1, 4096]");
           c.n[i] = static_cast<int>(k);
         }
       }},
      {"extents",
       [&](const Parser& p, const std::string& v) {
         auto t = p.count(v, 3, 3);
         for (int i = 0; i < 3; ++i) c.extents[i] = p.number(t[i]);
       }},
      {"a", [&](const Parser& p, const std::string& v) { c.params.a = p.one_number(v); }},
      {"gamma", [&](const Parser& p, const std::string& v) { c.params.gamma = p.one_number(v); }},
      {"mu", [&](const Parser& p, const std::string& v) { c.params.mu = p.one_number(v); }},
      {"eta", [&](const Parser& p, const std::string& v) { c.params.eta = p.one_number(v); }},
      {"alpha",
       [&](const Parser& p, const std::string& v) {
         if (p.word(v) == "auto")
           c.params.alpha.reset();
         else
           c.params.alpha = p.one_number(v);
       }},
      {"ct", [&](const Parser& p, const std::string& v) { c.params.ct = p.one_number(v); }},
      {"dt",
       [&](const Parser& p, const std::string& v) {
         if (p.word(v) == "auto")
           c.params.dt.reset();
         else
           c.params.dt = p.one_number(v);
       }},
      {"dt_rule",
       [&](const Parser& p, const std::string& v) {
         const std::string w = p.word(v);
         if (w == "fixed")
           c.params.dt_rule = DtRule::fixed;
         else if (w == "cfl")
           c.params.dt_rule = DtRule::cfl;
         else
           p.fail("expected fixed or cfl");
       }},
      {"cfl", [&](const Parser& p, const std::string& v) { c.params.cfl = p.one_number(v); }},
      {"tol", [&](const Parser& p, const std::string& v) { c.params.tol = p.one_number(v); }},
      {"max_newton",
       [&](const Parser& p, const std::string& v) { c.params.max_newton = static_cast<int>(p.one_integer(v)); }},
      {"linear_solver",
       [&](const Parser& p, const std::string& v) {
         const std::string w = p.word(v);
         if (w == "automatic")
           c.params.linear_solver = LinearSolverKind::automatic;
         else if (w == "direct")
           c.params.linear_solver = LinearSolverKind::direct;
         else if (w == "iterative")
           c.params.linear_solver = LinearSolverKind::iterative;
         else
           p.fail("expected automatic, direct or iterative");
       }},
      {"fixed_point_only",
       [&](const Parser& p, const std::string& v) { c.params.fixed_point_only = p.boolean(v); }},
      {"t_end", [&](const Parser& p, const std::string& v) { c.t_end = p.one_number(v); }},
      {"steps", [&](const Parser& p, const std::string& v) { c.steps = static_cast<int>(p.one_integer(v)); }},
      {"initial", [&](const Parser& p, const std::string& v) { c.initial = p.word(v); }},
      {"initial_density",
       [&](const Parser& p, const std::string& v) { c.initial_density = p.one_number(v); }},
      {"bump_width", [&](const Parser& p, const std::string& v) { c.bump_width = p.one_number(v); }},
      {"mms_case", [&](const Parser& p, const std::string& v) { c.mms_case = p.word(v); }},
      {"output_dir", [&](const Parser& p, const std::string& v) { c.output_dir = p.word(v); }},
      {"save_every",
       [&](const Parser& p, const std::string& v) { c.save_every = static_cast<int>(p.one_integer(v)); }},
      {"vtk", [&](const Parser& p, const std::string& v) { c.vtk = p.boolean(v); }},
      {"reproducible", [&](const Parser& p, const std::string& v) { c.reproducible = p.boolean(v); }},
      {"seed",
       [&](const Parser& p, const std::string& v) {
         const long s = p.one_integer(v);
         if (s < 0) p.fail("seed must be nonnegative");
         c.seed = static_cast<std::uint64_t>(s);
       }},
      {"study",
       [&](const Parser& p, const std::string& v) {
         const std::string w = p.word(v);
         if (w == "none")
           c.study = StudyKind::none;
         else if (w == "energy")
           c.study = StudyKind::energy;
         else if (w == "consistency")
           c.study = StudyKind::consistency;
         else if (w == "mms-convergence" || w == "mms")
           c.study = StudyKind::mms_convergence;
         else if (w == "probes")
           c.study = StudyKind::probes;
         else
           p.fail("expected none, energy, consistency, mms-convergence or probes");
       }},
      {"levels",
       [&](const Parser& p, const std::string& v) {
         c.levels.clear();
         for (const auto& t : p.count(v, 1, 64)) c.levels.push_back(static_cast<int>(p.integer(t)));
       }},
      {"gammas",
       [&](const Parser& p, const std::string& v) {
         c.gammas.clear();
         for (const auto& t : p.count(v, 1, 64)) c.gammas.push_back(p.number(t));
       }},
      {"subbox",
       [&](const Parser& p, const std::string& v) {
         auto t = p.count(v, 6, 6);
         for (int i = 0; i < 3; ++i) {
           c.subbox.lower[i] = p.number(t[i]);
           c.subbox.upper[i] = p.number(t[i + 3]);
         }
         c.subbox_set = true;
       }},
  };

  std::map<std::string, int> seen;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto eq = raw.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(raw.substr(0, eq));
    const std::string value = trim(raw.substr(eq + 1));
    const auto it = keys.find(key);
    if (it == keys.end()) throw ParseError("unknown key '" + key + "'", line);
    if (seen.count(key))
      throw ParseError("key '" + key + "' repeated (first on line " + std::to_string(seen[key]) + ")",
                       line);
    seen[key] = line;
    const Parser parser{key, line};
    if (value.empty()) parser.fail("missing value");
    it->second(parser, value);
  }
  if (!c.subbox_set) {
    c.subbox.lower = 0.25 * c.extents;
    c.subbox.upper = 0.75 * c.extents;
  }
  c.validate();
  return c;
}

RunConfig read_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config file '" + path.string() + "'");
  return parse_config(in);
}

std::string write_config(const RunConfig& c) {
  std::ostringstream o;
  const SchemeParams& p = c.params;
  if (!c.mesh.empty()) o << "mesh = " << c.mesh << "\n";
  o << "n = " << c.n[0] << " " << c.n[1] << " " << c.n[2] << "\n";
  o << "extents = " << fmt(c.extents[0]) << " " << fmt(c.extents[1]) << " " << fmt(c.extents[2]) << "\n";
  o << "a = " << fmt(p.a) << "\n";
  o << "gamma = " << fmt(p.gamma) << "\n";
  o << "mu = " << fmt(p.mu) << "\n";
  o << "eta = " << fmt(p.eta) << "\n";
  o << "alpha = " << (p.alpha ? fmt(*p.alpha) : "auto") << "\n";
  o << "ct = " << fmt(p.ct) << "\n";
  o << "dt = " << (p.dt ? fmt(*p.dt) : "auto") << "\n";
  o << "dt_rule = " << (p.dt_rule == DtRule::fixed ? "fixed" : "cfl") << "\n";
  o << "cfl = " << fmt(p.cfl) << "\n";
  o << "tol = " << fmt(p.tol) << "\n";
  o << "max_newton = " << p.max_newton << "\n";
  o << "linear_solver = "
    << (p.linear_solver == LinearSolverKind::automatic
            ? "automatic"
            : p.linear_solver == LinearSolverKind::direct ? "direct" : "iterative")
    << "\n";
  o << "fixed_point_only = " << (p.fixed_point_only ? "true" : "false") << "\n";
  o << "t_end = " << fmt(c.t_end) << "\n";
  o << "steps = " << c.steps << "\n";
  o << "initial = " << c.initial << "\n";
  o << "initial_density = " << fmt(c.initial_density) << "\n";
  o << "bump_width = " << fmt(c.bump_width) << "\n";
  o << "mms_case = " << c.mms_case << "\n";
  o << "output_dir = " << c.output_dir << "\n";
  o << "save_every = " << c.save_every << "\n";
  o << "vtk = " << (c.vtk ? "true" : "false") << "\n";
  o << "reproducible = " << (c.reproducible ? "true" : "false") << "\n";
  o << "seed = " << c.seed << "\n";
  o << "study = " << to_string(c.study) << "\n";
  if (!c.levels.empty()) {
    o << "levels =";
    for (int l : c.levels) o << " " << l;
    o << "\n";
  }
  if (!c.gammas.empty()) {
    o << "gammas =";
    for (double g : c.gammas) o << " " << fmt(g);
    o << "\n";
  }
  o << "subbox = " << fmt(c.subbox.lower[0]) << " " << fmt(c.subbox.lower[1]) << " "
    << fmt(c.subbox.lower[2]) << " " << fmt(c.subbox.upper[0]) << " " << fmt(c.subbox.upper[1]) << " "
    << fmt(c.subbox.upper[2]) << "\n";
  return o.str();
}

}  // namespace isoflow
