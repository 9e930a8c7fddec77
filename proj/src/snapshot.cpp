#include "isoflow/snapshot.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "isoflow/error.hpp"

namespace isoflow {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Reads whitespace-separated tokens and tracks line numbers for messages.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::string token() {
    while (true) {
      if (ls_ >> tok_) return tok_;
      std::string l;
      if (!std::getline(in_, l)) throw ParseError("unexpected end of input", line_);
      ++line_;
      ls_.clear();
      ls_.str(l);
    }
  }
  void expect(const std::string& word) {
    const std::string t = token();
    if (t != word) throw ParseError("expected '" + word + "', got '" + t + "'", line_);
  }
  double number() {
    const std::string t = token();
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != t.size()) throw ParseError("expected a number, got '" + t + "'", line_);
    return v;
  }
  long integer() {
    const std::string t = token();
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != t.size()) throw ParseError("expected an integer, got '" + t + "'", line_);
    return v;
  }
  int line() const { return line_; }

 private:
  std::istream& in_;
  std::istringstream ls_;
  std::string tok_;
  int line_ = 0;
};

QScalar read_qfield(Reader& r) {
  r.expect("qfield");
  const long n = r.integer();
  const long comps = r.integer();
  if (n < 0 || comps != 1) throw ParseError("qfield header must be 'qfield N 1'", r.line());
  QScalar v(static_cast<int>(n));
  for (long i = 0; i < n; ++i) v[static_cast<int>(i)] = r.number();
  return v;
}

CRField read_crfield(Reader& r, const Mesh& mesh) {
  r.expect("crfield");
  const long n = r.integer();
  const long comps = r.integer();
  if (comps != 3) throw ParseError("crfield header must be 'crfield F 3'", r.line());
  if (n != mesh.num_faces())
    throw ParseError("crfield has " + std::to_string(n) + " faces, mesh has " +
                         std::to_string(mesh.num_faces()),
                     r.line());
  CRField v(mesh);
  for (int f = 0; f < n; ++f)
    for (int a = 0; a < 3; ++a) v[f][a] = r.number();
  return v;
}

}  // namespace

void write_qfield(std::ostream& out, const QScalar& v) {
  out << "qfield " << v.size() << " 1\n";
  for (int c = 0; c < v.size(); ++c) out << fmt(v[c]) << "\n";
}

void write_crfield(std::ostream& out, const CRField& v) {
  out << "crfield " << v.size() << " 3\n";
  for (int f = 0; f < v.size(); ++f) out << fmt(v[f][0]) << " " << fmt(v[f][1]) << " " << fmt(v[f][2]) << "\n";
}

QScalar read_qfield(std::istream& in) {
  Reader r(in);
  return read_qfield(r);
}

CRField read_crfield(std::istream& in, const Mesh& mesh) {
  Reader r(in);
  return read_crfield(r, mesh);
}

void write_snapshot(const std::filesystem::path& path, const State& s, double dt) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write '" + path.string() + "'");
  out << "snapshot 1\nstep " << s.k << "\ntime " << fmt(s.t) << "\ndt " << fmt(dt) << "\n";
  write_qfield(out, s.rho);
  write_crfield(out, s.u);
  if (!out) throw InvalidInput("failed writing '" + path.string() + "'");
}

State read_snapshot(const std::filesystem::path& path, const Mesh& mesh, double* dt) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open snapshot '" + path.string() + "'");
  Reader r(in);
  State s;
  try {
    r.expect("snapshot");
    if (r.integer() != 1) throw ParseError("unsupported snapshot version", r.line());
    r.expect("step");
    s.k = static_cast<int>(r.integer());
    r.expect("time");
    s.t = r.number();
    r.expect("dt");
    const double step = r.number();
    if (dt) *dt = step;
    s.rho = read_qfield(r);
    if (s.rho.size() != mesh.num_cells())
      throw ParseError("qfield has " + std::to_string(s.rho.size()) + " cells, mesh has " +
                           std::to_string(mesh.num_cells()),
                       r.line());
    s.u = read_crfield(r, mesh);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
  return s;
}

void write_vtk(const std::filesystem::path& path, const Mesh& mesh, const State& s) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write '" + path.string() + "'");
  const auto& v = mesh.vertices();
  out << "# vtk DataFile Version 3.0\nisoflow step " << s.k << " t " << fmt(s.t)
      << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << v.size() << " double\n";
  for (const auto& x : v) out << fmt(x[0]) << " " << fmt(x[1]) << " " << fmt(x[2]) << "\n";
  out << "CELLS " << mesh.num_cells() << " " << 5 * mesh.num_cells() << "\n";
  for (const auto& c : mesh.cells()) out << "4 " << c[0] << " " << c[1] << " " << c[2] << " " << c[3] << "\n";
  out << "CELL_TYPES " << mesh.num_cells() << "\n";
  for (int c = 0; c < mesh.num_cells(); ++c) out << "10\n";
  out << "CELL_DATA " << mesh.num_cells() << "\nSCALARS density double 1\nLOOKUP_TABLE default\n";
  for (int c = 0; c < mesh.num_cells(); ++c) out << fmt(s.rho[c]) << "\n";
  const QVector avg = cell_average(mesh, s.u);
  out << "VECTORS velocity double\n";
  for (int c = 0; c < mesh.num_cells(); ++c)
    out << fmt(avg[c][0]) << " " << fmt(avg[c][1]) << " " << fmt(avg[c][2]) << "\n";
}

}  // namespace isoflow
