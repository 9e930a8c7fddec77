#pragma once

#include <filesystem>
#include <iosfwd>

#include "isoflow/mesh.hpp"
#include "isoflow/scheme.hpp"
#include "isoflow/spaces.hpp"

namespace isoflow {

/// Field text formats (values printed with 17 significant digits):
///   qfield N 1          then N lines, one value per cell
///   crfield F 3         then F lines "x y z", one vector per face
void write_qfield(std::ostream& out, const QScalar& v);
void write_crfield(std::ostream& out, const CRField& v);
QScalar read_qfield(std::istream& in);
/// Reads a crfield and checks its size against the mesh.
CRField read_crfield(std::istream& in, const Mesh& mesh);

/// State snapshot: "snapshot 1", "step k", "time t", "dt d", then the
/// density qfield and the velocity crfield. d is the step that produced the
/// state, 0 for the initial state.
void write_snapshot(const std::filesystem::path& path, const State& s, double dt = 0.0);
State read_snapshot(const std::filesystem::path& path, const Mesh& mesh, double* dt = nullptr);

/// Legacy VTK unstructured grid with cell density and cell-average velocity.
void write_vtk(const std::filesystem::path& path, const Mesh& mesh, const State& s);

}  // namespace isoflow
