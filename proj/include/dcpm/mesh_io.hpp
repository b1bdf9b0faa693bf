#pragma once

#include "dcpm/fields.hpp"
#include "dcpm/surface_mesh.hpp"

#include <string>
#include <string_view>

namespace dcpm {

struct MeshData {
  SurfaceMesh mesh;
  EdgeLengths lengths;
};

/// Parse the line-oriented `DCPM 1` mesh format:
///
///   DCPM 1
///   v <count>
///   e <edge_id> <vertex_a> <vertex_b> <length>
///   f <face_id> <+-edge_id> <+-edge_id> <+-edge_id>
///
/// '#' starts a comment. Edge and face ids must be exactly 0..n-1 (any order).
/// Throws ParseError on malformed lines, bad ids, broken face chains, and edges
/// not used by exactly two faces.
MeshData load_mesh(std::string_view text);
MeshData load_mesh_file(const std::string& path);

/// Serialize in the same format, ids ascending, lengths with 17 significant digits.
std::string write_mesh(const SurfaceMesh& mesh, const EdgeLengths& lengths);

/// `k <face_id> <value>` lines, one per face, every value < 0.
FaceCurvature load_face_curvature(std::string_view text, int face_count);
/// Accepts `const:<value>` or a path to a curvature file.
FaceCurvature parse_kappa_argument(const std::string& arg, int face_count);

/// `u <vertex_id> <value>` lines.
ConformalFactor load_conformal_factor(std::string_view text, int vertex_count);
std::string write_conformal_factor(const ConformalFactor& u);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

} // namespace dcpm
