#include "dcpm/mesh_io.hpp"

#include "dcpm/errors.hpp"

#include <fmt/format.h>

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace dcpm {

namespace {

std::vector<std::string_view> tokenize(std::string_view line) {
  if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

int parse_int(std::string_view tok, int line, const char* what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError(line, fmt::format("expected integer {} but got '{}'", what, tok));
  return value;
}

double parse_double(std::string_view tok, int line, const char* what) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(value))
    throw ParseError(line, fmt::format("expected number {} but got '{}'", what, tok));
  return value;
}

DirectedEdge parse_signed_edge(std::string_view tok, int line) {
  bool forward = true;
  if (!tok.empty() && (tok[0] == '+' || tok[0] == '-')) {
    forward = tok[0] == '+';
    tok.remove_prefix(1);
  }
  return {parse_int(tok, line, "edge id"), forward};
}

template <class T>
std::vector<T> dense_by_id(std::map<int, std::pair<T, int>>& items, const char* kind) {
  std::vector<T> out;
  out.reserve(items.size());
  int expected = 0;
  for (auto& [id, item] : items) {
    if (id != expected)
      throw ParseError(item.second, fmt::format("{} ids must be 0..n-1; id {} is missing", kind, expected));
    out.push_back(item.first);
    ++expected;
  }
  return out;
}

// Splits text into (line number, tokens) pairs, skipping blank and comment lines.
std::vector<std::pair<int, std::vector<std::string_view>>> logical_lines(std::string_view text) {
  std::vector<std::pair<int, std::vector<std::string_view>>> out;
  int number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++number;
    auto toks = tokenize(text.substr(pos, end - pos));
    if (!toks.empty()) out.emplace_back(number, std::move(toks));
    pos = end + 1;
  }
  return out;
}

} // namespace

MeshData load_mesh(std::string_view text) {
  auto lines = logical_lines(text);
  if (lines.empty()) throw ParseError(0, "empty mesh file");
  {
    const auto& [n, toks] = lines.front();
    if (toks.size() != 2 || toks[0] != "DCPM" || toks[1] != "1")
      throw ParseError(n, "expected header 'DCPM 1'");
  }

  int vertex_count = -1;
  std::map<int, std::pair<std::pair<Edge, double>, int>> edges;
  std::map<int, std::pair<FaceEdges, int>> faces;

  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& [n, toks] = lines[k];
    if (toks[0] == "v") {
      if (toks.size() != 2) throw ParseError(n, "expected 'v <count>'");
      if (vertex_count >= 0) throw ParseError(n, "duplicate vertex count");
      vertex_count = parse_int(toks[1], n, "vertex count");
      if (vertex_count <= 0) throw ParseError(n, "vertex count must be positive");
    } else if (toks[0] == "e") {
      if (toks.size() != 5) throw ParseError(n, "expected 'e <edge_id> <vertex_a> <vertex_b> <length>'");
      int id = parse_int(toks[1], n, "edge id");
      Edge e{parse_int(toks[2], n, "vertex id"), parse_int(toks[3], n, "vertex id")};
      double length = parse_double(toks[4], n, "length");
      if (id < 0) throw ParseError(n, "negative edge id");
      if (!(length > 0.0)) throw ParseError(n, fmt::format("edge {} length must be positive", id));
      if (!edges.emplace(id, std::pair{std::pair{e, length}, n}).second)
        throw ParseError(n, fmt::format("duplicate edge id {}", id));
    } else if (toks[0] == "f") {
      if (toks.size() != 5) throw ParseError(n, "expected 'f <face_id> <+-edge> <+-edge> <+-edge>'");
      int id = parse_int(toks[1], n, "face id");
      if (id < 0) throw ParseError(n, "negative face id");
      FaceEdges fe{parse_signed_edge(toks[2], n), parse_signed_edge(toks[3], n), parse_signed_edge(toks[4], n)};
      if (!faces.emplace(id, std::pair{fe, n}).second) throw ParseError(n, fmt::format("duplicate face id {}", id));
    } else {
      throw ParseError(n, fmt::format("unknown record '{}'", toks[0]));
    }
  }
  if (vertex_count < 0) throw ParseError(0, "missing 'v <count>' line");

  for (const auto& [id, item] : edges) {
    const Edge& e = item.first.first;
    if (e.a < 0 || e.a >= vertex_count || e.b < 0 || e.b >= vertex_count)
      throw ParseError(item.second, fmt::format("edge {} references a vertex outside 0..{}", id, vertex_count - 1));
  }
  std::vector<int> use_count(edges.empty() ? 0 : edges.rbegin()->first + 1, 0);
  for (const auto& [id, item] : faces)
    for (const DirectedEdge& d : item.first) {
      if (!edges.count(d.edge)) throw ParseError(item.second, fmt::format("face {} references unknown edge {}", id, d.edge));
      ++use_count[d.edge];
    }
  for (const auto& [id, item] : faces) {
    const FaceEdges& fe = item.first;
    auto head = [&](DirectedEdge d) { const Edge& e = edges.at(d.edge).first.first; return d.forward ? e.b : e.a; };
    auto tail = [&](DirectedEdge d) { const Edge& e = edges.at(d.edge).first.first; return d.forward ? e.a : e.b; };
    for (int s = 0; s < 3; ++s)
      if (head(fe[s]) != tail(fe[(s + 1) % 3]))
        throw ParseError(item.second, fmt::format("face {}: directed edges do not chain head-to-tail", id));
  }
  for (const auto& [id, item] : edges) {
    if (use_count[id] > 2)
      throw ParseError(item.second, fmt::format("non-manifold edge {} used by {} face slots", id, use_count[id]));
    if (use_count[id] < 2)
      throw ParseError(item.second, fmt::format("dangling edge {} used by {} face slot(s)", id, use_count[id]));
  }

  auto edge_items = dense_by_id(edges, "edge");
  auto face_list = dense_by_id(faces, "face");
  std::vector<Edge> edge_list;
  EdgeLengths lengths(edge_items.size());
  for (std::size_t e = 0; e < edge_items.size(); ++e) {
    edge_list.push_back(edge_items[e].first);
    lengths[e] = edge_items[e].second;
  }
  return {SurfaceMesh(vertex_count, std::move(edge_list), std::move(face_list)), std::move(lengths)};
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write '{}'", path));
  out << text;
}

MeshData load_mesh_file(const std::string& path) { return load_mesh(read_text_file(path)); }

std::string write_mesh(const SurfaceMesh& mesh, const EdgeLengths& lengths) {
  std::string out = "DCPM 1\n";
  out += fmt::format("v {}\n", mesh.vertex_count());
  for (int e = 0; e < mesh.edge_count(); ++e)
    out += fmt::format("e {} {} {} {:.17g}\n", e, mesh.edge(e).a, mesh.edge(e).b, lengths[e]);
  for (int f = 0; f < mesh.face_count(); ++f) {
    out += fmt::format("f {}", f);
    for (const DirectedEdge& d : mesh.face(f)) out += fmt::format(" {}{}", d.forward ? '+' : '-', d.edge);
    out += '\n';
  }
  return out;
}

FaceCurvature load_face_curvature(std::string_view text, int face_count) {
  FaceCurvature kappa(face_count, 0.0);
  std::vector<bool> seen(face_count, false);
  for (const auto& [n, toks] : logical_lines(text)) {
    if (toks.size() != 3 || toks[0] != "k") throw ParseError(n, "expected 'k <face_id> <value>'");
    int f = parse_int(toks[1], n, "face id");
    if (f < 0 || f >= face_count) throw ParseError(n, fmt::format("face id {} out of range", f));
    if (seen[f]) throw ParseError(n, fmt::format("duplicate curvature for face {}", f));
    double k = parse_double(toks[2], n, "curvature");
    if (!(k < 0.0)) throw ParseError(n, fmt::format("curvature of face {} must be negative", f));
    kappa[f] = k;
    seen[f] = true;
  }
  for (int f = 0; f < face_count; ++f)
    if (!seen[f]) throw ParseError(0, fmt::format("missing curvature for face {}", f));
  return kappa;
}

FaceCurvature parse_kappa_argument(const std::string& arg, int face_count) {
  constexpr std::string_view prefix = "const:";
  if (arg.rfind(prefix, 0) == 0) {
    double k = parse_double(std::string_view(arg).substr(prefix.size()), 0, "curvature");
    if (!(k < 0.0)) throw ParseError(0, "curvature must be negative");
    return FaceCurvature(face_count, k);
  }
  return load_face_curvature(read_text_file(arg), face_count);
}

ConformalFactor load_conformal_factor(std::string_view text, int vertex_count) {
  ConformalFactor u(vertex_count, 0.0);
  std::vector<bool> seen(vertex_count, false);
  for (const auto& [n, toks] : logical_lines(text)) {
    if (toks.size() != 3 || toks[0] != "u") throw ParseError(n, "expected 'u <vertex_id> <value>'");
    int v = parse_int(toks[1], n, "vertex id");
    if (v < 0 || v >= vertex_count) throw ParseError(n, fmt::format("vertex id {} out of range", v));
    if (seen[v]) throw ParseError(n, fmt::format("duplicate value for vertex {}", v));
    u[v] = parse_double(toks[2], n, "value");
    seen[v] = true;
  }
  for (int v = 0; v < vertex_count; ++v)
    if (!seen[v]) throw ParseError(0, fmt::format("missing value for vertex {}", v));
  return u;
}

std::string write_conformal_factor(const ConformalFactor& u) {
  std::string out;
  for (std::size_t v = 0; v < u.size(); ++v) out += fmt::format("u {} {:.17g}\n", v, u[v]);
  return out;
}

} // namespace dcpm
