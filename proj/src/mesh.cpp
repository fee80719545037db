#include "dls/mesh.hpp"

#include <algorithm>

#include "dls/errors.hpp"

namespace dls {

int Mesh::interior_edge_count() const {
  return int(std::count_if(edges.begin(), edges.end(), [](const Edge& e) { return !e.boundary(); }));
}

int Mesh::boundary_edge_count() const { return int(edges.size()) - interior_edge_count(); }

Mesh uniform_mesh(int n) {
  if (n < 1) throw ConfigError("uniform_mesh: n must be positive");
  Mesh mesh;
  mesh.n = n;
  mesh.h = 1.0 / n;
  const int nv = n + 1;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) mesh.vertices.push_back({double(i) / n, double(j) / n});

  const int horizontal = n * (n + 1);
  mesh.edges.resize(2 * horizontal);
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i < n; ++i) {
      Edge& e = mesh.edges[j * n + i];
      e.id = j * n + i;
      e.v0 = j * nv + i;
      e.v1 = j * nv + i + 1;
      e.horizontal = true;
      e.elements = {j > 0 ? (j - 1) * n + i : -1, j < n ? j * n + i : -1};
    }
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= n; ++i) {
      Edge& e = mesh.edges[horizontal + j * nv + i];
      e.id = horizontal + j * nv + i;
      e.v0 = j * nv + i;
      e.v1 = (j + 1) * nv + i;
      e.horizontal = false;
      e.elements = {i > 0 ? j * n + i - 1 : -1, i < n ? j * n + i : -1};
    }

  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      Element k;
      k.id = j * n + i;
      k.i = i;
      k.j = j;
      k.x0 = double(i) / n;
      k.y0 = double(j) / n;
      k.h = mesh.h;
      k.vertices = {j * nv + i, j * nv + i + 1, (j + 1) * nv + i + 1, (j + 1) * nv + i};
      k.edges = {j * n + i, horizontal + j * nv + i + 1, (j + 1) * n + i, horizontal + j * nv + i};
      mesh.elements.push_back(k);
    }
  return mesh;
}

std::string to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::h1_conforming: return "h1-conforming";
    case SpaceKind::hdiv_conforming: return "hdiv-conforming";
    case SpaceKind::l2_broken: return "l2-broken";
    case SpaceKind::trace_h_half: return "trace-h-half";
    case SpaceKind::trace_h_minus_half: return "trace-h-minus-half";
    case SpaceKind::h1_broken_test: return "h1-broken-test";
    case SpaceKind::hdiv_broken_test: return "hdiv-broken-test";
  }
  return "unknown";
}

namespace {

void finish(DofLayout& layout, const Mesh& mesh) {
  layout.boundary_mask.assign(layout.size, 0);
  if (layout.per_vertex > 0) {
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
      const auto [x, y] = mesh.vertices[v];
      if (x == 0.0 || x == 1.0 || y == 0.0 || y == 1.0)
        for (int k = 0; k < layout.per_vertex; ++k) layout.boundary_mask[v * layout.per_vertex + k] = 1;
    }
  }
  const int edge_offset = int(mesh.vertices.size()) * layout.per_vertex;
  for (const Edge& e : mesh.edges)
    if (e.boundary())
      for (int k = 0; k < layout.per_edge; ++k) layout.boundary_mask[edge_offset + e.id * layout.per_edge + k] = 1;
  for (int g = 0; g < layout.size; ++g)
    if (layout.boundary_mask[g]) layout.boundary.push_back(g);
}

}  // namespace

std::pair<DofLayout, ConnectivityMap> build_layout(const Mesh& mesh, SpaceKind kind, int p) {
  if (p < 1) throw UnsupportedSpace("build_layout: order must be at least 1 for " + to_string(kind));
  DofLayout layout;
  layout.kind = kind;
  layout.p = p;
  const int nvert = int(mesh.vertices.size());
  const int nedge = int(mesh.edges.size());
  const int nelem = int(mesh.elements.size());
  // Per-element local layout: vertex part, edge part (per edge), interior part.
  int local_vertex = 0, local_edge = 0, local_interior = 0;
  bool edge_signed = false;

  switch (kind) {
    case SpaceKind::h1_conforming:
      layout.per_vertex = 1;
      layout.per_edge = p - 1;
      layout.per_interior = (p - 1) * (p - 1);
      break;
    case SpaceKind::hdiv_conforming:
      layout.per_edge = p;
      layout.per_interior = 2 * p * (p - 1);
      edge_signed = true;
      break;
    case SpaceKind::l2_broken:
      layout.per_interior = p * p;
      break;
    case SpaceKind::trace_h_half:
      layout.per_vertex = 1;
      layout.per_edge = p - 1;
      break;
    case SpaceKind::trace_h_minus_half:
      layout.per_edge = p;
      edge_signed = true;
      break;
    case SpaceKind::h1_broken_test:
      layout.per_interior = (p + 1) * (p + 1);
      break;
    case SpaceKind::hdiv_broken_test:
      layout.per_interior = 2 * p * (p + 1);
      break;
  }
  local_vertex = layout.per_vertex;
  local_edge = layout.per_edge;
  local_interior = layout.per_interior;
  layout.size = nvert * layout.per_vertex + nedge * layout.per_edge + nelem * layout.per_interior;
  layout.local_size = 4 * local_vertex + 4 * local_edge + local_interior;

  layout.local_bubble.assign(layout.local_size, 0);
  for (int k = 4 * (local_vertex + local_edge); k < layout.local_size; ++k) layout.local_bubble[k] = 1;

  ConnectivityMap con;
  con.elements.resize(nelem);
  const int edge_offset = nvert * layout.per_vertex;
  const int interior_offset = edge_offset + nedge * layout.per_edge;
  for (const Element& el : mesh.elements) {
    auto& dofs = con.elements[el.id];
    dofs.reserve(layout.local_size);
    for (int v = 0; v < 4; ++v)
      for (int k = 0; k < local_vertex; ++k) dofs.push_back({el.vertices[v] * layout.per_vertex + k, 1});
    for (int e = 0; e < 4; ++e)
      for (int k = 0; k < local_edge; ++k)
        dofs.push_back({edge_offset + el.edges[e] * layout.per_edge + k, edge_signed ? outward_sign[e] : 1});
    for (int k = 0; k < local_interior; ++k) dofs.push_back({interior_offset + el.id * layout.per_interior + k, 1});
  }
  finish(layout, mesh);
  return {layout, con};
}

}  // namespace dls
