#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace dls {

/// Local edge order used everywhere: bottom, right, top, left.
enum LocalEdge { edge_bottom = 0, edge_right = 1, edge_top = 2, edge_left = 3 };

/// Sign of the outward normal of a local edge relative to the global edge
/// normal (+x for vertical edges, +y for horizontal ones).
inline constexpr std::array<int, 4> outward_sign = {-1, +1, +1, -1};

struct Element {
  int id = 0;
  int i = 0, j = 0;  // column and row in the grid
  double x0 = 0, y0 = 0, h = 1;
  std::array<int, 4> vertices{};  // (x0,y0), (x0+h,y0), (x0+h,y0+h), (x0,y0+h)
  std::array<int, 4> edges{};     // bottom, right, top, left

  bool contains(double x, double y) const {
    return x >= x0 && x <= x0 + h && y >= y0 && y <= y0 + h;
  }
};

struct Edge {
  int id = 0;
  int v0 = 0, v1 = 0;  // v0 is the lower-left endpoint
  bool horizontal = true;
  std::array<int, 2> elements{-1, -1};  // element on the -normal side, then +normal side
  bool boundary() const { return elements[0] < 0 || elements[1] < 0; }
};

/// Uniform n x n partition of the unit square.
struct Mesh {
  int n = 1;
  double h = 1;
  std::vector<std::array<double, 2>> vertices;
  std::vector<Edge> edges;
  std::vector<Element> elements;

  int interior_edge_count() const;
  int boundary_edge_count() const;
};

Mesh uniform_mesh(int n);

enum class SpaceKind {
  h1_conforming,
  hdiv_conforming,
  l2_broken,
  trace_h_half,
  trace_h_minus_half,
  h1_broken_test,
  hdiv_broken_test,
};

std::string to_string(SpaceKind kind);

struct DofLayout {
  SpaceKind kind = SpaceKind::l2_broken;
  int p = 1;
  int per_vertex = 0;
  int per_edge = 0;
  int per_interior = 0;
  int size = 0;        // global N
  int local_size = 0;  // DOFs per element
  std::vector<int> boundary;        // sorted global indices on the domain boundary
  std::vector<char> boundary_mask;  // size N
  std::vector<char> local_bubble;   // per local DOF: supported in one element only
};

struct LocalDof {
  int global = 0;
  int sign = 1;
};

/// Con_K for every element: local DOF -> (global index, orientation sign).
struct ConnectivityMap {
  std::vector<std::vector<LocalDof>> elements;
  const std::vector<LocalDof>& operator[](int k) const { return elements[k]; }
};

std::pair<DofLayout, ConnectivityMap> build_layout(const Mesh& mesh, SpaceKind kind, int p);

}  // namespace dls
