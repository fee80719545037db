#include <doctest.h>

#include <map>
#include <set>

#include "dls/basis.hpp"
#include "dls/errors.hpp"
#include "dls/mesh.hpp"

using namespace dls;

namespace {

// Counts interior edges by scanning element edge lists.
int enumerate_interior_edges(const Mesh& mesh) {
  std::map<int, int> uses;
  for (const auto& el : mesh.elements)
    for (int e : el.edges) ++uses[e];
  int interior = 0;
  for (auto [e, count] : uses) {
    CHECK(count <= 2);
    if (count == 2) ++interior;
  }
  return interior;
}

int distinct_globals(const ConnectivityMap& con) {
  std::set<int> seen;
  for (const auto& dofs : con.elements)
    for (const auto& d : dofs) seen.insert(d.global);
  return int(seen.size());
}

}  // namespace

TEST_CASE("uniform mesh counts") {
  auto m1 = uniform_mesh(1);
  CHECK(m1.elements.size() == 1);
  CHECK(m1.boundary_edge_count() == 4);
  CHECK(m1.interior_edge_count() == 0);

  auto m2 = uniform_mesh(2);
  CHECK(m2.elements.size() == 4);
  CHECK(m2.interior_edge_count() == 4);
  CHECK(m2.boundary_edge_count() == 8);

  for (int n : {3, 4, 7}) {
    auto m = uniform_mesh(n);
    CHECK(int(m.elements.size()) == n * n);
    CHECK(m.interior_edge_count() == 2 * n * (n - 1));
    CHECK(enumerate_interior_edges(m) == 2 * n * (n - 1));
    CHECK(m.boundary_edge_count() == 4 * n);
    CHECK(m.h == doctest::Approx(1.0 / n));
  }
  CHECK_THROWS_AS(uniform_mesh(0), ConfigError);
}

TEST_CASE("shared edges see opposite outward signs") {
  auto mesh = uniform_mesh(4);
  std::map<int, std::vector<std::pair<int, int>>> seen;  // edge -> (element, local edge)
  for (const auto& el : mesh.elements)
    for (int e = 0; e < 4; ++e) seen[el.edges[e]].push_back({el.id, e});
  for (const auto& edge : mesh.edges) {
    const auto& users = seen[edge.id];
    if (edge.boundary()) {
      CHECK(users.size() == 1);
      continue;
    }
    REQUIRE(users.size() == 2);
    CHECK(outward_sign[users[0].second] == -outward_sign[users[1].second]);
    // The element on the -normal side sees an outward normal equal to the global one.
    for (auto [k, e] : users) {
      const int side = (k == edge.elements[0]) ? +1 : -1;
      CHECK(outward_sign[e] == side);
    }
    // Geometry: the edge endpoints are vertices of both elements.
    for (auto [k, e] : users) {
      std::set<int> verts(mesh.elements[k].vertices.begin(), mesh.elements[k].vertices.end());
      CHECK(verts.count(edge.v0) == 1);
      CHECK(verts.count(edge.v1) == 1);
    }
  }
}

TEST_CASE("refinement nesting") {
  for (int n : {1, 2, 3}) {
    auto coarse = uniform_mesh(n);
    auto fine = uniform_mesh(2 * n);
    std::map<int, int> children;
    for (const auto& child : fine.elements) {
      int parents = 0;
      for (const auto& parent : coarse.elements) {
        if (parent.contains(child.x0, child.y0) && parent.contains(child.x0 + child.h, child.y0 + child.h)) {
          ++parents;
          ++children[parent.id];
        }
      }
      CHECK(parents == 1);
    }
    for (const auto& parent : coarse.elements) CHECK(children[parent.id] == 4);
  }
}

TEST_CASE("layout sizes") {
  auto m1 = uniform_mesh(1);
  auto [h1, c1] = build_layout(m1, SpaceKind::h1_conforming, 1);
  CHECK(h1.size == 4);
  CHECK(h1.boundary.size() == 4);

  auto m2 = uniform_mesh(2);
  auto [h2, c2] = build_layout(m2, SpaceKind::h1_conforming, 1);
  CHECK(h2.size == 9);
  CHECK(h2.boundary.size() == 8);

  auto [hd, cd] = build_layout(m2, SpaceKind::hdiv_conforming, 2);
  CHECK(hd.size == 40);
  CHECK(distinct_globals(cd) == 40);

  for (int n : {1, 2, 3, 4})
    for (int p : {1, 2, 3, 4}) {
      auto m = uniform_mesh(n);
      const std::map<SpaceKind, int> expected = {
          {SpaceKind::h1_conforming, (n * p + 1) * (n * p + 1)},
          {SpaceKind::hdiv_conforming, 2 * n * p * (n * p + 1)},
          {SpaceKind::l2_broken, n * n * p * p},
          {SpaceKind::trace_h_half, (n + 1) * (n + 1) + 2 * n * (n + 1) * (p - 1)},
          {SpaceKind::trace_h_minus_half, 2 * n * (n + 1) * p},
          {SpaceKind::h1_broken_test, n * n * (p + 1) * (p + 1)},
          {SpaceKind::hdiv_broken_test, n * n * 2 * p * (p + 1)},
      };
      for (auto [kind, size] : expected) {
        auto [layout, con] = build_layout(m, kind, p);
        CHECK(layout.size == size);
        CHECK(distinct_globals(con) == size);
        CHECK(layout.size == int(m.vertices.size()) * layout.per_vertex +
                                 int(m.edges.size()) * layout.per_edge +
                                 int(m.elements.size()) * layout.per_interior);
        for (int g : layout.boundary) CHECK((g >= 0 && g < layout.size));
        for (const auto& dofs : con.elements) CHECK(int(dofs.size()) == layout.local_size);
      }
    }
  CHECK_THROWS_AS(build_layout(m1, SpaceKind::h1_conforming, 0), UnsupportedSpace);
}

TEST_CASE("broken layouts share nothing") {
  auto m = uniform_mesh(3);
  for (auto kind : {SpaceKind::l2_broken, SpaceKind::h1_broken_test, SpaceKind::hdiv_broken_test}) {
    auto [layout, con] = build_layout(m, kind, 2);
    std::map<int, int> owner;
    for (int k = 0; k < int(con.elements.size()); ++k)
      for (const auto& d : con[k]) {
        CHECK(owner.count(d.global) == 0);
        owner[d.global] = k;
      }
    CHECK(layout.boundary.empty());
  }
}

TEST_CASE("conforming layouts share edge DOFs between neighbours") {
  auto m = uniform_mesh(3);
  for (auto kind : {SpaceKind::h1_conforming, SpaceKind::hdiv_conforming, SpaceKind::trace_h_half,
                    SpaceKind::trace_h_minus_half}) {
    auto [layout, con] = build_layout(m, kind, 3);
    const int nv = 4 * layout.per_vertex;
    for (const auto& edge : m.edges) {
      if (edge.boundary()) continue;
      std::vector<std::vector<LocalDof>> seen;
      for (int k : edge.elements) {
        const auto& el = m.elements[k];
        for (int e = 0; e < 4; ++e)
          if (el.edges[e] == edge.id) {
            std::vector<LocalDof> dofs;
            for (int j = 0; j < layout.per_edge; ++j) dofs.push_back(con[k][nv + e * layout.per_edge + j]);
            seen.push_back(dofs);
          }
      }
      REQUIRE(seen.size() == 2);
      for (int j = 0; j < layout.per_edge; ++j) {
        CHECK(seen[0][j].global == seen[1][j].global);
        const bool signed_space = kind == SpaceKind::hdiv_conforming || kind == SpaceKind::trace_h_minus_half;
        CHECK(seen[0][j].sign * seen[1][j].sign == (signed_space ? -1 : 1));
      }
    }
  }
}

TEST_CASE("H1 mass matrix partition of unity") {
  for (int n : {1, 2, 3})
    for (int p : {1, 2, 3}) {
      auto mesh = uniform_mesh(n);
      auto [layout, con] = build_layout(mesh, SpaceKind::h1_conforming, p);
      const auto rule = tensor_rule(p + 2);
      const auto master = eval_basis(MasterSpace::W, p, rule.points);
      std::vector<double> mass(std::size_t(layout.size) * layout.size, 0.0);
      for (const auto& el : mesh.elements) {
        const auto& dofs = con[el.id];
        for (int a = 0; a < layout.local_size; ++a)
          for (int b = 0; b < layout.local_size; ++b) {
            double s = 0;
            for (int k = 0; k < rule.size(); ++k) s += rule.weights[k] * master(a, k) * master(b, k);
            mass[std::size_t(dofs[a].global) * layout.size + dofs[b].global] += s * el.h * el.h;
          }
      }
      double total = 0;
      for (int i = 0; i < layout.size; ++i)
        for (int j = 0; j < layout.size; ++j)
          CHECK(mass[std::size_t(i) * layout.size + j] ==
                doctest::Approx(mass[std::size_t(j) * layout.size + i]).epsilon(1e-14));
      const int vertices = (n + 1) * (n + 1);
      for (int v = 0; v < vertices; ++v) {
        double row = 0;
        for (int w = 0; w < vertices; ++w) row += mass[std::size_t(v) * layout.size + w];
        total += row;
        // Integral of the hat function: a quarter of each adjacent element.
        int adjacent = 0;
        for (const auto& el : mesh.elements)
          for (int c : el.vertices) adjacent += (c == v);
        CHECK(row == doctest::Approx(adjacent * mesh.h * mesh.h / 4).epsilon(1e-13));
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
    }
}
