#pragma once

#include <span>
#include <vector>

#include "dls/formulation.hpp"
#include "dls/mesh.hpp"

namespace dls {

/// A formulation on a mesh: one layout per trial component, concatenated
/// into a single global trial numbering.
struct Discretization {
  Mesh mesh;
  Formulation form;
  std::vector<DofLayout> layouts;
  std::vector<ConnectivityMap> connectivity;
  std::vector<int> offsets;        // global offset per component, size trial.size() + 1
  int size = 0;                    // total global trial DOFs
  std::vector<char> fixed;         // global DOFs carried by the Dirichlet lift
  std::vector<char> local_bubble;  // per local trial DOF
  std::vector<std::vector<LocalDof>> dofs;  // per element, all local trial DOFs

  int local_size() const { return int(local_bubble.size()); }
  int fixed_count() const;
};

Discretization discretize(int n, const Formulation& form);

/// Interpolant of the exact solution: vertex values and edge/interior L2
/// projections for conforming and trace spaces, normal-moment edge DOFs for
/// H(div) and fluxes, orthogonal projection for L2 fields.
Vector<cdouble> interpolate(const Discretization& disc, const ManufacturedCase& data);

/// The interpolant restricted to the fixed DOFs (zero elsewhere).
Vector<cdouble> default_lift(const Discretization& disc, const ManufacturedCase& data);

struct ErrorNorms {
  double l2_scalar = 0;   // u or p
  double l2_vector = 0;   // sigma or velocity
  double grad_scalar = 0;  // only for H1-conforming scalars
  double div_vector = 0;   // only for H(div)-conforming vectors
  double exact_l2 = 0;     // L2 norm of the exact volume fields
  double exact_u = 0;      // U-norm of the exact solution over the same parts

  double l2() const;           // combined absolute L2 error
  double relative_l2() const;  // l2() / exact_l2
  double u_norm() const;       // sqrt(l2^2 + grad^2 + div^2)
};

/// Norms of (exact - discrete) over the volume components, at q + 2 points
/// per direction. With exact == nullptr, norms of the discrete field itself.
ErrorNorms error_norms(const Discretization& disc, std::span<const cdouble> coefficients,
                       const ManufacturedCase* exact);

}  // namespace dls
