#pragma once

#include <array>
#include <complex>
#include <functional>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "dls/basis.hpp"
#include "dls/dense.hpp"
#include "dls/mesh.hpp"

namespace dls {

using cdouble = std::complex<double>;

enum class FormulationKind {
  fosls_strong,
  primal_dpg,
  ultraweak_dpg,
  bubnov_galerkin,
  acoustics_ultraweak,
};

/// Which exact field a trial component approximates.
enum class FieldKind {
  scalar,    // u (Poisson) or p (acoustics), volume or trace
  vector_x,  // x component of sigma (Poisson) or velocity (acoustics)
  vector_y,
  vector,    // full vector field (H(div)) or its normal trace (flux)
};

struct TrialComponent {
  std::string name;
  SpaceKind kind;
  MasterSpace master;
  int p;
  FieldKind field;
  bool dirichlet;  // boundary DOFs are fixed by the lift
};

struct TestComponent {
  std::string name;
  MasterSpace space;
  int p;
  FieldKind field = FieldKind::scalar;  // which slot a Y component fills
};

struct FormulationParameters {
  std::function<double(double, double)> alpha;  // reaction coefficient; empty means 0
  double omega = 0.5001 * 2 * std::numbers::pi;
};

struct Formulation {
  FormulationKind kind = FormulationKind::fosls_strong;
  std::string name;
  int p = 1;
  int dp = 0;
  bool complex_field = false;
  /// Direct elements produce (A_K, f_K) without a Gram matrix.
  bool direct = false;
  FormulationParameters params;
  std::vector<TrialComponent> trial;
  std::vector<TestComponent> test;

  int trial_dim() const;
  int test_dim() const;
  /// Local offset of each trial component (size trial.size() + 1).
  std::vector<int> trial_offsets() const;
  int quadrature_points() const { return p + dp + 2; }
};

Formulation make_formulation(std::string_view name, int p, int dp, FormulationParameters params = {});

/// Continuous least-squares reference for fosls-strong: the minimizer of
/// ||-div sigma + alpha u - f||^2 + ||sigma - grad u||^2 over the same trial
/// space, as a direct element. `quadrature_dp` raises the quadrature to that
/// of a DLS discretization with the same enrichment.
Formulation make_fosls_reference(int p, FormulationParameters params = {}, int quadrature_dp = 0);

std::vector<std::string> formulation_names();

/// Closed-form exact solution and data. Poisson: u, sigma = grad u, f =
/// -div sigma + alpha u. Acoustics: p = u, velocity = sigma,
/// f = i omega p + div sigma, i omega sigma + grad p = 0.
struct ManufacturedCase {
  std::string name;
  bool complex_field = false;
  std::function<double(double, double)> alpha;
  double omega = 0;
  std::function<cdouble(double, double)> u;
  std::function<std::array<cdouble, 2>(double, double)> grad_u;
  std::function<std::array<cdouble, 2>(double, double)> sigma;
  std::function<cdouble(double, double)> div_sigma;
  std::function<cdouble(double, double)> f;
};

ManufacturedCase make_case(std::string_view name, double omega = 0.5001 * 2 * std::numbers::pi);
std::vector<std::string> case_names();

/// Parameters consistent with a case (alpha or omega).
FormulationParameters parameters_for(const ManufacturedCase& c);

/// Raw element matrices in master orientation. DPG elements fill g, b, l;
/// direct elements fill a, f.
template <class D>
struct ElementMatrices {
  DenseMatrix<D> g, b, a;
  Vector<D> l, f;
};

/// Integrates the bilinear form, load and test inner product on one element.
template <class D>
ElementMatrices<D> eval_forms(const Formulation& form, const Element& element, const ManufacturedCase& data);

}  // namespace dls
