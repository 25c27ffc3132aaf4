#pragma once

#include <functional>

#include "wavebem/quadrature.hpp"
#include "wavebem/trace.hpp"

namespace wavebem::verify {

// Pointwise field state used by the residual checks.
struct FieldState {
  double u = 0.0;
  double u_dot = 0.0;
  vec3 grad;
};
using FieldFn = std::function<FieldState(const vec3&, double)>;

// Geometry of a moving wave front: unit spatial normal n in the direction
// of propagation and the induced characteristic space-time normal
// nu = (n, nu_tau) with nu_tau < 0 and |nu_tau| = |nu_spatial|.
struct FrontGeometry {
  vec3 n;
  vec3 nu_spatial;
  double nu_tau = 0.0;

  static FrontGeometry from_spatial_normal(const vec3& n_unit);
  // Validates the characteristic condition and the sign of nu_tau.
  static FrontGeometry from_spacetime_normal(const vec3& nu_x, double nu_tau);
};

struct JumpResidual {
  double value_jump = 0.0;       // |[u]|
  double compat_jump = 0.0;      // |[du/dt + c n.grad u]|
  double tangential_jump = 0.0;  // max_j |[du/dt n_j + c du/dx_j]|
  bool conclusive = true;
};

// One-sided limits by eps-offset sampling with Richardson extrapolation
// toward the front.
JumpResidual hadamard_jump_check(const FieldFn& field, const vec3& x, double t,
                                 const FrontGeometry& front, double c, double eps);

struct FrontEnergyResidual {
  double energy = 0.0;      // [E] + c^-1 [du/dt du/dn]
  double lagrangian = 0.0;  // [L] - c^-2 (du/dt^- + c du/dn^-) [du/dt]
  bool conclusive = true;
};
FrontEnergyResidual front_energy_jump_check(const FieldFn& field, const vec3& x, double t,
                                            const FrontGeometry& front, double c, double eps);

// Dynamic Gauss identity residuals. The volume term derivatives are taken
// by centered differences with an increment proportional to fd_dt_factor*t.
struct GaussConfig {
  quad::QuadratureConfig quad;
  int angular_order = 256;    // rays for the 2-D disk term
  int sphere_order = 24;      // angular rule for the 3-D slice term
  double fd_dt_factor = 1e-4;
};

// surface term + (1/c) d/dt disk term - 2 pi H_S(x) H(t)
double gauss_residual_2d(const geom::BoundaryMesh& mesh, const vec3& x, double t, double c,
                         const GaussConfig& cfg = {});

// -\oint d(1/r)/dn dS + (1/c) d/dt { slice + log term } - 4 pi H_S(x) H(t)
double gauss_residual_3d(const geom::BoundaryMesh& mesh, const vec3& x, double t, double c,
                         const GaussConfig& cfg = {});

// Static limit valid once the whole boundary is retarded-covered:
// returns -\oint d(1/r)/dn dS, to be compared with 4 pi H_S(x).
double static_gauss_3d(const geom::BoundaryMesh& mesh, const vec3& x,
                       const quad::QuadratureConfig& cfg = {});

// Global balance residuals, normalized by the overall magnitude of the
// participating terms.
struct BalanceConfig {
  int volume_order = 6;     // Gauss order per volume cell
  int volume_refine = 2;    // fan-cell subdivision level
  int time_steps = 256;     // composite time rule
  int surface_order = 4;    // Gauss points per boundary element
};

double energy_balance_residual(const FieldFn& field, const InitialData& init,
                               const SourceTerm& src, const geom::BoundaryMesh& mesh, double c,
                               double t, const BalanceConfig& cfg = {});

double lagrangian_balance_residual(const FieldFn& field, const InitialData& init,
                                   const SourceTerm& src, const geom::BoundaryMesh& mesh,
                                   double c, double t, const BalanceConfig& cfg = {});

}  // namespace wavebem::verify
