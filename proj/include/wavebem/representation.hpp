#pragma once

#include "wavebem/quadrature.hpp"
#include "wavebem/trace.hpp"

namespace wavebem::representation {

// The 2-D kernels admit two equivalent integral arrangements: time-outer
// (integrate over the retarded band in time, then over the active boundary)
// and space-outer (per boundary point, exact time integrals). `automatic`
// picks time-outer close to the boundary and space-outer elsewhere.
enum class Form { automatic, time_outer, space_outer };

// Time-integration backend for the space-outer path: exact piecewise closed
// forms of the hat basis, or the cosh-substituted Gauss rule on each piece.
enum class TimeIntegration { closed_form, cosh_gauss };

struct EvalConfig {
  quad::QuadratureConfig quad;
  Form form = Form::automatic;
  TimeIntegration time_integration = TimeIntegration::closed_form;
  int time_order = 8;          // Gauss order per smooth time piece
  int disk_radial_order = 24;  // disk / ball rules for initial data terms
  int disk_angular_order = 64;
  int sphere_order = 24;
  int theta_order = 8;         // flat-element polar sectors (3-D)
  double fd_dt_factor = 1e-4;  // d/dt by centered differences, step = factor * t
};

// All evaluators return the indicator-weighted value: the full field inside
// the domain, half of it on the boundary, zero outside.

double evaluate_1d(const BoundaryTrace& trace, const InitialData& init, double x, double t,
                   double c);

double evaluate_2d(const BoundaryTrace& trace, const InitialData& init, const SourceTerm& src,
                   const vec3& x, double t, double c, const EvalConfig& cfg = {});

double evaluate_3d(const BoundaryTrace& trace, const InitialData& init, const SourceTerm& src,
                   const vec3& x, double t, double c, const EvalConfig& cfg = {});

// Pure initial-data propagation in free space (no boundary terms): the
// Poisson (2-D) and Kirchhoff (3-D) formulas.
double cauchy_2d(const InitialData& init, const vec3& x, double t, double c,
                 const EvalConfig& cfg = {});
double cauchy_3d(const InitialData& init, const vec3& x, double t, double c,
                 const EvalConfig& cfg = {});

// Contribution of initial data and volume sources to the boundary-integral
// right-hand side, in the same normalization as the boundary convolution
// (the 2 pi u / 4 pi u master equations). Shared with the marching solver.
double initial_source_terms_2d(const geom::BoundaryMesh& mesh,
                               const geom::DomainIndicator& ind, const InitialData& init,
                               const SourceTerm& src, const vec3& x, double t, double c,
                               const EvalConfig& cfg);
double initial_source_terms_3d(const geom::BoundaryMesh& mesh,
                               const geom::DomainIndicator& ind, const InitialData& init,
                               const SourceTerm& src, const vec3& x, double t, double c,
                               const EvalConfig& cfg);

// The boundary-induced initial term of the 3-D representation,
// c^-1 d/dt \int_{S_t(x)} u0 dln(r)/dn dS; vanishes once the whole boundary
// is inside the retarded sphere.
double boundary_u0_term_3d(const geom::BoundaryMesh& mesh, const InitialData& init,
                           const vec3& x, double t, double c, const EvalConfig& cfg);

}  // namespace wavebem::representation
