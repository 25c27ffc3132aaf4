#pragma once

#include "wavebem/representation.hpp"

namespace wavebem::bie {

enum class BVPKind { dirichlet, neumann, mixed_1d };

struct MarchConfig {
  quad::QuadratureConfig quad;
  representation::EvalConfig eval;
  int theta_order = 8;            // 3-D flat-element polar sectors
  bool averaging_filter = false;  // two-step smoothing of the newest step
  double cond_limit = 1e14;       // report the system singular beyond this
};

struct StepLog {
  int step = 0;
  double time = 0.0;
  double linf_residual = 0.0;  // post-solve |A x - b| relative to |b|
  double cond_estimate = 0.0;
};

struct MarchResult {
  BoundaryTrace trace;
  std::vector<StepLog> log;
};

// Boundary displacement and velocity given for all steps; fills the normal
// derivative step by step. The step-0 flux may be preset in `data`.
MarchResult march_dirichlet(const BoundaryTrace& data, const InitialData& init,
                            const SourceTerm& src, double c, const MarchConfig& cfg = {});

// Normal derivative given for all steps; fills displacement and velocity.
// Step-0 displacement/velocity may be preset in `data`.
MarchResult march_neumann(const BoundaryTrace& data, const InitialData& init,
                          const SourceTerm& src, double c, const MarchConfig& cfg = {});

// 1-D delayed endpoint equations, stepped from t = 0.
//   dirichlet: u given at both endpoints, fluxes recovered (Volterra step);
//   neumann:   fluxes given, endpoint displacements recovered;
//   mixed_1d:  flux at a1 and displacement at a2 given.
// Rejects dt > d/c, which would skip the retardation window.
BoundaryTrace solve_1d_boundary(const geom::BoundaryMesh& mesh, const quad::TimeGrid& grid,
                                BVPKind kind, const BoundaryTrace& data,
                                const InitialData& init, double c);

}  // namespace wavebem::bie
