#pragma once

#include <functional>
#include <span>
#include <vector>

#include "wavebem/common.hpp"
#include "wavebem/geometry.hpp"

namespace wavebem::quad {

struct TimeGrid {
  double dt = 0.0;
  int n_steps = 0;

  TimeGrid() = default;
  TimeGrid(double dt_, int n_steps_) : dt(dt_), n_steps(n_steps_) {
    if (!(dt > 0.0) || n_steps < 1) throw validation_error("TimeGrid: dt > 0 and n_steps >= 1");
  }
  double time(int k) const { return dt * k; }
  double duration() const { return dt * n_steps; }
  int size() const { return n_steps + 1; }  // stored samples t_0 .. t_n
};

struct QuadratureConfig {
  int gauss_order = 6;         // points per regular element (per dimension)
  int sing_order = 12;         // points for graded / singular rules
  double pv_radius_factor = 1.0;  // principal-value exclusion, in element diameters

  double pv_radius(const geom::BoundaryMesh& mesh) const {
    return pv_radius_factor * mesh.max_element_diameter();
  }
};

// Gauss-Legendre nodes/weights on [-1, 1]; cached, thread-safe.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_rule(int n);

// Map a rule to [a, b] and append to pts/wts.
void gauss_on_interval(int n, double a, double b, std::vector<double>& pts,
                       std::vector<double>& wts);

// ---------------------------------------------------------------------------
// Time integrals with the 1/sqrt(c^2 tau^2 - r^2) front weight.

// Closed forms of  \int_a^b tau^k dtau / sqrt(c^2 tau^2 - r^2),  c a >= r.
double cone_i0(double a, double b, double r, double c);
double cone_i1(double a, double b, double r, double c);
double cone_i2(double a, double b, double r, double c);

// \int_{r/c}^{t} f(tau) dtau / sqrt(c^2 tau^2 - r^2) via the substitution
// tau = (r/c) cosh(theta), which removes the endpoint singularity exactly.
// `breaks` lists interior points where f is only piecewise smooth.
double weakly_singular_time_integral(const std::function<double(double)>& f, double r,
                                     double t, double c, int order = 12,
                                     std::span<const double> breaks = {});

// One linear-in-delay piece of a nodal hat function. For the trace value at
// step m, evaluated retarded at time t, the interpolation weight as a
// function of the delay tau (or of the distance r = c tau) is piecewise
// linear: weight = alpha + beta * tau on [a, b].
struct HatPiece {
  double a, b;       // delay interval
  double alpha, beta;
};

// Up to two pieces of phi_m(t - tau) as a function of tau in [0, t].
// phi_m is the hat at t_m = m dt on the grid 0..n_steps (half hat at m = 0).
int hat_delay_pieces(int m, double t, double dt, int n_steps, HatPiece out[2]);

// ---------------------------------------------------------------------------
// Spatial rules.

// Quadrature points for one element, refined toward the evaluation point x
// (subdivision until element size ~ distance). If `graded` and x lies on the
// element, a graded rule absorbs the weak (log) endpoint singularity.
struct QuadPoint {
  vec3 y;
  double w;
};
void element_quadrature(const geom::BoundaryMesh& mesh, int e, const vec3& x,
                        const QuadratureConfig& cfg, std::vector<QuadPoint>& out);

// \int_{segment, r < ct} g(y) / sqrt(c^2 t^2 - r^2) dS(y); the arc-length
// substitution sigma = rho sin(phi) removes the front (rim) singularity.
double cone_segment_integral(const vec3& p0, const vec3& p1, const vec3& x, double ct,
                             const std::function<double(const vec3&)>& g, int order);

// Principal-value collocation sums. x must lie on the mesh.
enum class PVKernel {
  inv_r_drdn_2d,  // (1/r) dr/dn(y)
  d_invr_dn_3d,   // d(1/r)/dn(y)
};
double pv_boundary_integral(const geom::BoundaryMesh& mesh, const vec3& x,
                            std::span<const double> density, PVKernel kernel,
                            const QuadratureConfig& cfg);

// Retarded surface integral over the active part of a 3-D mesh:
// sum over { y : |y-x| < c t } of weight(x,y) * f(e, y, t - r/c).
enum class RetardedWeight {
  one_over_r,  // 1/r
  dlnr_dn,     // d(ln r)/dn(y)
  dinvr_dn,    // d(1/r)/dn(y)
};
double retarded_surface_integral_3d(
    const geom::BoundaryMesh& mesh, const vec3& x, double t, double c,
    const std::function<double(int, const vec3&, double)>& f, RetardedWeight weight,
    const QuadratureConfig& cfg);

// \int_{|y-x| = ct} g(y) indicator(y) / (c^2 t) dS(y) by a product
// Gauss x uniform rule on the sphere. indicator == nullptr means 1.
double sphere_slice_integral(const vec3& x, double t, double c,
                             const std::function<double(const vec3&)>& g,
                             const geom::DomainIndicator* indicator, int order = 24);

// \int_{r < ct} g(y) indicator(y) / (c sqrt(c^2 t^2 - r^2)) dV(y) in 2-D.
// The radial substitution r = ct sin(phi) removes the rim singularity; the
// indicator enters through exact per-ray cuts, so the result is smooth in t.
double disk_volume_integral_2d(const vec3& x, double t, double c,
                               const std::function<double(const vec3&)>& g,
                               const geom::DomainIndicator* indicator, int radial_order = 24,
                               int angular_order = 64);

// ---------------------------------------------------------------------------
// Flat-element polar decomposition (3-D). Integrals of kernels K(r) over a
// triangle reduce to exact radial primitives between per-direction limits:
// dS = rho drho dtheta and rho drho = r dr on the plane at height z.

// Signed height of x over the (flat) element plane, along the element normal.
double element_height(const geom::BoundaryMesh& mesh, int e, const vec3& x);

// Calls fn(w_theta, r_in, r_out) for each angular node; r spans the chord of
// the triangle cut by the ray, already lifted to 3-D distances from x.
// Returns the signed height of x over the element plane.
double triangle_polar_sectors(const geom::BoundaryMesh& mesh, int e, const vec3& x,
                              int theta_order,
                              const std::function<void(double, double, double)>& fn);

// Radial primitives \int (alpha + beta r) r^{-k} dr for k = 0, 1, 2.
double radial_p0(double alpha, double beta, double ra, double rb);
double radial_p1(double alpha, double beta, double ra, double rb);
double radial_p2(double alpha, double beta, double ra, double rb);

}  // namespace wavebem::quad
