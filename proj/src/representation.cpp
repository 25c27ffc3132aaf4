#include "wavebem/representation.hpp"

#include <algorithm>

namespace wavebem::representation {

namespace {

// Cumulative trapezoid of a nodal history up to time s (s within the grid).
double trapezoid_to(const BoundaryTrace& trace, const std::vector<double>& field, int e,
                    double s) {
  double dt = trace.grid.dt;
  if (s <= 0.0) return 0.0;
  int full = std::min(static_cast<int>(s / dt), trace.grid.n_steps);
  double acc = 0.0;
  for (int k = 0; k < full; ++k)
    acc += 0.5 * dt * (trace.at(field, e, k) + trace.at(field, e, k + 1));
  double rem = s - full * dt;
  if (rem > 0.0 && full < trace.grid.n_steps)
    acc += 0.5 * rem * (trace.at(field, e, full) + trace.interp(field, e, s));
  return acc;
}

double fd_step(double t, const EvalConfig& cfg) {
  double d = cfg.fd_dt_factor * std::max(t, 1e-9);
  return std::min(d, 0.45 * t);
}

}  // namespace

// --- 1-D --------------------------------------------------------------------

double evaluate_1d(const BoundaryTrace& trace, const InitialData& init, double x, double t,
                   double c) {
  const geom::BoundaryMesh& mesh = *trace.mesh;
  if (mesh.dim() != 1) throw validation_error("evaluate_1d: 1-D mesh required");
  if (t < 0.0) return 0.0;
  double a1 = mesh.a1(), a2 = mesh.a2();
  double r1 = std::fabs(x - a1), r2 = std::fabs(x - a2);
  double ct = c * t;

  // u_x at the endpoints from the stored normal derivatives: n = -1 at a1.
  auto ux_integral = [&](int e, double s_hi) {
    double v = trapezoid_to(trace, trace.du_dn, e, s_hi);
    return e == 0 ? -v : v;
  };

  double value = 0.0;
  if (ct >= r2) {
    double h = heaviside(ct - r2);
    value += c * h * ux_integral(1, t - r2 / c);
    value -= sgn(x - a2) * h * trace.interp(trace.u, 1, t - r2 / c);
  }
  if (ct >= r1) {
    double h = heaviside(ct - r1);
    value -= c * h * ux_integral(0, t - r1 / c);
    value += sgn(x - a1) * h * trace.interp(trace.u, 0, t - r1 / c);
  }

  if (!init.is_zero) {
    double lo = std::max(a1, x - ct), hi = std::min(a2, x + ct);
    if (hi > lo) {
      const quad::GaussRule& rule = quad::gauss_rule(24);
      double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
      double acc = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc += half * rule.weights[i] * init.eval_u0_dot(vec3{mid + half * rule.nodes[i]});
      value += acc / c;
    }
    auto hs = [&](double y) {
      if (std::fabs(y - a1) <= mesh.geom_tolerance() || std::fabs(y - a2) <= mesh.geom_tolerance())
        return 0.5;
      return (y > a1 && y < a2) ? 1.0 : 0.0;
    };
    value += init.eval_u0(vec3{x + ct}) * hs(x + ct);
    value += init.eval_u0(vec3{x - ct}) * hs(x - ct);
  }
  return 0.5 * value;
}

// --- 2-D --------------------------------------------------------------------

namespace {

// Exact time integrals of one hat basis function against the cone kernels:
// sl: weight 1, dip: weight tau, both over tau in [r/c, t].
struct ConeWeights {
  double sl = 0.0;
  double dip = 0.0;
};

ConeWeights cone_weights_closed(int m, double t, double r, double c,
                                const quad::TimeGrid& grid) {
  ConeWeights w;
  quad::HatPiece pieces[2];
  int n = quad::hat_delay_pieces(m, t, grid.dt, grid.n_steps, pieces);
  for (int i = 0; i < n; ++i) {
    double a = std::max(pieces[i].a, r / c);
    double b = std::min(pieces[i].b, t);
    if (!(b > a)) continue;
    double i0 = quad::cone_i0(a, b, r, c);
    double i1 = quad::cone_i1(a, b, r, c);
    double i2 = quad::cone_i2(a, b, r, c);
    w.sl += pieces[i].alpha * i0 + pieces[i].beta * i1;
    w.dip += pieces[i].alpha * i1 + pieces[i].beta * i2;
  }
  return w;
}

double boundary_convolution_2d(const BoundaryTrace& trace, const vec3& x, double t, double c,
                               const EvalConfig& cfg, bool on_boundary) {
  const geom::BoundaryMesh& mesh = *trace.mesh;
  const quad::TimeGrid& grid = trace.grid;
  double pv_radius = 0.5 * mesh.max_element_diameter();
  double acc = 0.0;
  std::vector<quad::QuadPoint> pts;
  std::vector<double> breaks;
  int m_max = std::min(grid.n_steps, static_cast<int>(t / grid.dt) + 1);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const geom::Element& el = mesh.element(e);
    if (dist(el.centroid, x) - el.diameter > c * t) continue;
    bool skip_dip = on_boundary && dist(el.centroid, x) < pv_radius;
    quad::element_quadrature(mesh, e, x, cfg.quad, pts);
    for (const quad::QuadPoint& q : pts) {
      double r = dist(q.y, x);
      if (r >= c * t || r == 0.0) continue;
      double drdn_r = geom::dr_dn(x, q.y, el.normal) / r;
      double sl = 0.0, dip = 0.0;
      if (cfg.time_integration == TimeIntegration::closed_form) {
        for (int m = 0; m <= m_max; ++m) {
          ConeWeights w = cone_weights_closed(m, t, r, c, grid);
          sl += w.sl * trace.at(trace.du_dn, e, m);
          dip += w.dip * trace.at(trace.u_dot, e, m);
        }
      } else {
        breaks.clear();
        for (int k = 1; k <= grid.n_steps; ++k) {
          double tau = t - grid.time(k);
          if (tau > r / c && tau < t) breaks.push_back(tau);
        }
        std::sort(breaks.begin(), breaks.end());
        sl = quad::weakly_singular_time_integral(
            [&](double tau) { return trace.interp(trace.du_dn, e, t - tau); }, r, t, c,
            cfg.time_order, breaks);
        dip = quad::weakly_singular_time_integral(
            [&](double tau) { return tau * trace.interp(trace.u_dot, e, t - tau); }, r, t, c,
            cfg.time_order, breaks);
      }
      acc += q.w * (sl + (skip_dip ? 0.0 : drdn_r * dip));
    }
  }
  return acc;
}

// Time-outer arrangement: Gauss in tau between retarded grid knots, the
// front-aware segment rule in space at each tau node.
double boundary_convolution_2d_time_outer(const BoundaryTrace& trace, const vec3& x, double t,
                                          double c, const EvalConfig& cfg, bool on_boundary) {
  const geom::BoundaryMesh& mesh = *trace.mesh;
  const quad::TimeGrid& grid = trace.grid;
  double pv_radius = 0.5 * mesh.max_element_diameter();
  std::vector<double> knots{0.0};
  for (int k = grid.n_steps; k >= 1; --k) {
    double tau = t - grid.time(k);
    if (tau > 0.0 && tau < t) knots.push_back(tau);
  }
  knots.push_back(t);
  std::sort(knots.begin(), knots.end());
  std::vector<double> tau_pts, tau_wts;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i)
    quad::gauss_on_interval(cfg.time_order, knots[i], knots[i + 1], tau_pts, tau_wts);
  double acc = 0.0;
  for (std::size_t it = 0; it < tau_pts.size(); ++it) {
    double tau = tau_pts[it];
    double ctau = c * tau;
    double slice = 0.0;
    for (int e = 0; e < mesh.n_elements(); ++e) {
      const geom::Element& el = mesh.element(e);
      if (dist(el.centroid, x) - el.diameter > ctau) continue;
      bool skip_dip = on_boundary && dist(el.centroid, x) < pv_radius;
      const vec3 n = el.normal;
      slice += quad::cone_segment_integral(
          mesh.vertex(e, 0), mesh.vertex(e, 1), x, ctau,
          [&](const vec3& y) {
            double val = trace.interp(trace.du_dn, e, t - tau);
            double r = dist(y, x);
            if (!skip_dip && r > 0.0)
              val += geom::dr_dn(x, y, n) / r * tau * trace.interp(trace.u_dot, e, t - tau);
            return val;
          },
          cfg.quad.sing_order);
    }
    acc += tau_wts[it] * slice;
  }
  return acc;
}

double disk_term(const geom::DomainIndicator* ind, const std::function<double(const vec3&)>& g,
                 const vec3& x, double t, double c, const EvalConfig& cfg) {
  return quad::disk_volume_integral_2d(x, t, c, g, ind, cfg.disk_radial_order,
                                       cfg.disk_angular_order);
}

}  // namespace

double initial_source_terms_2d(const geom::BoundaryMesh& mesh,
                               const geom::DomainIndicator& ind, const InitialData& init,
                               const SourceTerm& src, const vec3& x, double t, double c,
                               const EvalConfig& cfg) {
  double value = 0.0;
  if (!init.is_zero) {
    auto u0 = [&](const vec3& y) { return init.eval_u0(y); };
    auto v0 = [&](const vec3& y) { return init.eval_u0_dot(y); };
    double d = fd_step(t, cfg);
    value += (disk_term(&ind, u0, x, t + d, c, cfg) - disk_term(&ind, u0, x, t - d, c, cfg)) /
             (2.0 * d);
    value += disk_term(&ind, v0, x, t, c, cfg);
    // Boundary-induced initial term over the active boundary.
    double pv_radius = 0.5 * mesh.max_element_diameter();
    bool on_boundary = ind.distance_to_boundary(x) <= mesh.geom_tolerance();
    double ct = c * t;
    for (int e = 0; e < mesh.n_elements(); ++e) {
      const geom::Element& el = mesh.element(e);
      if (on_boundary && dist(el.centroid, x) < pv_radius) continue;
      const vec3 n = el.normal;
      value += quad::cone_segment_integral(
          mesh.vertex(e, 0), mesh.vertex(e, 1), x, ct,
          [&](const vec3& y) {
            double r = dist(y, x);
            if (r == 0.0) return 0.0;
            return init.eval_u0(y) * ct * geom::dr_dn(x, y, n) / r;
          },
          cfg.quad.sing_order);
    }
  }
  if (src.active) {
    // -c \int_0^t dtau \int_{S_tau(x)} G(y, t-tau) dV / sqrt(c^2 tau^2 - r^2)
    std::vector<double> pts, wts;
    int pieces = 8;
    for (int i = 0; i < pieces; ++i)
      quad::gauss_on_interval(cfg.time_order, t * i / pieces, t * (i + 1) / pieces, pts, wts);
    double acc = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double tau = pts[i];
      if (!(tau > 0.0)) continue;
      acc += wts[i] *
             disk_term(&ind, [&](const vec3& y) { return src.eval(y, t - tau); }, x, tau, c, cfg);
    }
    value -= c * c * acc;
  }
  return value;
}

double evaluate_2d(const BoundaryTrace& trace, const InitialData& init, const SourceTerm& src,
                   const vec3& x, double t, double c, const EvalConfig& cfg) {
  const geom::BoundaryMesh& mesh = *trace.mesh;
  if (mesh.dim() != 2) throw validation_error("evaluate_2d: 2-D mesh required");
  if (t < 0.0) throw validation_error("evaluate_2d: t >= 0 required");
  geom::DomainIndicator ind(mesh);
  if (t == 0.0) return init.eval_u0(x) * ind(x);
  bool on_boundary = ind.distance_to_boundary(x) <= mesh.geom_tolerance();
  Form form = cfg.form;
  if (form == Form::automatic)
    form = ind.distance_to_boundary(x) < mesh.max_element_diameter() ? Form::time_outer
                                                                     : Form::space_outer;
  double conv = form == Form::time_outer
                    ? boundary_convolution_2d_time_outer(trace, x, t, c, cfg, on_boundary)
                    : boundary_convolution_2d(trace, x, t, c, cfg, on_boundary);
  double value = c * conv + initial_source_terms_2d(mesh, ind, init, src, x, t, c, cfg);
  return value / two_pi;
}

double cauchy_2d(const InitialData& init, const vec3& x, double t, double c,
                 const EvalConfig& cfg) {
  if (t < 0.0) throw validation_error("cauchy_2d: t >= 0 required");
  if (init.is_zero) return 0.0;
  if (t == 0.0) return init.eval_u0(x);
  const geom::DomainIndicator* sup = init.support;
  auto u0 = [&](const vec3& y) { return init.eval_u0(y); };
  auto v0 = [&](const vec3& y) { return init.eval_u0_dot(y); };
  double d = fd_step(t, cfg);
  double ddt =
      (disk_term(sup, u0, x, t + d, c, cfg) - disk_term(sup, u0, x, t - d, c, cfg)) / (2.0 * d);
  return (ddt + disk_term(sup, v0, x, t, c, cfg)) / two_pi;
}

// --- 3-D --------------------------------------------------------------------

namespace {

// Retarded boundary convolution via flat-element polar sectors and exact
// radial primitives per hat band: single layer (1/r) p, double layer
// -u d(1/r)/dn, velocity layer c^-1 u_dot dln(r)/dn. On flat elements the
// dipole kernels carry the height factor z, so the self element contributes
// exactly zero and the on-boundary limit needs no extra exclusion.
double boundary_convolution_3d(const BoundaryTrace& trace, const vec3& x, double t, double c,
                               const EvalConfig& cfg) {
  const geom::BoundaryMesh& mesh = *trace.mesh;
  const quad::TimeGrid& grid = trace.grid;
  double dt = grid.dt;
  double ct = c * t;
  double z_tol = 1e-12 * mesh.diameter();
  double acc = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const geom::Element& el = mesh.element(e);
    if (dist(el.centroid, x) - el.diameter > ct) continue;
    double z = quad::element_height(mesh, e, x);
    bool dipoles = std::fabs(z) > z_tol;
    double elem_acc = 0.0;
    quad::triangle_polar_sectors(
        mesh, e, x, cfg.theta_order, [&](double w, double r_in, double r_out) {
          r_out = std::min(r_out, ct);
          if (!(r_out > r_in)) return;
          int m_lo = std::max(0, static_cast<int>((t - r_out / c) / dt) - 1);
          int m_hi = std::min(grid.n_steps, static_cast<int>((t - r_in / c) / dt) + 1);
          for (int m = m_lo; m <= m_hi; ++m) {
            quad::HatPiece pieces[2];
            int np = quad::hat_delay_pieces(m, t, dt, grid.n_steps, pieces);
            for (int i = 0; i < np; ++i) {
              double ra = std::max(r_in, c * pieces[i].a);
              double rb = std::min(r_out, c * pieces[i].b);
              if (!(rb > ra)) continue;
              double alpha = pieces[i].alpha;
              double beta = pieces[i].beta / c;
              double term =
                  trace.at(trace.du_dn, e, m) * quad::radial_p0(alpha, beta, ra, rb);
              if (dipoles) {
                term -= trace.at(trace.u, e, m) * z * quad::radial_p2(alpha, beta, ra, rb);
                term -=
                    trace.at(trace.u_dot, e, m) * (z / c) * quad::radial_p1(alpha, beta, ra, rb);
              }
              elem_acc += w * term;
            }
          }
        });
    acc += elem_acc;
  }
  return acc;
}

}  // namespace

double boundary_u0_term_3d(const geom::BoundaryMesh& mesh, const InitialData& init,
                           const vec3& x, double t, double c, const EvalConfig& cfg) {
  if (init.is_zero) return 0.0;
  auto f = [&](int, const vec3& y, double) { return init.eval_u0(y); };
  double d = fd_step(t, cfg);
  double hi = quad::retarded_surface_integral_3d(mesh, x, t + d, c, f,
                                                 quad::RetardedWeight::dlnr_dn, cfg.quad);
  double lo = quad::retarded_surface_integral_3d(mesh, x, t - d, c, f,
                                                 quad::RetardedWeight::dlnr_dn, cfg.quad);
  return (hi - lo) / (2.0 * d * c);
}

double initial_source_terms_3d(const geom::BoundaryMesh& mesh,
                               const geom::DomainIndicator& ind, const InitialData& init,
                               const SourceTerm& src, const vec3& x, double t, double c,
                               const EvalConfig& cfg) {
  double value = 0.0;
  if (!init.is_zero) {
    value += boundary_u0_term_3d(mesh, init, x, t, c, cfg);
    auto u0 = [&](const vec3& y) { return init.eval_u0(y); };
    auto v0 = [&](const vec3& y) { return init.eval_u0_dot(y); };
    value += quad::sphere_slice_integral(x, t, c, v0, &ind, cfg.sphere_order);
    double d = fd_step(t, cfg);
    value += (quad::sphere_slice_integral(x, t + d, c, u0, &ind, cfg.sphere_order) -
              quad::sphere_slice_integral(x, t - d, c, u0, &ind, cfg.sphere_order)) /
             (2.0 * d);
  }
  if (src.active) {
    // -\int_{r<ct} G(y, t-r/c)/r dV = -c \int_0^t slice(tau) dtau with the
    // 1/(c^2 tau) slice weight folded into sphere_slice_integral.
    std::vector<double> pts, wts;
    quad::gauss_on_interval(cfg.disk_radial_order, 0.0, t, pts, wts);
    double acc = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double tau = pts[i];
      acc += wts[i] * quad::sphere_slice_integral(
                          x, tau, c, [&](const vec3& y) { return src.eval(y, t - tau); }, &ind,
                          cfg.sphere_order);
    }
    value -= c * acc;
  }
  return value;
}

double evaluate_3d(const BoundaryTrace& trace, const InitialData& init, const SourceTerm& src,
                   const vec3& x, double t, double c, const EvalConfig& cfg) {
  const geom::BoundaryMesh& mesh = *trace.mesh;
  if (mesh.dim() != 3) throw validation_error("evaluate_3d: 3-D mesh required");
  if (t < 0.0) throw validation_error("evaluate_3d: t >= 0 required");
  geom::DomainIndicator ind(mesh);
  if (t == 0.0) return init.eval_u0(x) * ind(x);
  double conv = boundary_convolution_3d(trace, x, t, c, cfg);
  double value = conv + initial_source_terms_3d(mesh, ind, init, src, x, t, c, cfg);
  return value / four_pi;
}

double cauchy_3d(const InitialData& init, const vec3& x, double t, double c,
                 const EvalConfig& cfg) {
  if (t < 0.0) throw validation_error("cauchy_3d: t >= 0 required");
  if (init.is_zero) return 0.0;
  if (t == 0.0) return init.eval_u0(x);
  const geom::DomainIndicator* sup = init.support;
  auto u0 = [&](const vec3& y) { return init.eval_u0(y); };
  auto v0 = [&](const vec3& y) { return init.eval_u0_dot(y); };
  double d = fd_step(t, cfg);
  double val = quad::sphere_slice_integral(x, t, c, v0, sup, cfg.sphere_order);
  val += (quad::sphere_slice_integral(x, t + d, c, u0, sup, cfg.sphere_order) -
          quad::sphere_slice_integral(x, t - d, c, u0, sup, cfg.sphere_order)) /
         (2.0 * d);
  return val / four_pi;
}

}  // namespace wavebem::representation
