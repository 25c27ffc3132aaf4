#include "wavebem/verification.hpp"

#include <algorithm>

namespace wavebem::verify {

FrontGeometry FrontGeometry::from_spatial_normal(const vec3& n_unit) {
  double nn = n_unit.norm();
  if (std::fabs(nn - 1.0) > 1e-9)
    throw validation_error("FrontGeometry: spatial normal must be unit");
  FrontGeometry f;
  double s = 1.0 / std::sqrt(2.0);
  f.n = n_unit;
  f.nu_spatial = n_unit * s;
  f.nu_tau = -s;
  return f;
}

FrontGeometry FrontGeometry::from_spacetime_normal(const vec3& nu_x, double nu_tau) {
  if (!(nu_tau < 0.0)) throw validation_error("FrontGeometry: nu_tau must be negative");
  double sn = nu_x.norm();
  if (std::fabs(sqr(nu_tau) - sqr(sn)) > 1e-12 * (sqr(nu_tau) + sqr(sn)))
    throw validation_error("FrontGeometry: normal violates the characteristic condition");
  FrontGeometry f;
  f.n = nu_x / sn;
  f.nu_spatial = nu_x;
  f.nu_tau = nu_tau;
  return f;
}

namespace {

// Richardson-extrapolated one-sided limit: samples at x +- eps n and
// x +- 2 eps n, linearly extrapolated to the front.
struct OneSided {
  FieldState plus, minus;
  bool conclusive;
};

FieldState extrapolate(const FieldState& near, const FieldState& far) {
  FieldState out;
  out.u = 2.0 * near.u - far.u;
  out.u_dot = 2.0 * near.u_dot - far.u_dot;
  out.grad = near.grad * 2.0 - far.grad;
  return out;
}

OneSided one_sided_limits(const FieldFn& field, const vec3& x, double t, const vec3& n,
                          double eps) {
  OneSided o;
  FieldState p1 = field(x + n * eps, t), p2 = field(x + n * (2.0 * eps), t);
  FieldState m1 = field(x - n * eps, t), m2 = field(x - n * (2.0 * eps), t);
  o.plus = extrapolate(p1, p2);
  o.minus = extrapolate(m1, m2);
  // If the doubled-offset samples disagree wildly the front is not resolved
  // at this eps.
  auto spread = [](const FieldState& a, const FieldState& b) {
    return std::fabs(a.u - b.u) + std::fabs(a.u_dot - b.u_dot) + (a.grad - b.grad).norm();
  };
  double scale = 1.0 + std::fabs(p1.u_dot) + std::fabs(m1.u_dot) + p1.grad.norm() + m1.grad.norm();
  o.conclusive = spread(p1, p2) + spread(m1, m2) < 1e3 * eps * scale + 1e3;
  return o;
}

}  // namespace

JumpResidual hadamard_jump_check(const FieldFn& field, const vec3& x, double t,
                                 const FrontGeometry& front, double c, double eps) {
  OneSided o = one_sided_limits(field, x, t, front.n, eps);
  JumpResidual r;
  r.conclusive = o.conclusive;
  r.value_jump = std::fabs(o.plus.u - o.minus.u);
  double cp = o.plus.u_dot + c * front.n.dot(o.plus.grad);
  double cm = o.minus.u_dot + c * front.n.dot(o.minus.grad);
  r.compat_jump = std::fabs(cp - cm);
  vec3 tj = (o.plus.grad - o.minus.grad) * c + front.n * (o.plus.u_dot - o.minus.u_dot);
  r.tangential_jump = std::max({std::fabs(tj.x), std::fabs(tj.y), std::fabs(tj.z)});
  return r;
}

FrontEnergyResidual front_energy_jump_check(const FieldFn& field, const vec3& x, double t,
                                            const FrontGeometry& front, double c, double eps) {
  OneSided o = one_sided_limits(field, x, t, front.n, eps);
  FrontEnergyResidual r;
  r.conclusive = o.conclusive;
  auto energy = [&](const FieldState& s) {
    return 0.5 * (sqr(s.u_dot / c) + s.grad.norm2());
  };
  auto lagr = [&](const FieldState& s) {
    return 0.5 * (sqr(s.u_dot / c) - s.grad.norm2());
  };
  double dudn_p = front.n.dot(o.plus.grad), dudn_m = front.n.dot(o.minus.grad);
  double jE = energy(o.plus) - energy(o.minus);
  double jP = o.plus.u_dot * dudn_p - o.minus.u_dot * dudn_m;
  r.energy = std::fabs(jE + jP / c);
  double jL = lagr(o.plus) - lagr(o.minus);
  double jud = o.plus.u_dot - o.minus.u_dot;
  r.lagrangian = std::fabs(jL - (o.minus.u_dot + c * dudn_m) * jud / sqr(c));
  return r;
}

// --- dynamic Gauss identities ------------------------------------------------

namespace {

// \int_{S_t^-(x)} dV / sqrt(c^2 t^2 - r^2) via exact per-ray radial
// integrals; smooth in t because the ray cuts are fixed geometry.
double disk_kernel_integral(const geom::DomainIndicator& ind, const vec3& x, double t, double c,
                            int angular_order) {
  if (!(t > 0.0)) return 0.0;
  double ct = c * t;
  double sum = 0.0;
  for (int j = 0; j < angular_order; ++j) {
    double theta = two_pi * (j + 0.5) / angular_order;
    vec3 omega{std::cos(theta), std::sin(theta)};
    for (const auto& [sa, sb] : ind.inside_intervals(x, omega, ct)) {
      double a = std::min(sa, ct), b = std::min(sb, ct);
      // \int_a^b r dr / sqrt(c^2 t^2 - r^2)
      sum += (two_pi / angular_order) *
             (std::sqrt(std::max(0.0, sqr(ct) - sqr(a))) -
              std::sqrt(std::max(0.0, sqr(ct) - sqr(b))));
    }
  }
  return sum;
}

}  // namespace

double gauss_residual_2d(const geom::BoundaryMesh& mesh, const vec3& x, double t, double c,
                         const GaussConfig& cfg) {
  if (mesh.dim() != 2) throw validation_error("gauss_residual_2d: 2-D mesh required");
  if (!(t > 0.0)) throw validation_error("gauss_residual_2d: t > 0 required");
  geom::DomainIndicator ind(mesh);
  bool on_boundary = ind.distance_to_boundary(x) <= mesh.geom_tolerance();
  double pv_radius = 0.5 * mesh.max_element_diameter();
  double ct = c * t;

  // Surface term \int_{S_t(x)} (ct / sqrt(c^2 t^2 - r^2)) (1/r) dr/dn dS,
  // principal value for boundary points (flat self element vanishes).
  double surface = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const geom::Element& el = mesh.element(e);
    if (on_boundary && dist(el.centroid, x) < pv_radius) continue;
    const vec3 n = el.normal;
    surface += quad::cone_segment_integral(
        mesh.vertex(e, 0), mesh.vertex(e, 1), x, ct,
        [&](const vec3& y) {
          double r = dist(y, x);
          if (r == 0.0) return 0.0;
          return ct * geom::dr_dn(x, y, n) / r;
        },
        cfg.quad.sing_order);
  }

  double d = cfg.fd_dt_factor * t;
  double ddt = (disk_kernel_integral(ind, x, t + d, c, cfg.angular_order) -
                disk_kernel_integral(ind, x, t - d, c, cfg.angular_order)) /
               (2.0 * d);
  return surface + ddt / c - two_pi * ind(x) * heaviside(t);
}

double static_gauss_3d(const geom::BoundaryMesh& mesh, const vec3& x,
                       const quad::QuadratureConfig& cfg) {
  if (mesh.dim() != 3) throw validation_error("static_gauss_3d: 3-D mesh required");
  geom::DomainIndicator ind(mesh);
  bool on_boundary = ind.distance_to_boundary(x) <= mesh.geom_tolerance();
  double pv_radius = 0.5 * mesh.max_element_diameter();
  double acc = 0.0;
  std::vector<quad::QuadPoint> pts;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const geom::Element& el = mesh.element(e);
    if (on_boundary && dist(el.centroid, x) < pv_radius) continue;
    quad::element_quadrature(mesh, e, x, cfg, pts);
    for (const quad::QuadPoint& q : pts) {
      double r = dist(q.y, x);
      if (r == 0.0) continue;
      acc += q.w * (-geom::dr_dn(x, q.y, el.normal) / sqr(r));
    }
  }
  return -acc;
}

double gauss_residual_3d(const geom::BoundaryMesh& mesh, const vec3& x, double t, double c,
                         const GaussConfig& cfg) {
  if (mesh.dim() != 3) throw validation_error("gauss_residual_3d: 3-D mesh required");
  if (!(t > 0.0)) throw validation_error("gauss_residual_3d: t > 0 required");
  geom::DomainIndicator ind(mesh);
  bool on_boundary = ind.distance_to_boundary(x) <= mesh.geom_tolerance();
  double pv_radius = 0.5 * mesh.max_element_diameter();

  auto surface_terms = [&](double tt) {
    // T1 = \oint_{S_t} d(1/r)/dn dS and T3 = \oint_{S_t} dln(r)/dn dS.
    double t1 = 0.0, t3 = 0.0;
    double ctt = c * tt;
    std::vector<quad::QuadPoint> pts;
    for (int e = 0; e < mesh.n_elements(); ++e) {
      const geom::Element& el = mesh.element(e);
      if (dist(el.centroid, x) - el.diameter > ctt) continue;
      if (on_boundary && dist(el.centroid, x) < pv_radius) continue;
      quad::element_quadrature(mesh, e, x, cfg.quad, pts);
      for (const quad::QuadPoint& q : pts) {
        double r = dist(q.y, x);
        if (r == 0.0 || r >= ctt) continue;
        double drdn = geom::dr_dn(x, q.y, el.normal);
        t1 += q.w * (-drdn / sqr(r));
        t3 += q.w * (drdn / r);
      }
    }
    return std::pair<double, double>{t1, t3};
  };

  auto slice_term = [&](double tt) {
    // T2 = \int_{r = c tt} H_S(y) / r dS(y) = c tt \int ind dOmega.
    return c * quad::sphere_slice_integral(
                   x, tt, c, [](const vec3&) { return 1.0; }, &ind, cfg.sphere_order);
  };

  auto [t1, t3_mid] = surface_terms(t);
  (void)t3_mid;
  double d = cfg.fd_dt_factor * t;
  double hi = slice_term(t + d) + surface_terms(t + d).second;
  double lo = slice_term(t - d) + surface_terms(t - d).second;
  double ddt = (hi - lo) / (2.0 * d);
  return -t1 + ddt / c - four_pi * ind(x) * heaviside(t);
}

// --- global balances ----------------------------------------------------------

namespace {

struct VolumeRule {
  std::vector<vec3> pts;
  std::vector<double> wts;
};

VolumeRule volume_rule(const geom::BoundaryMesh& mesh, const BalanceConfig& cfg) {
  VolumeRule rule;
  if (mesh.dim() == 1) {
    std::vector<double> p, w;
    quad::gauss_on_interval(std::max(16, cfg.volume_order * 8), mesh.a1(), mesh.a2(), p, w);
    for (std::size_t i = 0; i < p.size(); ++i) {
      rule.pts.push_back(vec3{p[i]});
      rule.wts.push_back(w[i]);
    }
    return rule;
  }
  // Fan decomposition from the vertex centroid (star-shaped domains).
  vec3 center{};
  for (const vec3& p : mesh.nodes()) center += p;
  center = center / static_cast<double>(mesh.nodes().size());
  const quad::GaussRule& g = quad::gauss_rule(cfg.volume_order);
  if (mesh.dim() == 2) {
    for (int e = 0; e < mesh.n_elements(); ++e) {
      // Split the fan triangle (center, v0, v1) into refine^2 sub-triangles
      // via a tensor rule in barycentric coordinates.
      vec3 a = center, b = mesh.vertex(e, 0), cpt = mesh.vertex(e, 1);
      double area2 = std::fabs((b - a).cross(cpt - a).z);
      for (int iu = 0; iu < cfg.volume_order; ++iu)
        for (int iv = 0; iv < cfg.volume_order; ++iv) {
          double u = 0.5 * (g.nodes[static_cast<std::size_t>(iu)] + 1.0);
          double v = 0.5 * (g.nodes[static_cast<std::size_t>(iv)] + 1.0);
          double wu = 0.5 * g.weights[static_cast<std::size_t>(iu)];
          double wv = 0.5 * g.weights[static_cast<std::size_t>(iv)];
          // Duffy map square -> triangle.
          vec3 p = a + (b - a) * u + (cpt - b) * (u * v);
          rule.pts.push_back(p);
          rule.wts.push_back(wu * wv * area2 * u);
        }
    }
    return rule;
  }
  for (int e = 0; e < mesh.n_elements(); ++e) {
    vec3 a = center, b = mesh.vertex(e, 0), cpt = mesh.vertex(e, 1), dpt = mesh.vertex(e, 2);
    double vol6 = std::fabs((b - a).dot((cpt - a).cross(dpt - a)));
    for (int iu = 0; iu < cfg.volume_order; ++iu)
      for (int iv = 0; iv < cfg.volume_order; ++iv)
        for (int iw = 0; iw < cfg.volume_order; ++iw) {
          double u = 0.5 * (g.nodes[static_cast<std::size_t>(iu)] + 1.0);
          double v = 0.5 * (g.nodes[static_cast<std::size_t>(iv)] + 1.0);
          double w = 0.5 * (g.nodes[static_cast<std::size_t>(iw)] + 1.0);
          double wt = 0.125 * g.weights[static_cast<std::size_t>(iu)] * g.weights[static_cast<std::size_t>(iv)] *
                      g.weights[static_cast<std::size_t>(iw)];
          // Duffy map cube -> tetrahedron.
          vec3 p = a + (b - a) * u + (cpt - b) * (u * v) + (dpt - cpt) * (u * v * w);
          rule.pts.push_back(p);
          rule.wts.push_back(wt * vol6 * u * u * v);
        }
  }
  return rule;
}

// \int_0^t \int_S f dS dt with f = u_dot du/dn (power) or u du/dn.
double boundary_power_integral(const FieldFn& field, const geom::BoundaryMesh& mesh, double t,
                               const BalanceConfig& cfg, bool use_u_times_p) {
  double acc = 0.0;
  int nt = cfg.time_steps;
  std::vector<quad::QuadPoint> pts;
  for (int it = 0; it <= nt; ++it) {
    double tau = t * it / nt;
    double wt = (it == 0 || it == nt) ? 0.5 : 1.0;
    double slice = 0.0;
    for (int e = 0; e < mesh.n_elements(); ++e) {
      const geom::Element& el = mesh.element(e);
      if (mesh.dim() == 1) {
        FieldState s = field(el.centroid, tau);
        slice += (use_u_times_p ? s.u : s.u_dot) * s.grad.dot(el.normal);
      } else {
        // Far evaluation point: plain per-element Gauss, no refinement.
        quad::element_quadrature(mesh, e, el.centroid + el.normal * (10.0 * mesh.diameter()),
                                 quad::QuadratureConfig{cfg.surface_order, cfg.surface_order, 1.0},
                                 pts);
        for (const quad::QuadPoint& q : pts) {
          FieldState s = field(q.y, tau);
          slice += q.w * (use_u_times_p ? s.u : s.u_dot) * s.grad.dot(el.normal);
        }
      }
    }
    acc += wt * (t / nt) * slice;
  }
  return acc;
}

}  // namespace

double energy_balance_residual(const FieldFn& field, const InitialData& init,
                               const SourceTerm& src, const geom::BoundaryMesh& mesh, double c,
                               double t, const BalanceConfig& cfg) {
  VolumeRule vol = volume_rule(mesh, cfg);
  auto energy_at = [&](double tt) {
    double acc = 0.0;
    for (std::size_t i = 0; i < vol.pts.size(); ++i) {
      FieldState s = field(vol.pts[i], tt);
      acc += vol.wts[i] * 0.5 * (sqr(s.u_dot / c) + s.grad.norm2());
    }
    return acc;
  };
  double e_now = energy_at(t);
  double e_init = energy_at(0.0);
  double lhs = e_now - e_init;
  double power = boundary_power_integral(field, mesh, t, cfg, false);
  double src_term = 0.0;
  if (src.active) {
    int nt = cfg.time_steps;
    for (int it = 0; it <= nt; ++it) {
      double tau = t * it / nt;
      double wt = (it == 0 || it == nt) ? 0.5 : 1.0;
      double slice = 0.0;
      for (std::size_t i = 0; i < vol.pts.size(); ++i) {
        FieldState s = field(vol.pts[i], tau);
        slice += vol.wts[i] * src.eval(vol.pts[i], tau) * s.u_dot;
      }
      src_term += wt * (t / nt) * slice;
    }
  }
  double rhs = power - src_term;
  double scale = std::fabs(e_now) + std::fabs(e_init) + std::fabs(power) + std::fabs(src_term);
  (void)init;
  return std::fabs(lhs - rhs) / std::max(scale, 1e-300);
}

double lagrangian_balance_residual(const FieldFn& field, const InitialData& init,
                                   const SourceTerm& src, const geom::BoundaryMesh& mesh,
                                   double c, double t, const BalanceConfig& cfg) {
  VolumeRule vol = volume_rule(mesh, cfg);
  // LHS: \int_0^t \int_V L dV dt.
  double lhs = 0.0;
  int nt = cfg.time_steps;
  for (int it = 0; it <= nt; ++it) {
    double tau = t * it / nt;
    double wt = (it == 0 || it == nt) ? 0.5 : 1.0;
    double slice = 0.0;
    for (std::size_t i = 0; i < vol.pts.size(); ++i) {
      FieldState s = field(vol.pts[i], tau);
      slice += vol.wts[i] * 0.5 * (sqr(s.u_dot / c) - s.grad.norm2());
    }
    lhs += wt * (t / nt) * slice;
  }
  // RHS: (1/2)[ \int\int u G - \int_0^t \oint u p + c^-2 \int (u u_dot - u0 u0_dot) ].
  double srcterm = 0.0;
  if (src.active) {
    for (int it = 0; it <= nt; ++it) {
      double tau = t * it / nt;
      double wt = (it == 0 || it == nt) ? 0.5 : 1.0;
      double slice = 0.0;
      for (std::size_t i = 0; i < vol.pts.size(); ++i) {
        FieldState s = field(vol.pts[i], tau);
        slice += vol.wts[i] * src.eval(vol.pts[i], tau) * s.u;
      }
      srcterm += wt * (t / nt) * slice;
    }
  }
  double boundary = boundary_power_integral(field, mesh, t, cfg, true);
  double volterm = 0.0;
  for (std::size_t i = 0; i < vol.pts.size(); ++i) {
    FieldState now = field(vol.pts[i], t);
    double u0 = init.is_zero ? field(vol.pts[i], 0.0).u : init.eval_u0(vol.pts[i]);
    double v0 = init.is_zero ? field(vol.pts[i], 0.0).u_dot : init.eval_u0_dot(vol.pts[i]);
    volterm += vol.wts[i] * (now.u * now.u_dot - u0 * v0) / sqr(c);
  }
  double rhs = 0.5 * (srcterm - boundary + volterm);
  double scale = std::fabs(lhs) + std::fabs(srcterm) + std::fabs(boundary) + std::fabs(volterm);
  return std::fabs(lhs - rhs) / std::max(scale, 1e-300);
}

}  // namespace wavebem::verify
