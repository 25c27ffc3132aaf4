#include "wavebem/quadrature.hpp"

#include <algorithm>
#include <map>
#include <mutex>

namespace wavebem::quad {

// --- Gauss-Legendre --------------------------------------------------------

namespace {

GaussRule compute_gauss(int n) {
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  return rule;
}

std::mutex g_rule_mutex;
std::map<int, GaussRule> g_rules;

}  // namespace

const GaussRule& gauss_rule(int n) {
  if (n < 1) throw validation_error("gauss_rule: order must be >= 1");
  std::lock_guard<std::mutex> lock(g_rule_mutex);
  auto it = g_rules.find(n);
  if (it == g_rules.end()) it = g_rules.emplace(n, compute_gauss(n)).first;
  return it->second;
}

void gauss_on_interval(int n, double a, double b, std::vector<double>& pts,
                       std::vector<double>& wts) {
  if (!(b > a)) return;
  const GaussRule& rule = gauss_rule(n);
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    pts.push_back(mid + half * rule.nodes[static_cast<std::size_t>(i)]);
    wts.push_back(half * rule.weights[static_cast<std::size_t>(i)]);
  }
}

// --- cone time primitives --------------------------------------------------

double cone_i0(double a, double b, double r, double c) {
  if (!(b > a)) return 0.0;
  if (r <= 0.0) return std::log(b / a) / c;
  return (std::acosh(std::max(1.0, c * b / r)) - std::acosh(std::max(1.0, c * a / r))) / c;
}

double cone_i1(double a, double b, double r, double c) {
  if (!(b > a)) return 0.0;
  double qa = std::sqrt(std::max(0.0, sqr(c * a) - sqr(r)));
  double qb = std::sqrt(std::max(0.0, sqr(c * b) - sqr(r)));
  return (qb - qa) / sqr(c);
}

double cone_i2(double a, double b, double r, double c) {
  if (!(b > a)) return 0.0;
  double qa = std::sqrt(std::max(0.0, sqr(c * a) - sqr(r)));
  double qb = std::sqrt(std::max(0.0, sqr(c * b) - sqr(r)));
  double acosh_part = 0.0;
  if (r > 0.0)
    acosh_part = (std::acosh(std::max(1.0, c * b / r)) - std::acosh(std::max(1.0, c * a / r)));
  return (b * qb - a * qa) / (2.0 * sqr(c)) + sqr(r) * acosh_part / (2.0 * c * sqr(c));
}

double weakly_singular_time_integral(const std::function<double(double)>& f, double r,
                                     double t, double c, int order,
                                     std::span<const double> breaks) {
  if (r < 0.0) throw validation_error("weakly_singular_time_integral: r >= 0 required");
  if (r >= c * t) return 0.0;
  std::vector<double> pts, wts;
  if (r == 0.0) {
    if (std::fabs(f(0.0)) > 1e-12 * (1.0 + std::fabs(f(t))))
      throw numerical_error("weakly_singular_time_integral: r = 0 with f(0) != 0");
    std::vector<double> knots{0.0};
    for (double b : breaks)
      if (b > 0.0 && b < t) knots.push_back(b);
    knots.push_back(t);
    std::sort(knots.begin(), knots.end());
    for (std::size_t i = 0; i + 1 < knots.size(); ++i)
      gauss_on_interval(order, knots[i], knots[i + 1], pts, wts);
    double sum = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) sum += wts[i] * f(pts[i]) / (c * pts[i]);
    return sum;
  }
  double theta_end = std::acosh(c * t / r);
  std::vector<double> knots{0.0};
  for (double b : breaks)
    if (b > r / c && b < t) knots.push_back(std::acosh(c * b / r));
  knots.push_back(theta_end);
  std::sort(knots.begin(), knots.end());
  for (std::size_t i = 0; i + 1 < knots.size(); ++i)
    gauss_on_interval(order, knots[i], knots[i + 1], pts, wts);
  double sum = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) sum += wts[i] * f((r / c) * std::cosh(pts[i]));
  return sum / c;
}

int hat_delay_pieces(int m, double t, double dt, int n_steps, HatPiece out[2]) {
  // phi_m(t - tau) as a linear function of tau. The s-interval [t_{m-1}, t_m]
  // (rising part, absent for m = 0) maps to tau in [t - t_m, t - t_{m-1}];
  // the falling part [t_m, t_{m+1}] (absent for m = n) maps likewise.
  int n = 0;
  double tm = m * dt;
  if (m >= 1) {
    double a = t - tm, b = t - (tm - dt);
    b = std::min(b, t);
    a = std::max(a, 0.0);
    if (b > a) out[n++] = {a, b, (t - (tm - dt)) / dt, -1.0 / dt};
  }
  if (m <= n_steps - 1) {
    double a = t - (tm + dt), b = t - tm;
    b = std::min(b, t);
    a = std::max(a, 0.0);
    if (b > a) out[n++] = {a, b, ((tm + dt) - t) / dt, 1.0 / dt};
  }
  return n;
}

// --- element quadrature ----------------------------------------------------

namespace {

// Degree-5 symmetric 7-point rule on a triangle (barycentric).
struct TriNode {
  double l1, l2, l3, w;
};
const TriNode kTri7[7] = {
    {1.0 / 3, 1.0 / 3, 1.0 / 3, 0.225},
    {0.05971587178977, 0.47014206410512, 0.47014206410512, 0.13239415278851},
    {0.47014206410512, 0.05971587178977, 0.47014206410512, 0.13239415278851},
    {0.47014206410512, 0.47014206410512, 0.05971587178977, 0.13239415278851},
    {0.79742698535309, 0.10128650732346, 0.10128650732346, 0.12593918054483},
    {0.10128650732346, 0.79742698535309, 0.10128650732346, 0.12593918054483},
    {0.10128650732346, 0.10128650732346, 0.79742698535309, 0.12593918054483}};

void triangle_rule(const vec3& a, const vec3& b, const vec3& c, std::vector<QuadPoint>& out) {
  double area = 0.5 * (b - a).cross(c - a).norm();
  for (const TriNode& n : kTri7)
    out.push_back({a * n.l1 + b * n.l2 + c * n.l3, n.w * area});
}

void triangle_subdiv(const vec3& a, const vec3& b, const vec3& c, const vec3& x, int depth,
                     std::vector<QuadPoint>& out) {
  double diam = std::max({dist(a, b), dist(b, c), dist(c, a)});
  vec3 ctr = (a + b + c) / 3.0;
  double d = dist(ctr, x);
  if (depth >= 5 || diam < 0.8 * d) {
    triangle_rule(a, b, c, out);
    return;
  }
  vec3 ab = (a + b) * 0.5, bc = (b + c) * 0.5, ca = (c + a) * 0.5;
  triangle_subdiv(a, ab, ca, x, depth + 1, out);
  triangle_subdiv(ab, b, bc, x, depth + 1, out);
  triangle_subdiv(ca, bc, c, x, depth + 1, out);
  triangle_subdiv(ab, bc, ca, x, depth + 1, out);
}

void segment_points(const vec3& p0, const vec3& p1, const vec3& x,
                    const QuadratureConfig& cfg, std::vector<QuadPoint>& out) {
  vec3 tang = p1 - p0;
  double len = tang.norm();
  tang = tang / len;
  double s_foot = std::clamp((x - p0).dot(tang), 0.0, len);
  double d_min = dist(x, p0 + tang * s_foot);

  std::vector<double> pts, wts;
  if (d_min < 1e-12 * len) {
    // Collocation point on the element: graded rule s = end * xi^2 toward
    // the singular point absorbs the log kernel.
    const GaussRule& rule = gauss_rule(cfg.sing_order);
    for (int side = 0; side < 2; ++side) {
      double span = side == 0 ? -s_foot : len - s_foot;
      if (std::fabs(span) < 1e-14 * len) continue;
      for (int i = 0; i < cfg.sing_order; ++i) {
        double xi = 0.5 * (rule.nodes[static_cast<std::size_t>(i)] + 1.0);
        double wxi = 0.5 * rule.weights[static_cast<std::size_t>(i)];
        pts.push_back(s_foot + span * xi * xi);
        wts.push_back(std::fabs(span) * 2.0 * xi * wxi);
      }
    }
  } else if (d_min < 2.0 * len) {
    int chunks = std::clamp(static_cast<int>(std::ceil(len / std::max(d_min, 0.05 * len))), 2, 16);
    for (int k = 0; k < chunks; ++k)
      gauss_on_interval(cfg.gauss_order, len * k / chunks, len * (k + 1) / chunks, pts, wts);
  } else {
    gauss_on_interval(cfg.gauss_order, 0.0, len, pts, wts);
  }
  for (std::size_t i = 0; i < pts.size(); ++i) out.push_back({p0 + tang * pts[i], wts[i]});
}

}  // namespace

void element_quadrature(const geom::BoundaryMesh& mesh, int e, const vec3& x,
                        const QuadratureConfig& cfg, std::vector<QuadPoint>& out) {
  out.clear();
  const geom::Element& el = mesh.element(e);
  if (mesh.dim() == 1) {
    out.push_back({el.centroid, 1.0});
    return;
  }
  if (mesh.dim() == 2) {
    segment_points(mesh.vertex(e, 0), mesh.vertex(e, 1), x, cfg, out);
    return;
  }
  triangle_subdiv(mesh.vertex(e, 0), mesh.vertex(e, 1), mesh.vertex(e, 2), x, 0, out);
}

double cone_segment_integral(const vec3& p0, const vec3& p1, const vec3& x, double ct,
                             const std::function<double(const vec3&)>& g, int order) {
  if (!(ct > 0.0)) return 0.0;
  vec3 tang = p1 - p0;
  double len = tang.norm();
  tang = tang / len;
  double s_foot = (x - p0).dot(tang);
  vec3 foot = p0 + tang * s_foot;
  double d2 = (x - foot).norm2();
  double rho2 = sqr(ct) - d2;
  if (rho2 <= 0.0) return 0.0;
  double rho = std::sqrt(rho2);
  double s1 = std::max(-s_foot, -rho);
  double s2 = std::min(len - s_foot, rho);
  if (s2 <= s1) return 0.0;
  double phi1 = std::asin(std::clamp(s1 / rho, -1.0, 1.0));
  double phi2 = std::asin(std::clamp(s2 / rho, -1.0, 1.0));
  const GaussRule& rule = gauss_rule(order);
  double mid = 0.5 * (phi1 + phi2), half = 0.5 * (phi2 - phi1);
  double sum = 0.0;
  for (int i = 0; i < order; ++i) {
    double phi = mid + half * rule.nodes[static_cast<std::size_t>(i)];
    vec3 y = foot + tang * (rho * std::sin(phi));
    sum += half * rule.weights[static_cast<std::size_t>(i)] * g(y);
  }
  return sum;
}

double pv_boundary_integral(const geom::BoundaryMesh& mesh, const vec3& x,
                            std::span<const double> density, PVKernel kernel,
                            const QuadratureConfig& cfg) {
  if (density.size() != static_cast<std::size_t>(mesh.n_elements()))
    throw validation_error("pv_boundary_integral: density size mismatch");
  geom::DomainIndicator ind(mesh);
  if (ind.distance_to_boundary(x) > mesh.geom_tolerance())
    throw validation_error("pv_boundary_integral: x must lie on the mesh");
  double pv_radius = cfg.pv_radius(mesh);
  double sum = 0.0;
  std::vector<QuadPoint> pts;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    if (density[static_cast<std::size_t>(e)] == 0.0) continue;
    if (dist(mesh.element(e).centroid, x) < pv_radius) continue;
    element_quadrature(mesh, e, x, cfg, pts);
    const vec3 n = mesh.element(e).normal;
    double acc = 0.0;
    for (const QuadPoint& q : pts) {
      double r = dist(q.y, x);
      if (r == 0.0) continue;
      double drdn = geom::dr_dn(x, q.y, n);
      acc += q.w * (kernel == PVKernel::inv_r_drdn_2d ? drdn / r : -drdn / sqr(r));
    }
    sum += acc * density[static_cast<std::size_t>(e)];
  }
  return sum;
}

double retarded_surface_integral_3d(
    const geom::BoundaryMesh& mesh, const vec3& x, double t, double c,
    const std::function<double(int, const vec3&, double)>& f, RetardedWeight weight,
    const QuadratureConfig& cfg) {
  if (mesh.dim() != 3) throw validation_error("retarded_surface_integral_3d: 3-D mesh required");
  if (!(t > 0.0)) return 0.0;
  double ct = c * t;
  double sum = 0.0;
  std::vector<QuadPoint> pts;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const geom::Element& el = mesh.element(e);
    double rc = dist(el.centroid, x);
    if (rc - el.diameter > ct) continue;
    element_quadrature(mesh, e, x, cfg, pts);
    for (const QuadPoint& q : pts) {
      double r = dist(q.y, x);
      if (r >= ct || r == 0.0) continue;
      double w;
      switch (weight) {
        case RetardedWeight::one_over_r: w = 1.0 / r; break;
        case RetardedWeight::dlnr_dn: w = geom::dr_dn(x, q.y, el.normal) / r; break;
        default: w = -geom::dr_dn(x, q.y, el.normal) / sqr(r); break;
      }
      sum += q.w * w * f(e, q.y, t - r / c);
    }
  }
  return sum;
}

double sphere_slice_integral(const vec3& x, double t, double c,
                             const std::function<double(const vec3&)>& g,
                             const geom::DomainIndicator* indicator, int order) {
  if (!(t > 0.0)) return 0.0;
  double ct = c * t;
  const GaussRule& rule = gauss_rule(order);
  int n_phi = 2 * order;
  double sum = 0.0;
  for (int i = 0; i < order; ++i) {
    double mu = rule.nodes[static_cast<std::size_t>(i)];
    double wmu = rule.weights[static_cast<std::size_t>(i)];
    double s = std::sqrt(1.0 - mu * mu);
    for (int j = 0; j < n_phi; ++j) {
      double phi = two_pi * (j + 0.5) / n_phi;
      vec3 omega{s * std::cos(phi), s * std::sin(phi), mu};
      vec3 y = x + omega * ct;
      double ind = indicator ? (*indicator)(y) : 1.0;
      if (ind == 0.0) continue;
      sum += wmu * (two_pi / n_phi) * g(y) * ind;
    }
  }
  // dS = (ct)^2 dOmega and the 1/(c^2 t) weight leave a factor t.
  return t * sum;
}

double disk_volume_integral_2d(const vec3& x, double t, double c,
                               const std::function<double(const vec3&)>& g,
                               const geom::DomainIndicator* indicator, int radial_order,
                               int angular_order) {
  if (!(t > 0.0)) return 0.0;
  double ct = c * t;
  const GaussRule& radial = gauss_rule(radial_order);
  double sum = 0.0;
  for (int j = 0; j < angular_order; ++j) {
    double theta = two_pi * (j + 0.5) / angular_order;
    vec3 omega{std::cos(theta), std::sin(theta)};
    std::vector<std::pair<double, double>> segs;
    if (indicator)
      segs = indicator->inside_intervals(x, omega, ct);
    else
      segs.push_back({0.0, ct});
    double ray = 0.0;
    for (const auto& [sa, sb] : segs) {
      double pa = std::asin(std::clamp(sa / ct, 0.0, 1.0));
      double pb = std::asin(std::clamp(sb / ct, 0.0, 1.0));
      if (!(pb > pa)) continue;
      double mid = 0.5 * (pa + pb), half = 0.5 * (pb - pa);
      for (int i = 0; i < radial_order; ++i) {
        double phi = mid + half * radial.nodes[static_cast<std::size_t>(i)];
        double rr = ct * std::sin(phi);
        ray += half * radial.weights[static_cast<std::size_t>(i)] * g(x + omega * rr) * ct *
               std::sin(phi);
      }
    }
    sum += (two_pi / angular_order) * ray;
  }
  return sum / c;
}

// --- flat-element polar decomposition --------------------------------------

double element_height(const geom::BoundaryMesh& mesh, int e, const vec3& x) {
  return mesh.element(e).normal.dot(x - mesh.vertex(e, 0));
}

double triangle_polar_sectors(const geom::BoundaryMesh& mesh, int e, const vec3& x,
                              int theta_order,
                              const std::function<void(double, double, double)>& fn) {
  const geom::Element& el = mesh.element(e);
  vec3 v0 = mesh.vertex(e, 0), v1 = mesh.vertex(e, 1), v2 = mesh.vertex(e, 2);
  vec3 n = el.normal;
  double z = n.dot(x - v0);  // signed height of x over the element plane
  vec3 foot = x - n * z;
  // In-plane orthonormal frame.
  vec3 ex = (v1 - v0).normalized();
  vec3 ey = n.cross(ex);
  auto local = [&](const vec3& p) {
    vec3 d = p - foot;
    return std::pair<double, double>{d.dot(ex), d.dot(ey)};
  };
  std::pair<double, double> q[3] = {local(v0), local(v1), local(v2)};
  double ang[3];
  for (int i = 0; i < 3; ++i) ang[i] = std::atan2(q[i].second, q[i].first);
  std::sort(ang, ang + 3);
  double az = std::fabs(z);

  const GaussRule& rule = gauss_rule(theta_order);
  // Ray / edge intersection in the plane: returns all rho > 0 hits.
  auto cuts = [&](double theta, double rho_hits[4]) {
    double cth = std::cos(theta), sth = std::sin(theta);
    int count = 0;
    for (int k = 0; k < 3; ++k) {
      auto [ax_, ay_] = q[k];
      auto [bx_, by_] = q[(k + 1) % 3];
      double dx = bx_ - ax_, dy = by_ - ay_;
      double den = cth * dy - sth * dx;
      if (std::fabs(den) < 1e-15) continue;
      double u = (ax_ * dy - ay_ * dx) / den;     // ray parameter rho
      double uu = (ax_ * sth - ay_ * cth) / den;  // edge parameter
      if (u > 0.0 && uu >= 0.0 && uu <= 1.0 && count < 4) rho_hits[count++] = u;
    }
    std::sort(rho_hits, rho_hits + count);
    return count;
  };

  // Sectors between consecutive vertex angles (wrapping once).
  for (int sct = 0; sct < 3; ++sct) {
    double a = ang[sct];
    double b = sct == 2 ? ang[0] + two_pi : ang[sct + 1];
    if (!(b > a + 1e-14)) continue;
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < theta_order; ++i) {
      double theta = mid + half * rule.nodes[static_cast<std::size_t>(i)];
      double w = half * rule.weights[static_cast<std::size_t>(i)];
      double hits[4];
      int cnt = cuts(theta, hits);
      double rho_in, rho_out;
      if (cnt == 0) continue;
      if (cnt == 1) {
        rho_in = 0.0;  // foot inside the triangle
        rho_out = hits[0];
      } else {
        rho_in = hits[0];
        rho_out = hits[cnt - 1];
      }
      if (!(rho_out > rho_in)) continue;
      double r_in = std::sqrt(sqr(az) + sqr(rho_in));
      double r_out = std::sqrt(sqr(az) + sqr(rho_out));
      fn(w, r_in, r_out);
    }
  }
  return z;
}

double radial_p0(double alpha, double beta, double ra, double rb) {
  if (!(rb > ra)) return 0.0;
  return alpha * (rb - ra) + 0.5 * beta * (sqr(rb) - sqr(ra));
}

double radial_p1(double alpha, double beta, double ra, double rb) {
  if (!(rb > ra)) return 0.0;
  return alpha * std::log(rb / ra) + beta * (rb - ra);
}

double radial_p2(double alpha, double beta, double ra, double rb) {
  if (!(rb > ra)) return 0.0;
  return alpha * (1.0 / ra - 1.0 / rb) + beta * std::log(rb / ra);
}

}  // namespace wavebem::quad
