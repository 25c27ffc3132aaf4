#include "wavebem/oracle.hpp"

namespace wavebem::oracle {

double Profile::g(double s) const {
  if (s <= 0.0) return 0.0;
  switch (kind) {
    case Kind::quadratic: return amplitude * s * s;
    case Kind::ramp_sine: return amplitude * (omega * s - std::sin(omega * s));
    case Kind::cubic_exp: return amplitude * s * s * s * std::exp(-s);
    default: {
      if (s >= s1) return 0.0;
      double q = s / s1;
      return amplitude * 64.0 * q * q * q * sqr(1.0 - q) * (1.0 - q);
    }
  }
}

double Profile::g1(double s) const {
  if (s <= 0.0) return 0.0;
  switch (kind) {
    case Kind::quadratic: return amplitude * 2.0 * s;
    case Kind::ramp_sine: return amplitude * omega * (1.0 - std::cos(omega * s));
    case Kind::cubic_exp: return amplitude * (3.0 - s) * s * s * std::exp(-s);
    default: {
      if (s >= s1) return 0.0;
      double q = s / s1;
      return amplitude * 64.0 * 3.0 * q * q * sqr(1.0 - q) * (1.0 - 2.0 * q) / s1;
    }
  }
}

double Profile::g2(double s) const {
  if (s <= 0.0) return 0.0;
  switch (kind) {
    case Kind::quadratic: return amplitude * 2.0;
    case Kind::ramp_sine: return amplitude * omega * omega * std::sin(omega * s);
    case Kind::cubic_exp: return amplitude * (6.0 - 6.0 * s + s * s) * s * std::exp(-s);
    default: {
      if (s >= s1) return 0.0;
      double q = s / s1;
      return amplitude * 64.0 * 6.0 * q * (1.0 - q) * (1.0 - 5.0 * q + 5.0 * q * q) / (s1 * s1);
    }
  }
}

Profile Profile::parse(const std::string& name, double param, double amplitude) {
  Profile p;
  p.amplitude = amplitude;
  if (name == "quadratic") {
    p.kind = Kind::quadratic;
  } else if (name == "ramp_sine") {
    p.kind = Kind::ramp_sine;
    if (param > 0.0) p.omega = param;
  } else if (name == "cubic_exp") {
    p.kind = Kind::cubic_exp;
  } else if (name == "poly_pulse") {
    p.kind = Kind::poly_pulse;
    if (param > 0.0) p.s1 = param;
  } else {
    throw validation_error("unknown profile: " + name);
  }
  return p;
}

OracleSolution OracleSolution::plane_wave(const Profile& profile, const vec3& k, double c,
                                          double shift) {
  vec3 khat = k.normalized();
  OracleSolution o;
  o.c_ = c;
  o.fn = [profile, khat, c, shift](const vec3& x, double t) {
    double s = c * t - khat.dot(x) - shift;
    OracleEval v;
    v.u = profile.g(s);
    double g1 = profile.g1(s);
    v.u_dot = c * g1;
    v.grad = khat * (-g1);
    return v;
  };
  return o;
}

OracleSolution OracleSolution::standing_wave_1d(double a1, double a2, int mode, double c) {
  if (!(a2 > a1) || mode < 1) throw validation_error("standing_wave_1d: bad parameters");
  double kx = mode * pi / (a2 - a1);
  OracleSolution o;
  o.c_ = c;
  o.fn = [a1, kx, c](const vec3& x, double t) {
    OracleEval v;
    double sx = std::sin(kx * (x.x - a1)), cx = std::cos(kx * (x.x - a1));
    double st = std::sin(kx * c * t), ct = std::cos(kx * c * t);
    v.u = sx * ct;
    v.u_dot = -kx * c * sx * st;
    v.grad = vec3{kx * cx * ct};
    return v;
  };
  return o;
}

OracleSolution OracleSolution::spherical_pulse_3d(const Profile& f, const vec3& center,
                                                  double c) {
  OracleSolution o;
  o.c_ = c;
  o.fn = [f, center, c](const vec3& x, double t) {
    vec3 d = x - center;
    double r = d.norm();
    OracleEval v;
    double eps = 1e-6 * c * std::max(f.s1, 1.0);
    if (r < eps) {
      v.u = -f.g1(t) / (two_pi * c);
      v.u_dot = -f.g2(t) / (two_pi * c);
      v.grad = vec3{};
      return v;
    }
    double sm = t - r / c, sp = t + r / c;
    double fm = f.g(sm), fp = f.g(sp);
    double f1m = f.g1(sm), f1p = f.g1(sp);
    v.u = (fm - fp) / (four_pi * r);
    v.u_dot = (f1m - f1p) / (four_pi * r);
    double du_dr = (-f1m / c - f1p / c) / (four_pi * r) - (fm - fp) / (four_pi * r * r);
    v.grad = d * (du_dr / r);
    return v;
  };
  return o;
}

namespace {

// b(x) = (1 - xi^2)^3 on |xi| < 1 and its antiderivative.
double bump(double xi) { return std::fabs(xi) < 1.0 ? sqr(1.0 - xi * xi) * (1.0 - xi * xi) : 0.0; }
double bump1(double xi) {
  return std::fabs(xi) < 1.0 ? -6.0 * xi * sqr(1.0 - xi * xi) : 0.0;
}
double bump_antideriv(double xi) {  // \int_{-1}^{xi} b
  if (xi <= -1.0) return 0.0;
  double z = std::min(xi, 1.0);
  // \int (1-z^2)^3 dz = z - z^3 + 3 z^5 / 5 - z^7 / 7
  auto F = [](double z_) { return z_ - z_ * z_ * z_ + 0.6 * std::pow(z_, 5) - std::pow(z_, 7) / 7.0; };
  return F(z) - F(-1.0);
}

}  // namespace

OracleSolution OracleSolution::dalembert_1d(double u0_amp, double v0_amp, double x0, double w,
                                            double c) {
  if (!(w > 0.0)) throw validation_error("dalembert_1d: bump width must be positive");
  OracleSolution o;
  o.c_ = c;
  o.fn = [u0_amp, v0_amp, x0, w, c](const vec3& x, double t) {
    auto xi = [&](double p) { return (p - x0) / w; };
    OracleEval v;
    double xp = x.x + c * t, xm = x.x - c * t;
    v.u = 0.5 * u0_amp * (bump(xi(xp)) + bump(xi(xm))) +
          (v0_amp * w / (2.0 * c)) * (bump_antideriv(xi(xp)) - bump_antideriv(xi(xm)));
    v.u_dot = 0.5 * u0_amp * c * (bump1(xi(xp)) - bump1(xi(xm))) / w +
              0.5 * v0_amp * (bump(xi(xp)) + bump(xi(xm)));
    v.grad = vec3{0.5 * u0_amp * (bump1(xi(xp)) + bump1(xi(xm))) / w +
                  (v0_amp / (2.0 * c)) * (bump(xi(xp)) - bump(xi(xm)))};
    return v;
  };
  return o;
}

OracleEval OracleSolution::eval(const vec3& x, double t) const { return fn(x, t); }

InitialData OracleSolution::initial_data() const {
  auto f = fn;
  return InitialData::fields([f](const vec3& x) { return f(x, 0.0).u; },
                             [f](const vec3& x) { return f(x, 0.0).u_dot; });
}

void OracleSolution::fill_trace(BoundaryTrace& trace, bool fill_u, bool fill_u_dot,
                                bool fill_du_dn) const {
  const geom::BoundaryMesh& mesh = *trace.mesh;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const geom::Element& el = mesh.element(e);
    for (int k = 0; k < trace.grid.size(); ++k) {
      OracleEval v = fn(el.centroid, trace.grid.time(k));
      if (fill_u) trace.at(trace.u, e, k) = v.u;
      if (fill_u_dot) trace.at(trace.u_dot, e, k) = v.u_dot;
      if (fill_du_dn) trace.at(trace.du_dn, e, k) = v.grad.dot(el.normal);
    }
  }
  trace.has_u |= fill_u;
  trace.has_u_dot |= fill_u_dot;
  trace.has_du_dn |= fill_du_dn;
}

double poisson_2d_bruteforce(const InitialData& init, const vec3& x, double t, double c,
                             int resolution) {
  if (!(t > 0.0)) return init.eval_u0(x);
  double ct = c * t;
  // Composite Simpson in the radial substitution r = ct sin(phi) and
  // trapezoid in the angle; deliberately independent of the production
  // quadrature path.
  int n_phi = 2 * resolution;
  int n_theta = 2 * resolution;
  auto disk = [&](const std::function<double(const vec3&)>& g, double tt) {
    double ctt = c * tt;
    double sum = 0.0;
    for (int j = 0; j < n_theta; ++j) {
      double theta = two_pi * j / n_theta;
      vec3 omega{std::cos(theta), std::sin(theta)};
      double ray = 0.0;
      for (int i = 0; i <= n_phi; ++i) {
        double phi = 0.5 * pi * i / n_phi;
        double wsimp = (i == 0 || i == n_phi) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        ray += wsimp * g(x + omega * (ctt * std::sin(phi))) * std::sin(phi);
      }
      ray *= (0.5 * pi / n_phi) / 3.0 * ctt;
      sum += ray * (two_pi / n_theta);
    }
    return sum / c;
  };
  auto u0 = [&](const vec3& y) { return init.eval_u0(y); };
  auto v0 = [&](const vec3& y) { return init.eval_u0_dot(y); };
  double dtau = 1e-5 * t;
  double ddt = (disk(u0, t + dtau) - disk(u0, t - dtau)) / (2.0 * dtau);
  return (ddt + disk(v0, t)) / two_pi;
}

}  // namespace wavebem::oracle
