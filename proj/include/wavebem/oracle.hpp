#pragma once

#include <functional>
#include <string>

#include "wavebem/common.hpp"
#include "wavebem/trace.hpp"

namespace wavebem::oracle {

// Scalar wave profiles with closed-form derivatives. All start at zero:
// g(s) = 0 for s <= 0, so traces driven by them have finite history and
// compatible (zero) initial data.
struct Profile {
  enum class Kind {
    quadratic,   // s^2 H(s)                      (C^1)
    ramp_sine,   // (w s - sin(w s)) H(s)         (C^2, unbounded)
    cubic_exp,   // s^3 exp(-s) H(s)              (C^2, decaying)
    poly_pulse,  // 64 (s/s1)^3 (1-s/s1)^3 on [0, s1], else 0   (C^2, compact)
  };
  Kind kind = Kind::ramp_sine;
  double omega = two_pi;  // ramp_sine rate
  double s1 = 1.0;        // poly_pulse support length
  double amplitude = 1.0;

  double g(double s) const;
  double g1(double s) const;  // dg/ds
  double g2(double s) const;  // d2g/ds2
  static Profile parse(const std::string& name, double param, double amplitude);
};

struct OracleEval {
  double u = 0.0;
  double u_dot = 0.0;
  vec3 grad;
};

// Closed-form exact solutions of the homogeneous wave equation used as
// ground truth for the representation and boundary-equation solvers.
class OracleSolution {
 public:
  // u = g(c t - k.x - shift), |k| = 1.
  static OracleSolution plane_wave(const Profile& profile, const vec3& k, double c,
                                   double shift);
  // u = sin(m pi (x-a1)/d) cos(m pi c t / d) on [a1, a2].
  static OracleSolution standing_wave_1d(double a1, double a2, int mode, double c);
  // u = (f(t - r/c) - f(t + r/c)) / (4 pi r), radial about `center`.
  static OracleSolution spherical_pulse_3d(const Profile& f, const vec3& center, double c);
  // u = (u0(x-ct)+u0(x+ct))/2 + (V(x+ct)-V(x-ct))/(2c) with compact bump data.
  // bump(x) = amp (1 - ((x-x0)/w)^2)^3 on |x-x0| < w, for u0 and u0_dot.
  static OracleSolution dalembert_1d(double u0_amp, double v0_amp, double x0, double w,
                                     double c);

  OracleEval eval(const vec3& x, double t) const;
  double c() const { return c_; }

  // Initial data / boundary trace extraction.
  InitialData initial_data() const;
  void fill_trace(BoundaryTrace& trace, bool fill_u, bool fill_u_dot, bool fill_du_dn) const;

  std::function<OracleEval(const vec3&, double)> fn;

 private:
  OracleSolution() = default;
  double c_ = 1.0;
};

// Dense polar quadrature of the 2-D Poisson initial-data propagator at high
// resolution; independent check for the representation path.
double poisson_2d_bruteforce(const InitialData& init, const vec3& x, double t, double c,
                             int resolution);

}  // namespace wavebem::oracle
