#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wavebem/geometry.hpp"
#include "wavebem/quadrature.hpp"

namespace wavebem {

// Time histories of the Cauchy data on the boundary elements: u, du/dt and
// du/dn, stored per element per step from t = 0. Depending on the problem
// some of the three are data and some are filled by the solver.
struct BoundaryTrace {
  const geom::BoundaryMesh* mesh = nullptr;
  quad::TimeGrid grid;
  std::vector<double> u;       // [elem * (n_steps+1) + step]
  std::vector<double> u_dot;
  std::vector<double> du_dn;
  bool has_u = false;
  bool has_u_dot = false;
  bool has_du_dn = false;

  BoundaryTrace() = default;
  BoundaryTrace(const geom::BoundaryMesh& m, const quad::TimeGrid& g);

  int n_elements() const { return mesh->n_elements(); }
  double& at(std::vector<double>& field, int e, int k) {
    return field[static_cast<std::size_t>(e) * static_cast<std::size_t>(grid.size()) + static_cast<std::size_t>(k)];
  }
  double at(const std::vector<double>& field, int e, int k) const {
    return field[static_cast<std::size_t>(e) * static_cast<std::size_t>(grid.size()) + static_cast<std::size_t>(k)];
  }

  // Piecewise-linear interpolation in time; s must lie in [0, t_n].
  double interp(const std::vector<double>& field, int e, double s) const;

  // Centered differences of u into u_dot (one-sided at the ends).
  void derive_u_dot();

  void save(const std::string& path) const;
  static BoundaryTrace load(const std::string& path, const geom::BoundaryMesh& mesh, double dt);
};

// Initial displacement and velocity, evaluable anywhere in the domain.
struct InitialData {
  std::function<double(const vec3&)> u0;
  std::function<double(const vec3&)> u0_dot;
  const geom::DomainIndicator* support = nullptr;  // optional restriction
  bool is_zero = true;

  static InitialData zero() { return InitialData{}; }
  static InitialData fields(std::function<double(const vec3&)> u0_,
                            std::function<double(const vec3&)> u0_dot_) {
    InitialData d;
    d.u0 = std::move(u0_);
    d.u0_dot = std::move(u0_dot_);
    d.is_zero = false;
    return d;
  }
  double eval_u0(const vec3& x) const { return is_zero || !u0 ? 0.0 : u0(x); }
  double eval_u0_dot(const vec3& x) const { return is_zero || !u0_dot ? 0.0 : u0_dot(x); }
};

// Right-hand side G(x, t) of the wave equation; locally integrable.
struct SourceTerm {
  std::function<double(const vec3&, double)> G;
  bool active = false;

  static SourceTerm none() { return SourceTerm{}; }
  double eval(const vec3& x, double t) const { return active && G ? G(x, t) : 0.0; }
};

struct FieldSample {
  vec3 x;
  double t = 0.0;
  double value = 0.0;
};

}  // namespace wavebem
