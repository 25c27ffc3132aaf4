#include "wavebem/bie.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <limits>

namespace wavebem::bie {

namespace {

// Per-pair convolution weights indexed by the lag l = k - m between the
// collocation step k and the dof step m. Each nodal hat splits into an
// early piece (tau in [t_{l-1}, t_l]) and a late piece (tau in [t_l,
// t_{l+1}]); the dof at step 0 carries only the early piece, all others
// carry both. Lags outside [l0, l0+len) vanish because the element lies
// outside the corresponding retarded band.
class LagTables {
 public:
  LagTables(int n_elem, int n_lag, int n_kernels)
      : n_elem_(n_elem), n_lag_(n_lag), n_kernels_(n_kernels),
        l0_(static_cast<std::size_t>(n_elem) * n_elem, 0),
        len_(static_cast<std::size_t>(n_elem) * n_elem, 0),
        offset_(static_cast<std::size_t>(n_elem) * n_elem, 0) {}

  void set_window(int i, int j, int l0, int len) {
    std::size_t p = pair(i, j);
    l0_[p] = l0;
    len_[p] = len;
  }
  void allocate() {
    std::size_t total = 0;
    for (std::size_t p = 0; p < offset_.size(); ++p) {
      offset_[p] = total;
      total += static_cast<std::size_t>(len_[p]) * n_kernels_ * 2;
    }
    data_.assign(total, 0.0);
  }

  int l0(int i, int j) const { return l0_[pair(i, j)]; }
  int len(int i, int j) const { return len_[pair(i, j)]; }

  // piece 0 = early, piece 1 = late; l is the absolute lag.
  double& at(int i, int j, int kernel, int piece, int l) {
    std::size_t p = pair(i, j);
    return data_[offset_[p] +
                 ((static_cast<std::size_t>(kernel) * 2 + static_cast<std::size_t>(piece)) *
                  static_cast<std::size_t>(len_[p])) +
                 static_cast<std::size_t>(l - l0_[p])];
  }
  double get(int i, int j, int kernel, int piece, int l) const {
    std::size_t p = pair(i, j);
    if (l < l0_[p] || l >= l0_[p] + len_[p]) return 0.0;
    return data_[offset_[p] +
                 ((static_cast<std::size_t>(kernel) * 2 + static_cast<std::size_t>(piece)) *
                  static_cast<std::size_t>(len_[p])) +
                 static_cast<std::size_t>(l - l0_[p])];
  }

  // Convolution with a trace field at step k. include_current = false drops
  // the m = k term (the unknown of the marching system).
  double convolve(const BoundaryTrace& trace, const std::vector<double>& field, int i,
                  int kernel, int k, bool include_current = true) const {
    double acc = 0.0;
    for (int j = 0; j < n_elem_; ++j) {
      std::size_t p = pair(i, j);
      int lo_l = std::max(l0_[p], include_current ? 0 : 1);
      int hi_l = std::min(l0_[p] + len_[p] - 1, k);
      const double* early = &data_[offset_[p]] +
                            (static_cast<std::size_t>(kernel) * 2 + 0) * static_cast<std::size_t>(len_[p]);
      const double* late = &data_[offset_[p]] +
                           (static_cast<std::size_t>(kernel) * 2 + 1) * static_cast<std::size_t>(len_[p]);
      double s = 0.0;
      for (int l = lo_l; l <= hi_l; ++l) {
        int m = k - l;
        double w = early[l - l0_[p]] + (m == 0 ? 0.0 : late[l - l0_[p]]);
        s += w * trace.at(field, j, m);
      }
      acc += s;
    }
    return acc;
  }

  int n_lag() const { return n_lag_; }

 private:
  std::size_t pair(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_elem_) + static_cast<std::size_t>(j);
  }
  int n_elem_, n_lag_, n_kernels_;
  std::vector<int> l0_, len_;
  std::vector<std::size_t> offset_;
  std::vector<double> data_;
};

constexpr int kSL = 0;   // single layer
constexpr int kDIP = 1;  // 2-D velocity dipole
constexpr int kDL = 1;   // 3-D double layer
constexpr int kVL = 2;   // 3-D velocity layer

LagTables build_tables_2d(const geom::BoundaryMesh& mesh, const quad::TimeGrid& grid, double c,
                          const MarchConfig& cfg) {
  int n = mesh.n_elements();
  int n_lag = grid.n_steps + 1;
  double dt = grid.dt;
  LagTables tab(n, n_lag, 2);
  // 2-D kernels have tails: every window runs to the last lag.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double rij = dist(mesh.element(i).centroid, mesh.element(j).centroid);
      double r_min = std::max(0.0, rij - mesh.element(j).diameter);
      int l0 = std::max(0, static_cast<int>(r_min / (c * dt)) - 1);
      tab.set_window(i, j, l0, n_lag - l0);
    }
  tab.allocate();

  parallel_for(static_cast<std::size_t>(n), [&](std::size_t ii) {
    int i = static_cast<int>(ii);
    const vec3 x = mesh.element(i).centroid;
    std::vector<quad::QuadPoint> pts;
    std::vector<double> theta(static_cast<std::size_t>(n_lag) + 1);
    std::vector<double> sq(static_cast<std::size_t>(n_lag) + 1);
    for (int j = 0; j < n; ++j) {
      const geom::Element& el = mesh.element(j);
      bool self = i == j;
      quad::element_quadrature(mesh, j, x, cfg.quad, pts);
      for (const quad::QuadPoint& q : pts) {
        double r = dist(q.y, x);
        if (r == 0.0) continue;
        double drdn_r = self ? 0.0 : geom::dr_dn(x, q.y, el.normal) / r;
        // Knot values theta_l = acosh(c t_l / r), s_l = sqrt(c^2 t_l^2 - r^2),
        // clamped to the cone so interval differences start at r/c.
        for (int l = 0; l <= n_lag; ++l) {
          double z = c * (l * dt) / r;
          theta[static_cast<std::size_t>(l)] = z > 1.0 ? std::acosh(z) : 0.0;
          sq[static_cast<std::size_t>(l)] = z > 1.0 ? std::sqrt(sqr(c * l * dt) - sqr(r)) : 0.0;
        }
        for (int l = tab.l0(i, j); l < n_lag; ++l) {
          double tl = l * dt;
          double th_l = theta[static_cast<std::size_t>(l)], sq_l = sq[static_cast<std::size_t>(l)];
          double th_n = theta[static_cast<std::size_t>(l + 1)], sq_n = sq[static_cast<std::size_t>(l + 1)];
          // late piece: tau in [t_l, t_{l+1}], weight (l+1) - tau/dt
          if (th_n > th_l) {
            double i0 = (th_n - th_l) / c;
            double i1 = (sq_n - sq_l) / sqr(c);
            double i2 = ((tl + dt) * sq_n - tl * sq_l) / (2.0 * sqr(c)) +
                        sqr(r) * (th_n - th_l) / (2.0 * c * sqr(c));
            double a_hi = l + 1.0, b_hi = -1.0 / dt;
            tab.at(i, j, kSL, 1, l) += c * q.w * (a_hi * i0 + b_hi * i1);
            if (!self) tab.at(i, j, kDIP, 1, l) += c * q.w * drdn_r * (a_hi * i1 + b_hi * i2);
          }
          // early piece: tau in [t_{l-1}, t_l], weight -(l-1) + tau/dt
          if (l >= 1) {
            double th_p = theta[static_cast<std::size_t>(l - 1)], sq_p = sq[static_cast<std::size_t>(l - 1)];
            if (th_l > th_p) {
              double i0 = (th_l - th_p) / c;
              double i1 = (sq_l - sq_p) / sqr(c);
              double i2 = (tl * sq_l - (tl - dt) * sq_p) / (2.0 * sqr(c)) +
                          sqr(r) * (th_l - th_p) / (2.0 * c * sqr(c));
              double a_lo = -(l - 1.0), b_lo = 1.0 / dt;
              tab.at(i, j, kSL, 0, l) += c * q.w * (a_lo * i0 + b_lo * i1);
              if (!self) tab.at(i, j, kDIP, 0, l) += c * q.w * drdn_r * (a_lo * i1 + b_lo * i2);
            }
          }
        }
      }
    }
  });
  return tab;
}

LagTables build_tables_3d(const geom::BoundaryMesh& mesh, const quad::TimeGrid& grid, double c,
                          const MarchConfig& cfg) {
  int n = mesh.n_elements();
  int n_lag = grid.n_steps + 1;
  double dt = grid.dt;
  double z_tol = 1e-12 * mesh.diameter();
  LagTables tab(n, n_lag, 3);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double rij = dist(mesh.element(i).centroid, mesh.element(j).centroid);
      double pad = mesh.element(j).diameter + c * dt;
      int l0 = std::max(0, static_cast<int>((rij - pad) / (c * dt)) - 1);
      int l1 = std::min(n_lag - 1, static_cast<int>((rij + pad) / (c * dt)) + 1);
      tab.set_window(i, j, l0, std::max(0, l1 - l0 + 1));
    }
  tab.allocate();

  parallel_for(static_cast<std::size_t>(n), [&](std::size_t ii) {
    int i = static_cast<int>(ii);
    const vec3 x = mesh.element(i).centroid;
    for (int j = 0; j < n; ++j) {
      double z = quad::element_height(mesh, j, x);
      bool dipoles = std::fabs(z) > z_tol;
      int jl0 = tab.l0(i, j), jlen = tab.len(i, j);
      quad::triangle_polar_sectors(
          mesh, j, x, cfg.theta_order, [&](double w, double r_in, double r_out) {
            int l_lo = std::max(jl0, static_cast<int>(r_in / (c * dt)) - 1);
            int l_hi = std::min(jl0 + jlen - 1, static_cast<int>(r_out / (c * dt)) + 1);
            for (int l = l_lo; l <= l_hi; ++l) {
              {  // late piece: r in [c t_l, c t_{l+1}], weight (l+1) - r/(c dt)
                double ra = std::max(r_in, c * l * dt);
                double rb = std::min(r_out, c * (l + 1) * dt);
                if (rb > ra) {
                  double alpha = l + 1.0, beta = -1.0 / (c * dt);
                  tab.at(i, j, kSL, 1, l) += w * quad::radial_p0(alpha, beta, ra, rb);
                  if (dipoles) {
                    tab.at(i, j, kDL, 1, l) += w * (-z) * quad::radial_p2(alpha, beta, ra, rb);
                    tab.at(i, j, kVL, 1, l) +=
                        w * (-z / c) * quad::radial_p1(alpha, beta, ra, rb);
                  }
                }
              }
              if (l >= 1) {  // early piece: r in [c t_{l-1}, c t_l]
                double ra = std::max(r_in, c * (l - 1) * dt);
                double rb = std::min(r_out, c * l * dt);
                if (rb > ra) {
                  double alpha = -(l - 1.0), beta = 1.0 / (c * dt);
                  tab.at(i, j, kSL, 0, l) += w * quad::radial_p0(alpha, beta, ra, rb);
                  if (dipoles) {
                    tab.at(i, j, kDL, 0, l) += w * (-z) * quad::radial_p2(alpha, beta, ra, rb);
                    tab.at(i, j, kVL, 0, l) +=
                        w * (-z / c) * quad::radial_p1(alpha, beta, ra, rb);
                  }
                }
              }
            }
          });
    }
  });
  return tab;
}

struct Solver {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  Eigen::MatrixXd A;
  double cond = 0.0;

  void factor(const Eigen::MatrixXd& m, double cond_limit) {
    A = m;
    lu.compute(A);
    double rc = lu.rcond();
    cond = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
    if (!(cond < cond_limit))
      throw numerical_error("marching system is numerically singular (cond ~ " +
                            std::to_string(cond) + ")");
  }
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const { return lu.solve(b); }
  double residual(const Eigen::VectorXd& x, const Eigen::VectorXd& b) const {
    double scale = b.lpNorm<Eigen::Infinity>();
    double res = (A * x - b).lpNorm<Eigen::Infinity>();
    return scale > 0.0 ? res / scale : res;
  }
};

void apply_filter(BoundaryTrace& trace, std::vector<double>& field, int k) {
  if (k < 2) return;
  for (int e = 0; e < trace.n_elements(); ++e)
    trace.at(field, e, k - 1) = 0.25 * trace.at(field, e, k - 2) +
                                0.5 * trace.at(field, e, k - 1) +
                                0.25 * trace.at(field, e, k);
}

std::vector<double> initial_source_column(const geom::BoundaryMesh& mesh,
                                          const geom::DomainIndicator& ind,
                                          const InitialData& init, const SourceTerm& src,
                                          double t, double c, const MarchConfig& cfg) {
  std::vector<double> is(static_cast<std::size_t>(mesh.n_elements()), 0.0);
  if (init.is_zero && !src.active) return is;
  parallel_for(is.size(), [&](std::size_t i) {
    const vec3 x = mesh.element(static_cast<int>(i)).centroid;
    is[i] = mesh.dim() == 2
                ? representation::initial_source_terms_2d(mesh, ind, init, src, x, t, c, cfg.eval)
                : representation::initial_source_terms_3d(mesh, ind, init, src, x, t, c, cfg.eval);
  });
  return is;
}

}  // namespace

MarchResult march_dirichlet(const BoundaryTrace& data, const InitialData& init,
                            const SourceTerm& src, double c, const MarchConfig& cfg) {
  const geom::BoundaryMesh& mesh = *data.mesh;
  if (mesh.dim() == 1)
    throw validation_error("march_dirichlet: use solve_1d_boundary for 1-D problems");
  if (!data.has_u || !data.has_u_dot)
    throw validation_error("march_dirichlet: boundary displacement and velocity required");
  const quad::TimeGrid& grid = data.grid;
  int n = mesh.n_elements();
  bool is2d = mesh.dim() == 2;
  double jump = is2d ? pi : two_pi;

  LagTables tab = is2d ? build_tables_2d(mesh, grid, c, cfg) : build_tables_3d(mesh, grid, c, cfg);
  Eigen::MatrixXd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = tab.get(i, j, kSL, 1, 0);
  Solver solver;
  solver.factor(A, cfg.cond_limit);

  MarchResult out;
  out.trace = data;
  out.trace.has_du_dn = true;
  geom::DomainIndicator ind(mesh);

  std::vector<double> rhs(static_cast<std::size_t>(n));
  for (int k = 1; k <= grid.n_steps; ++k) {
    double t = grid.time(k);
    std::vector<double> is = initial_source_column(mesh, ind, init, src, t, c, cfg);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
      int ii = static_cast<int>(i);
      double hist;
      if (is2d) {
        hist = tab.convolve(out.trace, out.trace.u_dot, ii, kDIP, k);
      } else {
        hist = tab.convolve(out.trace, out.trace.u_dot, ii, kVL, k) +
               tab.convolve(out.trace, out.trace.u, ii, kDL, k);
      }
      double sl_known = tab.convolve(out.trace, out.trace.du_dn, ii, kSL, k, false);
      rhs[i] = jump * out.trace.at(out.trace.u, ii, k) - hist - is[i] - sl_known;
    });
    Eigen::VectorXd b = Eigen::Map<Eigen::VectorXd>(rhs.data(), n);
    Eigen::VectorXd x = solver.solve(b);
    for (int i = 0; i < n; ++i) out.trace.at(out.trace.du_dn, i, k) = x(i);
    if (cfg.averaging_filter) apply_filter(out.trace, out.trace.du_dn, k);
    out.log.push_back({k, t, solver.residual(x, b), solver.cond});
  }
  return out;
}

MarchResult march_neumann(const BoundaryTrace& data, const InitialData& init,
                          const SourceTerm& src, double c, const MarchConfig& cfg) {
  const geom::BoundaryMesh& mesh = *data.mesh;
  if (mesh.dim() == 1)
    throw validation_error("march_neumann: use solve_1d_boundary for 1-D problems");
  if (!data.has_du_dn) throw validation_error("march_neumann: boundary flux required");
  const quad::TimeGrid& grid = data.grid;
  int n = mesh.n_elements();
  bool is2d = mesh.dim() == 2;
  double jump = is2d ? pi : two_pi;
  double dt = grid.dt;

  LagTables tab = is2d ? build_tables_2d(mesh, grid, c, cfg) : build_tables_3d(mesh, grid, c, cfg);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    A(i, i) += jump * 0.5 * dt;
    for (int j = 0; j < n; ++j) {
      if (is2d) {
        A(i, j) -= tab.get(i, j, kDIP, 1, 0);
      } else {
        A(i, j) -= 0.5 * dt * tab.get(i, j, kDL, 1, 0);
        A(i, j) -= tab.get(i, j, kVL, 1, 0);
      }
    }
  }
  Solver solver;
  solver.factor(A, cfg.cond_limit);

  MarchResult out;
  out.trace = data;
  out.trace.has_u = true;
  out.trace.has_u_dot = true;
  geom::DomainIndicator ind(mesh);

  std::vector<double> rhs(static_cast<std::size_t>(n)), u_bar(static_cast<std::size_t>(n));
  for (int k = 1; k <= grid.n_steps; ++k) {
    double t = grid.time(k);
    std::vector<double> is = initial_source_column(mesh, ind, init, src, t, c, cfg);
    for (int i = 0; i < n; ++i)
      u_bar[static_cast<std::size_t>(i)] = out.trace.at(out.trace.u, i, k - 1) +
                                           0.5 * dt * out.trace.at(out.trace.u_dot, i, k - 1);
    // Provisional current values: velocity 0 (it is the unknown), current
    // displacement at its velocity-free part; the matrix carries the rest.
    for (int i = 0; i < n; ++i) {
      out.trace.at(out.trace.u, i, k) = u_bar[static_cast<std::size_t>(i)];
      out.trace.at(out.trace.u_dot, i, k) = 0.0;
    }
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
      int ii = static_cast<int>(i);
      double sl = tab.convolve(out.trace, out.trace.du_dn, ii, kSL, k);
      double hist;
      if (is2d) {
        hist = tab.convolve(out.trace, out.trace.u_dot, ii, kDIP, k);
      } else {
        hist = tab.convolve(out.trace, out.trace.u_dot, ii, kVL, k) +
               tab.convolve(out.trace, out.trace.u, ii, kDL, k);
      }
      rhs[i] = sl + hist + is[i] - jump * u_bar[i];
    });
    Eigen::VectorXd b = Eigen::Map<Eigen::VectorXd>(rhs.data(), n);
    Eigen::VectorXd x = solver.solve(b);
    for (int i = 0; i < n; ++i) {
      out.trace.at(out.trace.u_dot, i, k) = x(i);
      out.trace.at(out.trace.u, i, k) = u_bar[static_cast<std::size_t>(i)] + 0.5 * dt * x(i);
    }
    if (cfg.averaging_filter) {
      apply_filter(out.trace, out.trace.u_dot, k);
      apply_filter(out.trace, out.trace.u, k);
    }
    out.log.push_back({k, t, solver.residual(x, b), solver.cond});
  }
  return out;
}

// --- 1-D delayed endpoint equations -----------------------------------------

BoundaryTrace solve_1d_boundary(const geom::BoundaryMesh& mesh, const quad::TimeGrid& grid,
                                BVPKind kind, const BoundaryTrace& data,
                                const InitialData& init, double c) {
  if (mesh.dim() != 1) throw validation_error("solve_1d_boundary: 1-D mesh required");
  double a1 = mesh.a1(), a2 = mesh.a2();
  double d = a2 - a1;
  double dt = grid.dt;
  if (dt > d / c + 1e-15)
    throw validation_error("solve_1d_boundary: dt must not exceed the transit time d/c");
  int n = grid.n_steps;

  BoundaryTrace out(mesh, grid);
  out.has_u = out.has_du_dn = true;

  // q_k = u_x(a_k, t): q1 = -du_dn at a1, q2 = +du_dn at a2.
  std::vector<double> q1(static_cast<std::size_t>(n) + 1, 0.0), q2(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> U1(static_cast<std::size_t>(n) + 1, 0.0), U2(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> T1(static_cast<std::size_t>(n) + 1, 0.0), T2(static_cast<std::size_t>(n) + 1, 0.0);

  bool q1_known = kind == BVPKind::neumann || kind == BVPKind::mixed_1d;
  bool q2_known = kind == BVPKind::neumann;
  bool u1_known = kind == BVPKind::dirichlet;
  bool u2_known = kind == BVPKind::dirichlet || kind == BVPKind::mixed_1d;

  for (int k = 0; k <= n; ++k) {
    if (q1_known) q1[static_cast<std::size_t>(k)] = -data.at(data.du_dn, 0, k);
    if (q2_known) q2[static_cast<std::size_t>(k)] = data.at(data.du_dn, 1, k);
    if (u1_known) U1[static_cast<std::size_t>(k)] = data.at(data.u, 0, k);
    if (u2_known) U2[static_cast<std::size_t>(k)] = data.at(data.u, 1, k);
  }

  if (!u1_known) U1[0] = init.eval_u0(vec3{a1});
  if (!u2_known) U2[0] = init.eval_u0(vec3{a2});
  double h = 1e-6 * d;
  if (!q1_known && !init.is_zero)
    q1[0] = (-3.0 * init.eval_u0(vec3{a1}) + 4.0 * init.eval_u0(vec3{a1 + h}) -
             init.eval_u0(vec3{a1 + 2 * h})) /
            (2.0 * h);
  if (!q2_known && !init.is_zero)
    q2[0] = (3.0 * init.eval_u0(vec3{a2}) - 4.0 * init.eval_u0(vec3{a2 - h}) +
             init.eval_u0(vec3{a2 - 2 * h})) /
            (2.0 * h);

  auto iv = [&](double x, double t) {
    if (init.is_zero) return 0.0;
    double ct = c * t;
    double val = 0.0;
    double lo = std::max(a1, x - ct), hi = std::min(a2, x + ct);
    if (hi > lo) {
      const quad::GaussRule& rule = quad::gauss_rule(24);
      double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
      double acc = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc += half * rule.weights[i] * init.eval_u0_dot(vec3{mid + half * rule.nodes[i]});
      val += acc / c;
    }
    auto hs = [&](double y) {
      if (y == a1 || y == a2) return 0.5;
      return (y > a1 && y < a2) ? 1.0 : 0.0;
    };
    val += init.eval_u0(vec3{x + ct}) * hs(x + ct);
    val += init.eval_u0(vec3{x - ct}) * hs(x - ct);
    return val;
  };

  auto interp = [&](const std::vector<double>& v, double s) {
    double pos = std::clamp(s / dt, 0.0, static_cast<double>(n));
    int k = std::min(static_cast<int>(pos), n - 1);
    double w = pos - k;
    return (1.0 - w) * v[static_cast<std::size_t>(k)] + w * v[static_cast<std::size_t>(k + 1)];
  };
  auto integral_to = [&](const std::vector<double>& q, const std::vector<double>& T, double s) {
    if (s <= 0.0) return 0.0;
    int full = std::min(static_cast<int>(s / dt), n);
    double acc = T[static_cast<std::size_t>(full)];
    double rem = s - full * dt;
    if (rem > 0.0 && full < n)
      acc += 0.5 * rem * (q[static_cast<std::size_t>(full)] + interp(q, s));
    return acc;
  };

  for (int k = 1; k <= n; ++k) {
    double t = grid.time(k);
    double ct = c * t;
    double hd = heaviside(ct - d);
    double tret = t - d / c;

    // a2 relation first: it sees a1 only through retarded (older) values.
    double q1ret = hd > 0.0 ? integral_to(q1, T1, tret) : 0.0;
    if (q2_known) {
      T2[static_cast<std::size_t>(k)] =
          T2[static_cast<std::size_t>(k - 1)] + 0.5 * dt * (q2[static_cast<std::size_t>(k - 1)] + q2[static_cast<std::size_t>(k)]);
      if (!u2_known)
        U2[static_cast<std::size_t>(k)] =
            c * T2[static_cast<std::size_t>(k)] - c * hd * q1ret + hd * interp(U1, tret) + iv(a2, t);
    } else {
      double known = -c * hd * q1ret + hd * interp(U1, tret) + iv(a2, t) +
                     c * (T2[static_cast<std::size_t>(k - 1)] + 0.5 * dt * q2[static_cast<std::size_t>(k - 1)]);
      q2[static_cast<std::size_t>(k)] = (U2[static_cast<std::size_t>(k)] - known) / (0.5 * c * dt);
      T2[static_cast<std::size_t>(k)] =
          T2[static_cast<std::size_t>(k - 1)] + 0.5 * dt * (q2[static_cast<std::size_t>(k - 1)] + q2[static_cast<std::size_t>(k)]);
    }

    double q2ret = hd > 0.0 ? integral_to(q2, T2, tret) : 0.0;
    if (q1_known) {
      T1[static_cast<std::size_t>(k)] =
          T1[static_cast<std::size_t>(k - 1)] + 0.5 * dt * (q1[static_cast<std::size_t>(k - 1)] + q1[static_cast<std::size_t>(k)]);
      if (!u1_known)
        U1[static_cast<std::size_t>(k)] =
            c * hd * q2ret - c * T1[static_cast<std::size_t>(k)] + hd * interp(U2, tret) + iv(a1, t);
    } else {
      double known = c * hd * q2ret + hd * interp(U2, tret) + iv(a1, t) -
                     c * (T1[static_cast<std::size_t>(k - 1)] + 0.5 * dt * q1[static_cast<std::size_t>(k - 1)]);
      q1[static_cast<std::size_t>(k)] = (known - U1[static_cast<std::size_t>(k)]) / (0.5 * c * dt);
      T1[static_cast<std::size_t>(k)] =
          T1[static_cast<std::size_t>(k - 1)] + 0.5 * dt * (q1[static_cast<std::size_t>(k - 1)] + q1[static_cast<std::size_t>(k)]);
    }
  }

  for (int k = 0; k <= n; ++k) {
    out.at(out.u, 0, k) = U1[static_cast<std::size_t>(k)];
    out.at(out.u, 1, k) = U2[static_cast<std::size_t>(k)];
    out.at(out.du_dn, 0, k) = -q1[static_cast<std::size_t>(k)];
    out.at(out.du_dn, 1, k) = q2[static_cast<std::size_t>(k)];
  }
  out.derive_u_dot();
  return out;
}

}  // namespace wavebem::bie
