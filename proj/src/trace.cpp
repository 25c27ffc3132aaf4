#include "wavebem/trace.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace wavebem {

BoundaryTrace::BoundaryTrace(const geom::BoundaryMesh& m, const quad::TimeGrid& g)
    : mesh(&m), grid(g) {
  std::size_t n = static_cast<std::size_t>(m.n_elements()) * static_cast<std::size_t>(g.size());
  u.assign(n, 0.0);
  u_dot.assign(n, 0.0);
  du_dn.assign(n, 0.0);
}

double BoundaryTrace::interp(const std::vector<double>& field, int e, double s) const {
  if (s < -1e-12 * grid.dt) throw history_underflow_error("trace interp: time before history start");
  if (s > grid.duration() + 1e-9 * grid.dt)
    throw history_underflow_error("trace interp: time beyond recorded history");
  double pos = std::clamp(s / grid.dt, 0.0, static_cast<double>(grid.n_steps));
  int k = std::min(static_cast<int>(pos), grid.n_steps - 1);
  double w = pos - k;
  return (1.0 - w) * at(field, e, k) + w * at(field, e, k + 1);
}

void BoundaryTrace::derive_u_dot() {
  int n = grid.n_steps;
  double dt = grid.dt;
  for (int e = 0; e < n_elements(); ++e) {
    if (n == 1) {
      double d = (at(u, e, 1) - at(u, e, 0)) / dt;
      at(u_dot, e, 0) = at(u_dot, e, 1) = d;
      continue;
    }
    at(u_dot, e, 0) = (-1.5 * at(u, e, 0) + 2.0 * at(u, e, 1) - 0.5 * at(u, e, 2)) / dt;
    for (int k = 1; k < n; ++k)
      at(u_dot, e, k) = (at(u, e, k + 1) - at(u, e, k - 1)) / (2.0 * dt);
    at(u_dot, e, n) = (1.5 * at(u, e, n) - 2.0 * at(u, e, n - 1) + 0.5 * at(u, e, n - 2)) / dt;
  }
  has_u_dot = true;
}

void BoundaryTrace::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw validation_error("trace save: cannot open " + path);
  out << "element,step,u,u_dot,du_dn\n";
  char buf[160];
  for (int e = 0; e < n_elements(); ++e)
    for (int k = 0; k < grid.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.17g\n", e, k, at(u, e, k),
                    at(u_dot, e, k), at(du_dn, e, k));
      out << buf;
    }
}

BoundaryTrace BoundaryTrace::load(const std::string& path, const geom::BoundaryMesh& mesh,
                                  double dt) {
  std::ifstream in(path);
  if (!in) throw validation_error("trace load: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw validation_error("trace load: empty file");
  struct Row {
    int e, k;
    double u, ud, dun;
  };
  std::vector<Row> rows;
  int max_step = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Row r;
    if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf,%lf", &r.e, &r.k, &r.u, &r.ud, &r.dun) != 5)
      throw validation_error("trace load: malformed row: " + line);
    if (r.e < 0 || r.e >= mesh.n_elements())
      throw validation_error("trace load: element index out of range");
    max_step = std::max(max_step, r.k);
    rows.push_back(r);
  }
  if (rows.empty() || max_step < 1) throw validation_error("trace load: no usable rows");
  BoundaryTrace trace(mesh, quad::TimeGrid(dt, max_step));
  for (const Row& r : rows) {
    trace.at(trace.u, r.e, r.k) = r.u;
    trace.at(trace.u_dot, r.e, r.k) = r.ud;
    trace.at(trace.du_dn, r.e, r.k) = r.dun;
  }
  trace.has_u = trace.has_u_dot = trace.has_du_dn = true;
  return trace;
}

}  // namespace wavebem
