#include "wavebem/geometry.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace wavebem::geom {

namespace {

Element make_segment(const std::vector<vec3>& nodes, int a, int b) {
  Element e;
  e.verts = {a, b, -1};
  e.n_verts = 2;
  vec3 p = nodes[static_cast<std::size_t>(a)];
  vec3 q = nodes[static_cast<std::size_t>(b)];
  e.centroid = (p + q) * 0.5;
  vec3 tang = q - p;
  e.measure = tang.norm();
  e.diameter = e.measure;
  // CCW boundary: rotating the tangent by -90 degrees points outward.
  e.normal = vec3{tang.y, -tang.x, 0.0} / e.measure;
  return e;
}

Element make_triangle(const std::vector<vec3>& nodes, int a, int b, int c) {
  Element e;
  e.verts = {a, b, c};
  e.n_verts = 3;
  vec3 p0 = nodes[static_cast<std::size_t>(a)];
  vec3 p1 = nodes[static_cast<std::size_t>(b)];
  vec3 p2 = nodes[static_cast<std::size_t>(c)];
  e.centroid = (p0 + p1 + p2) / 3.0;
  vec3 n = (p1 - p0).cross(p2 - p0);
  double n2 = n.norm();
  e.measure = 0.5 * n2;
  e.normal = n / n2;
  e.diameter = std::max({dist(p0, p1), dist(p1, p2), dist(p2, p0)});
  return e;
}

}  // namespace

void BoundaryMesh::finalize(bool verify) {
  if (elements_.empty()) throw validation_error("mesh: no elements");
  double lo[3] = {1e300, 1e300, 1e300}, hi[3] = {-1e300, -1e300, -1e300};
  for (const vec3& p : nodes_) {
    lo[0] = std::min(lo[0], p.x); hi[0] = std::max(hi[0], p.x);
    lo[1] = std::min(lo[1], p.y); hi[1] = std::max(hi[1], p.y);
    lo[2] = std::min(lo[2], p.z); hi[2] = std::max(hi[2], p.z);
  }
  diameter_ = std::sqrt(sqr(hi[0] - lo[0]) + sqr(hi[1] - lo[1]) + sqr(hi[2] - lo[2]));
  if (!(diameter_ > 0.0)) throw validation_error("mesh: degenerate geometry");
  h_min_ = 1e300;
  h_max_ = 0.0;
  for (const Element& e : elements_) {
    if (!(e.measure > 0.0)) throw validation_error("mesh: element with nonpositive measure");
    h_min_ = std::min(h_min_, e.diameter);
    h_max_ = std::max(h_max_, e.diameter);
  }
  if (dim_ == 1) {
    closed_ = true;
    return;
  }
  if (!verify) {
    closed_ = true;
    return;
  }
  if (dim_ == 2) {
    // Closed single loop: every node appears exactly once as a start and
    // once as an end.
    std::vector<int> out_deg(nodes_.size(), 0), in_deg(nodes_.size(), 0);
    for (const Element& e : elements_) {
      out_deg[static_cast<std::size_t>(e.verts[0])]++;
      in_deg[static_cast<std::size_t>(e.verts[1])]++;
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (out_deg[i] != 1 || in_deg[i] != 1)
        throw validation_error("mesh: 2-D boundary is not a closed loop");
    // Orientation via the shoelace area; outward normals need CCW.
    double area2 = 0.0;
    for (const Element& e : elements_) {
      vec3 p = nodes_[static_cast<std::size_t>(e.verts[0])];
      vec3 q = nodes_[static_cast<std::size_t>(e.verts[1])];
      area2 += p.x * q.y - q.x * p.y;
    }
    if (area2 <= 0.0) throw validation_error("mesh: inverted orientation (signed area <= 0)");
    // Non-self-intersection: no two non-adjacent segments cross.
    for (std::size_t i = 0; i < elements_.size(); ++i) {
      vec3 p1 = nodes_[static_cast<std::size_t>(elements_[i].verts[0])];
      vec3 p2 = nodes_[static_cast<std::size_t>(elements_[i].verts[1])];
      for (std::size_t j = i + 1; j < elements_.size(); ++j) {
        if (elements_[i].verts[0] == elements_[j].verts[1] ||
            elements_[i].verts[1] == elements_[j].verts[0])
          continue;
        vec3 q1 = nodes_[static_cast<std::size_t>(elements_[j].verts[0])];
        vec3 q2 = nodes_[static_cast<std::size_t>(elements_[j].verts[1])];
        vec3 d1 = p2 - p1, d2 = q2 - q1;
        double den = d1.x * d2.y - d1.y * d2.x;
        if (std::fabs(den) < 1e-300) continue;
        double s = ((q1.x - p1.x) * d2.y - (q1.y - p1.y) * d2.x) / den;
        double u = ((q1.x - p1.x) * d1.y - (q1.y - p1.y) * d1.x) / den;
        if (s > 0.0 && s < 1.0 && u > 0.0 && u < 1.0)
          throw validation_error("mesh: self-intersecting boundary");
      }
    }
    closed_ = true;
    return;
  }
  // 3-D: every directed edge must be matched by its reverse exactly once.
  std::map<std::pair<int, int>, int> edges;
  for (const Element& e : elements_)
    for (int k = 0; k < 3; ++k) {
      int a = e.verts[static_cast<std::size_t>(k)];
      int b = e.verts[static_cast<std::size_t>((k + 1) % 3)];
      edges[{a, b}]++;
    }
  for (const auto& [edge, count] : edges) {
    if (count != 1) throw validation_error("mesh: non-manifold or inconsistently oriented surface");
    if (edges.find({edge.second, edge.first}) == edges.end())
      throw validation_error("mesh: open surface");
  }
  double vol6 = 0.0;
  for (const Element& e : elements_) {
    vec3 p0 = nodes_[static_cast<std::size_t>(e.verts[0])];
    vec3 p1 = nodes_[static_cast<std::size_t>(e.verts[1])];
    vec3 p2 = nodes_[static_cast<std::size_t>(e.verts[2])];
    vol6 += p0.dot(p1.cross(p2));
  }
  if (vol6 <= 0.0) throw validation_error("mesh: inverted orientation (signed volume <= 0)");
  closed_ = true;
}

BoundaryMesh BoundaryMesh::interval(double a1, double a2) {
  if (!(a1 < a2)) throw validation_error("interval: a1 < a2 required");
  BoundaryMesh m;
  m.dim_ = 1;
  m.nodes_ = {vec3{a1}, vec3{a2}};
  Element left, right;
  left.verts = {0, -1, -1};
  left.n_verts = 1;
  left.centroid = vec3{a1};
  left.normal = vec3{-1.0};
  left.measure = 1.0;
  left.diameter = a2 - a1;
  right = left;
  right.verts = {1, -1, -1};
  right.centroid = vec3{a2};
  right.normal = vec3{1.0};
  m.elements_ = {left, right};
  m.finalize(false);
  return m;
}

BoundaryMesh BoundaryMesh::circle(const vec3& center, double radius, int n_elements) {
  if (!(radius > 0.0)) throw validation_error("circle: radius must be positive");
  if (n_elements < 8) throw validation_error("circle: at least 8 elements required");
  BoundaryMesh m;
  m.dim_ = 2;
  m.nodes_.reserve(static_cast<std::size_t>(n_elements));
  for (int i = 0; i < n_elements; ++i) {
    double a = two_pi * i / n_elements;
    m.nodes_.push_back(center + vec3{radius * std::cos(a), radius * std::sin(a)});
  }
  for (int i = 0; i < n_elements; ++i)
    m.elements_.push_back(make_segment(m.nodes_, i, (i + 1) % n_elements));
  m.finalize(true);
  return m;
}

BoundaryMesh BoundaryMesh::sphere(const vec3& center, double radius, int refinement) {
  if (!(radius > 0.0)) throw validation_error("sphere: radius must be positive");
  if (refinement < 0 || refinement > 6) throw validation_error("sphere: refinement in [0,6]");
  // Icosahedron, then midpoint subdivision with projection to the sphere.
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<vec3> verts = {
      {-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0},
      {0, -1, phi}, {0, 1, phi},  {0, -1, -phi}, {0, 1, -phi},
      {phi, 0, -1}, {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
  for (vec3& v : verts) v = v.normalized();
  std::vector<std::array<int, 3>> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int level = 0; level < refinement; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      vec3 p = ((verts[static_cast<std::size_t>(a)] + verts[static_cast<std::size_t>(b)]) * 0.5).normalized();
      verts.push_back(p);
      int idx = static_cast<int>(verts.size()) - 1;
      midpoint[key] = idx;
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }
  BoundaryMesh m;
  m.dim_ = 3;
  m.nodes_.reserve(verts.size());
  for (const vec3& v : verts) m.nodes_.push_back(center + v * radius);
  m.elements_.reserve(faces.size());
  for (const auto& f : faces) m.elements_.push_back(make_triangle(m.nodes_, f[0], f[1], f[2]));
  m.finalize(true);
  return m;
}

BoundaryMesh BoundaryMesh::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("load_mesh: cannot open " + path);
  int dim = 0, n_nodes = 0, n_elems = 0;
  if (!(in >> dim >> n_nodes >> n_elems))
    throw validation_error("load_mesh: malformed header in " + path);
  if (dim < 1 || dim > 3 || n_nodes < 1 || n_elems < 1)
    throw validation_error("load_mesh: invalid header values in " + path);
  BoundaryMesh m;
  m.dim_ = dim;
  m.nodes_.resize(static_cast<std::size_t>(n_nodes));
  for (auto& p : m.nodes_) {
    if (!(in >> p.x)) throw validation_error("load_mesh: truncated node list");
    if (dim >= 2 && !(in >> p.y)) throw validation_error("load_mesh: truncated node list");
    if (dim >= 3 && !(in >> p.z)) throw validation_error("load_mesh: truncated node list");
  }
  int per_elem = dim == 1 ? 1 : dim;
  for (int e = 0; e < n_elems; ++e) {
    int idx[3] = {0, 0, 0};
    for (int k = 0; k < per_elem; ++k) {
      if (!(in >> idx[k])) throw validation_error("load_mesh: truncated element list");
      if (idx[k] < 1 || idx[k] > n_nodes) throw validation_error("load_mesh: node index out of range");
      idx[k] -= 1;
    }
    if (dim == 1) {
      Element el;
      el.verts = {idx[0], -1, -1};
      el.n_verts = 1;
      el.centroid = m.nodes_[static_cast<std::size_t>(idx[0])];
      el.normal = vec3{e == 0 ? -1.0 : 1.0};
      el.measure = 1.0;
      el.diameter = 1.0;
      m.elements_.push_back(el);
    } else if (dim == 2) {
      m.elements_.push_back(make_segment(m.nodes_, idx[0], idx[1]));
    } else {
      m.elements_.push_back(make_triangle(m.nodes_, idx[0], idx[1], idx[2]));
    }
  }
  if (dim == 1) {
    if (n_elems != 2 || !(m.nodes_[0].x < m.nodes_[1].x))
      throw validation_error("load_mesh: 1-D mesh must be two ordered endpoints");
    m.elements_[0].diameter = m.elements_[1].diameter = m.nodes_[1].x - m.nodes_[0].x;
  }
  m.finalize(true);
  return m;
}

void BoundaryMesh::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw validation_error("save_mesh: cannot open " + path);
  out << dim_ << " " << nodes_.size() << " " << elements_.size() << "\n";
  char buf[128];
  for (const vec3& p : nodes_) {
    if (dim_ == 1)
      std::snprintf(buf, sizeof buf, "%.17g\n", p.x);
    else if (dim_ == 2)
      std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p.x, p.y);
    else
      std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", p.x, p.y, p.z);
    out << buf;
  }
  for (const Element& e : elements_) {
    for (int k = 0; k < e.n_verts; ++k) out << (e.verts[static_cast<std::size_t>(k)] + 1) << (k + 1 == e.n_verts ? '\n' : ' ');
  }
}

double BoundaryMesh::total_measure() const {
  double s = 0.0;
  for (const Element& e : elements_) s += e.measure;
  return s;
}

double BoundaryMesh::a1() const {
  if (dim_ != 1) throw validation_error("a1(): not a 1-D mesh");
  return nodes_[0].x;
}

double BoundaryMesh::a2() const {
  if (dim_ != 1) throw validation_error("a2(): not a 1-D mesh");
  return nodes_[1].x;
}

std::vector<ActiveElement> retarded_active_set(const BoundaryMesh& mesh, const vec3& x,
                                               double t, double c) {
  if (t < 0.0) throw validation_error("retarded_active_set: t >= 0 required");
  std::vector<ActiveElement> active;
  double ct = c * t;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    double r = dist(mesh.element(e).centroid, x);
    if (r < ct) active.push_back({e, r});
  }
  return active;
}

double dr_dn(const vec3& x, const vec3& y, const vec3& n_y) {
  vec3 d = y - x;
  double r = d.norm();
  if (r == 0.0) throw degenerate_source_error("dr_dn: x = y");
  return n_y.dot(d) / r;
}

double horizon_time(const BoundaryMesh& mesh, const vec3& x, double c) {
  double rmax = 0.0;
  for (const vec3& p : mesh.nodes()) rmax = std::max(rmax, dist(p, x));
  return rmax / c;
}

// --- DomainIndicator ------------------------------------------------------

namespace {

struct Hit {
  double s;
  bool suspicious;  // grazing / near-vertex hit: retry with another direction
};

// All crossings of the ray x + s d, s > 0, with a 2-D polyline.
bool ray_crossings_2d(const BoundaryMesh& mesh, const vec3& x, const vec3& d,
                      std::vector<Hit>& hits, double tol) {
  hits.clear();
  for (int e = 0; e < mesh.n_elements(); ++e) {
    vec3 p = mesh.vertex(e, 0);
    vec3 q = mesh.vertex(e, 1);
    vec3 seg = q - p;
    double den = d.x * seg.y - d.y * seg.x;
    vec3 w = p - x;
    if (std::fabs(den) < 1e-14 * seg.norm()) {
      // Parallel; a ray running along an element is ambiguous.
      double off = std::fabs(w.x * seg.y - w.y * seg.x) / seg.norm();
      if (off < tol && w.dot(d) > -tol) return false;
      continue;
    }
    double s = (w.x * seg.y - w.y * seg.x) / den;
    double u = (w.x * d.y - w.y * d.x) / den;
    if (s <= 0.0) continue;
    if (u < 0.0 || u >= 1.0) {
      if (std::fabs(u) < 1e-12 || std::fabs(u - 1.0) < 1e-12) return false;
      continue;
    }
    if (u < 1e-12 || u > 1.0 - 1e-12) return false;
    hits.push_back({s, false});
  }
  return true;
}

// Moller-Trumbore against all triangles.
bool ray_crossings_3d(const BoundaryMesh& mesh, const vec3& x, const vec3& d,
                      std::vector<Hit>& hits) {
  hits.clear();
  for (int e = 0; e < mesh.n_elements(); ++e) {
    vec3 v0 = mesh.vertex(e, 0);
    vec3 e1 = mesh.vertex(e, 1) - v0;
    vec3 e2 = mesh.vertex(e, 2) - v0;
    vec3 pv = d.cross(e2);
    double det = e1.dot(pv);
    if (std::fabs(det) < 1e-14 * e1.norm() * e2.norm()) continue;
    vec3 tv = x - v0;
    double u = tv.dot(pv) / det;
    if (u < 0.0 || u > 1.0) continue;
    vec3 qv = tv.cross(e1);
    double v = d.dot(qv) / det;
    if (v < 0.0 || u + v > 1.0) continue;
    double s = e2.dot(qv) / det;
    if (s <= 0.0) continue;
    bool edge = u < 1e-10 || v < 1e-10 || u + v > 1.0 - 1e-10;
    if (edge) return false;
    hits.push_back({s, false});
  }
  return true;
}

vec3 probe_direction_2d(int attempt) {
  double a = 0.3183 + 0.7548776662 * attempt;  // deterministic, irrational step
  return vec3{std::cos(a), std::sin(a)};
}

vec3 probe_direction_3d(int attempt) {
  double a = 0.3183 + 0.7548776662 * attempt;
  double b = 0.1234 + 0.5698402910 * attempt;
  double cz = std::cos(b) * 0.9;
  double s = std::sqrt(1.0 - cz * cz);
  return vec3{s * std::cos(a), s * std::sin(a), cz};
}

double dist_point_segment(const vec3& x, const vec3& p, const vec3& q) {
  vec3 d = q - p;
  double t = std::clamp((x - p).dot(d) / d.norm2(), 0.0, 1.0);
  return dist(x, p + d * t);
}

double dist_point_triangle(const vec3& x, const vec3& a, const vec3& b, const vec3& c) {
  vec3 n = (b - a).cross(c - a).normalized();
  double h = (x - a).dot(n);
  vec3 proj = x - n * h;
  // Inside test via same-side checks.
  auto side = [&](const vec3& p, const vec3& q) {
    return (q - p).cross(proj - p).dot(n);
  };
  if (side(a, b) >= 0 && side(b, c) >= 0 && side(c, a) >= 0) return std::fabs(h);
  return std::min({dist_point_segment(x, a, b), dist_point_segment(x, b, c),
                   dist_point_segment(x, c, a)});
}

}  // namespace

double DomainIndicator::distance_to_boundary(const vec3& x) const {
  const BoundaryMesh& m = *mesh_;
  double best = 1e300;
  if (m.dim() == 1) {
    best = std::min(std::fabs(x.x - m.a1()), std::fabs(x.x - m.a2()));
  } else if (m.dim() == 2) {
    for (int e = 0; e < m.n_elements(); ++e)
      best = std::min(best, dist_point_segment(x, m.vertex(e, 0), m.vertex(e, 1)));
  } else {
    for (int e = 0; e < m.n_elements(); ++e)
      best = std::min(best, dist_point_triangle(x, m.vertex(e, 0), m.vertex(e, 1), m.vertex(e, 2)));
  }
  return best;
}

double DomainIndicator::operator()(const vec3& x) const {
  const BoundaryMesh& m = *mesh_;
  double tol = m.geom_tolerance();
  if (m.dim() == 1) {
    double a = m.a1(), b = m.a2();
    if (std::fabs(x.x - a) <= tol || std::fabs(x.x - b) <= tol) return 0.5;
    return (x.x > a && x.x < b) ? 1.0 : 0.0;
  }
  if (distance_to_boundary(x) <= tol) return 0.5;
  std::vector<Hit> hits;
  for (int attempt = 0; attempt < 32; ++attempt) {
    bool ok = m.dim() == 2 ? ray_crossings_2d(m, x, probe_direction_2d(attempt), hits, tol)
                           : ray_crossings_3d(m, x, probe_direction_3d(attempt));
    if (!ok) continue;
    return (hits.size() % 2 == 1) ? 1.0 : 0.0;
  }
  throw numerical_error("indicator: no unambiguous ray found");
}

std::vector<std::pair<double, double>> DomainIndicator::inside_intervals(
    const vec3& x, const vec3& dir, double s_max) const {
  const BoundaryMesh& m = *mesh_;
  double tol = m.geom_tolerance();
  std::vector<std::pair<double, double>> out;
  if (m.dim() == 1) {
    double lo = (m.a1() - x.x), hi = (m.a2() - x.x);
    if (dir.x < 0.0) std::swap(lo, hi), lo = -lo, hi = -hi;
    lo = std::max(lo, 0.0);
    hi = std::min(hi, s_max);
    if (hi > lo) out.push_back({lo, hi});
    return out;
  }
  std::vector<Hit> hits;
  vec3 d = dir;
  bool ok = m.dim() == 2 ? ray_crossings_2d(m, x, d, hits, tol)
                         : ray_crossings_3d(m, x, d, hits);
  if (!ok) {
    // Nudge the direction deterministically; the integrals downstream are
    // insensitive to a rotation at this scale.
    for (int attempt = 1; attempt < 32 && !ok; ++attempt) {
      vec3 nd = (d + (m.dim() == 2 ? probe_direction_2d(attempt) : probe_direction_3d(attempt)) * (1e-9 * attempt)).normalized();
      ok = m.dim() == 2 ? ray_crossings_2d(m, x, nd, hits, tol) : ray_crossings_3d(m, x, nd, hits);
    }
    if (!ok) throw numerical_error("inside_intervals: degenerate ray");
  }
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.s < b.s; });
  bool inside;
  double start_tol = distance_to_boundary(x);
  if (start_tol <= tol) {
    // Starting on the boundary: the local outward normal decides.
    double best = 1e300;
    vec3 n_host{};
    for (int e = 0; e < m.n_elements(); ++e) {
      double de = dist(m.element(e).centroid, x) - 0.0;
      if (de < best) {
        best = de;
        n_host = m.element(e).normal;
      }
    }
    inside = d.dot(n_host) < 0.0;
  } else {
    inside = (*this)(x) == 1.0;
  }
  double cur = 0.0;
  for (const Hit& h : hits) {
    double s = std::min(h.s, s_max);
    if (inside && s > cur) out.push_back({cur, s});
    inside = !inside;
    cur = h.s;
    if (cur >= s_max) break;
  }
  if (inside && cur < s_max) out.push_back({cur, s_max});
  return out;
}

}  // namespace wavebem::geom
