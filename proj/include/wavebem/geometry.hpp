#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "wavebem/common.hpp"

namespace wavebem::geom {

struct Element {
  vec3 centroid;
  vec3 normal;       // unit, outward
  double measure;    // length (2-D) or area (3-D); 1 for 1-D endpoints
  double diameter;   // largest vertex distance
  std::array<int, 3> verts{-1, -1, -1};
  int n_verts = 0;
};

// Discretized closed boundary: two endpoints (1-D), a closed polyline (2-D)
// or a closed triangle mesh (3-D). Immutable after construction; all
// queries are read-only.
class BoundaryMesh {
 public:
  static BoundaryMesh interval(double a1, double a2);
  static BoundaryMesh circle(const vec3& center, double radius, int n_elements);
  static BoundaryMesh sphere(const vec3& center, double radius, int refinement);

  // Plain-text format:
  //   line 1:  dim n_nodes n_elems
  //   n_nodes lines:  x [y [z]]
  //   n_elems lines:  1-based node indices (one per 1-D endpoint, two per
  //                   2-D segment, three per 3-D triangle)
  static BoundaryMesh load(const std::string& path);
  void save(const std::string& path) const;

  int dim() const { return dim_; }
  bool closed() const { return closed_; }
  const std::vector<vec3>& nodes() const { return nodes_; }
  const std::vector<Element>& elements() const { return elements_; }
  const Element& element(int e) const { return elements_[static_cast<std::size_t>(e)]; }
  int n_elements() const { return static_cast<int>(elements_.size()); }
  vec3 vertex(int e, int i) const { return nodes_[static_cast<std::size_t>(elements_[static_cast<std::size_t>(e)].verts[static_cast<std::size_t>(i)])]; }

  double diameter() const { return diameter_; }
  double min_element_diameter() const { return h_min_; }
  double max_element_diameter() const { return h_max_; }
  double total_measure() const;
  double geom_tolerance() const { return 1e-9 * diameter_; }

  // 1-D helpers.
  double a1() const;
  double a2() const;

 private:
  BoundaryMesh() = default;
  void finalize(bool verify);

  int dim_ = 0;
  bool closed_ = false;
  std::vector<vec3> nodes_;
  std::vector<Element> elements_;
  double diameter_ = 0.0;
  double h_min_ = 0.0;
  double h_max_ = 0.0;
};

struct ActiveElement {
  int index;
  double r;  // centroid distance to the evaluation point
};

// Elements whose centroid lies inside the retarded sphere r < c t.
std::vector<ActiveElement> retarded_active_set(const BoundaryMesh& mesh, const vec3& x,
                                               double t, double c);

// n(y) . (y - x) / |y - x|; in [-1, 1].
double dr_dn(const vec3& x, const vec3& y, const vec3& n_y);

// max_y |x - y| / c over mesh vertices: after this time the whole boundary
// is inside the retarded sphere of x.
double horizon_time(const BoundaryMesh& mesh, const vec3& x, double c);

// Indicator of the enclosed region: 1 inside, 1/2 on the boundary (within
// the mesh geometric tolerance), 0 outside.
class DomainIndicator {
 public:
  explicit DomainIndicator(const BoundaryMesh& mesh) : mesh_(&mesh) {}

  double operator()(const vec3& x) const;
  const BoundaryMesh& mesh() const { return *mesh_; }

  // Maximal sub-intervals of {s : x + s dir inside, 0 < s < s_max}.
  // dir must be unit. Used to integrate over ball/boundary intersections
  // without sampling the indicator pointwise.
  std::vector<std::pair<double, double>> inside_intervals(const vec3& x, const vec3& dir,
                                                          double s_max) const;

  double distance_to_boundary(const vec3& x) const;

 private:
  const BoundaryMesh* mesh_;
};

}  // namespace wavebem::geom
