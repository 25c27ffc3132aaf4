#pragma once

#include "wavebem/common.hpp"

namespace wavebem::kernels {

// One kernel evaluation. Kernels of the 3-D wave operator concentrate a
// simple layer on the cone t = r/c; that part is never evaluated pointwise
// and is reported as the coefficient `delta_weight` of delta(t - r/c)
// instead. `regular_part` is the locally integrable remainder.
struct KernelValue {
  double regular_part = 0.0;
  bool has_front_delta = false;
  double delta_weight = 0.0;
};

struct SymmetryResidual {
  double dU = 0.0;
  double dW = 0.0;
  double dH = 0.0;
};

// Fundamental solution U of the wave operator (Laplacian - c^-2 d^2/dt^2)
// with retarded radiation conditions, its time primitive W (dW/dt = U) and
// the directional derivative H = dW/dm. All evaluations vanish identically
// for t < 0 and outside the light cone r > c t.
class WaveKernel {
 public:
  WaveKernel(int dim, double wave_speed);

  int dim() const { return dim_; }
  double c() const { return c_; }

  // U(r, t).
  //   dim 1: -(c/2) H(ct - r)
  //   dim 2: -c / (2 pi sqrt(c^2 t^2 - r^2)); unbounded on the front, where
  //          evaluation throws front_singularity_error
  //   dim 3: pure front layer, delta_weight = -1/(4 pi r), regular part 0
  KernelValue eval_U(double r, double t) const;

  // W(r, t).
  //   dim 1: -(ct - r)/2 H(ct - r)
  //   dim 2: -arccosh(ct/r) / (2 pi)
  //   dim 3: -H(ct - r) / (4 pi r)
  double eval_W(double r, double t) const;

  // H(offset, m, t) = dW/dm evaluated at x - y = offset.
  // dim 3 carries a front layer with weight (offset.m)/(4 pi c R^2).
  KernelValue eval_H(const vec3& offset, const vec3& m, double t) const;

  // |U(x,y)-U(y,x)|, |W(x,y)-W(y,x)|, |H(x,y,m)+H(y,x,m)|.
  SymmetryResidual check_symmetry(const vec3& x, const vec3& y, const vec3& m,
                                  double t) const;

 private:
  int dim_;
  double c_;
};

}  // namespace wavebem::kernels
