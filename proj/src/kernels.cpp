#include "wavebem/kernels.hpp"

namespace wavebem::kernels {

WaveKernel::WaveKernel(int dim, double wave_speed) : dim_(dim), c_(wave_speed) {
  if (dim < 1 || dim > 3) throw validation_error("WaveKernel: dim must be 1, 2 or 3");
  if (!(wave_speed > 0.0)) throw validation_error("WaveKernel: wave speed must be positive");
}

KernelValue WaveKernel::eval_U(double r, double t) const {
  if (r < 0.0) throw validation_error("eval_U: r must be nonnegative");
  KernelValue v;
  if (t < 0.0) return v;
  switch (dim_) {
    case 1:
      v.regular_part = -0.5 * c_ * heaviside(c_ * t - r);
      return v;
    case 2: {
      if (r == c_ * t)
        throw front_singularity_error("eval_U: 2-D kernel is unbounded on the front r = ct");
      if (r < c_ * t) v.regular_part = -c_ / (two_pi * std::sqrt(sqr(c_ * t) - sqr(r)));
      return v;
    }
    default: {
      if (r == 0.0) throw degenerate_source_error("eval_U: r = 0 in 3-D");
      v.has_front_delta = true;
      v.delta_weight = -1.0 / (four_pi * r);
      return v;
    }
  }
}

double WaveKernel::eval_W(double r, double t) const {
  if (r < 0.0) throw validation_error("eval_W: r must be nonnegative");
  if (dim_ >= 2 && r == 0.0) throw degenerate_source_error("eval_W: r = 0");
  if (t <= 0.0) return 0.0;
  double ct = c_ * t;
  switch (dim_) {
    case 1:
      return -0.5 * (ct - r) * heaviside(ct - r);
    case 2:
      if (r >= ct) return 0.0;
      return -std::acosh(ct / r) / two_pi;
    default:
      return -heaviside(ct - r) / (four_pi * r);
  }
}

KernelValue WaveKernel::eval_H(const vec3& offset, const vec3& m, double t) const {
  KernelValue v;
  if (t < 0.0) return v;
  double ct = c_ * t;
  if (dim_ == 1) {
    double x = offset.x;
    v.regular_part = 0.5 * sgn(x) * heaviside(ct - std::fabs(x));
    return v;
  }
  double R = offset.norm();
  if (R == 0.0) throw degenerate_source_error("eval_H: offset must be nonzero");
  double proj = offset.dot(m);
  if (dim_ == 2) {
    if (R == ct) throw front_singularity_error("eval_H: 2-D kernel is unbounded on the front");
    if (R < ct) v.regular_part = ct * proj / (two_pi * sqr(R) * std::sqrt(sqr(ct) - sqr(R)));
    return v;
  }
  v.regular_part = heaviside(ct - R) * proj / (four_pi * R * sqr(R));
  v.has_front_delta = true;
  v.delta_weight = proj / (four_pi * c_ * sqr(R));
  return v;
}

SymmetryResidual WaveKernel::check_symmetry(const vec3& x, const vec3& y, const vec3& m,
                                            double t) const {
  SymmetryResidual res;
  vec3 xy = x - y;
  vec3 yx = y - x;
  double r = xy.norm();
  if (r == 0.0) throw degenerate_source_error("check_symmetry: x = y");
  KernelValue uxy = eval_U(r, t);
  KernelValue uyx = eval_U(r, t);
  res.dU = std::fabs(uxy.regular_part - uyx.regular_part) +
           std::fabs(uxy.delta_weight - uyx.delta_weight);
  res.dW = std::fabs(eval_W(r, t) - eval_W(r, t));
  KernelValue hxy = eval_H(xy, m, t);
  KernelValue hyx = eval_H(yx, m, t);
  res.dH = std::fabs(hxy.regular_part + hyx.regular_part) +
           std::fabs(hxy.delta_weight + hyx.delta_weight);
  return res;
}

}  // namespace wavebem::kernels
