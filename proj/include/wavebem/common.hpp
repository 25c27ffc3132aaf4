#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace wavebem {

// Structural problems with inputs (bad scenario, malformed mesh, size
// mismatches). The CLI maps this to exit code 2.
class validation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computation that cannot proceed (singular system, missing history,
// kernel probed on its singular support). CLI exit code 3.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Pointwise evaluation requested exactly on a wave front where the kernel
// is unbounded; callers must go through the singular quadrature rules.
class front_singularity_error : public numerical_error {
 public:
  using numerical_error::numerical_error;
};

// Source point and field point coincide where the kernel is undefined.
class degenerate_source_error : public numerical_error {
 public:
  using numerical_error::numerical_error;
};

// Retarded evaluation asked for trace values before the recorded history.
class history_underflow_error : public numerical_error {
 public:
  using numerical_error::numerical_error;
};

constexpr double pi = 3.14159265358979323846;
constexpr double two_pi = 2.0 * pi;
constexpr double four_pi = 4.0 * pi;

// Heaviside step with the value 1/2 on the jump itself.
inline double heaviside(double s) {
  if (s > 0.0) return 1.0;
  if (s < 0.0) return 0.0;
  return 0.5;
}

inline double sgn(double s) {
  if (s > 0.0) return 1.0;
  if (s < 0.0) return -1.0;
  return 0.0;
}

inline double sqr(double s) { return s * s; }

struct vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  vec3() = default;
  vec3(double x_, double y_ = 0.0, double z_ = 0.0) : x(x_), y(y_), z(z_) {}

  vec3 operator+(const vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  vec3 operator-(const vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  vec3 operator-() const { return {-x, -y, -z}; }
  vec3& operator+=(const vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }

  double dot(const vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  vec3 cross(const vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm2() const { return dot(*this); }
  double norm() const { return std::sqrt(norm2()); }
  vec3 normalized() const {
    double n = norm();
    return n > 0.0 ? *this / n : vec3{};
  }
};

inline vec3 operator*(double s, const vec3& v) { return v * s; }

inline double dist(const vec3& a, const vec3& b) { return (a - b).norm(); }

// ---------------------------------------------------------------------------
// Deterministic parallel loop.
//
// Work is split into fixed-size blocks that do not depend on the thread
// count; each index writes only its own outputs, so results are identical
// for any number of threads.

int hardware_thread_count();
void set_thread_count(int n);  // n <= 0 restores the hardware default
int thread_count();

namespace detail {
void parallel_for_impl(std::size_t n, const std::function<void(std::size_t)>& body);
}

template <class F>
void parallel_for(std::size_t n, F&& body) {
  detail::parallel_for_impl(n, std::function<void(std::size_t)>(std::forward<F>(body)));
}

// FNV-1a, used for scenario hashes in run manifests.
std::uint64_t fnv1a(const std::string& bytes);

}  // namespace wavebem
