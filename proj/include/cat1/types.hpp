#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace cat1 {

using scalar_t = double;
using vector_t = Eigen::VectorXd;

inline constexpr scalar_t kPi = 3.14159265358979323846;

/// A point of a model space: ambient unit vector for the sphere S^d,
/// a single scalar coordinate for a segment of the real line.
struct SpacePoint {
  vector_t coords;

  SpacePoint() = default;
  explicit SpacePoint(vector_t c) : coords(std::move(c)) {}

  /// Segment-model point from a scalar.
  static SpacePoint scalar(scalar_t v) {
    vector_t c(1);
    c[0] = v;
    return SpacePoint(c);
  }

  static SpacePoint unit3(scalar_t x, scalar_t y, scalar_t z) {
    vector_t c(3);
    c << x, y, z;
    c.normalize();
    return SpacePoint(c);
  }

  scalar_t value() const { return coords[0]; }
  Eigen::Index size() const { return coords.size(); }
};

/// Descriptor of the ambient model space: either the unit sphere S^dim
/// embedded in R^{dim+1} or a closed interval [lo, hi] of the real line.
/// diameter_bound, when set, is the configured sup of pairwise distances
/// (radians) and must be below pi/2.
struct ModelSpace {
  enum class Kind { UnitSphere, Segment };

  Kind kind = Kind::UnitSphere;
  int dim = 2;
  scalar_t lo = -1.0;
  scalar_t hi = 1.0;
  std::optional<scalar_t> diameter_bound;

  static ModelSpace sphere(int dim, std::optional<scalar_t> diameter_bound = {}) {
    if (dim < 1) throw std::invalid_argument("sphere dimension must be positive");
    ModelSpace s;
    s.kind = Kind::UnitSphere;
    s.dim = dim;
    s.diameter_bound = diameter_bound;
    s.check_diameter_bound();
    return s;
  }

  static ModelSpace segment(scalar_t lo, scalar_t hi,
                            std::optional<scalar_t> diameter_bound = {}) {
    if (!(lo < hi)) throw std::invalid_argument("segment requires lo < hi");
    ModelSpace s;
    s.kind = Kind::Segment;
    s.dim = 1;
    s.lo = lo;
    s.hi = hi;
    s.diameter_bound = diameter_bound;
    s.check_diameter_bound();
    return s;
  }

  int ambient_dim() const { return kind == Kind::UnitSphere ? dim + 1 : 1; }

  bool is_valid_point(const SpacePoint& p, scalar_t tol = 1e-12) const {
    if (p.coords.size() != ambient_dim()) return false;
    if (kind == Kind::UnitSphere) return std::abs(p.coords.norm() - 1.0) <= tol;
    return p.value() >= lo - tol && p.value() <= hi + tol;
  }

  void require_valid(const SpacePoint& p, const char* who) const {
    if (p.coords.size() != ambient_dim())
      throw std::invalid_argument(std::string(who) + ": point dimension " +
                                  std::to_string(p.coords.size()) +
                                  " does not match space dimension " +
                                  std::to_string(ambient_dim()));
    if (!is_valid_point(p, 1e-9))
      throw std::invalid_argument(std::string(who) + ": point is not on the model space");
  }

 private:
  void check_diameter_bound() const {
    if (diameter_bound && !(*diameter_bound < kPi / 2))
      throw std::invalid_argument("diameter_bound must be below pi/2");
  }
};

}  // namespace cat1
