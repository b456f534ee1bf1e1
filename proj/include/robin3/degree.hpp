#pragma once

// Brouwer degree of maps S^3 -> S^3 by signed preimage counting on a
// triangulation of the 3-sphere, and degrees of maps on regions of R^4.

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "robin3/trialfield.hpp"

namespace robin3 {

using Vec4 = Eigen::Vector4d;

/// Boundary of the 16-cell refined by edge midpoints pushed onto S^3.
/// Each refinement appends vertices, so coarser vertex lists are prefixes.
class TriangulatedSphere {
 public:
  explicit TriangulatedSphere(int level);

  /// Shared instance per level (built on first use).
  static const TriangulatedSphere& cached(int level);

  int level() const { return level_; }
  const std::vector<Vec4>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 4>>& cells() const { return cells_; }

  /// Sum of the areas of the radially projected cells.
  double spherical_volume() const;

 private:
  int level_;
  std::vector<Vec4> vertices_;
  std::vector<std::array<int, 4>> cells_;
};

/// x on S^3 to a point of S^3 (or any nonzero vector, normalized by the caller).
using SphereMap = std::function<Vec4(const Vec4&)>;

struct DegreeResult {
  int value = 0;
  int value_next = 0;  // at level + 1
  Vec4 regular_value = Vec4::Zero();
  int preimage_count = 0;
  double min_jacobian_margin = 0.0;
  int levels_agreeing = 0;
  int level = 0;

  bool confident() const { return levels_agreeing >= 2; }
};

class DegreeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Signed count of cells whose image contains a seeded random target, at
/// `level` and `level + 1`.  level must be in [0, 6].
DegreeResult sphere_degree(const SphereMap& map, int level, std::uint64_t seed = 1);

/// Symmetry residual max |phi(R_b a, -b) - (R_b x R_b) phi(a, b)| on samples.
double refsym_residual(const SphereMap& map, int samples, std::uint64_t seed);

/// Synthetic reflection-symmetric map with phi(a, 0) = (a, 0); amplitude 0
/// gives the identity.
SphereMap refsym_map(std::uint64_t seed, double amplitude);

DegreeResult verify_refsym_degree(std::uint64_t seed, int level, double amplitude = 0.2);

/// Maps on subsets of R^4, evaluated on boundaries only.
using FieldMap = std::function<Vec4(const Vec4&)>;

struct Region {
  enum class Kind { Ball, UpperHalfAnnulus, LowerHalfAnnulus };
  Kind kind = Kind::Ball;
  double radius = 0.5;  // ball radius; the half-annuli are 1/2 < |x| < 1
};

/// d(phi, region, 0) via the degree of phi/|phi| on the outward-oriented
/// boundary.  Throws DegreeError if |phi| <= 1e-6 at a boundary sample.
DegreeResult region_degree(const FieldMap& phi, const Region& region, int level, std::uint64_t seed = 1);

/// Homeomorphism S^3 -> boundary of the region, orientation preserving.
Vec4 region_boundary_point(const Region& region, const Vec4& x);

/// Synthetic map on the half-annuli with the reflection symmetry and a single
/// zero at `zero` (which must have zero a_1 and b_1 entries and b_2 > 0).
FieldMap half_annulus_map(std::uint64_t seed, const Vec4& zero, double amplitude = 0.05);

/// Field on S^3 x [0, 1].
using SphereField = std::function<Vec4(const Vec4&, double)>;

struct Certificate {
  bool zero_located = false;  // |V| below threshold at a vertex
  Vec4 zero_point = Vec4::Zero();
  double zero_t = 0.0;
  bool indeterminate = false;
  DegreeResult w0;
  DegreeResult w1;

  /// Degrees differ, so V vanishes for some t in [0, 1].
  bool certifies_zero() const { return zero_located || (!indeterminate && w0.value != w1.value); }
};

/// Degrees of W_t = V(., t)/|V(., t)| at t = 0 and t = 1.  Values below
/// `threshold` at a vertex report a located zero; values below `noise` mark
/// the certificate as indeterminate.
Certificate degree_certificate(const SphereField& field, int level, double threshold, double noise = 0.0,
                               std::uint64_t seed = 1);

/// V~(a, b, t) of a trial field as a SphereField.
SphereField trial_sphere_field(const TrialField& field);

/// Certificate for the orthogonality field.  The smallest sampled |V| is
/// compared against ten times its two-level quadrature error.
Certificate degree_certificate(const TrialField& field, int level, double threshold, std::uint64_t seed = 1);

}  // namespace robin3
