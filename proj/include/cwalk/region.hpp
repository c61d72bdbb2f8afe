#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cwalk/lattice.hpp"

namespace cwalk {

struct Box {
  double x0, x1, y0, y1;
};

struct Disk {
  PlanePoint center;
  double radius;
};

/// {r0 <= |u| <= r1, angle in [theta0, theta1]} with angles in radians and
/// theta0 < theta1 <= theta0 + 2 pi.
struct AnnularSector {
  double r0, r1, theta0, theta1;
};

using RegionPrimitive = std::variant<Box, Disk, AnnularSector>;

/// Bounded planar region: union of boxes, disks and annular sectors.
class RegionG {
 public:
  RegionG() = default;
  explicit RegionG(std::vector<RegionPrimitive> parts, std::string label = "");

  /// "box:x0,x1,y0,y1", "disk:cx,cy,r", "sector:r0,r1,t0,t1" joined by ';'.
  static RegionG parse(const std::string& spec);

  bool contains(PlanePoint u) const;
  /// Euclidean distance from u to the region (0 inside).
  double distance(PlanePoint u) const;
  /// Smallest radius of a disk at the origin containing the region.
  double outer_radius() const;
  /// Lattice sites p with p / scale in the region, sorted.
  std::vector<LatticePoint> lattice_sites(double scale) const;

  const std::vector<RegionPrimitive>& parts() const { return parts_; }
  const std::string& label() const { return label_; }

 private:
  std::vector<RegionPrimitive> parts_;
  std::string label_;
};

struct SurroundResult {
  /// True when an escape path was found, i.e. the region does not surround
  /// the origin.
  bool ok = false;
  std::vector<PlanePoint> witness;  // origin to norm c1
  double c1 = 0.0;                  // region radius plus clearance
  double c3 = 0.0;
  double path_length = 0.0;         // speed bound for the unit-time parametrization
};

/// Breadth-first search for an escape path on a grid of pitch c3/4 over the
/// cells at distance >= c3 + pitch from the region (so straight segments
/// between neighbouring cells keep clearance c3). Throws
/// std::invalid_argument for c3 <= 0 or an empty region.
SurroundResult surrounds_origin_check(const RegionG& g, double c3);

}  // namespace cwalk
