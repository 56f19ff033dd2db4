#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "corelr/geometry.hpp"

namespace corelr {

/// Triangulated convex polytope. Faces are counterclockwise seen from
/// outside; planes[i] is the outward unit normal and offsets[i] = n . v for
/// any vertex v of face i.
struct ConvexHull {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  std::vector<Vec3> normals;
  std::vector<double> offsets;

  std::size_t edge_count() const { return faces.size() * 3 / 2; }
  double volume() const;
  /// Axis-aligned bounding box diagonal.
  double bbox_diagonal() const;
  bool contains(Vec3 p, double tolerance) const;
};

/// Quickhull over the points sorted lexicographically (deterministic).
/// Integer-valued input with |coord| < 4096 uses exact predicates; other
/// input uses a scale-relative tolerance. Throws DegenerateHull for fewer
/// than 4 distinct points or coplanar input.
ConvexHull convex_hull(std::span<const Vec3> points);

/// Maps vertices through a positive diagonal scaling and recomputes planes.
ConvexHull scaled(const ConvexHull& h, Vec3 factors);

/// Maximum pairwise distance over hull vertices.
double hull_diameter(const ConvexHull& h);

/// Exact Euclidean distance from p to the solid polytope; 0 inside.
double distance_to_hull(const ConvexHull& h, Vec3 p);

/// Closest point to p on triangle abc.
Vec3 closest_point_on_triangle(Vec3 p, Vec3 a, Vec3 b, Vec3 c);

/// Wavefront OBJ with "v" and 1-based "f" records.
std::string to_obj(const ConvexHull& h);

}  // namespace corelr
