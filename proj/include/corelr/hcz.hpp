#pragma once

#include "corelr/convex_hull.hpp"
#include "corelr/volume.hpp"

namespace corelr {

/// Hepatic central zone: convex hull of the retained vessels and its
/// voxelization on the source grid.
struct Hcz {
  ConvexHull hull;  // mm
  BinaryMask mask;
  double volume_mm3 = 0.0;
  double diameter_mm = 0.0;
};

/// Voxel centers satisfying every half-space (inclusive, up to a
/// 1e-12 * bbox-diagonal rounding allowance).
BinaryMask voxelize_hull(const ConvexHull& h, const GridGeometry& grid);

/// Hull of the mask's voxel centers in mm. Built from integer voxel indices
/// (exact predicates), then scaled by the spacing. Only the first and last
/// voxel of each x-row is used; the hull is the same by convexity.
ConvexHull mask_hull(const BinaryMask& m);

/// Throws DegenerateHull for flat or too small masks.
Hcz build_hcz(const BinaryMask& vessels, const BinaryMask* clip = nullptr);

/// Minimum exact distance (mm) from any lesion voxel center to the HCZ
/// polytope; 0 when some center lies inside.
double distance_to_hcz(const BinaryMask& lesion, const Hcz& hcz);

namespace reference {

BinaryMask voxelize_hull(const ConvexHull& h, const GridGeometry& grid);

}  // namespace reference

}  // namespace corelr
