#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "corelr/volume.hpp"

namespace corelr {

/// Curve skeleton of a binary mask. Voxels are linear indices into the
/// source grid in ascending (x-fastest raster) order.
struct Skeleton {
  Index3 dims{0, 0, 0};
  Vec3 spacing{1.0, 1.0, 1.0};
  std::vector<std::size_t> voxels;
  std::vector<double> radius;  // mm, parallel to voxels; empty until attach_radii

  BinaryMask to_mask() const;
};

/// 3x3x3 neighborhood occupancy, index (dx+1) + 3(dy+1) + 9(dz+1); 13 is the center.
using Neighborhood = std::array<bool, 27>;

/// True iff deleting the center preserves topology under 26-connectivity for
/// the object and 6-connectivity for the background (both topological numbers
/// equal 1).
bool is_simple_point(const Neighborhood& nb);

/// Border-peeling medial axis thinning. Sub-iterations run over the six
/// border directions in the order up(+z), down(-z), north(-y), south(+y),
/// east(+x), west(-x); within each, candidates are collected in raster order
/// and then re-checked sequentially before deletion. Line endpoints (exactly
/// one object neighbor) are never deleted.
Skeleton skeletonize(const BinaryMask& m);

Skeleton attach_radii(Skeleton s, const DistanceMap& d);

}  // namespace corelr
