#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "corelr/volume.hpp"

namespace corelr {

struct ComponentLabeling {
  VoxelGrid<std::int32_t> labels;  // 0 = background, ids 1..count
  int count = 0;
  std::vector<std::size_t> sizes;        // indexed by id - 1
  std::vector<Vec3> centroids;           // mm
  std::vector<std::size_t> first_voxel;  // linear index of the first voxel in scan order
};

struct RadiusPoint {
  Index3 voxel;
  double radius_mm = 0.0;
};

enum class DilationMode { Radius, Diameter };

/// 6-neighbor cross erosion; out-of-bounds counts as background.
BinaryMask erode(const BinaryMask& m);

/// Exact anisotropic Euclidean distance (mm) from each foreground voxel
/// center to the nearest background voxel center; 0 on background. With no
/// background voxel anywhere, foreground values are +infinity.
DistanceMap edt(const BinaryMask& m);

/// connectivity is 6 or 26. Ids follow the scan order of each component's
/// first voxel.
ComponentLabeling connected_components(const BinaryMask& m, int connectivity = 26);

/// Radius used by dilate_by_radii: the (optionally doubled) radius rounded
/// up to the next multiple of the smallest spacing component.
double rounded_radius(double radius_mm, Vec3 spacing, DilationMode mode = DilationMode::Radius);

/// Union of digital balls centered at the given voxels.
BinaryMask dilate_by_radii(std::span<const RadiusPoint> points, const BinaryMask& domain,
                           DilationMode mode = DilationMode::Radius);

// Serial reference implementations of the data-parallel kernels. Kept for
// equivalence tests and benchmarks.
namespace reference {

BinaryMask erode(const BinaryMask& m);
DistanceMap edt(const BinaryMask& m);
BinaryMask dilate_by_radii(std::span<const RadiusPoint> points, const BinaryMask& domain,
                           DilationMode mode = DilationMode::Radius);

}  // namespace reference

}  // namespace corelr
