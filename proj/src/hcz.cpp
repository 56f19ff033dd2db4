#include "corelr/hcz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace corelr {

namespace {

double voxelize_tolerance(const ConvexHull& h) { return 1e-12 * std::max(1.0, h.bbox_diagonal()); }

BinaryMask voxelize_bbox(const ConvexHull& h, const GridGeometry& grid) {
  BinaryMask out(grid.dims, grid.spacing);
  if (h.vertices.empty()) return out;
  const double tol = voxelize_tolerance(h);
  const Vec3 s = grid.spacing;
  // Voxel-index bounding box of the hull.
  int lo[3], hi[3];
  for (int a = 0; a < 3; ++a) {
    double mn = std::numeric_limits<double>::infinity(), mx = -mn;
    for (const auto& v : h.vertices) mn = std::min(mn, v[a]), mx = std::max(mx, v[a]);
    lo[a] = std::max(0, static_cast<int>(std::floor(mn / s[a])) - 1);
    hi[a] = std::min(grid.dims[a] - 1, static_cast<int>(std::ceil(mx / s[a])) + 1);
  }
#pragma omp parallel for schedule(static)
  for (int z = lo[2]; z <= hi[2]; ++z) {
    for (int y = lo[1]; y <= hi[1]; ++y) {
      for (int x = lo[0]; x <= hi[0]; ++x) {
        const Index3 p{x, y, z};
        if (h.contains(grid.position(p), tol)) out[grid.index(p)] = 1;
      }
    }
  }
  return out;
}

}  // namespace

BinaryMask voxelize_hull(const ConvexHull& h, const GridGeometry& grid) { return voxelize_bbox(h, grid); }

ConvexHull mask_hull(const BinaryMask& m) {
  std::vector<Vec3> pts;
  for (int z = 0; z < m.dim(2); ++z) {
    for (int y = 0; y < m.dim(1); ++y) {
      int first = -1, last = -1;
      for (int x = 0; x < m.dim(0); ++x) {
        if (!m.at(x, y, z)) continue;
        if (first < 0) first = x;
        last = x;
      }
      if (first < 0) continue;
      pts.push_back({static_cast<double>(first), static_cast<double>(y), static_cast<double>(z)});
      if (last != first) pts.push_back({static_cast<double>(last), static_cast<double>(y), static_cast<double>(z)});
    }
  }
  return scaled(convex_hull(pts), m.spacing());
}

Hcz build_hcz(const BinaryMask& vessels, const BinaryMask* clip) {
  Hcz out;
  out.hull = mask_hull(vessels);
  out.mask = voxelize_hull(out.hull, vessels.geometry());
  if (clip != nullptr) out.mask = mask_and(out.mask, *clip);
  out.volume_mm3 = static_cast<double>(out.mask.count()) * voxel_volume(out.mask);
  out.diameter_mm = hull_diameter(out.hull);
  return out;
}

double distance_to_hcz(const BinaryMask& lesion, const Hcz& hcz) {
  if (lesion.empty()) throw Error(ErrorKind::EmptyLesion, "lesion mask is empty");
  if (hcz.mask.empty()) throw Error(ErrorKind::EmptyHcz, "HCZ mask is empty");
  std::vector<std::size_t> voxels;
  for (std::size_t i = 0; i < lesion.size(); ++i)
    if (lesion[i]) voxels.push_back(i);
  const auto n = static_cast<std::ptrdiff_t>(voxels.size());
  double best = std::numeric_limits<double>::infinity();
  // min is order-independent, so the reduction is deterministic
#pragma omp parallel for reduction(min : best) schedule(dynamic, 64)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    best = std::min(best, distance_to_hull(hcz.hull, lesion.position(voxels[static_cast<std::size_t>(i)])));
  }
  return best;
}

namespace reference {

BinaryMask voxelize_hull(const ConvexHull& h, const GridGeometry& grid) {
  BinaryMask out(grid.dims, grid.spacing);
  if (h.vertices.empty()) return out;
  const double tol = voxelize_tolerance(h);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = h.contains(out.position(i), tol) ? 1 : 0;
  return out;
}

}  // namespace reference

}  // namespace corelr
