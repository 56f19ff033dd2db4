#include "corelr/volume.hpp"

#include <algorithm>
#include <numeric>

namespace corelr {

namespace {

void check_labels(std::span<const std::uint8_t> data) {
  for (const auto v : data) {
    if (v > kVessel) throw Error(ErrorKind::InvalidLabel, "label value " + std::to_string(v) + " not in {0,1,2,3}");
  }
}

}  // namespace

LabelVolume::LabelVolume(Index3 dims, Vec3 spacing, std::vector<std::uint8_t> data)
    : VoxelGrid(dims, spacing, std::move(data)) {
  check_labels(this->data());
}

LabelVolume::LabelVolume(VoxelGrid<std::uint8_t> grid) : VoxelGrid(std::move(grid)) { check_labels(data()); }

BinaryMask::BinaryMask(Index3 dims, Vec3 spacing, std::vector<std::uint8_t> data)
    : VoxelGrid(dims, spacing, std::move(data)) {
  for (auto& v : this->data()) v = v != 0 ? 1 : 0;
}

BinaryMask::BinaryMask(const VoxelGrid<std::uint8_t>& grid) : VoxelGrid(grid) {
  for (auto& v : data()) v = v != 0 ? 1 : 0;
}

std::size_t BinaryMask::count() const {
  const auto d = data();
  return static_cast<std::size_t>(std::count(d.begin(), d.end(), std::uint8_t{1}));
}

BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b) {
  if (!a.same_geometry(b)) throw Error(ErrorKind::DimsMismatch, "mask_and on different grids");
  BinaryMask out = BinaryMask::like(a);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] & b[i];
  return out;
}

BinaryMask mask_or(const BinaryMask& a, const BinaryMask& b) {
  if (!a.same_geometry(b)) throw Error(ErrorKind::DimsMismatch, "mask_or on different grids");
  BinaryMask out = BinaryMask::like(a);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] | b[i];
  return out;
}

BinaryMask extract_mask(const LabelVolume& v, int label) {
  if (label != kLiverUnion && (label < kLiver || label > kVessel)) {
    throw Error(ErrorKind::InvalidLabel, "extract_mask label must be 1, 2, 3 or the liver union");
  }
  BinaryMask out = BinaryMask::like(v);
  const auto n = static_cast<std::ptrdiff_t>(v.size());
  if (label == kLiverUnion) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = v[i] != kBackground ? 1 : 0;
  } else {
    const auto want = static_cast<std::uint8_t>(label);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = v[i] == want ? 1 : 0;
  }
  return out;
}

}  // namespace corelr
