#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "corelr/error.hpp"
#include "corelr/geometry.hpp"

namespace corelr {

/// Grid shape without storage: index <-> coordinate <-> mm conversions.
struct GridGeometry {
  Index3 dims{0, 0, 0};
  Vec3 spacing{1.0, 1.0, 1.0};

  std::size_t index(const Index3& p) const {
    return static_cast<std::size_t>(p[0]) +
           static_cast<std::size_t>(dims[0]) *
               (static_cast<std::size_t>(p[1]) + static_cast<std::size_t>(dims[1]) * static_cast<std::size_t>(p[2]));
  }
  Index3 coords(std::size_t i) const {
    const auto nx = static_cast<std::size_t>(dims[0]);
    const auto ny = static_cast<std::size_t>(dims[1]);
    return {static_cast<int>(i % nx), static_cast<int>((i / nx) % ny), static_cast<int>(i / (nx * ny))};
  }
  bool in_bounds(const Index3& p) const {
    return p[0] >= 0 && p[1] >= 0 && p[2] >= 0 && p[0] < dims[0] && p[1] < dims[1] && p[2] < dims[2];
  }
  Vec3 position(const Index3& p) const { return {p[0] * spacing.x, p[1] * spacing.y, p[2] * spacing.z}; }
};

/// Dense 3D voxel grid, x-fastest storage, with physical spacing in mm.
template <typename T>
class VoxelGrid {
 public:
  VoxelGrid() = default;

  VoxelGrid(Index3 dims, Vec3 spacing, T fill = T{}) : dims_(dims), spacing_(spacing) {
    validate();
    data_.assign(voxel_count(), fill);
  }

  VoxelGrid(Index3 dims, Vec3 spacing, std::vector<T> data)
      : dims_(dims), spacing_(spacing), data_(std::move(data)) {
    validate();
    if (data_.size() != voxel_count()) {
      throw Error(ErrorKind::SizeMismatch, "data length does not match grid dimensions");
    }
  }

  const Index3& dims() const { return dims_; }
  GridGeometry geometry() const { return {dims_, spacing_}; }
  int dim(int axis) const { return dims_[axis]; }
  Vec3 spacing() const { return spacing_; }

  std::size_t voxel_count() const {
    return static_cast<std::size_t>(dims_[0]) * static_cast<std::size_t>(dims_[1]) *
           static_cast<std::size_t>(dims_[2]);
  }
  std::size_t size() const { return data_.size(); }

  std::size_t index(int x, int y, int z) const {
    return static_cast<std::size_t>(x) +
           static_cast<std::size_t>(dims_[0]) *
               (static_cast<std::size_t>(y) + static_cast<std::size_t>(dims_[1]) * static_cast<std::size_t>(z));
  }
  std::size_t index(const Index3& p) const { return index(p[0], p[1], p[2]); }

  Index3 coords(std::size_t i) const {
    const auto nx = static_cast<std::size_t>(dims_[0]);
    const auto ny = static_cast<std::size_t>(dims_[1]);
    return {static_cast<int>(i % nx), static_cast<int>((i / nx) % ny), static_cast<int>(i / (nx * ny))};
  }

  bool in_bounds(int x, int y, int z) const {
    return x >= 0 && y >= 0 && z >= 0 && x < dims_[0] && y < dims_[1] && z < dims_[2];
  }
  bool in_bounds(const Index3& p) const { return in_bounds(p[0], p[1], p[2]); }

  /// Physical position of a voxel center (index * spacing).
  Vec3 position(const Index3& p) const {
    return {p[0] * spacing_.x, p[1] * spacing_.y, p[2] * spacing_.z};
  }
  Vec3 position(std::size_t i) const { return position(coords(i)); }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }
  T& at(int x, int y, int z) { return data_[index(x, y, z)]; }
  const T& at(int x, int y, int z) const { return data_[index(x, y, z)]; }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }

  bool same_geometry(const auto& other) const {
    return dims_ == other.dims() && spacing_ == other.spacing();
  }

  friend bool operator==(const VoxelGrid&, const VoxelGrid&) = default;

 private:
  void validate() const {
    for (int a = 0; a < 3; ++a) {
      if (dims_[a] <= 0) throw Error(ErrorKind::InvalidArgument, "grid dimensions must be positive");
      if (!(spacing_[a] > 0.0)) throw Error(ErrorKind::InvalidArgument, "grid spacing must be positive");
    }
  }

  Index3 dims_{0, 0, 0};
  Vec3 spacing_{1.0, 1.0, 1.0};
  std::vector<T> data_;
};

enum Label : std::uint8_t { kBackground = 0, kLiver = 1, kLesion = 2, kVessel = 3 };

/// Pseudo-label selecting the organ as the union of liver, lesion and vessel.
inline constexpr int kLiverUnion = -1;

/// Voxel labels restricted to {0,1,2,3}.
class LabelVolume : public VoxelGrid<std::uint8_t> {
 public:
  LabelVolume() = default;
  LabelVolume(Index3 dims, Vec3 spacing) : VoxelGrid(dims, spacing, kBackground) {}
  LabelVolume(Index3 dims, Vec3 spacing, std::vector<std::uint8_t> data);
  explicit LabelVolume(VoxelGrid<std::uint8_t> grid);
};

/// Boolean voxel mask stored as 0/1 bytes.
class BinaryMask : public VoxelGrid<std::uint8_t> {
 public:
  BinaryMask() = default;
  BinaryMask(Index3 dims, Vec3 spacing) : VoxelGrid(dims, spacing, 0) {}
  BinaryMask(Index3 dims, Vec3 spacing, std::vector<std::uint8_t> data);
  /// Nonzero values become true.
  explicit BinaryMask(const VoxelGrid<std::uint8_t>& grid);

  static BinaryMask like(const auto& grid) { return BinaryMask(grid.dims(), grid.spacing()); }

  std::size_t count() const;
  bool empty() const { return count() == 0; }
};

BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_or(const BinaryMask& a, const BinaryMask& b);

/// label in {1,2,3} or kLiverUnion.
BinaryMask extract_mask(const LabelVolume& v, int label);

/// mm^3 per voxel.
template <typename T>
double voxel_volume(const VoxelGrid<T>& g) {
  return g.spacing().x * g.spacing().y * g.spacing().z;
}

using DistanceMap = VoxelGrid<double>;

}  // namespace corelr
