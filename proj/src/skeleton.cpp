#include "corelr/skeleton.hpp"

#include <algorithm>
#include <cstdint>
#include <vector>

namespace corelr {

namespace {

constexpr int kCenter = 13;

constexpr int nb_index(int dx, int dy, int dz) { return (dx + 1) + 3 * (dy + 1) + 9 * (dz + 1); }

struct CubeAdjacency {
  std::array<std::vector<int>, 27> adj26;
  std::array<std::vector<int>, 27> adj6;
  std::array<bool, 27> in_n18{};
  std::array<bool, 27> is_face{};

  CubeAdjacency() {
    for (int i = 0; i < 27; ++i) {
      const int xi = i % 3, yi = (i / 3) % 3, zi = i / 9;
      const int l1 = std::abs(xi - 1) + std::abs(yi - 1) + std::abs(zi - 1);
      in_n18[i] = l1 >= 1 && l1 <= 2;
      is_face[i] = l1 == 1;
      for (int j = 0; j < 27; ++j) {
        if (i == j) continue;
        const int dx = std::abs(xi - j % 3), dy = std::abs(yi - (j / 3) % 3), dz = std::abs(zi - j / 9);
        if (dx > 1 || dy > 1 || dz > 1) continue;
        adj26[i].push_back(j);
        if (dx + dy + dz == 1) adj6[i].push_back(j);
      }
    }
  }
};

const CubeAdjacency& cube() {
  static const CubeAdjacency c;
  return c;
}

// Number of 26-components of the object in N26 minus the center.
int object_components(const Neighborhood& nb) {
  const auto& c = cube();
  std::array<bool, 27> seen{};
  int stack[27];
  int count = 0;
  for (int s = 0; s < 27; ++s) {
    if (s == kCenter || !nb[s] || seen[s]) continue;
    ++count;
    int top = 0;
    stack[top++] = s;
    seen[s] = true;
    while (top > 0) {
      const int v = stack[--top];
      for (int w : c.adj26[v]) {
        if (w == kCenter || !nb[w] || seen[w]) continue;
        seen[w] = true;
        stack[top++] = w;
      }
    }
  }
  return count;
}

// Number of 6-components of the background in N18 minus the center that
// contain a face neighbor of the center.
int background_components(const Neighborhood& nb) {
  const auto& c = cube();
  std::array<bool, 27> seen{};
  int stack[27];
  int count = 0;
  for (int s = 0; s < 27; ++s) {
    if (!c.is_face[s] || nb[s] || seen[s]) continue;
    ++count;
    int top = 0;
    stack[top++] = s;
    seen[s] = true;
    while (top > 0) {
      const int v = stack[--top];
      for (int w : c.adj6[v]) {
        if (!c.in_n18[w] || nb[w] || seen[w]) continue;
        seen[w] = true;
        stack[top++] = w;
      }
    }
  }
  return count;
}

int object_neighbors(const Neighborhood& nb) {
  int n = 0;
  for (int i = 0; i < 27; ++i) n += (i != kCenter && nb[i]) ? 1 : 0;
  return n;
}

// Zero-padded working copy so every neighborhood lookup is in bounds.
class PaddedVolume {
 public:
  explicit PaddedVolume(const BinaryMask& m)
      : nx_(m.dim(0) + 2), ny_(m.dim(1) + 2), nz_(m.dim(2) + 2),
        data_(static_cast<std::size_t>(nx_) * ny_ * nz_, 0) {
    for (int z = 0; z < m.dim(2); ++z)
      for (int y = 0; y < m.dim(1); ++y)
        for (int x = 0; x < m.dim(0); ++x) data_[index(x + 1, y + 1, z + 1)] = m.at(x, y, z);
    for (int dz = -1; dz <= 1; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx)
          offsets_[nb_index(dx, dy, dz)] = dx + static_cast<std::ptrdiff_t>(nx_) * (dy + static_cast<std::ptrdiff_t>(ny_) * dz);
  }

  std::size_t index(int x, int y, int z) const {
    return static_cast<std::size_t>(x) + static_cast<std::size_t>(nx_) * (static_cast<std::size_t>(y) + static_cast<std::size_t>(ny_) * z);
  }

  Neighborhood neighborhood(std::size_t i) const {
    Neighborhood nb;
    for (int k = 0; k < 27; ++k) nb[k] = data_[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + offsets_[k])] != 0;
    return nb;
  }

  std::uint8_t& operator[](std::size_t i) { return data_[i]; }
  std::ptrdiff_t offset(int k) const { return offsets_[k]; }

 private:
  int nx_, ny_, nz_;
  std::vector<std::uint8_t> data_;
  std::array<std::ptrdiff_t, 27> offsets_{};
};

bool deletable(const Neighborhood& nb) { return object_neighbors(nb) != 1 && is_simple_point(nb); }

}  // namespace

bool is_simple_point(const Neighborhood& nb) {
  return object_components(nb) == 1 && background_components(nb) == 1;
}

BinaryMask Skeleton::to_mask() const {
  BinaryMask m(dims, spacing);
  for (auto v : voxels) m[v] = 1;
  return m;
}

Skeleton skeletonize(const BinaryMask& m) {
  PaddedVolume work(m);

  // Object voxels as (padded index, source index), kept in raster order.
  struct Voxel {
    std::size_t padded;
    std::size_t source;
  };
  std::vector<Voxel> object;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!m[i]) continue;
    const Index3 p = m.coords(i);
    object.push_back({work.index(p[0] + 1, p[1] + 1, p[2] + 1), i});
  }

  const int directions[6] = {nb_index(0, 0, 1),  nb_index(0, 0, -1), nb_index(0, -1, 0),
                             nb_index(0, 1, 0),  nb_index(1, 0, 0),  nb_index(-1, 0, 0)};
  std::vector<std::size_t> candidates;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const int dir : directions) {
      candidates.clear();
      const std::ptrdiff_t off = work.offset(dir);
      for (std::size_t k = 0; k < object.size(); ++k) {
        const std::size_t pi = object[k].padded;
        if (work[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(pi) + off)]) continue;
        if (deletable(work.neighborhood(pi))) candidates.push_back(k);
      }
      bool removed_any = false;
      for (const std::size_t k : candidates) {
        const std::size_t pi = object[k].padded;
        if (!deletable(work.neighborhood(pi))) continue;
        work[pi] = 0;
        removed_any = true;
      }
      if (removed_any) {
        changed = true;
        std::erase_if(object, [&](const Voxel& v) { return work[v.padded] == 0; });
      }
    }
  }

  Skeleton s;
  s.dims = m.dims();
  s.spacing = m.spacing();
  s.voxels.reserve(object.size());
  for (const auto& v : object) s.voxels.push_back(v.source);
  return s;
}

Skeleton attach_radii(Skeleton s, const DistanceMap& d) {
  if (s.dims != d.dims() || !(s.spacing == d.spacing())) {
    throw Error(ErrorKind::DimsMismatch, "distance map does not match skeleton grid");
  }
  s.radius.resize(s.voxels.size());
  for (std::size_t i = 0; i < s.voxels.size(); ++i) s.radius[i] = d[s.voxels[i]];
  return s;
}

}  // namespace corelr
