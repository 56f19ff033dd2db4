#include "corelr/morphology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace corelr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Lower envelope of parabolas (Felzenszwalb & Huttenlocher) along one line of
// n samples at spacing `step`. f holds squared distances, +inf where no site
// exists. Scratch buffers are caller-provided so threads can reuse them.
void envelope_1d(const double* f, double* out, int n, double step, std::vector<int>& v, std::vector<double>& z) {
  v.resize(static_cast<std::size_t>(n));
  z.resize(static_cast<std::size_t>(n) + 1);
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    const double pq = q * step;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    double s = 0.0;
    while (true) {
      const double pv = v[k] * step;
      s = ((f[q] + pq * pq) - (f[v[k]] + pv * pv)) / (2.0 * (pq - pv));
      // z[0] is -inf, so k never drops below 0
      if (s > z[k]) break;
      --k;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  if (k < 0) {
    std::fill(out, out + n, kInf);
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    const double pq = q * step;
    while (z[j + 1] < pq) ++j;
    const double d = (q - v[j]) * step;
    out[q] = d * d + f[v[j]];
  }
}

// O(n^2) per-line minimum, the serial reference for envelope_1d.
void brute_1d(const double* f, double* out, int n, double step) {
  for (int q = 0; q < n; ++q) {
    double best = kInf;
    for (int p = 0; p < n; ++p) {
      if (f[p] == kInf) continue;
      const double d = (q - p) * step;
      best = std::min(best, d * d + f[p]);
    }
    out[q] = best;
  }
}

template <typename LineFn>
DistanceMap separable_edt(const BinaryMask& m, bool parallel, LineFn line_fn) {
  DistanceMap sq(m.dims(), m.spacing(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i) sq[i] = m[i] ? kInf : 0.0;

  const Index3 d = m.dims();
  const std::size_t stride[3] = {1, static_cast<std::size_t>(d[0]),
                                 static_cast<std::size_t>(d[0]) * static_cast<std::size_t>(d[1])};
  for (int axis = 0; axis < 3; ++axis) {
    const int n = d[axis];
    const int a1 = (axis + 1) % 3;
    const int a2 = (axis + 2) % 3;
    const std::ptrdiff_t lines = static_cast<std::ptrdiff_t>(d[a1]) * d[a2];
    const double step = m.spacing()[axis];
#pragma omp parallel if (parallel)
    {
      std::vector<double> in(static_cast<std::size_t>(n)), out(static_cast<std::size_t>(n));
      std::vector<int> v;
      std::vector<double> z;
#pragma omp for schedule(static)
      for (std::ptrdiff_t l = 0; l < lines; ++l) {
        const int c1 = static_cast<int>(l % d[a1]);
        const int c2 = static_cast<int>(l / d[a1]);
        const std::size_t base = c1 * stride[a1] + c2 * stride[a2];
        for (int q = 0; q < n; ++q) in[q] = sq[base + q * stride[axis]];
        line_fn(in.data(), out.data(), n, step, v, z);
        for (int q = 0; q < n; ++q) sq[base + q * stride[axis]] = out[q];
      }
    }
  }
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = std::sqrt(sq[i]);
  return sq;
}

BinaryMask erode_impl(const BinaryMask& m, bool parallel) {
  BinaryMask out = BinaryMask::like(m);
  const Index3 d = m.dims();
#pragma omp parallel for schedule(static) if (parallel)
  for (int z = 0; z < d[2]; ++z) {
    for (int y = 0; y < d[1]; ++y) {
      for (int x = 0; x < d[0]; ++x) {
        if (!m.at(x, y, z)) continue;
        if (x == 0 || y == 0 || z == 0 || x == d[0] - 1 || y == d[1] - 1 || z == d[2] - 1) continue;
        out.at(x, y, z) = m.at(x - 1, y, z) & m.at(x + 1, y, z) & m.at(x, y - 1, z) & m.at(x, y + 1, z) &
                          m.at(x, y, z - 1) & m.at(x, y, z + 1);
      }
    }
  }
  return out;
}

struct BallExtent {
  int r[3];
  double r2;
};

BallExtent ball_extent(double radius, Vec3 spacing) {
  BallExtent e{};
  for (int a = 0; a < 3; ++a) e.r[a] = static_cast<int>(std::floor(radius / spacing[a] + 1e-9));
  // Relative slack keeps exact-boundary lattice points inside despite rounding.
  e.r2 = radius * radius * (1.0 + 1e-9);
  return e;
}

void validate_points(std::span<const RadiusPoint> points, const BinaryMask& domain) {
  for (const auto& p : points) {
    if (!domain.in_bounds(p.voxel)) throw Error(ErrorKind::OutOfBounds, "dilation point outside the grid");
    if (!(p.radius_mm >= 0.0)) throw Error(ErrorKind::InvalidArgument, "negative dilation radius");
  }
}

void stamp_slice(BinaryMask& out, const RadiusPoint& p, double radius, int z) {
  const Vec3 s = out.spacing();
  const BallExtent e = ball_extent(radius, s);
  const double dz = (z - p.voxel[2]) * s.z;
  const Index3 d = out.dims();
  const int y0 = std::max(0, p.voxel[1] - e.r[1]), y1 = std::min(d[1] - 1, p.voxel[1] + e.r[1]);
  const int x0 = std::max(0, p.voxel[0] - e.r[0]), x1 = std::min(d[0] - 1, p.voxel[0] + e.r[0]);
  for (int y = y0; y <= y1; ++y) {
    const double dy = (y - p.voxel[1]) * s.y;
    for (int x = x0; x <= x1; ++x) {
      const double dx = (x - p.voxel[0]) * s.x;
      if (dx * dx + dy * dy + dz * dz <= e.r2) out.at(x, y, z) = 1;
    }
  }
}

}  // namespace

BinaryMask erode(const BinaryMask& m) { return erode_impl(m, true); }

DistanceMap edt(const BinaryMask& m) {
  return separable_edt(m, true, [](const double* f, double* out, int n, double step, std::vector<int>& v,
                                   std::vector<double>& z) { envelope_1d(f, out, n, step, v, z); });
}

ComponentLabeling connected_components(const BinaryMask& m, int connectivity) {
  if (connectivity != 6 && connectivity != 26) {
    throw Error(ErrorKind::InvalidArgument, "connectivity must be 6 or 26");
  }
  std::vector<Index3> offsets;
  for (int dz = -1; dz <= 1; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        const int l1 = std::abs(dx) + std::abs(dy) + std::abs(dz);
        if (l1 == 0) continue;
        if (connectivity == 6 && l1 != 1) continue;
        offsets.push_back({dx, dy, dz});
      }

  ComponentLabeling out;
  out.labels = VoxelGrid<std::int32_t>(m.dims(), m.spacing(), 0);
  std::vector<std::size_t> queue;
  for (std::size_t start = 0; start < m.size(); ++start) {
    if (!m[start] || out.labels[start] != 0) continue;
    const int id = ++out.count;
    queue.clear();
    queue.push_back(start);
    out.labels[start] = id;
    Vec3 sum{};
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const Index3 p = m.coords(queue[head]);
      sum = sum + m.position(p);
      for (const auto& o : offsets) {
        const Index3 q{p[0] + o[0], p[1] + o[1], p[2] + o[2]};
        if (!m.in_bounds(q)) continue;
        const std::size_t qi = m.index(q);
        if (m[qi] && out.labels[qi] == 0) {
          out.labels[qi] = id;
          queue.push_back(qi);
        }
      }
    }
    out.sizes.push_back(queue.size());
    out.centroids.push_back((1.0 / static_cast<double>(queue.size())) * sum);
    out.first_voxel.push_back(start);
  }
  return out;
}

double rounded_radius(double radius_mm, Vec3 spacing, DilationMode mode) {
  const double r = mode == DilationMode::Diameter ? 2.0 * radius_mm : radius_mm;
  const double unit = std::min({spacing.x, spacing.y, spacing.z});
  return std::max(0.0, std::ceil(r / unit - 1e-9)) * unit;
}

BinaryMask dilate_by_radii(std::span<const RadiusPoint> points, const BinaryMask& domain, DilationMode mode) {
  validate_points(points, domain);
  BinaryMask out = BinaryMask::like(domain);
  const Vec3 s = domain.spacing();
  std::vector<double> radii(points.size());
  std::vector<int> zlo(points.size()), zhi(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    radii[i] = rounded_radius(points[i].radius_mm, s, mode);
    const int rz = ball_extent(radii[i], s).r[2];
    zlo[i] = points[i].voxel[2] - rz;
    zhi[i] = points[i].voxel[2] + rz;
  }
  const int nz = domain.dim(2);
  // Each slice is owned by one thread; stamping is an idempotent OR.
#pragma omp parallel for schedule(dynamic, 1)
  for (int z = 0; z < nz; ++z) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (z < zlo[i] || z > zhi[i]) continue;
      stamp_slice(out, points[i], radii[i], z);
    }
  }
  return out;
}

namespace reference {

BinaryMask erode(const BinaryMask& m) { return erode_impl(m, false); }

DistanceMap edt(const BinaryMask& m) {
  return separable_edt(m, false, [](const double* f, double* out, int n, double step, std::vector<int>&,
                                    std::vector<double>&) { brute_1d(f, out, n, step); });
}

BinaryMask dilate_by_radii(std::span<const RadiusPoint> points, const BinaryMask& domain, DilationMode mode) {
  validate_points(points, domain);
  BinaryMask out = BinaryMask::like(domain);
  const Vec3 s = domain.spacing();
  for (const auto& p : points) {
    const double r = rounded_radius(p.radius_mm, s, mode);
    const int rz = ball_extent(r, s).r[2];
    for (int z = std::max(0, p.voxel[2] - rz); z <= std::min(domain.dim(2) - 1, p.voxel[2] + rz); ++z) {
      stamp_slice(out, p, r, z);
    }
  }
  return out;
}

}  // namespace reference

}  // namespace corelr
