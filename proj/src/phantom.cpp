#include "corelr/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>

#include "corelr/convex_hull.hpp"

namespace corelr {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr int kMaxAttempts = 64;

double segment_distance(Vec3 p, Vec3 a, Vec3 b) {
  const Vec3 ab = b - a;
  const double len2 = squared_norm(ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, a + t * ab);
}

Vec3 perpendicular(PhantomRng& rng, Vec3 d) {
  while (true) {
    const Vec3 r = rng.unit_vector();
    const Vec3 u = r - dot(r, d) * d;
    if (norm(u) > 1e-3) return normalized(u);
  }
}

bool capsule_in_bounds(Vec3 a, Vec3 b, double r, const PhantomSpec& spec) {
  for (int ax = 0; ax < 3; ++ax) {
    const double lo = std::min(a[ax], b[ax]) - r, hi = std::max(a[ax], b[ax]) + r;
    if (lo < spec.spacing[ax] || hi > (spec.dims[ax] - 2) * spec.spacing[ax]) return false;
  }
  return true;
}

void grow(PhantomRng& rng, const PhantomSpec& spec, int tree, int generation, Vec3 start, Vec3 dir,
          std::vector<TruthBranch>& out) {
  const double radius = spec.root_radius * std::pow(spec.taper, generation);
  double length = spec.trunk_length;
  if (generation >= 1) {
    length = rng.uniform(spec.length_min, spec.length_max) * std::pow(spec.length_decay, generation - 1);
  }
  const Vec3 end = start + length * dir;
  out.push_back({tree, generation, false, start, end, radius});
  if (generation >= 1 && rng.uniform() < spec.spur_probability) {
    const Vec3 mid = 0.5 * (start + end);
    const Vec3 u = perpendicular(rng, dir);
    const double reach = radius + spec.spur_length_factor * length;
    out.push_back({tree, generation + 1, true, mid, mid + reach * u, std::max(0.5, 0.6 * radius)});
  }
  if (generation >= spec.depth) return;
  const Vec3 u = perpendicular(rng, dir);
  const double t1 = rng.uniform(spec.branch_angle_min, spec.branch_angle_max) * kDeg;
  const double t2 = rng.uniform(spec.branch_angle_min, spec.branch_angle_max) * kDeg;
  grow(rng, spec, tree, generation + 1, end, normalized(std::cos(t1) * dir + std::sin(t1) * u), out);
  grow(rng, spec, tree, generation + 1, end, normalized(std::cos(t2) * dir - std::sin(t2) * u), out);
}

bool trees_touch(const VoxelGrid<std::uint8_t>& a, const VoxelGrid<std::uint8_t>& b) {
  for (int z = 0; z < a.dim(2); ++z)
    for (int y = 0; y < a.dim(1); ++y)
      for (int x = 0; x < a.dim(0); ++x) {
        if (!b.at(x, y, z)) continue;
        for (int dz = -1; dz <= 1; ++dz)
          for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx)
              if (a.in_bounds(x + dx, y + dy, z + dz) && a.at(x + dx, y + dy, z + dz)) return true;
      }
  return false;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

PhantomRng::PhantomRng(std::uint64_t seed, std::uint64_t stream)
    : engine_(splitmix64(splitmix64(seed) ^ (stream * 0xd1342543de82ef95ULL + 1))) {}

double PhantomRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

int PhantomRng::uniform_int(int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<int>(engine_() % span);
}

Vec3 PhantomRng::unit_vector() {
  while (true) {
    const Vec3 v{uniform(-1.0, 1.0), uniform(-1.0, 1.0), uniform(-1.0, 1.0)};
    const double n = norm(v);
    if (n > 1e-3 && n <= 1.0) return (1.0 / n) * v;
  }
}

void stamp_capsule(VoxelGrid<std::uint8_t>& grid, Vec3 a, Vec3 b, double radius, std::uint8_t value) {
  const Vec3 s = grid.spacing();
  int lo[3], hi[3];
  for (int ax = 0; ax < 3; ++ax) {
    lo[ax] = std::max(0, static_cast<int>(std::floor((std::min(a[ax], b[ax]) - radius) / s[ax])));
    hi[ax] = std::min(grid.dim(ax) - 1, static_cast<int>(std::ceil((std::max(a[ax], b[ax]) + radius) / s[ax])));
  }
  for (int z = lo[2]; z <= hi[2]; ++z)
    for (int y = lo[1]; y <= hi[1]; ++y)
      for (int x = lo[0]; x <= hi[0]; ++x)
        if (segment_distance(grid.position({x, y, z}), a, b) <= radius) grid.at(x, y, z) = value;
}

std::pair<LabelVolume, PhantomTruth> generate_tree(const PhantomSpec& spec) {
  if (spec.taper <= 0.0 || spec.taper >= 1.0) throw Error(ErrorKind::SpecOutOfBounds, "taper must lie in (0, 1)");
  if (spec.depth < 0) throw Error(ErrorKind::SpecOutOfBounds, "negative depth");
  if (spec.trees < 1 || spec.trees > 2) throw Error(ErrorKind::SpecOutOfBounds, "trees must be 1 or 2");
  const GridGeometry geom{spec.dims, spec.spacing};
  const Vec3 center{0.5 * (spec.dims[0] - 1) * spec.spacing.x, 0.5 * (spec.dims[1] - 1) * spec.spacing.y,
                    0.5 * (spec.dims[2] - 1) * spec.spacing.z};
  for (const auto& l : spec.lesions) {
    for (int ax = 0; ax < 3; ++ax)
      if (l.center[ax] < 0.0 || l.center[ax] > (spec.dims[ax] - 1) * spec.spacing[ax]) {
        throw Error(ErrorKind::SpecOutOfBounds, "lesion center outside the grid");
      }
  }

  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    PhantomRng rng(spec.seed, static_cast<std::uint64_t>(attempt));
    PhantomTruth truth;
    truth.liver_center = center;
    truth.attempts = attempt + 1;
    for (int tree = 0; tree < spec.trees; ++tree) {
      const double side = tree == 0 ? -1.0 : 1.0;
      const Vec3 entry = center + Vec3{side * (spec.liver_semi_axes.x + 1.0), 0.0, side * spec.entry_offset};
      const Vec3 dir = normalized(Vec3{-side, rng.uniform(-0.15, 0.15), rng.uniform(-0.15, 0.15)});
      truth.entries[static_cast<std::size_t>(tree)] = entry;
      grow(rng, spec, tree, 0, entry, dir, truth.branches);
    }
    bool ok = true;
    for (const auto& b : truth.branches) ok = ok && capsule_in_bounds(b.start, b.end, b.radius, spec);
    if (!ok) continue;

    VoxelGrid<std::uint8_t> tree_mask[2] = {VoxelGrid<std::uint8_t>(spec.dims, spec.spacing, 0),
                                            VoxelGrid<std::uint8_t>(spec.dims, spec.spacing, 0)};
    for (const auto& b : truth.branches) stamp_capsule(tree_mask[b.tree], b.start, b.end, b.radius, 1);
    if (trees_touch(tree_mask[0], tree_mask[1])) continue;

    LabelVolume vol(spec.dims, spec.spacing);
    const Vec3 ax = spec.liver_semi_axes;
    for (std::size_t i = 0; i < vol.size(); ++i) {
      const Vec3 d = geom.position(geom.coords(i)) - center;
      if ((d.x / ax.x) * (d.x / ax.x) + (d.y / ax.y) * (d.y / ax.y) + (d.z / ax.z) * (d.z / ax.z) <= 1.0) vol[i] = kLiver;
    }
    for (const auto& l : spec.lesions) stamp_capsule(vol, l.center, l.center, l.radius, kLesion);
    for (std::size_t i = 0; i < vol.size(); ++i)
      if (tree_mask[0][i] || tree_mask[1][i]) vol[i] = kVessel;
    truth.lesions = spec.lesions;
    return {std::move(vol), std::move(truth)};
  }
  throw Error(ErrorKind::SpecOutOfBounds, "could not place two separated in-bounds trees");
}

std::string_view to_string(LesionPlacement p) {
  switch (p) {
    case LesionPlacement::Inside: return "inside";
    case LesionPlacement::Near: return "near";
    case LesionPlacement::Far: return "far";
  }
  return "?";
}

std::vector<Vec3> analytic_core_points(const PhantomTruth& truth) {
  std::vector<Vec3> dirs;
  for (int dz = -1; dz <= 1; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx)
        if (dx || dy || dz) dirs.push_back(normalized(Vec3{double(dx), double(dy), double(dz)}));
  std::vector<Vec3> pts;
  for (const auto& b : truth.branches) {
    if (b.spur || b.generation > 1) continue;
    for (Vec3 c : {b.start, b.end})
      for (Vec3 d : dirs) pts.push_back(c + b.radius * d);
  }
  return pts;
}

PhantomCase generate_case(std::uint64_t seed, int index, const DifficultyMix& mix,
                          std::optional<LesionPlacement> forced) {
  const std::uint64_t case_seed = splitmix64(seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(index));
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    PhantomRng rng(case_seed, 1000 + static_cast<std::uint64_t>(attempt));
    PhantomSpec spec;
    spec.seed = splitmix64(case_seed + static_cast<std::uint64_t>(attempt));
    const double liver_scale = rng.uniform(0.92, 1.04);
    spec.liver_semi_axes = liver_scale * spec.liver_semi_axes;

    auto [bare, truth] = generate_tree(spec);
    const ConvexHull core = convex_hull(analytic_core_points(truth));
    const Vec3 c = truth.liver_center;
    const Vec3 ax = spec.liver_semi_axes;

    LesionPlacement placement = LesionPlacement::Far;
    if (forced) {
      placement = *forced;
    } else {
      const double u = rng.uniform();
      placement = u < mix.inside ? LesionPlacement::Inside
                                 : (u < mix.inside + mix.near ? LesionPlacement::Near : LesionPlacement::Far);
    }

    auto in_liver = [&](Vec3 p, double limit) {
      const Vec3 d = p - c;
      return (d.x / ax.x) * (d.x / ax.x) + (d.y / ax.y) * (d.y / ax.y) + (d.z / ax.z) * (d.z / ax.z) <= limit * limit;
    };
    auto vessel_clear = [&](Vec3 p, double r) {
      for (const auto& b : truth.branches)
        if (segment_distance(p, b.start, b.end) < r + b.radius + 1.5) return false;
      return true;
    };
    auto random_liver_point = [&]() {
      return c + Vec3{rng.uniform(-ax.x, ax.x), rng.uniform(-ax.y, ax.y), rng.uniform(-ax.z, ax.z)};
    };

    std::vector<LesionSpec> lesions;
    const double main_r = rng.uniform(3.0, 6.5);
    bool placed = false;
    if (placement == LesionPlacement::Inside) {
      Vec3 centroid{};
      for (const auto& v : core.vertices) centroid = centroid + v;
      centroid = (1.0 / static_cast<double>(core.vertices.size())) * centroid;
      for (int t = 0; t < 200 && !placed; ++t) {
        const Vec3 v = core.vertices[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(core.vertices.size()) - 1))];
        const Vec3 p = centroid + rng.uniform(0.0, 0.5) * (v - centroid);
        if (in_liver(p, 0.85)) {
          lesions.push_back({p, main_r});
          placed = true;
        }
      }
    } else {
      const double lo = placement == LesionPlacement::Near ? main_r + 2.0 : main_r + 7.0;
      const double hi = placement == LesionPlacement::Near ? main_r + 5.0 : 1e9;
      for (int t = 0; t < 4000 && !placed; ++t) {
        const Vec3 p = random_liver_point();
        if (!in_liver(p, 0.85) || !vessel_clear(p, main_r)) continue;
        const double d = distance_to_hull(core, p);
        if (d >= lo && d <= hi) {
          lesions.push_back({p, main_r});
          placed = true;
        }
      }
    }
    if (!placed) continue;

    const int extra = rng.uniform_int(0, 2);
    for (int e = 0; e < extra; ++e) {
      const double r = rng.uniform(2.0, 3.5);
      for (int t = 0; t < 4000; ++t) {
        const Vec3 p = random_liver_point();
        if (!in_liver(p, 0.85) || !vessel_clear(p, r) || distance_to_hull(core, p) < r + 7.0) continue;
        bool apart = true;
        for (const auto& l : lesions) apart = apart && distance(p, l.center) > l.radius + r + 2.0;
        if (!apart) continue;
        lesions.push_back({p, r});
        break;
      }
    }

    spec.lesions = lesions;
    auto [volume, full_truth] = generate_tree(spec);
    PhantomCase out;
    out.case_id = "case" + std::string(index < 10 ? "00" : (index < 100 ? "0" : "")) + std::to_string(index);
    out.volume = std::move(volume);
    out.truth = std::move(full_truth);
    out.placement = placement;
    for (const auto& l : lesions) out.lesion_volume_mm3 += 4.0 / 3.0 * std::numbers::pi * l.radius * l.radius * l.radius;
    out.label = (placement == LesionPlacement::Inside || out.lesion_volume_mm3 > kPlantedVolumeThreshold) ? 1 : 0;
    out.raw_score = out.label ? rng.uniform_int(6, 10) : rng.uniform_int(1, 5);
    return out;
  }
  throw Error(ErrorKind::SpecOutOfBounds, "could not place lesions for case " + std::to_string(index));
}

std::vector<PhantomCase> generate_dataset(int n_cases, std::uint64_t seed, const DifficultyMix& mix) {
  if (n_cases < 2) throw Error(ErrorKind::InvalidArgument, "a dataset needs at least 2 cases");
  std::vector<PhantomCase> cases(static_cast<std::size_t>(n_cases));
  std::vector<std::exception_ptr> errors(cases.size());
  // Cases depend only on (seed, index).
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < n_cases; ++i) {
    try {
      cases[static_cast<std::size_t>(i)] = generate_case(seed, i, mix);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return cases;
}

}  // namespace corelr
