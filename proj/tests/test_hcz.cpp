#include <doctest.h>

#include <numeric>
#include <random>

#include "corelr/hcz.hpp"
#include "oracles.hpp"

using namespace corelr;

namespace {

std::vector<Vec3> cube_corners(double s = 1.0) {
  std::vector<Vec3> c;
  for (int i = 0; i < 8; ++i) c.push_back({s * (i & 1), s * ((i >> 1) & 1), s * ((i >> 2) & 1)});
  return c;
}

double segment_distance(Vec3 p, Vec3 a, Vec3 b) {
  const double t = std::clamp(dot(p - a, b - a) / squared_norm(b - a), 0.0, 1.0);
  return distance(p, a + t * (b - a));
}

/// Exact distance by enumerating faces (projection inside the triangle) and edges.
double exact_distance(const ConvexHull& h, Vec3 p) {
  if (oracle::in_polytope(h, p, 0.0)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& f : h.faces) {
    const Vec3 a = h.vertices[static_cast<std::size_t>(f[0])], b = h.vertices[static_cast<std::size_t>(f[1])],
               c = h.vertices[static_cast<std::size_t>(f[2])];
    const Vec3 n = normalized(cross(b - a, c - a));
    const Vec3 q = p - dot(p - a, n) * n;
    const bool inside = dot(cross(b - a, q - a), n) >= 0 && dot(cross(c - b, q - b), n) >= 0 &&
                        dot(cross(a - c, q - c), n) >= 0;
    if (inside) best = std::min(best, std::abs(dot(p - a, n)));
    best = std::min({best, segment_distance(p, a, b), segment_distance(p, b, c), segment_distance(p, c, a)});
  }
  return best;
}

void check_hull(const std::vector<Vec3>& pts, const ConvexHull& h) {
  const double eps = 1e-6 * h.bbox_diagonal();
  for (const Vec3& p : pts) CHECK(h.contains(p, eps));
  for (const Vec3& v : h.vertices) CHECK(std::find(pts.begin(), pts.end(), v) != pts.end());
  const long V = static_cast<long>(h.vertices.size()), F = static_cast<long>(h.faces.size());
  CHECK(V - static_cast<long>(h.edge_count()) + F == 2);
  for (std::size_t i = 0; i < h.faces.size(); ++i) CHECK(norm(h.normals[i]) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(h.volume() > 0.0);
}

}  // namespace

TEST_CASE("cube hull") {
  const auto c = cube_corners();
  const ConvexHull h = convex_hull(c);
  CHECK(h.vertices.size() == 8);
  CHECK(h.volume() == doctest::Approx(1.0).epsilon(1e-12));
  check_hull(c, h);
  CHECK(hull_diameter(h) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));

  auto with_center = c;
  with_center.push_back({0.5, 0.5, 0.5});
  const ConvexHull h2 = convex_hull(with_center);
  CHECK(h2.vertices.size() == 8);
  CHECK(std::find(h2.vertices.begin(), h2.vertices.end(), Vec3{0.5, 0.5, 0.5}) == h2.vertices.end());
}

TEST_CASE("regular tetrahedron diameter") {
  // alternate corners of a cube with side sqrt(2): every edge is 2
  const double s = std::sqrt(2.0);
  const std::vector<Vec3> t{{0, 0, 0}, {s, s, 0}, {s, 0, s}, {0, s, s}};
  CHECK(hull_diameter(convex_hull(t)) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("degenerate inputs") {
  const std::vector<Vec3> three{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  CHECK_THROWS_AS(convex_hull(three), Error);
  std::vector<Vec3> flat;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) flat.push_back({double(i), double(j), 2.0});
  CHECK_THROWS_AS(convex_hull(flat), Error);
  std::vector<Vec3> dup(6, Vec3{1, 2, 3});
  CHECK_THROWS_AS(convex_hull(dup), Error);
}

TEST_CASE("random hulls contain their input and rebuild from their vertices") {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> g(0.0, 10.0);
  std::uniform_int_distribution<int> lattice(-20, 20);
  for (int t = 0; t < 40; ++t) {
    std::vector<Vec3> pts;
    const int n = 10 + t * 5;
    for (int i = 0; i < n; ++i) {
      if (t % 2) pts.push_back({double(lattice(rng)), double(lattice(rng)), double(lattice(rng))});
      else pts.push_back({g(rng), g(rng), g(rng)});
    }
    const ConvexHull h = convex_hull(pts);
    check_hull(pts, h);
    CHECK(hull_diameter(h) == doctest::Approx(oracle::max_pairwise_distance(pts)).epsilon(1e-12));
    const ConvexHull again = convex_hull(h.vertices);
    auto a = h.vertices, b = again.vertices;
    auto lex = [](Vec3 p, Vec3 q) { return std::tie(p.x, p.y, p.z) < std::tie(q.x, q.y, q.z); };
    std::sort(a.begin(), a.end(), lex);
    std::sort(b.begin(), b.end(), lex);
    CHECK(a == b);
    CHECK(again.volume() == doctest::Approx(h.volume()).epsilon(1e-12));
  }
}

TEST_CASE("voxelization fixtures") {
  const ConvexHull full = convex_hull(cube_corners(9.0));
  const BinaryMask all = voxelize_hull(full, {{10, 10, 10}, {1, 1, 1}});
  CHECK(all.count() == 1000);

  const std::vector<Vec3> between{{0.2, 0.2, 0.2}, {0.8, 0.2, 0.2}, {0.2, 0.8, 0.2}, {0.2, 0.2, 0.8}};
  CHECK(voxelize_hull(convex_hull(between), {{4, 4, 4}, {1, 1, 1}}).empty());

  const std::vector<Vec3> tet{{1, 1, 1}, {8, 2, 1}, {2, 8, 2}, {3, 3, 8}};
  const ConvexHull h = convex_hull(tet);
  const GridGeometry grid{{10, 10, 10}, {1, 1, 1}};
  const BinaryMask m = voxelize_hull(h, grid);
  for (std::size_t i = 0; i < m.size(); ++i) CHECK(static_cast<bool>(m[i]) == oracle::in_polytope(h, m.position(i), 0.0));
  CHECK(m == reference::voxelize_hull(h, grid));
}

TEST_CASE("voxelization equals the per-voxel oracle on anisotropic grids") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 20.0);
  for (int t = 0; t < 10; ++t) {
    std::vector<Vec3> pts;
    for (int i = 0; i < 20; ++i) pts.push_back({u(rng), u(rng), u(rng)});
    const ConvexHull h = convex_hull(pts);
    const GridGeometry grid{{24, 20, 16}, {0.9, 1.1, 1.3}};
    const BinaryMask m = voxelize_hull(h, grid);
    for (std::size_t i = 0; i < m.size(); ++i) CHECK(static_cast<bool>(m[i]) == oracle::in_polytope(h, m.position(i), 0.0));
  }
}

TEST_CASE("voxelized hull is digitally convex") {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> u(0, 15);
  std::vector<Vec3> pts;
  for (int i = 0; i < 12; ++i) pts.push_back({double(u(rng)), double(u(rng)), double(u(rng))});
  const BinaryMask m = voxelize_hull(convex_hull(pts), {{16, 16, 16}, {1, 1, 1}});
  std::vector<Index3> on;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i]) on.push_back(m.coords(i));
  std::uniform_int_distribution<std::size_t> pick(0, on.size() - 1);
  for (int t = 0; t < 2000; ++t) {
    const Index3 a = on[pick(rng)], b = on[pick(rng)];
    const int d[3] = {b[0] - a[0], b[1] - a[1], b[2] - a[2]};
    const int g = std::gcd(std::gcd(std::abs(d[0]), std::abs(d[1])), std::abs(d[2]));
    for (int k = 0; k <= g && g > 0; ++k) CHECK(m.at(a[0] + d[0] / g * k, a[1] + d[1] / g * k, a[2] + d[2] / g * k));
  }
}

TEST_CASE("point to polytope distance") {
  const ConvexHull cube = convex_hull(cube_corners());
  CHECK(distance_to_hull(cube, {0.5, 0.5, 0.5}) == 0.0);
  CHECK(distance_to_hull(cube, {2, 0.5, 0.5}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(distance_to_hull(cube, {2, 2, 0.5}) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(distance_to_hull(cube, {-1, -1, -1}) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int t = 0; t < 20; ++t) {
    std::vector<Vec3> pts;
    for (int i = 0; i < 15; ++i) pts.push_back({u(rng), u(rng), u(rng)});
    const ConvexHull h = convex_hull(pts);
    for (int k = 0; k < 20; ++k) {
      const Vec3 p{3 * u(rng), 3 * u(rng), 3 * u(rng)};
      const double d = distance_to_hull(h, p);
      CHECK(d == doctest::Approx(exact_distance(h, p)).epsilon(1e-9));
      if (d > 0.0) {
        const double sampled = oracle::sampled_surface_distance(h, p, 60);
        CHECK(sampled >= d - 1e-9);
        CHECK(sampled <= d + 0.5);
      }
    }
  }
}

TEST_CASE("HCZ from a mask") {
  BinaryMask vessels({20, 20, 20}, {0.5, 1.0, 2.0});
  for (int x = 3; x <= 15; ++x) vessels.at(x, 10, 10) = 1;
  for (int y = 4; y <= 16; ++y) vessels.at(9, y, 5) = 1;
  vessels.at(9, 10, 15) = 1;
  const Hcz h = build_hcz(vessels);
  CHECK(h.volume_mm3 == static_cast<double>(h.mask.count()) * voxel_volume(vessels));
  CHECK(h.diameter_mm > 0.0);
  for (std::size_t i = 0; i < vessels.size(); ++i) CHECK((!vessels[i] || h.mask[i]));
  std::vector<Vec3> centers;
  for (std::size_t i = 0; i < vessels.size(); ++i)
    if (vessels[i]) centers.push_back(vessels.position(i));
  CHECK(h.diameter_mm == doctest::Approx(oracle::max_pairwise_distance(centers)).epsilon(1e-12));
  const ConvexHull direct = convex_hull(centers);
  CHECK(h.hull.volume() == doctest::Approx(direct.volume()).epsilon(1e-12));

  BinaryMask lesion = BinaryMask::like(vessels);
  CHECK_THROWS_AS(distance_to_hcz(lesion, h), Error);
  lesion.at(9, 10, 10) = 1;
  CHECK(distance_to_hcz(lesion, h) == 0.0);

  BinaryMask line = BinaryMask::like(vessels);
  for (int x = 0; x < 20; ++x) line.at(x, 3, 3) = 1;
  CHECK_THROWS_AS(build_hcz(line), Error);
}

TEST_CASE("clipping intersects with the liver") {
  BinaryMask vessels({12, 12, 12}, {1, 1, 1});
  for (int i = 2; i <= 9; ++i) vessels.at(i, 2, 2) = vessels.at(2, i, 2) = vessels.at(2, 2, i) = 1;
  BinaryMask liver = BinaryMask::like(vessels);
  for (int z = 0; z < 12; ++z)
    for (int y = 0; y < 12; ++y)
      for (int x = 0; x < 6; ++x) liver.at(x, y, z) = 1;
  const Hcz a = build_hcz(vessels), b = build_hcz(vessels, &liver);
  CHECK(b.mask == mask_and(a.mask, liver));
  CHECK(b.mask.count() < a.mask.count());
}
