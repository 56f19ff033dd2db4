#include <doctest.h>

#include "corelr/biomarkers.hpp"

using namespace corelr;

namespace {

Hcz cube_hcz(Index3 dims, Index3 lo, Index3 hi, Vec3 spacing = {1, 1, 1}) {
  BinaryMask m(dims, spacing);
  for (int z = lo[2]; z <= hi[2]; ++z)
    for (int y = lo[1]; y <= hi[1]; ++y)
      for (int x = lo[0]; x <= hi[0]; ++x) m.at(x, y, z) = 1;
  return build_hcz(m);
}

}  // namespace

TEST_CASE("lesion identical to the HCZ gives full occupancy") {
  const Hcz h = cube_hcz({10, 10, 10}, {2, 2, 2}, {6, 6, 6});
  LabelVolume v({10, 10, 10}, {1, 1, 1});
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = h.mask[i] ? kLesion : kLiver;
  const BiomarkerVector b = compute_biomarkers(v, &h);
  REQUIRE(b.b_hcz);
  CHECK(*b.b_hcz == 1.0);
  CHECK(b.n_les == 1);
  CHECK(b.v_liv_mm3 == 1000.0);
}

TEST_CASE("lesion one diameter away gives minus one") {
  // box of 3 x 4 x 7 voxels: diagonal sqrt(2^2 + 3^2 + 6^2) = 7
  const Hcz h = cube_hcz({12, 4, 7}, {0, 0, 0}, {2, 3, 6});
  CHECK(h.diameter_mm == 7.0);
  LabelVolume v({12, 4, 7}, {1, 1, 1});
  v.at(9, 0, 0) = kLesion;
  const auto b = compute_biomarkers(v, &h);
  REQUIRE(b.b_hcz);
  CHECK(*b.b_hcz == -1.0);
}

TEST_CASE("hand-counted occupancy") {
  // HCZ 5x5x5 = 125 voxels, lesion of 33 voxels with 10 inside
  const Hcz h = cube_hcz({20, 20, 20}, {0, 0, 0}, {4, 4, 4});
  REQUIRE(h.mask.count() == 125);
  LabelVolume v({20, 20, 20}, {1, 1, 1});
  for (int z = 0; z < 10; ++z)
    for (int y = 0; y < 10; ++y)
      for (int x = 0; x < 10; ++x) v.at(x, y, z) = kLiver;
  // two rows of 10 with 5 inside each, then 13 more outside
  for (int x = 0; x < 10; ++x) v.at(x, 4, 4) = v.at(x, 4, 3) = kLesion;
  int extra = 13;
  for (int x = 5; x < 10; ++x)
    for (int y = 5; y < 8; ++y)
      if (extra-- > 0) v.at(x, y, 4) = kLesion;
  const auto b = compute_biomarkers(v, &h);
  CHECK(b.v_les_mm3 == 33.0);
  REQUIRE(b.b_hcz);
  CHECK(*b.b_hcz == doctest::Approx(10.0 / 125.0).epsilon(1e-15));
  CHECK(b.v_liv_mm3 == 1000.0);
}

TEST_CASE("flags and lesion counting") {
  const Hcz h = cube_hcz({10, 10, 10}, {2, 2, 2}, {6, 6, 6});
  LabelVolume v({10, 10, 10}, {1, 1, 1});
  const auto none = compute_biomarkers(v, &h);
  CHECK_FALSE(none.b_hcz);
  CHECK(none.flags == std::vector<std::string>{"no-lesion"});

  v.at(0, 0, 0) = kLesion;
  v.at(9, 9, 9) = kLesion;
  v.at(8, 8, 8) = kLesion;  // corner-touching, same component
  const auto two = compute_biomarkers(v, nullptr);
  CHECK(two.n_les == 2);
  CHECK_FALSE(two.b_hcz);
  CHECK(std::find(two.flags.begin(), two.flags.end(), "degenerate-hull") != two.flags.end());

  BiomarkerOptions o;
  o.min_lesion_voxels = 2;
  CHECK(compute_biomarkers(v, &h, o).n_les == 1);
}

TEST_CASE("b_hcz decreases as a lesion moves away") {
  const Hcz h = cube_hcz({40, 12, 12}, {2, 2, 2}, {8, 8, 8});
  double prev = 1.0;
  for (int step = 0; step < 10; ++step) {
    LabelVolume v({40, 12, 12}, {1, 1, 1});
    const int x = 10 + 2 * step;
    for (int y = 4; y <= 6; ++y) v.at(x, y, 5) = kLesion;
    const auto b = compute_biomarkers(v, &h);
    REQUIRE(b.b_hcz);
    CHECK(*b.b_hcz < prev);
    prev = *b.b_hcz;
  }
}

TEST_CASE("b_hcz is invariant under uniform spacing rescaling") {
  auto values = [](double s) {
    BinaryMask m({20, 10, 10}, {s, s, s});
    for (int x = 1; x <= 6; ++x)
      for (int y = 2; y <= 6; ++y) m.at(x, y, 3) = m.at(x, y, 6) = 1;
    const Hcz h = build_hcz(m);
    LabelVolume far({20, 10, 10}, {s, s, s});
    far.at(15, 4, 4) = kLesion;
    LabelVolume in = far;
    in.at(5, 4, 4) = kLesion;
    return std::pair{*compute_biomarkers(far, &h).b_hcz, *compute_biomarkers(in, &h).b_hcz};
  };
  const auto base = values(1.0);
  CHECK(base.first < 0.0);
  CHECK(base.second > 0.0);
  for (double s : {0.5, 3.0}) {
    const auto v = values(s);
    CHECK(v.first == doctest::Approx(base.first).epsilon(1e-12));
    CHECK(v.second == doctest::Approx(base.second).epsilon(1e-12));
  }
}
