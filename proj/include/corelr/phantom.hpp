#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "corelr/dataset.hpp"
#include "corelr/volume.hpp"

namespace corelr {

/// Portable seeded stream: std::mt19937_64 (sequence fixed by the standard)
/// seeded through a SplitMix64 mix of (seed, stream), with our own
/// integer-to-double conversion so results do not depend on the standard
/// library's distribution implementations.
class PhantomRng {
 public:
  PhantomRng(std::uint64_t seed, std::uint64_t stream);
  double uniform();  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int uniform_int(int lo, int hi);  // inclusive
  Vec3 unit_vector();

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

struct LesionSpec {
  Vec3 center;  // mm
  double radius = 3.0;
};

struct PhantomSpec {
  std::uint64_t seed = 1;
  Index3 dims{68, 56, 56};
  Vec3 spacing{1.0, 1.0, 1.0};
  int trees = 2;                // 1 or 2
  int depth = 2;                // junction generations below the trunk
  double trunk_length = 14.0;   // mm
  double length_min = 10.0;     // mm, generation-1 branch length range
  double length_max = 14.0;
  double length_decay = 0.8;    // per generation after the first
  double root_radius = 3.0;     // mm
  double taper = 0.65;          // radius factor per generation
  double branch_angle_min = 25.0;  // degrees between child and parent axis
  double branch_angle_max = 40.0;
  double spur_probability = 0.0;   // per non-trunk branch
  double spur_length_factor = 0.1;
  Vec3 liver_semi_axes{27.0, 22.0, 21.0};
  double entry_offset = 7.0;    // mm, +-z offset separating the two trees
  std::vector<LesionSpec> lesions;
};

struct TruthBranch {
  int tree = 0;        // 0 or 1
  int generation = 0;  // 0 = trunk
  bool spur = false;
  Vec3 start, end;     // centerline endpoints, mm
  double radius = 0.0;
  double length() const { return distance(start, end); }
};

struct PhantomTruth {
  std::vector<TruthBranch> branches;
  std::array<Vec3, 2> entries;  // trunk start points, mm
  Vec3 liver_center;
  std::vector<LesionSpec> lesions;
  int attempts = 1;
};

/// Two tapered binary trees of capsule tubes entering a liver ellipsoid from
/// opposite sides, with spherical lesions. Layers: liver, then lesions, then
/// vessels on top. Resamples (deterministically) until both trees stay in
/// bounds and do not touch.
std::pair<LabelVolume, PhantomTruth> generate_tree(const PhantomSpec& spec);

/// Voxel centers within radius of segment ab.
void stamp_capsule(VoxelGrid<std::uint8_t>& grid, Vec3 a, Vec3 b, double radius, std::uint8_t value);

enum class LesionPlacement { Inside, Near, Far };
std::string_view to_string(LesionPlacement p);

struct DifficultyMix {
  double inside = 0.45;
  double near = 0.25;  // remainder is far
};

struct PhantomCase {
  std::string case_id;
  LabelVolume volume;
  PhantomTruth truth;
  LesionPlacement placement = LesionPlacement::Far;
  double lesion_volume_mm3 = 0.0;  // analytic
  int raw_score = 1;
  int label = 0;
};

/// Lesion volume above this (analytic, mm^3) also makes a case complex.
inline constexpr double kPlantedVolumeThreshold = 900.0;

/// Points sampled on the surface of the generation <= 1 tubes; their hull is
/// the analytic stand-in for the central zone.
std::vector<Vec3> analytic_core_points(const PhantomTruth& truth);

/// One case from (seed, index). A fixed placement may be forced.
PhantomCase generate_case(std::uint64_t seed, int index, const DifficultyMix& mix,
                          std::optional<LesionPlacement> forced = std::nullopt);

/// Cases labeled by the planted rule: complex iff the main lesion overlaps
/// the analytic core hull or total lesion volume exceeds the threshold.
std::vector<PhantomCase> generate_dataset(int n_cases, std::uint64_t seed, const DifficultyMix& mix = {});

}  // namespace corelr
