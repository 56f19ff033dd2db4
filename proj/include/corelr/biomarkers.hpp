#pragma once

#include <optional>
#include <string>
#include <vector>

#include "corelr/hcz.hpp"
#include "corelr/volume.hpp"

namespace corelr {

struct BiomarkerVector {
  double v_liv_mm3 = 0.0;
  int n_les = 0;
  double v_les_mm3 = 0.0;
  std::optional<double> b_hcz;  // fraction; empty when undefined (see flags)
  std::vector<std::string> flags;
};

struct BiomarkerOptions {
  /// Lesion components smaller than this are discarded before counting.
  int min_lesion_voxels = 1;
};

/// Liver volume (union of labels 1-3), lesion count (26-connected) and
/// volume, and the HCZ biomarker: occupancy |Les & HCZ| / |HCZ| when the
/// voxelized lesion meets the HCZ, else -distance / diameter. A null hcz or an
/// empty HCZ mask yields the "degenerate-hull" flag; no lesion yields
/// "no-lesion".
BiomarkerVector compute_biomarkers(const LabelVolume& v, const Hcz* hcz, const BiomarkerOptions& options = {});

/// Lesion mask after the min-size filter.
BinaryMask lesion_mask(const LabelVolume& v, int min_lesion_voxels);

/// Occupancy / signed-distance core, on prepared masks.
std::optional<double> hcz_biomarker(const BinaryMask& lesion, const Hcz& hcz);

}  // namespace corelr
