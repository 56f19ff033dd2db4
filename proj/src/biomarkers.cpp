#include "corelr/biomarkers.hpp"

#include "corelr/morphology.hpp"

namespace corelr {

BinaryMask lesion_mask(const LabelVolume& v, int min_lesion_voxels) {
  BinaryMask les = extract_mask(v, kLesion);
  if (min_lesion_voxels <= 1) return les;
  const ComponentLabeling cc = connected_components(les, 26);
  for (std::size_t i = 0; i < les.size(); ++i) {
    const int id = cc.labels[i];
    if (id > 0 && cc.sizes[static_cast<std::size_t>(id - 1)] < static_cast<std::size_t>(min_lesion_voxels)) les[i] = 0;
  }
  return les;
}

std::optional<double> hcz_biomarker(const BinaryMask& lesion, const Hcz& hcz) {
  if (lesion.empty() || hcz.mask.empty()) return std::nullopt;
  const std::size_t hcz_count = hcz.mask.count();
  std::size_t overlap = 0;
  for (std::size_t i = 0; i < lesion.size(); ++i) overlap += lesion[i] & hcz.mask[i];
  if (overlap > 0) return static_cast<double>(overlap) / static_cast<double>(hcz_count);
  return -distance_to_hcz(lesion, hcz) / hcz.diameter_mm;
}

BiomarkerVector compute_biomarkers(const LabelVolume& v, const Hcz* hcz, const BiomarkerOptions& options) {
  BiomarkerVector out;
  const double vox = voxel_volume(v);
  out.v_liv_mm3 = static_cast<double>(extract_mask(v, kLiverUnion).count()) * vox;
  const BinaryMask les = lesion_mask(v, options.min_lesion_voxels);
  out.n_les = connected_components(les, 26).count;
  out.v_les_mm3 = static_cast<double>(les.count()) * vox;
  if (out.n_les == 0) out.flags.emplace_back("no-lesion");
  if (hcz == nullptr || hcz->mask.empty()) {
    out.flags.emplace_back("degenerate-hull");
    return out;
  }
  if (out.n_les > 0) out.b_hcz = hcz_biomarker(les, *hcz);
  return out;
}

}  // namespace corelr
