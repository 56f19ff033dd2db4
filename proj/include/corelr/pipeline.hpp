#pragma once

#include <map>
#include <optional>
#include <string>

#include "corelr/biomarkers.hpp"
#include "corelr/hcz.hpp"
#include "corelr/pruning.hpp"

namespace corelr {

struct PipelineConfig {
  PruneParams prune;
  bool drop_noise_branches = false;
  bool clip_to_liver = false;
  DilationMode dilation = DilationMode::Radius;
  BiomarkerOptions biomarkers;
  bool dumps = true;  // intermediate artifacts
};

/// Everything one case produces. `files` maps artifact names to their bytes;
/// the biomarker JSON is always present.
struct CaseResult {
  std::string case_id;
  BiomarkerVector biomarkers;
  std::optional<Hcz> hcz;
  std::map<std::string, std::string> files;
};

/// Vessel stages on one mask: skeleton, graph, entries, pruning and
/// reconstruction. Exposed for the `prune` subcommand.
struct PruneResult {
  Skeleton skeleton;
  VesselGraph graph;
  BranchDecomposition branches;
  EntryPoints entries;
  PrunedForest forest;
  BinaryMask reconstructed;
};
PruneResult run_prune(const BinaryMask& vessels, const PipelineConfig& config);

/// extract, edt, skeletonize, graph, entries, prune_both, reconstruct, hull,
/// voxelize, biomarkers. Vessel-stage failures (too few persistent cores, no
/// usable root, flat hull) are soft: they leave b_hcz empty with a flag.
CaseResult run_pipeline(const LabelVolume& volume, const std::string& case_id, const PipelineConfig& config);

std::string biomarker_json(const std::string& case_id, const BiomarkerVector& b, const Hcz* hcz);
std::string branch_report_json(const PruneResult& r, const PipelineConfig& config);

}  // namespace corelr
