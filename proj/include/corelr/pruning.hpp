#pragma once

#include <vector>

#include "corelr/morphology.hpp"
#include "corelr/vessel_graph.hpp"

namespace corelr {

/// The two vessel-tree entry vertices. `first` comes from the more persistent
/// erosion lineage.
struct EntryPoints {
  int first = -1;
  int second = -1;
  int persistence_first = 0;
  int persistence_second = 0;
  Vec3 core_first;   // centroid of the last surviving core, mm
  Vec3 core_second;
};

struct PruneParams {
  int bif_max = 2;
  double r_max = 0.2;
};

struct BranchTag {
  int branch = -1;
  bool noise = false;
  int level = 0;  // bifurcation level in effect when the branch was entered
};

struct PrunedTree {
  int seed = -1;
  std::vector<char> visited;       // per vertex
  std::vector<int> vertices;       // visited vertex ids, ascending
  std::vector<BranchTag> branches;  // retained branches, ascending branch id
};

/// Successive 6-cross erosion with 26-connected lineage tracking. Lineages
/// continue through the largest child on splits (ties: smallest first
/// voxel); persistence is the last erosion step a lineage is non-empty.
EntryPoints find_entries(const BinaryMask& vessel_mask, const VesselGraph& g);

/// Recursive tree pruning run from a degree-1 root, with an explicit stack.
/// Neighbors are visited in ascending id order. A branch is retained when the
/// traversal crosses one of its edges; the root branch is always retained at
/// level 0.
PrunedTree prune(const VesselGraph& g, const BranchDecomposition& branches, int root, const PruneParams& params);

struct PrunedForest {
  PrunedTree first;
  PrunedTree second;
  std::vector<int> vertices;  // union of both visited sets, ascending
};

/// Independent traversals from both entries.
PrunedForest prune_both(const VesselGraph& g, const BranchDecomposition& branches, const EntryPoints& entries,
                        const PruneParams& params);

/// Vertices kept for reconstruction. With drop_noise, only vertices of
/// non-noise retained branches that were visited are kept.
std::vector<int> retained_vertices(const PrunedForest& forest, const BranchDecomposition& branches,
                                   bool drop_noise);

/// Dilates the retained centerline voxels by their radii and intersects
/// the result with the original segmentation.
BinaryMask reconstruct(std::span<const RadiusPoint> retained, const BinaryMask& original,
                       DilationMode mode = DilationMode::Radius);

}  // namespace corelr
