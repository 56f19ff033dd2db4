#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "corelr/skeleton.hpp"

namespace corelr {

struct GraphVertex {
  Index3 voxel{0, 0, 0};
  Vec3 position;       // mm
  double radius = 0.0;  // mm
};

/// Undirected simple graph over skeleton voxels. Neighbor lists are sorted
/// by ascending vertex id.
class VesselGraph {
 public:
  VesselGraph() = default;
  /// Throws InvalidArgument on self-loops, duplicate edges or bad ids.
  VesselGraph(std::vector<GraphVertex> vertices, const std::vector<std::pair<int, int>>& edges);

  int vertex_count() const { return static_cast<int>(vertices_.size()); }
  std::size_t edge_count() const { return edge_count_; }
  const GraphVertex& vertex(int v) const { return vertices_[static_cast<std::size_t>(v)]; }
  const std::vector<GraphVertex>& vertices() const { return vertices_; }
  const std::vector<int>& neighbors(int v) const { return adjacency_[static_cast<std::size_t>(v)]; }
  int degree(int v) const { return static_cast<int>(neighbors(v).size()); }

  /// Slot of w in neighbors(v), or -1.
  int slot(int v, int w) const;

  double edge_length(int v, int w) const { return distance(vertex(v).position, vertex(w).position); }

  /// Edges as (u, w) with u < w, lexicographically sorted.
  std::vector<std::pair<int, int>> edges() const;

 private:
  std::vector<GraphVertex> vertices_;
  std::vector<std::vector<int>> adjacency_;
  std::size_t edge_count_ = 0;
};

/// One vertex per skeleton voxel (ids in skeleton order), edges between all
/// 26-adjacent pairs, positions = voxel index * spacing.
VesselGraph build_graph(const Skeleton& s);

struct Branch {
  int id = 0;
  std::vector<int> path;  // vertex ids; consecutive pairs are the branch edges
  double length = 0.0;    // mm, sum of edge lengths
  double radius = 0.0;    // mm, mean over edges of the mean endpoint radius

  int start() const { return path.front(); }
  int end() const { return path.back(); }
  std::size_t edge_count() const { return path.size() - 1; }
};

struct BranchDecomposition {
  std::vector<Branch> branches;
  // edge_branch[v][k] = branch id of the edge (v, neighbors(v)[k])
  std::vector<std::vector<int>> edge_branch;

  int branch_of(const VesselGraph& g, int v, int w) const;
};

/// Edge-disjoint maximal chains whose interior vertices have degree 2.
/// Walks start at every vertex of degree != 2 (ascending id); leftover
/// all-degree-2 cycles become one branch each. Branches are ordered by their
/// smallest endpoint id.
BranchDecomposition decompose_branches(const VesselGraph& g);

/// Plain-text dump: "vertex <id> <x> <y> <z> <radius>" then "edge <u> <w>".
std::string graph_to_text(const VesselGraph& g);

}  // namespace corelr
