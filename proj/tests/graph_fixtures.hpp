#pragma once

#include <vector>

#include "corelr/vessel_graph.hpp"

namespace fixture {

using namespace corelr;

/// Builds graphs from straight chains of unit-spaced vertices.
class GraphBuilder {
 public:
  int add_vertex(Vec3 p, double r = 1.0) {
    vertices_.push_back({{0, 0, 0}, p, r});
    return static_cast<int>(vertices_.size()) - 1;
  }
  /// Chain of `edges` edges from vertex `from` along `dir`; returns the far end.
  int add_chain(int from, Vec3 dir, int edges, double step = 1.0, double r = 1.0) {
    int prev = from;
    const Vec3 start = vertices_[static_cast<std::size_t>(from)].position;
    for (int k = 1; k <= edges; ++k) {
      const int v = add_vertex(start + (k * step) * dir, r);
      edges_.push_back({prev, v});
      prev = v;
    }
    return prev;
  }
  VesselGraph build() const { return VesselGraph(vertices_, edges_); }

 private:
  std::vector<GraphVertex> vertices_;
  std::vector<std::pair<int, int>> edges_;
};

/// Perfect binary tree: a trunk from vertex 0, then `generations` junction
/// levels, every branch `edges` unit edges long.
inline VesselGraph binary_tree(int generations, int edges) {
  GraphBuilder b;
  const int root = b.add_vertex({0, 0, 0});
  std::vector<int> tips{b.add_chain(root, {1, 0, 0}, edges)};
  for (int g = 0; g < generations; ++g) {
    std::vector<int> next;
    for (int t : tips) {
      next.push_back(b.add_chain(t, normalized(Vec3{1, 1, double(g)}), edges));
      next.push_back(b.add_chain(t, normalized(Vec3{1, -1, -double(g)}), edges));
    }
    tips = next;
  }
  return b.build();
}

}  // namespace fixture
