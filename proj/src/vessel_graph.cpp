#include "corelr/vessel_graph.hpp"

#include <algorithm>
#include <unordered_map>

#include "corelr/format.hpp"

namespace corelr {

VesselGraph::VesselGraph(std::vector<GraphVertex> vertices, const std::vector<std::pair<int, int>>& edges)
    : vertices_(std::move(vertices)), adjacency_(vertices_.size()) {
  const int n = vertex_count();
  for (const auto& [u, w] : edges) {
    if (u < 0 || w < 0 || u >= n || w >= n) throw Error(ErrorKind::InvalidArgument, "edge vertex id out of range");
    if (u == w) throw Error(ErrorKind::InvalidArgument, "self-loop");
    adjacency_[static_cast<std::size_t>(u)].push_back(w);
    adjacency_[static_cast<std::size_t>(w)].push_back(u);
  }
  for (auto& nbrs : adjacency_) {
    std::sort(nbrs.begin(), nbrs.end());
    if (std::adjacent_find(nbrs.begin(), nbrs.end()) != nbrs.end()) {
      throw Error(ErrorKind::InvalidArgument, "duplicate edge");
    }
  }
  edge_count_ = edges.size();
}

int VesselGraph::slot(int v, int w) const {
  const auto& nbrs = neighbors(v);
  auto it = std::lower_bound(nbrs.begin(), nbrs.end(), w);
  if (it == nbrs.end() || *it != w) return -1;
  return static_cast<int>(it - nbrs.begin());
}

std::vector<std::pair<int, int>> VesselGraph::edges() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(edge_count_);
  for (int v = 0; v < vertex_count(); ++v)
    for (int w : neighbors(v))
      if (v < w) out.emplace_back(v, w);
  return out;
}

VesselGraph build_graph(const Skeleton& s) {
  std::vector<GraphVertex> vertices;
  vertices.reserve(s.voxels.size());
  std::unordered_map<std::size_t, int> id_of;
  id_of.reserve(s.voxels.size() * 2);
  const GridGeometry shape{s.dims, s.spacing};
  for (std::size_t i = 0; i < s.voxels.size(); ++i) {
    const Index3 p = shape.coords(s.voxels[i]);
    const double r = s.radius.empty() ? 0.0 : s.radius[i];
    vertices.push_back({p, shape.position(p), r});
    id_of.emplace(s.voxels[i], static_cast<int>(i));
  }
  std::vector<std::pair<int, int>> edges;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const Index3 p = vertices[i].voxel;
    // Visit only the 13 "forward" neighbors so each pair is emitted once.
    for (int dz = -1; dz <= 1; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int key = dx + 3 * dy + 9 * dz;
          if (key <= 0) continue;
          const Index3 q{p[0] + dx, p[1] + dy, p[2] + dz};
          if (!shape.in_bounds(q)) continue;
          auto it = id_of.find(shape.index(q));
          if (it != id_of.end()) edges.emplace_back(static_cast<int>(i), it->second);
        }
  }
  return VesselGraph(std::move(vertices), edges);
}

int BranchDecomposition::branch_of(const VesselGraph& g, int v, int w) const {
  const int k = g.slot(v, w);
  if (k < 0) throw Error(ErrorKind::InvalidArgument, "not an edge");
  return edge_branch[static_cast<std::size_t>(v)][static_cast<std::size_t>(k)];
}

BranchDecomposition decompose_branches(const VesselGraph& g) {
  const int n = g.vertex_count();
  std::vector<std::vector<int>> used(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) used[static_cast<std::size_t>(v)].assign(g.neighbors(v).size(), -1);

  std::vector<std::vector<int>> paths;
  auto mark = [&](int v, int w, int branch) {
    used[static_cast<std::size_t>(v)][static_cast<std::size_t>(g.slot(v, w))] = branch;
    used[static_cast<std::size_t>(w)][static_cast<std::size_t>(g.slot(w, v))] = branch;
  };
  auto next_unused = [&](int v) {
    const auto& nbrs = g.neighbors(v);
    for (std::size_t k = 0; k < nbrs.size(); ++k)
      if (used[static_cast<std::size_t>(v)][k] < 0) return nbrs[k];
    return -1;
  };
  auto walk = [&](int start, int first) {
    const int id = static_cast<int>(paths.size());
    std::vector<int> path{start};
    int cur = first;
    mark(start, cur, id);
    path.push_back(cur);
    while (g.degree(cur) == 2 && cur != start) {
      const int nxt = next_unused(cur);
      if (nxt < 0) break;
      mark(cur, nxt, id);
      path.push_back(nxt);
      cur = nxt;
    }
    paths.push_back(std::move(path));
  };

  for (int v = 0; v < n; ++v) {
    if (g.degree(v) == 2) continue;
    const auto& nbrs = g.neighbors(v);
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      if (used[static_cast<std::size_t>(v)][k] >= 0) continue;
      walk(v, nbrs[k]);
    }
  }
  // Remaining edges lie on isolated cycles of degree-2 vertices.
  for (int v = 0; v < n; ++v) {
    int w = next_unused(v);
    if (w >= 0) walk(v, w);
  }

  std::vector<int> order(paths.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& pa = paths[static_cast<std::size_t>(a)];
    const auto& pb = paths[static_cast<std::size_t>(b)];
    return std::min(pa.front(), pa.back()) < std::min(pb.front(), pb.back());
  });
  std::vector<int> new_id(paths.size());
  for (std::size_t i = 0; i < order.size(); ++i) new_id[static_cast<std::size_t>(order[i])] = static_cast<int>(i);

  BranchDecomposition out;
  out.branches.reserve(paths.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    Branch b;
    b.id = static_cast<int>(i);
    b.path = std::move(paths[static_cast<std::size_t>(order[i])]);
    double rad_sum = 0.0;
    for (std::size_t e = 0; e + 1 < b.path.size(); ++e) {
      const int u = b.path[e], w = b.path[e + 1];
      b.length += g.edge_length(u, w);
      rad_sum += 0.5 * (g.vertex(u).radius + g.vertex(w).radius);
    }
    b.radius = rad_sum / static_cast<double>(b.edge_count());
    out.branches.push_back(std::move(b));
  }
  out.edge_branch = std::move(used);
  for (auto& row : out.edge_branch)
    for (auto& id : row) id = new_id[static_cast<std::size_t>(id)];
  return out;
}

std::string graph_to_text(const VesselGraph& g) {
  std::string out;
  for (int v = 0; v < g.vertex_count(); ++v) {
    const auto& vx = g.vertex(v);
    out += "vertex " + std::to_string(v) + " " + std::to_string(vx.voxel[0]) + " " + std::to_string(vx.voxel[1]) +
           " " + std::to_string(vx.voxel[2]) + " " + format_double(vx.radius) + "\n";
  }
  for (const auto& [u, w] : g.edges()) out += "edge " + std::to_string(u) + " " + std::to_string(w) + "\n";
  return out;
}

}  // namespace corelr
