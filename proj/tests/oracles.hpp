#pragma once

// Brute-force reference computations used by unit and acceptance tests.
// Deliberately naive and independent of the library's algorithms.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <tuple>
#include <utility>
#include <vector>

#include "corelr/convex_hull.hpp"
#include "corelr/phantom.hpp"
#include "corelr/vessel_graph.hpp"
#include "corelr/volume.hpp"

namespace oracle {

using namespace corelr;

inline BinaryMask random_mask(Index3 dims, Vec3 spacing, double density, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(density);
  BinaryMask m(dims, spacing);
  for (auto& v : m.data()) v = coin(rng) ? 1 : 0;
  return m;
}

/// All-pairs minimum distance to a background voxel center.
inline std::vector<double> edt(const BinaryMask& m) {
  std::vector<double> out(m.size(), 0.0);
  std::vector<Vec3> background;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (!m[i]) background.push_back(m.position(i));
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!m[i]) continue;
    double best = std::numeric_limits<double>::infinity();
    const Vec3 p = m.position(i);
    for (const Vec3& q : background) best = std::min(best, squared_norm(p - q));
    out[i] = std::sqrt(best);
  }
  return out;
}

inline bool adjacent(Index3 a, Index3 b, int connectivity) {
  const int dx = std::abs(a[0] - b[0]), dy = std::abs(a[1] - b[1]), dz = std::abs(a[2] - b[2]);
  if (dx + dy + dz == 0 || dx > 1 || dy > 1 || dz > 1) return false;
  return connectivity == 26 || dx + dy + dz == 1;
}

/// Union-find over all foreground voxel pairs. Returns, per voxel, the
/// smallest linear index in its component (-1 for background).
inline std::vector<long> component_roots(const BinaryMask& m, int connectivity) {
  std::vector<long> parent(m.size());
  std::iota(parent.begin(), parent.end(), 0L);
  auto find = [&](long x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
    return x;
  };
  std::vector<std::size_t> fg;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i]) fg.push_back(i);
  for (std::size_t a = 0; a < fg.size(); ++a)
    for (std::size_t b = a + 1; b < fg.size(); ++b)
      if (adjacent(m.coords(fg[a]), m.coords(fg[b]), connectivity)) {
        const long ra = find(static_cast<long>(fg[a])), rb = find(static_cast<long>(fg[b]));
        parent[static_cast<std::size_t>(std::max(ra, rb))] = std::min(ra, rb);
      }
  std::vector<long> out(m.size(), -1);
  for (std::size_t i : fg) out[i] = find(static_cast<long>(i));
  return out;
}

inline int component_count(const BinaryMask& m, int connectivity) {
  std::set<long> roots;
  for (long r : component_roots(m, connectivity))
    if (r >= 0) roots.insert(r);
  return static_cast<int>(roots.size());
}

/// Per-voxel erosion by the 6-cross.
inline BinaryMask erode(const BinaryMask& m) {
  BinaryMask out = BinaryMask::like(m);
  for (int z = 0; z < m.dim(2); ++z)
    for (int y = 0; y < m.dim(1); ++y)
      for (int x = 0; x < m.dim(0); ++x) {
        auto on = [&](int a, int b, int c) { return m.in_bounds(a, b, c) && m.at(a, b, c); };
        out.at(x, y, z) = on(x, y, z) && on(x - 1, y, z) && on(x + 1, y, z) && on(x, y - 1, z) && on(x, y + 1, z) &&
                          on(x, y, z - 1) && on(x, y, z + 1);
      }
  return out;
}

/// No foreground voxel has all 26 neighbors in the foreground.
inline bool is_thin(const BinaryMask& s) {
  for (int z = 0; z < s.dim(2); ++z)
    for (int y = 0; y < s.dim(1); ++y)
      for (int x = 0; x < s.dim(0); ++x) {
        if (!s.at(x, y, z)) continue;
        bool all = true;
        for (int dz = -1; dz <= 1 && all; ++dz)
          for (int dy = -1; dy <= 1 && all; ++dy)
            for (int dx = -1; dx <= 1 && all; ++dx)
              all = s.in_bounds(x + dx, y + dy, z + dz) && s.at(x + dx, y + dy, z + dz);
        if (all) return false;
      }
  return true;
}

/// Random forest over n vertices with free positions plus `extra` random
/// edges, so cycles and isolated vertices occur.
inline VesselGraph random_graph(std::mt19937_64& rng, int n, int extra) {
  std::vector<GraphVertex> v(static_cast<std::size_t>(n));
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (auto& x : v) x = {{0, 0, 0}, {u(rng), u(rng), u(rng)}, u(rng)};
  std::set<std::pair<int, int>> edges;
  for (int i = 1; i < n; ++i) {
    if (rng() % 8 == 0) continue;
    const int j = static_cast<int>(rng() % static_cast<unsigned>(i));
    edges.insert({j, i});
  }
  for (int k = 0; k < extra; ++k) {
    const int a = static_cast<int>(rng() % static_cast<unsigned>(n)), b = static_cast<int>(rng() % static_cast<unsigned>(n));
    if (a != b) edges.insert({std::min(a, b), std::max(a, b)});
  }
  return VesselGraph(v, std::vector<std::pair<int, int>>(edges.begin(), edges.end()));
}

using EdgeSet = std::set<std::pair<int, int>>;

inline std::pair<int, int> edge_key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

/// Grows each edge into its maximal chain through degree-2 vertices by
/// walking outward from both ends. Returns the distinct chains.
inline std::set<EdgeSet> maximal_chains(const VesselGraph& g) {
  std::set<EdgeSet> out;
  for (const auto& [u, w] : g.edges()) {
    EdgeSet chain{edge_key(u, w)};
    for (auto [prev, cur] : {std::pair{u, w}, std::pair{w, u}}) {
      while (g.degree(cur) == 2) {
        const auto& nb = g.neighbors(cur);
        const int next = nb[0] == prev ? nb[1] : nb[0];
        if (!chain.insert(edge_key(cur, next)).second) break;  // closed cycle
        prev = cur;
        cur = next;
      }
    }
    out.insert(chain);
  }
  return out;
}

inline EdgeSet branch_edges(const Branch& b) {
  EdgeSet s;
  for (std::size_t i = 0; i + 1 < b.path.size(); ++i) s.insert(edge_key(b.path[i], b.path[i + 1]));
  return s;
}

/// Junction depth of every branch reachable from root: the root branch is 0
/// and each branch leaving the far junction of a depth-d branch gets d + 1.
inline std::map<int, int> junction_depths(const VesselGraph& g, const BranchDecomposition& d, int root) {
  std::map<int, std::vector<int>> at_vertex;
  for (const auto& b : d.branches) {
    at_vertex[b.start()].push_back(b.id);
    if (b.end() != b.start()) at_vertex[b.end()].push_back(b.id);
  }
  std::map<int, int> depth;
  std::vector<std::pair<int, int>> frontier;  // (branch, entry vertex)
  const int rb = d.branch_of(g, root, g.neighbors(root).front());
  depth[rb] = 0;
  frontier.push_back({rb, root});
  while (!frontier.empty()) {
    std::vector<std::pair<int, int>> next;
    for (auto [b, entry] : frontier) {
      const Branch& br = d.branches[static_cast<std::size_t>(b)];
      const int far = br.start() == entry ? br.end() : br.start();
      for (int c : at_vertex[far]) {
        if (depth.count(c)) continue;
        depth[c] = depth[b] + 1;
        next.push_back({c, far});
      }
    }
    frontier = std::move(next);
  }
  return depth;
}

/// Graph of one phantom tree's analytic centerlines, sampled every `step`
/// mm. Junctions are shared vertices, so every junction has degree 3. The
/// returned root is the trunk's free end.
inline std::pair<VesselGraph, int> truth_graph(const PhantomTruth& t, int tree, double step = 1.0) {
  std::vector<GraphVertex> vertices;
  std::vector<std::pair<int, int>> edges;
  std::map<std::tuple<double, double, double>, int> ids;
  auto vertex_at = [&](Vec3 p, double r) {
    const auto key = std::make_tuple(std::round(p.x * 1e6), std::round(p.y * 1e6), std::round(p.z * 1e6));
    const auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    const int id = static_cast<int>(vertices.size());
    vertices.push_back({{0, 0, 0}, p, r});
    ids[key] = id;
    return id;
  };
  // Spur attachment points split their parent branch.
  std::map<int, std::vector<double>> cuts;
  const auto& bs = t.branches;
  for (std::size_t i = 0; i < bs.size(); ++i) {
    if (!bs[i].spur || bs[i].tree != tree) continue;
    for (std::size_t j = 0; j < bs.size(); ++j) {
      if (bs[j].spur || bs[j].tree != tree) continue;
      const Vec3 mid = 0.5 * (bs[j].start + bs[j].end);
      if (distance(mid, bs[i].start) < 1e-9) cuts[static_cast<int>(j)].push_back(0.5);
    }
  }
  int root = -1;
  for (std::size_t j = 0; j < bs.size(); ++j) {
    const TruthBranch& b = bs[j];
    if (b.tree != tree) continue;
    std::vector<double> ts{0.0, 1.0};
    for (double c : cuts[static_cast<int>(j)]) ts.push_back(c);
    std::sort(ts.begin(), ts.end());
    int prev = -1;
    for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
      const double seg = (ts[k + 1] - ts[k]) * b.length();
      const int n = std::max(1, static_cast<int>(std::ceil(seg / step)));
      for (int s = (k == 0 ? 0 : 1); s <= n; ++s) {
        const double tt = ts[k] + (ts[k + 1] - ts[k]) * s / n;
        const int v = vertex_at(b.start + tt * (b.end - b.start), b.radius);
        if (prev >= 0) edges.push_back({prev, v});
        prev = v;
      }
    }
    if (b.generation == 0) root = vertex_at(b.start, b.radius);
  }
  return {VesselGraph(std::move(vertices), edges), root};
}

inline double orient(Vec3 a, Vec3 b, Vec3 c, Vec3 p) { return dot(cross(b - a, c - a), p - a); }

/// Inside test against faces recomputed from the vertex triples.
inline bool in_polytope(const ConvexHull& h, Vec3 p, double tol) {
  for (const auto& f : h.faces) {
    const Vec3 a = h.vertices[static_cast<std::size_t>(f[0])], b = h.vertices[static_cast<std::size_t>(f[1])],
               c = h.vertices[static_cast<std::size_t>(f[2])];
    const Vec3 n = cross(b - a, c - a);
    if (dot(n, p - a) > tol * norm(n)) return false;
  }
  return true;
}

inline double max_pairwise_distance(const std::vector<Vec3>& pts) {
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::max(best, distance(pts[i], pts[j]));
  return best;
}

/// Distance to the polytope surface by dense barycentric sampling of every face.
inline double sampled_surface_distance(const ConvexHull& h, Vec3 p, int n) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& f : h.faces) {
    const Vec3 a = h.vertices[static_cast<std::size_t>(f[0])], b = h.vertices[static_cast<std::size_t>(f[1])],
               c = h.vertices[static_cast<std::size_t>(f[2])];
    for (int i = 0; i <= n; ++i)
      for (int j = 0; i + j <= n; ++j) {
        const double u = double(i) / n, v = double(j) / n;
        best = std::min(best, distance(p, a + u * (b - a) + v * (c - a)));
      }
  }
  return best;
}

/// Fraction of (positive, negative) pairs ranked correctly, ties half.
inline std::optional<double> pairwise_auc(const std::vector<double>& s, const std::vector<int>& y) {
  double good = 0.0;
  int pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[i] != 1 || y[j] != 0) continue;
      ++pairs;
      good += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
    }
  if (pairs == 0) return std::nullopt;
  return good / pairs;
}

/// 1D L2-regularized logistic objective on raw inputs.
inline double objective_1d(const std::vector<double>& x, const std::vector<int>& y, double w, double b,
                           double lambda) {
  double f = 0.5 * lambda * w * w;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double z = w * x[i] + b;
    f += std::log1p(std::exp(-std::abs(z))) + std::max(z, 0.0) - y[i] * z;
  }
  return f;
}

/// Coarse-to-fine grid search of the 1D objective.
inline std::pair<double, double> grid_search_1d(const std::vector<double>& x, const std::vector<int>& y,
                                                double lambda) {
  double cw = 0.0, cb = 0.0, half = 8.0;
  for (int level = 0; level < 12; ++level) {
    double bw = cw, bb = cb, best = objective_1d(x, y, cw, cb, lambda);
    const int n = 40;
    for (int i = -n; i <= n; ++i)
      for (int j = -n; j <= n; ++j) {
        const double w = cw + half * i / n, b = cb + half * j / n;
        const double f = objective_1d(x, y, w, b, lambda);
        if (f < best) {
          best = f;
          bw = w;
          bb = b;
        }
      }
    cw = bw;
    cb = bb;
    half *= 0.25;
  }
  return {cw, cb};
}

}  // namespace oracle
