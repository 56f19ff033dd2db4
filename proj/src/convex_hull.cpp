#include "corelr/convex_hull.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>

#include "corelr/error.hpp"
#include "corelr/format.hpp"

namespace corelr {

namespace {

bool lex_less(Vec3 a, Vec3 b) {
  if (a.x != b.x) return a.x < b.x;
  if (a.y != b.y) return a.y < b.y;
  return a.z < b.z;
}

struct HullFace {
  std::array<int, 3> v;
  Vec3 normal;  // unnormalized
  double tolerance = 0.0;
  std::vector<int> outside;
  bool alive = true;
};

class QuickHull {
 public:
  QuickHull(std::vector<Vec3> pts, double eps) : pts_(std::move(pts)), eps_(eps) {}

  ConvexHull run() {
    build_simplex();
    for (std::size_t f = 0; f < faces_.size(); ++f) {
      if (!faces_[f].alive || faces_[f].outside.empty()) continue;
      add_point(static_cast<int>(f));
      // Restart from the lowest live face that still has outside points.
      f = static_cast<std::size_t>(-1);
    }
    return extract();
  }

 private:
  static std::uint64_t key(int a, int b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
  }

  double signed_dist(const HullFace& f, int p) const { return dot(f.normal, pts_[p] - pts_[f.v[0]]); }

  int make_face(int a, int b, int c) {
    HullFace f;
    f.v = {a, b, c};
    f.normal = cross(pts_[b] - pts_[a], pts_[c] - pts_[a]);
    f.tolerance = eps_ * norm(f.normal);
    const int id = static_cast<int>(faces_.size());
    faces_.push_back(std::move(f));
    edges_[key(a, b)] = id;
    edges_[key(b, c)] = id;
    edges_[key(c, a)] = id;
    return id;
  }

  void build_simplex() {
    const int n = static_cast<int>(pts_.size());
    if (n < 4) throw Error(ErrorKind::DegenerateHull, "convex hull needs at least 4 distinct points");
    const int i0 = 0;
    int i1 = -1;
    double best = -1.0;
    for (int i = 1; i < n; ++i) {
      const double d = squared_norm(pts_[i] - pts_[i0]);
      if (d > best) best = d, i1 = i;
    }
    int i2 = -1;
    best = 0.0;
    for (int i = 1; i < n; ++i) {
      const double d = squared_norm(cross(pts_[i1] - pts_[i0], pts_[i] - pts_[i0]));
      if (d > best) best = d, i2 = i;
    }
    if (i2 < 0) throw Error(ErrorKind::DegenerateHull, "collinear input");
    const Vec3 nrm = cross(pts_[i1] - pts_[i0], pts_[i2] - pts_[i0]);
    const Vec3 unit = normalized(nrm);
    int i3 = -1;
    double best_abs = 0.0;
    double lo[3] = {pts_[0].x, pts_[0].y, pts_[0].z}, hi[3] = {lo[0], lo[1], lo[2]};
    for (int i = 0; i < n; ++i) {
      for (int a = 0; a < 3; ++a) lo[a] = std::min(lo[a], pts_[i][a]), hi[a] = std::max(hi[a], pts_[i][a]);
      const double d = std::abs(dot(unit, pts_[i] - pts_[i0]));
      if (d > best_abs) best_abs = d, i3 = i;
    }
    const double diag = std::sqrt((hi[0] - lo[0]) * (hi[0] - lo[0]) + (hi[1] - lo[1]) * (hi[1] - lo[1]) +
                                  (hi[2] - lo[2]) * (hi[2] - lo[2]));
    if (i3 < 0 || best_abs <= 1e-9 * std::max(1.0, diag)) {
      throw Error(ErrorKind::DegenerateHull, "coplanar input");
    }
    int a = i0, b = i1, c = i2;
    if (dot(nrm, pts_[i3] - pts_[i0]) > 0.0) std::swap(b, c);  // i3 must lie below face (a,b,c)
    make_face(a, b, c);
    make_face(a, i3, b);
    make_face(b, i3, c);
    make_face(c, i3, a);
    for (int i = 0; i < n; ++i) {
      if (i == i0 || i == i1 || i == i2 || i == i3) continue;
      assign(i, 0, faces_.size());
    }
  }

  void assign(int p, std::size_t from, std::size_t to) {
    for (std::size_t f = from; f < to; ++f) {
      if (!faces_[f].alive) continue;
      if (signed_dist(faces_[f], p) > faces_[f].tolerance) {
        faces_[f].outside.push_back(p);
        return;
      }
    }
  }

  void add_point(int face) {
    // Farthest outside point of this face; ties keep the earliest.
    int eye = -1;
    double best = -1.0;
    for (int p : faces_[static_cast<std::size_t>(face)].outside) {
      const double d = signed_dist(faces_[static_cast<std::size_t>(face)], p);
      if (d > best) best = d, eye = p;
    }

    std::vector<int> visible{face};
    std::vector<char> is_visible(faces_.size(), 0);
    is_visible[static_cast<std::size_t>(face)] = 1;
    std::vector<std::pair<int, int>> horizon;
    for (std::size_t k = 0; k < visible.size(); ++k) {
      const HullFace& f = faces_[static_cast<std::size_t>(visible[k])];
      for (int e = 0; e < 3; ++e) {
        const int a = f.v[e], b = f.v[(e + 1) % 3];
        const int nb = edges_.at(key(b, a));
        if (is_visible[static_cast<std::size_t>(nb)]) continue;
        const HullFace& g = faces_[static_cast<std::size_t>(nb)];
        if (signed_dist(g, eye) > g.tolerance) {
          is_visible[static_cast<std::size_t>(nb)] = 1;
          visible.push_back(nb);
        }
      }
    }
    for (int fid : visible) {
      const HullFace& f = faces_[static_cast<std::size_t>(fid)];
      for (int e = 0; e < 3; ++e) {
        const int a = f.v[e], b = f.v[(e + 1) % 3];
        if (!is_visible[static_cast<std::size_t>(edges_.at(key(b, a)))]) horizon.emplace_back(a, b);
      }
    }

    std::vector<int> orphans;
    for (int fid : visible) {
      HullFace& f = faces_[static_cast<std::size_t>(fid)];
      f.alive = false;
      for (int p : f.outside)
        if (p != eye) orphans.push_back(p);
      f.outside.clear();
      for (int e = 0; e < 3; ++e) {
        auto it = edges_.find(key(f.v[e], f.v[(e + 1) % 3]));
        if (it != edges_.end() && it->second == fid) edges_.erase(it);
      }
    }
    // Horizon order only affects face numbering, which is deterministic here.
    std::sort(horizon.begin(), horizon.end());
    const std::size_t first_new = faces_.size();
    for (const auto& [a, b] : horizon) make_face(a, b, eye);
    std::sort(orphans.begin(), orphans.end());
    for (int p : orphans) assign(p, first_new, faces_.size());
  }

  ConvexHull extract() const {
    ConvexHull h;
    std::vector<int> remap(pts_.size(), -1);
    for (const auto& f : faces_) {
      if (!f.alive) continue;
      for (int v : f.v) remap[static_cast<std::size_t>(v)] = 0;
    }
    for (std::size_t i = 0; i < pts_.size(); ++i) {
      if (remap[i] == 0) {
        remap[i] = static_cast<int>(h.vertices.size());
        h.vertices.push_back(pts_[i]);
      }
    }
    for (const auto& f : faces_) {
      if (!f.alive) continue;
      h.faces.push_back({remap[static_cast<std::size_t>(f.v[0])], remap[static_cast<std::size_t>(f.v[1])],
                         remap[static_cast<std::size_t>(f.v[2])]});
    }
    return h;
  }

  std::vector<Vec3> pts_;
  double eps_;
  std::vector<HullFace> faces_;
  std::unordered_map<std::uint64_t, int> edges_;  // directed edge -> face
};

void compute_planes(ConvexHull& h) {
  h.normals.clear();
  h.offsets.clear();
  for (const auto& f : h.faces) {
    const Vec3 a = h.vertices[static_cast<std::size_t>(f[0])];
    const Vec3 n = normalized(cross(h.vertices[static_cast<std::size_t>(f[1])] - a,
                                    h.vertices[static_cast<std::size_t>(f[2])] - a));
    h.normals.push_back(n);
    h.offsets.push_back(dot(n, a));
  }
}

}  // namespace

double ConvexHull::volume() const {
  if (vertices.empty()) return 0.0;
  const Vec3 o = vertices.front();
  double v = 0.0;
  for (const auto& f : faces) {
    v += dot(vertices[static_cast<std::size_t>(f[0])] - o,
             cross(vertices[static_cast<std::size_t>(f[1])] - o, vertices[static_cast<std::size_t>(f[2])] - o));
  }
  return v / 6.0;
}

double ConvexHull::bbox_diagonal() const {
  if (vertices.empty()) return 0.0;
  Vec3 lo = vertices.front(), hi = lo;
  for (const auto& p : vertices) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  }
  return norm(hi - lo);
}

bool ConvexHull::contains(Vec3 p, double tolerance) const {
  for (std::size_t i = 0; i < faces.size(); ++i) {
    if (dot(normals[i], p) > offsets[i] + tolerance) return false;
  }
  return true;
}

ConvexHull convex_hull(std::span<const Vec3> points) {
  std::vector<Vec3> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), lex_less);
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  bool lattice = true;
  double max_abs = 0.0;
  for (const auto& p : pts) {
    for (int a = 0; a < 3; ++a) {
      const double c = p[a];
      if (!std::isfinite(c)) throw Error(ErrorKind::InvalidArgument, "non-finite hull input");
      max_abs = std::max(max_abs, std::abs(c));
      if (c != std::floor(c) || std::abs(c) >= 4096.0) lattice = false;
    }
  }
  // Unnormalized plane distances are exact for small integers; otherwise
  // allow a few ulps of the coordinate scale.
  const double eps = lattice ? 0.0 : 1e-12 * std::max(1.0, max_abs);
  ConvexHull h = QuickHull(std::move(pts), eps).run();
  compute_planes(h);
  return h;
}

ConvexHull scaled(const ConvexHull& h, Vec3 factors) {
  ConvexHull out;
  out.faces = h.faces;
  out.vertices.reserve(h.vertices.size());
  for (const auto& v : h.vertices) out.vertices.push_back(scale(v, factors));
  compute_planes(out);
  return out;
}

double hull_diameter(const ConvexHull& h) {
  double best = 0.0;
  for (std::size_t i = 0; i < h.vertices.size(); ++i)
    for (std::size_t j = i + 1; j < h.vertices.size(); ++j)
      best = std::max(best, squared_norm(h.vertices[i] - h.vertices[j]));
  return std::sqrt(best);
}

Vec3 closest_point_on_triangle(Vec3 p, Vec3 a, Vec3 b, Vec3 c) {
  // Voronoi-region walk over vertices, edges and the face interior.
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = dot(ab, ap), d2 = dot(ac, ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;
  const Vec3 bp = p - b;
  const double d3 = dot(ab, bp), d4 = dot(ac, bp);
  if (d3 >= 0.0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;
  const Vec3 cp = p - c;
  const double d5 = dot(ab, cp), d6 = dot(ac, cp);
  if (d6 >= 0.0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  }
  const double denom = 1.0 / (va + vb + vc);
  return a + (vb * denom) * ab + (vc * denom) * ac;
}

double distance_to_hull(const ConvexHull& h, Vec3 p) {
  bool inside = true;
  for (std::size_t i = 0; i < h.faces.size() && inside; ++i) inside = dot(h.normals[i], p) <= h.offsets[i];
  if (inside) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& f : h.faces) {
    const Vec3 q = closest_point_on_triangle(p, h.vertices[static_cast<std::size_t>(f[0])],
                                             h.vertices[static_cast<std::size_t>(f[1])],
                                             h.vertices[static_cast<std::size_t>(f[2])]);
    best = std::min(best, squared_norm(p - q));
  }
  return std::sqrt(best);
}

std::string to_obj(const ConvexHull& h) {
  std::string out;
  for (const auto& v : h.vertices) {
    out += "v " + format_double(v.x) + " " + format_double(v.y) + " " + format_double(v.z) + "\n";
  }
  for (const auto& f : h.faces) {
    out += "f " + std::to_string(f[0] + 1) + " " + std::to_string(f[1] + 1) + " " + std::to_string(f[2] + 1) + "\n";
  }
  return out;
}

}  // namespace corelr
