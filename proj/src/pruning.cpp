#include "corelr/pruning.hpp"

#include <algorithm>
#include <limits>
#include <map>

namespace corelr {

namespace {

struct Lineage {
  int ancestor = 0;
  int last_step = 0;
  Vec3 centroid;
};

int nearest_vertex(const VesselGraph& g, Vec3 p, bool degree_one_only, int exclude) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int v = 0; v < g.vertex_count(); ++v) {
    if (v == exclude) continue;
    if (degree_one_only && g.degree(v) != 1) continue;
    const double d = squared_norm(g.vertex(v).position - p);
    if (d < best_d) {
      best_d = d;
      best = v;
    }
  }
  return best;
}

}  // namespace

EntryPoints find_entries(const BinaryMask& vessel_mask, const VesselGraph& g) {
  BinaryMask current = vessel_mask;
  ComponentLabeling prev = connected_components(current, 26);
  std::vector<Lineage> lineages;
  std::vector<int> lineage_of;  // per component id - 1
  for (int c = 0; c < prev.count; ++c) {
    lineages.push_back({c, 0, prev.centroids[static_cast<std::size_t>(c)]});
    lineage_of.push_back(c);
  }

  for (int step = 1;; ++step) {
    current = erode(current);
    if (current.empty()) break;
    ComponentLabeling next = connected_components(current, 26);
    std::map<int, std::vector<int>> children;  // parent id -> child ids
    for (int c = 0; c < next.count; ++c) {
      const int parent = prev.labels[next.first_voxel[static_cast<std::size_t>(c)]];
      children[parent].push_back(c);
    }
    std::vector<int> next_lineage(static_cast<std::size_t>(next.count), -1);
    for (const auto& [parent, kids] : children) {
      int heir = kids.front();
      for (int k : kids) {
        const auto sk = next.sizes[static_cast<std::size_t>(k)];
        const auto sh = next.sizes[static_cast<std::size_t>(heir)];
        // kids are in first-voxel order, so strict > keeps the earliest on ties
        if (sk > sh) heir = k;
      }
      const int parent_lineage = lineage_of[static_cast<std::size_t>(parent - 1)];
      for (int k : kids) {
        int lin = parent_lineage;
        if (k != heir) {
          lin = static_cast<int>(lineages.size());
          lineages.push_back({lineages[static_cast<std::size_t>(parent_lineage)].ancestor, step, {}});
        }
        lineages[static_cast<std::size_t>(lin)].last_step = step;
        lineages[static_cast<std::size_t>(lin)].centroid = next.centroids[static_cast<std::size_t>(k)];
        next_lineage[static_cast<std::size_t>(k)] = lin;
      }
    }
    prev = std::move(next);
    lineage_of = std::move(next_lineage);
  }

  // Best lineage per iteration-0 ancestor.
  std::map<int, int> best_of_ancestor;
  for (std::size_t i = 0; i < lineages.size(); ++i) {
    auto [it, inserted] = best_of_ancestor.emplace(lineages[i].ancestor, static_cast<int>(i));
    if (!inserted && lineages[i].last_step > lineages[static_cast<std::size_t>(it->second)].last_step) {
      it->second = static_cast<int>(i);
    }
  }
  if (best_of_ancestor.size() < 2) {
    throw Error(ErrorKind::InsufficientPersistentComponents,
                "found " + std::to_string(best_of_ancestor.size()) + " distinct vessel lineage(s), need 2");
  }
  std::vector<int> ranked;
  for (const auto& [anc, lin] : best_of_ancestor) ranked.push_back(lin);
  std::stable_sort(ranked.begin(), ranked.end(), [&](int a, int b) {
    return lineages[static_cast<std::size_t>(a)].last_step > lineages[static_cast<std::size_t>(b)].last_step;
  });

  EntryPoints e;
  const Lineage& l1 = lineages[static_cast<std::size_t>(ranked[0])];
  const Lineage& l2 = lineages[static_cast<std::size_t>(ranked[1])];
  e.persistence_first = l1.last_step;
  e.persistence_second = l2.last_step;
  e.core_first = l1.centroid;
  e.core_second = l2.centroid;

  auto entry_for = [&](Vec3 core, int exclude) {
    const int proj = nearest_vertex(g, core, false, -1);
    if (proj < 0) throw Error(ErrorKind::NoDegreeOneVertex, "empty vessel graph");
    const int tip = nearest_vertex(g, g.vertex(proj).position, true, exclude);
    if (tip < 0) throw Error(ErrorKind::NoDegreeOneVertex, "no degree-1 vertex available for an entry");
    return tip;
  };
  e.first = entry_for(l1.centroid, -1);
  e.second = entry_for(l2.centroid, e.first);
  return e;
}

PrunedTree prune(const VesselGraph& g, const BranchDecomposition& branches, int root, const PruneParams& params) {
  if (root < 0 || root >= g.vertex_count() || g.degree(root) != 1) {
    throw Error(ErrorKind::RootDegreeNotOne, "pruning root must be a degree-1 vertex");
  }
  const auto& bs = branches.branches;
  PrunedTree out;
  out.seed = root;
  out.visited.assign(static_cast<std::size_t>(g.vertex_count()), 0);

  struct Tag {
    bool set = false;
    bool noise = false;
    int level = 0;
  };
  std::vector<Tag> tags(bs.size());
  auto tag_branch = [&](int b, bool noise, int level) {
    auto& t = tags[static_cast<std::size_t>(b)];
    if (!t.set) t = {true, noise, level};
  };

  struct Frame {
    int v;
    int bif;
    double len;
    double rad;
    bool noise;  // tag applied to pass-through continuations
    bool expanded = false;
    std::size_t next = 0;
  };

  const int root_branch = branches.branch_of(g, root, g.neighbors(root).front());
  tag_branch(root_branch, false, 0);
  out.visited[static_cast<std::size_t>(root)] = 1;
  std::vector<Frame> stack;
  stack.push_back({root, 0, bs[static_cast<std::size_t>(root_branch)].length,
                   bs[static_cast<std::size_t>(root_branch)].radius, false});

  auto is_visited = [&](int w) { return out.visited[static_cast<std::size_t>(w)] != 0; };

  while (!stack.empty()) {
    Frame& f = stack.back();
    const auto& nbrs = g.neighbors(f.v);
    if (!f.expanded) {
      f.expanded = true;
      int unvisited = 0;
      int only = -1;
      for (int w : nbrs) {
        if (!is_visited(w)) {
          ++unvisited;
          only = w;
        }
      }
      if (f.bif == params.bif_max || unvisited == 0) {
        stack.pop_back();
        continue;
      }
      if (unvisited == 1) {
        // tail call: the continuation replaces this frame
        Frame child{only, f.bif, f.len, f.rad, f.noise};
        tag_branch(branches.branch_of(g, f.v, only), f.noise, f.bif);
        out.visited[static_cast<std::size_t>(only)] = 1;
        stack.back() = child;
        continue;
      }
    }
    while (f.next < nbrs.size() && is_visited(nbrs[f.next])) ++f.next;
    if (f.next == nbrs.size()) {
      stack.pop_back();
      continue;
    }
    const int w = nbrs[f.next++];
    const int b = branches.branch_of(g, f.v, w);
    const Branch& bw = bs[static_cast<std::size_t>(b)];
    Frame child{w, f.bif, f.len, f.rad, true};
    if (bw.length < params.r_max * f.len || bw.radius < params.r_max * f.rad) {
      tag_branch(b, true, f.bif);
    } else {
      child = Frame{w, f.bif + 1, bw.length, bw.radius, false};
      tag_branch(b, false, f.bif + 1);
    }
    out.visited[static_cast<std::size_t>(w)] = 1;
    stack.push_back(child);  // invalidates f
  }

  for (int v = 0; v < g.vertex_count(); ++v)
    if (out.visited[static_cast<std::size_t>(v)]) out.vertices.push_back(v);
  for (std::size_t b = 0; b < tags.size(); ++b)
    if (tags[b].set) out.branches.push_back({static_cast<int>(b), tags[b].noise, tags[b].level});
  return out;
}

PrunedForest prune_both(const VesselGraph& g, const BranchDecomposition& branches, const EntryPoints& entries,
                        const PruneParams& params) {
  PrunedForest out;
  out.first = prune(g, branches, entries.first, params);
  out.second = prune(g, branches, entries.second, params);
  std::set_union(out.first.vertices.begin(), out.first.vertices.end(), out.second.vertices.begin(),
                 out.second.vertices.end(), std::back_inserter(out.vertices));
  return out;
}

std::vector<int> retained_vertices(const PrunedForest& forest, const BranchDecomposition& branches,
                                   bool drop_noise) {
  if (!drop_noise) return forest.vertices;
  std::vector<int> out;
  for (const PrunedTree* t : {&forest.first, &forest.second}) {
    for (const auto& tag : t->branches) {
      if (tag.noise) continue;
      for (int v : branches.branches[static_cast<std::size_t>(tag.branch)].path) {
        if (t->visited[static_cast<std::size_t>(v)]) out.push_back(v);
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

BinaryMask reconstruct(std::span<const RadiusPoint> retained, const BinaryMask& original, DilationMode mode) {
  return mask_and(dilate_by_radii(retained, original, mode), original);
}

}  // namespace corelr
