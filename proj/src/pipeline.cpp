#include "corelr/pipeline.hpp"

#include <algorithm>

#include "corelr/json_io.hpp"
#include "corelr/nrrd.hpp"

namespace corelr {

namespace {

bool soft_failure(ErrorKind k) {
  return k == ErrorKind::InsufficientPersistentComponents || k == ErrorKind::NoDegreeOneVertex ||
         k == ErrorKind::RootDegreeNotOne || k == ErrorKind::DegenerateHull;
}

}  // namespace

PruneResult run_prune(const BinaryMask& vessels, const PipelineConfig& config) {
  PruneResult r;
  r.skeleton = attach_radii(skeletonize(vessels), edt(vessels));
  r.graph = build_graph(r.skeleton);
  r.branches = decompose_branches(r.graph);
  r.entries = find_entries(vessels, r.graph);
  r.forest = prune_both(r.graph, r.branches, r.entries, config.prune);
  std::vector<RadiusPoint> points;
  for (int v : retained_vertices(r.forest, r.branches, config.drop_noise_branches)) {
    points.push_back({r.graph.vertex(v).voxel, r.graph.vertex(v).radius});
  }
  r.reconstructed = reconstruct(points, vessels, config.dilation);
  return r;
}

std::string branch_report_json(const PruneResult& r, const PipelineConfig& config) {
  Json j;
  j["bif_max"] = config.prune.bif_max;
  j["r_max"] = config.prune.r_max;
  j["drop_noise_branches"] = config.drop_noise_branches;
  j["vertices"] = r.graph.vertex_count();
  j["edges"] = r.graph.edge_count();
  Json entries = Json::array();
  const std::pair<int, int> ids[2] = {{r.entries.first, r.entries.persistence_first},
                                      {r.entries.second, r.entries.persistence_second}};
  for (const auto& [v, persistence] : ids) {
    entries.push_back({{"vertex", v}, {"voxel", r.graph.vertex(v).voxel}, {"persistence", persistence}});
  }
  j["entries"] = entries;

  std::vector<const BranchTag*> tag(r.branches.branches.size(), nullptr);
  std::vector<int> tree(r.branches.branches.size(), -1);
  const PrunedTree* trees[2] = {&r.forest.first, &r.forest.second};
  for (int t = 1; t >= 0; --t)
    for (const auto& b : trees[t]->branches) {
      tag[static_cast<std::size_t>(b.branch)] = &b;
      tree[static_cast<std::size_t>(b.branch)] = t;
    }
  Json branches = Json::array();
  for (const auto& b : r.branches.branches) {
    Json e;
    e["id"] = b.id;
    e["start"] = b.start();
    e["end"] = b.end();
    e["edges"] = b.edge_count();
    e["len_mm"] = b.length;
    e["rad_mm"] = b.radius;
    const BranchTag* t = tag[static_cast<std::size_t>(b.id)];
    e["tag"] = t == nullptr ? "pruned" : (t->noise ? "noise" : "trunk");
    if (t) {
      e["level"] = t->level;
      e["tree"] = tree[static_cast<std::size_t>(b.id)];
    }
    branches.push_back(e);
  }
  j["branches"] = branches;
  return dump_json(j);
}

std::string biomarker_json(const std::string& case_id, const BiomarkerVector& b, const Hcz* hcz) {
  Json j;
  j["case_id"] = case_id;
  j["v_liv_mm3"] = b.v_liv_mm3;
  j["n_les"] = b.n_les;
  j["v_les_mm3"] = b.v_les_mm3;
  if (b.b_hcz) {
    j["b_hcz"] = *b.b_hcz;
    j["b_hcz_percent"] = *b.b_hcz * 100.0;
  } else {
    j["b_hcz"] = nullptr;
    j["b_hcz_percent"] = nullptr;
  }
  if (hcz) {
    j["hcz_volume_mm3"] = hcz->volume_mm3;
    j["hcz_diameter_mm"] = hcz->diameter_mm;
  }
  j["flags"] = b.flags;
  return dump_json(j);
}

CaseResult run_pipeline(const LabelVolume& volume, const std::string& case_id, const PipelineConfig& config) {
  CaseResult out;
  out.case_id = case_id;
  const BinaryMask vessels = extract_mask(volume, kVessel);
  if (config.dumps) out.files["vessels.nrrd"] = write_nrrd(vessels);

  std::string failure;
  try {
    PruneResult pr = run_prune(vessels, config);
    if (config.dumps) {
      out.files["skeleton.nrrd"] = write_nrrd(pr.skeleton.to_mask());
      out.files["graph.txt"] = graph_to_text(pr.graph);
      out.files["branches.json"] = branch_report_json(pr, config);
      out.files["pruned.nrrd"] = write_nrrd(pr.reconstructed);
    }
    BinaryMask liver;
    if (config.clip_to_liver) liver = extract_mask(volume, kLiverUnion);
    out.hcz = build_hcz(pr.reconstructed, config.clip_to_liver ? &liver : nullptr);
    if (config.dumps) {
      out.files["hcz.nrrd"] = write_nrrd(out.hcz->mask);
      out.files["hcz.obj"] = to_obj(out.hcz->hull);
    }
  } catch (const Error& e) {
    if (!soft_failure(e.kind())) throw;
    failure = to_string(e.kind());
  }

  out.biomarkers = compute_biomarkers(volume, out.hcz ? &*out.hcz : nullptr, config.biomarkers);
  auto& flags = out.biomarkers.flags;
  if (!failure.empty() && std::find(flags.begin(), flags.end(), failure) == flags.end()) flags.push_back(failure);
  out.files["biomarkers.json"] = biomarker_json(case_id, out.biomarkers, out.hcz ? &*out.hcz : nullptr);
  return out;
}

}  // namespace corelr
