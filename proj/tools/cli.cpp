#include "corelr/cli.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

#include "corelr/classifier.hpp"
#include "corelr/convex_hull.hpp"
#include "corelr/format.hpp"
#include "corelr/json_io.hpp"
#include "corelr/nrrd.hpp"
#include "corelr/phantom.hpp"
#include "corelr/pipeline.hpp"

namespace fs = std::filesystem;

namespace corelr {

namespace {

struct Options {
  int threads = 0;
  bool quiet = false;
  std::string label_map;
  PipelineConfig pipeline;
  std::string dilation = "radius";
  bool no_standardize = false;
  double lambda = 1.0;
};

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::InsufficientPersistentComponents:
    case ErrorKind::NoDegreeOneVertex:
    case ErrorKind::RootDegreeNotOne:
    case ErrorKind::DegenerateHull:
    case ErrorKind::EmptyLesion:
    case ErrorKind::EmptyHcz:
      return 3;
    default:
      return 2;
  }
}

void configure_threads(int requested) {
  // Captured before the first omp_set_num_threads so repeated calls in one
  // process see the runtime default, not the previous setting.
  static const int runtime_default = omp_get_max_threads();
  int n = requested > 0 ? requested : runtime_default;
  if (const char* env = std::getenv("CORE_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  omp_set_num_threads(std::max(1, n));
}

std::map<int, int> parse_label_map(const std::string& text) {
  std::map<int, int> m;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find_first_of("=:");
    if (eq == std::string::npos) throw Error(ErrorKind::InvalidArgument, "label map entry '" + item + "'");
    try {
      m[std::stoi(item.substr(0, eq))] = std::stoi(item.substr(eq + 1));
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::InvalidArgument, "label map entry '" + item + "'");
    }
  }
  return m;
}

LabelVolume load_labels(const fs::path& path, const std::string& label_map) {
  if (label_map.empty()) return read_label_volume(read_file(path));
  VoxelGrid<std::uint8_t> raw = read_nrrd(read_file(path));
  const auto m = parse_label_map(label_map);
  for (auto& v : raw.data()) {
    const auto it = m.find(v);
    if (it != m.end()) v = static_cast<std::uint8_t>(it->second);
  }
  return LabelVolume(raw.dims(), raw.spacing(), std::vector<std::uint8_t>(raw.data().begin(), raw.data().end()));
}

/// A label volume's vessel label, or a 0/1 mask as is.
BinaryMask load_vessels(const fs::path& path, const std::string& label_map) {
  const LabelVolume v = load_labels(path, label_map);
  for (auto x : v.data())
    if (x > 1) return extract_mask(v, kVessel);
  return BinaryMask(v.dims(), v.spacing(), std::vector<std::uint8_t>(v.data().begin(), v.data().end()));
}

void write_out(const fs::path& path, std::string_view bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_file_atomic(path, bytes);
}

FeatureSet parse_features(const std::vector<std::string>& names) {
  if (names.empty()) return FeatureSet(kAllFeatures.begin(), kAllFeatures.end());
  std::vector<Feature> f;
  for (const auto& n : names) f.push_back(parse_feature(n));
  return make_feature_set(f);
}

FitOptions fit_options(const Options& o) {
  FitOptions f;
  f.lambda = o.lambda;
  f.standardize = !o.no_standardize;
  return f;
}

std::string opt_number(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

Json report_json(const EvalReport& r, const Dataset& d) {
  Json j;
  j["features"] = feature_set_name(r.features);
  j["accuracy"] = r.accuracy;
  j["f1"] = r.f1;
  j["auc"] = r.auc ? Json(*r.auc) : Json(nullptr);
  j["confusion"] = {{"tp", r.tp}, {"fp", r.fp}, {"tn", r.tn}, {"fn", r.fn}};
  Json probs = Json::array();
  for (std::size_t i = 0; i < d.size(); ++i) {
    probs.push_back({{"case_id", d.records[i].case_id}, {"label", d.records[i].label}, {"p", r.probabilities[i]}});
  }
  j["predictions"] = probs;
  return j;
}

Json truth_json(const PhantomTruth& t) {
  Json j;
  Json branches = Json::array();
  for (const auto& b : t.branches) {
    branches.push_back({{"tree", b.tree},
                        {"generation", b.generation},
                        {"spur", b.spur},
                        {"start", vec_json(b.start)},
                        {"end", vec_json(b.end)},
                        {"radius_mm", b.radius},
                        {"length_mm", b.length()}});
  }
  j["branches"] = branches;
  j["entries"] = Json::array({vec_json(t.entries[0]), vec_json(t.entries[1])});
  j["liver_center"] = vec_json(t.liver_center);
  const ConvexHull core = convex_hull(analytic_core_points(t));
  Json lesions = Json::array();
  for (const auto& l : t.lesions) {
    const double d = distance_to_hull(core, l.center);
    Json e{{"center", vec_json(l.center)}, {"radius_mm", l.radius}, {"core_distance_mm", d}};
    e["core_hull"] = d <= l.radius ? "overlaps" : "outside";
    lesions.push_back(e);
  }
  j["lesions"] = lesions;
  j["attempts"] = t.attempts;
  return j;
}

std::vector<fs::path> collect_inputs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    const fs::path p(in);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(p))
        if (e.is_regular_file() && e.path().extension() == ".nrrd") found.push_back(e.path());
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(p);
    }
  }
  if (files.empty()) throw Error(ErrorKind::Io, "no input volumes");
  return files;
}

void cmd_run(const Options& o, const std::vector<std::string>& inputs, const fs::path& out,
             const std::string& labels_csv) {
  const auto files = collect_inputs(inputs);
  PipelineConfig cfg = o.pipeline;
  cfg.dumps = !o.quiet;
  std::vector<CaseResult> results(files.size());
  std::vector<std::exception_ptr> errors(files.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t i = 0; i < files.size(); ++i) {
    const std::string id = files[i].stem().string();
    try {
      results[i] = run_pipeline(load_labels(files[i], o.label_map), id, cfg);
      for (const auto& [name, bytes] : results[i].files) write_out(out / id / name, bytes);
    } catch (const Error& e) {
      errors[i] = std::make_exception_ptr(Error(e.kind(), id + ": " + e.what()));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  if (!labels_csv.empty()) {
    const Dataset labels = read_dataset_csv(read_file(labels_csv));
    std::map<std::string, const CaseRecord*> by_id;
    for (const auto& r : labels.records) by_id[r.case_id] = &r;
    Dataset d;
    for (const auto& r : results) {
      const auto it = by_id.find(r.case_id);
      if (it == by_id.end()) throw Error(ErrorKind::InvalidArgument, "no label for case " + r.case_id);
      CaseRecord rec = *it->second;
      const auto& b = r.biomarkers;
      rec.features = {b.b_hcz ? *b.b_hcz : std::nan(""), double(b.n_les), b.v_les_mm3, b.v_liv_mm3};
      d.records.push_back(rec);
    }
    write_out(out / "dataset.csv", write_dataset_csv(d));
  }
}

void cmd_prune(const Options& o, const fs::path& input, const fs::path& out) {
  const BinaryMask vessels = load_vessels(input, o.label_map);
  const PruneResult r = run_prune(vessels, o.pipeline);
  write_out(out / "pruned.nrrd", write_nrrd(r.reconstructed));
  write_out(out / "branches.json", branch_report_json(r, o.pipeline));
  if (!o.quiet) {
    write_out(out / "skeleton.nrrd", write_nrrd(r.skeleton.to_mask()));
    write_out(out / "graph.txt", graph_to_text(r.graph));
  }
}

void cmd_hcz(const Options& o, const fs::path& input, const std::string& clip, const fs::path& out) {
  const BinaryMask vessels = load_vessels(input, o.label_map);
  BinaryMask liver;
  if (!clip.empty()) liver = extract_mask(load_labels(clip, o.label_map), kLiverUnion);
  const Hcz h = build_hcz(vessels, clip.empty() ? nullptr : &liver);
  write_out(out / "hcz.nrrd", write_nrrd(h.mask));
  write_out(out / "hcz.obj", to_obj(h.hull));
  Json j{{"volume_mm3", h.volume_mm3},
         {"diameter_mm", h.diameter_mm},
         {"hull_vertices", h.hull.vertices.size()},
         {"hull_faces", h.hull.faces.size()},
         {"voxels", h.mask.count()}};
  write_out(out / "hcz.json", dump_json(j));
}

void cmd_biomarkers(const Options& o, const fs::path& volume, const std::string& hcz_path, const fs::path& out) {
  const LabelVolume v = load_labels(volume, o.label_map);
  std::optional<Hcz> h;
  if (!hcz_path.empty()) {
    const BinaryMask m = read_mask(read_file(hcz_path));
    if (!m.same_geometry(v)) throw Error(ErrorKind::DimsMismatch, "HCZ mask and volume differ in geometry");
    if (!m.empty()) {
      h = Hcz{mask_hull(m), m, voxel_volume(m) * static_cast<double>(m.count()), 0.0};
      h->diameter_mm = hull_diameter(h->hull);
    }
  }
  const BiomarkerVector b = compute_biomarkers(v, h ? &*h : nullptr, o.pipeline.biomarkers);
  const std::string text = biomarker_json(volume.stem().string(), b, h ? &*h : nullptr);
  if (out.empty()) std::cout << text;
  else write_out(out, text);
}

void cmd_fit(const Options& o, const fs::path& dataset, const std::vector<std::string>& features,
             const fs::path& out) {
  const Dataset d = read_dataset_csv(read_file(dataset));
  const LogisticModel m = fit(d, parse_features(features), fit_options(o));
  Json j;
  Json keys = Json::array();
  for (Feature f : m.features) keys.push_back(feature_name(f));
  j["features"] = keys;
  j["weights"] = m.weights;
  j["intercept"] = m.intercept;
  j["means"] = m.means;
  j["scales"] = m.scales;
  j["lambda"] = m.lambda;
  j["standardize"] = !o.no_standardize;
  j["iterations"] = m.iterations;
  j["gradient_norm"] = m.gradient_norm;
  j["objective"] = m.objective_trace.back();
  const std::string text = dump_json(j);
  if (out.empty()) std::cout << text;
  else write_out(out, text);
}

void cmd_evaluate(const Options& o, const fs::path& dataset, const std::vector<std::string>& features,
                  const fs::path& out) {
  const Dataset d = read_dataset_csv(read_file(dataset));
  const EvalReport r = loo_evaluate(d, parse_features(features), fit_options(o));
  const std::string text = dump_json(report_json(r, d));
  if (out.empty()) std::cout << text;
  else write_out(out, text);
}

void cmd_ablate(const Options& o, const fs::path& dataset, const std::vector<std::string>& features,
                const fs::path& out) {
  const Dataset d = read_dataset_csv(read_file(dataset));
  const AblationResult a = ablate(d, parse_features(features), fit_options(o));
  std::string csv = "features,B_HCZ,N_Les,V_Les,V_Liv,accuracy,f1,auc\n";
  for (const auto& r : a.grid) {
    csv += feature_set_name(r.features);
    for (Feature f : kAllFeatures) {
      csv += std::find(r.features.begin(), r.features.end(), f) != r.features.end() ? ",1" : ",0";
    }
    csv += "," + format_double(r.accuracy) + "," + format_double(r.f1) + "," + opt_number(r.auc) + "\n";
  }
  Json j;
  j["rule"] = kEliminationRule;
  Json path = Json::array();
  for (const auto& s : a.path) path.push_back(feature_set_name(s));
  j["path"] = path;
  Json elim = Json::array();
  for (Feature f : a.eliminated) elim.push_back(feature_name(f));
  j["eliminated"] = elim;
  write_out(out / "ablation.csv", csv);
  write_out(out / "ablation.json", dump_json(j));
}

void cmd_roc(const Options& o, const fs::path& dataset, const std::vector<std::string>& features,
             const fs::path& out) {
  const Dataset d = read_dataset_csv(read_file(dataset));
  const EvalReport r = loo_evaluate(d, parse_features(features), fit_options(o));
  std::vector<int> labels;
  for (const auto& rec : d.records) labels.push_back(rec.label);
  std::string csv = "fpr,tpr,threshold\n";
  for (const auto& p : roc_curve(r.probabilities, labels)) {
    csv += format_double(p.fpr) + "," + format_double(p.tpr) + "," +
           (std::isinf(p.threshold) ? std::string("inf") : format_double(p.threshold)) + "\n";
  }
  if (out.empty()) std::cout << csv;
  else write_out(out, csv);
}

void cmd_phantom(int n, std::uint64_t seed, double inside, double near, const fs::path& out) {
  const auto cases = generate_dataset(n, seed, DifficultyMix{inside, near});
  std::string labels = "case_id,raw_score,label\n";
  for (const auto& c : cases) {
    write_out(out / (c.case_id + ".nrrd"), write_nrrd(c.volume));
    Json t = truth_json(c.truth);
    t["placement"] = std::string(to_string(c.placement));
    t["lesion_volume_mm3"] = c.lesion_volume_mm3;
    t["label"] = c.label;
    write_out(out / "truth" / (c.case_id + ".json"), dump_json(t));
    labels += c.case_id + "," + std::to_string(c.raw_score) + "," + std::to_string(c.label) + "\n";
  }
  write_out(out / "labels.csv", labels);
}

void cmd_export_mesh(const Options& o, const fs::path& input, const fs::path& out) {
  const BinaryMask m = load_vessels(input, o.label_map);
  const std::string obj = to_obj(mask_hull(m));
  if (out.empty()) std::cout << obj;
  else write_out(out, obj);
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Liver resection complexity: vessel pruning, central-zone hull, biomarkers, classifier"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--threads", o.threads, "Worker threads (capped by CORE_THREADS)")->check(CLI::NonNegativeNumber);
  app.add_flag("--quiet", o.quiet, "Skip intermediate artifacts");
  app.add_option("--label-map", o.label_map, "Relabel raw values before use, e.g. 4=3,5=2");

  auto add_pipeline = [&](CLI::App* c) {
    c->add_option("--bif-max", o.pipeline.prune.bif_max, "Relevant junctions followed from each entry")
        ->check(CLI::NonNegativeNumber);
    c->add_option("--r-max", o.pipeline.prune.r_max, "Noise ratio for child vs parent length and radius")
        ->check(CLI::Range(0.0, 1.0));
    c->add_flag("--drop-noise-branches", o.pipeline.drop_noise_branches, "Exclude noise branches from reconstruction");
    c->add_option("--dilation", o.dilation, "Reconstruction ball size")
        ->check(CLI::IsMember({"radius", "diameter"}));
  };
  auto add_model = [&](CLI::App* c, std::vector<std::string>& features) {
    c->add_option("--features", features, "Feature subset (default: all)")->delimiter(',');
    c->add_option("--lambda", o.lambda, "L2 strength")->check(CLI::NonNegativeNumber);
    c->add_flag("--no-standardize", o.no_standardize, "Use raw feature values");
  };

  std::vector<std::string> inputs, features;
  std::string input, out, labels, clip, hcz_path, dataset;
  int n = 60;
  std::uint64_t seed = 1;
  double inside = 0.45, near = 0.25;

  auto* run = app.add_subcommand("run", "Full pipeline on label volumes (files or directories)");
  run->add_option("inputs", inputs, "Label volumes")->required();
  run->add_option("--out", out, "Output directory")->required();
  run->add_option("--labels", labels, "CSV with case_id and raw_score/label; writes dataset.csv");
  run->add_flag("--clip-to-liver", o.pipeline.clip_to_liver, "Intersect the HCZ with the liver");
  run->add_option("--min-lesion-voxels", o.pipeline.biomarkers.min_lesion_voxels, "Smaller lesions are ignored")
      ->check(CLI::PositiveNumber);
  add_pipeline(run);

  auto* prune = app.add_subcommand("prune", "Skeleton, graph and pruning of the vessel tree");
  prune->add_option("input", input, "Label volume or vessel mask")->required();
  prune->add_option("--out", out, "Output directory")->required();
  add_pipeline(prune);

  auto* hcz = app.add_subcommand("hcz", "Convex hull of a vessel mask and its voxelization");
  hcz->add_option("input", input, "Vessel mask (or label volume)")->required();
  hcz->add_option("--clip", clip, "Label volume whose liver clips the HCZ");
  hcz->add_option("--out", out, "Output directory")->required();

  auto* bio = app.add_subcommand("biomarkers", "Biomarkers from a label volume and an HCZ mask");
  bio->add_option("input", input, "Label volume")->required();
  bio->add_option("--hcz", hcz_path, "HCZ mask");
  bio->add_option("--min-lesion-voxels", o.pipeline.biomarkers.min_lesion_voxels, "Smaller lesions are ignored")
      ->check(CLI::PositiveNumber);
  bio->add_option("--out", out, "Output JSON (default: stdout)");

  auto* fitc = app.add_subcommand("fit", "Fit the logistic model");
  fitc->add_option("dataset", dataset, "Dataset CSV")->required();
  fitc->add_option("--out", out, "Output JSON (default: stdout)");
  add_model(fitc, features);

  auto* eval = app.add_subcommand("evaluate", "Leave-one-out evaluation");
  eval->add_option("dataset", dataset, "Dataset CSV")->required();
  eval->add_option("--out", out, "Output JSON (default: stdout)");
  add_model(eval, features);

  auto* abl = app.add_subcommand("ablate", "Backward feature elimination plus single-feature subsets");
  abl->add_option("dataset", dataset, "Dataset CSV")->required();
  abl->add_option("--out", out, "Output directory")->required();
  add_model(abl, features);

  auto* roc = app.add_subcommand("roc", "ROC curve of leave-one-out probabilities");
  roc->add_option("dataset", dataset, "Dataset CSV")->required();
  roc->add_option("--out", out, "Output CSV (default: stdout)");
  add_model(roc, features);

  auto* ph = app.add_subcommand("phantom", "Synthetic labeled cases");
  ph->add_option("--n", n, "Number of cases")->check(CLI::Range(2, 100000));
  ph->add_option("--seed", seed, "Seed");
  ph->add_option("--inside", inside, "Fraction of central lesions")->check(CLI::Range(0.0, 1.0));
  ph->add_option("--near", near, "Fraction of lesions just outside the core")->check(CLI::Range(0.0, 1.0));
  ph->add_option("--out", out, "Output directory")->required();

  auto* mesh = app.add_subcommand("export-mesh", "OBJ hull of a mask");
  mesh->add_option("input", input, "Mask")->required();
  mesh->add_option("--out", out, "Output OBJ (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    configure_threads(o.threads);
    o.pipeline.dilation = o.dilation == "diameter" ? DilationMode::Diameter : DilationMode::Radius;
    if (run->parsed()) cmd_run(o, inputs, out, labels);
    else if (prune->parsed()) cmd_prune(o, input, out);
    else if (hcz->parsed()) cmd_hcz(o, input, clip, out);
    else if (bio->parsed()) cmd_biomarkers(o, input, hcz_path, out);
    else if (fitc->parsed()) cmd_fit(o, dataset, features, out);
    else if (eval->parsed()) cmd_evaluate(o, dataset, features, out);
    else if (abl->parsed()) cmd_ablate(o, dataset, features, out);
    else if (roc->parsed()) cmd_roc(o, dataset, features, out);
    else if (ph->parsed()) {
      if (inside + near > 1.0) throw Error(ErrorKind::InvalidArgument, "--inside plus --near exceeds 1");
      cmd_phantom(n, seed, inside, near, out);
    } else if (mesh->parsed()) cmd_export_mesh(o, input, out);
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace corelr
