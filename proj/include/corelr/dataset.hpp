#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace corelr {

/// Biomarker features in their fixed canonical order.
enum class Feature { BHcz = 0, NLes = 1, VLes = 2, VLiv = 3 };

inline constexpr std::array<Feature, 4> kAllFeatures = {Feature::BHcz, Feature::NLes, Feature::VLes, Feature::VLiv};

/// Display name: B_HCZ, N_Les, V_Les, V_Liv.
std::string_view feature_name(Feature f);
/// CSV column: b_hcz, n_les, v_les_mm3, v_liv_mm3.
std::string_view feature_column(Feature f);
/// Accepts either spelling, case-insensitive.
Feature parse_feature(std::string_view name);

/// Canonically ordered, duplicate-free feature subset.
using FeatureSet = std::vector<Feature>;
FeatureSet make_feature_set(std::vector<Feature> features);
std::string feature_set_name(const FeatureSet& s);  // e.g. "B_HCZ+N_Les"

/// Complexity is a score on a 1-10 scale; above 5 counts as complex.
int binarize_score(int raw_score);

struct CaseRecord {
  std::string case_id;
  std::array<double, 4> features{};  // indexed by Feature
  std::optional<int> raw_score;
  int label = 0;

  double feature(Feature f) const { return features[static_cast<std::size_t>(f)]; }
};

struct Dataset {
  std::vector<CaseRecord> records;

  std::size_t size() const { return records.size(); }
  int positives() const;
};

/// Header: case_id, b_hcz, n_les, v_les_mm3, v_liv_mm3, [raw_score], label.
/// Column order is free. An empty or absent label is derived from raw_score;
/// when both are given they must agree. Empty or absent feature cells read
/// as NaN.
Dataset read_dataset_csv(std::string_view text);
std::string write_dataset_csv(const Dataset& d);

}  // namespace corelr
