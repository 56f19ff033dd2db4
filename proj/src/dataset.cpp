#include "corelr/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "corelr/error.hpp"
#include "corelr/format.hpp"

namespace corelr {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s, const std::string& context) {
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw Error(ErrorKind::InvalidArgument, "bad number '" + s + "' in " + context);
  }
  return v;
}

}  // namespace

std::string_view feature_name(Feature f) {
  switch (f) {
    case Feature::BHcz: return "B_HCZ";
    case Feature::NLes: return "N_Les";
    case Feature::VLes: return "V_Les";
    case Feature::VLiv: return "V_Liv";
  }
  return "?";
}

std::string_view feature_column(Feature f) {
  switch (f) {
    case Feature::BHcz: return "b_hcz";
    case Feature::NLes: return "n_les";
    case Feature::VLes: return "v_les_mm3";
    case Feature::VLiv: return "v_liv_mm3";
  }
  return "?";
}

Feature parse_feature(std::string_view name) {
  const std::string n = lower(trim(name));
  for (Feature f : kAllFeatures) {
    if (n == lower(feature_name(f)) || n == feature_column(f)) return f;
  }
  if (n == "v_les") return Feature::VLes;
  if (n == "v_liv") return Feature::VLiv;
  throw Error(ErrorKind::InvalidArgument, "unknown feature '" + std::string(name) + "'");
}

FeatureSet make_feature_set(std::vector<Feature> features) {
  std::sort(features.begin(), features.end());
  features.erase(std::unique(features.begin(), features.end()), features.end());
  return features;
}

std::string feature_set_name(const FeatureSet& s) {
  std::string out;
  for (Feature f : s) {
    if (!out.empty()) out += "+";
    out += feature_name(f);
  }
  return out;
}

int binarize_score(int raw_score) { return raw_score > 5 ? 1 : 0; }

int Dataset::positives() const {
  int n = 0;
  for (const auto& r : records) n += r.label;
  return n;
}

Dataset read_dataset_csv(std::string_view text) {
  std::stringstream in{std::string(text)};
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) {
      header = split(trim(line));
      break;
    }
  }
  if (header.empty()) throw Error(ErrorKind::EmptyDataset, "dataset CSV has no header");
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[lower(header[i])] = i;
  auto need = [&](const std::string& name) {
    auto it = col.find(name);
    if (it == col.end()) throw Error(ErrorKind::InvalidArgument, "dataset CSV missing column '" + name + "'");
    return it->second;
  };
  const std::size_t id_col = need("case_id");
  constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);
  auto optional_col = [&](const std::string& name) {
    auto it = col.find(name);
    return it == col.end() ? kAbsent : it->second;
  };
  std::array<std::size_t, 4> fcol{};
  for (Feature f : kAllFeatures) fcol[static_cast<std::size_t>(f)] = optional_col(std::string(feature_column(f)));
  const auto raw_it = col.find("raw_score");
  const std::size_t label_col = raw_it == col.end() ? need("label") : optional_col("label");

  Dataset d;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split(trim(line));
    auto cell = [&](std::size_t i) -> std::string { return i < cells.size() ? cells[i] : std::string(); };
    CaseRecord r;
    r.case_id = cell(id_col);
    if (r.case_id.empty()) throw Error(ErrorKind::InvalidArgument, "empty case_id");
    if (!seen.insert(r.case_id).second) throw Error(ErrorKind::InvalidArgument, "duplicate case_id " + r.case_id);
    for (Feature f : kAllFeatures) {
      r.features[static_cast<std::size_t>(f)] = parse_number(cell(fcol[static_cast<std::size_t>(f)]), r.case_id);
    }
    if (raw_it != col.end() && !cell(raw_it->second).empty()) {
      const double raw = parse_number(cell(raw_it->second), r.case_id);
      if (raw != std::floor(raw)) throw Error(ErrorKind::InvalidArgument, "raw_score must be an integer");
      r.raw_score = static_cast<int>(raw);
    }
    const std::string lab = cell(label_col);
    if (lab.empty()) {
      if (!r.raw_score) throw Error(ErrorKind::InvalidArgument, "case " + r.case_id + " has neither label nor raw_score");
      r.label = binarize_score(*r.raw_score);
    } else {
      if (lab != "0" && lab != "1") throw Error(ErrorKind::InvalidArgument, "label must be 0 or 1");
      r.label = lab == "1" ? 1 : 0;
      if (r.raw_score && binarize_score(*r.raw_score) != r.label) {
        throw Error(ErrorKind::InvalidArgument, "case " + r.case_id + ": label disagrees with raw_score");
      }
    }
    d.records.push_back(std::move(r));
  }
  return d;
}

std::string write_dataset_csv(const Dataset& d) {
  std::string out = "case_id,b_hcz,n_les,v_les_mm3,v_liv_mm3,raw_score,label\n";
  for (const auto& r : d.records) {
    out += r.case_id;
    for (Feature f : kAllFeatures) {
      const double v = r.feature(f);
      out += ",";
      if (std::isfinite(v)) out += format_double(v);
    }
    out += ",";
    if (r.raw_score) out += std::to_string(*r.raw_score);
    out += "," + std::to_string(r.label) + "\n";
  }
  return out;
}

}  // namespace corelr
