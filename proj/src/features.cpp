#include "perfpred/features.hpp"

#include <algorithm>
#include <cmath>

#include "perfpred/csv.hpp"

namespace perfpred {

double data_size_feature(const LanguageRecord& record) {
  if (record.pretraining_tokens < 1)
    throw ValidationError("language '" + record.code + "' has pretraining_tokens < 1");
  return std::log10(static_cast<double>(record.pretraining_tokens));
}

TypologicalCatalog rank_typological_features(const LanguageRegistry& registry) {
  std::set<std::string> all;
  for (const auto& [code, rec] : registry.languages) all.insert(code);
  return rank_typological_features(registry, all);
}

TypologicalCatalog rank_typological_features(const LanguageRegistry& registry,
                                             const std::set<std::string>& language_subset) {
  const auto& ids = registry.catalog.feature_ids;
  if (ids.empty()) throw ValidationError("cannot rank an empty typological catalog");

  std::map<std::string, std::int64_t> mass;
  for (const auto& id : ids) mass[id] = 0;
  for (const auto& code : language_subset) {
    const LanguageRecord& rec = registry.at(code);
    for (const auto& f : rec.wals_features) {
      auto it = mass.find(f);
      if (it == mass.end())
        throw ValidationError("language '" + code + "' exhibits feature '" + f +
                              "' that is not in the typological catalog");
      it->second += rec.pretraining_tokens;
    }
  }

  // Stable sort keeps the catalog's canonical order as the tie-break.
  std::vector<int> order(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return mass.at(ids[static_cast<std::size_t>(a)]) >
           mass.at(ids[static_cast<std::size_t>(b)]);
  });

  TypologicalCatalog ranked;
  ranked.feature_ids = ids;
  for (std::size_t pos = 0; pos < order.size(); ++pos)
    ranked.ranks[ids[static_cast<std::size_t>(order[pos])]] = static_cast<int>(pos) + 1;
  return ranked;
}

double well_rep_feat(const LanguageRecord& record, const TypologicalCatalog& catalog) {
  if (record.wals_features.empty()) return 0.0;
  if (!catalog.ranked()) throw ValidationError("typological catalog is not ranked");
  double sum = 0.0;
  for (const auto& f : record.wals_features)
    sum += 1.0 / static_cast<double>(catalog.rank_of(f));
  return sum / static_cast<double>(record.wals_features.size());
}

double type_overlap(const LanguageRecord& target, const LanguageRecord& pivot,
                    std::int64_t min_count) {
  // Both maps are sorted by type; walk them together.
  auto it = target.type_counts.begin();
  auto jt = pivot.type_counts.begin();
  std::int64_t inter = 0, uni = 0;
  while (it != target.type_counts.end() || jt != pivot.type_counts.end()) {
    const bool a_ok = it != target.type_counts.end() && it->second >= min_count;
    const bool b_ok = jt != pivot.type_counts.end() && jt->second >= min_count;
    if (it != target.type_counts.end() && !a_ok) { ++it; continue; }
    if (jt != pivot.type_counts.end() && !b_ok) { ++jt; continue; }
    if (it == target.type_counts.end()) { ++uni; ++jt; continue; }
    if (jt == pivot.type_counts.end()) { ++uni; ++it; continue; }
    if (it->first == jt->first) {
      ++inter; ++uni; ++it; ++jt;
    } else if (it->first < jt->first) {
      ++uni; ++it;
    } else {
      ++uni; ++jt;
    }
  }
  if (uni == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double pivot_distance(const LanguageRecord& target, const LanguageRecord& pivot) {
  const std::string pair = "'" + target.code + "' / '" + pivot.code + "'";
  if (!target.syntax || !pivot.syntax)
    throw ValidationError("syntax vector missing for " + pair);
  if (target.syntax->dim() != pivot.syntax->dim())
    throw ValidationError("syntax vector dimensions differ for " + pair);

  double dot = 0.0, na = 0.0, nb = 0.0;
  bool identical = true;
  Eigen::Index shared = 0;
  for (Eigen::Index d = 0; d < target.syntax->dim(); ++d) {
    if (!target.syntax->present[d] || !pivot.syntax->present[d]) continue;
    const double a = target.syntax->values[d];
    const double b = pivot.syntax->values[d];
    ++shared;
    if (a != b) identical = false;
    dot += a * b;
    na += a * a;
    nb += b * b;
  }
  if (shared == 0)
    throw ValidationError("no shared syntax-vector components for " + pair);
  if (na == 0.0 || nb == 0.0)
    throw ValidationError("zero-norm shared syntax subvector for " + pair);
  if (identical) return 0.0;
  double dist = 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
  if (dist < 0.0) dist = 0.0;
  if (dist > 2.0) dist = 2.0;
  return dist;
}

const char* to_string(PivotFeatureMode mode) {
  switch (mode) {
    case PivotFeatureMode::None: return "none";
    case PivotFeatureMode::All: return "all";
    case PivotFeatureMode::DataOnly: return "data-only";
  }
  return "none";
}

PivotFeatureMode parse_pivot_feature_mode(const std::string& name) {
  if (name == "none") return PivotFeatureMode::None;
  if (name == "all") return PivotFeatureMode::All;
  if (name == "data-only") return PivotFeatureMode::DataOnly;
  throw ValidationError("unknown pivot feature mode '" + name +
                        "' (expected none, all or data-only)");
}

FeatureVector assemble_single_pivot(const std::string& pivot_code,
                                    const std::string& target_code,
                                    const LanguageRegistry& registry,
                                    const TypologicalCatalog& ranked_catalog,
                                    std::int64_t min_type_count) {
  const LanguageRecord& target = registry.at(target_code);
  const LanguageRecord& pivot = registry.at(pivot_code);
  FeatureVector fv;
  fv.names = {"data_size", "well_rep_feat", "pivot_overlap", "pivot_distance"};
  fv.values.resize(4);
  fv.values[0] = data_size_feature(target);
  fv.values[1] = well_rep_feat(target, ranked_catalog);
  fv.values[2] = type_overlap(target, pivot, min_type_count);
  fv.values[3] = pivot_distance(target, pivot);
  return fv;
}

FeatureVector assemble_multi_pivot(const Eigen::VectorXd& config,
                                   const std::string& target_code,
                                   const LanguageRegistry& registry,
                                   const TypologicalCatalog& ranked_catalog,
                                   const std::vector<std::string>& pivot_langs,
                                   PivotFeatureMode mode,
                                   std::int64_t min_type_count) {
  const auto p = static_cast<Eigen::Index>(pivot_langs.size());
  if (config.size() != p)
    throw ValidationError("config length " + std::to_string(config.size()) +
                          " does not match pivot count " + std::to_string(p));
  double total = 0.0;
  for (Eigen::Index j = 0; j < p; ++j) {
    if (!std::isfinite(config[j]) || config[j] < 0.0)
      throw ValidationError("config component " + std::to_string(j) +
                            " must be finite and >= 0");
    total += config[j];
  }
  if (total <= 0.0)
    throw ValidationError("config for target '" + target_code +
                          "' has no positive component");

  const LanguageRecord& target = registry.at(target_code);
  const bool with_pair_feats = mode != PivotFeatureMode::None;
  const Eigen::Index n = 2 + (with_pair_feats ? 3 * p : p);

  FeatureVector fv;
  fv.names.reserve(static_cast<std::size_t>(n));
  fv.values.resize(n);
  fv.names.push_back("data_size");
  fv.values[0] = data_size_feature(target);
  fv.names.push_back("well_rep_feat");
  fv.values[1] = well_rep_feat(target, ranked_catalog);
  for (Eigen::Index j = 0; j < p; ++j) {
    fv.names.push_back("finetune_data:" + pivot_langs[static_cast<std::size_t>(j)]);
    fv.values[2 + j] = config[j];
  }
  if (with_pair_feats) {
    for (Eigen::Index j = 0; j < p; ++j) {
      const LanguageRecord& pivot = registry.at(pivot_langs[static_cast<std::size_t>(j)]);
      fv.names.push_back("pivot_overlap:" + pivot.code);
      fv.values[2 + p + j] = type_overlap(target, pivot, min_type_count);
    }
    for (Eigen::Index j = 0; j < p; ++j) {
      const LanguageRecord& pivot = registry.at(pivot_langs[static_cast<std::size_t>(j)]);
      fv.names.push_back("pivot_distance:" + pivot.code);
      fv.values[2 + 2 * p + j] = pivot_distance(target, pivot);
    }
    if (mode == PivotFeatureMode::DataOnly) {
      for (Eigen::Index j = 0; j < p; ++j) {
        if (config[j] == 0.0) {
          fv.values[2 + p + j] = 0.0;
          fv.values[2 + 2 * p + j] = 0.0;
        }
      }
    }
  }
  return fv;
}

Normalizer fit_normalizer(const FeatureMatrix& matrix) {
  if (matrix.rows() < 1)
    throw ValidationError("cannot fit a normalizer on an empty matrix");
  Normalizer norm;
  norm.names = matrix.names;
  norm.mins = matrix.values.colwise().minCoeff();
  norm.maxs = matrix.values.colwise().maxCoeff();
  return norm;
}

namespace {

void check_names(const std::vector<std::string>& fitted,
                 const std::vector<std::string>& given) {
  if (fitted != given)
    throw ValidationError("feature names do not match the fitted normalizer");
}

double normalize_one(double v, double lo, double hi) {
  if (hi <= lo) return 0.0;
  return clamp01((v - lo) / (hi - lo));
}

}  // namespace

FeatureVector apply_normalizer(const Normalizer& norm, const FeatureVector& vec) {
  check_names(norm.names, vec.names);
  FeatureVector out;
  out.names = vec.names;
  out.values.resize(vec.values.size());
  for (Eigen::Index j = 0; j < vec.values.size(); ++j)
    out.values[j] = normalize_one(vec.values[j], norm.mins[j], norm.maxs[j]);
  return out;
}

FeatureMatrix apply_normalizer(const Normalizer& norm, const FeatureMatrix& matrix) {
  check_names(norm.names, matrix.names);
  FeatureMatrix out;
  out.names = matrix.names;
  out.values.resize(matrix.rows(), matrix.cols());
  for (Eigen::Index i = 0; i < matrix.rows(); ++i)
    for (Eigen::Index j = 0; j < matrix.cols(); ++j)
      out.values(i, j) = normalize_one(matrix.values(i, j), norm.mins[j], norm.maxs[j]);
  return out;
}

std::string feature_matrix_csv(const FeatureMatrix& matrix,
                               const std::vector<std::string>& targets,
                               const Eigen::VectorXd& scores) {
  if (static_cast<Eigen::Index>(targets.size()) != matrix.rows() ||
      scores.size() != matrix.rows())
    throw ValidationError("feature matrix, targets and scores must have equal row counts");
  std::vector<std::string> header = matrix.names;
  header.push_back("target");
  header.push_back("score");
  std::string out = csv_line(header);
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    std::vector<std::string> fields;
    fields.reserve(static_cast<std::size_t>(matrix.cols()) + 2);
    for (Eigen::Index j = 0; j < matrix.cols(); ++j)
      fields.push_back(format_double(matrix.values(i, j)));
    fields.push_back(targets[static_cast<std::size_t>(i)]);
    fields.push_back(format_double(scores[i]));
    out += csv_line(fields);
  }
  return out;
}

}  // namespace perfpred
