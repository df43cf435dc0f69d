#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "perfpred/corpus.hpp"

namespace perfpred {

// Distance metric between syntax vectors. Cosine is the only supported
// choice; kept as a named constant so reports can state it.
inline constexpr const char* kPivotDistanceMetric = "cosine";

// Types occurring fewer than this many times are dropped before computing
// overlap (i.e. counts <= 5 are discarded by default).
inline constexpr std::int64_t kDefaultMinTypeCount = 6;

struct FeatureVector {
  std::vector<std::string> names;
  Eigen::VectorXd values;
};

struct FeatureMatrix {
  std::vector<std::string> names;
  Eigen::MatrixXd values;  // one row per example

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

// log10 of the pretraining corpus size.
double data_size_feature(const LanguageRecord& record);

// Ranks every catalog feature by the total pretraining tokens of the
// languages exhibiting it (descending; ties by catalog order). The subset
// overload restricts the mass sums to the given languages while still
// ranking the full catalog.
TypologicalCatalog rank_typological_features(const LanguageRegistry& registry);
TypologicalCatalog rank_typological_features(const LanguageRegistry& registry,
                                             const std::set<std::string>& language_subset);

// Mean reciprocal rank of the record's features; 0.0 for an empty set.
double well_rep_feat(const LanguageRecord& record, const TypologicalCatalog& catalog);

// Jaccard similarity of the two languages' subword type sets after dropping
// types with count < min_count. 0.0 when the filtered union is empty.
double type_overlap(const LanguageRecord& target, const LanguageRecord& pivot,
                    std::int64_t min_count = kDefaultMinTypeCount);

// Cosine distance over the vector components present in both languages,
// clamped to [0, 2]. Throws when either vector is absent, no component is
// shared, or a shared subvector has zero norm.
double pivot_distance(const LanguageRecord& target, const LanguageRecord& pivot);

enum class PivotFeatureMode { None, All, DataOnly };

const char* to_string(PivotFeatureMode mode);
PivotFeatureMode parse_pivot_feature_mode(const std::string& name);

// [data_size, well_rep_feat, pivot_overlap, pivot_distance]
FeatureVector assemble_single_pivot(const std::string& pivot_code,
                                    const std::string& target_code,
                                    const LanguageRegistry& registry,
                                    const TypologicalCatalog& ranked_catalog,
                                    std::int64_t min_type_count = kDefaultMinTypeCount);

// [data_size, well_rep_feat, finetune_data x p] plus, for All and DataOnly,
// [pivot_overlap x p, pivot_distance x p]. DataOnly zeroes the overlap and
// distance entries of pivots whose config component is 0.
FeatureVector assemble_multi_pivot(const Eigen::VectorXd& config,
                                   const std::string& target_code,
                                   const LanguageRegistry& registry,
                                   const TypologicalCatalog& ranked_catalog,
                                   const std::vector<std::string>& pivot_langs,
                                   PivotFeatureMode mode,
                                   std::int64_t min_type_count = kDefaultMinTypeCount);

// Per-feature (min, max) learned from a training matrix.
struct Normalizer {
  std::vector<std::string> names;
  Eigen::VectorXd mins;
  Eigen::VectorXd maxs;
};

Normalizer fit_normalizer(const FeatureMatrix& matrix);

// (v - min) / (max - min), constant features map to 0, results clamped to
// [0, 1]. Feature names must match the fitted names exactly.
FeatureVector apply_normalizer(const Normalizer& norm, const FeatureVector& vec);
FeatureMatrix apply_normalizer(const Normalizer& norm, const FeatureMatrix& matrix);

// csv: feature names, then 'target', then 'score'.
std::string feature_matrix_csv(const FeatureMatrix& matrix,
                               const std::vector<std::string>& targets,
                               const Eigen::VectorXd& scores);

}  // namespace perfpred
