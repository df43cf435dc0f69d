#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "perfpred/common.hpp"

namespace perfpred {

// Fixed-dimension real vector with per-component missing markers.
struct SyntaxVector {
  Eigen::VectorXd values;  // undefined where the component is missing
  Eigen::Array<bool, Eigen::Dynamic, 1> present;

  Eigen::Index dim() const { return values.size(); }
};

struct LanguageRecord {
  std::string code;
  std::int64_t pretraining_tokens = 0;
  std::set<std::string> wals_features;              // binarized ids, "81A=SVO"
  std::map<std::string, std::int64_t> type_counts;  // subword type -> count
  std::optional<SyntaxVector> syntax;
};

// Universe of binarized typological features, in canonical order:
// numeric WALS id first, then the remaining id string.
struct TypologicalCatalog {
  std::vector<std::string> feature_ids;
  std::map<std::string, int> ranks;  // permutation of 1..N once ranked

  bool ranked() const { return !ranks.empty(); }
  bool contains(const std::string& id) const;
  int rank_of(const std::string& id) const;
};

// Numeric prefix of a WALS feature id ("81A" -> 81). Throws when the id has
// no leading integer.
int wals_numeric_id(const std::string& feature_id);

// Canonically sorted, deduplicated catalog from arbitrary binary ids.
TypologicalCatalog make_catalog(std::vector<std::string> feature_ids);

struct LanguageRegistry {
  std::map<std::string, LanguageRecord> languages;
  TypologicalCatalog catalog;

  bool has(const std::string& code) const { return languages.count(code) > 0; }
  const LanguageRecord& at(const std::string& code) const;
};

enum class ScoreMode { SinglePivot, MultiPivot };

struct ScoreEntry {
  std::string key;  // pivot code (SinglePivot) or config id (MultiPivot)
  std::string target;
  double score = 0.0;
};

struct ScoreTable {
  ScoreMode mode = ScoreMode::SinglePivot;
  std::vector<std::string> pivot_langs;   // MultiPivot: config component order
  std::vector<std::string> target_langs;  // sorted distinct targets
  std::map<std::string, Eigen::VectorXd> configs;  // MultiPivot only
  std::vector<ScoreEntry> entries;

  const Eigen::VectorXd& config_of(const std::string& id) const;
  // Index of code in pivot_langs, -1 when absent.
  int pivot_index(const std::string& code) const;
};

struct WalsData {
  std::map<std::string, std::set<std::string>> features_by_language;
  TypologicalCatalog catalog;
};

// Binarizes a raw multi-valued WALS export (csv: code,feature_id,value).
// Features with numeric id below min_wals_id are dropped; each retained
// (feature, value) pair becomes one binary feature "id=value".
WalsData load_wals_binary(const std::string& path, int min_wals_id = 20);

LanguageRegistry load_language_registry(const std::string& languages_csv,
                                        const std::string& wals_csv,
                                        const std::string& types_dir,
                                        const std::string& vectors_csv);

// Re-checks record invariants. Loaders already enforce them; exposed for
// registries built in code.
void validate_registry(const LanguageRegistry& registry);

// Dispatches on extension: .csv -> single-pivot, .json -> multi-pivot.
// scale_divisor must be 1 or 100; raw scores are divided by it.
ScoreTable load_scores(const std::string& path, double scale_divisor);
ScoreTable load_scores_single(const std::string& path, double scale_divisor);
ScoreTable load_scores_multi(const std::string& path, double scale_divisor);

// Canonical writers: rows sorted, shortest round-trip number forms.
// save(load(x)) is byte-identical for inputs already in canonical form, and
// load(save(t)) reproduces t for any valid value.
void save_language_registry(const LanguageRegistry& registry,
                            const std::string& languages_csv,
                            const std::string& wals_csv,
                            const std::string& types_dir,
                            const std::string& vectors_csv);
void save_scores(const ScoreTable& table, const std::string& path);

enum class HeatmapOrdering { Resource, Family };

struct HeatmapMatrix {
  std::vector<std::string> pivots;   // row order
  std::vector<std::string> targets;  // column order
  std::vector<std::vector<std::optional<double>>> cells;  // [pivot][target]
};

// csv: code,family
std::map<std::string, std::string> load_family_file(const std::string& path);

// Resource ordering sorts both axes by pretraining tokens descending (ties by
// code); Family ordering sorts by (family, code) and requires a grouping map.
HeatmapMatrix build_heatmap(const ScoreTable& table,
                            const LanguageRegistry& registry,
                            HeatmapOrdering ordering,
                            const std::map<std::string, std::string>* families);

// Header row/column of language codes; absent entries become empty cells.
std::string heatmap_to_csv(const HeatmapMatrix& m);

}  // namespace perfpred
