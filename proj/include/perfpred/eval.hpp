#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "perfpred/corpus.hpp"
#include "perfpred/features.hpp"
#include "perfpred/gbrt.hpp"

namespace perfpred {

enum class Protocol { E1Single, E2Single, E1Multi, E2Multi };

const char* protocol_name(Protocol p);
Protocol parse_protocol(const std::string& name);

struct FoldManifest {
  std::string unit;  // "pivot:target", target code, or "fold<i>"
  std::vector<int> train_rows;  // indices into ScoreTable::entries
  std::vector<int> test_rows;
};

struct EvalReport {
  Protocol protocol = Protocol::E1Single;
  std::string feature_mode;  // "single", "none", "all" or "data-only"
  std::uint64_t seed = 0;
  double overall_mae = 0.0;
  std::map<std::string, double> per_language_mae;  // E2 protocols
  std::optional<double> baseline_mae;              // E2 protocols
  std::vector<std::string> skipped_languages;      // E2 multi
  std::vector<FoldManifest> folds;
};

double mae(const Eigen::VectorXd& predictions, const Eigen::VectorXd& truths);

// MAE of the constant predictor mean(train_scores) on test_scores.
double mean_baseline(const Eigen::VectorXd& train_scores,
                     const Eigen::VectorXd& test_scores);

struct EvalOptions {
  TrainParams params;
  PivotFeatureMode mode = PivotFeatureMode::None;
  std::uint64_t seed = 0;
  std::int64_t min_type_count = kDefaultMinTypeCount;
};

// Leave-one-point-out over every (pivot, target) entry.
EvalReport evaluate_e1_single(const ScoreTable& table, const LanguageRegistry& registry,
                              const EvalOptions& options);

// Leave-one-language-out: the held-out language appears in no training row,
// neither as pivot nor as target.
EvalReport evaluate_e2_single(const ScoreTable& table, const LanguageRegistry& registry,
                              const EvalOptions& options);

// Seeded 5-fold cross validation over (config, target) rows.
EvalReport evaluate_e1_multi(const ScoreTable& table, const LanguageRegistry& registry,
                             const EvalOptions& options);

// Per target language: 1000 sampled training rows (target differs and the
// config component for the language is 0) and 100 sampled test rows.
// Languages without enough rows are skipped and listed in the report.
EvalReport evaluate_e2_multi(const ScoreTable& table, const LanguageRegistry& registry,
                             const EvalOptions& options);

enum class Relation { LT, EQ, GT };

inline constexpr double kDefaultTieTolerance = 1e-8;

Relation relation(double a, double b, double tie_tolerance = kDefaultTieTolerance);

enum class RelativeCase { Case1, Case2 };     // vary config / vary target
enum class RelativeScenario { E1, E2 };

struct RelativeEvalReport {
  RelativeCase rcase = RelativeCase::Case1;
  RelativeScenario scenario = RelativeScenario::E1;
  std::string feature_mode;
  std::uint64_t seed = 0;
  double predictor_accuracy = 0.0;  // percent
  double baseline_accuracy = 0.0;   // percent
  long n_pairs = 0;
  double tie_tolerance = kDefaultTieTolerance;
  std::vector<std::string> skipped_languages;  // E2 scenario
};

struct RelativeOptions {
  EvalOptions eval;
  double tie_tolerance = kDefaultTieTolerance;
  long max_pairs = 10000;
};

// Case 1 compares two configs for one target; Case 2 compares two targets
// under one config. E1 uses a seeded 80/20 split; E2 holds each language out
// with the 1000/100 sampling.  The Case 1 baseline orders points by total
// config data; the Case 2 baseline uses per-target training means with the
// global mean for unseen targets.
RelativeEvalReport relative_evaluate(const ScoreTable& table,
                                     const LanguageRegistry& registry,
                                     RelativeCase rcase, RelativeScenario scenario,
                                     const RelativeOptions& options);

// One comparison pair: predictions and gold scores for both elements.
struct ScoredPair {
  double pred_a = 0.0, pred_b = 0.0;
  double gold_a = 0.0, gold_b = 0.0;
  double base_a = 0.0, base_b = 0.0;
};

// Percent of pairs whose predicted relation matches the gold relation.
double pair_accuracy(const std::vector<ScoredPair>& pairs, double tie_tolerance);
double pair_baseline_accuracy(const std::vector<ScoredPair>& pairs, double tie_tolerance);

nlohmann::json report_to_json(const EvalReport& report);
nlohmann::json report_to_json(const RelativeEvalReport& report);

}  // namespace perfpred
