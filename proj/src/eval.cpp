#include "perfpred/eval.hpp"

#include <algorithm>
#include <cmath>

namespace perfpred {

using nlohmann::json;

const char* protocol_name(Protocol p) {
  switch (p) {
    case Protocol::E1Single: return "e1-single";
    case Protocol::E2Single: return "e2-single";
    case Protocol::E1Multi: return "e1-multi";
    case Protocol::E2Multi: return "e2-multi";
  }
  return "e1-single";
}

Protocol parse_protocol(const std::string& name) {
  if (name == "e1-single") return Protocol::E1Single;
  if (name == "e2-single") return Protocol::E2Single;
  if (name == "e1-multi") return Protocol::E1Multi;
  if (name == "e2-multi") return Protocol::E2Multi;
  throw ValidationError("unknown protocol '" + name +
                        "' (expected e1-single, e2-single, e1-multi or e2-multi)");
}

double mae(const Eigen::VectorXd& predictions, const Eigen::VectorXd& truths) {
  if (predictions.size() != truths.size())
    throw ValidationError("prediction and truth lengths differ");
  if (predictions.size() == 0) throw ValidationError("mae of empty vectors");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < predictions.size(); ++i)
    sum += std::abs(predictions[i] - truths[i]);
  return sum / static_cast<double>(predictions.size());
}

double mean_baseline(const Eigen::VectorXd& train_scores,
                     const Eigen::VectorXd& test_scores) {
  if (train_scores.size() == 0 || test_scores.size() == 0)
    throw ValidationError("mean baseline needs non-empty train and test scores");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < train_scores.size(); ++i) sum += train_scores[i];
  const double mean = sum / static_cast<double>(train_scores.size());
  return mae(Eigen::VectorXd::Constant(test_scores.size(), mean), test_scores);
}

Relation relation(double a, double b, double tie_tolerance) {
  if (tie_tolerance < 0.0) throw ValidationError("tie tolerance must be >= 0");
  if (std::abs(a - b) <= tie_tolerance) return Relation::EQ;
  return a < b ? Relation::LT : Relation::GT;
}

double pair_accuracy(const std::vector<ScoredPair>& pairs, double tie_tolerance) {
  if (pairs.empty()) throw ProtocolError("no comparison pairs");
  long correct = 0;
  for (const ScoredPair& p : pairs)
    if (relation(p.pred_a, p.pred_b, tie_tolerance) ==
        relation(p.gold_a, p.gold_b, tie_tolerance))
      ++correct;
  return 100.0 * static_cast<double>(correct) / static_cast<double>(pairs.size());
}

double pair_baseline_accuracy(const std::vector<ScoredPair>& pairs, double tie_tolerance) {
  if (pairs.empty()) throw ProtocolError("no comparison pairs");
  long correct = 0;
  for (const ScoredPair& p : pairs)
    if (relation(p.base_a, p.base_b, tie_tolerance) ==
        relation(p.gold_a, p.gold_b, tie_tolerance))
      ++correct;
  return 100.0 * static_cast<double>(correct) / static_cast<double>(pairs.size());
}

namespace {

// Entry indices sorted by (key, target), so seeded draws do not depend on
// the input row order.
std::vector<int> canonical_rows(const ScoreTable& table) {
  std::vector<int> rows(table.entries.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<int>(i);
  std::sort(rows.begin(), rows.end(), [&](int a, int b) {
    const ScoreEntry& ea = table.entries[static_cast<std::size_t>(a)];
    const ScoreEntry& eb = table.entries[static_cast<std::size_t>(b)];
    if (ea.key != eb.key) return ea.key < eb.key;
    return ea.target < eb.target;
  });
  return rows;
}

// Languages appearing in the given rows: every target, plus every pivot
// that actually contributes data (single-pivot rows name one pivot;
// multi-pivot rows contribute a pivot iff its config component is nonzero).
std::set<std::string> training_languages(const ScoreTable& table,
                                         const std::vector<int>& rows) {
  std::set<std::string> langs;
  for (int i : rows) {
    const ScoreEntry& e = table.entries[static_cast<std::size_t>(i)];
    langs.insert(e.target);
    if (table.mode == ScoreMode::SinglePivot) {
      langs.insert(e.key);
    } else {
      const Eigen::VectorXd& cfg = table.config_of(e.key);
      for (Eigen::Index j = 0; j < cfg.size(); ++j)
        if (cfg[j] > 0.0) langs.insert(table.pivot_langs[static_cast<std::size_t>(j)]);
    }
  }
  return langs;
}

std::string mode_label(const ScoreTable& table, const EvalOptions& options) {
  return table.mode == ScoreMode::SinglePivot ? "single" : to_string(options.mode);
}

struct FoldResult {
  Eigen::VectorXd predictions;  // clamped to [0,1]
  Eigen::VectorXd truths;
  double baseline = 0.0;
  GBRTModel model;
  Normalizer normalizer;
  TypologicalCatalog ranked;
  FeatureMatrix test_features;  // normalized
};

FeatureVector assemble_row(const ScoreTable& table, const LanguageRegistry& registry,
                           const TypologicalCatalog& ranked, const EvalOptions& options,
                           const ScoreEntry& e) {
  if (table.mode == ScoreMode::SinglePivot)
    return assemble_single_pivot(e.key, e.target, registry, ranked,
                                 options.min_type_count);
  return assemble_multi_pivot(table.config_of(e.key), e.target, registry, ranked,
                              table.pivot_langs, options.mode, options.min_type_count);
}

FeatureMatrix assemble_rows(const ScoreTable& table, const LanguageRegistry& registry,
                            const TypologicalCatalog& ranked, const EvalOptions& options,
                            const std::vector<int>& rows) {
  FeatureMatrix m;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ScoreEntry& e = table.entries[static_cast<std::size_t>(rows[i])];
    FeatureVector fv = assemble_row(table, registry, ranked, options, e);
    if (i == 0) {
      m.names = fv.names;
      m.values.resize(static_cast<Eigen::Index>(rows.size()), fv.values.size());
    } else if (fv.names != m.names) {
      throw ValidationError("inconsistent feature names across rows");
    }
    m.values.row(static_cast<Eigen::Index>(i)) = fv.values.transpose();
  }
  return m;
}

Eigen::VectorXd scores_of(const ScoreTable& table, const std::vector<int>& rows) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    y[static_cast<Eigen::Index>(i)] = table.entries[static_cast<std::size_t>(rows[i])].score;
  return y;
}

// Ranks, normalizer and model are all fit from the fold's training rows only.
FoldResult run_fold(const ScoreTable& table, const LanguageRegistry& registry,
                    const EvalOptions& options, const std::vector<int>& train_rows,
                    const std::vector<int>& test_rows) {
  const TypologicalCatalog ranked =
      rank_typological_features(registry, training_languages(table, train_rows));
  const FeatureMatrix train_raw = assemble_rows(table, registry, ranked, options, train_rows);
  const FeatureMatrix test_raw = assemble_rows(table, registry, ranked, options, test_rows);
  const Normalizer norm = fit_normalizer(train_raw);
  const FeatureMatrix train_x = apply_normalizer(norm, train_raw);
  const FeatureMatrix test_x = apply_normalizer(norm, test_raw);
  const Eigen::VectorXd y_train = scores_of(table, train_rows);
  const Eigen::VectorXd y_test = scores_of(table, test_rows);

  FoldResult out;
  out.model = train_gbrt(train_x, y_train, options.params);
  out.predictions = predict_matrix(out.model, test_x);
  // Observed scores live in [0,1]; error metrics use clamped predictions.
  for (Eigen::Index i = 0; i < out.predictions.size(); ++i)
    out.predictions[i] = clamp01(out.predictions[i]);
  out.truths = y_test;
  out.baseline = mean_baseline(y_train, y_test);
  out.normalizer = norm;
  out.ranked = ranked;
  out.test_features = test_x;
  return out;
}

// Raw (unclamped) predictions for arbitrary table rows through a fold's
// catalog, normalizer and model.
Eigen::VectorXd predict_rows_raw(const ScoreTable& table, const LanguageRegistry& registry,
                                 const EvalOptions& options, const FoldResult& fold,
                                 const std::vector<int>& rows) {
  const FeatureMatrix raw = assemble_rows(table, registry, fold.ranked, options, rows);
  return predict_matrix(fold.model, apply_normalizer(fold.normalizer, raw));
}

std::vector<int> rows_except(const std::vector<int>& all, int skip) {
  std::vector<int> out;
  out.reserve(all.size() - 1);
  for (int i : all)
    if (i != skip) out.push_back(i);
  return out;
}

}  // namespace

EvalReport evaluate_e1_single(const ScoreTable& table, const LanguageRegistry& registry,
                              const EvalOptions& options) {
  if (table.mode != ScoreMode::SinglePivot)
    throw ProtocolError("e1-single requires a single-pivot score table");
  if (table.entries.size() < 2)
    throw ProtocolError("e1-single needs at least 2 entries");

  EvalReport report;
  report.protocol = Protocol::E1Single;
  report.feature_mode = mode_label(table, options);
  report.seed = options.seed;

  const std::vector<int> rows = canonical_rows(table);
  double abs_err_sum = 0.0;
  for (int held_out : rows) {
    const std::vector<int> train_rows = rows_except(rows, held_out);
    const std::vector<int> test_rows{held_out};
    const FoldResult fold = run_fold(table, registry, options, train_rows, test_rows);
    abs_err_sum += std::abs(fold.predictions[0] - fold.truths[0]);
    const ScoreEntry& e = table.entries[static_cast<std::size_t>(held_out)];
    report.folds.push_back({e.key + ":" + e.target, train_rows, test_rows});
  }
  report.overall_mae = abs_err_sum / static_cast<double>(rows.size());
  return report;
}

EvalReport evaluate_e2_single(const ScoreTable& table, const LanguageRegistry& registry,
                              const EvalOptions& options) {
  if (table.mode != ScoreMode::SinglePivot)
    throw ProtocolError("e2-single requires a single-pivot score table");
  if (table.target_langs.size() < 2)
    throw ProtocolError("e2-single needs at least 2 distinct target languages");

  EvalReport report;
  report.protocol = Protocol::E2Single;
  report.feature_mode = mode_label(table, options);
  report.seed = options.seed;

  const std::vector<int> rows = canonical_rows(table);
  double mae_sum = 0.0, baseline_sum = 0.0;
  for (const std::string& lang : table.target_langs) {
    std::vector<int> train_rows, test_rows;
    for (int i : rows) {
      const ScoreEntry& e = table.entries[static_cast<std::size_t>(i)];
      if (e.target == lang) test_rows.push_back(i);
      else if (e.key != lang) train_rows.push_back(i);
    }
    if (test_rows.empty()) continue;
    if (train_rows.empty())
      throw ProtocolError("holding out language '" + lang + "' empties the training set");
    const FoldResult fold = run_fold(table, registry, options, train_rows, test_rows);
    const double lang_mae = mae(fold.predictions, fold.truths);
    report.per_language_mae[lang] = lang_mae;
    mae_sum += lang_mae;
    baseline_sum += fold.baseline;
    report.folds.push_back({lang, train_rows, test_rows});
  }
  const auto n = static_cast<double>(report.per_language_mae.size());
  report.overall_mae = mae_sum / n;
  report.baseline_mae = baseline_sum / n;
  return report;
}

EvalReport evaluate_e1_multi(const ScoreTable& table, const LanguageRegistry& registry,
                             const EvalOptions& options) {
  if (table.mode != ScoreMode::MultiPivot)
    throw ProtocolError("e1-multi requires a multi-pivot score table");
  const std::size_t n = table.entries.size();
  if (n < 5) throw ProtocolError("e1-multi needs at least 5 entries");

  EvalReport report;
  report.protocol = Protocol::E1Multi;
  report.feature_mode = mode_label(table, options);
  report.seed = options.seed;

  std::vector<int> rows = canonical_rows(table);
  SeededRng rng(options.seed);
  rng.shuffle(rows);

  // Near-equal folds; the remainder goes to the earliest folds.
  const std::size_t base = n / 5, rem = n % 5;
  std::vector<std::vector<int>> folds(5);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < 5; ++f) {
    const std::size_t size = base + (f < rem ? 1 : 0);
    folds[f].assign(rows.begin() + static_cast<long>(pos),
                    rows.begin() + static_cast<long>(pos + size));
    pos += size;
  }

  double mae_sum = 0.0;
  for (std::size_t f = 0; f < 5; ++f) {
    std::vector<int> train_rows;
    for (std::size_t g = 0; g < 5; ++g)
      if (g != f) train_rows.insert(train_rows.end(), folds[g].begin(), folds[g].end());
    const FoldResult fold = run_fold(table, registry, options, train_rows, folds[f]);
    mae_sum += mae(fold.predictions, fold.truths);
    report.folds.push_back({"fold" + std::to_string(f), train_rows, folds[f]});
  }
  report.overall_mae = mae_sum / 5.0;
  return report;
}

namespace {

struct E2MultiPools {
  std::vector<int> train_pool;  // target != lang and config component 0
  std::vector<int> test_pool;   // target == lang
};

E2MultiPools e2_multi_pools(const ScoreTable& table, const std::vector<int>& rows,
                            const std::string& lang) {
  E2MultiPools pools;
  const int pivot_idx = table.pivot_index(lang);
  for (int i : rows) {
    const ScoreEntry& e = table.entries[static_cast<std::size_t>(i)];
    if (e.target == lang) {
      pools.test_pool.push_back(i);
    } else if (pivot_idx < 0 || table.config_of(e.key)[pivot_idx] == 0.0) {
      pools.train_pool.push_back(i);
    }
  }
  return pools;
}

constexpr std::size_t kE2TrainSample = 1000;
constexpr std::size_t kE2TestSample = 100;

}  // namespace

EvalReport evaluate_e2_multi(const ScoreTable& table, const LanguageRegistry& registry,
                             const EvalOptions& options) {
  if (table.mode != ScoreMode::MultiPivot)
    throw ProtocolError("e2-multi requires a multi-pivot score table");

  EvalReport report;
  report.protocol = Protocol::E2Multi;
  report.feature_mode = mode_label(table, options);
  report.seed = options.seed;

  const std::vector<int> rows = canonical_rows(table);
  double mae_sum = 0.0, baseline_sum = 0.0;
  for (std::size_t li = 0; li < table.target_langs.size(); ++li) {
    const std::string& lang = table.target_langs[li];
    const E2MultiPools pools = e2_multi_pools(table, rows, lang);
    if (pools.test_pool.size() < kE2TestSample || pools.train_pool.size() < kE2TrainSample) {
      report.skipped_languages.push_back(lang);
      continue;
    }
    SeededRng rng(options.seed + li);
    const std::vector<int> train_rows = rng.sample(pools.train_pool, kE2TrainSample);
    const std::vector<int> test_rows = rng.sample(pools.test_pool, kE2TestSample);
    const FoldResult fold = run_fold(table, registry, options, train_rows, test_rows);
    const double lang_mae = mae(fold.predictions, fold.truths);
    report.per_language_mae[lang] = lang_mae;
    mae_sum += lang_mae;
    baseline_sum += fold.baseline;
    report.folds.push_back({lang, train_rows, test_rows});
  }
  if (report.per_language_mae.empty())
    throw ProtocolError("no target language has enough rows for e2-multi (need >= " +
                        std::to_string(kE2TestSample) + " test and >= " +
                        std::to_string(kE2TrainSample) + " eligible training rows)");
  const auto n = static_cast<double>(report.per_language_mae.size());
  report.overall_mae = mae_sum / n;
  report.baseline_mae = baseline_sum / n;
  return report;
}

namespace {

double config_total(const ScoreTable& table, const ScoreEntry& e) {
  const Eigen::VectorXd& cfg = table.config_of(e.key);
  double total = 0.0;
  for (Eigen::Index j = 0; j < cfg.size(); ++j) total += cfg[j];
  return total;
}

// Per-target means over training rows; targets unseen in training fall back
// to the mean of the learnt per-target values.
struct TargetMeanBaseline {
  std::map<std::string, double> means;
  double fallback = 0.0;

  static TargetMeanBaseline fit(const ScoreTable& table, const std::vector<int>& train_rows) {
    std::map<std::string, std::pair<double, long>> acc;
    for (int i : train_rows) {
      const ScoreEntry& e = table.entries[static_cast<std::size_t>(i)];
      auto& slot = acc[e.target];
      slot.first += e.score;
      slot.second += 1;
    }
    TargetMeanBaseline out;
    double sum = 0.0;
    for (const auto& [target, slot] : acc) {
      const double m = slot.first / static_cast<double>(slot.second);
      out.means[target] = m;
      sum += m;
    }
    out.fallback = acc.empty() ? 0.0 : sum / static_cast<double>(acc.size());
    return out;
  }

  double value(const std::string& target) const {
    auto it = means.find(target);
    return it == means.end() ? fallback : it->second;
  }
};

std::vector<ScoredPair> index_pairs_to_scored(
    const ScoreTable& table, const std::vector<std::pair<int, int>>& pairs,
    const std::map<int, double>& pred_by_row, RelativeCase rcase,
    const TargetMeanBaseline& target_means) {
  std::vector<ScoredPair> out;
  out.reserve(pairs.size());
  for (const auto& [a, b] : pairs) {
    const ScoreEntry& ea = table.entries[static_cast<std::size_t>(a)];
    const ScoreEntry& eb = table.entries[static_cast<std::size_t>(b)];
    ScoredPair sp;
    sp.pred_a = pred_by_row.at(a);
    sp.pred_b = pred_by_row.at(b);
    sp.gold_a = ea.score;
    sp.gold_b = eb.score;
    if (rcase == RelativeCase::Case1) {
      sp.base_a = config_total(table, ea);
      sp.base_b = config_total(table, eb);
    } else {
      sp.base_a = target_means.value(ea.target);
      sp.base_b = target_means.value(eb.target);
    }
    out.push_back(sp);
  }
  return out;
}

}  // namespace

RelativeEvalReport relative_evaluate(const ScoreTable& table,
                                     const LanguageRegistry& registry,
                                     RelativeCase rcase, RelativeScenario scenario,
                                     const RelativeOptions& options) {
  if (table.mode != ScoreMode::MultiPivot)
    throw ProtocolError("relative evaluation requires a multi-pivot score table");
  if (options.max_pairs < 1) throw ValidationError("max_pairs must be >= 1");

  RelativeEvalReport report;
  report.rcase = rcase;
  report.scenario = scenario;
  report.feature_mode = to_string(options.eval.mode);
  report.seed = options.eval.seed;
  report.tie_tolerance = options.tie_tolerance;

  const std::vector<int> rows = canonical_rows(table);
  std::vector<ScoredPair> pairs;

  if (scenario == RelativeScenario::E1) {
    std::vector<int> shuffled = rows;
    SeededRng rng(options.eval.seed);
    rng.shuffle(shuffled);
    const std::size_t n_test = std::max<std::size_t>(1, shuffled.size() / 5);
    std::vector<int> test_rows(shuffled.begin(), shuffled.begin() + static_cast<long>(n_test));
    std::vector<int> train_rows(shuffled.begin() + static_cast<long>(n_test), shuffled.end());
    if (train_rows.empty()) throw ProtocolError("80/20 split leaves no training rows");

    const FoldResult fold = run_fold(table, registry, options.eval, train_rows, test_rows);
    const Eigen::VectorXd raw = predict_matrix(fold.model, fold.test_features);
    std::map<int, double> pred_by_row;
    for (std::size_t i = 0; i < test_rows.size(); ++i)
      pred_by_row[test_rows[i]] = raw[static_cast<Eigen::Index>(i)];

    // Groups share a target (Case 1) or a config (Case 2).
    std::map<std::string, std::vector<int>> groups;
    std::vector<int> test_sorted = test_rows;
    std::sort(test_sorted.begin(), test_sorted.end(), [&](int a, int b) {
      const ScoreEntry& ea = table.entries[static_cast<std::size_t>(a)];
      const ScoreEntry& eb = table.entries[static_cast<std::size_t>(b)];
      if (ea.key != eb.key) return ea.key < eb.key;
      return ea.target < eb.target;
    });
    for (int i : test_sorted) {
      const ScoreEntry& e = table.entries[static_cast<std::size_t>(i)];
      groups[rcase == RelativeCase::Case1 ? e.target : e.key].push_back(i);
    }
    std::vector<std::pair<int, int>> index_pairs;
    for (const auto& [group_key, members] : groups)
      for (std::size_t a = 0; a < members.size(); ++a)
        for (std::size_t b = a + 1; b < members.size(); ++b)
          index_pairs.push_back({members[a], members[b]});

    if (static_cast<long>(index_pairs.size()) > options.max_pairs)
      index_pairs = rng.sample(index_pairs, static_cast<std::size_t>(options.max_pairs));

    const TargetMeanBaseline target_means = TargetMeanBaseline::fit(table, train_rows);
    pairs = index_pairs_to_scored(table, index_pairs, pred_by_row, rcase, target_means);
  } else {
    for (std::size_t li = 0; li < table.target_langs.size(); ++li) {
      const std::string& lang = table.target_langs[li];
      const E2MultiPools pools = e2_multi_pools(table, rows, lang);
      if (pools.test_pool.size() < kE2TestSample ||
          pools.train_pool.size() < kE2TrainSample) {
        report.skipped_languages.push_back(lang);
        continue;
      }
      SeededRng rng(options.eval.seed + li);
      const std::vector<int> train_rows = rng.sample(pools.train_pool, kE2TrainSample);
      const std::vector<int> test_rows = rng.sample(pools.test_pool, kE2TestSample);
      const FoldResult fold = run_fold(table, registry, options.eval, train_rows, test_rows);
      const Eigen::VectorXd raw = predict_matrix(fold.model, fold.test_features);
      std::map<int, double> pred_by_row;
      for (std::size_t i = 0; i < test_rows.size(); ++i)
        pred_by_row[test_rows[i]] = raw[static_cast<Eigen::Index>(i)];

      std::vector<int> test_sorted = test_rows;
      std::sort(test_sorted.begin(), test_sorted.end());
      std::vector<std::pair<int, int>> index_pairs;
      if (rcase == RelativeCase::Case1) {
        // All test points share the held-out target; compare configs.
        for (std::size_t a = 0; a < test_sorted.size(); ++a)
          for (std::size_t b = a + 1; b < test_sorted.size(); ++b)
            index_pairs.push_back({test_sorted[a], test_sorted[b]});
      } else {
        // First element from the held-out language, second from training
        // rows that share its config.
        std::map<std::string, std::vector<int>> train_by_config;
        std::vector<int> train_sorted = train_rows;
        std::sort(train_sorted.begin(), train_sorted.end());
        for (int i : train_sorted)
          train_by_config[table.entries[static_cast<std::size_t>(i)].key].push_back(i);
        std::vector<int> partner_rows;
        for (int i : test_sorted) {
          const ScoreEntry& e = table.entries[static_cast<std::size_t>(i)];
          auto it = train_by_config.find(e.key);
          if (it == train_by_config.end()) continue;
          for (int j : it->second) {
            index_pairs.push_back({i, j});
            partner_rows.push_back(j);
          }
        }
        std::sort(partner_rows.begin(), partner_rows.end());
        partner_rows.erase(std::unique(partner_rows.begin(), partner_rows.end()),
                           partner_rows.end());
        if (!partner_rows.empty()) {
          const Eigen::VectorXd partner_pred =
              predict_rows_raw(table, registry, options.eval, fold, partner_rows);
          for (std::size_t i = 0; i < partner_rows.size(); ++i)
            pred_by_row[partner_rows[i]] = partner_pred[static_cast<Eigen::Index>(i)];
        }
      }

      const TargetMeanBaseline target_means = TargetMeanBaseline::fit(table, train_rows);
      std::vector<ScoredPair> unit_pairs =
          index_pairs_to_scored(table, index_pairs, pred_by_row, rcase, target_means);
      pairs.insert(pairs.end(), unit_pairs.begin(), unit_pairs.end());
    }
    if (static_cast<long>(pairs.size()) > options.max_pairs) {
      SeededRng capper(options.eval.seed + table.target_langs.size());
      pairs = capper.sample(pairs, static_cast<std::size_t>(options.max_pairs));
    }
  }

  if (pairs.empty()) throw ProtocolError("relative evaluation produced no valid pairs");
  report.n_pairs = static_cast<long>(pairs.size());
  report.predictor_accuracy = pair_accuracy(pairs, options.tie_tolerance);
  report.baseline_accuracy = pair_baseline_accuracy(pairs, options.tie_tolerance);
  return report;
}

json report_to_json(const EvalReport& report) {
  json doc;
  doc["protocol"] = protocol_name(report.protocol);
  doc["feature_mode"] = report.feature_mode;
  doc["seed"] = report.seed;
  doc["overall_mae"] = report.overall_mae;
  if (report.baseline_mae) doc["baseline_mae"] = *report.baseline_mae;
  if (!report.per_language_mae.empty()) doc["per_language_mae"] = report.per_language_mae;
  doc["skipped_languages"] = report.skipped_languages;
  doc["folds"] = json::array();
  for (const FoldManifest& f : report.folds) {
    doc["folds"].push_back({{"unit", f.unit},
                            {"n_train", f.train_rows.size()},
                            {"n_test", f.test_rows.size()},
                            {"train_rows", f.train_rows},
                            {"test_rows", f.test_rows}});
  }
  return doc;
}

json report_to_json(const RelativeEvalReport& report) {
  json doc;
  doc["case"] = report.rcase == RelativeCase::Case1 ? 1 : 2;
  doc["scenario"] = report.scenario == RelativeScenario::E1 ? "e1" : "e2";
  doc["feature_mode"] = report.feature_mode;
  doc["seed"] = report.seed;
  doc["predictor_accuracy"] = report.predictor_accuracy;
  doc["baseline_accuracy"] = report.baseline_accuracy;
  doc["n_pairs"] = report.n_pairs;
  doc["tie_tolerance"] = report.tie_tolerance;
  doc["skipped_languages"] = report.skipped_languages;
  return doc;
}

}  // namespace perfpred
