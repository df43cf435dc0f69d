#pragma once

// Shared synthetic-data builders and reference implementations for the test
// suites. Everything here is seeded and deterministic.

#include <cmath>
#include <filesystem>
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <unistd.h>

#include "perfpred/corpus.hpp"
#include "perfpred/eval.hpp"
#include "perfpred/features.hpp"
#include "perfpred/gbrt.hpp"

namespace testutil {

using namespace perfpred;
namespace fs = std::filesystem;

inline fs::path fresh_dir(const std::string& tag) {
  static int counter = 0;
  const fs::path dir = fs::temp_directory_path() /
                       ("perfpred_" + tag + "_" + std::to_string(::getpid()) + "_" +
                        std::to_string(counter++));
  fs::create_directories(dir);
  return dir;
}

inline std::string lang_code(int i) {
  std::string code = "l";
  if (i < 10) code += "0";
  return code + std::to_string(i);
}

struct RegistryParams {
  int n_langs = 6;
  int wals_bases = 6;         // base features; each has 2 values  -> 2x ids
  int types_per_lang = 40;
  int type_alphabet = 120;
  int vec_dim = 8;
  double vec_missing_prob = 0.0;
  std::uint64_t seed = 1;
};

// Languages l00..l{n-1} with pretraining sizes spread over 10^4..10^9,
// one-hot WALS values, small type tables and complete-ish syntax vectors.
inline LanguageRegistry make_registry(const RegistryParams& p) {
  SeededRng rng(p.seed);
  LanguageRegistry reg;
  std::vector<std::string> universe;
  for (int b = 0; b < p.wals_bases; ++b) {
    const std::string base = std::to_string(20 + b) + "A";
    universe.push_back(base + "=va");
    universe.push_back(base + "=vb");
  }
  reg.catalog = make_catalog(universe);

  for (int i = 0; i < p.n_langs; ++i) {
    LanguageRecord rec;
    rec.code = lang_code(i);
    const double exponent =
        p.n_langs == 1 ? 6.0 : 4.0 + 5.0 * static_cast<double>(i) / (p.n_langs - 1);
    rec.pretraining_tokens = static_cast<std::int64_t>(std::llround(std::pow(10.0, exponent)));

    for (int b = 0; b < p.wals_bases; ++b) {
      const double roll = rng.unit();
      if (roll < 0.4)
        rec.wals_features.insert(std::to_string(20 + b) + "A=va");
      else if (roll < 0.8)
        rec.wals_features.insert(std::to_string(20 + b) + "A=vb");
      // else the entry is sparse for this language
    }

    std::vector<int> alphabet(static_cast<std::size_t>(p.type_alphabet));
    for (std::size_t t = 0; t < alphabet.size(); ++t) alphabet[t] = static_cast<int>(t);
    const auto picked = rng.sample(alphabet, static_cast<std::size_t>(p.types_per_lang));
    for (int t : picked) {
      std::string type = "t";
      if (t < 100) type += "0";
      if (t < 10) type += "0";
      rec.type_counts[type + std::to_string(t)] =
          1 + static_cast<std::int64_t>(rng.next_below(20));
    }

    SyntaxVector sv;
    sv.values = Eigen::VectorXd::Zero(p.vec_dim);
    sv.present = Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(p.vec_dim, false);
    for (int d = 0; d < p.vec_dim; ++d) {
      if (rng.unit() < p.vec_missing_prob) continue;
      sv.values[d] = 0.05 + 0.95 * rng.unit();
      sv.present[d] = true;
    }
    rec.syntax = std::move(sv);
    reg.languages.emplace(rec.code, std::move(rec));
  }
  validate_registry(reg);
  return reg;
}

struct CorpusFiles {
  fs::path dir;
  std::string languages, wals, types_dir, vectors;
};

inline CorpusFiles write_registry_files(const LanguageRegistry& reg, const std::string& tag) {
  CorpusFiles files;
  files.dir = fresh_dir(tag);
  files.languages = (files.dir / "languages.csv").string();
  files.wals = (files.dir / "wals.csv").string();
  files.types_dir = (files.dir / "types").string();
  files.vectors = (files.dir / "vectors.csv").string();
  save_language_registry(reg, files.languages, files.wals, files.types_dir, files.vectors);
  return files;
}

// (log10 tokens - 4) / 5: 0 at 10^4, 1 at 10^9.
inline double data_size_z(const LanguageRegistry& reg, const std::string& code) {
  return (data_size_feature(reg.at(code)) - 4.0) / 5.0;
}

inline ScoreTable make_single_table(
    const LanguageRegistry& reg,
    const std::function<double(const std::string& pivot, const std::string& target)>& fn) {
  ScoreTable table;
  table.mode = ScoreMode::SinglePivot;
  for (const auto& [pivot, unused_p] : reg.languages) {
    for (const auto& [target, unused_t] : reg.languages) {
      ScoreEntry e;
      e.key = pivot;
      e.target = target;
      e.score = clamp01(fn(pivot, target));
      table.entries.push_back(std::move(e));
    }
    table.pivot_langs.push_back(pivot);
    table.target_langs.push_back(pivot);
  }
  return table;
}

struct MultiParams {
  int n_configs = 50;
  double zero_prob = 0.5;
  double amount_lo = 500.0;
  double amount_hi = 20000.0;
  std::uint64_t seed = 2;
};

inline std::string config_id(int i) {
  std::string id = "c";
  if (i < 1000) id += "0";
  if (i < 100) id += "0";
  if (i < 10) id += "0";
  return id + std::to_string(i);
}

inline ScoreTable make_multi_table(
    const LanguageRegistry& reg, const MultiParams& mp,
    const std::function<double(const Eigen::VectorXd& config, const std::string& target)>& fn) {
  SeededRng rng(mp.seed);
  ScoreTable table;
  table.mode = ScoreMode::MultiPivot;
  for (const auto& [code, rec] : reg.languages) {
    table.pivot_langs.push_back(code);
    table.target_langs.push_back(code);
  }
  const auto p = static_cast<Eigen::Index>(table.pivot_langs.size());
  for (int c = 0; c < mp.n_configs; ++c) {
    Eigen::VectorXd cfg = Eigen::VectorXd::Zero(p);
    double total = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (rng.unit() < mp.zero_prob) continue;
      cfg[j] = mp.amount_lo + (mp.amount_hi - mp.amount_lo) * rng.unit();
      total += cfg[j];
    }
    if (total == 0.0) cfg[static_cast<Eigen::Index>(rng.next_below(p))] = mp.amount_lo;
    table.configs.emplace(config_id(c), std::move(cfg));
  }
  for (const auto& [id, cfg] : table.configs) {
    for (const auto& target : table.target_langs) {
      ScoreEntry e;
      e.key = id;
      e.target = target;
      e.score = clamp01(fn(cfg, target));
      table.entries.push_back(std::move(e));
    }
  }
  return table;
}

// Box-Muller; platform-independent unlike std::normal_distribution.
inline double gaussian(SeededRng& rng, double sigma) {
  double u1 = rng.unit();
  while (u1 <= 0.0) u1 = rng.unit();
  const double u2 = rng.unit();
  return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

// ---------------------------------------------------------------------------
// Reference implementations, written independently of the library paths they
// check.
// ---------------------------------------------------------------------------

// Filtered-Jaccard via std::set arithmetic.
inline double jaccard_oracle(const LanguageRecord& a, const LanguageRecord& b,
                             std::int64_t min_count) {
  std::set<std::string> fa, fb;
  for (const auto& [type, count] : a.type_counts)
    if (count >= min_count) fa.insert(type);
  for (const auto& [type, count] : b.type_counts)
    if (count >= min_count) fb.insert(type);
  std::set<std::string> uni = fa;
  uni.insert(fb.begin(), fb.end());
  if (uni.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& t : fa)
    if (fb.count(t)) ++inter;
  return static_cast<double>(inter) / static_cast<double>(uni.size());
}

// Exhaustive CART search over every (feature, midpoint threshold) candidate.
struct OracleNode {
  bool leaf = true;
  double value = 0.0;
  int feature = -1;
  double threshold = 0.0;
  std::unique_ptr<OracleNode> left, right;
};

inline std::unique_ptr<OracleNode> oracle_tree(const Eigen::MatrixXd& X,
                                               const Eigen::VectorXd& r,
                                               const std::vector<int>& rows, int depth,
                                               const TrainParams& params) {
  auto node = std::make_unique<OracleNode>();
  const auto n = static_cast<Eigen::Index>(rows.size());
  double sum = 0.0, sum_sq = 0.0;
  for (int i : rows) {
    sum += r[i];
    sum_sq += r[i] * r[i];
  }
  node->value = sum / static_cast<double>(n);
  if (depth >= params.max_depth) return node;
  if (n < 2 * static_cast<Eigen::Index>(params.min_samples_leaf)) return node;
  double lo = r[rows[0]], hi = r[rows[0]];
  for (int i : rows) {
    lo = std::min(lo, r[i]);
    hi = std::max(hi, r[i]);
  }
  if (lo == hi) return node;
  const double parent_sse = sum_sq - sum * sum / static_cast<double>(n);

  double best_gain = -std::numeric_limits<double>::infinity();
  int best_feature = -1;
  double best_threshold = 0.0;
  for (Eigen::Index f = 0; f < X.cols(); ++f) {
    std::vector<double> values;
    for (int i : rows) values.push_back(X(i, f));
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t k = 0; k + 1 < values.size(); ++k) {
      const double threshold = 0.5 * (values[k] + values[k + 1]);
      double lsum = 0.0, lsum_sq = 0.0;
      Eigen::Index nl = 0;
      double rsum = 0.0, rsum_sq = 0.0;
      Eigen::Index nr = 0;
      for (int i : rows) {
        if (X(i, f) < threshold) {
          lsum += r[i];
          lsum_sq += r[i] * r[i];
          ++nl;
        } else {
          rsum += r[i];
          rsum_sq += r[i] * r[i];
          ++nr;
        }
      }
      if (nl < params.min_samples_leaf || nr < params.min_samples_leaf) continue;
      const double gain = parent_sse -
                          (lsum_sq - lsum * lsum / static_cast<double>(nl)) -
                          (rsum_sq - rsum * rsum / static_cast<double>(nr));
      if (gain > best_gain) {
        best_gain = gain;
        best_feature = static_cast<int>(f);
        best_threshold = threshold;
      }
    }
  }
  if (!(best_gain > params.min_gain)) return node;

  std::vector<int> left_rows, right_rows;
  for (int i : rows) {
    if (X(i, best_feature) < best_threshold) left_rows.push_back(i);
    else right_rows.push_back(i);
  }
  node->leaf = false;
  node->feature = best_feature;
  node->threshold = best_threshold;
  node->left = oracle_tree(X, r, left_rows, depth + 1, params);
  node->right = oracle_tree(X, r, right_rows, depth + 1, params);
  return node;
}

// Structural equality: same splits (bit-exact thresholds) and leaf values.
inline bool trees_equal(const Tree& tree, int index, const OracleNode& oracle) {
  const TreeNode& n = tree.nodes[static_cast<std::size_t>(index)];
  if (n.is_leaf() != oracle.leaf) return false;
  if (n.is_leaf()) return n.value == oracle.value;
  if (n.feature != oracle.feature || n.threshold != oracle.threshold) return false;
  return trees_equal(tree, n.left, *oracle.left) && trees_equal(tree, n.right, *oracle.right);
}

// Dyadic targets (k/8) and power-of-two row counts keep every sum in both
// the builder and the oracle exact, so bit-equality is meaningful.
struct TinyDataset {
  FeatureMatrix X;
  Eigen::VectorXd y;
};

inline TinyDataset make_tiny_dataset(SeededRng& rng) {
  const int sizes[] = {4, 8, 16};
  const auto n = static_cast<Eigen::Index>(sizes[rng.next_below(3)]);
  const auto f = static_cast<Eigen::Index>(1 + rng.next_below(3));
  TinyDataset d;
  d.X.values.resize(n, f);
  for (Eigen::Index j = 0; j < f; ++j) {
    d.X.names.push_back("f" + std::to_string(j));
    for (Eigen::Index i = 0; i < n; ++i) d.X.values(i, j) = rng.unit();
  }
  d.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i)
    d.y[i] = static_cast<double>(rng.next_below(33)) / 8.0;
  return d;
}

}  // namespace testutil
