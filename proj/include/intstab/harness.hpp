#pragma once

// Repeated stratified cross-validation over a list of preprocessing chains,
// with per-fold metrics and aggregated stability measures.

#include "intstab/dataset.hpp"
#include "intstab/model.hpp"
#include "intstab/preprocess.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace intstab::harness {

struct PreprocEntry {
    std::string id;
    std::vector<preprocess::PreprocSpec> chain;  // empty: identity

    bool is_identity() const;
    static PreprocEntry named(const std::string& kind);
};

struct ExperimentSpec {
    std::string dataset_id;
    learners::ModelSpec model;
    std::vector<PreprocEntry> preprocs;
    std::size_t repetitions = 5;
    std::size_t folds = 10;
    std::uint64_t master_seed = 0;
    std::size_t jobs = 1;

    /// Throws std::invalid_argument: empty list, duplicate ids, identity not
    /// present exactly once, zero repetitions or folds.
    void validate() const;
};

struct CellMetrics {
    std::string dataset_id;
    std::string model_id;
    std::string preproc_id;
    std::size_t repetition = 0;  // 1-based
    std::size_t fold = 0;        // 1-based
    std::size_t train_rows = 0;  // after preprocessing
    std::size_t test_rows = 0;
    double f1_train = 0;
    double f1_test = 0;
    double overfit = 0;
    double f1_test_weighted = 0;
    std::vector<std::uint8_t> used_mask;  // over the original features
    std::size_t used_count = 0;
    double feature_ratio = 0;
    std::optional<std::size_t> node_count;
    std::optional<std::size_t> depth;
    std::optional<std::size_t> rule_count;
    std::optional<std::size_t> conjunct_total;
    std::optional<std::map<std::string, double>> coefficients;
    std::optional<std::string> error;  // set when the cell failed

    bool ok() const { return !error.has_value(); }
};

struct Summary {
    double mean = 0;
    double std = 0;  // population deviation
    double min = 0;
    double max = 0;
    std::size_t count = 0;
};

/// Mean, population deviation and range of `values`, summed in the given order.
Summary summarize(const std::vector<double>& values);

struct PreprocSummary {
    std::string preproc_id;
    std::size_t models = 0;      // successful cells
    std::size_t failures = 0;
    std::size_t pair_count = 0;  // models choose 2
    Summary f1_test;
    Summary f1_train;
    Summary overfit;
    Summary f1_test_weighted;
    /// used_features, feature_ratio, node_count, depth, rule_count, conjunct_total
    std::map<std::string, Summary> structural;
    /// jaccard, pearson and (linear models) kendall over all unordered pairs
    std::map<std::string, Summary> comparative;
    std::size_t pearson_degenerate_pairs = 0;
    std::size_t kendall_degenerate_pairs = 0;
};

struct StabilityReport {
    std::string dataset_id;
    std::string model_id;
    std::size_t feature_count = 0;
    std::size_t rows = 0;
    std::size_t repetitions = 0;
    std::size_t folds = 0;
    std::uint64_t master_seed = 0;
    std::vector<PreprocSummary> preprocs;  // in spec order
    std::vector<CellMetrics> cells;        // (repetition, fold, preproc) order

    const PreprocSummary& summary(const std::string& preproc_id) const;
};

/// Seed used by the fold plans of an experiment.
std::uint64_t fold_seed(std::uint64_t master_seed);
/// Seed of the (repetition, fold, preproc) cell; the chain's steps derive
/// theirs from it together with their own configured seed.
std::uint64_t cell_seed(std::uint64_t master_seed, std::size_t repetition, std::size_t fold,
                        const std::string& preproc_id);

StabilityReport evaluate_stability(const ExperimentSpec& spec, const data::Dataset& data);

/// Aggregates one preprocessing method's cells.
PreprocSummary aggregate(const std::string& preproc_id, const std::vector<const CellMetrics*>& cells);

struct SweepPoint {
    std::size_t m = 0;
    double node_mean = 0;
    double node_std = 0;
    double f1_mean = 0;
};

/// 2, 4, 8, ... below n/2, then n/2 itself.
std::vector<std::size_t> geometric_grid(std::size_t n, std::size_t start = 2);

/// Runs evaluate_stability with the identity preprocessing for each m.
std::vector<SweepPoint> sweep_min_cases(const ExperimentSpec& spec, const data::Dataset& data,
                                        const std::vector<std::size_t>& m_values);

}  // namespace intstab::harness
