#pragma once

// Feature selection (SKB, SP, RFE) and instance selection (RUS, ROS, SMOTE)
// applied to a training split before a model is fitted.

#include "intstab/dataset.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace intstab::preprocess {

enum class PreprocKind { identity, skb, sp, rfe, rus, ros, smote };

std::string to_string(PreprocKind kind);
PreprocKind parse_kind(const std::string& name);

struct PreprocSpec {
    PreprocKind kind = PreprocKind::identity;
    std::size_t k = 10;                  // skb: features kept
    double percentile = 10.0;            // sp: percentage kept, (0, 100]
    std::optional<std::size_t> target;   // rfe: features kept; default d / 2
    std::size_t neighbors = 5;           // smote
    std::uint64_t seed = 0;

    /// Throws std::invalid_argument when a parameter is out of range.
    void validate() const;
    bool is_feature_selection() const;
    bool is_instance_selection() const;
};

struct PreprocOutcome {
    data::Dataset transformed_train;
    /// 0/1 over the input features; all ones for IS and identity.
    std::vector<std::uint8_t> feature_mask;
    /// Input feature index of every transformed column, ascending.
    std::vector<std::size_t> kept_features;
    /// Input row each output row was copied from; -1 for synthetic rows.
    std::vector<std::ptrdiff_t> source_rows;
    /// Copies of each input row in the output (synthetic rows not counted).
    std::vector<std::size_t> instance_multiplicity;
};

/// Larger than any finite F-value a real dataset produces; returned when the
/// within-group variance is zero but the group means differ.
inline constexpr double kMaxF = 1e12;

/// One-way ANOVA F statistic. Requires at least two non-empty groups.
double anova_f(std::span<const std::vector<double>> groups);

/// Per-feature ANOVA score: numeric features on raw values, categorical
/// features as the max F over their one-hot indicator columns. Classes absent
/// from `train` are ignored; fewer than two present classes scores 0.
std::vector<double> feature_scores(const data::Dataset& train);

/// Indices of the `count` highest-scoring features (ties: lower index first),
/// returned in ascending index order.
std::vector<std::size_t> top_features(std::span<const double> scores, std::size_t count);

PreprocOutcome identity(const data::Dataset& train);
PreprocOutcome select_k_best(const data::Dataset& train, std::size_t k);
PreprocOutcome select_percentile(const data::Dataset& train, double percentile);
/// ceil(d * pct / 100), at least 1.
std::size_t percentile_count(std::size_t d, double percentile);
PreprocOutcome rfe(const data::Dataset& train, std::size_t target);
PreprocOutcome random_undersample(const data::Dataset& train, std::uint64_t seed);
PreprocOutcome random_oversample(const data::Dataset& train, std::uint64_t seed);
PreprocOutcome smote(const data::Dataset& train, std::size_t k_neighbors, std::uint64_t seed);

/// Dispatch on spec.kind.
PreprocOutcome apply(const PreprocSpec& spec, const data::Dataset& train);

/// Apply steps in order. Masks, kept_features, source_rows and multiplicities
/// all refer back to `train`.
PreprocOutcome apply_chain(std::span<const PreprocSpec> steps, const data::Dataset& train);

}  // namespace intstab::preprocess
