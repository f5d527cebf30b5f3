#pragma once

// FOIL-style sequential covering over categorical features.

#include "intstab/dataset.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace intstab::learners {

struct Literal {
    std::size_t feature = 0;
    int category = 0;

    friend bool operator==(const Literal&, const Literal&) = default;
};

struct Rule {
    std::vector<Literal> conjuncts;
    int label = 0;
    std::size_t positives = 0;  // training coverage when the rule was induced
    std::size_t negatives = 0;

    bool matches(std::span<const double> row) const;
};

class RuleSetModel {
public:
    RuleSetModel() = default;
    RuleSetModel(std::vector<data::FeatureSpec> features, std::vector<std::string> class_names,
                 std::vector<Rule> rules, int default_class);

    const std::vector<Rule>& rules() const { return rules_; }
    int default_class() const { return default_class_; }
    const std::vector<data::FeatureSpec>& features() const { return features_; }
    const std::vector<std::string>& class_names() const { return class_names_; }

    /// First matching rule in induction order, else the default class.
    int predict_row(std::span<const double> row) const;
    std::vector<int> predict(const data::Dataset& d) const;

    std::size_t rule_count() const { return rules_.size(); }
    std::size_t conjunct_total() const;
    std::vector<std::uint8_t> used_features() const;

private:
    std::vector<data::FeatureSpec> features_;
    std::vector<std::string> class_names_;
    std::vector<Rule> rules_;
    int default_class_ = 0;
};

/// p1 * (log2(p1 / (p1 + n1)) - log2(p0 / (p0 + n0))); -inf when p1 == 0.
double foil_gain(double p0, double n0, double p1, double n1);

inline constexpr double kDefaultMinGain = 0.7;

/// Classes are handled rarest first. A rule grows by the literal of highest
/// gain until it covers no negatives; if no literal reaches `min_gain` first,
/// the partial rule is dropped and induction for that class ends.
/// Throws data::DataError when a feature is not categorical.
RuleSetModel fit_foil(const data::Dataset& train, double min_gain = kDefaultMinGain);

}  // namespace intstab::learners
