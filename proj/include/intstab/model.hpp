#pragma once

// One entry point over the three learner families. Each fitted model keeps
// the encoder or discretiser it was trained behind, so predict() takes plain
// datasets with the training feature schema.

#include "intstab/dataset.hpp"
#include "intstab/linear.hpp"
#include "intstab/rules.hpp"
#include "intstab/tree.hpp"

#include "json.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace intstab::learners {

enum class ModelFamily { tree, rules, linear };

std::string to_string(ModelFamily f);

struct ModelSpec {
    std::string id;
    ModelFamily family = ModelFamily::tree;
    TreeParams tree = TreeParams::c45();
    double min_gain = kDefaultMinGain;
    std::size_t bins = 4;
    LinearParams linear;

    /// c45, cart, foil, ols, ridge, lasso.
    static ModelSpec preset(const std::string& name);
};

struct FittedTree {
    TreeModel tree;
};

struct FittedRules {
    data::Discretizer discretizer;
    RuleSetModel rules;
};

struct FittedLinear {
    data::Encoder encoder;
    LinearModel linear;
};

struct FittedModel {
    ModelSpec spec;
    std::size_t feature_count = 0;
    std::vector<data::FeatureSpec> features;
    std::variant<FittedTree, FittedRules, FittedLinear> body;
};

struct StructuralSummary {
    std::vector<std::uint8_t> used_feature_mask;  // over the model's input features
    std::size_t used_count = 0;
    std::optional<std::size_t> node_count;
    std::optional<std::size_t> depth;
    std::optional<std::size_t> rule_count;
    std::optional<std::size_t> conjunct_total;
    /// Linear only: encoded column name ("feature" or "feature=category") -> w.
    std::optional<std::map<std::string, double>> coefficients;
};

FittedModel fit_model(const ModelSpec& spec, const data::Dataset& train);

/// Throws std::invalid_argument when `rows` does not match the training schema.
std::vector<int> predict(const FittedModel& model, const data::Dataset& rows);

StructuralSummary introspect(const FittedModel& model);

/// Tree as nested nodes, rules as conjunct lists, linear models as
/// coefficient maps keyed by encoded column name. Feature references use
/// feature names; categories and classes use their labels.
nlohmann::json to_json(const FittedModel& model);

}  // namespace intstab::learners
