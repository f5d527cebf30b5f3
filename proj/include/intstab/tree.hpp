#pragma once

// Decision tree learner with two modes:
//   cart - binary splits, Gini criterion, one-vs-rest categorical tests
//   c45  - gain ratio criterion, multiway categorical splits, binary numeric
//          thresholds, min-cases stop rule, optional error-based pruning

#include "intstab/dataset.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace intstab::learners {

enum class TreeMode { cart, c45 };
enum class Pruning { none, ebp };

struct TreeParams {
    TreeMode mode = TreeMode::c45;
    int max_depth = -1;              // -1: unlimited
    std::size_t min_samples_split = 2;
    std::size_t min_samples_leaf = 1;
    /// C4.5 -m: a node with fewer than 2m cases is a leaf, and a split is
    /// admissible only if at least two branches receive >= m cases.
    std::size_t min_cases = 2;
    Pruning pruning = Pruning::ebp;
    double confidence = 0.25;        // EBP confidence factor
    /// c45: subtract log2(candidate thresholds) / n from the gain of a
    /// numeric test (C4.5 release 8).
    bool threshold_penalty = false;

    static TreeParams cart();
    static TreeParams c45();
};

enum class SplitKind { leaf, threshold, one_vs_rest, multiway };

struct TreeNode {
    SplitKind split = SplitKind::leaf;
    std::size_t feature = 0;
    double threshold = 0;            // threshold: value <= threshold -> child 0
    int category = -1;               // one_vs_rest: equal -> child 0
    std::vector<int> child_categories;  // multiway: category of each child
    std::vector<std::size_t> children;
    std::vector<double> histogram;   // training class counts at the node
    int prediction = 0;              // majority class of histogram

    bool is_leaf() const { return split == SplitKind::leaf; }
    double cases() const;
    double errors() const;           // cases not of the majority class
};

class TreeModel {
public:
    TreeModel() = default;
    TreeModel(TreeParams params, std::vector<data::FeatureSpec> features,
              std::vector<std::string> class_names, std::vector<TreeNode> nodes);

    const TreeParams& params() const { return params_; }
    const std::vector<TreeNode>& nodes() const { return nodes_; }
    const TreeNode& root() const { return nodes_.front(); }
    const std::vector<data::FeatureSpec>& features() const { return features_; }
    const std::vector<std::string>& class_names() const { return class_names_; }

    int predict_row(std::span<const double> row) const;
    std::vector<int> predict(const data::Dataset& d) const;

    /// Nodes reachable from the root, leaves included.
    std::size_t node_count() const;
    /// Edges on the longest root-to-leaf path; 0 for a single leaf.
    std::size_t depth() const;
    std::size_t leaf_count() const;
    /// 0/1 per feature: tested by at least one reachable split.
    std::vector<std::uint8_t> used_features() const;
    /// Total weighted Gini decrease per feature, normalised to sum 1 (all
    /// zeros for a single leaf).
    std::vector<double> feature_importances() const;

    /// Reachable node ids in pre-order.
    std::vector<std::size_t> reachable() const;

private:
    TreeParams params_;
    std::vector<data::FeatureSpec> features_;
    std::vector<std::string> class_names_;
    std::vector<TreeNode> nodes_;
};

/// 1 - sum (n_c / n)^2. Throws std::invalid_argument for an empty histogram.
double gini(std::span<const double> histogram);
/// Shannon entropy in bits; 0 for an empty histogram.
double entropy(std::span<const double> histogram);
/// Information gain over split information; 0 when split information is 0.
double gain_ratio(std::span<const double> parent, std::span<const std::vector<double>> children);
double information_gain(std::span<const double> parent, std::span<const std::vector<double>> children);

TreeModel fit_tree(const data::Dataset& train, const TreeParams& params);

/// Extra errors C4.5 adds to `errors` observed among `cases` to obtain the
/// upper confidence limit at confidence factor `cf`. Returns 0 when cf >= 1.
double ebp_added_errors(double cases, double errors, double cf);
/// errors + ebp_added_errors: pessimistic error count of a leaf.
double ebp_leaf_estimate(double cases, double errors, double cf);

/// Bottom-up subtree replacement: an internal node becomes a leaf when its
/// own pessimistic estimate is <= the summed estimates of its (already
/// pruned) subtree leaves.
TreeModel ebp_prune(const TreeModel& tree, double cf);

}  // namespace intstab::learners
