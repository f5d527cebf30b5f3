#include "intstab/tree.hpp"

#include "intstab/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace intstab::learners {
namespace {

constexpr double kTolerance = 1e-12;

int majority(std::span<const double> hist) {
    return static_cast<int>(std::max_element(hist.begin(), hist.end()) - hist.begin());
}

double total(std::span<const double> hist) { return std::accumulate(hist.begin(), hist.end(), 0.0); }

// x log2 x with 0 log 0 = 0.
double xlogx(double x) { return x > 0 ? x * std::log2(x) : 0.0; }

struct Candidate {
    bool valid = false;
    SplitKind kind = SplitKind::leaf;
    std::size_t feature = 0;
    double threshold = 0;
    int category = -1;
    double score = 0;  // cart: impurity decrease; c45: gain ratio
    double gain = 0;   // c45 only
};

class Builder {
public:
    Builder(const data::Dataset& d, const TreeParams& p)
        : data_(d), params_(p), classes_(d.class_count()) {
        xlogx_.resize(d.rows() + 1);
        for (std::size_t i = 0; i <= d.rows(); ++i) xlogx_[i] = xlogx(static_cast<double>(i));
    }

    std::vector<TreeNode> build() {
        std::vector<std::size_t> all(data_.rows());
        std::iota(all.begin(), all.end(), 0);
        grow(all, 0);
        return std::move(nodes_);
    }

private:
    const data::Dataset& data_;
    const TreeParams& params_;
    std::size_t classes_;
    std::vector<TreeNode> nodes_;
    std::vector<double> xlogx_;

    double xlogx_count(double c) const { return xlogx_[static_cast<std::size_t>(c)]; }

    // Entropy of an integer histogram with total n, using the lookup table.
    double entropy_counts(const std::vector<double>& hist, double n) const {
        if (n <= 0) return 0.0;
        double s = 0;
        for (double c : hist) s += xlogx_count(c);
        return std::log2(n) - s / n;
    }

    std::vector<double> histogram(const std::vector<std::size_t>& idx) const {
        std::vector<double> h(classes_, 0.0);
        for (std::size_t r : idx) h[static_cast<std::size_t>(data_.label(r))] += 1.0;
        return h;
    }

    bool branch_sizes_ok(double left, double right) const {
        const double leaf = static_cast<double>(params_.min_samples_leaf);
        const double m = static_cast<double>(params_.min_cases);
        return left >= leaf && right >= leaf && left >= m && right >= m;
    }

    std::size_t grow(const std::vector<std::size_t>& idx, int depth) {
        const std::size_t id = nodes_.size();
        nodes_.emplace_back();
        {
            TreeNode& node = nodes_.back();
            node.histogram = histogram(idx);
            node.prediction = majority(node.histogram);
        }
        const auto hist = nodes_[id].histogram;
        const double n = static_cast<double>(idx.size());
        const bool pure = std::count_if(hist.begin(), hist.end(), [](double c) { return c > 0; }) <= 1;
        if (pure || idx.size() < params_.min_samples_split || idx.size() < 2 * params_.min_cases ||
            (params_.max_depth >= 0 && depth >= params_.max_depth)) {
            return id;
        }

        Candidate best = params_.mode == TreeMode::cart ? best_cart(idx, hist, n) : best_c45(idx, hist, n);
        if (!best.valid) return id;

        // Partition rows among the children.
        std::vector<std::vector<std::size_t>> parts;
        std::vector<int> child_categories;
        if (best.kind == SplitKind::threshold || best.kind == SplitKind::one_vs_rest) {
            parts.resize(2);
            for (std::size_t r : idx) {
                double v = data_.at(r, best.feature);
                bool left = best.kind == SplitKind::threshold ? v <= best.threshold
                                                              : static_cast<int>(v) == best.category;
                parts[left ? 0 : 1].push_back(r);
            }
        } else {
            const std::size_t k = data_.feature(best.feature).categories.size();
            std::vector<std::vector<std::size_t>> by_cat(k);
            for (std::size_t r : idx) by_cat[static_cast<std::size_t>(data_.at(r, best.feature))].push_back(r);
            for (std::size_t c = 0; c < k; ++c) {
                if (by_cat[c].empty()) continue;
                parts.push_back(std::move(by_cat[c]));
                child_categories.push_back(static_cast<int>(c));
            }
        }

        std::vector<std::size_t> children;
        for (const auto& part : parts) children.push_back(grow(part, depth + 1));

        TreeNode& node = nodes_[id];
        node.split = best.kind;
        node.feature = best.feature;
        node.threshold = best.threshold;
        node.category = best.category;
        node.child_categories = std::move(child_categories);
        node.children = std::move(children);
        return id;
    }

    std::vector<std::pair<double, int>> sorted_column(const std::vector<std::size_t>& idx, std::size_t f) const {
        std::vector<std::pair<double, int>> col;
        col.reserve(idx.size());
        for (std::size_t r : idx) col.emplace_back(data_.at(r, f), data_.label(r));
        std::sort(col.begin(), col.end());
        return col;
    }

    std::vector<std::vector<double>> category_histograms(const std::vector<std::size_t>& idx, std::size_t f) const {
        std::vector<std::vector<double>> h(data_.feature(f).categories.size(), std::vector<double>(classes_, 0.0));
        for (std::size_t r : idx) {
            h[static_cast<std::size_t>(data_.at(r, f))][static_cast<std::size_t>(data_.label(r))] += 1.0;
        }
        return h;
    }

    // ---- CART -------------------------------------------------------------

    Candidate best_cart(const std::vector<std::size_t>& idx, const std::vector<double>& hist, double n) const {
        double parent_sq = 0;
        for (double c : hist) parent_sq += c * c;
        const double parent_gini = 1.0 - parent_sq / (n * n);

        Candidate best;
        auto consider = [&](const Candidate& c) {
            // Zero-decrease splits are allowed on impure nodes (XOR needs one at the root).
            if (c.score > -kTolerance && (!best.valid || c.score > best.score + kTolerance)) best = c;
        };

        for (std::size_t f = 0; f < data_.cols(); ++f) {
            if (data_.feature(f).is_categorical()) {
                auto per_cat = category_histograms(idx, f);
                for (std::size_t c = 0; c < per_cat.size(); ++c) {
                    const auto& left = per_cat[c];
                    double nl = total(left);
                    double nr = n - nl;
                    if (nl <= 0 || nr <= 0 || !branch_sizes_ok(nl, nr)) continue;
                    double sql = 0, sqr = 0;
                    for (std::size_t k = 0; k < classes_; ++k) {
                        sql += left[k] * left[k];
                        double rk = hist[k] - left[k];
                        sqr += rk * rk;
                    }
                    double weighted = (nl - sql / nl + nr - sqr / nr) / n;
                    Candidate cand;
                    cand.valid = true;
                    cand.kind = SplitKind::one_vs_rest;
                    cand.feature = f;
                    cand.category = static_cast<int>(c);
                    cand.score = parent_gini - weighted;
                    consider(cand);
                }
                continue;
            }
            auto col = sorted_column(idx, f);
            std::vector<double> left(classes_, 0.0);
            std::vector<double> right = hist;
            double sql = 0;
            double sqr = parent_sq;
            for (std::size_t i = 0; i + 1 < col.size(); ++i) {
                auto y = static_cast<std::size_t>(col[i].second);
                sql += 2 * left[y] + 1;
                sqr -= 2 * right[y] - 1;
                left[y] += 1;
                right[y] -= 1;
                if (!(col[i].first < col[i + 1].first)) continue;
                double nl = static_cast<double>(i + 1);
                double nr = n - nl;
                if (!branch_sizes_ok(nl, nr)) continue;
                double weighted = (nl - sql / nl + nr - sqr / nr) / n;
                Candidate cand;
                cand.valid = true;
                cand.kind = SplitKind::threshold;
                cand.feature = f;
                cand.threshold = col[i].first + (col[i + 1].first - col[i].first) / 2;
                cand.score = parent_gini - weighted;
                consider(cand);
            }
        }
        return best;
    }

    // ---- C4.5 -------------------------------------------------------------

    Candidate best_c45(const std::vector<std::size_t>& idx, const std::vector<double>& hist, double n) const {
        const double parent_entropy = entropy_counts(hist, n);
        const double m = static_cast<double>(params_.min_cases);
        std::vector<Candidate> candidates;

        for (std::size_t f = 0; f < data_.cols(); ++f) {
            if (data_.feature(f).is_categorical()) {
                auto per_cat = category_histograms(idx, f);
                double children_entropy = 0;
                double split_sum = 0;
                std::size_t branches = 0;
                std::size_t big_branches = 0;
                for (const auto& h : per_cat) {
                    double nc = total(h);
                    if (nc <= 0) continue;
                    ++branches;
                    if (nc >= m) ++big_branches;
                    children_entropy += nc / n * entropy_counts(h, nc);
                    split_sum += xlogx_count(nc);
                }
                if (branches < 2 || big_branches < 2) continue;
                double gain = parent_entropy - children_entropy;
                double split_info = std::log2(n) - split_sum / n;
                Candidate cand;
                cand.valid = true;
                cand.kind = SplitKind::multiway;
                cand.feature = f;
                cand.gain = gain;
                cand.score = split_info > 0 ? gain / split_info : 0.0;
                candidates.push_back(cand);
                continue;
            }
            // Numeric: the threshold with maximal gain, then its gain ratio.
            auto col = sorted_column(idx, f);
            std::vector<double> left(classes_, 0.0);
            std::vector<double> right = hist;
            double sl = 0;
            double sr = 0;
            for (double c : hist) sr += xlogx_count(c);
            Candidate cand;
            double best_gain = -1;
            double best_split_info = 0;
            std::size_t tries = 0;
            for (std::size_t i = 0; i + 1 < col.size(); ++i) {
                auto y = static_cast<std::size_t>(col[i].second);
                sl += xlogx_count(left[y] + 1) - xlogx_count(left[y]);
                sr += xlogx_count(right[y] - 1) - xlogx_count(right[y]);
                left[y] += 1;
                right[y] -= 1;
                if (!(col[i].first < col[i + 1].first)) continue;
                double nl = static_cast<double>(i + 1);
                double nr = n - nl;
                if (!branch_sizes_ok(nl, nr)) continue;
                double hl = std::log2(nl) - sl / nl;
                double hr = std::log2(nr) - sr / nr;
                double gain = parent_entropy - (nl * hl + nr * hr) / n;
                ++tries;
                if (gain > best_gain + kTolerance) {
                    best_gain = gain;
                    best_split_info = std::log2(n) - (xlogx_count(nl) + xlogx_count(nr)) / n;
                    cand.valid = true;
                    cand.kind = SplitKind::threshold;
                    cand.feature = f;
                    cand.threshold = col[i].first + (col[i + 1].first - col[i].first) / 2;
                }
            }
            if (cand.valid) {
                cand.gain = best_gain;
                if (params_.threshold_penalty && tries > 1) cand.gain -= std::log2(static_cast<double>(tries)) / n;
                cand.score = best_split_info > 0 ? cand.gain / best_split_info : 0.0;
                candidates.push_back(cand);
            }
        }

        // Only tests with positive gain are eligible; among them C4.5 keeps
        // those with at least average gain and maximises the gain ratio.
        std::erase_if(candidates, [](const Candidate& c) { return !(c.gain > kTolerance && c.score > kTolerance); });
        if (candidates.empty()) return {};
        double avg_gain = 0;
        for (const auto& c : candidates) avg_gain += c.gain;
        avg_gain /= static_cast<double>(candidates.size());
        Candidate best;
        for (const auto& c : candidates) {
            if (c.gain < avg_gain - kTolerance) continue;
            if (!best.valid || c.score > best.score + kTolerance) best = c;
        }
        return best;
    }
};

void collect_reachable(const std::vector<TreeNode>& nodes, std::size_t id, std::vector<std::size_t>& out) {
    out.push_back(id);
    for (std::size_t c : nodes[id].children) collect_reachable(nodes, c, out);
}

std::size_t depth_of(const std::vector<TreeNode>& nodes, std::size_t id) {
    std::size_t d = 0;
    for (std::size_t c : nodes[id].children) d = std::max(d, 1 + depth_of(nodes, c));
    return d;
}

}  // namespace

// ---------------------------------------------------------------------------

TreeParams TreeParams::cart() {
    TreeParams p;
    p.mode = TreeMode::cart;
    p.min_cases = 1;
    p.pruning = Pruning::none;
    return p;
}

TreeParams TreeParams::c45() {
    TreeParams p;
    p.mode = TreeMode::c45;
    p.min_cases = 2;
    p.pruning = Pruning::ebp;
    return p;
}

double TreeNode::cases() const { return total(histogram); }

double TreeNode::errors() const {
    return cases() - (histogram.empty() ? 0.0 : histogram[static_cast<std::size_t>(prediction)]);
}

TreeModel::TreeModel(TreeParams params, std::vector<data::FeatureSpec> features,
                     std::vector<std::string> class_names, std::vector<TreeNode> nodes)
    : params_(params), features_(std::move(features)), class_names_(std::move(class_names)), nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw std::invalid_argument("tree: no nodes");
}

int TreeModel::predict_row(std::span<const double> row) const {
    const TreeNode* node = &nodes_.front();
    while (!node->is_leaf()) {
        double v = row[node->feature];
        std::size_t next = 0;
        switch (node->split) {
            case SplitKind::threshold:
                next = v <= node->threshold ? 0 : 1;
                break;
            case SplitKind::one_vs_rest:
                next = static_cast<int>(v) == node->category ? 0 : 1;
                break;
            case SplitKind::multiway: {
                auto it = std::find(node->child_categories.begin(), node->child_categories.end(), static_cast<int>(v));
                if (it != node->child_categories.end()) {
                    next = static_cast<std::size_t>(it - node->child_categories.begin());
                } else {
                    // Category never seen at this node: follow the largest child.
                    double most = -1;
                    for (std::size_t i = 0; i < node->children.size(); ++i) {
                        double c = nodes_[node->children[i]].cases();
                        if (c > most) {
                            most = c;
                            next = i;
                        }
                    }
                }
                break;
            }
            case SplitKind::leaf:
                break;
        }
        node = &nodes_[node->children[next]];
    }
    return node->prediction;
}

std::vector<int> TreeModel::predict(const data::Dataset& d) const {
    if (d.cols() != features_.size()) throw std::invalid_argument("tree: feature count mismatch");
    std::vector<int> out(d.rows());
    for (std::size_t r = 0; r < d.rows(); ++r) out[r] = predict_row(d.row(r));
    return out;
}

std::vector<std::size_t> TreeModel::reachable() const {
    std::vector<std::size_t> out;
    collect_reachable(nodes_, 0, out);
    return out;
}

std::size_t TreeModel::node_count() const { return reachable().size(); }

std::size_t TreeModel::depth() const { return depth_of(nodes_, 0); }

std::size_t TreeModel::leaf_count() const {
    std::size_t leaves = 0;
    for (std::size_t id : reachable()) leaves += nodes_[id].is_leaf() ? 1 : 0;
    return leaves;
}

std::vector<std::uint8_t> TreeModel::used_features() const {
    std::vector<std::uint8_t> mask(features_.size(), 0);
    for (std::size_t id : reachable()) {
        if (!nodes_[id].is_leaf()) mask[nodes_[id].feature] = 1;
    }
    return mask;
}

std::vector<double> TreeModel::feature_importances() const {
    std::vector<double> imp(features_.size(), 0.0);
    for (std::size_t id : reachable()) {
        const TreeNode& node = nodes_[id];
        if (node.is_leaf()) continue;
        double decrease = node.cases() * gini(node.histogram);
        for (std::size_t c : node.children) decrease -= nodes_[c].cases() * gini(nodes_[c].histogram);
        imp[node.feature] += std::max(decrease, 0.0);
    }
    double sum = std::accumulate(imp.begin(), imp.end(), 0.0);
    if (sum > 0) {
        for (double& v : imp) v /= sum;
    }
    return imp;
}

// ---------------------------------------------------------------------------

double gini(std::span<const double> histogram) {
    double n = total(histogram);
    if (histogram.empty() || n <= 0) throw std::invalid_argument("gini: empty histogram");
    double sq = 0;
    for (double c : histogram) sq += (c / n) * (c / n);
    return 1.0 - sq;
}

double entropy(std::span<const double> histogram) {
    double n = total(histogram);
    if (n <= 0) return 0.0;
    double h = 0;
    for (double c : histogram) {
        if (c > 0) h -= (c / n) * std::log2(c / n);
    }
    return h;
}

double information_gain(std::span<const double> parent, std::span<const std::vector<double>> children) {
    double n = total(parent);
    if (n <= 0) return 0.0;
    double rest = 0;
    for (const auto& child : children) rest += total(child) / n * entropy(child);
    return entropy(parent) - rest;
}

double gain_ratio(std::span<const double> parent, std::span<const std::vector<double>> children) {
    std::vector<double> sizes;
    for (const auto& child : children) sizes.push_back(total(child));
    double split_info = entropy(sizes);
    if (split_info <= 0) return 0.0;
    return information_gain(parent, children) / split_info;
}

TreeModel fit_tree(const data::Dataset& train, const TreeParams& params) {
    if (train.rows() == 0) throw std::invalid_argument("fit_tree: empty training set");
    Builder builder(train, params);
    TreeModel tree(params, train.features(), train.class_names(), builder.build());
    if (params.pruning == Pruning::ebp) return ebp_prune(tree, params.confidence);
    return tree;
}

// ---------------------------------------------------------------------------
// Error-based pruning

double ebp_added_errors(double cases, double errors, double cf) {
    if (cf >= 1.0 || cases <= 0) return 0.0;
    if (errors < 1e-6) return cases * (1.0 - std::pow(cf, 1.0 / cases));
    if (errors < 0.9999) {
        double base = cases * (1.0 - std::pow(cf, 1.0 / cases));
        return base + errors * (ebp_added_errors(cases, 1.0, cf) - base);
    }
    if (errors + 0.5 >= cases) return 0.67 * (cases - errors);
    const double z = math::normal_quantile(1.0 - cf);
    const double coeff = z * z;
    const double e = errors + 0.5;
    double upper = (e + coeff / 2 + std::sqrt(coeff * (e * (1 - e / cases) + coeff / 4))) / (cases + coeff);
    return cases * upper - errors;
}

double ebp_leaf_estimate(double cases, double errors, double cf) {
    return errors + ebp_added_errors(cases, errors, cf);
}

TreeModel ebp_prune(const TreeModel& tree, double cf) {
    std::vector<TreeNode> nodes = tree.nodes();

    std::function<double(std::size_t)> prune = [&](std::size_t id) -> double {
        TreeNode& node = nodes[id];
        double as_leaf = ebp_leaf_estimate(node.cases(), node.errors(), cf);
        if (node.is_leaf()) return as_leaf;
        double subtree = 0;
        for (std::size_t c : std::vector<std::size_t>(node.children)) subtree += prune(c);
        TreeNode& again = nodes[id];
        if (as_leaf <= subtree + kTolerance) {
            again.split = SplitKind::leaf;
            again.children.clear();
            again.child_categories.clear();
            return as_leaf;
        }
        return subtree;
    };
    prune(0);

    // Compact to the reachable nodes.
    std::vector<std::size_t> order;
    collect_reachable(nodes, 0, order);
    std::vector<std::size_t> remap(nodes.size(), 0);
    for (std::size_t i = 0; i < order.size(); ++i) remap[order[i]] = i;
    std::vector<TreeNode> compact;
    compact.reserve(order.size());
    for (std::size_t id : order) {
        TreeNode node = nodes[id];
        for (auto& c : node.children) c = remap[c];
        compact.push_back(std::move(node));
    }
    return TreeModel(tree.params(), tree.features(), tree.class_names(), std::move(compact));
}

}  // namespace intstab::learners
