#include "intstab/rules.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace intstab::learners {

bool Rule::matches(std::span<const double> row) const {
    for (const auto& lit : conjuncts) {
        if (static_cast<int>(row[lit.feature]) != lit.category) return false;
    }
    return true;
}

RuleSetModel::RuleSetModel(std::vector<data::FeatureSpec> features, std::vector<std::string> class_names,
                           std::vector<Rule> rules, int default_class)
    : features_(std::move(features)),
      class_names_(std::move(class_names)),
      rules_(std::move(rules)),
      default_class_(default_class) {
    if (default_class_ < 0 || static_cast<std::size_t>(default_class_) >= class_names_.size()) {
        throw std::invalid_argument("rules: default class out of range");
    }
}

int RuleSetModel::predict_row(std::span<const double> row) const {
    for (const auto& rule : rules_) {
        if (rule.matches(row)) return rule.label;
    }
    return default_class_;
}

std::vector<int> RuleSetModel::predict(const data::Dataset& d) const {
    if (d.cols() != features_.size()) throw std::invalid_argument("rules: feature count mismatch");
    std::vector<int> out(d.rows());
    for (std::size_t r = 0; r < d.rows(); ++r) out[r] = predict_row(d.row(r));
    return out;
}

std::size_t RuleSetModel::conjunct_total() const {
    std::size_t total = 0;
    for (const auto& rule : rules_) total += rule.conjuncts.size();
    return total;
}

std::vector<std::uint8_t> RuleSetModel::used_features() const {
    std::vector<std::uint8_t> mask(features_.size(), 0);
    for (const auto& rule : rules_) {
        for (const auto& lit : rule.conjuncts) mask[lit.feature] = 1;
    }
    return mask;
}

double foil_gain(double p0, double n0, double p1, double n1) {
    if (p1 <= 0) return -std::numeric_limits<double>::infinity();
    return p1 * (std::log2(p1 / (p1 + n1)) - std::log2(p0 / (p0 + n0)));
}

RuleSetModel fit_foil(const data::Dataset& train, double min_gain) {
    for (const auto& f : train.features()) {
        if (!f.is_categorical()) throw data::DataError("foil: feature '" + f.name + "' is not categorical");
    }
    const std::size_t d = train.cols();
    const auto counts = train.class_counts();
    const int default_class = static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());

    std::vector<std::size_t> order(train.class_count());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return counts[a] < counts[b]; });

    std::vector<Rule> rules;
    for (std::size_t cls : order) {
        if (counts[cls] == 0) continue;
        std::vector<std::size_t> positives, negatives;
        for (std::size_t r = 0; r < train.rows(); ++r) {
            (static_cast<std::size_t>(train.label(r)) == cls ? positives : negatives).push_back(r);
        }

        while (!positives.empty()) {
            Rule rule;
            rule.label = static_cast<int>(cls);
            std::vector<std::size_t> cov_pos = positives;
            std::vector<std::size_t> cov_neg = negatives;
            std::vector<bool> used(d, false);

            while (!cov_neg.empty()) {
                double best_gain = -std::numeric_limits<double>::infinity();
                Literal best{};
                bool found = false;
                for (std::size_t f = 0; f < d; ++f) {
                    if (used[f]) continue;
                    const std::size_t k = train.feature(f).categories.size();
                    std::vector<double> p(k, 0.0), n(k, 0.0);
                    for (std::size_t r : cov_pos) p[static_cast<std::size_t>(train.at(r, f))] += 1;
                    for (std::size_t r : cov_neg) n[static_cast<std::size_t>(train.at(r, f))] += 1;
                    for (std::size_t v = 0; v < k; ++v) {
                        double g = foil_gain(static_cast<double>(cov_pos.size()), static_cast<double>(cov_neg.size()),
                                             p[v], n[v]);
                        if (g > best_gain) {
                            best_gain = g;
                            best = {f, static_cast<int>(v)};
                            found = true;
                        }
                    }
                }
                if (!found || best_gain < min_gain) break;
                rule.conjuncts.push_back(best);
                used[best.feature] = true;
                auto keep = [&](std::vector<std::size_t>& rows) {
                    std::erase_if(rows, [&](std::size_t r) { return static_cast<int>(train.at(r, best.feature)) != best.category; });
                };
                keep(cov_pos);
                keep(cov_neg);
            }

            if (rule.conjuncts.empty() || !cov_neg.empty() || cov_pos.empty()) break;
            rule.positives = cov_pos.size();
            rule.negatives = 0;
            std::erase_if(positives, [&](std::size_t r) { return rule.matches(train.row(r)); });
            rules.push_back(std::move(rule));
        }
    }
    return RuleSetModel(train.features(), train.class_names(), std::move(rules), default_class);
}

}  // namespace intstab::learners
