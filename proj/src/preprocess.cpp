#include "intstab/preprocess.hpp"

#include "intstab/random.hpp"
#include "intstab/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace intstab::preprocess {
namespace {

std::vector<std::size_t> iota_vector(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), 0);
    return v;
}

PreprocOutcome feature_outcome(const data::Dataset& train, std::vector<std::size_t> kept) {
    PreprocOutcome out;
    out.feature_mask.assign(train.cols(), 0);
    for (std::size_t f : kept) out.feature_mask[f] = 1;
    out.transformed_train = train.select_features(kept);
    out.kept_features = std::move(kept);
    out.source_rows.resize(train.rows());
    std::iota(out.source_rows.begin(), out.source_rows.end(), 0);
    out.instance_multiplicity.assign(train.rows(), 1);
    return out;
}

// Rows of `train` listed in source_rows (synthetic rows supplied separately).
PreprocOutcome instance_outcome(const data::Dataset& train, const std::vector<std::size_t>& rows) {
    PreprocOutcome out;
    out.transformed_train = train.subset(rows);
    out.feature_mask.assign(train.cols(), 1);
    out.kept_features = iota_vector(train.cols());
    out.instance_multiplicity.assign(train.rows(), 0);
    for (std::size_t r : rows) {
        out.source_rows.push_back(static_cast<std::ptrdiff_t>(r));
        ++out.instance_multiplicity[r];
    }
    return out;
}

std::vector<std::vector<std::size_t>> rows_by_class(const data::Dataset& d) {
    std::vector<std::vector<std::size_t>> by(d.class_count());
    for (std::size_t r = 0; r < d.rows(); ++r) by[static_cast<std::size_t>(d.label(r))].push_back(r);
    return by;
}

std::size_t present_classes(const std::vector<std::vector<std::size_t>>& by) {
    return static_cast<std::size_t>(std::count_if(by.begin(), by.end(), [](const auto& v) { return !v.empty(); }));
}

}  // namespace

std::string to_string(PreprocKind kind) {
    switch (kind) {
        case PreprocKind::identity: return "identity";
        case PreprocKind::skb: return "skb";
        case PreprocKind::sp: return "sp";
        case PreprocKind::rfe: return "rfe";
        case PreprocKind::rus: return "rus";
        case PreprocKind::ros: return "ros";
        case PreprocKind::smote: return "smote";
    }
    return "identity";
}

PreprocKind parse_kind(const std::string& name) {
    for (auto k : {PreprocKind::identity, PreprocKind::skb, PreprocKind::sp, PreprocKind::rfe, PreprocKind::rus,
                   PreprocKind::ros, PreprocKind::smote}) {
        if (to_string(k) == name) return k;
    }
    if (name == "none" || name == "-") return PreprocKind::identity;
    throw std::invalid_argument("unknown preprocessing kind: " + name);
}

void PreprocSpec::validate() const {
    if (k < 1) throw std::invalid_argument("skb: k must be >= 1");
    if (!(percentile > 0.0 && percentile <= 100.0)) throw std::invalid_argument("sp: percentile must be in (0, 100]");
    if (neighbors < 1) throw std::invalid_argument("smote: neighbors must be >= 1");
    if (target && *target < 1) throw std::invalid_argument("rfe: target must be >= 1");
}

bool PreprocSpec::is_feature_selection() const {
    return kind == PreprocKind::skb || kind == PreprocKind::sp || kind == PreprocKind::rfe;
}

bool PreprocSpec::is_instance_selection() const {
    return kind == PreprocKind::rus || kind == PreprocKind::ros || kind == PreprocKind::smote;
}

// ---------------------------------------------------------------------------

double anova_f(std::span<const std::vector<double>> groups) {
    if (groups.size() < 2) throw std::invalid_argument("anova_f: need at least two groups");
    double total = 0;
    std::size_t n = 0;
    for (const auto& g : groups) {
        if (g.empty()) throw std::invalid_argument("anova_f: empty group");
        total += std::accumulate(g.begin(), g.end(), 0.0);
        n += g.size();
    }
    const double grand = total / static_cast<double>(n);
    double ss_between = 0;
    double ss_within = 0;
    for (const auto& g : groups) {
        double mean = std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(g.size());
        ss_between += static_cast<double>(g.size()) * (mean - grand) * (mean - grand);
        for (double v : g) ss_within += (v - mean) * (v - mean);
    }
    const double df_between = static_cast<double>(groups.size() - 1);
    const double df_within = static_cast<double>(n - groups.size());
    if (ss_within <= 0 || df_within <= 0) return ss_between > 0 ? kMaxF : 0.0;
    double f = (ss_between / df_between) / (ss_within / df_within);
    return std::min(f, kMaxF);
}

std::vector<double> feature_scores(const data::Dataset& train) {
    const auto by = rows_by_class(train);
    std::vector<const std::vector<std::size_t>*> present;
    for (const auto& rows : by) {
        if (!rows.empty()) present.push_back(&rows);
    }
    std::vector<double> scores(train.cols(), 0.0);
    if (present.size() < 2) return scores;

    std::vector<std::vector<double>> groups(present.size());
    for (std::size_t f = 0; f < train.cols(); ++f) {
        const auto& spec = train.feature(f);
        if (!spec.is_categorical()) {
            for (std::size_t g = 0; g < present.size(); ++g) {
                groups[g].clear();
                for (std::size_t r : *present[g]) groups[g].push_back(train.at(r, f));
            }
            scores[f] = anova_f(groups);
            continue;
        }
        double best = 0;
        for (std::size_t c = 0; c < spec.categories.size(); ++c) {
            for (std::size_t g = 0; g < present.size(); ++g) {
                groups[g].clear();
                for (std::size_t r : *present[g]) {
                    groups[g].push_back(static_cast<std::size_t>(train.at(r, f)) == c ? 1.0 : 0.0);
                }
            }
            best = std::max(best, anova_f(groups));
        }
        scores[f] = best;
    }
    return scores;
}

std::vector<std::size_t> top_features(std::span<const double> scores, std::size_t count) {
    auto order = iota_vector(scores.size());
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    order.resize(std::min(count, order.size()));
    std::sort(order.begin(), order.end());
    return order;
}

PreprocOutcome identity(const data::Dataset& train) { return feature_outcome(train, iota_vector(train.cols())); }

PreprocOutcome select_k_best(const data::Dataset& train, std::size_t k) {
    if (k < 1) throw std::invalid_argument("skb: k must be >= 1");
    if (k >= train.cols()) return identity(train);
    return feature_outcome(train, top_features(feature_scores(train), k));
}

std::size_t percentile_count(std::size_t d, double percentile) {
    auto count = static_cast<std::size_t>(std::ceil(static_cast<double>(d) * percentile / 100.0 - 1e-9));
    return std::clamp<std::size_t>(count, 1, std::max<std::size_t>(d, 1));
}

PreprocOutcome select_percentile(const data::Dataset& train, double percentile) {
    if (!(percentile > 0.0 && percentile <= 100.0)) throw std::invalid_argument("sp: percentile must be in (0, 100]");
    std::size_t count = percentile_count(train.cols(), percentile);
    if (count >= train.cols()) return identity(train);
    return feature_outcome(train, top_features(feature_scores(train), count));
}

PreprocOutcome rfe(const data::Dataset& train, std::size_t target) {
    if (target < 1 || target > train.cols()) throw std::invalid_argument("rfe: target must be in [1, d]");
    auto remaining = iota_vector(train.cols());
    const auto params = learners::TreeParams::cart();
    while (remaining.size() > target) {
        auto tree = learners::fit_tree(train.select_features(remaining), params);
        auto importance = tree.feature_importances();
        // Least important; on ties the higher index goes first.
        std::size_t worst = remaining.size() - 1;
        for (std::size_t j = remaining.size() - 1; j-- > 0;) {
            if (importance[j] < importance[worst]) worst = j;
        }
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(worst));
    }
    return feature_outcome(train, std::move(remaining));
}

PreprocOutcome random_undersample(const data::Dataset& train, std::uint64_t seed) {
    auto by = rows_by_class(train);
    if (present_classes(by) < 2) throw std::invalid_argument("rus: need at least two classes");
    std::size_t minority = train.rows();
    for (const auto& rows : by) {
        if (!rows.empty()) minority = std::min(minority, rows.size());
    }
    Rng rng(seed);
    std::vector<std::size_t> keep;
    for (auto& rows : by) {
        rng.shuffle(rows);
        keep.insert(keep.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(std::min(minority, rows.size())));
    }
    std::sort(keep.begin(), keep.end());
    return instance_outcome(train, keep);
}

PreprocOutcome random_oversample(const data::Dataset& train, std::uint64_t seed) {
    auto by = rows_by_class(train);
    if (present_classes(by) < 2) throw std::invalid_argument("ros: need at least two classes");
    std::size_t majority = 0;
    for (const auto& rows : by) majority = std::max(majority, rows.size());
    Rng rng(seed);
    auto rows = iota_vector(train.rows());
    for (const auto& members : by) {
        if (members.empty()) continue;
        for (std::size_t i = members.size(); i < majority; ++i) rows.push_back(members[rng.index(members.size())]);
    }
    return instance_outcome(train, rows);
}

PreprocOutcome smote(const data::Dataset& train, std::size_t k_neighbors, std::uint64_t seed) {
    if (k_neighbors < 1) throw std::invalid_argument("smote: neighbors must be >= 1");
    auto by = rows_by_class(train);
    if (present_classes(by) < 2) throw std::invalid_argument("smote: need at least two classes");
    std::size_t majority = 0;
    for (const auto& rows : by) majority = std::max(majority, rows.size());
    for (const auto& rows : by) {
        if (rows.size() == 1 && majority > 1) throw std::invalid_argument("smote: minority class with a single member");
    }

    const std::size_t d = train.cols();
    std::vector<double> mean(d, 0.0), scale(d, 0.0);
    for (std::size_t f = 0; f < d; ++f) {
        if (train.feature(f).is_categorical()) continue;
        double s = 0, ss = 0;
        for (std::size_t r = 0; r < train.rows(); ++r) s += train.at(r, f);
        mean[f] = s / static_cast<double>(train.rows());
        for (std::size_t r = 0; r < train.rows(); ++r) ss += (train.at(r, f) - mean[f]) * (train.at(r, f) - mean[f]);
        double sd = std::sqrt(ss / static_cast<double>(train.rows()));
        scale[f] = sd > 0 ? 1.0 / sd : 0.0;
    }
    auto distance2 = [&](std::size_t a, std::size_t b) {
        double s = 0;
        for (std::size_t f = 0; f < d; ++f) {
            if (train.feature(f).is_categorical()) {
                if (train.at(a, f) != train.at(b, f)) s += 2.0;
            } else {
                double diff = (train.at(a, f) - train.at(b, f)) * scale[f];
                s += diff * diff;
            }
        }
        return s;
    };

    Rng rng(seed);
    std::vector<double> cells = train.cells();
    std::vector<int> labels = train.labels();
    PreprocOutcome out;
    out.source_rows.resize(train.rows());
    std::iota(out.source_rows.begin(), out.source_rows.end(), 0);

    for (std::size_t c = 0; c < by.size(); ++c) {
        const auto& members = by[c];
        if (members.empty() || members.size() >= majority) continue;
        const std::size_t k = std::min(k_neighbors, members.size() - 1);
        std::vector<std::vector<std::size_t>> neighbors(members.size());
        for (std::size_t i = 0; i < members.size(); ++i) {
            std::vector<std::pair<double, std::size_t>> cand;
            for (std::size_t j = 0; j < members.size(); ++j) {
                if (j != i) cand.emplace_back(distance2(members[i], members[j]), j);
            }
            std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end());
            for (std::size_t t = 0; t < k; ++t) neighbors[i].push_back(members[cand[t].second]);
        }
        for (std::size_t s = members.size(); s < majority; ++s) {
            std::size_t i = rng.index(members.size());
            std::size_t base = members[i];
            std::size_t nb = neighbors[i][rng.index(k)];
            double lambda = rng.uniform();
            for (std::size_t f = 0; f < d; ++f) {
                double v = train.at(base, f);
                if (!train.feature(f).is_categorical()) v += lambda * (train.at(nb, f) - v);
                cells.push_back(v);
            }
            labels.push_back(static_cast<int>(c));
            out.source_rows.push_back(-1);
        }
    }

    out.transformed_train = data::Dataset(train.features(), std::move(cells), std::move(labels), train.class_names());
    out.feature_mask.assign(d, 1);
    out.kept_features = iota_vector(d);
    out.instance_multiplicity.assign(train.rows(), 1);
    return out;
}

PreprocOutcome apply(const PreprocSpec& spec, const data::Dataset& train) {
    spec.validate();
    switch (spec.kind) {
        case PreprocKind::identity: return identity(train);
        case PreprocKind::skb: return select_k_best(train, spec.k);
        case PreprocKind::sp: return select_percentile(train, spec.percentile);
        case PreprocKind::rfe: {
            std::size_t target = spec.target.value_or(std::max<std::size_t>(train.cols() / 2, 1));
            return rfe(train, std::min(target, train.cols()));
        }
        case PreprocKind::rus: return random_undersample(train, spec.seed);
        case PreprocKind::ros: return random_oversample(train, spec.seed);
        case PreprocKind::smote: return smote(train, spec.neighbors, spec.seed);
    }
    return identity(train);
}

PreprocOutcome apply_chain(std::span<const PreprocSpec> steps, const data::Dataset& train) {
    PreprocOutcome acc = identity(train);
    for (const auto& step : steps) {
        PreprocOutcome next = apply(step, acc.transformed_train);
        PreprocOutcome merged;
        merged.transformed_train = std::move(next.transformed_train);
        merged.feature_mask.assign(train.cols(), 0);
        for (std::size_t j : next.kept_features) {
            merged.kept_features.push_back(acc.kept_features[j]);
            merged.feature_mask[acc.kept_features[j]] = 1;
        }
        merged.instance_multiplicity.assign(train.rows(), 0);
        for (std::ptrdiff_t src : next.source_rows) {
            std::ptrdiff_t original = src < 0 ? -1 : acc.source_rows[static_cast<std::size_t>(src)];
            merged.source_rows.push_back(original);
            if (original >= 0) ++merged.instance_multiplicity[static_cast<std::size_t>(original)];
        }
        acc = std::move(merged);
    }
    return acc;
}

}  // namespace intstab::preprocess
