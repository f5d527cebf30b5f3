#include "intstab/stats.hpp"

#include "intstab/special_functions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace intstab::stats {
namespace {

// Studentised range quantiles at infinite degrees of freedom divided by
// sqrt(2), k = 2..20 (Demsar 2006, Table 5; recomputed with scipy).
constexpr std::array<double, 19> kQ05 = {1.960, 2.344, 2.569, 2.728, 2.850, 2.948, 3.031, 3.102, 3.164, 3.219,
                                         3.268, 3.313, 3.354, 3.391, 3.426, 3.458, 3.489, 3.517, 3.544};
constexpr std::array<double, 19> kQ10 = {1.645, 2.052, 2.291, 2.460, 2.589, 2.693, 2.780, 2.855, 2.920, 2.978,
                                         3.030, 3.077, 3.120, 3.159, 3.196, 3.230, 3.261, 3.291, 3.319};

}  // namespace

std::vector<double> rank_ascending(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
        i = j + 1;
    }
    return ranks;
}

RankTable average_ranks(const std::vector<std::vector<double>>& values, bool higher_is_better,
                        std::vector<std::string> methods, std::vector<std::string> datasets) {
    if (values.size() < 2) throw std::invalid_argument("average_ranks: need at least two datasets");
    const std::size_t k = values.front().size();
    if (k < 2) throw std::invalid_argument("average_ranks: need at least two methods");
    RankTable t;
    t.values = values;
    t.higher_is_better = higher_is_better;
    t.avg_ranks.assign(k, 0.0);
    for (const auto& row : values) {
        if (row.size() != k) throw std::invalid_argument("average_ranks: ragged table");
        std::vector<double> keyed(row);
        if (!higher_is_better) {
            for (double& v : keyed) v = -v;
        }
        auto r = rank_ascending(keyed);
        for (std::size_t j = 0; j < k; ++j) t.avg_ranks[j] += r[j];
        t.ranks.push_back(std::move(r));
    }
    for (double& r : t.avg_ranks) r /= static_cast<double>(values.size());
    if (methods.empty()) {
        for (std::size_t j = 0; j < k; ++j) methods.push_back("m" + std::to_string(j + 1));
    }
    if (datasets.empty()) {
        for (std::size_t i = 0; i < values.size(); ++i) datasets.push_back("d" + std::to_string(i + 1));
    }
    if (methods.size() != k || datasets.size() != values.size()) throw std::invalid_argument("average_ranks: label count");
    t.methods = std::move(methods);
    t.datasets = std::move(datasets);
    return t;
}

FriedmanResult friedman(const RankTable& table, bool iman_davenport) {
    const double n = static_cast<double>(table.ranks.size());
    const double k = static_cast<double>(table.avg_ranks.size());
    if (n < 2 || k < 2) throw std::invalid_argument("friedman: need N >= 2 and k >= 2");
    double sum_sq = 0;
    for (double r : table.avg_ranks) sum_sq += r * r;
    FriedmanResult res;
    res.chi2 = std::max(0.0, 12.0 * n / (k * (k + 1)) * (sum_sq - k * (k + 1) * (k + 1) / 4.0));
    res.df = k - 1;
    res.p_value = math::chi2_sf(res.chi2, res.df);
    if (iman_davenport) {
        double denom = n * (k - 1) - res.chi2;
        if (denom > 0) {
            double ff = (n - 1) * res.chi2 / denom;
            res.iman_davenport = ff;
            res.iman_davenport_p = math::f_sf(ff, k - 1, (k - 1) * (n - 1));
        }
    }
    for (double level : {0.10, 0.05, 0.01, 0.001}) {
        if (res.p_value < level) res.reject_at.push_back(level);
    }
    return res;
}

double nemenyi_q(std::size_t k, double alpha) {
    if (k < 2 || k > 20) throw std::out_of_range("nemenyi: k must be in [2, 20]");
    if (std::abs(alpha - 0.05) < 1e-12) return kQ05[k - 2];
    if (std::abs(alpha - 0.10) < 1e-12) return kQ10[k - 2];
    throw std::out_of_range("nemenyi: alpha must be 0.05 or 0.10");
}

double nemenyi_cd(std::size_t k, std::size_t n, double alpha) {
    if (n < 1) throw std::invalid_argument("nemenyi: N must be >= 1");
    const double kk = static_cast<double>(k);
    return nemenyi_q(k, alpha) * std::sqrt(kk * (kk + 1) / (6.0 * static_cast<double>(n)));
}

std::vector<std::vector<std::size_t>> nemenyi_groups(std::span<const double> avg_ranks, double cd) {
    std::vector<std::size_t> order(avg_ranks.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return avg_ranks[a] < avg_ranks[b]; });
    std::vector<std::vector<std::size_t>> groups;
    std::size_t last_end = 0;  // exclusive end of the previous group
    for (std::size_t i = 0; i < order.size(); ++i) {
        std::size_t j = i;
        while (j + 1 < order.size() && avg_ranks[order[j + 1]] - avg_ranks[order[i]] <= cd + 1e-12) ++j;
        if (j + 1 <= last_end) continue;  // contained in the previous group
        groups.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i), order.begin() + static_cast<std::ptrdiff_t>(j + 1));
        last_end = j + 1;
    }
    return groups;
}

CorrelationTest pearson_corr_p(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("pearson: length mismatch");
    if (xs.size() < 3) throw std::invalid_argument("pearson: need at least three points");
    const double n = static_cast<double>(xs.size());
    double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx <= 0 || syy <= 0) return {0.0, 1.0};
    double r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    if (1.0 - std::abs(r) < 1e-15) return {r > 0 ? 1.0 : -1.0, 0.0};
    double t = r * std::sqrt((n - 2) / (1 - r * r));
    return {r, math::student_t_two_sided(t, n - 2)};
}

CorrelationTest spearman_corr_p(std::span<const double> xs, std::span<const double> ys) {
    auto rx = rank_ascending(xs);
    auto ry = rank_ascending(ys);
    return pearson_corr_p(rx, ry);
}

}  // namespace intstab::stats
