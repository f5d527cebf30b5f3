#pragma once

// Average ranks, Friedman test, Nemenyi critical difference, and
// correlation coefficients with two-sided p-values.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace intstab::stats {

struct RankTable {
    std::vector<std::string> methods;   // k
    std::vector<std::string> datasets;  // N
    std::vector<std::vector<double>> values;  // N x k
    std::vector<std::vector<double>> ranks;   // N x k, rank k = best
    std::vector<double> avg_ranks;            // k
    bool higher_is_better = true;
};

/// Ranks 1..k per row with ties sharing their average rank. The best value
/// receives rank k. Requires N >= 2 and k >= 2.
RankTable average_ranks(const std::vector<std::vector<double>>& values, bool higher_is_better,
                        std::vector<std::string> methods = {}, std::vector<std::string> datasets = {});

/// Tie-averaged ascending ranks (smallest value gets 1).
std::vector<double> rank_ascending(std::span<const double> values);

struct FriedmanResult {
    double chi2 = 0;
    double df = 0;
    double p_value = 1;
    std::optional<double> iman_davenport;  // F statistic
    std::optional<double> iman_davenport_p;
    std::vector<double> reject_at;  // levels among {0.10, 0.05, 0.01, 0.001}
};

FriedmanResult friedman(const RankTable& table, bool iman_davenport = false);

/// Studentised range quantile divided by sqrt(2), k in [2, 20], alpha in
/// {0.05, 0.10}. Throws std::out_of_range otherwise.
double nemenyi_q(std::size_t k, double alpha);
double nemenyi_cd(std::size_t k, std::size_t n, double alpha);

/// Maximal runs of methods (sorted by average rank) whose rank span is
/// within cd. Each group lists method indices in rank order.
std::vector<std::vector<std::size_t>> nemenyi_groups(std::span<const double> avg_ranks, double cd);

struct CorrelationTest {
    double r = 0;
    double p_value = 1;
};

/// Pearson r with the two-sided t-test on n - 2 degrees of freedom. A
/// constant input gives (0, 1); |r| = 1 gives p = 0. Requires n >= 3.
CorrelationTest pearson_corr_p(std::span<const double> xs, std::span<const double> ys);
/// Pearson on tie-averaged ranks, same p-value approximation.
CorrelationTest spearman_corr_p(std::span<const double> xs, std::span<const double> ys);

}  // namespace intstab::stats
