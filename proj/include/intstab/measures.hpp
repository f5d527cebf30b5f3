#pragma once

// Accuracy, overfitting and comparative measures between pairs of models.

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>

namespace intstab::measures {

/// Macro F1 over the classes present in y_true; 0/0 per-class F1 counts as 0.
double f1_macro(std::span<const int> y_true, std::span<const int> y_pred);

/// Per-class F1 weighted by support in y_true. Reported next to the macro
/// average, never used for overfitting.
double f1_weighted(std::span<const int> y_true, std::span<const int> y_pred);

/// (f1_train - f1_test) / f1_train, or 0 when f1_train is 0.
double overfitting(double f1_train, double f1_test);

/// |A & B| / |A | B| over 0/1 masks; 1 when both are empty.
double jaccard(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

struct Correlation {
    double value = 0;
    bool degenerate = false;  // a zero-variance input replaced the formula
};

/// Pearson correlation of two 0/1 masks. When either mask is constant:
/// 1 if the masks are identical, else 0 (flagged degenerate).
Correlation pearson_binary(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

/// Kendall tau-b between |coefficients| over the union of keys, absent keys
/// (and |w| <= 1e-9) taken as 0. When either side is entirely tied: 1 if the
/// two magnitude vectors are identical, else 0 (flagged degenerate).
Correlation kendall_tau(const std::map<std::string, double>& a, const std::map<std::string, double>& b);

/// tau-b on two equal-length value vectors; NaN when a side is fully tied.
double kendall_tau_b(std::span<const double> x, std::span<const double> y);

}  // namespace intstab::measures
