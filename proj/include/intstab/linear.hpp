#pragma once

// Least squares on class integers: OLS, ridge and lasso.

#include "intstab/dataset.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace intstab::learners {

enum class LinearVariant { ols, ridge, lasso };

std::string to_string(LinearVariant v);

struct LinearParams {
    LinearVariant variant = LinearVariant::ridge;
    double alpha = 1.0;             // ignored for ols
    bool fit_intercept = true;      // unpenalised, handled by centring
    std::size_t max_sweeps = 1000;  // lasso
    double tolerance = 1e-6;        // lasso: max coefficient change per sweep
};

class LinearModel {
public:
    LinearModel() = default;
    LinearModel(LinearParams params, std::vector<double> coefficients, double intercept,
                std::vector<std::size_t> column_origin, std::vector<std::string> column_names,
                std::size_t class_count, std::size_t sweeps);

    const LinearParams& params() const { return params_; }
    const std::vector<double>& coefficients() const { return coefficients_; }
    double intercept() const { return intercept_; }
    const std::vector<std::size_t>& column_origin() const { return column_origin_; }
    const std::vector<std::string>& column_names() const { return column_names_; }
    std::size_t class_count() const { return class_count_; }
    /// Coordinate descent sweeps used (0 for closed-form fits).
    std::size_t sweeps() const { return sweeps_; }

    double score_row(const data::EncodedDataset& x, std::size_t r) const;
    /// Clamp the score to [0, C-1] and round to the nearest class.
    int decode(double score) const;
    std::vector<int> predict(const data::EncodedDataset& x) const;

    /// A coefficient counts as used when |w| > 1e-9; masks fold back through
    /// column_origin onto `feature_count` input features.
    std::vector<std::uint8_t> used_features(std::size_t feature_count) const;

private:
    LinearParams params_;
    std::vector<double> coefficients_;
    double intercept_ = 0;
    std::vector<std::size_t> column_origin_;
    std::vector<std::string> column_names_;
    std::size_t class_count_ = 0;
    std::size_t sweeps_ = 0;
};

inline constexpr double kUsedCoefficient = 1e-9;

/// Regresses labels_int on the encoded matrix.
///   ols/ridge: (X'X + alpha I) w = X'y on centred data (pseudo-inverse when
///              alpha is 0, so rank-deficient designs get the minimum-norm w)
///   lasso:     cyclic coordinate descent on
///              (1/2n) ||y - Xw - b||^2 + alpha ||w||_1
LinearModel fit_linear(const data::EncodedDataset& train, const LinearParams& params);

}  // namespace intstab::learners
