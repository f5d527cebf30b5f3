#include "intstab/linear.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace intstab::learners {
namespace {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double soft_threshold(double x, double t) {
    if (x > t) return x - t;
    if (x < -t) return x + t;
    return 0.0;
}

// Largest KKT violation of the lasso subgradient conditions.
double kkt_violation(const Matrix& x, const Eigen::VectorXd& residual, const Eigen::VectorXd& w, double alpha) {
    const double n = static_cast<double>(x.rows());
    double worst = 0;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        double g = x.col(j).dot(residual) / n;
        double v = w[j] == 0.0 ? std::max(0.0, std::abs(g) - alpha) : std::abs(g - alpha * (w[j] > 0 ? 1.0 : -1.0));
        worst = std::max(worst, v);
    }
    return worst;
}

}  // namespace

std::string to_string(LinearVariant v) {
    switch (v) {
        case LinearVariant::ols: return "ols";
        case LinearVariant::ridge: return "ridge";
        case LinearVariant::lasso: return "lasso";
    }
    return "ridge";
}

LinearModel::LinearModel(LinearParams params, std::vector<double> coefficients, double intercept,
                         std::vector<std::size_t> column_origin, std::vector<std::string> column_names,
                         std::size_t class_count, std::size_t sweeps)
    : params_(params),
      coefficients_(std::move(coefficients)),
      intercept_(intercept),
      column_origin_(std::move(column_origin)),
      column_names_(std::move(column_names)),
      class_count_(class_count),
      sweeps_(sweeps) {
    if (coefficients_.size() != column_origin_.size()) throw std::invalid_argument("linear: origin size mismatch");
}

double LinearModel::score_row(const data::EncodedDataset& x, std::size_t r) const {
    double s = intercept_;
    for (std::size_t j = 0; j < coefficients_.size(); ++j) s += coefficients_[j] * x.at(r, j);
    return s;
}

int LinearModel::decode(double score) const {
    double top = static_cast<double>(class_count_ == 0 ? 0 : class_count_ - 1);
    if (!std::isfinite(score)) score = 0;
    return static_cast<int>(std::lround(std::clamp(score, 0.0, top)));
}

std::vector<int> LinearModel::predict(const data::EncodedDataset& x) const {
    if (x.width != coefficients_.size()) throw std::invalid_argument("linear: encoded width mismatch");
    std::vector<int> out(x.rows);
    for (std::size_t r = 0; r < x.rows; ++r) out[r] = decode(score_row(x, r));
    return out;
}

std::vector<std::uint8_t> LinearModel::used_features(std::size_t feature_count) const {
    std::vector<std::uint8_t> mask(feature_count, 0);
    for (std::size_t j = 0; j < coefficients_.size(); ++j) {
        if (std::abs(coefficients_[j]) > kUsedCoefficient) mask.at(column_origin_[j]) = 1;
    }
    return mask;
}

LinearModel fit_linear(const data::EncodedDataset& train, const LinearParams& params) {
    if (train.rows == 0) throw std::invalid_argument("fit_linear: empty training set");
    if (params.alpha < 0) throw std::invalid_argument("fit_linear: alpha must be >= 0");
    const auto n = static_cast<Eigen::Index>(train.rows);
    const auto d = static_cast<Eigen::Index>(train.width);

    Matrix x = Eigen::Map<const Matrix>(train.matrix.data(), n, d);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = train.labels_int[static_cast<std::size_t>(i)];

    Eigen::RowVectorXd x_mean = Eigen::RowVectorXd::Zero(d);
    double y_mean = 0;
    if (params.fit_intercept) {
        x_mean = x.colwise().mean();
        y_mean = y.mean();
        x.rowwise() -= x_mean;
        y.array() -= y_mean;
    }

    Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
    std::size_t sweeps = 0;
    if (d > 0) {
        switch (params.variant) {
            case LinearVariant::ols:
                w = x.completeOrthogonalDecomposition().solve(y);
                break;
            case LinearVariant::ridge: {
                Eigen::MatrixXd gram = x.transpose() * x;
                gram.diagonal().array() += params.alpha;
                Eigen::VectorXd rhs = x.transpose() * y;
                if (params.alpha > 0) {
                    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
                    w = ldlt.solve(rhs);
                    // One refinement step tightens the normal-equation residual.
                    w += ldlt.solve(rhs - gram * w);
                } else {
                    w = x.completeOrthogonalDecomposition().solve(y);
                }
                break;
            }
            case LinearVariant::lasso: {
                const double nn = static_cast<double>(n);
                Eigen::VectorXd norms = x.colwise().squaredNorm().transpose() / nn;
                Eigen::VectorXd residual = y;
                while (sweeps < params.max_sweeps) {
                    ++sweeps;
                    double max_change = 0;
                    for (Eigen::Index j = 0; j < d; ++j) {
                        if (norms[j] <= 0) continue;
                        double old = w[j];
                        double rho = x.col(j).dot(residual) / nn + norms[j] * old;
                        double updated = soft_threshold(rho, params.alpha) / norms[j];
                        if (updated != old) {
                            residual -= (updated - old) * x.col(j);
                            w[j] = updated;
                            max_change = std::max(max_change, std::abs(updated - old));
                        }
                    }
                    if (max_change < params.tolerance &&
                        kkt_violation(x, residual, w, params.alpha) <= params.tolerance) {
                        break;
                    }
                }
                break;
            }
        }
    }

    double intercept = params.fit_intercept ? y_mean - x_mean.dot(w) : 0.0;
    return LinearModel(params, std::vector<double>(w.data(), w.data() + w.size()), intercept, train.column_origin,
                       train.column_names, train.class_count, sweeps);
}

}  // namespace intstab::learners
