#pragma once

// Dataset builders, random generators and brute-force oracles shared by the
// unit tests and the acceptance runner.

#include "intstab/dataset.hpp"
#include "intstab/random.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace intstab::testing {

inline std::vector<std::string> class_labels(std::size_t c) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < c; ++i) names.push_back(std::string(1, static_cast<char>('A' + i)));
    return names;
}

/// All-numeric dataset; features are named x0, x1, ...
inline data::Dataset numeric_dataset(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels,
                                     std::size_t classes = 2) {
    const std::size_t d = rows.empty() ? 0 : rows.front().size();
    std::vector<data::FeatureSpec> features;
    for (std::size_t j = 0; j < d; ++j) features.push_back({"x" + std::to_string(j), data::FeatureKind::numeric, {}});
    std::vector<double> cells;
    for (const auto& r : rows) cells.insert(cells.end(), r.begin(), r.end());
    return data::Dataset(features, cells, labels, class_labels(classes));
}

/// All-categorical dataset; feature j has `arity[j]` categories "v0", "v1", ...
inline data::Dataset categorical_dataset(const std::vector<std::vector<int>>& rows, const std::vector<int>& labels,
                                         const std::vector<std::size_t>& arity, std::size_t classes = 2) {
    std::vector<data::FeatureSpec> features;
    for (std::size_t j = 0; j < arity.size(); ++j) {
        data::FeatureSpec f{"f" + std::to_string(j), data::FeatureKind::categorical, {}};
        for (std::size_t v = 0; v < arity[j]; ++v) f.categories.push_back("v" + std::to_string(v));
        features.push_back(f);
    }
    std::vector<double> cells;
    for (const auto& r : rows) {
        for (int v : r) cells.push_back(v);
    }
    return data::Dataset(features, cells, labels, class_labels(classes));
}

/// Random mixed dataset with every class present at least once.
inline data::Dataset random_dataset(Rng& rng, std::size_t n, std::size_t d, std::size_t classes,
                                    double categorical_share = 0.3) {
    std::vector<data::FeatureSpec> features;
    for (std::size_t j = 0; j < d; ++j) {
        if (rng.uniform() < categorical_share) {
            data::FeatureSpec f{"c" + std::to_string(j), data::FeatureKind::categorical, {}};
            const std::size_t arity = 2 + rng.index(3);
            for (std::size_t v = 0; v < arity; ++v) f.categories.push_back("v" + std::to_string(v));
            features.push_back(f);
        } else {
            features.push_back({"n" + std::to_string(j), data::FeatureKind::numeric, {}});
        }
    }
    std::vector<int> labels(n);
    for (std::size_t r = 0; r < n; ++r) labels[r] = r < classes ? static_cast<int>(r) : static_cast<int>(rng.index(classes));
    std::vector<double> cells;
    for (std::size_t r = 0; r < n; ++r) {
        for (const auto& f : features) {
            if (f.is_categorical()) {
                cells.push_back(static_cast<double>(rng.index(f.categories.size())));
            } else {
                cells.push_back(std::round((rng.uniform() * 4 - 2 + labels[r]) * 100) / 100);
            }
        }
    }
    return data::Dataset(features, cells, labels, class_labels(classes));
}

// ---------------------------------------------------------------------------
// Oracles

inline double jaccard_oracle(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
    std::size_t both = 0, either = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        both += a[i] && b[i];
        either += a[i] || b[i];
    }
    return either == 0 ? 1.0 : static_cast<double>(both) / static_cast<double>(either);
}

/// Pearson via the phi coefficient of the 2x2 contingency table.
inline double phi_oracle(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
    double n11 = 0, n10 = 0, n01 = 0, n00 = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] && b[i]) n11 += 1;
        else if (a[i]) n10 += 1;
        else if (b[i]) n01 += 1;
        else n00 += 1;
    }
    const double denom = (n11 + n10) * (n01 + n00) * (n11 + n01) * (n10 + n00);
    if (denom == 0) return a == b ? 1.0 : 0.0;
    return (n11 * n00 - n10 * n01) / std::sqrt(denom);
}

/// tau-b by counting every pair; NaN when either side is fully tied.
inline double kendall_oracle(const std::vector<double>& x, const std::vector<double>& y) {
    double concordant = 0, discordant = 0, tied_x = 0, tied_y = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            const double dx = x[i] - x[j];
            const double dy = y[i] - y[j];
            if (dx == 0 && dy == 0) continue;
            if (dx == 0) tied_x += 1;
            else if (dy == 0) tied_y += 1;
            else if ((dx > 0) == (dy > 0)) concordant += 1;
            else discordant += 1;
        }
    }
    const double denom = std::sqrt((concordant + discordant + tied_x) * (concordant + discordant + tied_y));
    if (denom == 0) return std::nan("");
    return (concordant - discordant) / denom;
}

/// Composite Simpson rule on [a, b] with `steps` (even) intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int steps = 20000) {
    const double h = (b - a) / steps;
    double s = f(a) + f(b);
    for (int i = 1; i < steps; ++i) s += f(a + i * h) * (i % 2 ? 4 : 2);
    return s * h / 3;
}

inline double chi2_sf_oracle(double x, double df) {
    const double k = df / 2;
    auto density = [k](double t) {
        if (t <= 0) return k < 1 ? 0.0 : (k == 1 ? 0.5 : 0.0);
        return std::exp((k - 1) * std::log(t) - t / 2 - k * std::log(2.0) - std::lgamma(k));
    };
    return 1 - simpson(density, 0, x);
}

inline double t_two_sided_oracle(double t, double df) {
    auto density = [df](double u) {
        return std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2) - 0.5 * std::log(df * M_PI) -
                        (df + 1) / 2 * std::log1p(u * u / df));
    };
    return 2 * (0.5 - simpson(density, 0, std::abs(t)));
}

/// Every 0/1 mask of length n, in binary counting order.
inline std::vector<std::vector<std::uint8_t>> all_masks(std::size_t n) {
    std::vector<std::vector<std::uint8_t>> out;
    for (std::size_t bits = 0; bits < (std::size_t{1} << n); ++bits) {
        std::vector<std::uint8_t> m(n);
        for (std::size_t i = 0; i < n; ++i) m[i] = (bits >> i) & 1u;
        out.push_back(m);
    }
    return out;
}

/// Sample Pearson r by the textbook formula.
inline double pearson_oracle(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    double cov = 0, vx = 0, vy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        cov += (x[i] - sx / n) * (y[i] - sy / n);
        vx += (x[i] - sx / n) * (x[i] - sx / n);
        vy += (y[i] - sy / n) * (y[i] - sy / n);
    }
    return cov / std::sqrt(vx * vy);
}

// ---------------------------------------------------------------------------
// Least-squares optimality conditions

// Random least-squares problem with integer class targets.
inline data::EncodedDataset random_problem(Rng& rng) {
    data::EncodedDataset x;
    x.rows = 5 + rng.index(46);
    x.width = 1 + rng.index(10);
    x.class_count = 2 + rng.index(3);
    for (std::size_t c = 0; c < x.width; ++c) {
        x.column_origin.push_back(c);
        x.column_names.push_back("c" + std::to_string(c));
    }
    for (std::size_t i = 0; i < x.rows * x.width; ++i) x.matrix.push_back(rng.uniform() * 4 - 2);
    for (std::size_t r = 0; r < x.rows; ++r) x.labels_int.push_back(static_cast<int>(rng.index(x.class_count)));
    return x;
}

struct Centred {
    std::vector<std::vector<double>> x;  // rows x width
    std::vector<double> y;
};

inline Centred centre(const data::EncodedDataset& d) {
    Centred c;
    c.x.assign(d.rows, std::vector<double>(d.width));
    c.y.assign(d.rows, 0);
    for (std::size_t j = 0; j < d.width; ++j) {
        double m = 0;
        for (std::size_t r = 0; r < d.rows; ++r) m += d.at(r, j);
        m /= static_cast<double>(d.rows);
        for (std::size_t r = 0; r < d.rows; ++r) c.x[r][j] = d.at(r, j) - m;
    }
    double ym = 0;
    for (int v : d.labels_int) ym += v;
    ym /= static_cast<double>(d.rows);
    for (std::size_t r = 0; r < d.rows; ++r) c.y[r] = d.labels_int[r] - ym;
    return c;
}

// X'(y - Xw) on centred data.
inline std::vector<double> correlation_with_residual(const Centred& c, const std::vector<double>& w) {
    std::vector<double> g(w.size(), 0.0);
    for (std::size_t r = 0; r < c.y.size(); ++r) {
        double res = c.y[r];
        for (std::size_t j = 0; j < w.size(); ++j) res -= c.x[r][j] * w[j];
        for (std::size_t j = 0; j < w.size(); ++j) g[j] += c.x[r][j] * res;
    }
    return g;
}

inline double lasso_kkt_residual(const data::EncodedDataset& d, const std::vector<double>& w, double alpha) {
    const auto c = centre(d);
    auto g = correlation_with_residual(c, w);
    double worst = 0;
    for (std::size_t j = 0; j < w.size(); ++j) {
        const double grad = g[j] / static_cast<double>(d.rows);
        const double v = w[j] != 0 ? std::abs(grad - alpha * (w[j] > 0 ? 1 : -1)) : std::max(0.0, std::abs(grad) - alpha);
        worst = std::max(worst, v);
    }
    return worst;
}

inline double ridge_gradient(const data::EncodedDataset& d, const std::vector<double>& w, double alpha) {
    const auto c = centre(d);
    auto g = correlation_with_residual(c, w);
    double worst = 0;
    for (std::size_t j = 0; j < w.size(); ++j) worst = std::max(worst, std::abs(alpha * w[j] - g[j]));
    return worst;
}

inline double lasso_alpha_max(const data::EncodedDataset& d) {
    const auto c = centre(d);
    auto g = correlation_with_residual(c, std::vector<double>(d.width, 0.0));
    double m = 0;
    for (double v : g) m = std::max(m, std::abs(v) / static_cast<double>(d.rows));
    return m;
}

}  // namespace intstab::testing
