#include "intstab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace intstab::measures {

namespace {

// Per-class F1 and support; support 0 marks a class absent from y_true.
void per_class_f1(std::span<const int> y_true, std::span<const int> y_pred, std::vector<double>& f1,
                  std::vector<double>& support) {
    if (y_true.size() != y_pred.size()) throw std::invalid_argument("f1: length mismatch");
    if (y_true.empty()) throw std::invalid_argument("f1: empty label vectors");
    int top = 0;
    for (int v : y_true) top = std::max(top, v);
    for (int v : y_pred) top = std::max(top, v);
    const auto k = static_cast<std::size_t>(top) + 1;
    std::vector<double> tp(k, 0), fp(k, 0), fn(k, 0);
    support.assign(k, 0.0);
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        auto t = static_cast<std::size_t>(y_true[i]);
        auto p = static_cast<std::size_t>(y_pred[i]);
        support[t] += 1;
        if (t == p) {
            tp[t] += 1;
        } else {
            fp[p] += 1;
            fn[t] += 1;
        }
    }
    f1.assign(k, 0.0);
    for (std::size_t c = 0; c < k; ++c) {
        double denom = 2 * tp[c] + fp[c] + fn[c];
        f1[c] = denom > 0 ? 2 * tp[c] / denom : 0.0;
    }
}

}  // namespace

double f1_macro(std::span<const int> y_true, std::span<const int> y_pred) {
    std::vector<double> f1, support;
    per_class_f1(y_true, y_pred, f1, support);
    double sum = 0;
    std::size_t classes = 0;
    for (std::size_t c = 0; c < f1.size(); ++c) {
        if (support[c] == 0) continue;
        ++classes;
        sum += f1[c];
    }
    return sum / static_cast<double>(classes);
}

double f1_weighted(std::span<const int> y_true, std::span<const int> y_pred) {
    std::vector<double> f1, support;
    per_class_f1(y_true, y_pred, f1, support);
    double sum = 0;
    for (std::size_t c = 0; c < f1.size(); ++c) sum += support[c] * f1[c];
    return sum / static_cast<double>(y_true.size());
}

double overfitting(double f1_train, double f1_test) {
    if (f1_train == 0.0) return 0.0;
    return (f1_train - f1_test) / f1_train;
}

double jaccard(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    if (a.size() != b.size()) throw std::invalid_argument("jaccard: length mismatch");
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        inter += (a[i] && b[i]) ? 1 : 0;
        uni += (a[i] || b[i]) ? 1 : 0;
    }
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

Correlation pearson_binary(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    if (a.size() != b.size()) throw std::invalid_argument("pearson: length mismatch");
    const double n = static_cast<double>(a.size());
    double sa = 0, sb = 0, sab = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sa += a[i] ? 1 : 0;
        sb += b[i] ? 1 : 0;
        sab += (a[i] && b[i]) ? 1 : 0;
    }
    // Integer counts keep the degenerate test exact.
    double va = sa * (n - sa);
    double vb = sb * (n - sb);
    if (va == 0 || vb == 0) {
        bool same = std::equal(a.begin(), a.end(), b.begin(), [](auto x, auto y) { return (x != 0) == (y != 0); });
        return {same ? 1.0 : 0.0, true};
    }
    double cov = n * sab - sa * sb;
    double r = cov / std::sqrt(va * vb);
    return {std::clamp(r, -1.0, 1.0), false};
}

double kendall_tau_b(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("kendall: length mismatch");
    double concordant = 0, discordant = 0, ties_x = 0, ties_y = 0, pairs = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            pairs += 1;
            double dx = x[i] - x[j];
            double dy = y[i] - y[j];
            if (dx == 0) ties_x += 1;
            if (dy == 0) ties_y += 1;
            if (dx == 0 || dy == 0) continue;
            ((dx > 0) == (dy > 0) ? concordant : discordant) += 1;
        }
    }
    double denom = (pairs - ties_x) * (pairs - ties_y);
    if (denom <= 0) return std::numeric_limits<double>::quiet_NaN();
    return std::clamp((concordant - discordant) / std::sqrt(denom), -1.0, 1.0);
}

Correlation kendall_tau(const std::map<std::string, double>& a, const std::map<std::string, double>& b) {
    auto magnitude = [](const std::map<std::string, double>& m, const std::string& key) {
        auto it = m.find(key);
        if (it == m.end()) return 0.0;
        double v = std::abs(it->second);
        return v > 1e-9 ? v : 0.0;
    };
    std::vector<std::string> keys;
    for (const auto& [k, v] : a) keys.push_back(k);
    for (const auto& [k, v] : b) {
        if (!a.count(k)) keys.push_back(k);
    }
    std::vector<double> x, y;
    for (const auto& k : keys) {
        x.push_back(magnitude(a, k));
        y.push_back(magnitude(b, k));
    }
    double tau = kendall_tau_b(x, y);
    if (std::isnan(tau)) return {x == y ? 1.0 : 0.0, true};
    return {tau, false};
}

}  // namespace intstab::measures
