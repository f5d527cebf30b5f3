#include "doctest.h"

#include "intstab/preprocess.hpp"
#include "support.hpp"

#include <algorithm>
#include <map>
#include <numeric>

using namespace intstab;
using namespace intstab::testing;
namespace pp = intstab::preprocess;

namespace {

// F from the definition: between/within mean squares.
double anova_oracle(const std::vector<std::vector<double>>& groups) {
    double n = 0, total = 0;
    for (const auto& g : groups) {
        n += static_cast<double>(g.size());
        for (double v : g) total += v;
    }
    const double grand = total / n;
    double between = 0, within = 0;
    for (const auto& g : groups) {
        const double m = std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(g.size());
        between += static_cast<double>(g.size()) * (m - grand) * (m - grand);
        for (double v : g) within += (v - m) * (v - m);
    }
    const double k = static_cast<double>(groups.size());
    return (between / (k - 1)) / (within / (n - k));
}

data::Dataset class_sizes(const std::vector<std::size_t>& sizes) {
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (std::size_t c = 0; c < sizes.size(); ++c) {
        for (std::size_t i = 0; i < sizes[c]; ++i) {
            rows.push_back({static_cast<double>(rows.size()), static_cast<double>(c) + 0.1 * static_cast<double>(i)});
            labels.push_back(static_cast<int>(c));
        }
    }
    return numeric_dataset(rows, labels, sizes.size());
}

std::vector<std::size_t> label_counts(const data::Dataset& d) { return d.class_counts(); }

}  // namespace

TEST_SUITE("preprocess") {

TEST_CASE("anova F examples") {
    std::vector<std::vector<double>> same = {{1, 2, 3}, {1, 2, 3}};
    CHECK(pp::anova_f(same) == 0.0);
    std::vector<std::vector<double>> shifted = {{1, 2, 3}, {2, 3, 4}};
    CHECK(pp::anova_f(shifted) == doctest::Approx(1.5));
    std::vector<std::vector<double>> separated = {{0, 0}, {1, 1}};
    CHECK(pp::anova_f(separated) == pp::kMaxF);
    std::vector<std::vector<double>> flat = {{2, 2}, {2, 2}};
    CHECK(pp::anova_f(flat) == 0.0);
}

TEST_CASE("anova F matches the textbook formula on random groups") {
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::vector<double>> groups(2 + rng.index(3));
        for (auto& g : groups) {
            const std::size_t size = 2 + rng.index(6);
            for (std::size_t i = 0; i < size; ++i) g.push_back(rng.uniform() * 10);
        }
        CHECK(pp::anova_f(groups) == doctest::Approx(anova_oracle(groups)).epsilon(1e-10));
    }
}

TEST_CASE("select k best") {
    Rng rng(8);
    auto d = random_dataset(rng, 60, 14, 2, 0.0);
    auto out = pp::select_k_best(d, 10);
    CHECK(std::count(out.feature_mask.begin(), out.feature_mask.end(), 1) == 10);
    CHECK(out.transformed_train.cols() == 10);
    CHECK(out.kept_features.size() == 10);

    // the kept set holds the ten highest oracle scores
    std::vector<double> scores;
    for (std::size_t f = 0; f < d.cols(); ++f) {
        std::vector<std::vector<double>> groups(2);
        for (std::size_t r = 0; r < d.rows(); ++r) groups[static_cast<std::size_t>(d.label(r))].push_back(d.at(r, f));
        scores.push_back(anova_oracle(groups));
    }
    double lowest_kept = 1e300, highest_dropped = -1;
    for (std::size_t f = 0; f < d.cols(); ++f) {
        if (out.feature_mask[f]) lowest_kept = std::min(lowest_kept, scores[f]);
        else highest_dropped = std::max(highest_dropped, scores[f]);
    }
    CHECK(lowest_kept >= highest_dropped);

    auto all = pp::select_k_best(d, 14);
    CHECK(all.kept_features.size() == 14);
    CHECK(all.transformed_train.same_as(d));
}

TEST_CASE("select k best breaks ties toward the lower index") {
    // columns 1 and 2 are duplicates and score highest; k=1 cuts between them
    auto d = numeric_dataset({{5, 1, 1}, {6, 2, 2}, {1, 8, 8}, {2, 9, 9}, {3, 3, 3}, {4, 7, 7}}, {0, 0, 1, 1, 0, 1});
    auto scores = pp::feature_scores(d);
    REQUIRE(scores[1] == scores[2]);
    REQUIRE(scores[1] > scores[0]);
    CHECK(pp::select_k_best(d, 1).kept_features == std::vector<std::size_t>{1});
    CHECK(pp::select_k_best(d, 2).kept_features == std::vector<std::size_t>{1, 2});
}

TEST_CASE("select percentile counts") {
    CHECK(pp::percentile_count(40, 10) == 4);
    CHECK(pp::percentile_count(14, 10) == 2);
    CHECK(pp::percentile_count(14, 100) == 14);
    CHECK(pp::percentile_count(3, 1) == 1);
    Rng rng(9);
    auto d = random_dataset(rng, 40, 14, 2, 0.0);
    CHECK(pp::select_percentile(d, 10).kept_features.size() == 2);
    CHECK(pp::select_percentile(d, 100).transformed_train.same_as(d));
    CHECK_THROWS(pp::select_percentile(d, 0));
}

TEST_CASE("rfe keeps the determining feature") {
    Rng rng(21);
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 80; ++i) {
        std::vector<double> r;
        for (int j = 0; j < 6; ++j) r.push_back(std::round(rng.uniform() * 100));
        labels.push_back(r[3] > 50 ? 1 : 0);
        rows.push_back(r);
    }
    auto d = numeric_dataset(rows, labels);
    auto out = pp::rfe(d, 1);
    CHECK(out.kept_features == std::vector<std::size_t>{3});

    pp::PreprocSpec spec;
    spec.kind = pp::PreprocKind::rfe;
    CHECK(pp::apply(spec, d).kept_features.size() == 3);
    auto full = pp::rfe(d, 6);
    CHECK(full.transformed_train.same_as(d));
}

TEST_CASE("rfe default target on fourteen features") {
    Rng rng(4);
    auto d = random_dataset(rng, 50, 14, 2);
    pp::PreprocSpec spec;
    spec.kind = pp::PreprocKind::rfe;
    CHECK(pp::apply(spec, d).kept_features.size() == 7);
}

TEST_CASE("random undersampling") {
    auto d = class_sizes({100, 10});
    auto out = pp::random_undersample(d, 1);
    CHECK(label_counts(out.transformed_train) == std::vector<std::size_t>{10, 10});
    auto three = pp::random_undersample(class_sizes({50, 20, 5}), 1);
    CHECK(label_counts(three.transformed_train) == std::vector<std::size_t>{5, 5, 5});

    auto balanced = class_sizes({6, 6});
    CHECK(pp::random_undersample(balanced, 9).transformed_train.same_as(balanced));
    for (auto m : out.instance_multiplicity) CHECK(m <= 1);
}

TEST_CASE("random oversampling") {
    auto d = class_sizes({100, 10});
    auto out = pp::random_oversample(d, 2);
    CHECK(label_counts(out.transformed_train) == std::vector<std::size_t>{100, 100});
    std::size_t minority_copies = 0;
    for (std::size_t r = 0; r < d.rows(); ++r) {
        if (d.label(r) == 1) {
            CHECK(out.instance_multiplicity[r] >= 1);
            minority_copies += out.instance_multiplicity[r];
        } else {
            CHECK(out.instance_multiplicity[r] == 1);
        }
    }
    CHECK(minority_copies == 100);
    auto balanced = class_sizes({6, 6});
    CHECK(pp::random_oversample(balanced, 3).transformed_train.same_as(balanced));
}

TEST_CASE("smote interpolates between same-class neighbours") {
    std::vector<std::vector<double>> rows = {{0, 0}, {1, 1}};
    std::vector<int> labels = {1, 1};
    for (int i = 0; i < 6; ++i) {
        rows.push_back({5.0 + i, -3.0 * i});
        labels.push_back(0);
    }
    auto d = numeric_dataset(rows, labels);
    auto out = pp::smote(d, 5, 7);
    const auto& t = out.transformed_train;
    CHECK(label_counts(t) == std::vector<std::size_t>{6, 6});
    for (std::size_t r = d.rows(); r < t.rows(); ++r) {
        CHECK(out.source_rows[r] == -1);
        CHECK(t.label(r) == 1);
        CHECK(t.at(r, 0) == doctest::Approx(t.at(r, 1)));
        CHECK(t.at(r, 0) >= 0.0);
        CHECK(t.at(r, 0) <= 1.0);
    }
    for (std::size_t r = 0; r < d.rows(); ++r) CHECK(out.source_rows[r] == static_cast<std::ptrdiff_t>(r));
}

TEST_CASE("instance selection is deterministic per seed") {
    Rng rng(12);
    auto d = random_dataset(rng, 70, 4, 3);
    for (auto kind : {pp::PreprocKind::rus, pp::PreprocKind::ros, pp::PreprocKind::smote}) {
        pp::PreprocSpec spec;
        spec.kind = kind;
        spec.seed = 77;
        auto a = pp::apply(spec, d);
        auto b = pp::apply(spec, d);
        CHECK(a.transformed_train.same_as(b.transformed_train));
        CHECK(a.source_rows == b.source_rows);
        CHECK(std::all_of(a.feature_mask.begin(), a.feature_mask.end(), [](auto m) { return m == 1; }));
    }
}

TEST_CASE("chains compose masks and row provenance") {
    Rng rng(30);
    auto d = random_dataset(rng, 90, 12, 2, 0.0);
    std::vector<pp::PreprocSpec> chain(2);
    chain[0].kind = pp::PreprocKind::skb;
    chain[0].k = 6;
    chain[1].kind = pp::PreprocKind::ros;
    chain[1].seed = 5;
    auto out = pp::apply_chain(chain, d);
    CHECK(out.kept_features.size() == 6);
    CHECK(out.transformed_train.cols() == 6);
    const auto& t = out.transformed_train;
    for (std::size_t r = 0; r < t.rows(); ++r) {
        const auto src = static_cast<std::size_t>(out.source_rows[r]);
        for (std::size_t j = 0; j < 6; ++j) CHECK(t.at(r, j) == d.at(src, out.kept_features[j]));
        CHECK(t.label(r) == d.label(src));
    }
    CHECK(std::accumulate(out.instance_multiplicity.begin(), out.instance_multiplicity.end(), std::size_t{0}) == t.rows());
}

TEST_CASE("parameter validation") {
    pp::PreprocSpec s;
    s.kind = pp::PreprocKind::skb;
    s.k = 0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.kind = pp::PreprocKind::sp;
    s.percentile = 150;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    CHECK(pp::parse_kind("smote") == pp::PreprocKind::smote);
    CHECK_THROWS(pp::parse_kind("pca"));
}

}  // TEST_SUITE
