#include "intstab/harness.hpp"

#include "intstab/measures.hpp"
#include "intstab/random.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <set>
#include <stdexcept>
#include <thread>

namespace intstab::harness {

bool PreprocEntry::is_identity() const {
    return std::all_of(chain.begin(), chain.end(),
                       [](const auto& s) { return s.kind == preprocess::PreprocKind::identity; });
}

PreprocEntry PreprocEntry::named(const std::string& kind) {
    PreprocEntry e;
    preprocess::PreprocSpec s;
    s.kind = preprocess::parse_kind(kind);
    e.id = preprocess::to_string(s.kind);
    if (s.kind != preprocess::PreprocKind::identity) e.chain.push_back(s);
    return e;
}

void ExperimentSpec::validate() const {
    if (preprocs.empty()) throw std::invalid_argument("experiment: empty preprocessing list");
    if (repetitions < 1 || folds < 1) throw std::invalid_argument("experiment: repetitions and folds must be >= 1");
    std::set<std::string> ids;
    std::size_t identities = 0;
    for (const auto& p : preprocs) {
        if (!ids.insert(p.id).second) throw std::invalid_argument("experiment: duplicate preprocessing id " + p.id);
        if (p.is_identity()) ++identities;
        for (const auto& s : p.chain) s.validate();
    }
    if (identities != 1) throw std::invalid_argument("experiment: identity preprocessing must appear exactly once");
}

const PreprocSummary& StabilityReport::summary(const std::string& preproc_id) const {
    for (const auto& p : preprocs) {
        if (p.preproc_id == preproc_id) return p;
    }
    throw std::out_of_range("report: no preprocessing " + preproc_id);
}

Summary summarize(const std::vector<double>& values) {
    Summary s;
    s.count = values.size();
    if (values.empty()) return s;
    double sum = 0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    double ss = 0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(values.size()));
    auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    s.min = *lo;
    s.max = *hi;
    return s;
}

std::uint64_t fold_seed(std::uint64_t master_seed) { return derive_seed(master_seed, {hash_id("folds")}); }

std::uint64_t cell_seed(std::uint64_t master_seed, std::size_t repetition, std::size_t fold,
                        const std::string& preproc_id) {
    return derive_seed(master_seed, {repetition, fold, hash_id(preproc_id)});
}

namespace {

void run_fold(const ExperimentSpec& spec, const data::Dataset& data, const data::FoldPlan& plan,
              std::vector<CellMetrics>& out) {
    const data::Dataset raw_train = data.subset(plan.train_indices);
    const data::Dataset raw_test = data.subset(plan.test_indices);
    const auto imputer = data::NumericImputer::fit(raw_train);
    const data::Dataset train = imputer.apply(raw_train);
    const data::Dataset test = imputer.apply(raw_test);

    for (std::size_t p = 0; p < spec.preprocs.size(); ++p) {
        const auto& entry = spec.preprocs[p];
        CellMetrics& cell = out[p];
        cell.dataset_id = spec.dataset_id;
        cell.model_id = spec.model.id;
        cell.preproc_id = entry.id;
        cell.repetition = plan.repetition;
        cell.fold = plan.fold;
        cell.test_rows = test.rows();
        try {
            const std::uint64_t seed = cell_seed(spec.master_seed, plan.repetition, plan.fold, entry.id);
            std::vector<preprocess::PreprocSpec> chain = entry.chain;
            for (std::size_t j = 0; j < chain.size(); ++j) chain[j].seed = derive_seed(seed, {j, chain[j].seed});
            const auto outcome = preprocess::apply_chain(chain, train);
            const auto& x2 = outcome.transformed_train;

            const auto model = learners::fit_model(spec.model, x2);
            const auto pred_train = learners::predict(model, x2);
            const auto test_view = test.select_features(outcome.kept_features);
            const auto pred_test = learners::predict(model, test_view);

            cell.train_rows = x2.rows();
            cell.f1_train = measures::f1_macro(x2.labels(), pred_train);
            cell.f1_test = measures::f1_macro(test_view.labels(), pred_test);
            cell.overfit = measures::overfitting(cell.f1_train, cell.f1_test);
            cell.f1_test_weighted = measures::f1_weighted(test_view.labels(), pred_test);

            auto summary = learners::introspect(model);
            cell.used_mask.assign(data.cols(), 0);
            for (std::size_t j = 0; j < summary.used_feature_mask.size(); ++j) {
                if (summary.used_feature_mask[j]) cell.used_mask[outcome.kept_features[j]] = 1;
            }
            cell.used_count = summary.used_count;
            cell.feature_ratio = data.cols() ? static_cast<double>(cell.used_count) / static_cast<double>(data.cols()) : 0.0;
            cell.node_count = summary.node_count;
            cell.depth = summary.depth;
            cell.rule_count = summary.rule_count;
            cell.conjunct_total = summary.conjunct_total;
            cell.coefficients = std::move(summary.coefficients);
        } catch (const std::exception& e) {
            cell.error = e.what();
        }
    }
}

}  // namespace

PreprocSummary aggregate(const std::string& preproc_id, const std::vector<const CellMetrics*>& cells) {
    PreprocSummary s;
    s.preproc_id = preproc_id;
    std::vector<const CellMetrics*> ok;
    for (const auto* c : cells) {
        if (c->ok()) {
            ok.push_back(c);
        } else {
            ++s.failures;
        }
    }
    s.models = ok.size();
    s.pair_count = ok.size() < 2 ? 0 : ok.size() * (ok.size() - 1) / 2;

    auto collect = [&](auto get) {
        std::vector<double> v;
        for (const auto* c : ok) v.push_back(get(*c));
        return summarize(v);
    };
    s.f1_test = collect([](const CellMetrics& c) { return c.f1_test; });
    s.f1_train = collect([](const CellMetrics& c) { return c.f1_train; });
    s.overfit = collect([](const CellMetrics& c) { return c.overfit; });
    s.f1_test_weighted = collect([](const CellMetrics& c) { return c.f1_test_weighted; });
    if (ok.empty()) return s;

    s.structural["used_features"] = collect([](const CellMetrics& c) { return static_cast<double>(c.used_count); });
    s.structural["feature_ratio"] = collect([](const CellMetrics& c) { return c.feature_ratio; });
    auto optional_measure = [&](const char* name, auto member) {
        if (!(ok.front()->*member)) return;
        s.structural[name] = collect([&](const CellMetrics& c) { return static_cast<double>((c.*member).value_or(0)); });
    };
    optional_measure("node_count", &CellMetrics::node_count);
    optional_measure("depth", &CellMetrics::depth);
    optional_measure("rule_count", &CellMetrics::rule_count);
    optional_measure("conjunct_total", &CellMetrics::conjunct_total);

    const bool linear = ok.front()->coefficients.has_value();
    std::vector<double> jac, pear, kend;
    for (std::size_t a = 0; a < ok.size(); ++a) {
        for (std::size_t b = a + 1; b < ok.size(); ++b) {
            jac.push_back(measures::jaccard(ok[a]->used_mask, ok[b]->used_mask));
            auto p = measures::pearson_binary(ok[a]->used_mask, ok[b]->used_mask);
            pear.push_back(p.value);
            if (p.degenerate) ++s.pearson_degenerate_pairs;
            if (linear) {
                auto k = measures::kendall_tau(*ok[a]->coefficients, *ok[b]->coefficients);
                kend.push_back(k.value);
                if (k.degenerate) ++s.kendall_degenerate_pairs;
            }
        }
    }
    if (!jac.empty()) {
        s.comparative["jaccard"] = summarize(jac);
        s.comparative["pearson"] = summarize(pear);
        if (linear) s.comparative["kendall"] = summarize(kend);
    }
    return s;
}

StabilityReport evaluate_stability(const ExperimentSpec& spec, const data::Dataset& data) {
    spec.validate();
    const auto plans = data::stratified_folds(data, spec.folds, spec.repetitions, fold_seed(spec.master_seed));
    const std::size_t np = spec.preprocs.size();

    std::vector<std::vector<CellMetrics>> results(plans.size(), std::vector<CellMetrics>(np));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < plans.size(); i = next++) run_fold(spec, data, plans[i], results[i]);
    };
    const std::size_t jobs = std::clamp<std::size_t>(spec.jobs, 1, plans.size());
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    StabilityReport report;
    report.dataset_id = spec.dataset_id;
    report.model_id = spec.model.id;
    report.feature_count = data.cols();
    report.rows = data.rows();
    report.repetitions = spec.repetitions;
    report.folds = spec.folds;
    report.master_seed = spec.master_seed;
    for (auto& fold : results) {
        for (auto& cell : fold) report.cells.push_back(std::move(cell));
    }
    for (std::size_t p = 0; p < np; ++p) {
        std::vector<const CellMetrics*> cells;
        for (std::size_t i = p; i < report.cells.size(); i += np) cells.push_back(&report.cells[i]);
        report.preprocs.push_back(aggregate(spec.preprocs[p].id, cells));
    }
    return report;
}

std::vector<std::size_t> geometric_grid(std::size_t n, std::size_t start) {
    const std::size_t half = n / 2;
    std::vector<std::size_t> grid;
    for (std::size_t m = std::max<std::size_t>(start, 1); m < half; m *= 2) grid.push_back(m);
    if (half >= 1 && (grid.empty() || grid.back() != half)) grid.push_back(half);
    return grid;
}

std::vector<SweepPoint> sweep_min_cases(const ExperimentSpec& spec, const data::Dataset& data,
                                        const std::vector<std::size_t>& m_values) {
    if (spec.model.family != learners::ModelFamily::tree) throw std::invalid_argument("sweep: model is not a tree");
    std::vector<SweepPoint> points;
    for (std::size_t m : m_values) {
        ExperimentSpec s = spec;
        s.model.tree.min_cases = m;
        s.preprocs = {PreprocEntry::named("identity")};
        auto report = evaluate_stability(s, data);
        const auto& summary = report.preprocs.front();
        if (summary.models == 0) throw std::runtime_error("sweep: every fold failed at m=" + std::to_string(m));
        SweepPoint pt;
        pt.m = m;
        pt.node_mean = summary.structural.at("node_count").mean;
        pt.node_std = summary.structural.at("node_count").std;
        pt.f1_mean = summary.f1_test.mean;
        points.push_back(pt);
    }
    return points;
}

}  // namespace intstab::harness
