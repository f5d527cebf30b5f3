#include "doctest.h"

#include "intstab/cli.hpp"
#include "intstab/harness.hpp"
#include "intstab/measures.hpp"
#include "intstab/random.hpp"
#include "intstab/report.hpp"
#include "support.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace intstab;
using namespace intstab::testing;
namespace fs = std::filesystem;

namespace {

const fs::path kDataDir = INTSTAB_DATA_DIR;

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::size_t line_count(const fs::path& p) {
    const auto text = slurp(p);
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("intstab_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

/// Small two-class csv with a numeric and a categorical feature.
void write_toy_data(const fs::path& dir, std::size_t rows = 60) {
    Rng rng(1);
    std::ostringstream csv;
    csv << "a,b,colour,y\n";
    for (std::size_t i = 0; i < rows; ++i) {
        const int y = static_cast<int>(i % 3 == 0);
        csv << (rng.uniform() + y) << "," << (i % 7 == 0 ? "?" : std::to_string(rng.uniform())) << ","
            << (rng.index(2) ? "red" : "blue") << "," << (y ? "yes" : "no") << "\n";
    }
    write_file(dir / "toy.csv", csv.str());
    write_file(dir / "toy.schema", "a: numeric\nb: numeric\ncolour: categorical\ny: class\n");
}

nlohmann::json toy_config(const std::string& out = "out") {
    return {{"config_version", 1},
            {"datasets", {{{"id", "toy"}, {"csv", "toy.csv"}, {"schema", "toy.schema"}}}},
            {"models", {"cart"}},
            {"preprocs", {"identity"}},
            {"master_seed", 7},
            {"output_dir", out}};
}

harness::ExperimentSpec spec_for(const std::string& model, std::vector<std::string> preprocs) {
    harness::ExperimentSpec s;
    s.dataset_id = "d";
    s.model = learners::ModelSpec::preset(model);
    for (const auto& p : preprocs) s.preprocs.push_back(harness::PreprocEntry::named(p));
    s.master_seed = 11;
    return s;
}

data::Dataset load_sonar() {
    return data::load_csv(kDataDir / "sonar.csv", data::load_schema(kDataDir / "sonar.schema"));
}

// Macro F1 by confusion counts.
double f1_oracle(const std::vector<int>& t, const std::vector<int>& p, int classes) {
    double total = 0;
    int present = 0;
    for (int c = 0; c < classes; ++c) {
        double tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            tp += t[i] == c && p[i] == c;
            fp += t[i] != c && p[i] == c;
            fn += t[i] == c && p[i] != c;
        }
        if (tp + fn == 0) continue;
        ++present;
        total += tp == 0 ? 0 : 2 * tp / (2 * tp + fp + fn);
    }
    return total / present;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("spec validation") {
    auto s = spec_for("cart", {"identity", "rus"});
    CHECK_NOTHROW(s.validate());
    auto none = spec_for("cart", {"rus"});
    CHECK_THROWS_AS(none.validate(), std::invalid_argument);
    auto twice = spec_for("cart", {"identity", "rus", "rus"});
    CHECK_THROWS_AS(twice.validate(), std::invalid_argument);
}

TEST_CASE("five by ten gives 50 models and 1225 pairs per preprocessing") {
    Rng rng(3);
    auto d = random_dataset(rng, 120, 6, 2);
    auto s = spec_for("cart", {"identity", "skb", "rus"});
    s.preprocs[1].chain[0].k = 3;
    auto r = harness::evaluate_stability(s, d);
    CHECK(r.cells.size() == 150);
    for (const auto& p : r.preprocs) {
        CHECK(p.models == 50);
        CHECK(p.failures == 0);
        CHECK(p.pair_count == 1225);
        CHECK(p.comparative.at("pearson").count == 1225);
        CHECK(p.comparative.at("jaccard").count == 1225);
        CHECK(p.structural.at("node_count").count == 50);
    }
    // skb keeps 3 of 6 features, so no model can use more
    CHECK(r.summary("skb").structural.at("used_features").max <= 3);
}

TEST_CASE("a constant classifier is perfectly stable") {
    Rng rng(4);
    auto d = random_dataset(rng, 100, 4, 2);
    auto s = spec_for("c45", {"identity"});
    s.model.tree.min_cases = d.rows();
    auto r = harness::evaluate_stability(s, d);
    const auto& p = r.preprocs.front();
    CHECK(p.structural.at("node_count").std == 0.0);
    CHECK(p.structural.at("node_count").mean == 1.0);
    CHECK(p.comparative.at("pearson").mean == 1.0);
    CHECK(p.pearson_degenerate_pairs == 1225);
}

TEST_CASE("population deviation") {
    auto s = harness::summarize({1, 2, 3, 4});
    CHECK(s.mean == 2.5);
    CHECK(s.std == doctest::Approx(std::sqrt(1.25)));
    CHECK(s.min == 1);
    CHECK(s.max == 4);
}

TEST_CASE("runs are deterministic and independent of thread count") {
    Rng rng(5);
    auto d = random_dataset(rng, 90, 5, 3);
    auto s = spec_for("ridge", {"identity", "smote", "rus"});
    s.repetitions = 2;
    auto one = harness::evaluate_stability(s, d);
    s.jobs = 4;
    auto four = harness::evaluate_stability(s, d);
    std::ostringstream a, b;
    report::write_cells_csv(a, {one});
    report::write_cells_csv(b, {four});
    CHECK(a.str() == b.str());
    CHECK(report::run_json({one}).dump() == report::run_json({four}).dump());
}

TEST_CASE("adding a preprocessing entry leaves other cells unchanged") {
    Rng rng(6);
    auto d = random_dataset(rng, 80, 5, 2);
    auto small = spec_for("cart", {"identity", "ros"});
    small.repetitions = 2;
    auto big = small;
    big.preprocs.insert(big.preprocs.begin() + 1, harness::PreprocEntry::named("smote"));
    auto a = harness::evaluate_stability(small, d);
    auto b = harness::evaluate_stability(big, d);
    for (const char* id : {"identity", "ros"}) {
        CHECK(report::to_json(a.summary(id)).dump() == report::to_json(b.summary(id)).dump());
    }
}

TEST_CASE("failed cells are recorded, not thrown") {
    // a class with one training member makes SMOTE refuse
    auto d = numeric_dataset({{0}, {1}, {2}, {3}, {4}, {5}, {6}, {7}, {8}, {9}, {10}, {11}}, {0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 0});
    auto s = spec_for("cart", {"identity", "smote"});
    s.folds = 2;
    s.repetitions = 1;
    auto r = harness::evaluate_stability(s, d);
    CHECK(r.summary("identity").failures == 0);
    CHECK(r.summary("smote").failures == 2);
    CHECK(r.summary("smote").models == 0);
}

TEST_CASE("sonar + lasso matches a straight-line re-run") {
    auto d = load_sonar();
    auto s = spec_for("lasso", {"identity"});
    s.master_seed = 2024;
    s.model.linear.alpha = 0.01;
    auto r = harness::evaluate_stability(s, d);

    std::vector<double> f1s, used;
    std::vector<std::vector<std::uint8_t>> masks;
    std::vector<std::vector<double>> coefs;
    std::vector<std::string> names;
    for (const auto& plan : data::stratified_folds(d, 10, 5, derive_seed(2024, {hash_id("folds")}))) {
        const auto imputer = data::NumericImputer::fit(d.subset(plan.train_indices));
        const auto train = imputer.apply(d.subset(plan.train_indices));
        const auto test = imputer.apply(d.subset(plan.test_indices));
        const auto enc = data::Encoder::fit(train);
        const auto model = learners::fit_linear(enc.transform(train), s.model.linear);
        const auto pred = model.predict(enc.transform(test));
        f1s.push_back(f1_oracle(test.labels(), pred, 2));
        std::vector<std::uint8_t> m(d.cols(), 0);
        std::vector<double> c;
        for (std::size_t j = 0; j < model.coefficients().size(); ++j) {
            if (std::abs(model.coefficients()[j]) > 1e-9) m[model.column_origin()[j]] = 1;
            c.push_back(std::abs(model.coefficients()[j]) > 1e-9 ? std::abs(model.coefficients()[j]) : 0.0);
        }
        masks.push_back(m);
        coefs.push_back(c);
        used.push_back(static_cast<double>(std::count(m.begin(), m.end(), 1)));
    }
    double pear = 0, jac = 0, kend = 0;
    std::size_t pairs = 0;
    for (std::size_t a = 0; a < masks.size(); ++a) {
        for (std::size_t b = a + 1; b < masks.size(); ++b) {
            pear += phi_oracle(masks[a], masks[b]);
            jac += jaccard_oracle(masks[a], masks[b]);
            kend += kendall_oracle(coefs[a], coefs[b]);
            ++pairs;
        }
    }
    const auto& p = r.preprocs.front();
    REQUIRE(pairs == 1225);
    CHECK(p.f1_test.mean == doctest::Approx(harness::summarize(f1s).mean).epsilon(1e-12));
    CHECK(p.structural.at("used_features").mean == doctest::Approx(harness::summarize(used).mean).epsilon(1e-12));
    CHECK(p.structural.at("used_features").std == doctest::Approx(harness::summarize(used).std).epsilon(1e-12));
    CHECK(p.comparative.at("pearson").mean == doctest::Approx(pear / 1225).epsilon(1e-12));
    CHECK(p.comparative.at("jaccard").mean == doctest::Approx(jac / 1225).epsilon(1e-12));
    CHECK(p.comparative.at("kendall").mean == doctest::Approx(kend / 1225).epsilon(1e-12));
}

TEST_CASE("geometric grid") {
    CHECK(harness::geometric_grid(208) == std::vector<std::size_t>{2, 4, 8, 16, 32, 64, 104});
    CHECK(harness::geometric_grid(16) == std::vector<std::size_t>{2, 4, 8});
    CHECK(harness::geometric_grid(3) == std::vector<std::size_t>{1});
}

TEST_CASE("sweep on a tree model") {
    Rng rng(8);
    auto d = random_dataset(rng, 120, 5, 2);
    auto s = spec_for("c45", {"identity"});
    s.repetitions = 1;
    auto pts = harness::sweep_min_cases(s, d, harness::geometric_grid(d.rows()));
    REQUIRE_FALSE(pts.empty());
    for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i].node_mean <= pts[i - 1].node_mean);
    CHECK(pts.back().node_mean <= 3.0);
    CHECK(pts.back().node_mean >= 1.0);
    CHECK_THROWS_AS(harness::sweep_min_cases(spec_for("ridge", {"identity"}), d, {2}), std::invalid_argument);
}

TEST_CASE("report json round trip") {
    Rng rng(9);
    auto d = random_dataset(rng, 60, 4, 2);
    auto s = spec_for("lasso", {"identity", "ros"});
    s.repetitions = 1;
    s.model.linear.alpha = 0.05;
    auto r = harness::evaluate_stability(s, d);
    auto j = report::to_json(r);
    auto back = report::report_from_json(j);
    CHECK(report::to_json(back).dump() == j.dump());
}

TEST_CASE("csv fields and numbers") {
    CHECK(report::csv_field("plain") == "plain");
    CHECK(report::csv_field("a,b") == "\"a,b\"");
    CHECK(report::csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(report::format_double(0.1) == "0.1");
    CHECK(std::stod(report::format_double(1.0 / 3)) == 1.0 / 3);
}

TEST_CASE("measure names") {
    CHECK(report::is_known_measure("pearson"));
    CHECK(report::is_known_measure("node_count_std"));
    CHECK_FALSE(report::is_known_measure("accuracy"));
    CHECK(report::higher_is_better("jaccard"));
    CHECK_FALSE(report::higher_is_better("overfit"));
    CHECK_FALSE(report::higher_is_better("pearson_std"));
}

TEST_CASE("measure table keeps methods present everywhere") {
    harness::StabilityReport a, b;
    a.dataset_id = "d1";
    b.dataset_id = "d2";
    a.model_id = b.model_id = "m";
    harness::PreprocSummary p;
    p.preproc_id = "identity";
    p.models = 50;
    p.comparative["pearson"] = {0.5, 0.1, 0, 1, 1225};
    a.preprocs = {p};
    b.preprocs = {p};
    harness::PreprocSummary only;
    only.preproc_id = "rus";
    only.models = 50;
    only.comparative["pearson"] = {0.7, 0.1, 0, 1, 1225};
    a.preprocs.push_back(only);
    auto t = report::measure_table({a, b}, "pearson");
    CHECK(t.datasets == std::vector<std::string>{"d1", "d2"});
    CHECK(t.methods == std::vector<std::string>{"m+identity"});
    CHECK(t.dropped == std::vector<std::string>{"m+rus"});
    CHECK(t.values == std::vector<std::vector<double>>{{0.5}, {0.5}});
}

}  // TEST_SUITE

TEST_SUITE("cli") {

TEST_CASE("config parsing") {
    auto c = cli::parse_config(toy_config(), "/base");
    CHECK(c.datasets.front().csv == fs::path("/base/toy.csv"));
    CHECK(c.output_dir == fs::path("/base/out"));
    CHECK(c.repetitions == 5);
    CHECK(c.folds == 10);

    auto bad = toy_config();
    bad["config_version"] = 2;
    CHECK_THROWS_AS(cli::parse_config(bad, "/"), cli::ConfigError);
    auto unknown_model = toy_config();
    unknown_model["models"] = {"svm"};
    CHECK_THROWS_AS(cli::parse_config(unknown_model, "/"), cli::ConfigError);

    auto m = cli::parse_model({{"id", "deep"}, {"preset", "c45"}, {"params", {{"min_cases", 8}, {"pruning", "none"}}}});
    CHECK(m.id == "deep");
    CHECK(m.tree.min_cases == 8);
    CHECK(m.tree.pruning == learners::Pruning::none);
    auto p = cli::parse_preproc({{"kind", "skb"}, {"params", {{"k", 5}}}, {"id", "skb5"}});
    CHECK(p.id == "skb5");
    CHECK(p.chain.front().k == 5);
    auto chain = cli::parse_preproc({{"id", "skb+rus"}, {"chain", {{{"kind", "skb"}}, "rus"}}});
    CHECK(chain.chain.size() == 2);
}

TEST_CASE("run writes 50 cells and reruns byte-identically") {
    auto dir = scratch("run");
    write_toy_data(dir);
    write_file(dir / "config.json", toy_config().dump());
    std::ostringstream log;
    REQUIRE(cli::cmd_run(dir / "config.json", {}, false, log) == cli::kExitOk);
    CHECK(line_count(dir / "out" / "cells.csv") == 51);
    CHECK_FALSE(fs::exists(dir / "out" / "errors.csv"));
    const auto cells = slurp(dir / "out" / "cells.csv");
    const auto rep = slurp(dir / "out" / "report.json");
    REQUIRE(cli::cmd_run(dir / "config.json", {}, false, log) == cli::kExitOk);
    CHECK(slurp(dir / "out" / "cells.csv") == cells);
    CHECK(slurp(dir / "out" / "report.json") == rep);

    cli::Overrides o;
    o.out_dir = dir / "threads";
    o.jobs = 3;
    REQUIRE(cli::cmd_run(dir / "config.json", o, false, log) == cli::kExitOk);
    CHECK(slurp(dir / "threads" / "cells.csv") == cells);

    REQUIRE(cli::cmd_report(dir / "out", log) == cli::kExitOk);
    CHECK(line_count(dir / "out" / "summary.csv") == 2);
}

TEST_CASE("run exit codes") {
    auto dir = scratch("codes");
    write_toy_data(dir);
    std::ostringstream log;

    auto bad_version = toy_config();
    bad_version["config_version"] = 9;
    write_file(dir / "v.json", bad_version.dump());
    CHECK(cli::cmd_run(dir / "v.json", {}, false, log) == cli::kExitConfig);

    write_file(dir / "broken.json", "{ not json");
    CHECK(cli::cmd_run(dir / "broken.json", {}, false, log) == cli::kExitConfig);
    CHECK(cli::cmd_run(dir / "absent.json", {}, false, log) == cli::kExitConfig);

    auto no_identity = toy_config();
    no_identity["preprocs"] = {"rus"};
    write_file(dir / "noid.json", no_identity.dump());
    CHECK(cli::cmd_run(dir / "noid.json", {}, false, log) == cli::kExitConfig);

    write_file(dir / "bad.csv", "a,b,colour,y\n1,2,red,yes\nx,3,blue,no\n");
    auto bad_data = toy_config();
    bad_data["datasets"][0]["csv"] = "bad.csv";
    write_file(dir / "d.json", bad_data.dump());
    CHECK(cli::cmd_run(dir / "d.json", {}, false, log) == cli::kExitData);

    // smote on a class with a single training member: cells fail
    std::ostringstream tiny;
    tiny << "a,y\n";
    for (int i = 0; i < 30; ++i) tiny << i << "," << (i == 0 ? "rare" : "common") << "\n";
    tiny << "31,rare\n";
    write_file(dir / "tiny.csv", tiny.str());
    write_file(dir / "tiny.schema", "a: numeric\ny: class\n");
    auto failing = toy_config();
    failing["datasets"] = {{{"id", "tiny"}, {"csv", "tiny.csv"}, {"schema", "tiny.schema"}}};
    failing["preprocs"] = {"identity", "smote"};
    failing["folds"] = 2;
    write_file(dir / "f.json", failing.dump());
    CHECK(cli::cmd_run(dir / "f.json", {}, false, log) == cli::kExitOk);
    CHECK(fs::exists(dir / "out" / "errors.csv"));
    CHECK(cli::cmd_run(dir / "f.json", {}, true, log) == cli::kExitCellFailures);
}

TEST_CASE("stats and scatter commands") {
    auto dir = scratch("stats");
    write_toy_data(dir, 60);
    std::ostringstream csv2;
    csv2 << "a,b,colour,y\n";
    Rng rng(2);
    for (int i = 0; i < 60; ++i) {
        const int y = i % 2;
        csv2 << rng.uniform() * (1 + y) << "," << rng.uniform() << "," << (y ? "red" : "blue") << "," << (y ? "yes" : "no") << "\n";
    }
    write_file(dir / "toy2.csv", csv2.str());
    auto cfg = toy_config();
    cfg["datasets"].push_back({{"id", "toy2"}, {"csv", "toy2.csv"}, {"schema", "toy.schema"}});
    cfg["models"] = {"cart", "ridge"};
    cfg["preprocs"] = {"identity", "rus"};
    cfg["repetitions"] = 2;
    write_file(dir / "config.json", cfg.dump());
    std::ostringstream log;
    REQUIRE(cli::cmd_run(dir / "config.json", {}, false, log) == cli::kExitOk);

    CHECK(cli::cmd_stats(dir / "out", "pearson", 0.10, true, log) == cli::kExitOk);
    auto j = nlohmann::json::parse(slurp(dir / "out" / "stats_pearson.json"));
    CHECK(j["methods"].size() == 4);
    CHECK(j["nemenyi"]["critical_difference"].get<double>() == doctest::Approx(stats::nemenyi_cd(4, 2, 0.10)));
    CHECK(fs::exists(dir / "out" / "cd_pearson.csv"));
    CHECK(cli::cmd_stats(dir / "out", "accuracy", 0.10, false, log) == cli::kExitConfig);
    CHECK(cli::cmd_stats(dir / "out", "pearson", 0.01, false, log) == cli::kExitConfig);

    CHECK(cli::cmd_scatter(dir / "out", "pearson", "feature_ratio", log) == cli::kExitOk);
    CHECK(line_count(dir / "out" / "scatter_pearson_feature_ratio.csv") == 1 + 2 * 2 * 2);

    CHECK(cli::cmd_sweep(dir / "config.json", "2,4", {}, log) == cli::kExitConfig);  // ridge is no tree
    cfg["models"] = {"c45"};
    write_file(dir / "sweep.json", cfg.dump());
    CHECK(cli::cmd_sweep(dir / "sweep.json", "2,4", {}, log) == cli::kExitOk);
    CHECK(line_count(dir / "out" / "sweep.csv") == 1 + 2 * 2);
    CHECK(cli::cmd_sweep(dir / "sweep.json", "2,x", {}, log) == cli::kExitConfig);
}

}  // TEST_SUITE
