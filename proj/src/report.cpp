#include "intstab/report.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

namespace intstab::report {
namespace {

const std::set<std::string>& base_measures() {
    static const std::set<std::string> names = {"f1",          "f1_weighted", "f1_train",      "overfit",    "jaccard",
                                                "pearson",     "kendall",       "used_features", "feature_ratio",
                                                "node_count",  "depth",         "rule_count", "conjunct_total"};
    return names;
}

std::string strip_std(const std::string& name, bool& is_std) {
    is_std = name.size() > 4 && name.compare(name.size() - 4, 4, "_std") == 0;
    return is_std ? name.substr(0, name.size() - 4) : name;
}

template <typename T>
std::string optional_field(const std::optional<T>& v) {
    return v ? std::to_string(*v) : std::string();
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> cells_csv_header() {
    return {"dataset",  "model",       "preproc",       "repetition", "fold",  "train_rows",
            "test_rows", "f1_train",   "f1_test",       "overfit",    "f1_test_weighted",    "used_features", "feature_ratio",
            "node_count", "depth",     "rule_count",    "conjunct_total", "used_mask"};
}

void write_cells_csv(std::ostream& out, const std::vector<harness::StabilityReport>& reports) {
    const auto header = cells_csv_header();
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& r : reports) {
        for (const auto& c : r.cells) {
            if (!c.ok()) continue;
            std::string mask;
            for (auto b : c.used_mask) mask += b ? '1' : '0';
            std::vector<std::string> fields = {csv_field(c.dataset_id),
                                               csv_field(c.model_id),
                                               csv_field(c.preproc_id),
                                               std::to_string(c.repetition),
                                               std::to_string(c.fold),
                                               std::to_string(c.train_rows),
                                               std::to_string(c.test_rows),
                                               format_double(c.f1_train),
                                               format_double(c.f1_test),
                                               format_double(c.overfit),
                                               format_double(c.f1_test_weighted),
                                               std::to_string(c.used_count),
                                               format_double(c.feature_ratio),
                                               optional_field(c.node_count),
                                               optional_field(c.depth),
                                               optional_field(c.rule_count),
                                               optional_field(c.conjunct_total),
                                               mask};
            for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << fields[i];
            out << "\n";
        }
    }
}

nlohmann::json summary_json(const harness::Summary& s) {
    return {{"mean", s.mean}, {"std", s.std}, {"min", s.min}, {"max", s.max}, {"count", s.count}};
}

harness::Summary summary_from_json(const nlohmann::json& j) {
    harness::Summary s;
    s.mean = j.at("mean").get<double>();
    s.std = j.at("std").get<double>();
    s.min = j.at("min").get<double>();
    s.max = j.at("max").get<double>();
    s.count = j.at("count").get<std::size_t>();
    return s;
}

nlohmann::json to_json(const harness::PreprocSummary& p) {
    nlohmann::json j;
    j["preproc"] = p.preproc_id;
    j["models"] = p.models;
    j["failures"] = p.failures;
    j["pair_count"] = p.pair_count;
    j["f1_test"] = summary_json(p.f1_test);
    j["f1_train"] = summary_json(p.f1_train);
    j["overfit"] = summary_json(p.overfit);
    j["f1_test_weighted"] = summary_json(p.f1_test_weighted);
    j["structural"] = nlohmann::json::object();
    for (const auto& [k, v] : p.structural) j["structural"][k] = summary_json(v);
    j["comparative"] = nlohmann::json::object();
    for (const auto& [k, v] : p.comparative) j["comparative"][k] = summary_json(v);
    j["pearson_degenerate_pairs"] = p.pearson_degenerate_pairs;
    j["kendall_degenerate_pairs"] = p.kendall_degenerate_pairs;
    return j;
}

harness::PreprocSummary preproc_from_json(const nlohmann::json& j) {
    harness::PreprocSummary p;
    p.preproc_id = j.at("preproc").get<std::string>();
    p.models = j.at("models").get<std::size_t>();
    p.failures = j.at("failures").get<std::size_t>();
    p.pair_count = j.at("pair_count").get<std::size_t>();
    p.f1_test = summary_from_json(j.at("f1_test"));
    p.f1_train = summary_from_json(j.at("f1_train"));
    p.overfit = summary_from_json(j.at("overfit"));
    if (j.contains("f1_test_weighted")) p.f1_test_weighted = summary_from_json(j.at("f1_test_weighted"));
    for (const auto& [k, v] : j.at("structural").items()) p.structural[k] = summary_from_json(v);
    for (const auto& [k, v] : j.at("comparative").items()) p.comparative[k] = summary_from_json(v);
    p.pearson_degenerate_pairs = j.value("pearson_degenerate_pairs", std::size_t{0});
    p.kendall_degenerate_pairs = j.value("kendall_degenerate_pairs", std::size_t{0});
    return p;
}

nlohmann::json to_json(const harness::StabilityReport& r) {
    nlohmann::json j;
    j["dataset"] = r.dataset_id;
    j["model"] = r.model_id;
    j["features"] = r.feature_count;
    j["rows"] = r.rows;
    j["repetitions"] = r.repetitions;
    j["folds"] = r.folds;
    j["master_seed"] = r.master_seed;
    j["preprocs"] = nlohmann::json::array();
    for (const auto& p : r.preprocs) j["preprocs"].push_back(to_json(p));
    return j;
}

harness::StabilityReport report_from_json(const nlohmann::json& j) {
    harness::StabilityReport r;
    r.dataset_id = j.at("dataset").get<std::string>();
    r.model_id = j.at("model").get<std::string>();
    r.feature_count = j.at("features").get<std::size_t>();
    r.rows = j.at("rows").get<std::size_t>();
    r.repetitions = j.at("repetitions").get<std::size_t>();
    r.folds = j.at("folds").get<std::size_t>();
    r.master_seed = j.at("master_seed").get<std::uint64_t>();
    for (const auto& p : j.at("preprocs")) r.preprocs.push_back(preproc_from_json(p));
    return r;
}

nlohmann::json run_json(const std::vector<harness::StabilityReport>& reports) {
    nlohmann::json j;
    j["format"] = "intstab-report";
    j["version"] = 1;
    j["experiments"] = nlohmann::json::array();
    for (const auto& r : reports) j["experiments"].push_back(to_json(r));
    return j;
}

std::vector<harness::StabilityReport> load_run(const std::filesystem::path& run_dir) {
    const auto path = run_dir / "report.json";
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    nlohmann::json j = nlohmann::json::parse(in);
    std::vector<harness::StabilityReport> out;
    for (const auto& e : j.at("experiments")) out.push_back(report_from_json(e));
    return out;
}

bool is_known_measure(const std::string& name) {
    bool is_std = false;
    return base_measures().count(strip_std(name, is_std)) > 0;
}

bool higher_is_better(const std::string& name) {
    bool is_std = false;
    std::string base = strip_std(name, is_std);
    if (is_std) return false;
    return base == "f1" || base == "f1_weighted" || base == "f1_train" || base == "jaccard" || base == "pearson" || base == "kendall";
}

std::optional<double> measure_value(const harness::PreprocSummary& p, const std::string& name) {
    bool is_std = false;
    const std::string base = strip_std(name, is_std);
    if (!base_measures().count(base)) throw std::invalid_argument("unknown measure: " + name);
    if (p.models == 0) return std::nullopt;
    const harness::Summary* s = nullptr;
    if (base == "f1") {
        s = &p.f1_test;
    } else if (base == "f1_weighted") {
        s = &p.f1_test_weighted;
    } else if (base == "f1_train") {
        s = &p.f1_train;
    } else if (base == "overfit") {
        s = &p.overfit;
    } else if (auto it = p.structural.find(base); it != p.structural.end()) {
        s = &it->second;
    } else if (auto jt = p.comparative.find(base); jt != p.comparative.end()) {
        s = &jt->second;
    }
    if (!s) return std::nullopt;
    return is_std ? s->std : s->mean;
}

std::string method_id(const std::string& model, const std::string& preproc) { return model + "+" + preproc; }

MeasureTable measure_table(const std::vector<harness::StabilityReport>& reports, const std::string& measure) {
    if (!is_known_measure(measure)) throw std::invalid_argument("unknown measure: " + measure);
    std::map<std::string, std::map<std::string, double>> by_dataset;  // dataset -> method -> value
    std::set<std::string> all_methods;
    for (const auto& r : reports) {
        for (const auto& p : r.preprocs) {
            const std::string m = method_id(r.model_id, p.preproc_id);
            all_methods.insert(m);
            by_dataset[r.dataset_id];
            if (auto v = measure_value(p, measure)) by_dataset[r.dataset_id][m] = *v;
        }
    }
    MeasureTable t;
    for (const auto& [ds, _] : by_dataset) t.datasets.push_back(ds);
    for (const auto& m : all_methods) {
        bool everywhere = true;
        for (const auto& [ds, vals] : by_dataset) everywhere = everywhere && vals.count(m);
        (everywhere ? t.methods : t.dropped).push_back(m);
    }
    for (const auto& ds : t.datasets) {
        std::vector<double> row;
        for (const auto& m : t.methods) row.push_back(by_dataset[ds][m]);
        t.values.push_back(std::move(row));
    }
    return t;
}

std::vector<ScatterPoint> scatter_points(const std::vector<harness::StabilityReport>& reports, const std::string& x,
                                         const std::string& y) {
    if (!is_known_measure(x)) throw std::invalid_argument("unknown measure: " + x);
    if (!is_known_measure(y)) throw std::invalid_argument("unknown measure: " + y);
    std::vector<ScatterPoint> out;
    for (const auto& r : reports) {
        for (const auto& p : r.preprocs) {
            auto vx = measure_value(p, x);
            auto vy = measure_value(p, y);
            if (!vx || !vy) continue;
            out.push_back({r.dataset_id, r.model_id, p.preproc_id, *vx, *vy});
        }
    }
    return out;
}

nlohmann::json ranks_json(const stats::RankTable& t, const stats::FriedmanResult& f, double alpha, double cd,
                          const std::vector<std::vector<std::size_t>>& groups) {
    nlohmann::json j;
    j["datasets"] = t.datasets;
    j["methods"] = t.methods;
    j["higher_is_better"] = t.higher_is_better;
    j["average_ranks"] = nlohmann::json::object();
    for (std::size_t m = 0; m < t.methods.size(); ++m) j["average_ranks"][t.methods[m]] = t.avg_ranks[m];
    j["friedman"] = {{"chi2", f.chi2}, {"df", f.df}, {"p_value", f.p_value}, {"reject_at", f.reject_at}};
    if (f.iman_davenport) {
        j["friedman"]["iman_davenport"] = *f.iman_davenport;
        j["friedman"]["iman_davenport_p"] = *f.iman_davenport_p;
    }
    j["nemenyi"] = {{"alpha", alpha}, {"critical_difference", cd}};
    nlohmann::json gs = nlohmann::json::array();
    for (const auto& g : groups) {
        nlohmann::json members = nlohmann::json::array();
        double lo = t.avg_ranks[g.front()], hi = t.avg_ranks[g.back()];
        for (std::size_t m : g) members.push_back(t.methods[m]);
        gs.push_back({{"methods", members}, {"from", lo}, {"to", hi}});
    }
    j["nemenyi"]["groups"] = gs;
    return j;
}

}  // namespace intstab::report
