#include "intstab/cli.hpp"

#include "intstab/report.hpp"
#include "intstab/stats.hpp"

#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace intstab::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: bad value for '") + key + "': " + e.what());
    }
}

fs::path resolve(const fs::path& base, const std::string& p) {
    fs::path path(p);
    return path.is_absolute() ? path : base / path;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

preprocess::PreprocSpec parse_step(const json& j) {
    preprocess::PreprocSpec s;
    if (j.is_string()) {
        s.kind = preprocess::parse_kind(j.get<std::string>());
        return s;
    }
    if (!j.is_object() || !j.contains("kind")) throw ConfigError("config: preprocessing step needs a 'kind'");
    s.kind = preprocess::parse_kind(j.at("kind").get<std::string>());
    const json params = j.value("params", json::object());
    s.k = get_or<std::size_t>(params, "k", s.k);
    s.percentile = get_or<double>(params, "percentile", s.percentile);
    if (params.contains("target")) s.target = get_or<std::size_t>(params, "target", 0);
    s.neighbors = get_or<std::size_t>(params, "neighbors", s.neighbors);
    s.seed = get_or<std::uint64_t>(j, "seed", 0);
    s.validate();
    return s;
}

data::Dataset load_dataset(const DatasetEntry& e) {
    return data::load_csv(e.csv, data::load_schema(e.schema));
}

std::vector<std::size_t> parse_grid(const std::string& spec, std::size_t n) {
    if (spec.empty() || spec == "geometric") return harness::geometric_grid(n);
    std::vector<std::size_t> grid;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            long long v = std::stoll(item, &used);
            if (used != item.size() || v < 1) throw std::invalid_argument(item);
            grid.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw ConfigError("sweep: bad m value '" + item + "'");
        }
    }
    if (grid.empty()) throw ConfigError("sweep: empty m grid");
    return grid;
}

RunConfig load_with_overrides(const fs::path& config_path, const Overrides& o) {
    RunConfig c = load_config(config_path);
    if (o.out_dir) c.output_dir = *o.out_dir;
    if (o.seed) c.master_seed = *o.seed;
    if (o.jobs) c.jobs = *o.jobs;
    validate_config(c);
    return c;
}

}  // namespace

learners::ModelSpec parse_model(const json& j) {
    if (j.is_string()) return learners::ModelSpec::preset(j.get<std::string>());
    if (!j.is_object()) throw ConfigError("config: model entries are names or objects");
    const std::string preset = get_or<std::string>(j, "preset", get_or<std::string>(j, "id", ""));
    learners::ModelSpec m = learners::ModelSpec::preset(preset);
    m.id = get_or<std::string>(j, "id", preset);
    const json p = j.value("params", json::object());
    auto& t = m.tree;
    t.max_depth = get_or<int>(p, "max_depth", t.max_depth);
    t.min_samples_split = get_or<std::size_t>(p, "min_samples_split", t.min_samples_split);
    t.min_samples_leaf = get_or<std::size_t>(p, "min_samples_leaf", t.min_samples_leaf);
    t.min_cases = get_or<std::size_t>(p, "min_cases", t.min_cases);
    t.confidence = get_or<double>(p, "confidence", t.confidence);
    t.threshold_penalty = get_or<bool>(p, "threshold_penalty", t.threshold_penalty);
    if (p.contains("pruning")) {
        std::string pr = get_or<std::string>(p, "pruning", "");
        if (pr == "ebp") {
            t.pruning = learners::Pruning::ebp;
        } else if (pr == "none") {
            t.pruning = learners::Pruning::none;
        } else {
            throw ConfigError("config: pruning must be 'ebp' or 'none'");
        }
    }
    m.min_gain = get_or<double>(p, "min_gain", m.min_gain);
    m.bins = get_or<std::size_t>(p, "bins", m.bins);
    m.linear.alpha = get_or<double>(p, "alpha", m.linear.alpha);
    m.linear.max_sweeps = get_or<std::size_t>(p, "max_sweeps", m.linear.max_sweeps);
    m.linear.tolerance = get_or<double>(p, "tolerance", m.linear.tolerance);
    if (m.bins < 2) throw ConfigError("config: bins must be >= 2");
    if (m.linear.alpha < 0) throw ConfigError("config: alpha must be >= 0");
    if (!(t.confidence > 0 && t.confidence <= 1)) throw ConfigError("config: confidence must be in (0, 1]");
    return m;
}

harness::PreprocEntry parse_preproc(const json& j) {
    harness::PreprocEntry e;
    if (j.is_string()) return harness::PreprocEntry::named(j.get<std::string>());
    if (!j.is_object()) throw ConfigError("config: preprocessing entries are names or objects");
    if (j.contains("chain")) {
        for (const auto& step : j.at("chain")) e.chain.push_back(parse_step(step));
    } else {
        e.chain.push_back(parse_step(j));
    }
    std::erase_if(e.chain, [](const auto& s) { return s.kind == preprocess::PreprocKind::identity; });
    std::string fallback;
    for (const auto& s : e.chain) fallback += (fallback.empty() ? "" : "+") + preprocess::to_string(s.kind);
    e.id = get_or<std::string>(j, "id", fallback.empty() ? "identity" : fallback);
    return e;
}

RunConfig parse_config(const json& j, const fs::path& base_dir) {
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    RunConfig c;
    try {
        if (!j.contains("config_version")) throw ConfigError("config: missing config_version");
        c.config_version = j.at("config_version").get<int>();
        if (c.config_version != kConfigVersion) {
            throw ConfigError("config: unsupported config_version " + std::to_string(c.config_version));
        }
        for (const auto& d : j.at("datasets")) {
            DatasetEntry e;
            e.id = d.at("id").get<std::string>();
            e.csv = resolve(base_dir, d.at("csv").get<std::string>());
            e.schema = resolve(base_dir, d.at("schema").get<std::string>());
            c.datasets.push_back(std::move(e));
        }
        for (const auto& m : j.at("models")) c.models.push_back(parse_model(m));
        if (j.contains("preprocs")) {
            for (const auto& p : j.at("preprocs")) c.preprocs.push_back(parse_preproc(p));
        } else {
            c.preprocs.push_back(harness::PreprocEntry::named("identity"));
        }
        c.repetitions = get_or<std::size_t>(j, "repetitions", c.repetitions);
        c.folds = get_or<std::size_t>(j, "folds", c.folds);
        c.master_seed = get_or<std::uint64_t>(j, "master_seed", c.master_seed);
        c.jobs = get_or<std::size_t>(j, "jobs", c.jobs);
        c.output_dir = resolve(base_dir, get_or<std::string>(j, "output_dir", "run"));
        if (j.contains("sweep")) c.sweep_m = j.at("sweep").at("m_values").get<std::vector<std::size_t>>();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

RunConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return parse_config(j, path.parent_path());
}

void validate_config(const RunConfig& c) {
    if (c.datasets.empty()) throw ConfigError("config: no datasets");
    if (c.models.empty()) throw ConfigError("config: no models");
    std::set<std::string> ids;
    for (const auto& d : c.datasets) {
        if (!ids.insert(d.id).second) throw ConfigError("config: duplicate dataset id " + d.id);
        if (!fs::exists(d.csv)) throw ConfigError("config: missing file " + d.csv.string());
        if (!fs::exists(d.schema)) throw ConfigError("config: missing file " + d.schema.string());
    }
    ids.clear();
    for (const auto& m : c.models) {
        if (!ids.insert(m.id).second) throw ConfigError("config: duplicate model id " + m.id);
    }
    harness::ExperimentSpec probe;
    probe.preprocs = c.preprocs;
    probe.repetitions = c.repetitions;
    probe.folds = c.folds;
    try {
        probe.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (c.folds < 2) throw ConfigError("config: folds must be >= 2");
    if (c.jobs < 1) throw ConfigError("config: jobs must be >= 1");
}

int cmd_run(const fs::path& config_path, const Overrides& overrides, bool strict, std::ostream& log) {
    RunConfig c;
    try {
        c = load_with_overrides(config_path, overrides);
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    std::vector<harness::StabilityReport> reports;
    std::ostringstream errors;
    std::size_t failures = 0;
    for (const auto& ds : c.datasets) {
        data::Dataset data;
        try {
            data = load_dataset(ds);
        } catch (const std::exception& e) {
            log << "error: dataset " << ds.id << ": " << e.what() << "\n";
            return kExitData;
        }
        log << "dataset " << ds.id << ": " << data.rows() << " rows, " << data.cols() << " features, "
            << data.class_count() << " classes\n";
        for (const auto& model : c.models) {
            harness::ExperimentSpec spec;
            spec.dataset_id = ds.id;
            spec.model = model;
            spec.preprocs = c.preprocs;
            spec.repetitions = c.repetitions;
            spec.folds = c.folds;
            spec.master_seed = c.master_seed;
            spec.jobs = c.jobs;
            harness::StabilityReport r;
            try {
                r = harness::evaluate_stability(spec, data);
            } catch (const std::exception& e) {
                log << "error: " << ds.id << "/" << model.id << ": " << e.what() << "\n";
                return kExitData;
            }
            for (const auto& cell : r.cells) {
                if (cell.ok()) continue;
                ++failures;
                errors << cell.dataset_id << "," << cell.model_id << "," << cell.preproc_id << "," << cell.repetition
                       << "," << cell.fold << "," << report::csv_field(*cell.error) << "\n";
            }
            log << "  " << model.id << " done\n";
            reports.push_back(std::move(r));
        }
    }

    try {
        fs::create_directories(c.output_dir);
        std::ostringstream cells;
        report::write_cells_csv(cells, reports);
        write_text(c.output_dir / "cells.csv", cells.str());
        write_text(c.output_dir / "report.json", report::run_json(reports).dump(2) + "\n");
        const fs::path err_path = c.output_dir / "errors.csv";
        if (failures) {
            write_text(err_path, "dataset,model,preproc,repetition,fold,error\n" + errors.str());
        } else {
            fs::remove(err_path);
        }
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitData;
    }
    log << "wrote " << (c.output_dir / "cells.csv").string() << " and report.json\n";
    if (failures) {
        log << "warning: " << failures << " failed cells, see errors.csv\n";
        if (strict) return kExitCellFailures;
    }
    return kExitOk;
}

int cmd_stats(const fs::path& run_dir, const std::string& measure, double alpha, bool iman_davenport,
              std::ostream& log) {
    if (!report::is_known_measure(measure)) {
        log << "error: unknown measure " << measure << "\n";
        return kExitConfig;
    }
    if (alpha != 0.05 && alpha != 0.10) {
        log << "error: alpha must be 0.05 or 0.10\n";
        return kExitConfig;
    }
    std::vector<harness::StabilityReport> reports;
    try {
        reports = report::load_run(run_dir);
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitData;
    }
    auto table = report::measure_table(reports, measure);
    for (const auto& m : table.dropped) log << "warning: " << m << " lacks " << measure << " on some dataset; dropped\n";
    if (table.datasets.size() < 2) {
        log << "error: need at least two datasets, have " << table.datasets.size() << "\n";
        return kExitData;
    }
    if (table.methods.size() < 2 || table.methods.size() > 20) {
        log << "error: need between 2 and 20 methods, have " << table.methods.size() << "\n";
        return kExitData;
    }
    auto ranks = stats::average_ranks(table.values, report::higher_is_better(measure), table.methods, table.datasets);
    auto fr = stats::friedman(ranks, iman_davenport);
    double cd = stats::nemenyi_cd(table.methods.size(), table.datasets.size(), alpha);
    auto groups = stats::nemenyi_groups(ranks.avg_ranks, cd);

    json out = report::ranks_json(ranks, fr, alpha, cd, groups);
    out["measure"] = measure;
    write_text(run_dir / ("stats_" + measure + ".json"), out.dump(2) + "\n");

    std::ostringstream cdcsv;
    cdcsv << "method,avg_rank,groups\n";
    std::vector<std::size_t> order(table.methods.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return ranks.avg_ranks[a] < ranks.avg_ranks[b]; });
    for (std::size_t m : order) {
        std::string member;
        for (std::size_t g = 0; g < groups.size(); ++g) {
            if (std::find(groups[g].begin(), groups[g].end(), m) != groups[g].end()) {
                member += (member.empty() ? "" : ";") + std::to_string(g + 1);
            }
        }
        cdcsv << report::csv_field(table.methods[m]) << "," << report::format_double(ranks.avg_ranks[m]) << ","
              << member << "\n";
    }
    write_text(run_dir / ("cd_" + measure + ".csv"), cdcsv.str());
    log << "friedman chi2=" << fr.chi2 << " df=" << fr.df << " p=" << fr.p_value << "; CD(" << alpha << ")=" << cd
        << "; " << groups.size() << " groups\n";
    return kExitOk;
}

int cmd_scatter(const fs::path& run_dir, const std::string& x, const std::string& y, std::ostream& log) {
    if (!report::is_known_measure(x) || !report::is_known_measure(y)) {
        log << "error: unknown measure\n";
        return kExitConfig;
    }
    std::vector<harness::StabilityReport> reports;
    try {
        reports = report::load_run(run_dir);
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitData;
    }
    auto points = report::scatter_points(reports, x, y);
    std::ostringstream csv;
    csv << "x,y,dataset,model,preproc\n";
    std::vector<double> xs, ys;
    for (const auto& p : points) {
        csv << report::format_double(p.x) << "," << report::format_double(p.y) << "," << report::csv_field(p.dataset)
            << "," << report::csv_field(p.model) << "," << report::csv_field(p.preproc) << "\n";
        xs.push_back(p.x);
        ys.push_back(p.y);
    }
    const std::string stem = "scatter_" + x + "_" + y;
    write_text(run_dir / (stem + ".csv"), csv.str());
    json j;
    j["x"] = x;
    j["y"] = y;
    j["points"] = points.size();
    if (points.size() >= 3) {
        auto pr = stats::pearson_corr_p(xs, ys);
        auto sp = stats::spearman_corr_p(xs, ys);
        j["pearson"] = {{"r", pr.r}, {"p_value", pr.p_value}};
        j["spearman"] = {{"r", sp.r}, {"p_value", sp.p_value}};
        log << x << " vs " << y << ": r=" << pr.r << " p=" << pr.p_value << " (n=" << points.size() << ")\n";
    } else {
        log << "warning: fewer than three points, no correlation\n";
    }
    write_text(run_dir / (stem + ".json"), j.dump(2) + "\n");
    return kExitOk;
}

int cmd_sweep(const fs::path& config_path, const std::string& m_grid, const Overrides& overrides, std::ostream& log) {
    RunConfig c;
    try {
        c = load_with_overrides(config_path, overrides);
        for (const auto& m : c.models) {
            if (m.family != learners::ModelFamily::tree) throw ConfigError("sweep: model " + m.id + " is not a tree");
        }
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    std::ostringstream csv;
    csv << "dataset,model,m,node_mean,node_std,f1_mean\n";
    for (const auto& ds : c.datasets) {
        data::Dataset data;
        try {
            data = load_dataset(ds);
        } catch (const std::exception& e) {
            log << "error: dataset " << ds.id << ": " << e.what() << "\n";
            return kExitData;
        }
        std::vector<std::size_t> grid;
        try {
            grid = (m_grid.empty() && c.sweep_m) ? *c.sweep_m : parse_grid(m_grid, data.rows());
        } catch (const std::exception& e) {
            log << "error: " << e.what() << "\n";
            return kExitConfig;
        }
        for (const auto& model : c.models) {
            harness::ExperimentSpec spec;
            spec.dataset_id = ds.id;
            spec.model = model;
            spec.preprocs = {harness::PreprocEntry::named("identity")};
            spec.repetitions = c.repetitions;
            spec.folds = c.folds;
            spec.master_seed = c.master_seed;
            spec.jobs = c.jobs;
            std::vector<harness::SweepPoint> points;
            try {
                points = harness::sweep_min_cases(spec, data, grid);
            } catch (const std::exception& e) {
                log << "error: " << ds.id << "/" << model.id << ": " << e.what() << "\n";
                return kExitData;
            }
            for (const auto& p : points) {
                csv << report::csv_field(ds.id) << "," << report::csv_field(model.id) << "," << p.m << ","
                    << report::format_double(p.node_mean) << "," << report::format_double(p.node_std) << ","
                    << report::format_double(p.f1_mean) << "\n";
            }
            log << "  " << ds.id << "/" << model.id << ": " << points.size() << " m values\n";
        }
    }
    try {
        fs::create_directories(c.output_dir);
        write_text(c.output_dir / "sweep.csv", csv.str());
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitData;
    }
    log << "wrote " << (c.output_dir / "sweep.csv").string() << "\n";
    return kExitOk;
}

int cmd_report(const fs::path& run_dir, std::ostream& log) {
    std::vector<harness::StabilityReport> reports;
    try {
        reports = report::load_run(run_dir);
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitData;
    }
    const std::vector<std::string> measures = {"f1",         "f1_weighted", "f1_train", "overfit",    "used_features",
                                               "feature_ratio", "node_count", "depth",   "rule_count",
                                               "conjunct_total", "jaccard", "pearson",  "kendall"};
    std::ostringstream csv;
    csv << "dataset,model,preproc,models,failures,pair_count";
    for (const auto& m : measures) csv << "," << m << "_mean," << m << "_std";
    csv << "\n";
    for (const auto& r : reports) {
        for (const auto& p : r.preprocs) {
            csv << report::csv_field(r.dataset_id) << "," << report::csv_field(r.model_id) << ","
                << report::csv_field(p.preproc_id) << "," << p.models << "," << p.failures << "," << p.pair_count;
            for (const auto& m : measures) {
                auto mean = report::measure_value(p, m);
                auto sd = report::measure_value(p, m + "_std");
                csv << "," << (mean ? report::format_double(*mean) : "") << "," << (sd ? report::format_double(*sd) : "");
            }
            csv << "\n";
        }
    }
    write_text(run_dir / "summary.csv", csv.str());
    log << "wrote " << (run_dir / "summary.csv").string() << "\n";
    return kExitOk;
}

}  // namespace intstab::cli
