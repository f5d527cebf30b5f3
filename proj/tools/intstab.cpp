// intstab: stability assessment of interpretable classifiers.
//
//   intstab run     --config run.json [--out-dir DIR] [--seed N] [--jobs N] [--strict]
//   intstab stats   --run-dir DIR --measure pearson [--alpha 0.10] [--iman-davenport]
//   intstab scatter --run-dir DIR --x pearson --y feature_ratio
//   intstab sweep   --config run.json [--m-grid geometric|2,4,8] [--out-dir DIR]
//   intstab report  --run-dir DIR

#include "intstab/cli.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Stability impact assessment of interpretable classifiers"};
    app.require_subcommand(1);

    std::string config, run_dir, out_dir, measure, x, y, m_grid;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
    bool strict = false, iman = false;
    double alpha = 0.10;

    auto add_overrides = [&](CLI::App* cmd) {
        cmd->add_option("--config", config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
        cmd->add_option("--out-dir", out_dir, "Output directory (overrides the config)");
        cmd->add_option("--seed", seed, "Master seed (overrides the config)");
        cmd->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    };

    auto* run = app.add_subcommand("run", "Run the experiment grid");
    add_overrides(run);
    run->add_flag("--strict", strict, "Exit non-zero when any cell fails");

    auto* sweep = app.add_subcommand("sweep", "Tree min-cases sweep");
    add_overrides(sweep);
    sweep->add_option("--m-grid", m_grid, "'geometric' or a comma separated list of m values");

    auto* st = app.add_subcommand("stats", "Average ranks, Friedman test and Nemenyi groups");
    st->add_option("--run-dir", run_dir)->required()->check(CLI::ExistingDirectory);
    st->add_option("--measure", measure)->required();
    st->add_option("--alpha", alpha, "0.05 or 0.10")->capture_default_str();
    st->add_flag("--iman-davenport", iman, "Also report the Iman-Davenport F statistic");

    auto* sc = app.add_subcommand("scatter", "Per-cell scatter of two measures with correlation");
    sc->add_option("--run-dir", run_dir)->required()->check(CLI::ExistingDirectory);
    sc->add_option("--x", x)->required();
    sc->add_option("--y", y)->required();

    auto* rep = app.add_subcommand("report", "Summary table from a finished run");
    rep->add_option("--run-dir", run_dir)->required()->check(CLI::ExistingDirectory);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : intstab::cli::kExitConfig;
    }

    intstab::cli::Overrides o;
    auto* active = app.get_subcommands().front();
    if (!out_dir.empty()) o.out_dir = out_dir;
    auto given = [&](const char* name) {
        const auto* opt = active->get_option_no_throw(name);
        return opt != nullptr && opt->count() > 0;
    };
    if (given("--seed")) o.seed = seed;
    if (given("--jobs")) o.jobs = jobs;

    try {
        if (run->parsed()) return intstab::cli::cmd_run(config, o, strict, std::cerr);
        if (sweep->parsed()) return intstab::cli::cmd_sweep(config, m_grid, o, std::cerr);
        if (st->parsed()) return intstab::cli::cmd_stats(run_dir, measure, alpha, iman, std::cerr);
        if (sc->parsed()) return intstab::cli::cmd_scatter(run_dir, x, y, std::cerr);
        if (rep->parsed()) return intstab::cli::cmd_report(run_dir, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
