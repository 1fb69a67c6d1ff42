#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "catbbm/harness/commands.hpp"
#include "catbbm/harness/config.hpp"
#include "catbbm/harness/format.hpp"

using namespace catbbm::harness;

int main(int argc, char** argv) {
    CLI::App app{"Catalytic branching Brownian motion: simulation, oracles and acceptance checks"};
    app.set_version_flag("--version", version_string());
    app.require_subcommand(1);

    std::string config_file;
    Config cli;
    std::string y_grid, snapshot_times, format;
    double s_intermediate = 0.0;

    std::vector<CLI::App*> subs;
    for (const char* name : {"simulate", "oracle", "verify", "theorem1", "prop6"}) subs.push_back(app.add_subcommand(name));
    subs[0]->description("run an ensemble and write runs.csv / runs.json and meta.json");
    subs[1]->description("tabulate the analytic moments and bounds (oracle.csv)");
    subs[2]->description("run the acceptance suite (report.json)");
    subs[3]->description("compare the rightmost particle with the Gumbel mixture (theorem1.csv)");
    subs[4]->description("offset-start estimate of P(R_t <= beta t/2 + z) (prop6.csv)");

    for (CLI::App* sub : subs) {
        sub->add_option("--config", config_file, "JSON config (or a meta.json); flags override it")
            ->check(CLI::ExistingFile);
        sub->add_option("--beta", cli.beta, "branching rate in local time at 0");
        sub->add_option("--x0", cli.x0, "starting position");
        sub->add_option("--t", cli.t, "horizon");
        sub->add_option("--n-runs", cli.n_runs, "independent runs");
        sub->add_option("--seed", cli.seed, "base seed");
        sub->add_option("--y-grid", y_grid, "a:b:step or comma list (z values for prop6)");
        sub->add_option("--snapshot-times", snapshot_times, "extra observation times, a:b:step or comma list");
        sub->add_option("--s-intermediate", s_intermediate, "intermediate time s (default t/5)");
        sub->add_option("--population-cap", cli.population_cap, "abort a run beyond this many particles");
        sub->add_option("--parallelism", cli.parallelism, "OpenMP threads (0: runtime default)");
        sub->add_option("--out", cli.output_path, "output directory");
        sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--genealogy", cli.genealogy_path, "write a per-particle genealogy CSV (simulate)");
        sub->add_option("--run-scale", cli.run_scale, "scale every verify ensemble size");
        sub->add_option("--tolerance-scale", cli.tolerance_scale, "scale every verify tolerance");
        sub->add_option("--seeds", cli.seeds, "repeat verify over this many consecutive seeds");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        CLI::App* sub = app.get_subcommands().front();
        Config config;
        if (!config_file.empty()) config = config_from_json(nlohmann::json::parse(read_file(config_file)));
        config.command = parse_command(sub->get_name());
        auto set = [&](const char* flag) { return sub->count(flag) > 0; };
        if (set("--beta")) config.beta = cli.beta;
        if (set("--x0")) config.x0 = cli.x0;
        if (set("--t")) config.t = cli.t;
        if (set("--n-runs")) config.n_runs = cli.n_runs;
        if (set("--seed")) config.seed = cli.seed;
        if (set("--y-grid")) config.y_grid = parse_grid(y_grid);
        if (set("--snapshot-times")) config.snapshot_times = parse_grid(snapshot_times);
        if (set("--s-intermediate")) config.s_intermediate = s_intermediate;
        if (set("--population-cap")) config.population_cap = cli.population_cap;
        if (set("--parallelism")) config.parallelism = cli.parallelism;
        if (set("--out")) config.output_path = cli.output_path;
        if (set("--format")) config.output_format = parse_format(format);
        if (set("--genealogy")) config.genealogy_path = cli.genealogy_path;
        if (set("--run-scale")) config.run_scale = cli.run_scale;
        if (set("--tolerance-scale")) config.tolerance_scale = cli.tolerance_scale;
        if (set("--seeds")) config.seeds = cli.seeds;
        return dispatch(config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
