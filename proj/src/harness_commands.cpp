#include "catbbm/harness/commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "json.hpp"

#include "catbbm/engine.hpp"
#include "catbbm/estimators.hpp"
#include "catbbm/harness/format.hpp"
#include "catbbm/harness/verify.hpp"
#include "catbbm/oracles.hpp"
#include "catbbm/quadrature.hpp"

namespace catbbm::harness {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitAborted = 3;

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

fs::path output_dir(const Config& c) {
    fs::path dir(c.output_path);
    fs::create_directories(dir);
    return dir;
}

ordered_json failures_json(const EnsembleResult& r) {
    ordered_json out = ordered_json::array();
    for (const auto& f : r.failures) out.push_back({{"run_id", f.run_id}, {"message", f.message}});
    return out;
}

std::string genealogy_csv(const Config& config, const EnsembleResult& result) {
    const EnsembleSpec spec = config.ensemble_spec();
    const std::vector<double> times = spec.observation_times();
    EngineOptions options = spec.engine;
    options.record_genealogy = true;
    std::string out = std::string(kGenealogyCsvHeader) + "\n";
    for (const auto& run : result.runs) {
        RngStream rng(spec.base_seed, run.run_id);
        const RunRecord record = simulate_run_recorded(spec.params, times, rng, options);
        for (const Particle& p : record.genealogy) {
            out += format_uint(run.run_id) + "," + format_uint(p.id) + "," +
                   (p.parent_id ? format_uint(*p.parent_id) : std::string()) + "," + format_double(p.birth_time) +
                   "," + format_double(p.birth_position) + "," + format_double(p.budget) + "," +
                   (p.branched_at ? format_double(*p.branched_at) : std::string()) + "\n";
        }
    }
    return out;
}

void write_runs(const Config& config, const fs::path& dir, const EnsembleResult& result) {
    if (config.output_format == OutputFormat::json)
        write_file(dir / "runs.json", runs_json(result));
    else
        write_file(dir / "runs.csv", runs_csv(result));
}

void require_origin_start(const Config& config, std::string_view command) {
    if (config.x0 != 0.0)
        throw std::invalid_argument(std::string(command) + " compares against a limit law for a start at 0; x0 must be 0");
}

}  // namespace

std::string version_string() { return "catbbm 0.1.0"; }

std::string runs_csv(const EnsembleResult& result) {
    std::string out = std::string(kRunsCsvHeader) + "\n";
    for (const auto& r : result.runs) {
        out += format_uint(r.run_id) + "," + format_uint(r.n_particles) + "," + format_double(r.r_centered) + "," +
               format_double(r.m_s) + "," + format_double(r.m_t) + "\n";
    }
    return out;
}

std::string runs_json(const EnsembleResult& result) {
    ordered_json runs = ordered_json::array();
    for (const auto& r : result.runs) {
        ordered_json snaps = ordered_json::array();
        for (const auto& s : r.snapshots) {
            snaps.push_back({{"t", s.t},
                             {"n_particles", s.n_particles},
                             {"rightmost", s.rightmost},
                             {"martingale", s.martingale},
                             {"counts_above", s.counts_above}});
        }
        runs.push_back({{"run_id", r.run_id},
                        {"n_particles", r.n_particles},
                        {"r_centered", r.r_centered},
                        {"m_s", r.m_s},
                        {"m_t", r.m_t},
                        {"lifetimes", r.lifetimes},
                        {"snapshots", std::move(snaps)}});
    }
    ordered_json j = {{"observation_times", result.observation_times},
                      {"runs", std::move(runs)},
                      {"failures", failures_json(result)}};
    return j.dump(1) + "\n";
}

std::string meta_json(const Config& config, const EnsembleResult* result, double wall_time_seconds) {
    ordered_json j;
    j["version"] = version_string();
    j["config"] = to_json(config);
    j["config_hash"] = config_hash(config);
    j["seed"] = config.seed;
    j["population_cap"] = config.population_cap;
    if (result) {
        j["n_completed"] = result->runs.size();
        j["aborted_runs"] = failures_json(*result);
    }
    j["wall_time_seconds"] = wall_time_seconds;
    return j.dump(2) + "\n";
}

std::string oracle_table(const Config& config) {
    config.validate();
    std::vector<double> times = config.snapshot_times;
    if (times.empty()) times.push_back(config.t);
    std::string c_text = "nan";
    try {
        c_text = format_double(oracles::constant_C(config.beta).value);
    } catch (const QuadratureError&) {
    }
    std::string out = std::string(kOracleCsvHeader) + "\n";
    for (double t : times) {
        const ModelParams params{config.beta, config.x0, t};
        for (double y : config.y_grid) {
            const double lambda = config.beta * t / 2.0 + y;
            double m1 = NAN, m2 = NAN, m2_err = NAN, lower = NAN, upper = NAN;
            std::string status = "ok";
            if (config.x0 != 0.0) {
                status = "requires_x0_zero";
            } else {
                m1 = oracles::expected_count(params, lambda).value;
                if (lambda > 0.0) {
                    try {
                        const OracleValue v = oracles::second_moment_count(params, y);
                        m2 = v.value;
                        m2_err = v.abs_error;
                        const auto b = oracles::rightmost_bounds(params, y);
                        lower = b.lower.value;
                        upper = b.upper.value;
                    } catch (const QuadratureError&) {
                        status = "quadrature_failed";
                    }
                } else {
                    status = "level_not_positive";
                }
            }
            out += format_double(config.beta) + "," + format_double(t) + "," + format_double(y) + "," +
                   format_double(m1) + "," + format_double(m2) + "," + format_double(m2_err) + "," +
                   format_double(lower) + "," + format_double(upper) + "," + c_text + "," + status + "\n";
        }
    }
    return out;
}

int cmd_simulate(const Config& config) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    const EnsembleResult result = run_ensemble(config.ensemble_spec());
    const fs::path dir = output_dir(config);
    write_runs(config, dir, result);
    if (!config.genealogy_path.empty()) write_file(config.genealogy_path, genealogy_csv(config, result));
    write_file(dir / "meta.json", meta_json(config, &result, seconds_since(start)));
    if (!result.complete()) {
        std::cerr << result.failures.size() << " run(s) aborted; see meta.json\n";
        return kExitAborted;
    }
    return 0;
}

int cmd_oracle(const Config& config) {
    const auto start = std::chrono::steady_clock::now();
    const std::string table = oracle_table(config);
    const fs::path dir = output_dir(config);
    if (config.output_format == OutputFormat::json) {
        ordered_json rows = ordered_json::array();
        std::istringstream in(table);
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            std::vector<std::string> cells;
            std::stringstream ss(line);
            for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
            static const char* keys[] = {"beta", "t", "y", "m1", "m2", "m2_abs_err", "lower", "upper", "C"};
            ordered_json row;
            for (std::size_t i = 0; i < std::size(keys); ++i) {
                const double v = std::stod(cells[i]);
                row[keys[i]] = std::isnan(v) ? ordered_json(nullptr) : ordered_json(v);
            }
            row["status"] = cells.back();
            rows.push_back(std::move(row));
        }
        write_file(dir / "oracle.json", rows.dump(1) + "\n");
    } else {
        write_file(dir / "oracle.csv", table);
    }
    write_file(dir / "meta.json", meta_json(config, nullptr, seconds_since(start)));
    return 0;
}

int cmd_theorem1(const Config& config) {
    config.validate();
    require_origin_start(config, "theorem1");
    const auto start = std::chrono::steady_clock::now();
    const EnsembleResult result = run_ensemble(config.ensemble_spec());
    const fs::path dir = output_dir(config);
    write_runs(config, dir, result);
    write_file(dir / "meta.json", meta_json(config, &result, seconds_since(start)));
    result.require_complete();
    const auto report =
        estimators::theorem1_from_runs(result, config.beta, config.t, config.intermediate_time(), config.y_grid);
    std::string csv = "y,ecdf,mixture\n";
    for (const auto& r : report.rows)
        csv += format_double(r.y) + "," + format_double(r.ecdf_value) + "," + format_double(r.mixture_value) + "\n";
    write_file(dir / "theorem1.csv", csv);
    ordered_json j = {{"beta", config.beta},
                      {"t", report.t},
                      {"s", report.s},
                      {"n_runs", result.runs.size()},
                      {"y_range", {config.y_grid.front(), config.y_grid.back()}},
                      {"ks_statistic", report.ks.statistic},
                      {"ks_n_effective", report.ks.n_effective},
                      {"finite_t_calibrated", true}};
    write_file(dir / "theorem1.json", j.dump(2) + "\n");
    std::cout << "ks " << format_double(report.ks.statistic) << "\n";
    return 0;
}

int cmd_prop6(const Config& config) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    const EnsembleResult result = run_ensemble(config.ensemble_spec());
    const fs::path dir = output_dir(config);
    write_runs(config, dir, result);
    write_file(dir / "meta.json", meta_json(config, &result, seconds_since(start)));
    result.require_complete();
    std::string csv = "z,empirical,predicted,z_score,n\n";
    for (double z : config.y_grid) {
        const auto r = estimators::prop6_from_runs(result, config.beta, config.x0, config.t, z);
        csv += format_double(r.z) + "," + format_double(r.empirical) + "," + format_double(r.predicted) + "," +
               format_double(r.z_score) + "," + format_uint(r.n) + "\n";
    }
    write_file(dir / "prop6.csv", csv);
    return 0;
}

int cmd_verify(const Config& config) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    std::vector<VerifyReport> reports;
    for (std::uint64_t k = 0; k < config.seeds; ++k) {
        VerifyOptions options;
        options.seed = config.seed + k;
        options.parallelism = config.parallelism;
        options.run_scale = config.run_scale;
        options.tolerance_scale = config.tolerance_scale;
        options.population_cap = config.population_cap;
        if (config.seeds > 1) std::cout << "seed " << options.seed << "\n";
        reports.push_back(run_verify(options, [](const CriterionResult& c, double seconds) {
            std::string tag = c.status == Status::pass ? "PASS" : c.status == Status::fail ? "FAIL" : "ERROR";
            std::cout << tag << "  " << c.id << " " << c.name;
            if (!c.message.empty()) std::cout << ": " << c.message;
            std::cout << " (" << format_double(std::round(seconds * 10.0) / 10.0) << " s)" << std::endl;
        }));
    }
    const fs::path dir = output_dir(config);
    if (reports.size() == 1) {
        write_file(dir / "report.json", report_to_json(reports.front()).dump(2) + "\n");
    } else {
        ordered_json all = ordered_json::array();
        for (const auto& r : reports) all.push_back(report_to_json(r));
        ordered_json j = {{"pass_rates", pass_rates(reports)}, {"reports", std::move(all)}};
        write_file(dir / "report.json", j.dump(2) + "\n");
    }
    const EnsembleResult& runs = reports.front().limit_law_runs;
    write_file(dir / "runs.csv", runs_csv(runs));
    write_file(dir / "meta.json", meta_json(config, &runs, seconds_since(start)));
    const bool ok = std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.all_passed(); });
    return ok ? 0 : kExitFail;
}

int dispatch(const Config& config) {
    try {
        switch (config.command) {
            case Command::simulate: return cmd_simulate(config);
            case Command::oracle: return cmd_oracle(config);
            case Command::verify: return cmd_verify(config);
            case Command::theorem1: return cmd_theorem1(config);
            case Command::prop6: return cmd_prop6(config);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFail;
    }
    return kExitUsage;
}

}  // namespace catbbm::harness
