#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "catbbm/ensemble.hpp"

namespace catbbm::harness {

enum class Command { simulate, oracle, verify, theorem1, prop6 };
enum class OutputFormat { csv, json };

std::string_view to_string(Command c);
std::string_view to_string(OutputFormat f);
Command parse_command(std::string_view s);
OutputFormat parse_format(std::string_view s);

/// "a:b:step" (inclusive of b) or a comma-separated list.
std::vector<double> parse_grid(std::string_view spec);

struct Config {
    Command command = Command::simulate;
    double beta = 1.0;
    double x0 = 0.0;
    double t = 1.0;
    std::uint64_t n_runs = 1000;
    std::uint64_t seed = 1;
    std::vector<double> snapshot_times;
    std::vector<double> y_grid = parse_grid("-1:4:0.5");
    std::optional<double> s_intermediate;  ///< empty: t / 5
    std::uint64_t population_cap = 10'000'000;
    int parallelism = 1;
    std::string output_path = ".";
    OutputFormat output_format = OutputFormat::csv;
    std::string genealogy_path;  ///< optional per-run genealogy dump (simulate)

    // verify
    double run_scale = 1.0;        ///< multiplies every ensemble size in verify
    double tolerance_scale = 1.0;  ///< multiplies every acceptance tolerance
    std::uint64_t seeds = 1;       ///< verify repeats over seed, seed+1, ...

    ModelParams params() const { return {beta, x0, t}; }
    double intermediate_time() const { return s_intermediate.value_or(t / 5.0); }
    EnsembleSpec ensemble_spec() const;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

nlohmann::ordered_json to_json(const Config& c);
/// Accepts either a bare config object or a meta.json (reads its "config").
Config config_from_json(const nlohmann::json& j, Config base = {});

/// FNV-1a of the canonical JSON text of the config, as 16 hex digits.
std::string config_hash(const Config& c);

}  // namespace catbbm::harness
