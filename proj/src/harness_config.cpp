#include "catbbm/harness/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "catbbm/harness/format.hpp"

namespace catbbm::harness {

std::string_view to_string(Command c) {
    switch (c) {
        case Command::simulate: return "simulate";
        case Command::oracle: return "oracle";
        case Command::verify: return "verify";
        case Command::theorem1: return "theorem1";
        case Command::prop6: return "prop6";
    }
    return "?";
}

std::string_view to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json"; }

Command parse_command(std::string_view s) {
    for (Command c : {Command::simulate, Command::oracle, Command::verify, Command::theorem1, Command::prop6}) {
        if (to_string(c) == s) return c;
    }
    throw std::invalid_argument("unknown command '" + std::string(s) + "'");
}

OutputFormat parse_format(std::string_view s) {
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    throw std::invalid_argument("unknown output format '" + std::string(s) + "' (csv|json)");
}

namespace {

double parse_number(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw std::invalid_argument("not a number: '" + std::string(s) + "'");
    }
    return v;
}

}  // namespace

std::vector<double> parse_grid(std::string_view spec) {
    std::vector<double> out;
    if (spec.find(':') != std::string_view::npos) {
        const auto p1 = spec.find(':');
        const auto p2 = spec.find(':', p1 + 1);
        if (p2 == std::string_view::npos) throw std::invalid_argument("grid must be a:b:step");
        const double a = parse_number(spec.substr(0, p1));
        const double b = parse_number(spec.substr(p1 + 1, p2 - p1 - 1));
        const double step = parse_number(spec.substr(p2 + 1));
        if (!(step > 0.0) || b < a) throw std::invalid_argument("grid a:b:step needs step > 0 and b >= a");
        const auto n = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
        for (std::size_t i = 0; i < n; ++i) out.push_back(a + static_cast<double>(i) * step);
        return out;
    }
    std::size_t start = 0;
    while (start <= spec.size()) {
        const auto comma = spec.find(',', start);
        const auto piece = spec.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        if (!piece.empty()) out.push_back(parse_number(piece));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    if (out.empty()) throw std::invalid_argument("empty grid");
    return out;
}

EnsembleSpec Config::ensemble_spec() const {
    EnsembleSpec spec;
    spec.params = params();
    spec.n_runs = n_runs;
    spec.snapshot_times = snapshot_times;
    spec.s_intermediate = intermediate_time();
    spec.base_seed = seed;
    spec.parallelism = parallelism;
    spec.engine.population_cap = population_cap;
    return spec;
}

void Config::validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("invalid config: " + what); };
    if (!(beta > 0.0) || !std::isfinite(beta)) fail("beta must be positive");
    if (!std::isfinite(x0)) fail("x0 must be finite");
    if (!(t >= 0.0) || !std::isfinite(t)) fail("t must be nonnegative");
    if (n_runs < 1) fail("n_runs must be >= 1");
    if (population_cap < 1) fail("population_cap must be >= 1");
    if (parallelism < 0) fail("parallelism must be >= 0");
    const double s = intermediate_time();
    if (!(s >= 0.0) || s > t) fail("s_intermediate must lie in [0, t]");
    for (std::size_t i = 0; i < snapshot_times.size(); ++i) {
        if (!(snapshot_times[i] >= 0.0) || snapshot_times[i] > t) fail("snapshot_times must lie in [0, t]");
        if (i > 0 && snapshot_times[i] < snapshot_times[i - 1]) fail("snapshot_times must be sorted");
    }
    const bool needs_grid = command == Command::theorem1 || command == Command::prop6 || command == Command::oracle;
    if (needs_grid && y_grid.empty()) fail("y_grid must be nonempty for " + std::string(to_string(command)));
    if (command == Command::theorem1 && !(s < t)) fail("theorem1 needs s_intermediate < t");
    if (!(run_scale > 0.0)) fail("run_scale must be positive");
    if (!(tolerance_scale > 0.0)) fail("tolerance_scale must be positive");
    if (seeds < 1) fail("seeds must be >= 1");
}

nlohmann::ordered_json to_json(const Config& c) {
    nlohmann::ordered_json j;
    j["command"] = to_string(c.command);
    j["beta"] = c.beta;
    j["x0"] = c.x0;
    j["t"] = c.t;
    j["n_runs"] = c.n_runs;
    j["seed"] = c.seed;
    j["snapshot_times"] = c.snapshot_times;
    j["y_grid"] = c.y_grid;
    j["s_intermediate"] = c.intermediate_time();
    j["population_cap"] = c.population_cap;
    j["parallelism"] = c.parallelism;
    j["output_path"] = c.output_path;
    j["output_format"] = to_string(c.output_format);
    j["genealogy_path"] = c.genealogy_path;
    j["run_scale"] = c.run_scale;
    j["tolerance_scale"] = c.tolerance_scale;
    j["seeds"] = c.seeds;
    return j;
}

Config config_from_json(const nlohmann::json& input, Config c) {
    const nlohmann::json& j = input.contains("config") ? input.at("config") : input;
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (key == "command") c.command = parse_command(value.get<std::string>());
        else if (key == "beta") c.beta = value.get<double>();
        else if (key == "x0") c.x0 = value.get<double>();
        else if (key == "t") c.t = value.get<double>();
        else if (key == "n_runs") c.n_runs = value.get<std::uint64_t>();
        else if (key == "seed") c.seed = value.get<std::uint64_t>();
        else if (key == "snapshot_times") c.snapshot_times = value.get<std::vector<double>>();
        else if (key == "y_grid") c.y_grid = value.is_string() ? parse_grid(value.get<std::string>()) : value.get<std::vector<double>>();
        else if (key == "s_intermediate") {
            if (value.is_null()) c.s_intermediate.reset();
            else c.s_intermediate = value.get<double>();
        }
        else if (key == "population_cap") c.population_cap = value.get<std::uint64_t>();
        else if (key == "parallelism") c.parallelism = value.get<int>();
        else if (key == "output_path") c.output_path = value.get<std::string>();
        else if (key == "output_format") c.output_format = parse_format(value.get<std::string>());
        else if (key == "genealogy_path") c.genealogy_path = value.get<std::string>();
        else if (key == "run_scale") c.run_scale = value.get<double>();
        else if (key == "tolerance_scale") c.tolerance_scale = value.get<double>();
        else if (key == "seeds") c.seeds = value.get<std::uint64_t>();
        else throw std::invalid_argument("unknown config key '" + key + "'");
    }
    return c;
}

std::string config_hash(const Config& c) {
    // Output locations and thread counts do not change results.
    nlohmann::ordered_json j = to_json(c);
    j.erase("output_path");
    j.erase("genealogy_path");
    j.erase("parallelism");
    return hex64(fnv1a(j.dump()));
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace catbbm::harness
