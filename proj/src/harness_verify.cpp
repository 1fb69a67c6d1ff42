#include "catbbm/harness/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "catbbm/estimators.hpp"
#include "catbbm/harness/commands.hpp"
#include "catbbm/harness/format.hpp"
#include "catbbm/oracles.hpp"
#include "catbbm/sampling.hpp"

namespace catbbm::harness {

using nlohmann::ordered_json;

namespace {

// Asymptotic Kolmogorov critical value at the 1% level: Q(1.62762) = 0.01.
constexpr double kKsCritical1pct = 1.62762;
constexpr std::uint64_t kSamplerDraws = 100'000;
constexpr double kSamplerBudgetSeconds = 60.0;
const double kLimitConstant = 2.0 * (1.0 + std::sqrt(2.0));

std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
    return fnv1a(std::to_string(seed) + "/" + std::string(tag));
}

class Suite {
public:
    explicit Suite(const VerifyOptions& o) : opts_(o) {}

    std::uint64_t runs(double nominal) const {
        return std::max<std::uint64_t>(20, static_cast<std::uint64_t>(std::llround(nominal * opts_.run_scale)));
    }
    double tol(double nominal) const { return nominal * opts_.tolerance_scale; }

    // beta = 1, horizon 16: first/second moments, martingale and sandwich.
    const EnsembleResult& unit_rate() {
        if (!unit_rate_) {
            EnsembleSpec spec;
            spec.params = {1.0, 0.0, 16.0};
            spec.n_runs = runs(1e5);
            spec.snapshot_times = {0.1, 0.2, 0.5, 1.0, 1.5, 2.5, 3.0, 4.0, 5.0, 7.5, 9.0, 15.0};
            spec.level_offsets = {0.0, 1.0, 2.0, 3.0};
            spec.base_seed = derive_seed(opts_.seed, "unit_rate");
            spec.parallelism = opts_.parallelism;
            spec.engine.population_cap = opts_.population_cap;
            unit_rate_ = std::make_unique<EnsembleResult>(run_ensemble(spec));
        }
        unit_rate_->require_complete();
        return *unit_rate_;
    }

    // beta = 0.5, horizon 50: martingale and the limit law (t = 12.5 and 50 on the same runs).
    const EnsembleResult& limit_law() {
        if (!limit_law_) {
            EnsembleSpec spec;
            spec.params = {0.5, 0.0, 50.0};
            spec.n_runs = runs(2e4);
            spec.snapshot_times = {2.5, 5.0, 10.0, 12.5, 25.0};
            spec.s_intermediate = 10.0;
            spec.base_seed = derive_seed(opts_.seed, "limit_law");
            spec.parallelism = opts_.parallelism;
            spec.engine.population_cap = opts_.population_cap;
            limit_law_ = std::make_unique<EnsembleResult>(run_ensemble(spec));
        }
        limit_law_->require_complete();
        return *limit_law_;
    }

    const EnsembleResult& offset_start(double x0) {
        auto& slot = offset_[x0];
        if (!slot) {
            EnsembleSpec spec;
            spec.params = {0.3, x0, 100.0};
            spec.n_runs = runs(1e4);
            spec.base_seed = derive_seed(opts_.seed, "prop6");  // same seeds for both starts
            spec.parallelism = opts_.parallelism;
            spec.engine.population_cap = opts_.population_cap;
            slot = std::make_unique<EnsembleResult>(run_ensemble(spec));
        }
        slot->require_complete();
        return *slot;
    }

    EnsembleResult take_limit_law() {
        if (!limit_law_) return {};
        return std::move(*limit_law_);
    }

    const VerifyOptions& options() const { return opts_; }

private:
    VerifyOptions opts_;
    std::unique_ptr<EnsembleResult> unit_rate_;
    std::unique_ptr<EnsembleResult> limit_law_;
    std::map<double, std::unique_ptr<EnsembleResult>> offset_;
};

// ---- 1: samplers -----------------------------------------------------------

struct SamplerCase {
    std::string kernel;
    ordered_json params;
    std::function<double(RngStream&)> draw;
    std::function<double(double)> cdf;
};

std::vector<SamplerCase> sampler_cases() {
    using namespace kernels;
    std::vector<SamplerCase> cases;
    for (double x0 : {0.5, 1.0, -2.0}) {
        cases.push_back({"first_passage", {{"x0", x0}},
                         [x0](RngStream& r) { return sample_first_passage(x0, r); },
                         [x0](double s) { return first_passage_cdf(x0, s); }});
    }
    for (auto [x0, tmax] : {std::pair{1.0, 1.0}, std::pair{2.0, 0.5}, std::pair{-0.3, 5.0}}) {
        cases.push_back({"first_passage_truncated", {{"x0", x0}, {"t_max", tmax}},
                         [x0, tmax](RngStream& r) { return sample_first_passage_truncated(x0, tmax, r); },
                         [x0, tmax](double s) { return first_passage_truncated_cdf(x0, tmax, s); }});
    }
    for (double l : {0.5, 1.0, 3.0}) {
        cases.push_back({"inverse_local_time", {{"l", l}},
                         [l](RngStream& r) { return sample_inverse_local_time(l, r); },
                         [l](double s) { return first_passage_cdf(l, s); }});
    }
    for (double beta : {0.5, 1.0, 2.0}) {
        cases.push_back({"branch_budget", {{"beta", beta}},
                         [beta](RngStream& r) { return sample_branch_budget(beta, r); },
                         [beta](double l) { return l <= 0.0 ? 0.0 : -std::expm1(-beta * l); }});
    }
    for (auto [delta, budget] : {std::pair{1.0, 0.5}, std::pair{0.25, 2.0}, std::pair{4.0, 1.0}}) {
        cases.push_back({"position_given_alive.x", {{"delta", delta}, {"budget", budget}},
                         [delta, budget](RngStream& r) { return sample_position_given_alive(delta, budget, r).x; },
                         [delta, budget](double x) { return position_given_alive_cdf(delta, budget, x); }});
        cases.push_back({"position_given_alive.l", {{"delta", delta}, {"budget", budget}},
                         [delta, budget](RngStream& r) { return sample_position_given_alive(delta, budget, r).l; },
                         [delta, budget](double l) { return local_time_given_alive_cdf(delta, budget, l); }});
    }
    for (auto [x0, delta] : {std::pair{1.0, 1.0}, std::pair{3.0, 0.01}, std::pair{-0.5, 2.0}}) {
        cases.push_back({"position_no_hit", {{"x0", x0}, {"delta", delta}},
                         [x0, delta](RngStream& r) { return sample_position_no_hit(x0, delta, r); },
                         [x0, delta](double w) { return position_no_hit_cdf(x0, delta, w); }});
    }
    return cases;
}

void sampler_exactness(Suite& suite, CriterionResult& out) {
    const auto start = std::chrono::steady_clock::now();
    const double critical = suite.tol(kKsCritical1pct);
    bool ok = true;
    ordered_json tests = ordered_json::array();
    const auto cases = sampler_cases();
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto& c = cases[i];
        RngStream rng(derive_seed(suite.options().seed, "samplers"), i);
        std::vector<double> xs(kSamplerDraws);
        for (double& x : xs) x = c.draw(rng);
        const estimators::KsResult ks = estimators::ks_distance(estimators::Ecdf(std::move(xs)), c.cdf);
        const double scaled = std::sqrt(static_cast<double>(ks.n_effective)) * ks.statistic;
        const bool pass = scaled <= critical;
        ok = ok && pass;
        tests.push_back({{"kernel", c.kernel},
                         {"params", c.params},
                         {"n", ks.n_effective},
                         {"ks_statistic", ks.statistic},
                         {"sqrt_n_ks", scaled},
                         {"p_value", estimators::ks_pvalue(ks)},
                         {"passed", pass}});
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_budget = seconds < kSamplerBudgetSeconds;
    out.details = {{"critical_sqrt_n_ks", critical},
                   {"runtime_budget_seconds", kSamplerBudgetSeconds},
                   {"runtime_within_budget", in_budget},
                   {"tests", tests}};
    out.status = ok && in_budget ? Status::pass : Status::fail;
}

// ---- 2, 3: moments ---------------------------------------------------------

constexpr double kMomentTimes[] = {4.0, 9.0, 16.0};
constexpr double kMomentOffsets[] = {0.0, 1.0, 2.0};

void first_moment(Suite& suite, CriterionResult& out) {
    const EnsembleResult& runs = suite.unit_rate();
    const double k = suite.tol(3.0);
    bool ok = true;
    ordered_json rows = ordered_json::array();
    for (double t : kMomentTimes) {
        for (std::size_t i = 0; i < std::size(kMomentOffsets); ++i) {
            const double y = kMomentOffsets[i];
            const auto mc = estimators::count_moments(runs, t, y, i);
            const double target = oracles::expected_count({1.0, 0.0, t}, t / 2.0 + y).value;
            const double z = (mc.first.mean - target) / mc.first.std_error;
            const bool pass = std::fabs(mc.first.mean - target) <= k * mc.first.std_error;
            ok = ok && pass;
            rows.push_back({{"t", t}, {"y", y}, {"mc_mean", mc.first.mean}, {"std_error", mc.first.std_error},
                            {"oracle", target}, {"z", z}, {"passed", pass}});
        }
    }
    out.details = {{"beta", 1.0}, {"n_runs", runs.runs.size()}, {"max_std_errors", k}, {"rows", rows}};
    out.status = ok ? Status::pass : Status::fail;
}

void second_moment(Suite& suite, CriterionResult& out) {
    const EnsembleResult& runs = suite.unit_rate();
    const double k = suite.tol(3.0);
    bool ok = true;
    ordered_json rows = ordered_json::array();
    for (double t : kMomentTimes) {
        for (std::size_t i = 0; i < std::size(kMomentOffsets); ++i) {
            const double y = kMomentOffsets[i];
            const auto mc = estimators::count_moments(runs, t, y, i);
            const OracleValue target = oracles::second_moment_count({1.0, 0.0, t}, y);
            const double z = (mc.second.mean - target.value) / mc.second.std_error;
            const bool pass = std::fabs(mc.second.mean - target.value) <= k * mc.second.std_error;
            ok = ok && pass;
            rows.push_back({{"t", t}, {"y", y}, {"mc_second_moment", mc.second.mean},
                            {"std_error", mc.second.std_error}, {"oracle", target.value},
                            {"oracle_abs_error", target.abs_error}, {"z", z}, {"passed", pass}});
        }
    }
    const double limit_tol = suite.tol(1e-4);
    ordered_json limit_rows = ordered_json::array();
    for (double y : kMomentOffsets) {
        const OracleValue m2 = oracles::second_moment_count({1.0, 0.0, 100.0}, y);
        const double limit = std::exp(-y) + kLimitConstant * std::exp(-2.0 * y);
        const bool pass = std::fabs(m2.value - limit) <= limit_tol;
        ok = ok && pass;
        limit_rows.push_back({{"t", 100.0}, {"y", y}, {"quadrature", m2.value}, {"abs_error", m2.abs_error},
                              {"limit", limit}, {"difference", m2.value - limit}, {"passed", pass}});
    }
    out.details = {{"beta", 1.0}, {"n_runs", runs.runs.size()}, {"max_std_errors", k}, {"rows", rows},
                   {"limit_tolerance", limit_tol}, {"limit_rows", limit_rows}};
    out.status = ok ? Status::pass : Status::fail;
}

// ---- 4: C ------------------------------------------------------------------

void constant(Suite& suite, CriterionResult& out) {
    const double tolerance = suite.tol(1e-6);
    bool ok = true;
    ordered_json rows = ordered_json::array();
    for (double beta : {0.5, 1.0, 2.0}) {
        const OracleValue c = oracles::constant_C(beta);
        const bool pass = std::fabs(c.value - kLimitConstant) <= tolerance;
        ok = ok && pass;
        rows.push_back({{"beta", beta}, {"C", c.value}, {"abs_error", c.abs_error},
                        {"difference", c.value - kLimitConstant}, {"passed", pass}});
    }
    out.details = {{"target", kLimitConstant}, {"tolerance", tolerance}, {"rows", rows}};
    out.status = ok ? Status::pass : Status::fail;
}

// ---- 5: martingale ---------------------------------------------------------

void martingale(Suite& suite, CriterionResult& out) {
    const double k = suite.tol(3.0);
    bool ok = true;
    ordered_json rows = ordered_json::array();
    auto check = [&](const EnsembleResult& runs, double beta, double t) {
        const std::vector<double> checkpoints = {t / 10.0, t / 5.0, t / 2.0};
        const auto report = estimators::martingale_convergence_report(runs, {beta, 0.0, t}, checkpoints);
        const bool mean_ok = std::fabs(report.m_t.mean - 1.0) <= k * report.m_t.std_error;
        bool decreasing = true;
        ordered_json increments = ordered_json::array();
        for (std::size_t i = 0; i < report.rows.size(); ++i) {
            if (i > 0 && !(report.rows[i].mean_abs_increment < report.rows[i - 1].mean_abs_increment)) decreasing = false;
            increments.push_back({{"s", report.rows[i].s},
                                  {"mean_m_s", report.rows[i].m_s.mean},
                                  {"var_m_s", report.rows[i].m_s.variance},
                                  {"analytic_var_m_s", *report.rows[i].analytic_second_moment - 1.0},
                                  {"mean_abs_m_s_minus_m_t", report.rows[i].mean_abs_increment}});
        }
        ok = ok && mean_ok && decreasing && report.min_m_t > 0.0;
        rows.push_back({{"beta", beta}, {"t", t}, {"n_runs", runs.runs.size()}, {"mean_m_t", report.m_t.mean},
                        {"std_error", report.m_t.std_error}, {"z", (report.m_t.mean - 1.0) / report.m_t.std_error},
                        {"min_m_t", report.min_m_t}, {"mean_passed", mean_ok},
                        {"increments_strictly_decreasing", decreasing}, {"checkpoints", increments},
                        {"limit_var", report.limit_variance}});
    };
    const EnsembleResult& unit = suite.unit_rate();
    for (double t : {1.0, 5.0, 15.0}) check(unit, 1.0, t);
    check(suite.limit_law(), 0.5, 50.0);
    out.details = {{"max_std_errors", k}, {"rows", rows}};
    out.status = ok ? Status::pass : Status::fail;
}

// ---- 6: sandwich -----------------------------------------------------------

void sandwich(Suite& suite, CriterionResult& out) {
    const EnsembleResult& runs = suite.unit_rate();
    const double k = suite.tol(3.0);
    const double t = 16.0;
    bool ok = true;
    ordered_json rows = ordered_json::array();
    for (std::size_t level = 1; level <= 3; ++level) {
        const double y = static_cast<double>(level);
        const auto mc = estimators::count_moments(runs, t, y, level);
        const auto bounds = oracles::rightmost_bounds({1.0, 0.0, t}, y);
        const double lo = bounds.lower.value - k * mc.survival_std_error;
        const double hi = bounds.upper.value + k * mc.survival_std_error;
        const bool pass = mc.survival >= lo && mc.survival <= hi;
        ok = ok && pass;
        rows.push_back({{"y", y}, {"p_exceed", mc.survival}, {"std_error", mc.survival_std_error},
                        {"lower_bound", bounds.lower.value}, {"upper_bound", bounds.upper.value},
                        {"passed", pass}});
    }
    out.details = {{"beta", 1.0}, {"t", t}, {"n_runs", runs.runs.size()}, {"max_std_errors", k}, {"rows", rows}};
    out.status = ok ? Status::pass : Status::fail;
}

// ---- 7: limit law ----------------------------------------------------------

void limit_law(Suite& suite, CriterionResult& out) {
    const EnsembleResult& runs = suite.limit_law();
    const double threshold = suite.tol(0.05);
    const std::vector<double> grid = parse_grid("-1:4:0.25");
    const auto late = estimators::theorem1_from_runs(runs, 0.5, 50.0, 10.0, grid);
    const auto early = estimators::theorem1_from_runs(runs, 0.5, 12.5, 2.5, grid);
    const bool close = late.ks.statistic <= threshold;
    const bool converging = late.ks.statistic <= early.ks.statistic;
    ordered_json rows = ordered_json::array();
    for (const auto& r : late.rows) rows.push_back({{"y", r.y}, {"ecdf", r.ecdf_value}, {"mixture", r.mixture_value}});
    out.details = {{"beta", 0.5},
                   {"n_runs", runs.runs.size()},
                   {"y_range", {-1.0, 4.0}},
                   {"threshold", threshold},
                   {"threshold_calibrated", true},
                   {"ks_t50_s10", late.ks.statistic},
                   {"ks_t12.5_s2.5", early.ks.statistic},
                   {"within_threshold", close},
                   {"distance_not_increasing", converging},
                   {"rows", rows}};
    out.status = close && converging ? Status::pass : Status::fail;
}

// ---- 8: offset start -------------------------------------------------------

void offset_start(Suite& suite, CriterionResult& out) {
    const double limit = suite.tol(4.0);
    bool ok = true;
    ordered_json rows = ordered_json::array();
    for (double x0 : {0.0, 1.0}) {
        const auto& runs = suite.offset_start(x0);
        const auto r = estimators::prop6_from_runs(runs, 0.3, x0, 100.0, 2.0);
        const bool pass = std::fabs(r.z_score) <= limit;
        ok = ok && pass;
        rows.push_back({{"x0", x0}, {"z", r.z}, {"n_runs", r.n}, {"empirical", r.empirical},
                        {"predicted", r.predicted}, {"z_score", r.z_score}, {"passed", pass}});
    }
    out.details = {{"beta", 0.3}, {"t", 100.0}, {"max_abs_z", limit}, {"rows", rows}};
    out.status = ok ? Status::pass : Status::fail;
}

// ---- 9: determinism --------------------------------------------------------

void determinism(Suite& suite, CriterionResult& out) {
    EnsembleSpec spec;
    spec.params = {1.0, 0.0, 9.0};
    spec.n_runs = suite.runs(2000);
    spec.snapshot_times = {3.0};
    spec.level_offsets = {0.0, 1.0};
    spec.base_seed = derive_seed(suite.options().seed, "determinism");
    spec.engine.population_cap = suite.options().population_cap;
    const std::string reference = runs_csv(run_ensemble_serial(spec));
    ordered_json rows = ordered_json::array();
    bool ok = true;
    for (int threads : {1, 2, 4}) {
        spec.parallelism = threads;
        const EnsembleResult a = run_ensemble(spec);
        const bool same = runs_csv(a) == reference && runs_csv(run_ensemble(spec)) == reference;
        ok = ok && same;
        rows.push_back({{"parallelism", threads}, {"identical_to_serial", same}});
    }
    out.details = {{"n_runs", spec.n_runs}, {"runs_csv_hash", hex64(fnv1a(reference))}, {"rows", rows}};
    out.status = ok ? Status::pass : Status::fail;
}

}  // namespace

std::string_view to_string(Status s) {
    switch (s) {
        case Status::pass: return "pass";
        case Status::fail: return "fail";
        case Status::error: return "error";
    }
    return "?";
}

bool VerifyReport::all_passed() const {
    return std::all_of(criteria.begin(), criteria.end(), [](const auto& c) { return c.status == Status::pass; });
}

VerifyReport run_verify(const VerifyOptions& options, const ProgressSink& progress) {
    struct Entry {
        int id;
        const char* name;
        void (*fn)(Suite&, CriterionResult&);
    };
    static constexpr Entry entries[] = {
        {1, "sampler_exactness", sampler_exactness},
        {2, "first_moment", first_moment},
        {3, "second_moment", second_moment},
        {4, "constant_C", constant},
        {5, "martingale_mean", martingale},
        {6, "rightmost_sandwich", sandwich},
        {7, "limit_law", limit_law},
        {8, "offset_start_estimate", offset_start},
        {9, "determinism", determinism},
    };
    Suite suite(options);
    VerifyReport report;
    report.options = options;
    for (const Entry& e : entries) {
        CriterionResult result;
        result.id = e.id;
        result.name = e.name;
        const auto start = std::chrono::steady_clock::now();
        try {
            e.fn(suite, result);
        } catch (const std::exception& ex) {
            result.status = Status::error;
            result.message = ex.what();
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (progress) progress(result, seconds);
        report.criteria.push_back(std::move(result));
        report.wall_times.push_back(seconds);
    }
    report.limit_law_runs = suite.take_limit_law();
    return report;
}

ordered_json report_to_json(const VerifyReport& report) {
    ordered_json j;
    j["version"] = version_string();
    j["options"] = {{"seed", report.options.seed},
                    {"run_scale", report.options.run_scale},
                    {"tolerance_scale", report.options.tolerance_scale},
                    {"population_cap", report.options.population_cap}};
    ordered_json criteria = ordered_json::array();
    for (const auto& c : report.criteria) {
        ordered_json row = {{"id", c.id}, {"name", c.name}, {"status", to_string(c.status)}};
        if (c.status == Status::error) row["error"] = c.message;
        row["details"] = c.details;
        criteria.push_back(std::move(row));
    }
    j["criteria"] = std::move(criteria);
    j["all_passed"] = report.all_passed();
    return j;
}

ordered_json pass_rates(const std::vector<VerifyReport>& reports) {
    ordered_json out = ordered_json::array();
    if (reports.empty()) return out;
    for (std::size_t i = 0; i < reports.front().criteria.size(); ++i) {
        std::size_t passed = 0, errors = 0;
        for (const auto& r : reports) {
            passed += r.criteria[i].status == Status::pass;
            errors += r.criteria[i].status == Status::error;
        }
        out.push_back({{"id", reports.front().criteria[i].id},
                       {"name", reports.front().criteria[i].name},
                       {"seeds", reports.size()},
                       {"passed", passed},
                       {"errors", errors},
                       {"pass_rate", static_cast<double>(passed) / static_cast<double>(reports.size())}});
    }
    return out;
}

}  // namespace catbbm::harness
