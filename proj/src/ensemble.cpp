#include "catbbm/ensemble.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>

namespace catbbm {

double EnsembleSpec::intermediate_time() const {
    return std::isnan(s_intermediate) ? params.t / 5.0 : s_intermediate;
}

std::vector<double> EnsembleSpec::observation_times() const {
    std::vector<double> times = snapshot_times;
    times.push_back(intermediate_time());
    times.push_back(params.t);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    return times;
}

void EnsembleSpec::validate() const {
    oracles::validate(params);
    if (n_runs < 1) throw std::invalid_argument("n_runs must be at least 1");
    const double s = intermediate_time();
    if (!(s >= 0.0) || s > params.t) throw std::invalid_argument("s_intermediate must lie in [0, t]");
    for (double tau : snapshot_times) {
        if (!(tau >= 0.0) || tau > params.t) throw std::invalid_argument("snapshot time outside [0, t]");
    }
}

const SnapshotStats& RunSummary::at(double t) const {
    for (const auto& s : snapshots) {
        if (s.t == t) return s;
    }
    throw std::out_of_range("RunSummary::at: no snapshot at t = " + std::to_string(t));
}

namespace {

std::string describe(const std::vector<RunFailure>& failures) {
    std::string msg = std::to_string(failures.size()) + " run(s) aborted";
    if (!failures.empty()) msg += "; first: run " + std::to_string(failures.front().run_id) + ": " + failures.front().message;
    return msg;
}

RunSummary summarize(const EnsembleSpec& spec, const std::vector<double>& times, std::uint64_t run_id) {
    const auto start = std::chrono::steady_clock::now();
    RngStream rng(spec.base_seed, run_id);
    const RunRecord record = simulate_run_recorded(spec.params, times, rng, spec.engine);

    const double beta = spec.params.beta;
    const double s = spec.intermediate_time();
    RunSummary out;
    out.run_id = run_id;
    out.lifetimes = record.lifetimes;
    out.snapshots.reserve(record.snapshots.size());
    for (const Snapshot& snap : record.snapshots) {
        SnapshotStats stats{snap.t, snap.size(), snap.rightmost, snap.martingale, {}};
        stats.counts_above.reserve(spec.level_offsets.size());
        for (double y : spec.level_offsets) stats.counts_above.push_back(snap.count_above(beta * snap.t / 2.0 + y));
        if (snap.t == s) out.m_s = snap.martingale;
        if (snap.t == spec.params.t) {
            out.m_t = snap.martingale;
            out.n_particles = snap.size();
            out.r_centered = snap.rightmost - beta * snap.t / 2.0;
        }
        out.snapshots.push_back(std::move(stats));
    }
    out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

EnsembleResult assemble(std::vector<double> times, std::vector<std::optional<RunSummary>>& slots,
                        std::vector<std::optional<std::string>>& errors) {
    EnsembleResult result;
    result.observation_times = std::move(times);
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (errors[i]) {
            result.failures.push_back({static_cast<std::uint64_t>(i), *errors[i]});
        } else {
            result.runs.push_back(std::move(*slots[i]));
        }
    }
    return result;
}

}  // namespace

EnsembleError::EnsembleError(std::vector<RunFailure> failures)
    : std::runtime_error(describe(failures)), failures_(std::move(failures)) {}

void EnsembleResult::require_complete() const {
    if (!failures.empty()) throw EnsembleError(failures);
}

RunSummary summarize_run(const EnsembleSpec& spec, std::uint64_t run_id) {
    spec.validate();
    return summarize(spec, spec.observation_times(), run_id);
}

EnsembleResult run_ensemble_serial(const EnsembleSpec& spec) {
    spec.validate();
    const std::vector<double> times = spec.observation_times();
    std::vector<std::optional<RunSummary>> slots(spec.n_runs);
    std::vector<std::optional<std::string>> errors(spec.n_runs);
    for (std::uint64_t i = 0; i < spec.n_runs; ++i) {
        try {
            slots[i] = summarize(spec, times, i);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }
    return assemble(times, slots, errors);
}

EnsembleResult run_ensemble(const EnsembleSpec& spec) {
    spec.validate();
    const std::vector<double> times = spec.observation_times();
    const auto n = static_cast<std::int64_t>(spec.n_runs);
    std::vector<std::optional<RunSummary>> slots(spec.n_runs);
    std::vector<std::optional<std::string>> errors(spec.n_runs);
    const int threads = spec.parallelism > 0 ? spec.parallelism : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            slots[i] = summarize(spec, times, static_cast<std::uint64_t>(i));
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }
    return assemble(times, slots, errors);
}

}  // namespace catbbm
