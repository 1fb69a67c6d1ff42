#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "catbbm/engine.hpp"

namespace catbbm {

struct EnsembleSpec {
    ModelParams params;
    std::uint64_t n_runs = 1;
    /// Extra observation times in [0, t]; t and s_intermediate are always added.
    std::vector<double> snapshot_times;
    /// Time at which m_s is read; NaN means t / 5.
    double s_intermediate = std::numeric_limits<double>::quiet_NaN();
    /// Offsets y; each snapshot at time tau records |N_tau^{beta tau / 2 + y}|.
    std::vector<double> level_offsets;
    std::uint64_t base_seed = 0;
    /// OpenMP threads for run_ensemble; <= 0 means the OpenMP default.
    int parallelism = 1;
    EngineOptions engine;

    double intermediate_time() const;
    /// Sorted, de-duplicated union of snapshot_times, s_intermediate and t.
    std::vector<double> observation_times() const;
    void validate() const;
};

struct SnapshotStats {
    double t = 0.0;
    std::uint64_t n_particles = 0;
    double rightmost = 0.0;
    double martingale = 0.0;
    std::vector<std::uint64_t> counts_above;  ///< parallel to EnsembleSpec::level_offsets

    friend bool operator==(const SnapshotStats&, const SnapshotStats&) = default;
};

struct RunSummary {
    std::uint64_t run_id = 0;
    std::uint64_t n_particles = 0;  ///< |N_t|
    double r_centered = 0.0;        ///< R_t - beta t / 2
    double m_s = 0.0;
    double m_t = 0.0;
    std::uint64_t lifetimes = 0;
    std::vector<SnapshotStats> snapshots;  ///< one per observation_times() entry
    double wall_time = 0.0;                ///< seconds; excluded from equality

    const SnapshotStats& at(double t) const;

    friend bool operator==(const RunSummary& a, const RunSummary& b) {
        return a.run_id == b.run_id && a.n_particles == b.n_particles && a.r_centered == b.r_centered &&
               a.m_s == b.m_s && a.m_t == b.m_t && a.lifetimes == b.lifetimes && a.snapshots == b.snapshots;
    }
};

struct RunFailure {
    std::uint64_t run_id = 0;
    std::string message;

    friend bool operator==(const RunFailure&, const RunFailure&) = default;
};

class EnsembleError : public std::runtime_error {
public:
    explicit EnsembleError(std::vector<RunFailure> failures);
    const std::vector<RunFailure>& failures() const { return failures_; }

private:
    std::vector<RunFailure> failures_;
};

struct EnsembleResult {
    std::vector<double> observation_times;
    std::vector<RunSummary> runs;      ///< successful runs in run_id order
    std::vector<RunFailure> failures;  ///< aborted runs in run_id order

    bool complete() const { return failures.empty(); }
    /// Throws EnsembleError listing every aborted run.
    void require_complete() const;
};

/// Statistics for one run on substream run_id of base_seed.
RunSummary summarize_run(const EnsembleSpec& spec, std::uint64_t run_id);

/// Runs in parallel with OpenMP. Output is bit-identical to
/// run_ensemble_serial for any thread count.
EnsembleResult run_ensemble(const EnsembleSpec& spec);

/// Reference implementation: runs one after another on the calling thread.
EnsembleResult run_ensemble_serial(const EnsembleSpec& spec);

}  // namespace catbbm
