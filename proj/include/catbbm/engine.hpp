#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "catbbm/oracles.hpp"
#include "catbbm/rng.hpp"

namespace catbbm {

using oracles::ModelParams;

/// One lifetime in the genealogy.
struct Particle {
    std::uint64_t id = 0;
    std::optional<std::uint64_t> parent_id;
    double birth_time = 0.0;
    double birth_position = 0.0;  ///< 0 for every non-root particle
    double budget = 0.0;          ///< local time at 0 the particle may accumulate before it splits
    std::optional<double> branched_at;  ///< empty: alive at the horizon

    bool alive_at_horizon() const { return !branched_at.has_value(); }
};

/// Population at one observation time.
struct Snapshot {
    double t = 0.0;
    std::vector<double> positions;  ///< one per particle alive at t (processing order)
    double rightmost = 0.0;
    double martingale = 0.0;  ///< e^{-beta^2 t / 2} sum_u e^{-beta |x_u|}

    std::size_t size() const { return positions.size(); }
    /// |{u : x_u >= lambda}|.
    std::size_t count_above(double lambda) const;
};

struct EngineOptions {
    std::uint64_t population_cap = 10'000'000;  ///< lifetimes per run
    bool record_genealogy = false;
};

class PopulationCapExceeded : public std::runtime_error {
public:
    explicit PopulationCapExceeded(std::uint64_t cap);
    std::uint64_t cap() const { return cap_; }

private:
    std::uint64_t cap_;
};

struct RunRecord {
    std::vector<Snapshot> snapshots;
    std::vector<Particle> genealogy;  ///< indexed by id; empty unless recorded
    std::uint64_t lifetimes = 0;
};

/// Simulates one run of the catalytic branching system and returns the
/// population at each of snapshot_times (sorted, each in [0, params.t]).
///
/// Between consecutive observation times the system is advanced event by
/// event: a particle at the origin with remaining local-time budget r
/// splits after sigma(r); a particle away from the origin first decides
/// whether it reaches 0 before the next observation time. At an
/// observation time every survivor gets its exact (position, local time)
/// given only that it has not split, its budget is reduced by the local
/// time used, and it restarts from that position. By the Markov property
/// the snapshots are jointly exact, not just marginally.
///
/// Throws PopulationCapExceeded if the run creates more than
/// options.population_cap lifetimes.
RunRecord simulate_run_recorded(const ModelParams& params, std::span<const double> snapshot_times,
                                RngStream& rng, const EngineOptions& options = {});

std::vector<Snapshot> simulate_run(const ModelParams& params, std::span<const double> snapshot_times,
                                   RngStream& rng, const EngineOptions& options = {});

}  // namespace catbbm
