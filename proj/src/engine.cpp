#include "catbbm/engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "catbbm/sampling.hpp"

namespace catbbm {

std::size_t Snapshot::count_above(double lambda) const {
    return static_cast<std::size_t>(
        std::count_if(positions.begin(), positions.end(), [lambda](double x) { return x >= lambda; }));
}

PopulationCapExceeded::PopulationCapExceeded(std::uint64_t cap)
    : std::runtime_error("population cap of " + std::to_string(cap) + " lifetimes exceeded"), cap_(cap) {}

namespace {

// State of a particle alive at the start of a segment.
struct Live {
    std::uint64_t id;
    bool at_origin;      // true: sat at 0 at time `since` with budget_left unused
    double since;        // time of the last visit to 0 (at_origin) or segment start
    double x;            // position at `since` when !at_origin
    double budget_left;  // local time left before the split
};

struct Pending {
    double time;
    Live who;
};

class Run {
public:
    Run(const ModelParams& params, RngStream& rng, const EngineOptions& options)
        : beta_(params.beta), rng_(rng), options_(options) {
        const double budget = kernels::sample_branch_budget(beta_, rng_);
        record({0, std::nullopt, 0.0, params.x0, budget, std::nullopt});
        next_id_ = 1;
        live_.push_back({0, params.x0 == 0.0, 0.0, params.x0, budget});
    }

    Snapshot advance_to(double boundary) {
        // Splits before the boundary are processed depth first. Lifetimes are
        // conditionally independent given their start, so the processing
        // order only fixes which draws go to whom; it is deterministic.
        std::vector<Pending>& events = pending_;
        events.clear();
        std::vector<Live> survivors;
        survivors.reserve(live_.size() * 2);

        auto schedule = [&](Live p) {
            if (p.at_origin) {
                const double split = p.since + kernels::sample_inverse_local_time(p.budget_left, rng_);
                if (split <= boundary) {
                    events.push_back({split, p});
                    return;
                }
            }
            survivors.push_back(p);
        };

        for (Live p : live_) {
            if (!p.at_origin && boundary > p.since) {
                const double window = boundary - p.since;
                const double hit = kernels::first_passage_cdf(p.x, window);
                if (rng_.uniform_open() < hit) {
                    p.since += kernels::sample_first_passage_truncated(p.x, window, rng_);
                    p.at_origin = true;
                    p.x = 0.0;
                }
            }
            schedule(p);
        }

        while (!events.empty()) {
            const Pending e = events.back();
            events.pop_back();
            if (options_.record_genealogy) genealogy_[e.who.id].branched_at = e.time;
            for (int child = 0; child < 2; ++child) {
                if (next_id_ >= options_.population_cap) throw PopulationCapExceeded(options_.population_cap);
                const std::uint64_t id = next_id_++;
                const double budget = kernels::sample_branch_budget(beta_, rng_);
                record({id, e.who.id, e.time, 0.0, budget, std::nullopt});
                schedule({id, true, e.time, 0.0, budget});
            }
        }

        Snapshot snap;
        snap.t = boundary;
        snap.positions.reserve(survivors.size());
        for (Live& p : survivors) {
            const double elapsed = boundary - p.since;
            if (elapsed > 0.0) {
                if (p.at_origin) {
                    const auto state = kernels::sample_position_given_alive(elapsed, p.budget_left, rng_);
                    p.budget_left -= state.l;
                    p.x = state.x;
                } else {
                    p.x = kernels::sample_position_no_hit(p.x, elapsed, rng_);
                }
                p.at_origin = (p.x == 0.0);
                p.since = boundary;
            }
            snap.positions.push_back(p.x);
        }
        live_ = std::move(survivors);

        double weight = 0.0;
        for (double x : snap.positions) weight += std::exp(-beta_ * std::fabs(x));
        snap.martingale = std::exp(-0.5 * beta_ * beta_ * boundary) * weight;
        snap.rightmost = *std::max_element(snap.positions.begin(), snap.positions.end());
        return snap;
    }

    std::uint64_t lifetimes() const { return next_id_; }
    std::vector<Particle> take_genealogy() { return std::move(genealogy_); }

private:
    void record(Particle p) {
        if (options_.record_genealogy) genealogy_.push_back(std::move(p));
    }

    double beta_;
    RngStream& rng_;
    const EngineOptions& options_;
    std::vector<Live> live_;
    std::vector<Pending> pending_;
    std::vector<Particle> genealogy_;
    std::uint64_t next_id_ = 0;
};

}  // namespace

RunRecord simulate_run_recorded(const ModelParams& params, std::span<const double> snapshot_times,
                                RngStream& rng, const EngineOptions& options) {
    oracles::validate(params);
    for (std::size_t i = 0; i < snapshot_times.size(); ++i) {
        const double s = snapshot_times[i];
        if (!(s >= 0.0) || s > params.t) throw std::invalid_argument("simulate_run: snapshot time outside [0, t]");
        if (i > 0 && s < snapshot_times[i - 1]) throw std::invalid_argument("simulate_run: snapshot times not sorted");
    }
    RunRecord out;
    Run run(params, rng, options);
    out.snapshots.reserve(snapshot_times.size());
    for (double s : snapshot_times) out.snapshots.push_back(run.advance_to(s));
    out.lifetimes = run.lifetimes();
    out.genealogy = run.take_genealogy();
    return out;
}

std::vector<Snapshot> simulate_run(const ModelParams& params, std::span<const double> snapshot_times,
                                   RngStream& rng, const EngineOptions& options) {
    return simulate_run_recorded(params, snapshot_times, rng, options).snapshots;
}

}  // namespace catbbm
