#pragma once

#include <string>
#include <vector>

#include "catbbm/ensemble.hpp"
#include "catbbm/harness/config.hpp"

namespace catbbm::harness {

inline constexpr const char* kRunsCsvHeader = "run_id,n_particles,r_centered,m_s,m_t";
inline constexpr const char* kOracleCsvHeader = "beta,t,y,m1,m2,m2_abs_err,lower,upper,C,status";
inline constexpr const char* kGenealogyCsvHeader =
    "run_id,particle_id,parent_id,birth_time,birth_position,budget,branched_at";

std::string version_string();

std::string runs_csv(const EnsembleResult& result);
std::string runs_json(const EnsembleResult& result);

/// meta.json: config, its hash, seed, version, population cap, aborted runs
/// and wall time. The only output that is not byte-reproducible (wall time).
std::string meta_json(const Config& config, const EnsembleResult* result, double wall_time_seconds);

/// One oracle.csv row per (t, y), t from snapshot_times (or the horizon).
std::string oracle_table(const Config& config);

/// Each command validates the config before doing any work, writes its
/// files under config.output_path and returns a process exit status.
int cmd_simulate(const Config& config);
int cmd_oracle(const Config& config);
int cmd_theorem1(const Config& config);
int cmd_prop6(const Config& config);
int cmd_verify(const Config& config);

int dispatch(const Config& config);

}  // namespace catbbm::harness
