#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

#include "catbbm/ensemble.hpp"

namespace catbbm::harness {

/// Acceptance suite behind `catbbm verify` and the acceptance test binary.
/// Ensemble sizes and tolerances are the pinned acceptance values; the two
/// scale factors exist for smoke runs and falsifiability checks.
struct VerifyOptions {
    std::uint64_t seed = 1;
    int parallelism = 1;
    double run_scale = 1.0;
    double tolerance_scale = 1.0;
    std::uint64_t population_cap = 10'000'000;
};

enum class Status { pass, fail, error };

struct CriterionResult {
    int id = 0;
    std::string name;
    Status status = Status::error;
    std::string message;  ///< infrastructure error text, empty otherwise
    nlohmann::ordered_json details;
};

struct VerifyReport {
    VerifyOptions options;
    std::vector<CriterionResult> criteria;
    /// Runs of the limit-law ensemble (beta 0.5, t 50); written as runs.csv.
    EnsembleResult limit_law_runs;
    /// Wall time per criterion in seconds (kept out of report.json).
    std::vector<double> wall_times;

    bool all_passed() const;
};

using ProgressSink = std::function<void(const CriterionResult&, double seconds)>;

VerifyReport run_verify(const VerifyOptions& options, const ProgressSink& progress = {});

std::string_view to_string(Status s);
nlohmann::ordered_json report_to_json(const VerifyReport& report);
/// Pass rate per criterion across repeated reports (seed sweep).
nlohmann::ordered_json pass_rates(const std::vector<VerifyReport>& reports);

}  // namespace catbbm::harness
