#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "catbbm/ensemble.hpp"

namespace catbbm::estimators {

/// Plug-in mean, unbiased variance and standard error of the mean.
struct SampleMoments {
    std::uint64_t n = 0;
    double mean = 0.0;
    double variance = 0.0;
    double std_error = 0.0;

    static SampleMoments of(std::span<const double> xs);
};

class Ecdf {
public:
    /// Throws std::invalid_argument on empty input.
    explicit Ecdf(std::vector<double> samples);

    /// F(y) = #{x_i <= y} / n.
    double operator()(double y) const;
    /// F(y-) = #{x_i < y} / n.
    double left_limit(double y) const;

    std::span<const double> sorted_samples() const { return sorted_; }
    std::size_t n() const { return sorted_.size(); }

private:
    std::vector<double> sorted_;
};

struct KsResult {
    double statistic = 0.0;
    std::uint64_t n_effective = 0;
};

struct Range {
    double lo;
    double hi;
};

/// sup |F_n - F| over the sample points (both sides of each jump); with a
/// range, only points inside it plus the two endpoints are used.
KsResult ks_distance(const Ecdf& ecdf, const std::function<double(double)>& cdf,
                     std::optional<Range> range = std::nullopt);

/// Two-sample sup distance between step functions; n_effective = n m / (n + m).
KsResult ks_distance(const Ecdf& a, const Ecdf& b);

/// Asymptotic Kolmogorov survival function Q(sqrt(n_eff) D).
double ks_pvalue(const KsResult& ks);

/// Mixture CDF (1/n) sum_i exp(-m_i e^{-beta y}) at every y; OpenMP over y.
std::vector<double> mixture_cdf_grid(double beta, std::span<const double> ys, std::span<const double> m_samples);
/// Single-threaded reference for mixture_cdf_grid.
std::vector<double> mixture_cdf_grid_serial(double beta, std::span<const double> ys,
                                            std::span<const double> m_samples);

// ---- limit-law checks ------------------------------------------------------

struct Theorem1Row {
    double y;
    double ecdf_value;
    double mixture_value;
};

struct Theorem1Report {
    double t = 0.0;
    double s = 0.0;
    std::vector<Theorem1Row> rows;
    KsResult ks;  ///< over [min y, max y] of the grid
};

/// ECDF of R_t - beta t/2 against E exp(-M_s e^{-beta y}) using the same
/// runs. `t` and `s` must both be observation times of the ensemble.
Theorem1Report theorem1_from_runs(const EnsembleResult& runs, double beta, double t, double s,
                                  std::span<const double> y_grid);

/// Runs spec (throwing on aborted runs) and compares at (spec.params.t, spec.intermediate_time()).
Theorem1Report theorem1_test(const EnsembleSpec& spec, std::span<const double> y_grid);

struct Prop6Result {
    double z = 0.0;
    double empirical = 0.0;
    double predicted = 0.0;
    double z_score = 0.0;
    std::uint64_t n = 0;
};

/// Empirical P(R_t <= beta t / 2 + z) against 1 - e^{-beta |x0| - beta z};
/// z_score uses the binomial standard error under the prediction.
Prop6Result prop6_from_runs(const EnsembleResult& runs, double beta, double x0, double t, double z);
Prop6Result prop6_test(const EnsembleSpec& spec, double z);

struct MartingaleRow {
    double s = 0.0;
    SampleMoments m_s;
    double mean_abs_increment = 0.0;  ///< mean |M_s - M_t|
    std::optional<double> analytic_second_moment;  ///< E M_s^2, origin start only
};

struct MartingaleReport {
    double t = 0.0;
    SampleMoments m_t;
    double min_m_t = 0.0;
    std::vector<MartingaleRow> rows;
    double limit_variance = 0.0;  ///< Var M_inf = C - 1 (origin start)
};

MartingaleReport martingale_convergence_report(const EnsembleResult& runs, const ModelParams& params,
                                               std::span<const double> checkpoints);

struct CountMoments {
    double t = 0.0;
    double y = 0.0;
    SampleMoments first;   ///< |N_t^lambda|
    SampleMoments second;  ///< |N_t^lambda|^2
    double survival = 0.0; ///< fraction of runs with R_t > lambda
    double survival_std_error = 0.0;
};

/// Moments of the level count at offset index `level` of spec.level_offsets.
CountMoments count_moments(const EnsembleResult& runs, double t, double y, std::size_t level);

}  // namespace catbbm::estimators
