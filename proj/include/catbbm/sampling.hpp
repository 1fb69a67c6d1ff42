#pragma once

#include "catbbm/rng.hpp"

/// Exact samplers for the laws the engine needs: Brownian first passage to
/// the origin, inverse local time at the origin, the Exp(beta) local-time
/// budget, and the position (and local time) of a particle that has not
/// branched yet. No time discretisation anywhere.
///
/// Each sampler has its closed-form CDF next to it; the CDFs do not call the
/// samplers and are what the goodness-of-fit tests compare against.
namespace catbbm::kernels {

struct JointPositionLocalTime {
    double x;  ///< position
    double l;  ///< local time at 0, >= 0
};

/// First hitting time of 0 for Brownian motion started at x0:
/// tau = x0^2 / Z^2. Returns 0 when x0 == 0.
double sample_first_passage(double x0, RngStream& rng);

/// First passage conditioned on tau <= t_max, by inverting
/// F(s) = 2 (1 - Phi(|x0| / sqrt(s))). Throws std::invalid_argument unless
/// x0 != 0 and t_max > 0.
double sample_first_passage_truncated(double x0, double t_max, RngStream& rng);

/// Inverse local time sigma(l) = inf{s : L_s > l} = l^2 / Z^2.
double sample_inverse_local_time(double l, RngStream& rng);

/// Local-time level at which a particle branches; Exp(beta).
double sample_branch_budget(double beta, RngStream& rng);

/// (X_delta, L_delta) of Brownian motion from 0 conditioned on
/// L_delta < budget. Two-stage inverse sampling: L from |N(0, delta)|
/// truncated to [0, budget), then |X| + L from a Rayleigh(sqrt(delta))
/// truncated to [L, inf), then a fair sign. budget may be +inf.
JointPositionLocalTime sample_position_given_alive(double delta, double budget, RngStream& rng);

/// X_delta of Brownian motion from x0 != 0 conditioned on not reaching 0 by
/// time delta. Rejection from N(x0, delta) with acceptance
/// 1 - exp(-2 |x0| |w| / delta) on the correct side; the expected number of
/// proposals is 1 / P(tau > delta).
double sample_position_no_hit(double x0, double delta, RngStream& rng);

// ---- closed forms ----------------------------------------------------------

/// P(tau <= s) for first passage from x0 (also P(sigma(l) <= s) with l = |x0|).
double first_passage_cdf(double x0, double s);

/// f_tau(s) = |x0| / sqrt(2 pi s^3) exp(-x0^2 / 2s).
double first_passage_pdf(double x0, double s);

/// P(tau <= s | tau <= t_max).
double first_passage_truncated_cdf(double x0, double t_max, double s);

/// P(L_delta < budget) = 2 Phi(budget / sqrt(delta)) - 1.
double survival_probability(double delta, double budget);

/// CDF of X_delta given L_delta < budget (x-marginal of the joint law).
double position_given_alive_cdf(double delta, double budget, double x);

/// CDF of L_delta given L_delta < budget.
double local_time_given_alive_cdf(double delta, double budget, double l);

/// Joint density of (X_t, L_t) for Brownian motion from 0.
double joint_position_local_time_pdf(double t, double x, double l);

/// P(tau_0 > delta) for Brownian motion from x0.
double no_hit_probability(double x0, double delta);

/// CDF of X_delta given no hit, started from x0.
double position_no_hit_cdf(double x0, double delta, double w);

}  // namespace catbbm::kernels
