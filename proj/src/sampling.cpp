#include "catbbm/sampling.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "catbbm/special_functions.hpp"

namespace catbbm::kernels {

namespace {

// |Z| for Z standard normal, from one uniform: |Z| = -Phi^{-1}(u / 2).
inline double abs_normal(RngStream& rng) { return -normal_quantile(0.5 * rng.uniform_open()); }

}  // namespace

double sample_first_passage(double x0, RngStream& rng) {
    if (x0 == 0.0) return 0.0;
    const double z = abs_normal(rng);
    return (x0 * x0) / (z * z);
}

double sample_first_passage_truncated(double x0, double t_max, RngStream& rng) {
    if (x0 == 0.0) throw std::invalid_argument("sample_first_passage_truncated: x0 must be nonzero");
    if (!(t_max > 0.0)) throw std::invalid_argument("sample_first_passage_truncated: t_max must be positive");
    const double a = std::fabs(x0);
    // F(t_max) = erfc(a / sqrt(2 t_max)); the target is tau = a^2 / q^2 with
    // q = Phi^{-1}(1 - u/2) = -Phi^{-1}(u/2), u ~ U(0, F(t_max)).
    const double f_max = std::erfc(a / std::sqrt(2.0 * t_max));
    const double u = f_max * rng.uniform_open();
    const double q = -normal_quantile(0.5 * u);
    const double tau = (a * a) / (q * q);
    return std::fmin(tau, t_max);
}

double sample_inverse_local_time(double l, RngStream& rng) {
    if (!(l >= 0.0)) throw std::invalid_argument("sample_inverse_local_time: level must be >= 0");
    if (l == 0.0) return 0.0;
    const double z = abs_normal(rng);
    return (l * l) / (z * z);
}

double sample_branch_budget(double beta, RngStream& rng) {
    if (!(beta > 0.0)) throw std::invalid_argument("sample_branch_budget: beta must be positive");
    return -std::log(rng.uniform_open()) / beta;
}

JointPositionLocalTime sample_position_given_alive(double delta, double budget, RngStream& rng) {
    if (!(delta > 0.0)) throw std::invalid_argument("sample_position_given_alive: delta must be positive");
    if (!(budget > 0.0)) throw std::invalid_argument("sample_position_given_alive: budget must be positive");
    const double sd = std::sqrt(delta);

    // Stage 1: L ~ |N(0, delta)| on [0, budget). With G = P(|Z| sd < budget),
    // l = -sd * Phi^{-1}((1 - u G) / 2) keeps full precision near u -> 1.
    const double g = std::erf(budget / (kSqrt2 * sd));
    const auto [u, sign] = rng.uniform_open_and_sign();
    double l = -sd * normal_quantile(0.5 * (1.0 - u * g));
    if (l < 0.0) l = 0.0;
    if (l >= budget) l = std::nextafter(budget, 0.0);

    // Stage 2: U = |X| + l with P(U > r | l) = exp(-(r^2 - l^2) / (2 delta)).
    // |X| = U - l is formed as (U^2 - l^2) / (U + l) to avoid cancellation.
    const double e = -2.0 * delta * std::log(rng.uniform_open());
    const double big_u = std::sqrt(l * l + e);
    const double ax = (big_u + l) > 0.0 ? e / (big_u + l) : 0.0;
    return {sign * ax, l};
}

double sample_position_no_hit(double x0, double delta, RngStream& rng) {
    if (x0 == 0.0) throw std::invalid_argument("sample_position_no_hit: x0 must be nonzero");
    if (!(delta > 0.0)) throw std::invalid_argument("sample_position_no_hit: delta must be positive");
    const double sd = std::sqrt(delta);
    const double a = std::fabs(x0);
    const double s = x0 > 0.0 ? 1.0 : -1.0;
    for (;;) {
        // Propose |x0| + sd Z in the reflected frame, so the correct side is w > 0.
        const double w = a + sd * normal_quantile(rng.uniform_open());
        if (w <= 0.0) continue;
        const double accept = -std::expm1(-2.0 * a * w / delta);
        if (rng.uniform_open() < accept) return s * w;
    }
}

// ---- closed forms ----------------------------------------------------------

double first_passage_cdf(double x0, double s) {
    if (x0 == 0.0) return s >= 0.0 ? 1.0 : 0.0;
    if (s <= 0.0) return 0.0;
    return std::erfc(std::fabs(x0) / std::sqrt(2.0 * s));
}

double first_passage_pdf(double x0, double s) {
    if (s <= 0.0) return 0.0;
    const double a = std::fabs(x0);
    return a / std::sqrt(2.0 * M_PI * s * s * s) * std::exp(-a * a / (2.0 * s));
}

double first_passage_truncated_cdf(double x0, double t_max, double s) {
    if (s >= t_max) return 1.0;
    return first_passage_cdf(x0, s) / first_passage_cdf(x0, t_max);
}

double survival_probability(double delta, double budget) {
    if (std::isinf(budget)) return 1.0;
    return std::erf(budget / std::sqrt(2.0 * delta));
}

double position_given_alive_cdf(double delta, double budget, double x) {
    // Marginal density of X on {L < b}: phi_delta(x) - phi_delta(|x| + b).
    const double sd = std::sqrt(delta);
    const double p_alive = survival_probability(delta, budget);
    auto lower_mass = [&](double v) {  // mass on (-inf, v], v <= 0
        const double tail = std::isinf(budget) ? 0.0 : normal_sf((budget - v) / sd);
        return normal_cdf(v / sd) - tail;
    };
    if (x <= 0.0) return lower_mass(x) / p_alive;
    return 1.0 - lower_mass(-x) / p_alive;
}

double local_time_given_alive_cdf(double delta, double budget, double l) {
    if (l <= 0.0) return 0.0;
    if (l >= budget) return 1.0;
    return std::erf(l / std::sqrt(2.0 * delta)) / survival_probability(delta, budget);
}

double joint_position_local_time_pdf(double t, double x, double l) {
    if (l < 0.0 || t <= 0.0) return 0.0;
    const double r = std::fabs(x) + l;
    return r / std::sqrt(2.0 * M_PI * t * t * t) * std::exp(-r * r / (2.0 * t));
}

double no_hit_probability(double x0, double delta) {
    return std::erf(std::fabs(x0) / std::sqrt(2.0 * delta));
}

double position_no_hit_cdf(double x0, double delta, double w) {
    const double sd = std::sqrt(delta);
    const double a = std::fabs(x0);
    // In the reflected frame (x0 > 0): mass of (phi(v - a) - phi(v + a)) on (0, v].
    auto mass = [&](double v) {
        if (v <= 0.0) return 0.0;
        return (normal_cdf((v - a) / sd) - normal_cdf(-a / sd)) -
               (normal_cdf((v + a) / sd) - normal_cdf(a / sd));
    };
    const double p = no_hit_probability(x0, delta);
    if (x0 > 0.0) return mass(w) / p;
    return 1.0 - mass(-w) / p;
}

}  // namespace catbbm::kernels
