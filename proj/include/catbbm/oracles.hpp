#pragma once

#include <functional>
#include <span>
#include <utility>

#include "catbbm/quadrature.hpp"

/// Closed-form and quadrature values for the moments of the catalytic
/// branching Brownian motion (branching at rate beta in local time at 0).
/// They are the ground truth the simulator is checked against.
namespace catbbm::oracles {

struct ModelParams {
    double beta = 1.0;
    double x0 = 0.0;
    double t = 1.0;
};

/// Throws std::invalid_argument unless beta > 0 and t >= 0.
void validate(const ModelParams& params);

/// An absolute level expressed relative to the front beta t / 2.
struct LevelQuery {
    double t;
    double y;
    double lambda;

    static LevelQuery at_offset(double beta, double t, double y) { return {t, y, beta * t / 2.0 + y, }; }
};

/// First moment of sum_u f(X^u_t) as a function of t, for a fixed f.
using FirstMoment = std::function<double(double)>;

/// E|N_t^lambda| = Phi(beta sqrt(t) - lambda / sqrt(t)) e^{beta^2 t/2 - beta lambda}
/// for lambda > 0 (start at 0). Negative levels use the symmetry of the
/// position law: E|N_t^lambda| = E|N_t| - E|N_t^{-lambda}|.
OracleValue expected_count(const ModelParams& params, double lambda);

/// E|N_t| = 2 Phi(beta sqrt(t)) e^{beta^2 t / 2}.
OracleValue expected_population(const ModelParams& params);

/// d/ds (2 Phi(beta sqrt(s)) e^{beta^2 s / 2})
///   = beta / sqrt(2 pi s) + beta^2 Phi(beta sqrt(s)) e^{beta^2 s / 2}.
OracleValue growth_derivative(double beta, double s);

/// E[(sum f)(sum g)](t) = S_fg(t) + 2 int_0^t S_f(t-s) S_g(t-s) g'(s) ds,
/// with g' = growth_derivative. The 1/sqrt(s) endpoint singularity is
/// removed by s = u^2.
OracleValue second_moment_generic(double beta, double t, const FirstMoment& s_f, const FirstMoment& s_g,
                                  const FirstMoment& s_fg, const QuadratureOptions& opts = {});

/// E[|N_t^{beta t/2 + y}|^2]; requires beta t / 2 + y > 0.
OracleValue second_moment_count(const ModelParams& params, double y, const QuadratureOptions& opts = {});

/// E sum_u e^{-2 beta |X^u_t|}, the S_{fg} term for the martingale weight.
double martingale_weight_square_moment(double beta, double t);

/// E[M_t^2] for M_t = e^{-beta^2 t / 2} sum_u e^{-beta |X^u_t|}, start at 0.
OracleValue martingale_second_moment(double beta, double t, const QuadratureOptions& opts = {});

/// C = 2 int_0^inf e^{-beta^2 s} g'(s) ds (equal to 2 (1 + sqrt 2) for any beta).
OracleValue constant_C(double beta, const QuadratureOptions& opts = {});

struct RightmostBounds {
    OracleValue lower;
    OracleValue upper;
};

/// Paley-Zygmund / Markov sandwich on P(R_t > beta t / 2 + y):
/// lower = e^{-beta y} (1 - C e^{-beta y}) Phi(beta sqrt(t)/2 - y/sqrt(t))^2,
/// upper = e^{-beta y}. A negative lower bound is returned as is.
RightmostBounds rightmost_bounds(const ModelParams& params, double y);

/// 1 - e^{-beta |x0| - beta z}.
double prop6_estimate(double beta, double x0, double z);

/// (1/n) sum_i exp(-m_i e^{-beta y}). Throws on empty or nonpositive samples.
double gumbel_mixture_cdf(double beta, double y, std::span<const double> m_samples);

}  // namespace catbbm::oracles
