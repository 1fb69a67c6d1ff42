#include "catbbm/oracles.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "catbbm/special_functions.hpp"

namespace catbbm::oracles {

namespace {

// E|N_tau^lambda| for lambda > 0 and any tau >= 0 (0 at tau = 0).
double count_moment_positive_level(double beta, double tau, double lambda) {
    if (tau <= 0.0) return 0.0;
    const double rt = std::sqrt(tau);
    const double w = lambda / rt - beta * rt;
    if (w > 0.0) {
        // Phi(-w) e^{beta^2 tau/2 - beta lambda} = e^{-lambda^2 / 2 tau} e^{w^2/2} Phi(-w)
        return std::exp(-lambda * lambda / (2.0 * tau)) * scaled_normal_sf(w);
    }
    return normal_cdf(-w) * std::exp(0.5 * beta * beta * tau - beta * lambda);
}

double population_moment(double beta, double tau) {
    return 2.0 * normal_cdf(beta * std::sqrt(tau)) * std::exp(0.5 * beta * beta * tau);
}

void require_origin_start(const ModelParams& params, const char* what) {
    if (params.x0 != 0.0) {
        throw std::invalid_argument(std::string(what) + ": closed form assumes a start at the origin");
    }
}

}  // namespace

void validate(const ModelParams& params) {
    if (!(params.beta > 0.0) || !std::isfinite(params.beta))
        throw std::invalid_argument("beta must be positive and finite");
    if (!(params.t >= 0.0) || !std::isfinite(params.t))
        throw std::invalid_argument("t must be nonnegative and finite");
    if (!std::isfinite(params.x0)) throw std::invalid_argument("x0 must be finite");
}

OracleValue expected_count(const ModelParams& params, double lambda) {
    validate(params);
    require_origin_start(params, "expected_count");
    if (!(params.t > 0.0)) throw std::invalid_argument("expected_count: t must be positive");
    const double beta = params.beta, t = params.t;
    if (lambda > 0.0) return {count_moment_positive_level(beta, t, lambda), 0.0};
    if (lambda == 0.0) return {0.5 * population_moment(beta, t), 0.0};
    return {population_moment(beta, t) - count_moment_positive_level(beta, t, -lambda), 0.0};
}

OracleValue expected_population(const ModelParams& params) {
    validate(params);
    require_origin_start(params, "expected_population");
    return {population_moment(params.beta, params.t), 0.0};
}

OracleValue growth_derivative(double beta, double s) {
    if (!(beta > 0.0)) throw std::invalid_argument("growth_derivative: beta must be positive");
    if (!(s > 0.0)) throw std::invalid_argument("growth_derivative: s must be positive");
    const double v = beta / std::sqrt(2.0 * M_PI * s) +
                     beta * beta * normal_cdf(beta * std::sqrt(s)) * std::exp(0.5 * beta * beta * s);
    return {v, 0.0};
}

OracleValue second_moment_generic(double beta, double t, const FirstMoment& s_f, const FirstMoment& s_g,
                                  const FirstMoment& s_fg, const QuadratureOptions& opts) {
    if (!(beta > 0.0)) throw std::invalid_argument("second_moment_generic: beta must be positive");
    if (!(t >= 0.0)) throw std::invalid_argument("second_moment_generic: t must be nonnegative");
    const double diagonal = s_fg(t);
    if (t == 0.0) return {diagonal, 0.0};
    // s = u^2: g'(u^2) * 2u = 2 beta / sqrt(2 pi) + 2 u beta^2 Phi(beta u) e^{beta^2 u^2 / 2}.
    const double b2 = beta * beta;
    const double head = 2.0 * beta * kInvSqrt2Pi;
    auto integrand = [&](double u) {
        const double tau = std::fmax(t - u * u, 0.0);
        const double weight = head + 2.0 * u * b2 * normal_cdf(beta * u) * std::exp(0.5 * b2 * u * u);
        return s_f(tau) * s_g(tau) * weight;
    };
    const OracleValue branch = integrate(integrand, 0.0, std::sqrt(t), opts);
    return {diagonal + 2.0 * branch.value, 2.0 * branch.abs_error};
}

OracleValue second_moment_count(const ModelParams& params, double y, const QuadratureOptions& opts) {
    validate(params);
    require_origin_start(params, "second_moment_count");
    const double beta = params.beta, t = params.t;
    const double lambda = beta * t / 2.0 + y;
    if (!(t > 0.0) || !(lambda > 0.0)) {
        throw std::invalid_argument("second_moment_count: requires t > -2y/beta (positive level)");
    }
    const FirstMoment m1 = [beta, lambda](double tau) { return count_moment_positive_level(beta, tau, lambda); };
    return second_moment_generic(beta, t, m1, m1, m1, opts);
}

double martingale_weight_square_moment(double beta, double t) {
    // E sum e^{-2 beta |X|} = (2/3) [e^{b^2 t/2} Phi(b sqrt t) + 2 e^{2 b^2 t} (1 - Phi(2 b sqrt t))]
    const double rt = std::sqrt(t);
    return (2.0 / 3.0) * (std::exp(0.5 * beta * beta * t) * normal_cdf(beta * rt) +
                          2.0 * scaled_normal_sf(2.0 * beta * rt));
}

OracleValue martingale_second_moment(double beta, double t, const QuadratureOptions& opts) {
    if (!(beta > 0.0)) throw std::invalid_argument("martingale_second_moment: beta must be positive");
    if (!(t >= 0.0)) throw std::invalid_argument("martingale_second_moment: t must be nonnegative");
    const double b2 = beta * beta;
    const FirstMoment s_f = [b2](double tau) { return std::exp(0.5 * b2 * tau); };
    const FirstMoment s_ff = [beta](double tau) { return martingale_weight_square_moment(beta, tau); };
    const double scale = std::exp(-b2 * t);
    QuadratureOptions scaled = opts;
    scaled.abs_tol = opts.abs_tol / scale;
    const OracleValue raw = second_moment_generic(beta, t, s_f, s_f, s_ff, scaled);
    return {scale * raw.value, scale * raw.abs_error};
}

OracleValue constant_C(double beta, const QuadratureOptions& opts) {
    if (!(beta > 0.0)) throw std::invalid_argument("constant_C: beta must be positive");
    const double b2 = beta * beta;
    const double head = 2.0 * beta * kInvSqrt2Pi;
    // s = u^2 again; e^{-b^2 u^2} * (g'(u^2) 2u).
    auto integrand = [&](double u) {
        const double damp = std::exp(-b2 * u * u);
        return damp * head + 2.0 * u * b2 * normal_cdf(beta * u) * std::exp(-0.5 * b2 * u * u);
    };
    const OracleValue v = integrate_to_infinity(integrand, 0.0, 1.0 / beta, opts);
    return {2.0 * v.value, 2.0 * v.abs_error};
}

RightmostBounds rightmost_bounds(const ModelParams& params, double y) {
    validate(params);
    const double beta = params.beta, t = params.t;
    if (!(t > 0.0) || !(beta * t / 2.0 + y > 0.0)) {
        throw std::invalid_argument("rightmost_bounds: requires t > -2y/beta");
    }
    const OracleValue c = constant_C(beta);
    const double e = std::exp(-beta * y);
    const double phi = normal_cdf(beta * std::sqrt(t) / 2.0 - y / std::sqrt(t));
    const double lower = e * (1.0 - c.value * e) * phi * phi;
    return {{lower, e * e * phi * phi * c.abs_error}, {e, 0.0}};
}

double prop6_estimate(double beta, double x0, double z) {
    return -std::expm1(-beta * std::fabs(x0) - beta * z);
}

double gumbel_mixture_cdf(double beta, double y, std::span<const double> m_samples) {
    if (m_samples.empty()) throw std::invalid_argument("gumbel_mixture_cdf: no martingale samples");
    const double scale = std::exp(-beta * y);
    double acc = 0.0;
    for (double m : m_samples) {
        if (!(m > 0.0)) throw std::invalid_argument("gumbel_mixture_cdf: martingale samples must be positive");
        acc += std::exp(-m * scale);
    }
    return acc / static_cast<double>(m_samples.size());
}

}  // namespace catbbm::oracles
