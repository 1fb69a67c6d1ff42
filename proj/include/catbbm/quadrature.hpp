#pragma once

#include <functional>
#include <stdexcept>

namespace catbbm {

/// A number with an error bound. Closed forms report abs_error = 0.
struct OracleValue {
    double value = 0.0;
    double abs_error = 0.0;
};

class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct QuadratureOptions {
    double abs_tol = 1e-9;
    double rel_tol = 1e-12;
    int max_intervals = 4000;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive 7/15-point Gauss-Kronrod on [a, b]: the interval with
/// the largest |K15 - G7| is bisected until the summed estimate meets
/// max(abs_tol, rel_tol * |I|). Throws QuadratureError if max_intervals is
/// reached first or the integrand returns a non-finite value.
OracleValue integrate(const Integrand& f, double a, double b, const QuadratureOptions& opts = {});

/// Integral over [a, inf) for integrands that decay at least exponentially.
/// Panels [a, a+h], [a+h, a+3h], ... double in width; integration stops
/// once a panel contributes less than 1e-16 of the running total, and that
/// last panel's magnitude is added to abs_error as the truncation bound.
OracleValue integrate_to_infinity(const Integrand& f, double a, double initial_width,
                                  const QuadratureOptions& opts = {});

}  // namespace catbbm
