#include "catbbm/quadrature.hpp"

#include <cmath>
#include <queue>
#include <vector>

namespace catbbm {

namespace {

// Kronrod abscissae on [0, 1]; odd indices are the 7-point Gauss nodes.
constexpr double kNodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kKronrod[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kGauss[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                              0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gauss_kronrod(const Integrand& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double k = fc * kKronrod[7];
    double g = fc * kGauss[3];
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kNodes[i];
        const double s = f(c - dx) + f(c + dx);
        k += kKronrod[i] * s;
        if (i % 2 == 1) g += kGauss[i / 2] * s;
    }
    k *= h;
    g *= h;
    if (!std::isfinite(k)) throw QuadratureError("integrand is not finite on the integration range");
    return {a, b, k, std::fabs(k - g)};
}

}  // namespace

OracleValue integrate(const Integrand& f, double a, double b, const QuadratureOptions& opts) {
    if (a == b) return {0.0, 0.0};
    std::priority_queue<Panel> panels;
    Panel first = gauss_kronrod(f, a, b);
    double total = first.value;
    double error = first.error;
    panels.push(first);
    int count = 1;
    // Re-summing from the heap at the end avoids drift from the running
    // add/subtract updates.
    auto resum = [&panels] {
        auto copy = panels;
        double v = 0.0, e = 0.0;
        while (!copy.empty()) {
            v += copy.top().value;
            e += copy.top().error;
            copy.pop();
        }
        return OracleValue{v, e};
    };
    while (error > std::fmax(opts.abs_tol, opts.rel_tol * std::fabs(total))) {
        if (count >= opts.max_intervals) {
            throw QuadratureError("adaptive quadrature did not converge: error estimate " +
                                  std::to_string(error) + " after " + std::to_string(count) + " intervals");
        }
        Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        Panel left = gauss_kronrod(f, worst.a, mid);
        Panel right = gauss_kronrod(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
        ++count;
        if ((count & 255) == 0) {
            const OracleValue r = resum();
            total = r.value;
            error = r.abs_error;
        }
    }
    return resum();
}

OracleValue integrate_to_infinity(const Integrand& f, double a, double initial_width,
                                  const QuadratureOptions& opts) {
    if (!(initial_width > 0.0)) throw std::invalid_argument("integrate_to_infinity: width must be positive");
    OracleValue acc{0.0, 0.0};
    double lo = a;
    double width = initial_width;
    for (int panel = 0; panel < 200; ++panel) {
        const OracleValue part = integrate(f, lo, lo + width, opts);
        acc.value += part.value;
        acc.abs_error += part.abs_error;
        lo += width;
        width *= 2.0;
        if (panel >= 2 && std::fabs(part.value) <= 1e-16 * std::fabs(acc.value)) {
            acc.abs_error += std::fabs(part.value);
            return acc;
        }
    }
    throw QuadratureError("integrate_to_infinity: tail did not decay");
}

}  // namespace catbbm
