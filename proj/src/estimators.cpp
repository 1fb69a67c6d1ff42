#include "catbbm/estimators.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "catbbm/oracles.hpp"

namespace catbbm::estimators {

SampleMoments SampleMoments::of(std::span<const double> xs) {
    SampleMoments m;
    m.n = xs.size();
    if (xs.empty()) return m;
    double sum = 0.0;
    for (double x : xs) sum += x;
    m.mean = sum / static_cast<double>(m.n);
    if (m.n > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - m.mean) * (x - m.mean);
        m.variance = ss / static_cast<double>(m.n - 1);
        m.std_error = std::sqrt(m.variance / static_cast<double>(m.n));
    }
    return m;
}

Ecdf::Ecdf(std::vector<double> samples) : sorted_(std::move(samples)) {
    if (sorted_.empty()) throw std::invalid_argument("Ecdf: no samples");
    std::sort(sorted_.begin(), sorted_.end());
}

double Ecdf::operator()(double y) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), y);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double Ecdf::left_limit(double y) const {
    const auto it = std::lower_bound(sorted_.begin(), sorted_.end(), y);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

KsResult ks_distance(const Ecdf& ecdf, const std::function<double(double)>& cdf, std::optional<Range> range) {
    const auto xs = ecdf.sorted_samples();
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        // Runs of ties collapse to a single jump from i/n to (j+1)/n.
        std::size_t j = i;
        while (j + 1 < xs.size() && xs[j + 1] == xs[i]) ++j;
        const double x = xs[i];
        if (!range || (x >= range->lo && x <= range->hi)) {
            const double f = cdf(x);
            d = std::max({d, std::fabs(static_cast<double>(j + 1) / n - f), std::fabs(static_cast<double>(i) / n - f)});
        }
        i = j;
    }
    if (range) {
        for (double edge : {range->lo, range->hi}) d = std::max(d, std::fabs(ecdf(edge) - cdf(edge)));
    }
    return {d, static_cast<std::uint64_t>(xs.size())};
}

KsResult ks_distance(const Ecdf& a, const Ecdf& b) {
    const auto xa = a.sorted_samples();
    const auto xb = b.sorted_samples();
    double d = 0.0;
    for (double x : xa) d = std::max(d, std::fabs(a(x) - b(x)));
    for (double x : xb) d = std::max(d, std::fabs(a(x) - b(x)));
    const double n = static_cast<double>(xa.size());
    const double m = static_cast<double>(xb.size());
    return {d, static_cast<std::uint64_t>(std::llround(n * m / (n + m)))};
}

double ks_pvalue(const KsResult& ks) {
    const double lambda = std::sqrt(static_cast<double>(ks.n_effective)) * ks.statistic;
    if (lambda <= 0.0) return 1.0;
    if (lambda < 1.18) {
        // Jacobi-transformed series converges fast for small lambda.
        const double c = M_PI * M_PI / (8.0 * lambda * lambda);
        double s = 0.0;
        for (int k = 1; k <= 7; k += 2) s += std::exp(-static_cast<double>(k * k) * c);
        return 1.0 - std::sqrt(2.0 * M_PI) / lambda * s;
    }
    double q = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        q += (k % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-17) break;
    }
    return std::clamp(q, 0.0, 1.0);
}

namespace {

void check_positive(std::span<const double> m_samples) {
    if (m_samples.empty()) throw std::invalid_argument("mixture_cdf_grid: no martingale samples");
    for (double m : m_samples) {
        if (!(m > 0.0)) throw std::invalid_argument("mixture_cdf_grid: martingale samples must be positive");
    }
}

}  // namespace

std::vector<double> mixture_cdf_grid(double beta, std::span<const double> ys, std::span<const double> m_samples) {
    check_positive(m_samples);
    std::vector<double> out(ys.size());
    const auto n = static_cast<std::int64_t>(ys.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const double scale = std::exp(-beta * ys[i]);
        double acc = 0.0;
        for (double m : m_samples) acc += std::exp(-m * scale);
        out[i] = acc / static_cast<double>(m_samples.size());
    }
    return out;
}

std::vector<double> mixture_cdf_grid_serial(double beta, std::span<const double> ys,
                                            std::span<const double> m_samples) {
    std::vector<double> out;
    out.reserve(ys.size());
    for (double y : ys) out.push_back(oracles::gumbel_mixture_cdf(beta, y, m_samples));
    return out;
}

Theorem1Report theorem1_from_runs(const EnsembleResult& runs, double beta, double t, double s,
                                  std::span<const double> y_grid) {
    if (y_grid.empty()) throw std::invalid_argument("theorem1: empty y grid");
    if (!(s < t)) throw std::invalid_argument("theorem1: s_intermediate must be below t");
    if (runs.runs.empty()) throw std::invalid_argument("theorem1: no runs");
    std::vector<double> centered, m_values;
    centered.reserve(runs.runs.size());
    m_values.reserve(runs.runs.size());
    for (const RunSummary& r : runs.runs) {
        centered.push_back(r.at(t).rightmost - beta * t / 2.0);
        m_values.push_back(r.at(s).martingale);
    }
    const Ecdf ecdf(std::move(centered));
    Theorem1Report report;
    report.t = t;
    report.s = s;

    const auto [lo_it, hi_it] = std::minmax_element(y_grid.begin(), y_grid.end());
    const Range range{*lo_it, *hi_it};
    // The mixture is evaluated at every sample point in range (plus both
    // edges) up front so the sup is exact and the expensive part runs in parallel.
    std::vector<double> points;
    for (double x : ecdf.sorted_samples()) {
        if (x >= range.lo && x <= range.hi && (points.empty() || points.back() != x)) points.push_back(x);
    }
    points.push_back(range.lo);
    points.push_back(range.hi);
    const std::vector<double> mixture = mixture_cdf_grid(beta, points, m_values);
    auto lookup = [&](double x) {
        const auto end = points.end() - 2;
        const auto it = std::lower_bound(points.begin(), end, x);
        if (it != end && *it == x) return mixture[static_cast<std::size_t>(it - points.begin())];
        if (x == range.lo) return mixture[points.size() - 2];
        if (x == range.hi) return mixture[points.size() - 1];
        return oracles::gumbel_mixture_cdf(beta, x, m_values);
    };
    report.ks = ks_distance(ecdf, lookup, range);

    const std::vector<double> grid_values = mixture_cdf_grid(beta, y_grid, m_values);
    for (std::size_t i = 0; i < y_grid.size(); ++i) report.rows.push_back({y_grid[i], ecdf(y_grid[i]), grid_values[i]});
    return report;
}

Theorem1Report theorem1_test(const EnsembleSpec& spec, std::span<const double> y_grid) {
    const EnsembleResult runs = run_ensemble(spec);
    runs.require_complete();
    return theorem1_from_runs(runs, spec.params.beta, spec.params.t, spec.intermediate_time(), y_grid);
}

Prop6Result prop6_from_runs(const EnsembleResult& runs, double beta, double x0, double t, double z) {
    if (runs.runs.empty()) throw std::invalid_argument("prop6: no runs");
    const double level = beta * t / 2.0 + z;
    std::uint64_t below = 0;
    for (const RunSummary& r : runs.runs) {
        if (r.at(t).rightmost <= level) ++below;
    }
    Prop6Result out;
    out.z = z;
    out.n = runs.runs.size();
    out.empirical = static_cast<double>(below) / static_cast<double>(out.n);
    out.predicted = oracles::prop6_estimate(beta, x0, z);
    const double se = std::sqrt(out.predicted * (1.0 - out.predicted) / static_cast<double>(out.n));
    const double diff = out.empirical - out.predicted;
    out.z_score = se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff));
    return out;
}

Prop6Result prop6_test(const EnsembleSpec& spec, double z) {
    const EnsembleResult runs = run_ensemble(spec);
    runs.require_complete();
    return prop6_from_runs(runs, spec.params.beta, spec.params.x0, spec.params.t, z);
}

MartingaleReport martingale_convergence_report(const EnsembleResult& runs, const ModelParams& params,
                                               std::span<const double> checkpoints) {
    if (runs.runs.empty()) throw std::invalid_argument("martingale report: no runs");
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        if (!(checkpoints[i] < params.t)) throw std::invalid_argument("martingale report: checkpoints must be < t");
        if (i > 0 && checkpoints[i] < checkpoints[i - 1]) throw std::invalid_argument("martingale report: checkpoints not sorted");
    }
    MartingaleReport report;
    report.t = params.t;
    std::vector<double> m_t;
    m_t.reserve(runs.runs.size());
    for (const RunSummary& r : runs.runs) m_t.push_back(r.at(params.t).martingale);
    report.m_t = SampleMoments::of(m_t);
    report.min_m_t = *std::min_element(m_t.begin(), m_t.end());
    const bool origin = params.x0 == 0.0;
    if (origin) report.limit_variance = oracles::constant_C(params.beta).value - 1.0;

    for (double s : checkpoints) {
        MartingaleRow row;
        row.s = s;
        std::vector<double> m_s;
        m_s.reserve(runs.runs.size());
        double abs_inc = 0.0;
        for (std::size_t i = 0; i < runs.runs.size(); ++i) {
            const double v = runs.runs[i].at(s).martingale;
            m_s.push_back(v);
            abs_inc += std::fabs(v - m_t[i]);
        }
        row.m_s = SampleMoments::of(m_s);
        row.mean_abs_increment = abs_inc / static_cast<double>(m_s.size());
        if (origin) row.analytic_second_moment = oracles::martingale_second_moment(params.beta, s).value;
        report.rows.push_back(row);
    }
    return report;
}

CountMoments count_moments(const EnsembleResult& runs, double t, double y, std::size_t level) {
    if (runs.runs.empty()) throw std::invalid_argument("count_moments: no runs");
    std::vector<double> first, second, alive;
    first.reserve(runs.runs.size());
    second.reserve(runs.runs.size());
    alive.reserve(runs.runs.size());
    for (const RunSummary& r : runs.runs) {
        const auto c = static_cast<double>(r.at(t).counts_above.at(level));
        first.push_back(c);
        second.push_back(c * c);
        alive.push_back(c > 0.0 ? 1.0 : 0.0);
    }
    CountMoments out;
    out.t = t;
    out.y = y;
    out.first = SampleMoments::of(first);
    out.second = SampleMoments::of(second);
    const SampleMoments surv = SampleMoments::of(alive);
    out.survival = surv.mean;
    out.survival_std_error = surv.std_error;
    return out;
}

}  // namespace catbbm::estimators
