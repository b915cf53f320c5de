#include "codamort/ts_forecast.hpp"

#include "codamort/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace codamort {

namespace {

constexpr double kAlphaLo = 1e-4;
constexpr double kAlphaHi = 0.9999;
constexpr double kBetaLo = 1e-4;
constexpr double kPhiLo = 0.8;
constexpr double kPhiHi = 0.98;
constexpr double kSigma2Floor = 1e-100; // keeps the log-likelihood finite on exact fits

struct FilterPass {
    double sse = 0.0;
    std::vector<double> fitted, levels, trends;
};

// One forward pass of the additive-error recursion:
//   yhat_t = l + phi*b,  l <- yhat + alpha*e,  b <- phi*b + beta*e.
FilterPass run_filter(const std::vector<double>& y, EtsTrend trend, double alpha,
                      double beta, double phi, double l0, double b0) {
    FilterPass out;
    const std::size_t n = y.size();
    out.fitted.resize(n);
    out.levels.resize(n);
    out.trends.resize(n);
    double l = l0;
    double b = (trend == EtsTrend::None) ? 0.0 : b0;
    const double damp = (trend == EtsTrend::DampedAdditive) ? phi : 1.0;
    for (std::size_t t = 0; t < n; ++t) {
        const double yhat = (trend == EtsTrend::None) ? l : l + damp * b;
        const double e = y[t] - yhat;
        out.sse += e * e;
        l = yhat + alpha * e;
        if (trend != EtsTrend::None) {
            b = damp * b + beta * e;
        }
        out.fitted[t] = yhat;
        out.levels[t] = l;
        out.trends[t] = b;
    }
    return out;
}

int param_count(EtsTrend trend) {
    switch (trend) {
    case EtsTrend::None:
        return 3; // alpha, level0, sigma
    case EtsTrend::Additive:
        return 5; // + beta, trend0
    case EtsTrend::DampedAdditive:
        return 6; // + phi
    }
    return 3;
}

// Minimal Nelder-Mead with box bounds enforced through a graded penalty.
// Deterministic for fixed inputs.
struct NelderMead {
    using Objective = std::function<double(const std::vector<double>&)>;

    static std::vector<double> minimize(const Objective& f, std::vector<double> x0,
                                        const std::vector<double>& step, double tol,
                                        int max_iter) {
        const std::size_t d = x0.size();
        std::vector<std::vector<double>> simplex(d + 1, x0);
        std::vector<double> fv(d + 1);
        for (std::size_t i = 0; i < d; ++i) {
            simplex[i + 1][i] += step[i];
        }
        for (std::size_t i = 0; i <= d; ++i) {
            fv[i] = f(simplex[i]);
        }

        for (int iter = 0; iter < max_iter; ++iter) {
            // Order best..worst.
            std::vector<std::size_t> idx(d + 1);
            std::iota(idx.begin(), idx.end(), 0);
            std::sort(idx.begin(), idx.end(),
                      [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
            std::vector<std::vector<double>> sx(d + 1);
            std::vector<double> sf(d + 1);
            for (std::size_t i = 0; i <= d; ++i) {
                sx[i] = simplex[idx[i]];
                sf[i] = fv[idx[i]];
            }
            simplex.swap(sx);
            fv.swap(sf);

            double spread = 0.0;
            for (std::size_t i = 1; i <= d; ++i) {
                for (std::size_t j = 0; j < d; ++j) {
                    spread = std::max(spread, std::abs(simplex[i][j] - simplex[0][j]));
                }
            }
            if (spread < tol && std::abs(fv[d] - fv[0]) < tol * (1.0 + std::abs(fv[0]))) {
                break;
            }

            std::vector<double> centroid(d, 0.0);
            for (std::size_t i = 0; i < d; ++i) {
                for (std::size_t j = 0; j < d; ++j) {
                    centroid[j] += simplex[i][j] / static_cast<double>(d);
                }
            }
            auto affine = [&](double coef) {
                std::vector<double> p(d);
                for (std::size_t j = 0; j < d; ++j) {
                    p[j] = centroid[j] + coef * (simplex[d][j] - centroid[j]);
                }
                return p;
            };

            const std::vector<double> xr = affine(-1.0);
            const double fr = f(xr);
            if (fr < fv[0]) {
                const std::vector<double> xe = affine(-2.0);
                const double fe = f(xe);
                if (fe < fr) {
                    simplex[d] = xe;
                    fv[d] = fe;
                } else {
                    simplex[d] = xr;
                    fv[d] = fr;
                }
            } else if (fr < fv[d - 1]) {
                simplex[d] = xr;
                fv[d] = fr;
            } else {
                const bool outside = fr < fv[d];
                const std::vector<double> xc = affine(outside ? -0.5 : 0.5);
                const double fc = f(xc);
                if (fc < std::min(fr, fv[d])) {
                    simplex[d] = xc;
                    fv[d] = fc;
                } else {
                    for (std::size_t i = 1; i <= d; ++i) {
                        for (std::size_t j = 0; j < d; ++j) {
                            simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
                        }
                        fv[i] = f(simplex[i]);
                    }
                }
            }
        }
        const std::size_t best =
            std::min_element(fv.begin(), fv.end()) - fv.begin();
        return simplex[best];
    }
};

// Pack/unpack of the optimizer vector per trend type:
//   None:   (alpha, level0)
//   Add:    (alpha, beta, level0, trend0)
//   Damped: (alpha, beta, phi, level0, trend0)
struct Bounds {
    std::vector<double> lo, hi;
};

Bounds make_bounds(EtsTrend trend, double y_min, double y_max) {
    const double range = std::max(1.0, y_max - y_min);
    Bounds b;
    b.lo = {kAlphaLo};
    b.hi = {kAlphaHi};
    if (trend != EtsTrend::None) {
        b.lo.push_back(kBetaLo);
        b.hi.push_back(kAlphaHi); // beta <= alpha enforced separately
    }
    if (trend == EtsTrend::DampedAdditive) {
        b.lo.push_back(kPhiLo);
        b.hi.push_back(kPhiHi);
    }
    b.lo.push_back(y_min - 2.0 * range); // level0
    b.hi.push_back(y_max + 2.0 * range);
    if (trend != EtsTrend::None) {
        b.lo.push_back(-2.0 * range); // trend0
        b.hi.push_back(2.0 * range);
    }
    return b;
}

struct Unpacked {
    double alpha, beta, phi, l0, b0;
};

Unpacked unpack(EtsTrend trend, const std::vector<double>& p) {
    Unpacked u{p[0], 0.0, 1.0, 0.0, 0.0};
    std::size_t i = 1;
    if (trend != EtsTrend::None) {
        u.beta = p[i++];
    }
    if (trend == EtsTrend::DampedAdditive) {
        u.phi = p[i++];
    }
    u.l0 = p[i++];
    if (trend != EtsTrend::None) {
        u.b0 = p[i++];
    }
    return u;
}

} // namespace

EtsFit fit_ets(const std::vector<double>& series, EtsSpec spec) {
    const std::size_t n = series.size();
    if (n < 5) {
        throw std::invalid_argument("ETS fit needs at least 5 observations");
    }
    const double y_min = *std::min_element(series.begin(), series.end());
    const double y_max = *std::max_element(series.begin(), series.end());
    const Bounds bounds = make_bounds(spec.trend, y_min, y_max);

    auto objective = [&](const std::vector<double>& p) {
        double violation = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            violation += std::max(0.0, bounds.lo[i] - p[i]);
            violation += std::max(0.0, p[i] - bounds.hi[i]);
        }
        const Unpacked u = unpack(spec.trend, p);
        if (spec.trend != EtsTrend::None) {
            violation += std::max(0.0, u.beta - u.alpha); // beta < alpha
        }
        if (violation > 0.0) {
            return 1e12 * (1.0 + violation);
        }
        const FilterPass pass =
            run_filter(series, spec.trend, u.alpha, u.beta, u.phi, u.l0, u.b0);
        if (!std::isfinite(pass.sse)) {
            return 1e12;
        }
        return pass.sse;
    };

    // Heuristic initial states from a short least-squares line fit.
    const std::size_t m = std::min<std::size_t>(n, 10);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double xi = static_cast<double>(i + 1);
        sx += xi;
        sy += series[i];
        sxx += xi * xi;
        sxy += xi * series[i];
    }
    const double denom = m * sxx - sx * sx;
    const double slope = (denom != 0.0) ? (m * sxy - sx * sy) / denom : 0.0;
    const double intercept = (sy - slope * sx) / static_cast<double>(m);

    // Three fixed multi-starts over the smoothing parameters.
    const double starts[3][3] = {{0.2, 0.05, 0.90}, {0.5, 0.15, 0.95}, {0.9, 0.40, 0.85}};
    const double range = std::max(1.0, y_max - y_min);

    std::vector<double> best;
    double best_sse = std::numeric_limits<double>::infinity();
    for (const auto& s : starts) {
        std::vector<double> x0 = {s[0]};
        std::vector<double> step = {0.2};
        if (spec.trend != EtsTrend::None) {
            x0.push_back(std::min(s[1], s[0] * 0.8));
            step.push_back(0.1);
        }
        if (spec.trend == EtsTrend::DampedAdditive) {
            x0.push_back(s[2]);
            step.push_back(0.04);
        }
        x0.push_back(intercept);
        step.push_back(0.1 * range);
        if (spec.trend != EtsTrend::None) {
            x0.push_back(slope);
            step.push_back(0.05 * range);
        }
        std::vector<double> sol =
            NelderMead::minimize(objective, x0, step, 1e-8, 500 * static_cast<int>(x0.size()));
        // One restart from the solution tightens flat valleys.
        for (auto& st : step) {
            st *= 0.1;
        }
        sol = NelderMead::minimize(objective, sol, step, 1e-8, 500 * static_cast<int>(sol.size()));
        const double sse = objective(sol);
        if (sse < best_sse) {
            best_sse = sse;
            best = sol;
        }
    }
    if (!std::isfinite(best_sse) || best_sse >= 1e12) {
        throw NumericError("ETS optimization failed to find a feasible fit");
    }

    const Unpacked u = unpack(spec.trend, best);
    const FilterPass pass = run_filter(series, spec.trend, u.alpha, u.beta, u.phi, u.l0, u.b0);

    EtsFit fit;
    fit.spec = spec;
    fit.alpha = u.alpha;
    fit.beta = u.beta;
    fit.phi = (spec.trend == EtsTrend::DampedAdditive) ? u.phi : 1.0;
    fit.level0 = u.l0;
    fit.trend0 = u.b0;
    fit.sigma2 = pass.sse / static_cast<double>(n);
    const double sigma2 = std::max(fit.sigma2, kSigma2Floor);
    fit.loglik = -0.5 * static_cast<double>(n) * (std::log(2.0 * M_PI * sigma2) + 1.0);
    fit.n_params = param_count(spec.trend);
    const double k = fit.n_params;
    const double dn = static_cast<double>(n);
    fit.aicc = (dn - k - 1.0 > 0.0)
                   ? -2.0 * fit.loglik + 2.0 * k * dn / (dn - k - 1.0)
                   : std::numeric_limits<double>::infinity();
    fit.fitted = pass.fitted;
    fit.levels = pass.levels;
    fit.trends = pass.trends;
    fit.series = series;
    return fit;
}

EtsFit fit_ets_auto(const std::vector<double>& series) {
    const std::size_t n = series.size();
    if (n < 5) {
        throw std::invalid_argument("automatic ETS needs at least 5 observations");
    }
    std::vector<EtsSpec> candidates = {{EtsTrend::None}};
    if (n >= 8) {
        candidates.push_back({EtsTrend::Additive});
        candidates.push_back({EtsTrend::DampedAdditive});
    }
    bool have = false;
    EtsFit best;
    for (const EtsSpec& spec : candidates) {
        EtsFit fit;
        try {
            fit = fit_ets(series, spec);
        } catch (const NumericError&) {
            continue; // candidate skipped
        }
        if (!std::isfinite(fit.aicc)) {
            continue;
        }
        if (!have || fit.aicc < best.aicc) {
            best = std::move(fit);
            have = true;
        }
    }
    if (!have) {
        throw NumericError("no ETS candidate could be fitted");
    }
    return best;
}

namespace {

// phi + phi^2 + ... + phi^h (h for the non-damped additive trend).
double damped_sum(double phi, int h, EtsTrend trend) {
    if (trend == EtsTrend::None) {
        return 0.0;
    }
    if (trend == EtsTrend::Additive) {
        return static_cast<double>(h);
    }
    double s = 0.0;
    double p = 1.0;
    for (int j = 0; j < h; ++j) {
        p *= phi;
        s += p;
    }
    return s;
}

} // namespace

UnivariateForecast forecast_ets(const EtsFit& fit, int H) {
    if (H < 1) {
        throw std::invalid_argument("horizon must be >= 1");
    }
    const std::size_t n = fit.series.size();
    UnivariateForecast out;
    out.mean.resize(H);
    out.variance.resize(H);
    out.insample_errors.resize(H);

    const double l = fit.levels.back();
    const double b = fit.trends.back();
    for (int h = 1; h <= H; ++h) {
        out.mean[h - 1] = l + damped_sum(fit.phi, h, fit.spec.trend) * b;
    }
    // Class-1 forecast variance: sigma2 * (1 + sum_{j<h} c_j^2) with
    // c_j = alpha + beta * (damped step sum up to j).
    double csum = 0.0;
    for (int h = 1; h <= H; ++h) {
        out.variance[h - 1] = fit.sigma2 * (1.0 + csum);
        const double cj = fit.alpha + fit.beta * damped_sum(fit.phi, h, fit.spec.trend);
        csum += cj * cj;
    }
    // h-step error pools by replaying the filtered states.
    for (int h = 1; h <= H; ++h) {
        auto& pool = out.insample_errors[h - 1];
        if (static_cast<std::size_t>(h) >= n) {
            continue;
        }
        pool.reserve(n - h);
        for (std::size_t origin = 0; origin + h < n; ++origin) {
            const double pred = fit.levels[origin] +
                                damped_sum(fit.phi, h, fit.spec.trend) * fit.trends[origin];
            pool.push_back(fit.series[origin + h] - pred);
        }
    }
    return out;
}

RwFit fit_rw(const std::vector<double>& series, bool with_drift) {
    const std::size_t n = series.size();
    if (n < 2 || (with_drift && n < 3)) {
        throw std::invalid_argument("random walk needs >= 2 observations (>= 3 with drift)");
    }
    RwFit fit;
    fit.with_drift = with_drift;
    fit.series = series;
    const std::size_t m = n - 1;
    fit.drift = with_drift ? (series.back() - series.front()) / static_cast<double>(m) : 0.0;
    double ss = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double r = series[i + 1] - series[i] - fit.drift;
        ss += r * r;
    }
    fit.sigma2 = ss / static_cast<double>(std::max<std::size_t>(m - 1, 1));
    return fit;
}

UnivariateForecast forecast_rw(const RwFit& fit, int H) {
    if (H < 1) {
        throw std::invalid_argument("horizon must be >= 1");
    }
    const std::size_t n = fit.series.size();
    UnivariateForecast out;
    out.mean.resize(H);
    out.variance.resize(H);
    out.insample_errors.resize(H);
    for (int h = 1; h <= H; ++h) {
        out.mean[h - 1] = fit.series.back() + fit.drift * h;
        out.variance[h - 1] = fit.sigma2 * h;
        auto& pool = out.insample_errors[h - 1];
        if (static_cast<std::size_t>(h) >= n) {
            continue;
        }
        pool.reserve(n - h);
        for (std::size_t origin = 0; origin + h < n; ++origin) {
            pool.push_back(fit.series[origin + h] - (fit.series[origin] + fit.drift * h));
        }
    }
    return out;
}

} // namespace codamort
