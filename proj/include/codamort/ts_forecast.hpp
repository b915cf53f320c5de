#pragma once

#include <vector>

namespace codamort {

/// Trend component of the additive-error, non-seasonal exponential
/// smoothing family searched here. Multiplicative forms are excluded on
/// purpose: principal component scores are real-valued and may be negative.
enum class EtsTrend { None, Additive, DampedAdditive };

struct EtsSpec {
    EtsTrend trend = EtsTrend::None;
};

/// A fitted innovations state space exponential smoothing model.
/// Smoothing parameters obey alpha in (0,1), beta in (0,alpha), and for the
/// damped variant phi in (0.8, 0.98]. States are the filtered (level, trend)
/// after each observation; index t holds the state after y[t].
struct EtsFit {
    EtsSpec spec;
    double alpha = 0.1;
    double beta = 0.0;
    double phi = 1.0;
    double level0 = 0.0;
    double trend0 = 0.0;
    double sigma2 = 0.0; ///< innovation variance, SSE/n
    double loglik = 0.0;
    double aicc = 0.0;
    int n_params = 0; ///< smoothing parameters + initial states + variance
    std::vector<double> fitted; ///< one-step in-sample forecasts
    std::vector<double> levels;
    std::vector<double> trends;
    std::vector<double> series;
};

/// Point forecast distribution summary for one score series. The error pool
/// for horizon h holds the n-h in-sample h-step errors y_t - yhat_{t|t-h},
/// t = h+1..n, produced by replaying the final fitted states.
struct UnivariateForecast {
    std::vector<double> mean;
    std::vector<double> variance;
    std::vector<std::vector<double>> insample_errors; ///< [h-1] -> pool
};

/// Fits {none, additive, damped-additive} trend candidates by Gaussian
/// innovations likelihood (Nelder-Mead over parameters and initial states,
/// three fixed starts) and keeps the smallest corrected AIC. Series shorter
/// than 8 fall back to the trend-none candidate only; series shorter than 5
/// are an argument error (the corrected AIC is undefined).
EtsFit fit_ets_auto(const std::vector<double>& series);

/// Fits one named candidate. Exposed for tests and for the model search.
EtsFit fit_ets(const std::vector<double>& series, EtsSpec spec);

UnivariateForecast forecast_ets(const EtsFit& fit, int H);

/// Random walk, optionally with drift. The drift estimate is the mean first
/// difference (y_n - y_1)/(n-1); sigma2 is the sample variance of the first
/// differences about the fitted drift.
struct RwFit {
    bool with_drift = false;
    double drift = 0.0;
    double sigma2 = 0.0;
    std::vector<double> series;
};

RwFit fit_rw(const std::vector<double>& series, bool with_drift);

/// Mean y_n + drift*h, variance h*sigma2, error pools as for the ETS fit.
UnivariateForecast forecast_rw(const RwFit& fit, int H);

} // namespace codamort
