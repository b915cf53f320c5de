#pragma once

#include "codamort/coda_core.hpp"
#include "codamort/lifetable.hpp"
#include "codamort/ts_forecast.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <variant>
#include <vector>

namespace codamort {

/// How to choose the number of retained principal components.
struct NcompMode {
    enum class Kind { Cpv, Fixed };
    Kind kind = Kind::Cpv;
    double delta = 0.85;
    int fixed = 6;

    static NcompMode cpv(double delta = 0.85) { return {Kind::Cpv, delta, 0}; }
    static NcompMode fixed_count(int L) { return {Kind::Fixed, 0.0, L}; }
};

enum class ForecasterKind { Ets, RandomWalk, RandomWalkDrift };

/// One fitted per-score forecaster.
using ScoreForecaster = std::variant<EtsFit, RwFit>;

UnivariateForecast forecast_scores(const ScoreForecaster& fc, int H);

/// Fitted state of the compositional pipeline: age geometric means, the
/// truncated principal component basis of the clr matrix, and one univariate
/// forecaster per retained score series.
struct CodaModel {
    GeometricMeans means;
    PcaBasis basis;
    std::vector<ScoreForecaster> score_forecasters;
    double radix = 100000.0;
    NcompMode ncomp_mode;
    std::vector<int> years;

    int L() const { return basis.L; }
    int n_ages() const { return static_cast<int>(means.alpha.size()); }

    /// In-sample fitted death counts (back-transform of the rank-L fit).
    Eigen::MatrixXd fitted_deaths() const;
};

CodaModel fit_coda(const DeathGrid& grid, NcompMode ncomp, ForecasterKind forecaster);

/// H x K matrix of forecast death counts; every row is strictly positive and
/// sums to the radix.
Eigen::MatrixXd point_forecast(const CodaModel& model, int H);

/// Bootstrap sample paths of future death distributions. samples[h-1] is a
/// B x K matrix; each row is a full death distribution summing to the radix.
struct BootstrapForecast {
    int horizon = 0;
    int replicates = 0;
    std::vector<Eigen::MatrixXd> samples;
};

struct BootstrapOptions {
    /// Sample whole residual rows (preserving cross-age dependence) instead
    /// of independent per-age draws. Off by default.
    bool sample_residual_rows = false;
};

/// Resamples h-step score forecast errors (with replacement from the
/// in-sample pool at that horizon) and decomposition residuals per age,
/// recombines in clr space and back-transforms. Replicate b draws from a
/// sub-stream derived from (seed, b), so results are schedule-independent.
BootstrapForecast bootstrap_forecast(const CodaModel& model, int H, int B,
                                     std::uint64_t seed, BootstrapOptions opts = {});

/// Pointwise lower/upper quantile surfaces (H x K).
struct IntervalBand {
    Eigen::MatrixXd lower, upper;
};

/// Empirical gamma/2 and 1-gamma/2 quantiles per (horizon, age) cell,
/// type-7 interpolation.
IntervalBand prediction_interval(const BootstrapForecast& boot, double gamma);

/// Shared quantile helper for any per-horizon stack of B x K sample
/// matrices; one sort per cell serves all requested gamma levels.
std::vector<IntervalBand> prediction_intervals(const std::vector<Eigen::MatrixXd>& samples,
                                               const std::vector<double>& gammas);

} // namespace codamort
