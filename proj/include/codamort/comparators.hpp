#pragma once

#include "codamort/coda_core.hpp"
#include "codamort/coda_forecast.hpp"
#include "codamort/lifetable.hpp"
#include "codamort/ts_forecast.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <vector>

namespace codamort {

/// Scalar conversions between the central mortality rate and the one-year
/// probability of dying: m = -ln(1-q), q = 1 - exp(-m).
inline double central_rate_from_q(double q) { return -std::log1p(-q); }
inline double q_from_central_rate(double m) { return -std::expm1(-m); }

/// Log central mortality rates implied by a death grid, n x (K-1). The
/// final (open) age group is excluded: its probability of dying is one by
/// table closure, so its rate is unbounded. q is floored at 1e-10 before
/// taking logs; an interior q = 1 is a domain error.
Eigen::MatrixXd grid_to_log_mortality(const DeathGrid& grid);

/// Classic principal-component decomposition of log mortality rates with
/// the usual identifiability constraints (loadings sum to one; scores sum
/// to zero before the second-stage adjustment).
struct LeeCarterModel {
    Eigen::VectorXd age_mean;          ///< a_x over fitted ages
    Eigen::VectorXd loading;           ///< b_x, sums to 1
    Eigen::VectorXd kappa;             ///< period index after adjustment
    Eigen::VectorXd kappa_unadjusted;  ///< sums to 0
    Eigen::MatrixXd residuals;         ///< recomputed after adjustment
    double drift = 0.0;                ///< random walk with drift on kappa
    double sigma2 = 0.0;
    double radix = 100000.0;
    int n_ages = 0; ///< full age count including the closed final age
};

/// Stage one only: SVD fit under the two constraints, no adjustment.
LeeCarterModel fit_lee_carter(const Eigen::MatrixXd& log_m);

/// Full fit from a grid: stage one, then each kappa_t re-solved by bisection
/// (to 1e-8) so that the deaths implied by applying the fitted q to the
/// year's observed survivorship column match the observed total deaths over
/// the fitted ages. Residuals and the kappa random walk are recomputed on
/// the adjusted index.
LeeCarterModel fit_lee_carter(const DeathGrid& grid);

/// Point forecast plus bootstrap sample paths (layout as BootstrapForecast:
/// samples[h-1] is B x K).
struct ComparatorForecast {
    Eigen::MatrixXd point; ///< H x K
    std::vector<Eigen::MatrixXd> samples;
};

/// Kappa extrapolated by its random walk with drift; bootstrap replicates
/// resample h-step kappa forecast errors and per-age residuals, then map
/// rates back to death counts through the life-table recursion (final age
/// pinned at q = 1).
ComparatorForecast forecast_lc(const LeeCarterModel& model, int H, int B,
                               std::uint64_t seed);

/// Penalized least squares smoother across age: minimizes
/// ||y - theta||^2 + lambda * ||second differences of theta||^2.
Eigen::VectorXd smooth_second_difference(const Eigen::VectorXd& y, double lambda);

/// Smooths every row; when no override is given the weight is chosen per
/// row by generalized cross-validation over a fixed log-spaced grid.
Eigen::MatrixXd smooth_log_rates(const Eigen::MatrixXd& log_m,
                                 std::optional<double> lambda_override = {});

/// Simplified variant of the six-component functional approach: penalized
/// smoothing across age (in place of a monotonic P-spline), six principal
/// components of the centred smoothed log rates, one automatic ETS fit per
/// score series.
struct HuModel {
    Eigen::MatrixXd smoothed_log_m; ///< n x (K-1)
    Eigen::VectorXd mean_log_m;     ///< age mean of the smoothed rates
    PcaBasis basis;                 ///< 6 components
    std::vector<EtsFit> score_fits;
    double radix = 100000.0;
    int n_ages = 0;
};

HuModel fit_hu_simplified(const DeathGrid& grid,
                          std::optional<double> lambda_override = {});

ComparatorForecast forecast_hu(const HuModel& model, int H, int B, std::uint64_t seed);

/// Per-age random walk (with or without drift) on the clr-transformed grid.
/// Intervals are Gaussian in clr space with variance h * sigma2 per age and
/// are back-transformed alongside the point forecast; bounds are re-ordered
/// per cell after the transform.
struct NaiveClrForecast {
    Eigen::MatrixXd point; ///< H x K
    IntervalBand band;
};

NaiveClrForecast naive_clr_rw(const DeathGrid& grid, bool with_drift, int H, double gamma);

} // namespace codamort
