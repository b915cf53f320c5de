#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace codamort {

/// One row of an HMD-format 1x1 period life table. The open age group
/// ("110+") parses with the "+" stripped.
struct LifeTableRecord {
    int year = 0;
    int age = 0;
    std::optional<double> qx; ///< probability of dying in [age, age+1); absent when "."
    double lx = 0.0;          ///< survivors at exact age
    double dx_reported = 0.0; ///< deaths as reported in the source table
};

/// Year-by-age matrix of life-table death counts. Rows are consecutive
/// calendar years; columns are single-year ages 0..K-1. Every row sums to
/// the radix and every entry is strictly positive, so the log-ratio
/// transforms downstream are always defined.
struct DeathGrid {
    std::vector<int> years;
    Eigen::MatrixXd values; ///< n x K deaths (fractional persons)
    double radix = 100000.0;

    int n_years() const { return static_cast<int>(values.rows()); }
    int n_ages() const { return static_cast<int>(values.cols()); }
    int first_year() const { return years.front(); }
    int last_year() const { return years.back(); }

    /// Row for a calendar year. Throws DataError when the year is absent.
    Eigen::VectorXd row_for_year(int year) const;

    /// Restriction to the years [first_year, last_year_inclusive].
    DeathGrid up_to_year(int last_year_inclusive) const;
};

/// Floor applied to reconstructed death counts; rows are renormalized to the
/// radix after flooring. Keeps every entry strictly positive.
inline constexpr double kMinDeaths = 1e-6;

/// Validates the grid invariants (consecutive years matching the row count,
/// strictly positive entries, row sums within 1e-6 relative of the radix)
/// and assembles the value. Throws DataError on violation.
DeathGrid make_death_grid(std::vector<int> years, Eigen::MatrixXd values,
                          double radix = 100000.0);

/// Parses an HMD 1x1 period life-table text stream: two header lines, then
/// whitespace-delimited columns Year Age mx qx ax lx dx Lx Tx ex, with "."
/// for missing values. A residual column-header line ("Year ...") after the
/// header block is tolerated. Throws ParseError with the offending line
/// number, or DataError when the year range has gaps or the year x age
/// block is not rectangular.
std::vector<LifeTableRecord> parse_hmd_table(std::istream& in);

/// Rebuilds fractional death counts from the probabilities of dying:
/// per year, l_0 = radix, d_x = l_x * q_x, l_{x+1} = l_x - d_x, and the
/// final age is closed at q = 1 so the row sums to the radix exactly.
/// Missing interior qx are filled by linear interpolation in age (boundary
/// gaps take the nearest observed value). Entries below kMinDeaths are
/// floored and the row renormalized. qx outside [0,1] -> std::domain_error.
DeathGrid rebuild_death_grid(const std::vector<LifeTableRecord>& records,
                             double radix = 100000.0);

/// Deterministic test fixture: a Gompertz-style mortality surface over ages
/// 0..110 whose modal age drifts upward year over year, with a slowly
/// decaying, seeded-jitter infant component. Years end at 2014 so the
/// default backtest windows apply. Satisfies all DeathGrid invariants.
DeathGrid synthetic_grid(int n_years, std::uint64_t seed);

} // namespace codamort
