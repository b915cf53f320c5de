#pragma once

#include "codamort/lifetable.hpp"

#include <Eigen/Core>

namespace codamort {

/// Per-age geometric means of a death grid, alpha_x > 0.
struct GeometricMeans {
    Eigen::VectorXd alpha;
};

/// Centred log-ratio transform of the de-centred, closed data. Every row of
/// z sums to zero (within 1e-9); g holds the per-row geometric means of the
/// closed compositions.
struct ClrMatrix {
    Eigen::MatrixXd z; ///< n x K
    Eigen::VectorXd g; ///< length n
};

/// Truncated principal component decomposition of a data matrix.
/// components has orthonormal rows, scores * components is the best rank-L
/// Frobenius approximation, and residuals = data - scores * components.
/// eigenvalues carries the full spectrum of the Gram matrix (non-increasing),
/// not just the retained part.
struct PcaBasis {
    Eigen::MatrixXd components;  ///< L x K
    Eigen::MatrixXd scores;      ///< n x L
    Eigen::VectorXd eigenvalues; ///< min(n,K), sigma_l^2
    Eigen::MatrixXd residuals;   ///< n x K
    int L = 0;
};

/// alpha_x = exp(mean_t ln d_{t,x}). All entries must be strictly positive.
GeometricMeans geometric_means(const DeathGrid& grid);

/// De-centre by the age geometric means, close each row to sum one, and
/// apply the centred log-ratio transform.
ClrMatrix clr_transform(const DeathGrid& grid, const GeometricMeans& means);

/// Softmax back-transform of one clr row to a composition summing to one.
/// The maximum is subtracted before exponentiation; the result is invariant
/// under adding a constant to every entry.
Eigen::VectorXd inverse_clr(const Eigen::VectorXd& z_row);

/// Re-weight a composition by the age geometric means and scale to the
/// radix: d_x = radix * f_x alpha_x / sum(f alpha).
Eigen::VectorXd recompose_deaths(const Eigen::VectorXd& composition,
                                 const GeometricMeans& means, double radix);

/// SVD of the matrix as-is (rows are already centred by construction of the
/// clr pipeline; no further column mean is removed). Component signs are
/// fixed so each component's largest-magnitude loading is positive.
PcaBasis fit_pca(const Eigen::MatrixXd& z, int L);
PcaBasis fit_pca(const ClrMatrix& z, int L);

/// Smallest L whose leading eigenvalues reach the fraction delta of the
/// positive spectrum. Zero eigenvalues are excluded from the denominator;
/// an all-zero spectrum is a domain error.
int select_ncomp_cpv(const Eigen::VectorXd& eigenvalues, double delta);

/// 1 - SS_res / SS_tot with the total sum of squares taken around the
/// per-age mean across years. Constant observed matrix -> domain error.
double r_squared(const Eigen::MatrixXd& observed, const Eigen::MatrixXd& fitted);

} // namespace codamort
