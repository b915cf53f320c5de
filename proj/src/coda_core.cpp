#include "codamort/coda_core.hpp"

#include "codamort/errors.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>
#include <string>

namespace codamort {

GeometricMeans geometric_means(const DeathGrid& grid) {
    if (!(grid.values.minCoeff() > 0.0)) {
        throw std::domain_error("geometric means need strictly positive counts");
    }
    GeometricMeans out;
    out.alpha = grid.values.array().log().colwise().mean().exp();
    return out;
}

ClrMatrix clr_transform(const DeathGrid& grid, const GeometricMeans& means) {
    if (!(grid.values.minCoeff() > 0.0)) {
        throw std::domain_error("clr transform needs strictly positive counts");
    }
    if (means.alpha.size() != grid.values.cols() || !(means.alpha.minCoeff() > 0.0)) {
        throw std::domain_error("geometric means do not match the grid");
    }
    const Eigen::Index n = grid.values.rows();
    const Eigen::Index K = grid.values.cols();

    ClrMatrix out;
    out.z.resize(n, K);
    out.g.resize(n);
    for (Eigen::Index t = 0; t < n; ++t) {
        Eigen::ArrayXd w = grid.values.row(t).transpose().array() / means.alpha.array();
        w /= w.sum(); // closed composition f
        const Eigen::ArrayXd logf = w.log();
        const double mean_log = logf.mean();
        out.g(t) = std::exp(mean_log);
        out.z.row(t) = (logf - mean_log).matrix().transpose();
    }
    return out;
}

Eigen::VectorXd inverse_clr(const Eigen::VectorXd& z_row) {
    if (z_row.size() == 0 || !z_row.allFinite()) {
        throw std::domain_error("inverse clr needs a finite row");
    }
    const double m = z_row.maxCoeff();
    Eigen::ArrayXd e = (z_row.array() - m).exp();
    return (e / e.sum()).matrix();
}

Eigen::VectorXd recompose_deaths(const Eigen::VectorXd& composition,
                                 const GeometricMeans& means, double radix) {
    if (composition.size() != means.alpha.size()) {
        throw std::invalid_argument("composition and means differ in length");
    }
    Eigen::ArrayXd w = composition.array() * means.alpha.array();
    return (radix * w / w.sum()).matrix();
}

PcaBasis fit_pca(const Eigen::MatrixXd& z, int L) {
    const Eigen::Index n = z.rows();
    const Eigen::Index K = z.cols();
    if (L < 1 || L > std::min(n, K)) {
        throw std::invalid_argument("component count " + std::to_string(L) +
                                    " outside 1..min(n,K)");
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(z, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::MatrixXd U = svd.matrixU();
    Eigen::MatrixXd V = svd.matrixV();
    const Eigen::VectorXd sigma = svd.singularValues();

    PcaBasis out;
    out.L = L;
    out.eigenvalues = sigma.array().square();
    out.components.resize(L, K);
    out.scores.resize(n, L);
    for (int l = 0; l < L; ++l) {
        Eigen::VectorXd v = V.col(l);
        Eigen::VectorXd u = U.col(l);
        // Sign convention: largest-magnitude loading positive.
        Eigen::Index imax = 0;
        v.cwiseAbs().maxCoeff(&imax);
        if (v(imax) < 0.0) {
            v = -v;
            u = -u;
        }
        out.components.row(l) = v.transpose();
        out.scores.col(l) = u * sigma(l);
    }
    out.residuals = z - out.scores * out.components;
    return out;
}

PcaBasis fit_pca(const ClrMatrix& z, int L) { return fit_pca(z.z, L); }

int select_ncomp_cpv(const Eigen::VectorXd& eigenvalues, double delta) {
    if (!(delta > 0.0 && delta <= 1.0)) {
        throw std::invalid_argument("delta must lie in (0,1]");
    }
    if (eigenvalues.size() == 0) {
        throw std::invalid_argument("empty spectrum");
    }
    for (Eigen::Index i = 1; i < eigenvalues.size(); ++i) {
        if (eigenvalues(i) > eigenvalues(i - 1) + 1e-12 * std::abs(eigenvalues(0))) {
            throw std::invalid_argument("eigenvalues must be non-increasing");
        }
    }
    double total = 0.0;
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
        if (eigenvalues(i) > 0.0) {
            total += eigenvalues(i);
        }
    }
    if (total <= 0.0) {
        throw std::domain_error("all-zero spectrum");
    }
    double cum = 0.0;
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
        cum += std::max(eigenvalues(i), 0.0);
        if (cum / total >= delta) {
            return static_cast<int>(i) + 1;
        }
    }
    return static_cast<int>(eigenvalues.size());
}

double r_squared(const Eigen::MatrixXd& observed, const Eigen::MatrixXd& fitted) {
    if (observed.rows() != fitted.rows() || observed.cols() != fitted.cols()) {
        throw std::invalid_argument("observed and fitted matrices differ in shape");
    }
    const Eigen::RowVectorXd age_mean = observed.colwise().mean();
    const double ss_tot = (observed.rowwise() - age_mean).squaredNorm();
    if (ss_tot <= 0.0) {
        throw std::domain_error("constant observed matrix: R^2 undefined");
    }
    const double ss_res = (observed - fitted).squaredNorm();
    return 1.0 - ss_res / ss_tot;
}

} // namespace codamort
