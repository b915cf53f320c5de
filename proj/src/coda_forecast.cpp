#include "codamort/coda_forecast.hpp"

#include "codamort/errors.hpp"
#include "codamort/rng.hpp"
#include "codamort/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace codamort {

UnivariateForecast forecast_scores(const ScoreForecaster& fc, int H) {
    if (const auto* ets = std::get_if<EtsFit>(&fc)) {
        return forecast_ets(*ets, H);
    }
    return forecast_rw(std::get<RwFit>(fc), H);
}

Eigen::MatrixXd CodaModel::fitted_deaths() const {
    const Eigen::MatrixXd z_fit = basis.scores * basis.components;
    Eigen::MatrixXd out(z_fit.rows(), z_fit.cols());
    for (Eigen::Index t = 0; t < z_fit.rows(); ++t) {
        out.row(t) =
            recompose_deaths(inverse_clr(z_fit.row(t).transpose()), means, radix).transpose();
    }
    return out;
}

CodaModel fit_coda(const DeathGrid& grid, NcompMode ncomp, ForecasterKind forecaster) {
    CodaModel model;
    model.means = geometric_means(grid);
    model.radix = grid.radix;
    model.ncomp_mode = ncomp;
    model.years = grid.years;

    const ClrMatrix clr = clr_transform(grid, model.means);
    const int max_L = static_cast<int>(std::min(clr.z.rows(), clr.z.cols()));

    int L = 1;
    if (ncomp.kind == NcompMode::Kind::Cpv) {
        // A grid whose rows are all proportional to the geometric means has a
        // zero clr matrix; one component of the (zero) basis reproduces it.
        Eigen::BDCSVD<Eigen::MatrixXd> svd(clr.z);
        const Eigen::VectorXd eig = svd.singularValues().array().square();
        L = (eig.sum() > 0.0) ? select_ncomp_cpv(eig, ncomp.delta) : 1;
    } else {
        if (ncomp.fixed < 1) {
            throw std::invalid_argument("fixed component count must be >= 1");
        }
        L = std::min(ncomp.fixed, max_L);
    }
    model.basis = fit_pca(clr, L);

    for (int l = 0; l < L; ++l) {
        const Eigen::VectorXd col = model.basis.scores.col(l);
        std::vector<double> series(col.data(), col.data() + col.size());
        switch (forecaster) {
        case ForecasterKind::Ets:
            model.score_forecasters.emplace_back(fit_ets_auto(series));
            break;
        case ForecasterKind::RandomWalk:
            model.score_forecasters.emplace_back(fit_rw(series, false));
            break;
        case ForecasterKind::RandomWalkDrift:
            model.score_forecasters.emplace_back(fit_rw(series, true));
            break;
        }
    }
    return model;
}

Eigen::MatrixXd point_forecast(const CodaModel& model, int H) {
    if (H < 1) {
        throw std::invalid_argument("horizon must be >= 1");
    }
    const int K = model.n_ages();
    std::vector<UnivariateForecast> fcs;
    fcs.reserve(model.score_forecasters.size());
    for (const auto& fc : model.score_forecasters) {
        fcs.push_back(forecast_scores(fc, H));
    }
    Eigen::MatrixXd out(H, K);
    for (int h = 1; h <= H; ++h) {
        Eigen::VectorXd z = Eigen::VectorXd::Zero(K);
        for (int l = 0; l < model.L(); ++l) {
            z += fcs[l].mean[h - 1] * model.basis.components.row(l).transpose();
        }
        out.row(h - 1) = recompose_deaths(inverse_clr(z), model.means, model.radix).transpose();
    }
    return out;
}

BootstrapForecast bootstrap_forecast(const CodaModel& model, int H, int B,
                                     std::uint64_t seed, BootstrapOptions opts) {
    if (H < 1 || B < 1) {
        throw std::invalid_argument("need H >= 1 and B >= 1");
    }
    const int K = model.n_ages();
    const int L = model.L();
    const Eigen::Index n = model.basis.residuals.rows();

    std::vector<UnivariateForecast> fcs;
    for (const auto& fc : model.score_forecasters) {
        fcs.push_back(forecast_scores(fc, H));
    }
    for (int l = 0; l < L; ++l) {
        for (int h = 1; h <= H; ++h) {
            if (fcs[l].insample_errors[h - 1].empty()) {
                throw std::invalid_argument("empty forecast-error pool at horizon " +
                                            std::to_string(h));
            }
        }
    }

    BootstrapForecast boot;
    boot.horizon = H;
    boot.replicates = B;
    boot.samples.assign(H, Eigen::MatrixXd(B, K));

    for (int b = 0; b < B; ++b) {
        std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(b)));
        for (int h = 1; h <= H; ++h) {
            Eigen::VectorXd z = Eigen::VectorXd::Zero(K);
            for (int l = 0; l < L; ++l) {
                const auto& pool = fcs[l].insample_errors[h - 1];
                const double err = pool[uniform_index(rng, pool.size())];
                z += (fcs[l].mean[h - 1] + err) * model.basis.components.row(l).transpose();
            }
            if (opts.sample_residual_rows) {
                z += model.basis.residuals.row(uniform_index(rng, n)).transpose();
            } else {
                for (int x = 0; x < K; ++x) {
                    z(x) += model.basis.residuals(uniform_index(rng, n), x);
                }
            }
            boot.samples[h - 1].row(b) =
                recompose_deaths(inverse_clr(z), model.means, model.radix).transpose();
        }
    }
    return boot;
}

std::vector<IntervalBand> prediction_intervals(const std::vector<Eigen::MatrixXd>& samples,
                                               const std::vector<double>& gammas) {
    for (double g : gammas) {
        if (!(g > 0.0 && g < 1.0)) {
            throw std::invalid_argument("gamma must lie in (0,1)");
        }
    }
    const int H = static_cast<int>(samples.size());
    std::vector<IntervalBand> bands(gammas.size());
    if (H == 0) {
        return bands;
    }
    const Eigen::Index K = samples[0].cols();
    for (auto& band : bands) {
        band.lower.resize(H, K);
        band.upper.resize(H, K);
    }
    std::vector<double> cell;
    for (int h = 0; h < H; ++h) {
        const Eigen::Index B = samples[h].rows();
        for (Eigen::Index x = 0; x < K; ++x) {
            cell.assign(samples[h].col(x).data(), samples[h].col(x).data() + B);
            std::sort(cell.begin(), cell.end());
            for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
                bands[gi].lower(h, x) = quantile_type7_sorted(cell, gammas[gi] / 2.0);
                bands[gi].upper(h, x) = quantile_type7_sorted(cell, 1.0 - gammas[gi] / 2.0);
            }
        }
    }
    return bands;
}

IntervalBand prediction_interval(const BootstrapForecast& boot, double gamma) {
    return prediction_intervals(boot.samples, {gamma}).front();
}

} // namespace codamort
