#include "faa/archetypes.hpp"

#include "faa/errors.hpp"
#include "faa/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace faa {

void validate(const FitOptions& opts) {
    if (opts.restarts < 1) throw ArgumentError("restarts must be >= 1");
    if (opts.max_outer_iters < 1) throw ArgumentError("max_outer_iters must be >= 1");
    if (!(opts.rel_tol > 0)) throw ArgumentError("rel_tol must be positive");
    validate(opts.solver);
}

Matrix standardize_columns(const Matrix& X, Vector& center, Vector& scale) {
    const Index n = X.rows();
    center = X.colwise().mean().transpose();
    scale = Vector::Ones(X.cols());
    Matrix out = X.rowwise() - center.transpose();
    if (n > 1) {
        for (Index j = 0; j < X.cols(); ++j) {
            const double sd = std::sqrt(out.col(j).squaredNorm() / static_cast<double>(n - 1));
            if (sd > 0) scale[j] = sd;
        }
    }
    return out.array().rowwise() / scale.transpose().array();
}

Matrix solve_alpha(const Matrix& X, const Matrix& Z, const SolverOptions& opts) {
    const Matrix T = Z.transpose();
    Matrix alpha(X.rows(), Z.rows());
    for (Index i = 0; i < X.rows(); ++i)
        alpha.row(i) = simplex_ls(T, X.row(i).transpose(), opts).transpose();
    return alpha;
}

double rss(const Matrix& X, const Matrix& alpha, const Matrix& Z, const std::optional<Matrix>& metric) {
    if (alpha.rows() != X.rows() || alpha.cols() != Z.rows() || Z.cols() != X.cols())
        throw ArgumentError("rss: shape mismatch");
    const Matrix A = X - alpha * Z;
    if (!metric) return A.squaredNorm();
    if (metric->rows() != X.cols() || metric->cols() != X.cols())
        throw ArgumentError("rss: metric has the wrong size");
    return (A * *metric).cwiseProduct(A).sum();
}

namespace {

double max_row_defect(const Matrix& M) {
    return (M.rowwise().sum().array() - 1.0).abs().maxCoeff();
}

SweepRecord record(double value, const Matrix& alpha, const Matrix& beta, bool accepted) {
    return {value, max_row_defect(alpha), max_row_defect(beta),
            std::min(alpha.minCoeff(), beta.minCoeff()), accepted};
}

// Least-squares archetypes given alpha. An archetype nobody uses is moved
// to the observation with the largest residual.
Matrix ideal_archetypes(const Matrix& X, const Matrix& alpha, const Matrix& Z) {
    Matrix ideal = alpha.colPivHouseholderQr().solve(X);
    const Vector usage = alpha.colwise().squaredNorm().transpose();
    if ((usage.array() < 1e-8).any()) {
        const Vector resid = (X - alpha * Z).rowwise().squaredNorm();
        Index worst = 0;
        resid.maxCoeff(&worst);
        for (Index j = 0; j < alpha.cols(); ++j)
            if (usage[j] < 1e-8) ideal.row(j) = X.row(worst);
    }
    return ideal;
}

struct Run {
    Matrix alpha, beta;
    double rss = 0;
    int iterations = 0;
    bool converged = false;
    std::vector<SweepRecord> trace;
};

Run run_once(const Matrix& X, int k, const std::vector<Index>& init, const FitOptions& opts) {
    const Index n = X.rows();
    const Matrix Xt = X.transpose();
    Run run;
    run.beta = Matrix::Zero(k, n);
    for (int j = 0; j < k; ++j) run.beta(j, init[j]) = 1.0;
    Matrix Z = run.beta * X;
    run.alpha = solve_alpha(X, Z, opts.solver);
    run.rss = rss(X, run.alpha, Z);
    run.trace.push_back(record(run.rss, run.alpha, run.beta, true));

    for (int it = 0; it < opts.max_outer_iters; ++it) {
        const Matrix ideal = ideal_archetypes(X, run.alpha, Z);
        Matrix beta(k, n);
        for (int j = 0; j < k; ++j)
            beta.row(j) = simplex_ls(Xt, ideal.row(j).transpose(), opts.solver).transpose();
        const Matrix Znew = beta * X;
        const Matrix alpha = solve_alpha(X, Znew, opts.solver);
        const double value = rss(X, alpha, Znew);

        if (value > run.rss) {
            run.trace.push_back(record(value, alpha, beta, false));
            run.converged = true;
            break;
        }
        const double gain = run.rss - value;
        run.alpha = alpha;
        run.beta = beta;
        Z = Znew;
        run.rss = value;
        run.iterations = it + 1;
        run.trace.push_back(record(value, alpha, beta, true));
        if (gain <= opts.rel_tol * value || value == 0) {
            run.converged = true;
            break;
        }
    }
    return run;
}

}  // namespace

AAModel fit_archetypes(const Matrix& X, int k, const FitOptions& opts,
                       const std::optional<Matrix>& metric) {
    validate(opts);
    const Index n = X.rows();
    if (n < 1 || X.cols() < 1) throw ArgumentError("fit_archetypes: empty data matrix");
    if (k < 1) throw ArgumentError("fit_archetypes: k must be >= 1");
    if (k > n)
        throw ArgumentError("fit_archetypes: k = " + std::to_string(k) + " exceeds n = " +
                            std::to_string(n));
    if (!X.allFinite()) throw DataError("fit_archetypes: non-finite data");

    AAModel model;
    model.k = k;
    Matrix Xfit = X;
    if (opts.standardize) Xfit = standardize_columns(X, model.center, model.scale);
    if (metric) {
        if (metric->rows() != X.cols() || metric->cols() != X.cols())
            throw ArgumentError("fit_archetypes: metric has the wrong size");
        Xfit = Xfit * cholesky_spd(*metric);
    }

    if (k == 1) {
        model.alpha = Matrix::Ones(n, 1);
        model.beta = Matrix::Constant(1, n, 1.0 / static_cast<double>(n));
        model.archetypes = X.colwise().mean();
        model.rss = rss(Xfit, model.alpha, model.beta * Xfit);
        model.converged = true;
        model.restart_rss = {model.rss};
        model.traces = {{record(model.rss, model.alpha, model.beta, true)}};
        return model;
    }

    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < opts.restarts; ++r) {
        SplitMix64 rng(stream_seed(opts.seed, static_cast<std::uint64_t>(r)));
        const auto init = sample_without_replacement(rng, n, k);
        Run run = run_once(Xfit, k, init, opts);
        model.restart_rss.push_back(run.rss);
        model.traces.push_back(run.trace);
        if (run.rss < best) {
            best = run.rss;
            model.alpha = std::move(run.alpha);
            model.beta = std::move(run.beta);
            model.rss = run.rss;
            model.iterations = run.iterations;
            model.converged = run.converged;
            model.restart = r;
        }
    }
    model.archetypes = model.beta * X;
    return model;
}

ElbowReport elbow_scan(const Matrix& X, const std::vector<int>& ks, const FitOptions& opts,
                       const std::optional<Matrix>& metric) {
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (ks[i] < 1 || ks[i] > X.rows())
            throw ArgumentError("elbow_scan: k = " + std::to_string(ks[i]) + " outside [1, n]");
        if (i > 0 && ks[i] <= ks[i - 1]) throw ArgumentError("elbow_scan: ks must be strictly increasing");
    }
    ElbowReport report;
    for (int k : ks) {
        ElbowRow row;
        row.k = k;
        row.restarts_used = k == 1 ? 1 : opts.restarts;
        try {
            const AAModel m = fit_archetypes(X, k, opts, metric);
            row.rss = m.rss;
            row.converged = m.converged;
        } catch (const Error& e) {
            row.rss = std::numeric_limits<double>::quiet_NaN();
            row.error = e.what();
        }
        report.push_back(row);
    }
    return report;
}

}  // namespace faa
