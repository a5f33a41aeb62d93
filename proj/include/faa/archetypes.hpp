#pragma once

// Archetype analysis: X (n x m) ~ alpha * beta * X with simplex rows in
// alpha (n x k) and beta (k x n), fitted by alternating convex least squares.

#include "faa/linalg.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace faa {

struct FitOptions {
    int restarts = 10;
    int max_outer_iters = 100;
    double rel_tol = 1e-6;
    std::uint64_t seed = 0;
    /// Center and scale columns before fitting; RSS is then in standardized units.
    bool standardize = false;
    SolverOptions solver;
};

void validate(const FitOptions& opts);

/// Diagnostics for one alternating sweep of one restart.
struct SweepRecord {
    double rss = 0;
    double max_alpha_defect = 0;  ///< max |row sum - 1| over alpha
    double max_beta_defect = 0;
    double min_entry = 0;         ///< min over alpha and beta entries
    bool accepted = true;
};

struct AAModel {
    int k = 0;
    Matrix alpha;       ///< n x k
    Matrix beta;        ///< k x n
    Matrix archetypes;  ///< k x m, beta * X in the coordinates of the input X
    double rss = 0;     ///< in the fitting metric (standardized / W-weighted if requested)
    int iterations = 0;
    bool converged = false;
    int restart = 0;               ///< index of the winning restart
    std::vector<double> restart_rss;
    /// Per-sweep trace of every restart, in restart order.
    std::vector<std::vector<SweepRecord>> traces;
    /// Column centering and scaling applied before fitting (empty if none).
    Vector center, scale;
};

/// (X - center) / scale column-wise with the sample (n - 1) standard
/// deviation. Zero-variance columns keep scale 1.
Matrix standardize_columns(const Matrix& X, Vector& center, Vector& scale);

/// Best of opts.restarts alternating runs. With a metric M = L L' the norm
/// is the M-quadratic form, realized by fitting X L in the identity metric.
/// k = 1 returns the column mean directly.
AAModel fit_archetypes(const Matrix& X, int k, const FitOptions& opts = {},
                       const std::optional<Matrix>& metric = std::nullopt);

/// sum_i a_i' M a_i with a_i the i-th row of X - alpha Z (M = identity if absent).
double rss(const Matrix& X, const Matrix& alpha, const Matrix& Z,
           const std::optional<Matrix>& metric = std::nullopt);

struct ElbowRow {
    int k = 0;
    double rss = 0;
    bool converged = false;
    int restarts_used = 0;
    std::string error;  ///< non-empty if the fit for this k failed
};

using ElbowReport = std::vector<ElbowRow>;

ElbowReport elbow_scan(const Matrix& X, const std::vector<int>& ks, const FitOptions& opts = {},
                       const std::optional<Matrix>& metric = std::nullopt);

/// Simplex alpha rows for every observation given archetypes Z (k x m).
Matrix solve_alpha(const Matrix& X, const Matrix& Z, const SolverOptions& opts);

}  // namespace faa
