#include "faa/archetypoids.hpp"

#include "faa/errors.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>

namespace faa {

std::string to_string(CandidateInit init) {
    switch (init) {
        case CandidateInit::nearest: return "cand_ns";
        case CandidateInit::max_alpha: return "cand_alpha";
        case CandidateInit::max_beta: return "cand_beta";
        case CandidateInit::explicit_set: return "explicit";
    }
    return "explicit";
}

namespace {

Matrix metric_coordinates(const Matrix& X, const std::optional<Matrix>& metric) {
    if (!metric) return X;
    if (metric->rows() != X.cols() || metric->cols() != X.cols())
        throw ArgumentError("metric has the wrong size");
    return X * cholesky_spd(*metric);
}

void check_indices(const std::vector<Index>& indices, Index n) {
    std::vector<char> seen(n, 0);
    for (Index i : indices) {
        if (i < 0 || i >= n) throw ArgumentError("archetypoid index out of range");
        if (seen[i]) throw ArgumentError("archetypoid indices must be distinct");
        seen[i] = 1;
    }
    if (indices.empty()) throw ArgumentError("at least one archetypoid is required");
}

// Walks each archetype's ranking in turn and takes the first observation
// not already chosen.
std::vector<Index> pick_distinct(int k, Index n, const std::function<double(int, Index)>& score) {
    std::vector<Index> chosen;
    std::vector<char> used(n, 0);
    std::vector<Index> order(n);
    for (int j = 0; j < k; ++j) {
        std::iota(order.begin(), order.end(), Index{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](Index a, Index b) { return score(j, a) > score(j, b); });
        for (Index i : order) {
            if (!used[i]) {
                used[i] = 1;
                chosen.push_back(i);
                break;
            }
        }
    }
    return chosen;
}

// RSS of every candidate set through cached cross products G = Xf Xf'.
class GramEvaluator {
public:
    GramEvaluator(const Matrix& Xf, const SolverOptions& solver)
        : G_(Xf * Xf.transpose()), solver_(solver) {}

    double rss(const std::vector<Index>& S) const {
        const auto k = static_cast<Index>(S.size());
        Matrix Gs(k, k);
        for (Index a = 0; a < k; ++a)
            for (Index b = 0; b < k; ++b) Gs(a, b) = G_(S[a], S[b]);
        const double H = effective_huge_weight(Gs.trace(), k, solver_);
        const Matrix Ga = Gs.array() + H * H;
        Vector c(k);
        double total = 0.0;
        for (Index i = 0; i < G_.rows(); ++i) {
            for (Index a = 0; a < k; ++a) c[a] = G_(S[a], i);
            Vector w;
            if (k == 1) {
                w = Vector::Ones(1);
            } else {
                w = nnls_gram(Ga, (c.array() + H * H).matrix(), solver_);
            }
            total += std::max(0.0, G_(i, i) - 2.0 * w.dot(c) + w.dot(Gs * w));
        }
        return total;
    }

    double rounding_floor() const {
        return 64.0 * std::numeric_limits<double>::epsilon() * G_.trace();
    }

private:
    Matrix G_;
    SolverOptions solver_;
};

}  // namespace

ADAModel evaluate_archetypoids(const Matrix& X, const std::vector<Index>& indices,
                               const std::optional<Matrix>& metric, const SolverOptions& solver) {
    check_indices(indices, X.rows());
    const Matrix Xf = metric_coordinates(X, metric);
    Matrix Z(static_cast<Index>(indices.size()), Xf.cols());
    for (std::size_t j = 0; j < indices.size(); ++j) Z.row(static_cast<Index>(j)) = Xf.row(indices[j]);
    ADAModel model;
    model.k = static_cast<int>(indices.size());
    model.indices = indices;
    model.alpha = solve_alpha(Xf, Z, solver);
    model.rss = rss(Xf, model.alpha, Z);
    return model;
}

std::vector<Index> build_candidates(const Matrix& X, const AAModel& aa, CandidateInit which,
                                    const std::optional<Matrix>& metric) {
    const Index n = X.rows();
    const int k = aa.k;
    if (aa.alpha.rows() != n || aa.beta.cols() != n || aa.archetypes.cols() != X.cols())
        throw ArgumentError("build_candidates: model does not match data");
    if (k > n) throw ArgumentError("build_candidates: k exceeds n");

    switch (which) {
        case CandidateInit::nearest: {
            const Matrix Xf = metric_coordinates(X, metric);
            const Matrix Zf = metric_coordinates(aa.archetypes, metric);
            return pick_distinct(k, n, [&](int j, Index i) {
                return -(Xf.row(i) - Zf.row(j)).squaredNorm();
            });
        }
        case CandidateInit::max_alpha:
            return pick_distinct(k, n, [&](int j, Index i) { return aa.alpha(i, j); });
        case CandidateInit::max_beta:
            return pick_distinct(k, n, [&](int j, Index i) { return aa.beta(j, i); });
        case CandidateInit::explicit_set: break;
    }
    throw ArgumentError("build_candidates: explicit sets are supplied by the caller");
}

ADAModel swap_optimize(const Matrix& X, const std::vector<Index>& init,
                       const std::optional<Matrix>& metric, const SwapOptions& opts) {
    const Index n = X.rows();
    check_indices(init, n);
    const Matrix Xf = metric_coordinates(X, metric);
    const GramEvaluator eval(Xf, opts.solver);

    std::vector<Index> S = init;
    std::vector<char> selected(n, 0);
    for (Index i : S) selected[i] = 1;
    double current = eval.rss(S);
    std::vector<double> trace{current};
    int steps = 0;

    for (;;) {
        std::vector<std::size_t> positions(S.size());
        std::iota(positions.begin(), positions.end(), std::size_t{0});
        std::sort(positions.begin(), positions.end(),
                  [&](std::size_t a, std::size_t b) { return S[a] < S[b]; });

        double best = current;
        std::size_t best_pos = 0;
        Index best_cand = -1;
        for (std::size_t pos : positions) {
            const Index out = S[pos];
            for (Index c = 0; c < n; ++c) {
                if (selected[c]) continue;
                S[pos] = c;
                const double v = eval.rss(S);
                if (v < best) {
                    best = v;
                    best_pos = pos;
                    best_cand = c;
                }
            }
            S[pos] = out;
        }
        if (best_cand < 0 || current - best <= opts.rel_tol * current + eval.rounding_floor()) break;
        selected[S[best_pos]] = 0;
        selected[best_cand] = 1;
        S[best_pos] = best_cand;
        current = best;
        trace.push_back(current);
        ++steps;
    }

    ADAModel model = evaluate_archetypoids(X, S, metric, opts.solver);
    model.swap_steps = steps;
    model.rss_trace = std::move(trace);
    return model;
}

ArchetypoidFit fit_archetypoids_detailed(const Matrix& X, int k, const FitOptions& opts,
                                         const std::optional<Matrix>& metric) {
    validate(opts);
    if (k < 1 || k > X.rows())
        throw ArgumentError("fit_archetypoids: k = " + std::to_string(k) + " outside [1, n]");

    Vector center, scale;
    const Matrix Xs = opts.standardize ? standardize_columns(X, center, scale) : X;
    FitOptions inner = opts;
    inner.standardize = false;

    ArchetypoidFit fit;
    fit.archetypes = fit_archetypes(Xs, k, inner, metric);
    SwapOptions swap;
    swap.solver = opts.solver;
    for (CandidateInit which :
         {CandidateInit::nearest, CandidateInit::max_alpha, CandidateInit::max_beta}) {
        ADAModel m = swap_optimize(Xs, build_candidates(Xs, fit.archetypes, which, metric), metric, swap);
        m.init_used = which;
        fit.per_init.push_back(std::move(m));
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < fit.per_init.size(); ++i)
        if (fit.per_init[i].rss < fit.per_init[best].rss) best = i;
    fit.best = fit.per_init[best];
    if (opts.standardize) {
        fit.archetypes.center = center;
        fit.archetypes.scale = scale;
        fit.archetypes.archetypes = fit.archetypes.beta * X;
    }
    return fit;
}

ADAModel fit_archetypoids(const Matrix& X, int k, const FitOptions& opts,
                          const std::optional<Matrix>& metric) {
    return fit_archetypoids_detailed(X, k, opts, metric).best;
}

}  // namespace faa
