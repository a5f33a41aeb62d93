#include "faa/linalg.hpp"

#include "faa/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace faa {

namespace {

// Active-set core shared by the QR and normal-equation front ends.
// `gradient(x)` returns T'(u - Tx); `solve(P)` returns the unconstrained
// least-squares solution restricted to the passive columns P.
template <class Gradient, class PassiveSolve>
Vector lawson_hanson(Index p, double grad_tol, int max_iters, Gradient&& gradient,
                     PassiveSolve&& solve) {
    Vector x = Vector::Zero(p);
    std::vector<char> passive(p, 0);
    Vector w = gradient(x);
    int iters = 0;

    auto passive_set = [&] {
        std::vector<Index> idx;
        for (Index j = 0; j < p; ++j)
            if (passive[j]) idx.push_back(j);
        return idx;
    };

    for (;;) {
        Index entering = -1;
        double wmax = grad_tol;
        for (Index j = 0; j < p; ++j) {
            if (!passive[j] && w[j] > wmax) {
                wmax = w[j];
                entering = j;
            }
        }
        if (entering < 0) break;
        if (++iters > max_iters) {
            throw IterationLimitError("nnls: no convergence after " + std::to_string(max_iters) +
                                          " active-set iterations",
                                      x);
        }
        passive[entering] = 1;

        bool moved = false;
        for (bool first = true;; first = false) {
            const std::vector<Index> P = passive_set();
            const Vector s = solve(P);
            const double stol =
                std::max(s.cwiseAbs().maxCoeff(), x.cwiseAbs().maxCoeff()) * 1e-14;

            if (first) {
                const auto pos = std::find(P.begin(), P.end(), entering) - P.begin();
                if (!(s[pos] > stol)) {
                    // Rounding put the entering variable at the bound; block it
                    // until x changes.
                    passive[entering] = 0;
                    w[entering] = 0.0;
                    break;
                }
            }

            bool feasible = true;
            for (Index i = 0; i < static_cast<Index>(P.size()); ++i)
                if (!(s[i] > stol)) feasible = false;
            if (feasible) {
                for (Index i = 0; i < static_cast<Index>(P.size()); ++i) x[P[i]] = s[i];
                moved = true;
                break;
            }

            double step = 1.0;
            for (Index i = 0; i < static_cast<Index>(P.size()); ++i) {
                if (!(s[i] > stol)) {
                    const double xi = x[P[i]];
                    step = std::min(step, xi / (xi - s[i]));
                }
            }
            for (Index i = 0; i < static_cast<Index>(P.size()); ++i) {
                const Index j = P[i];
                x[j] += step * (s[i] - x[j]);
                if (x[j] <= stol) {
                    x[j] = 0.0;
                    passive[j] = 0;
                }
            }
            moved = true;
        }
        if (moved) w = gradient(x);
    }
    return x;
}

int iteration_limit(const SolverOptions& opts, Index p) {
    return opts.max_active_set_iters > 0 ? opts.max_active_set_iters
                                         : static_cast<int>(3 * p);
}

void check_finite(const Matrix& T, const Vector& u, const char* who) {
    if (!T.allFinite() || !u.allFinite())
        throw DataError(std::string(who) + ": non-finite input");
}

}  // namespace

void validate(const SolverOptions& opts) {
    if (!(opts.huge_weight > 0)) throw ArgumentError("huge_weight must be positive");
    if (!(opts.zero_tolerance > 0)) throw ArgumentError("zero_tolerance must be positive");
    if (opts.max_active_set_iters < 0)
        throw ArgumentError("max_active_set_iters must be non-negative");
}

Vector nnls_solve(const Matrix& T, const Vector& u, const SolverOptions& opts) {
    validate(opts);
    if (T.rows() < 1 || T.cols() < 1) throw ArgumentError("nnls_solve: empty design");
    if (T.rows() != u.size()) throw ArgumentError("nnls_solve: shape mismatch");
    check_finite(T, u, "nnls_solve");

    const Index p = T.cols();
    const Vector Ttu = T.transpose() * u;
    const double scale = std::max(T.colwise().squaredNorm().maxCoeff(), Ttu.cwiseAbs().maxCoeff());
    const double grad_tol = opts.zero_tolerance * scale;

    auto gradient = [&](const Vector& x) -> Vector { return T.transpose() * (u - T * x); };
    auto solve = [&](const std::vector<Index>& P) -> Vector {
        Matrix Tp(T.rows(), static_cast<Index>(P.size()));
        for (Index i = 0; i < Tp.cols(); ++i) Tp.col(i) = T.col(P[i]);
        return Tp.colPivHouseholderQr().solve(u);
    };
    return lawson_hanson(p, grad_tol, iteration_limit(opts, p), gradient, solve);
}

Vector nnls_gram(const Matrix& G, const Vector& c, const SolverOptions& opts) {
    validate(opts);
    if (G.rows() < 1 || G.rows() != G.cols() || G.rows() != c.size())
        throw ArgumentError("nnls_gram: shape mismatch");
    check_finite(G, c, "nnls_gram");

    const Index p = G.cols();
    const double scale = std::max(G.diagonal().cwiseAbs().maxCoeff(), c.cwiseAbs().maxCoeff());
    const double grad_tol = opts.zero_tolerance * scale;

    auto gradient = [&](const Vector& x) -> Vector { return c - G * x; };
    auto solve = [&](const std::vector<Index>& P) -> Vector {
        const auto k = static_cast<Index>(P.size());
        Matrix Gp(k, k);
        Vector cp(k);
        for (Index i = 0; i < k; ++i) {
            cp[i] = c[P[i]];
            for (Index j = 0; j < k; ++j) Gp(i, j) = G(P[i], P[j]);
        }
        return Gp.colPivHouseholderQr().solve(cp);
    };
    return lawson_hanson(p, grad_tol, iteration_limit(opts, p), gradient, solve);
}

double effective_huge_weight(double frobenius_norm_sq, Index cols, const SolverOptions& opts) {
    const double rms = std::sqrt(frobenius_norm_sq / static_cast<double>(cols));
    return rms > 0 ? opts.huge_weight * rms : opts.huge_weight;
}

Vector simplex_ls(const Matrix& T, const Vector& u, const SolverOptions& opts) {
    if (T.rows() < 1 || T.cols() < 1 || T.rows() != u.size())
        throw ArgumentError("simplex_ls: shape mismatch");
    if (T.cols() == 1) return Vector::Ones(1);

    const double H = effective_huge_weight(T.squaredNorm(), T.cols(), opts);
    Matrix Ta(T.rows() + 1, T.cols());
    Ta.topRows(T.rows()) = T;
    Ta.row(T.rows()).setConstant(H);
    Vector ua(u.size() + 1);
    ua.head(u.size()) = u;
    ua[u.size()] = H;
    return nnls_solve(Ta, ua, opts);
}

Vector simplex_ls_gram(const Matrix& G, const Vector& c, const SolverOptions& opts) {
    if (G.rows() < 1 || G.rows() != G.cols() || G.rows() != c.size())
        throw ArgumentError("simplex_ls_gram: shape mismatch");
    if (G.cols() == 1) return Vector::Ones(1);

    const double H = effective_huge_weight(G.trace(), G.cols(), opts);
    const double H2 = H * H;
    Matrix Ga = G.array() + H2;
    Vector ca = c.array() + H2;
    return nnls_gram(Ga, ca, opts);
}

Matrix cholesky_spd(const Matrix& W) {
    if (W.rows() < 1 || W.rows() != W.cols()) throw ArgumentError("cholesky_spd: matrix not square");
    if (!W.allFinite()) throw DataError("cholesky_spd: non-finite input");
    const double scale = W.cwiseAbs().maxCoeff();
    if ((W - W.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw ArgumentError("cholesky_spd: matrix not symmetric");

    const Index m = W.rows();
    Matrix L = Matrix::Zero(m, m);
    for (Index j = 0; j < m; ++j) {
        double d = W(j, j) - L.row(j).head(j).squaredNorm();
        if (!(d > 0)) {
            throw NotPositiveDefiniteError(
                "cholesky_spd: non-positive pivot at index " + std::to_string(j), j);
        }
        L(j, j) = std::sqrt(d);
        for (Index i = j + 1; i < m; ++i) {
            L(i, j) = (W(i, j) - L.row(i).head(j).dot(L.row(j).head(j))) / L(j, j);
        }
    }
    return L;
}

}  // namespace faa
