#include "faa/basis.hpp"

#include "faa/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace faa {

std::string to_string(BasisKind kind) {
    return kind == BasisKind::fourier ? "fourier" : "bspline";
}

BasisKind basis_kind_from_string(const std::string& name) {
    if (name == "fourier") return BasisKind::fourier;
    if (name == "bspline") return BasisKind::bspline;
    throw ArgumentError("unknown basis kind '" + name + "' (expected fourier or bspline)");
}

namespace {

void check_domain(double a, double b) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b))
        throw ArgumentError("basis domain must satisfy a < b");
}

std::string format_point(double t) {
    std::ostringstream os;
    os.precision(17);
    os << t;
    return os.str();
}

}  // namespace

BasisSpec BasisSpec::fourier(double a, double b, int size, std::optional<double> period) {
    check_domain(a, b);
    if (size < 1) throw ArgumentError("fourier basis needs at least one function");
    BasisSpec s;
    s.kind_ = BasisKind::fourier;
    s.size_ = size;
    s.a_ = a;
    s.b_ = b;
    s.period_ = period.value_or(b - a);
    if (!(s.period_ > 0) || !std::isfinite(s.period_))
        throw ArgumentError("fourier period must be positive");
    return s;
}

BasisSpec BasisSpec::bspline(double a, double b, int size, int order) {
    check_domain(a, b);
    if (order < 1) throw ArgumentError("bspline order must be >= 1");
    if (size < order) throw ArgumentError("bspline size must be >= order");
    const int n_interior = size - order;
    std::vector<double> interior(n_interior);
    for (int i = 0; i < n_interior; ++i)
        interior[i] = a + (b - a) * static_cast<double>(i + 1) / static_cast<double>(n_interior + 1);
    return bspline_with_knots(a, b, std::move(interior), order);
}

BasisSpec BasisSpec::bspline_with_knots(double a, double b, std::vector<double> interior,
                                        int order) {
    check_domain(a, b);
    if (order < 1) throw ArgumentError("bspline order must be >= 1");
    for (std::size_t i = 0; i < interior.size(); ++i) {
        if (!(interior[i] > a && interior[i] < b))
            throw ArgumentError("interior knots must lie strictly inside (a, b)");
        if (i > 0 && interior[i] < interior[i - 1])
            throw ArgumentError("interior knots must be nondecreasing");
    }
    // Multiplicity above order would disconnect the basis.
    for (std::size_t i = 0, run = 1; i + 1 < interior.size(); ++i) {
        run = interior[i + 1] == interior[i] ? run + 1 : 1;
        if (static_cast<int>(run) > order) throw ArgumentError("knot multiplicity exceeds order");
    }
    BasisSpec s;
    s.kind_ = BasisKind::bspline;
    s.size_ = static_cast<int>(interior.size()) + order;
    s.a_ = a;
    s.b_ = b;
    s.order_ = order;
    s.period_ = b - a;
    s.interior_ = std::move(interior);
    return s;
}

std::vector<double> BasisSpec::knot_vector() const {
    std::vector<double> U;
    U.reserve(interior_.size() + 2 * order_);
    U.insert(U.end(), order_, a_);
    U.insert(U.end(), interior_.begin(), interior_.end());
    U.insert(U.end(), order_, b_);
    return U;
}

namespace {

// Nonzero B-spline values at t (Cox-de Boor, triangular form). Returns the
// span index i; values[r] belongs to basis function i - degree + r.
Index bspline_local(const std::vector<double>& U, int order, int size, double t,
                    std::vector<double>& values) {
    const int p = order - 1;
    Index span;
    if (t >= U[size]) {
        span = size - 1;
    } else {
        span = std::upper_bound(U.begin() + p, U.begin() + size + 1, t) - U.begin() - 1;
    }
    values.assign(order, 0.0);
    std::vector<double> left(order), right(order);
    values[0] = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = t - U[span + 1 - j];
        right[j] = U[span + j] - t;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double temp = values[r] / (right[r + 1] + left[j - r]);
            values[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        values[j] = saved;
    }
    return span;
}

void fourier_values(double a, double period, int size, double t, double* out) {
    const double c0 = 1.0 / std::sqrt(period);
    const double c1 = std::sqrt(2.0 / period);
    out[0] = c0;
    for (int h = 1; 2 * h - 1 < size; ++h) {
        const double w = 2.0 * std::numbers::pi * h * (t - a) / period;
        out[2 * h - 1] = c1 * std::sin(w);
        if (2 * h < size) out[2 * h] = c1 * std::cos(w);
    }
}

}  // namespace

Vector BasisSpec::evaluate(double t) const {
    if (!contains(t))
        throw DomainError("basis evaluation point " + format_point(t) + " outside [" +
                          format_point(a_) + ", " + format_point(b_) + "]");
    Vector out = Vector::Zero(size_);
    if (kind_ == BasisKind::fourier) {
        fourier_values(a_, period_, size_, t, out.data());
    } else {
        const auto U = knot_vector();
        std::vector<double> local;
        const Index span = bspline_local(U, order_, size_, t, local);
        for (int r = 0; r < order_; ++r) out[span - (order_ - 1) + r] = local[r];
    }
    return out;
}

Matrix BasisSpec::design(std::span<const double> ts) const {
    Matrix D(static_cast<Index>(ts.size()), size_);
    for (std::size_t i = 0; i < ts.size(); ++i) D.row(static_cast<Index>(i)) = evaluate(ts[i]).transpose();
    return D;
}

void validate(const SampledCurve& curve) {
    if (curve.t.size() != curve.y.size())
        throw DataError("curve '" + curve.id + "': argument and value counts differ");
    for (std::size_t i = 0; i < curve.t.size(); ++i) {
        if (!std::isfinite(curve.t[i]) || !std::isfinite(curve.y[i]))
            throw DataError("curve '" + curve.id + "': non-finite sample");
        if (i > 0 && !(curve.t[i] > curve.t[i - 1]))
            throw DataError("curve '" + curve.id + "': arguments not strictly increasing");
    }
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 1) throw ArgumentError("gauss_legendre: n must be >= 1");
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

GramMatrix gram_matrix(const BasisSpec& spec) {
    const int m = spec.size();
    Matrix W = Matrix::Zero(m, m);

    if (spec.kind() == BasisKind::fourier) {
        if (spec.period() == spec.upper() - spec.lower()) return {Matrix::Identity(m, m), spec};
        // Non-matching period: composite Gauss-Legendre on smooth integrands.
        std::vector<double> x, w;
        gauss_legendre(12, x, w);
        const int panels = 64 * (1 + m / 2);
        const double h = (spec.upper() - spec.lower()) / panels;
        Vector v(m);
        for (int p = 0; p < panels; ++p) {
            const double lo = spec.lower() + p * h;
            for (std::size_t q = 0; q < x.size(); ++q) {
                const double t = std::clamp(lo + 0.5 * h * (x[q] + 1.0), spec.lower(), spec.upper());
                fourier_values(spec.lower(), spec.period(), m, t, v.data());
                W.noalias() += (0.5 * h * w[q]) * v * v.transpose();
            }
        }
    } else {
        // order nodes per span integrate the degree 2(order-1) products exactly.
        const auto U = spec.knot_vector();
        const int order = spec.order();
        std::vector<double> x, w, local;
        gauss_legendre(order, x, w);
        for (int s = order - 1; s < m; ++s) {
            const double lo = U[s], hi = U[s + 1];
            if (!(hi > lo)) continue;
            for (int q = 0; q < order; ++q) {
                const double t = lo + 0.5 * (hi - lo) * (x[q] + 1.0);
                const Index span = bspline_local(U, order, m, t, local);
                const Index first = span - (order - 1);
                const double wt = 0.5 * (hi - lo) * w[q];
                for (int r = 0; r < order; ++r)
                    for (int c = 0; c < order; ++c) W(first + r, first + c) += wt * local[r] * local[c];
            }
        }
    }
    // Exact symmetry.
    const Matrix upper = W.triangularView<Eigen::Upper>();
    W = upper;
    W.triangularView<Eigen::StrictlyLower>() = upper.transpose();
    return {W, spec};
}

namespace {

Matrix solve_design(const BasisSpec& spec, const Matrix& D, const Matrix& Y, const std::string& who) {
    if (D.rows() < spec.size()) {
        throw UnderdeterminedFitError("curve '" + who + "': " + std::to_string(D.rows()) +
                                      " points for " + std::to_string(spec.size()) +
                                      " basis functions");
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(D);
    qr.setThreshold(1e-10);
    if (qr.rank() < spec.size()) {
        throw UnderdeterminedFitError("curve '" + who + "': rank-deficient basis design (rank " +
                                      std::to_string(qr.rank()) + " < " +
                                      std::to_string(spec.size()) + ")");
    }
    return qr.solve(Y);
}

}  // namespace

Vector fit_coefficients(const BasisSpec& spec, const SampledCurve& curve) {
    validate(curve);
    const Matrix D = spec.design(curve.t);
    const Vector y = Eigen::Map<const Vector>(curve.y.data(), static_cast<Index>(curve.y.size()));
    return solve_design(spec, D, y, curve.id);
}

Matrix fit_coefficients_on_grid(const BasisSpec& spec, std::span<const double> grid,
                                const Matrix& values) {
    if (values.rows() != static_cast<Index>(grid.size()))
        throw ArgumentError("fit_coefficients_on_grid: grid and value rows differ");
    return solve_design(spec, spec.design(grid), values, "<grid>");
}

std::vector<double> evaluate_curve(const BasisSpec& spec, const Vector& coefficients,
                                   std::span<const double> grid) {
    if (coefficients.size() != spec.size())
        throw ArgumentError("evaluate_curve: coefficient count does not match basis size");
    std::vector<double> out;
    out.reserve(grid.size());
    for (double t : grid) out.push_back(spec.evaluate(t).dot(coefficients));
    return out;
}

std::vector<double> linspace(double a, double b, int n) {
    if (n < 1) return {};
    if (n == 1) return {a};
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = a + (b - a) * static_cast<double>(i) / (n - 1);
    g.back() = b;
    return g;
}

}  // namespace faa
