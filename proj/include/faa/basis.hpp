#pragma once

// Fourier and B-spline basis systems on an interval [a, b].

#include "faa/linalg.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace faa {

enum class BasisKind { fourier, bspline };

std::string to_string(BasisKind kind);
BasisKind basis_kind_from_string(const std::string& name);

class BasisSpec {
public:
    /// Orthonormal Fourier system: 1/sqrt(P), then sqrt(2/P) sin and cos of
    /// each harmonic in that order, P = period (default b - a). An even size
    /// ends on a sine term.
    static BasisSpec fourier(double a, double b, int size, std::optional<double> period = {});

    /// Clamped B-splines with size - order equally spaced interior knots.
    static BasisSpec bspline(double a, double b, int size, int order = 4);

    /// Clamped B-splines over the given interior knots (nondecreasing, inside (a, b)).
    static BasisSpec bspline_with_knots(double a, double b, std::vector<double> interior, int order);

    BasisKind kind() const { return kind_; }
    int size() const { return size_; }
    double lower() const { return a_; }
    double upper() const { return b_; }
    int order() const { return order_; }
    double period() const { return period_; }
    /// Interior knots only (B-splines); the clamped ends are implied.
    const std::vector<double>& interior_knots() const { return interior_; }
    /// Full clamped knot vector: a repeated order times, interior, b repeated order times.
    std::vector<double> knot_vector() const;

    bool contains(double t) const { return t >= a_ && t <= b_; }

    /// (B_1(t), ..., B_m(t)); throws DomainError outside [a, b].
    Vector evaluate(double t) const;

    /// Rows are evaluate(t) for each t.
    Matrix design(std::span<const double> ts) const;

    bool operator==(const BasisSpec&) const = default;

private:
    BasisSpec() = default;

    BasisKind kind_ = BasisKind::fourier;
    int size_ = 0;
    double a_ = 0, b_ = 1;
    int order_ = 0;
    double period_ = 1;
    std::vector<double> interior_;
};

struct GramMatrix {
    Matrix values;
    BasisSpec basis;
};

struct SampledCurve {
    std::string id;
    std::vector<double> t;
    std::vector<double> y;
};

/// Checks lengths, finiteness and strictly increasing arguments.
void validate(const SampledCurve& curve);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// W[i][j] = integral of B_i B_j over [a, b]. Identity for a Fourier basis
/// whose period equals the domain length; per-span Gauss-Legendre otherwise.
GramMatrix gram_matrix(const BasisSpec& spec);

/// Least-squares coefficients of a sampled curve. Throws
/// UnderdeterminedFitError (naming the curve) if the design is rank deficient.
Vector fit_coefficients(const BasisSpec& spec, const SampledCurve& curve);

/// Least-squares coefficients for values sampled on a shared grid; one
/// column of `values` per curve. Same error contract as fit_coefficients.
Matrix fit_coefficients_on_grid(const BasisSpec& spec, std::span<const double> grid,
                                const Matrix& values);

std::vector<double> evaluate_curve(const BasisSpec& spec, const Vector& coefficients,
                                   std::span<const double> grid);

/// n equally spaced points from a to b inclusive.
std::vector<double> linspace(double a, double b, int n);

}  // namespace faa
