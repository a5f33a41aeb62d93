#include "faa/basis.hpp"
#include "faa/errors.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <numbers>

using faa::BasisSpec;
using faa::Matrix;
using faa::Vector;

TEST(Basis, BsplinePartitionOfUnityAndNonnegative) {
    for (int order : {1, 2, 3, 4, 5}) {
        const auto spec = BasisSpec::bspline(-1.0, 2.0, order + 6, order);
        for (double t : faa::linspace(-1, 2, 301)) {
            const Vector b = spec.evaluate(t);
            EXPECT_GE(b.minCoeff(), 0.0);
            EXPECT_NEAR(b.sum(), 1.0, 1e-12) << "order " << order << " t " << t;
        }
    }
}

TEST(Basis, HatFunctionsByHand) {
    const auto spec = BasisSpec::bspline_with_knots(0, 1, {0.5}, 2);
    const Vector b = spec.evaluate(0.25);
    ASSERT_EQ(b.size(), 3);
    EXPECT_NEAR(b[0], 0.5, 1e-15);
    EXPECT_NEAR(b[1], 0.5, 1e-15);
    EXPECT_NEAR(b[2], 0.0, 1e-15);
}

TEST(Basis, MatchesRecursiveCoxDeBoor) {
    const std::vector<std::vector<double>> knot_sets = {{}, {0.3}, {0.1, 0.5, 0.55, 0.9}, {0.4, 0.4}};
    for (int order : {2, 3, 4}) {
        for (const auto& interior : knot_sets) {
            const auto spec = BasisSpec::bspline_with_knots(0, 1, interior, order);
            const auto knots = spec.knot_vector();
            for (double t : faa::linspace(0, 1, 97)) {
                const Vector b = spec.evaluate(t);
                for (int i = 0; i < spec.size(); ++i)
                    EXPECT_NEAR(b[i], oracle::cox_de_boor(knots, i, order, t), 1e-13)
                        << "order " << order << " i " << i << " t " << t;
            }
        }
    }
}

TEST(Basis, FourierConstantTermAndOrthonormality) {
    const auto spec = BasisSpec::fourier(2.0, 5.0, 7);
    EXPECT_NEAR(spec.evaluate(3.3)[0], 1 / std::sqrt(3.0), 1e-15);
    const Matrix W = faa::gram_matrix(spec).values;
    EXPECT_EQ(W, Matrix::Identity(7, 7));
    // Coefficient inner products equal L2 inner products.
    for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 7; ++j) {
            const double ip = oracle::trapezoid(
                [&](double t) { return spec.evaluate(t)[i] * spec.evaluate(t)[j]; }, 2, 5, 20000);
            EXPECT_NEAR(ip, i == j ? 1.0 : 0.0, 1e-10);
        }
}

TEST(Basis, FourierEvenSizeEndsOnSine) {
    const auto spec = BasisSpec::fourier(0, 12, 12);
    const double P = 12;
    const double t = 1.7;
    const Vector b = spec.evaluate(t);
    EXPECT_NEAR(b[11], std::sqrt(2 / P) * std::sin(2 * std::numbers::pi * 6 * t / P), 1e-14);
    EXPECT_NEAR(b[10], std::sqrt(2 / P) * std::cos(2 * std::numbers::pi * 5 * t / P), 1e-14);
}

TEST(Basis, FourierWithOtherPeriodIsNotIdentity) {
    const auto spec = BasisSpec::fourier(0, 1, 5, 2.0);
    const Matrix W = faa::gram_matrix(spec).values;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            const double ip = oracle::trapezoid(
                [&](double t) { return spec.evaluate(t)[i] * spec.evaluate(t)[j]; }, 0, 1, 100000);
            EXPECT_NEAR(W(i, j), ip, 1e-8);
        }
}

TEST(Basis, DomainErrors) {
    const auto spec = BasisSpec::bspline(0, 1, 6);
    EXPECT_THROW(spec.evaluate(1.0 + 1e-9), faa::DomainError);
    EXPECT_THROW(spec.evaluate(-0.1), faa::DomainError);
    EXPECT_NO_THROW(spec.evaluate(1.0));
    EXPECT_THROW(BasisSpec::bspline(1, 0, 6), faa::ArgumentError);
    EXPECT_THROW(BasisSpec::bspline(0, 1, 3, 4), faa::ArgumentError);
    EXPECT_THROW(BasisSpec::fourier(0, 1, 0), faa::ArgumentError);
}

TEST(Gram, SymmetricPsdAndIntegratesToLength) {
    for (int order : {1, 2, 4}) {
        for (int m : {order, order + 3, 12}) {
            const auto spec = BasisSpec::bspline(-2, 3, m, order);
            const Matrix W = faa::gram_matrix(spec).values;
            EXPECT_EQ(W, W.transpose());
            EXPECT_NEAR(W.sum(), 5.0, 1e-10);
            Eigen::SelfAdjointEigenSolver<Matrix> es(W);
            EXPECT_GT(es.eigenvalues().minCoeff(), -1e-12);
        }
    }
}

TEST(Gram, CholeskyReconstructsEightCubicSplines) {
    const Matrix W = faa::gram_matrix(BasisSpec::bspline(0, 1, 8)).values;
    const Matrix L = faa::cholesky_spd(W);
    EXPECT_LE((L * L.transpose() - W).norm(), 1e-10);
}

TEST(Fit, ConstantGivesUnitCoefficients) {
    const auto spec = BasisSpec::bspline(0, 10, 9);
    faa::SampledCurve c{"one", faa::linspace(0, 10, 40), std::vector<double>(40, 1.0)};
    const Vector b = faa::fit_coefficients(spec, c);
    EXPECT_LE((b - Vector::Ones(9)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Fit, SineInTwelveTermFourier) {
    const auto spec = BasisSpec::fourier(0, 3, 12);
    faa::SampledCurve c{"sine", {}, {}};
    for (int i = 0; i < 50; ++i) {
        const double t = 3.0 * i / 50;
        c.t.push_back(t);
        c.y.push_back(std::sin(2 * std::numbers::pi * t / 3));
    }
    const auto back = faa::evaluate_curve(spec, faa::fit_coefficients(spec, c), c.t);
    for (std::size_t i = 0; i < c.t.size(); ++i) EXPECT_NEAR(back[i], c.y[i], 1e-10);
}

TEST(Fit, CubicsReproducedForAnyKnots) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> U(0.05, 0.95);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> knots(5);
        for (auto& k : knots) k = U(rng);
        std::sort(knots.begin(), knots.end());
        const auto spec = BasisSpec::bspline_with_knots(0, 1, knots, 4);
        faa::SampledCurve c{"cubic", faa::linspace(0, 1, 60), {}};
        for (double t : c.t) c.y.push_back(2 - t + 3 * t * t - 4 * t * t * t);
        const auto back = faa::evaluate_curve(spec, faa::fit_coefficients(spec, c), c.t);
        for (std::size_t i = 0; i < c.t.size(); ++i) EXPECT_NEAR(back[i], c.y[i], 1e-9);
    }
}

TEST(Fit, UnderdeterminedCurveIsNamed) {
    const auto spec = BasisSpec::bspline(0, 1, 8);
    faa::SampledCurve few{"Atlantis", {0.1, 0.5, 0.9}, {1, 2, 3}};
    try {
        faa::fit_coefficients(spec, few);
        FAIL();
    } catch (const faa::UnderdeterminedFitError& e) {
        EXPECT_NE(std::string(e.what()).find("Atlantis"), std::string::npos);
    }
    // Enough points, but all inside one knot span.
    faa::SampledCurve clustered{"Lilliput", faa::linspace(0.0, 0.05, 20), std::vector<double>(20, 1.0)};
    EXPECT_THROW(faa::fit_coefficients(spec, clustered), faa::UnderdeterminedFitError);
}

TEST(Evaluate, SingleCoefficientMatchesRecursion) {
    const auto spec = BasisSpec::bspline(0, 2, 7, 3);
    const auto knots = spec.knot_vector();
    Vector b = Vector::Zero(7);
    b[3] = 1;
    const auto grid = faa::linspace(0, 2, 41);
    const auto v = faa::evaluate_curve(spec, b, grid);
    for (std::size_t g = 0; g < grid.size(); ++g) EXPECT_NEAR(v[g], oracle::cox_de_boor(knots, 3, 3, grid[g]), 1e-13);
    const auto zero = faa::evaluate_curve(spec, Vector::Zero(7), grid);
    for (double z : zero) EXPECT_EQ(z, 0.0);
}

TEST(Quadrature, GaussLegendreIntegratesPolynomials) {
    std::vector<double> x, w;
    faa::gauss_legendre(5, x, w);
    for (int deg = 0; deg <= 9; ++deg) {
        double s = 0;
        for (int i = 0; i < 5; ++i) s += w[i] * std::pow(x[i], deg);
        EXPECT_NEAR(s, deg % 2 ? 0.0 : 2.0 / (deg + 1), 1e-14);
    }
}
