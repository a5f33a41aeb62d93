#include "faa/errors.hpp"
#include "faa/functional.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <set>

using faa::BasisSpec;
using faa::FunctionalDataset;
using faa::Index;
using faa::Matrix;
using faa::Vector;

namespace {

FunctionalDataset random_dataset(std::mt19937_64& rng, const BasisSpec& basis, Index n, std::string name = "x") {
    FunctionalDataset fd{basis, oracle::random_matrix(rng, n, basis.size()), {}, std::move(name)};
    for (Index i = 0; i < n; ++i) fd.ids.push_back("c" + std::to_string(i));
    return fd;
}

}  // namespace

TEST(Functional, FourierReducesToPlainArchetypes) {
    std::mt19937_64 rng(61);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto fd = random_dataset(rng, BasisSpec::fourier(0, 1, 7), 20);
        faa::FitOptions o;
        o.seed = seed;
        const auto f = faa::faa(fd, 3, o);
        const auto p = faa::fit_archetypes(fd.coefficients, 3, o);
        EXPECT_LE((f.model.alpha - p.alpha).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_LE((f.model.beta - p.beta).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_NEAR(f.model.rss, p.rss, 1e-10);
    }
}

TEST(Functional, KOneIsFunctionalMeanAndMedoid) {
    std::mt19937_64 rng(62);
    const auto fd = random_dataset(rng, BasisSpec::bspline(0, 2, 9), 15);
    const auto f = faa::faa(fd, 1);
    EXPECT_LE((f.archetype_coefficients.row(0) - fd.coefficients.colwise().mean()).norm(), 1e-12);
    const auto a = faa::fada(fd, 1);
    const Matrix W = faa::gram_matrix(fd.basis).values;
    EXPECT_EQ(a.model.indices[0], oracle::medoid(fd.coefficients, W));
}

TEST(Functional, RssIsL2ResidualAndArchetypesAreMixtures) {
    std::mt19937_64 rng(63);
    const auto fd = random_dataset(rng, BasisSpec::bspline(0, 1, 8), 12);
    const auto f = faa::faa(fd, 3);
    const Matrix W = faa::gram_matrix(fd.basis).values;
    const Matrix A = fd.coefficients - f.model.alpha * f.archetype_coefficients;
    EXPECT_NEAR(f.model.rss, (A * W * A.transpose()).trace(), 1e-8);
    EXPECT_LE((f.archetype_coefficients - f.model.beta * fd.coefficients).cwiseAbs().maxCoeff(), 1e-8);
    const auto g = faa::fit_archetypes(fd.coefficients, 3, {}, W);
    EXPECT_LE((f.model.alpha - g.alpha).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Functional, FourFunctionExample) {
    // x1 = 0, x2 = 1 | 0.8, x3 = 0.8 | 1, x4 = 0.9 on [0, 0.5] | (0.5, 1].
    const auto basis = BasisSpec::bspline_with_knots(0, 1, {0.5}, 1);
    FunctionalDataset fd{basis, Matrix(4, 2), {"x1", "x2", "x3", "x4"}, "x"};
    fd.coefficients << 0, 0, 1, 0.8, 0.8, 1, 0.9, 0.9;
    const auto m = faa::fada(fd, 2);
    EXPECT_EQ(std::set<std::string>(m.ids.begin(), m.ids.end()), (std::set<std::string>{"x1", "x4"}));
}

TEST(Functional, StackingIsBlockDiagonalAndAdditive) {
    std::mt19937_64 rng(64);
    const auto a = random_dataset(rng, BasisSpec::bspline(0, 1, 6), 10, "a");
    const auto b = random_dataset(rng, BasisSpec::fourier(0, 2, 5), 10, "b");
    const faa::MultivariateFunctionalDataset mfd{{a, b}};
    const auto s = faa::stack_multivariate(mfd);
    EXPECT_EQ(s.coefficients.cols(), 11);
    EXPECT_EQ(s.gram.block(0, 0, 6, 6), faa::gram_matrix(a.basis).values);
    EXPECT_EQ(s.gram.block(6, 6, 5, 5), Matrix::Identity(5, 5));
    EXPECT_EQ(s.gram.block(0, 6, 6, 5), Matrix::Zero(6, 5));
    for (int trial = 0; trial < 5; ++trial) {
        const Matrix alpha = oracle::random_simplex_rows(rng, 10, 3);
        const Matrix beta = oracle::random_simplex_rows(rng, 3, 10);
        const double both = faa::functional_rss(mfd, alpha, beta);
        const double sum = faa::functional_rss({{a}}, alpha, beta) + faa::functional_rss({{b}}, alpha, beta);
        EXPECT_NEAR(both, sum, 1e-10 * (1 + both));
    }
    const auto single = faa::stack_multivariate({{a}});
    EXPECT_EQ(single.coefficients, a.coefficients);
}

TEST(Functional, TwoFourierComponentsEqualJoinedMatrix) {
    std::mt19937_64 rng(65);
    const auto a = random_dataset(rng, BasisSpec::fourier(0, 1, 5), 16, "a");
    const auto b = random_dataset(rng, BasisSpec::fourier(0, 1, 5), 16, "b");
    Matrix joined(16, 10);
    joined << a.coefficients, b.coefficients;
    const auto f = faa::faa(faa::MultivariateFunctionalDataset{{a, b}}, 3);
    const auto p = faa::fit_archetypes(joined, 3);
    EXPECT_LE((f.model.alpha - p.alpha).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_NEAR(f.model.rss, p.rss, 1e-10);
}

TEST(Functional, MisalignedComponentsListIds) {
    std::mt19937_64 rng(66);
    auto a = random_dataset(rng, BasisSpec::fourier(0, 1, 3), 4, "a");
    auto b = a;
    b.variable = "b";
    b.ids[2] = "zz";
    try {
        faa::stack_multivariate({{a, b}});
        FAIL();
    } catch (const faa::AlignmentError& e) {
        EXPECT_NE(std::string(e.what()).find("zz"), std::string::npos);
    }
}

TEST(Functional, KnotInsertionLeavesRssUnchanged) {
    // Curves built in a coarse cubic space are represented exactly in a
    // refined one; the functional RSS must not notice.
    std::mt19937_64 rng(67);
    const auto coarse = BasisSpec::bspline_with_knots(0, 1, {0.25, 0.5, 0.75}, 4);
    const auto fine = BasisSpec::bspline_with_knots(0, 1, {0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875}, 4);
    const auto fd = random_dataset(rng, coarse, 14);
    const auto grid = faa::linspace(0, 1, 200);
    Matrix values(200, 14);
    for (Index i = 0; i < 14; ++i) {
        const auto v = faa::evaluate_curve(coarse, fd.coefficients.row(i).transpose(), grid);
        for (int g = 0; g < 200; ++g) values(g, i) = v[g];
    }
    FunctionalDataset refined{fine, faa::fit_coefficients_on_grid(fine, grid, values).transpose(), fd.ids, "x"};
    const auto a = faa::faa(fd, 3);
    const auto b = faa::faa(refined, 3);
    EXPECT_NEAR(a.model.rss, b.model.rss, 1e-6);
}

TEST(Functional, Eq3IdentityAgainstQuadrature) {
    std::mt19937_64 rng(68);
    const auto fd = random_dataset(rng, BasisSpec::bspline(0, 3, 7), 6);
    const Matrix alpha = oracle::random_simplex_rows(rng, 6, 2);
    const Matrix beta = oracle::random_simplex_rows(rng, 2, 6);
    const Matrix A = fd.coefficients - alpha * beta * fd.coefficients;
    double direct = 0;
    for (Index i = 0; i < 6; ++i) {
        const Vector a = A.row(i).transpose();
        direct += oracle::trapezoid([&](double t) { const double v = fd.basis.evaluate(t).dot(a); return v * v; }, 0, 3, 200000);
    }
    EXPECT_NEAR(faa::functional_rss({{fd}}, alpha, beta) / direct, 1.0, 1e-4);
}

TEST(Standardize, OppositeConstants) {
    // Sample sd of {c, -c} is c * sqrt(2), so the curves become +-1/sqrt(2).
    const auto basis = BasisSpec::bspline(0, 1, 5);
    FunctionalDataset fd{basis, Matrix(2, 5), {"p", "m"}, "x"};
    fd.coefficients.row(0).setConstant(3.0);
    fd.coefficients.row(1).setConstant(-3.0);
    const auto s = faa::standardize(fd);
    const auto grid = faa::linspace(0, 1, 33);
    const auto p = faa::evaluate_curve(basis, s.coefficients.row(0).transpose(), grid);
    const auto m = faa::evaluate_curve(basis, s.coefficients.row(1).transpose(), grid);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        EXPECT_NEAR(p[g], 1 / std::sqrt(2.0), 1e-8);
        EXPECT_NEAR(m[g], -1 / std::sqrt(2.0), 1e-8);
    }
}

TEST(Standardize, IdenticalCurvesAreDegenerate) {
    const auto basis = BasisSpec::fourier(0, 1, 3);
    FunctionalDataset fd{basis, Matrix::Ones(3, 3), {"a", "b", "c"}, "flat"};
    try {
        faa::standardize(fd);
        FAIL();
    } catch (const faa::DegenerateVarianceError& e) {
        EXPECT_GE(e.where(), 0.0);
        EXPECT_LE(e.where(), 1.0);
    }
}

TEST(Standardize, IdempotentOnStandardizedInput) {
    // +-sqrt(3/2) cos and +-sqrt(3/2) sin of the first harmonic: pointwise
    // mean 0 and sample sd 1 everywhere.
    const auto basis = BasisSpec::fourier(0, 1, 5);
    const double s = std::sqrt(1.5) / std::sqrt(2.0);  // cos = sqrt(2) * basis function
    FunctionalDataset fd{basis, Matrix::Zero(4, 5), {"a", "b", "c", "d"}, "x"};
    fd.coefficients(0, 2) = s;
    fd.coefficients(1, 2) = -s;
    fd.coefficients(2, 1) = s;
    fd.coefficients(3, 1) = -s;
    const auto out = faa::standardize(fd);
    EXPECT_LE((out.coefficients - fd.coefficients).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Functional, StandardizeFlagIsRejected) {
    std::mt19937_64 rng(70);
    const auto fd = random_dataset(rng, BasisSpec::fourier(0, 1, 3), 5);
    faa::FitOptions o;
    o.standardize = true;
    EXPECT_THROW(faa::faa(fd, 2, o), faa::ArgumentError);
    EXPECT_THROW(faa::fada(fd, 2, o), faa::ArgumentError);
}

TEST(Functional, KScan) {
    std::mt19937_64 rng(71);
    const auto fd = random_dataset(rng, BasisSpec::bspline(0, 1, 6), 20);
    const auto rows = faa::k_scan_archetypoids(fd, {1, 2, 3, 4});
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0].indices[0], oracle::medoid(fd.coefficients, faa::gram_matrix(fd.basis).values));
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LE(rows[i].rss, rows[i - 1].rss * 1.05);
}

TEST(Functional, SmoothingNamesShortCurves) {
    const auto basis = BasisSpec::bspline(0, 1, 6);
    std::vector<faa::SampledCurve> curves{{"ok", faa::linspace(0, 1, 20), std::vector<double>(20, 2.0)},
                                          {"Tuvalu", {0.2, 0.4}, {1, 2}}};
    try {
        faa::smooth_curves(basis, curves, "v");
        FAIL();
    } catch (const faa::UnderdeterminedFitError& e) {
        EXPECT_NE(std::string(e.what()).find("Tuvalu"), std::string::npos);
    }
}
