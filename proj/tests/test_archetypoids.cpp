#include "faa/archetypoids.hpp"
#include "faa/errors.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <set>

using faa::Index;
using faa::Matrix;

namespace {

std::set<Index> as_set(const std::vector<Index>& v) { return {v.begin(), v.end()}; }

// True if no single exchange lowers RSS by more than the acceptance rule.
bool no_improving_swap(const Matrix& X, const std::vector<Index>& S, double rss) {
    for (std::size_t pos = 0; pos < S.size(); ++pos)
        for (Index c = 0; c < X.rows(); ++c) {
            if (std::find(S.begin(), S.end(), c) != S.end()) continue;
            auto T = S;
            T[pos] = c;
            if (oracle::subset_rss(X, T) < rss - 1e-6 * (1 + rss)) return false;
        }
    return true;
}

}  // namespace

TEST(Archetypoids, KOneIsMedoid) {
    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 30; ++trial) {
        const Matrix X = oracle::random_matrix(rng, 8 + trial % 20, 3);
        const auto m = faa::fit_archetypoids(X, 1);
        ASSERT_EQ(m.indices.size(), 1u);
        EXPECT_EQ(m.indices[0], oracle::medoid(X, Matrix::Identity(3, 3)));
    }
}

TEST(Archetypoids, KEqualsNSelectsEverything) {
    std::mt19937_64 rng(52);
    const Matrix X = oracle::random_matrix(rng, 5, 2);
    const auto m = faa::fit_archetypoids(X, 5);
    EXPECT_EQ(as_set(m.indices), (std::set<Index>{0, 1, 2, 3, 4}));
    EXPECT_LE(m.rss, 1e-12);
}

TEST(Archetypoids, PlantedGenerators) {
    Matrix G(4, 2);
    G << 0, 0, 3, 0, 3, 3, 0, 3;
    std::mt19937_64 rng(53);
    Matrix X(34, 2);
    X.topRows(4) = G;
    X.bottomRows(30) = oracle::random_simplex_rows(rng, 30, 4) * G;
    const auto m = faa::fit_archetypoids(X, 4);
    EXPECT_EQ(as_set(m.indices), (std::set<Index>{0, 1, 2, 3}));
    EXPECT_LE(m.rss, 1e-8);
}

TEST(Archetypoids, FourFunctionExampleInOrthonormalCoordinates) {
    // Piecewise-constant curves on two half intervals; each coefficient is
    // scaled by sqrt(1/2) so that Euclidean norms are L2 norms.
    Matrix X(4, 2);
    X << 0, 0, 1, 0.8, 0.8, 1, 0.9, 0.9;
    const Matrix W = 0.5 * Matrix::Identity(2, 2);
    const auto m = faa::fit_archetypoids(X, 2, {}, W);
    EXPECT_EQ(as_set(m.indices), (std::set<Index>{0, 3}));
    EXPECT_NEAR(m.rss, 0.5 * 2 * 0.02, 1e-6);
}

TEST(Archetypoids, CandidatesAreArgmaxAndNearest) {
    std::mt19937_64 rng(54);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix X = oracle::random_matrix(rng, 40, 2);
        faa::FitOptions o;
        o.seed = trial;
        const auto aa = faa::fit_archetypes(X, 3, o);
        const auto ca = faa::build_candidates(X, aa, faa::CandidateInit::max_alpha);
        const auto cb = faa::build_candidates(X, aa, faa::CandidateInit::max_beta);
        const auto cn = faa::build_candidates(X, aa, faa::CandidateInit::nearest);
        for (const auto* c : {&ca, &cb, &cn}) EXPECT_EQ(as_set(*c).size(), 3u);
        // Where the first choice is not already taken it is the plain argmax.
        Index i0;
        aa.alpha.col(0).maxCoeff(&i0);
        EXPECT_EQ(ca[0], i0);
        aa.beta.row(0).maxCoeff(&i0);
        EXPECT_EQ(cb[0], i0);
        (X.rowwise() - aa.archetypes.row(0)).rowwise().squaredNorm().minCoeff(&i0);
        EXPECT_EQ(cn[0], i0);
    }
}

TEST(Archetypoids, RepeatedPointsGiveOneIndexPerPoint) {
    Matrix G(4, 2);
    G << 0, 0, 2, 0, 2, 2, 0, 2;
    Matrix X(40, 2);
    for (int c = 0; c < 10; ++c) X.middleRows(4 * c, 4) = G;
    const auto aa = faa::fit_archetypes(X, 4);
    for (auto which : {faa::CandidateInit::nearest, faa::CandidateInit::max_alpha, faa::CandidateInit::max_beta}) {
        const auto c = faa::build_candidates(X, aa, which);
        std::set<Index> points;
        for (Index i : c) points.insert(i % 4);
        EXPECT_EQ(points.size(), 4u) << faa::to_string(which);
    }
}

TEST(Archetypoids, DuplicateNearestIsReplaced) {
    Matrix X(3, 1);
    X << 0, 1, 10;
    faa::AAModel aa;
    aa.k = 2;
    aa.alpha = Matrix::Constant(3, 2, 0.5);
    aa.beta = Matrix::Constant(2, 3, 1.0 / 3);
    aa.archetypes = Matrix::Constant(2, 1, 0.2);  // both nearest to x_0
    const auto c = faa::build_candidates(X, aa, faa::CandidateInit::nearest);
    EXPECT_EQ(c, (std::vector<Index>{0, 1}));
}

TEST(Archetypoids, SwapReachesLocalOptimum) {
    std::mt19937_64 rng(55);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix X = oracle::random_matrix(rng, 10, 2);
        const auto m = faa::swap_optimize(X, {0, 1, 2});
        EXPECT_TRUE(no_improving_swap(X, m.indices, m.rss));
        for (std::size_t s = 1; s < m.rss_trace.size(); ++s) EXPECT_LT(m.rss_trace[s], m.rss_trace[s - 1]);
        // penalized fits sit slightly below the exact simplex projection
        EXPECT_NEAR(m.rss, oracle::subset_rss(X, m.indices), 1e-4 * (1 + m.rss));
        EXPECT_EQ(static_cast<int>(m.rss_trace.size()), m.swap_steps + 1);
    }
}

TEST(Archetypoids, NotBetterThanArchetypes) {
    std::mt19937_64 rng(56);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix X = oracle::random_matrix(rng, 25, 3);
        const auto fit = faa::fit_archetypoids_detailed(X, 3);
        EXPECT_GE(fit.best.rss, fit.archetypes.rss - 1e-9);
        EXPECT_GE(fit.best.alpha.minCoeff(), 0.0);
        EXPECT_LE((fit.best.alpha.rowwise().sum().array() - 1).abs().maxCoeff(), 1e-4);
        double lowest = fit.per_init[0].rss;
        for (const auto& p : fit.per_init) lowest = std::min(lowest, p.rss);
        EXPECT_EQ(fit.best.rss, lowest);
    }
}

TEST(Archetypoids, MatchesExhaustiveOnTenPoints) {
    std::mt19937_64 rng(57);
    int exact = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const Matrix X = oracle::random_matrix(rng, 10, 2);
        faa::FitOptions o;
        o.seed = trial;
        const auto m = faa::fit_archetypoids(X, 2, o);
        const double best = oracle::exhaustive_ada(X, 2);
        EXPECT_LE(m.rss, best * 1.05 + 1e-12);
        if (m.rss <= best * (1 + 1e-6) + 1e-12) ++exact;
    }
    EXPECT_GE(exact, 90);
}

TEST(Archetypoids, EvaluateRejectsBadIndices) {
    const Matrix X = Matrix::Random(4, 2);
    EXPECT_THROW(faa::evaluate_archetypoids(X, {0, 0}), faa::ArgumentError);
    EXPECT_THROW(faa::evaluate_archetypoids(X, {5}), faa::ArgumentError);
    EXPECT_THROW(faa::fit_archetypoids(X, 5), faa::ArgumentError);
}
