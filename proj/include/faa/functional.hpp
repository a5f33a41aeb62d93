#pragma once

// Functional archetype / archetypoid analysis on basis coefficients.
//
// With x_i(t) = b_i' B(t) the L2 residual of a convex reconstruction is
// a_i' W a_i, W the Gram matrix of the basis. Factoring W = L L' turns the
// problem into ordinary archetype analysis of the rows b_i' L, so alpha and
// beta carry over unchanged. Several functional variables share alpha and
// beta by concatenating their coefficients under a block-diagonal W.

#include "faa/archetypoids.hpp"
#include "faa/basis.hpp"

#include <string>
#include <vector>

namespace faa {

struct FunctionalDataset {
    BasisSpec basis;
    Matrix coefficients;  ///< n x m, row i holds b_i
    std::vector<std::string> ids;
    std::string variable;

    Index count() const { return coefficients.rows(); }
};

void validate(const FunctionalDataset& fd);

/// Fits every curve in `curves` on `basis`. Curves with fewer points than
/// basis functions (or a rank-deficient design) raise UnderdeterminedFitError
/// naming the curve.
FunctionalDataset smooth_curves(const BasisSpec& basis, const std::vector<SampledCurve>& curves,
                                std::string variable = {});

struct MultivariateFunctionalDataset {
    std::vector<FunctionalDataset> components;
};

struct StackedCoefficients {
    Matrix coefficients;  ///< n x sum(m_c)
    Matrix gram;          ///< block diagonal, one block per component
    std::vector<Index> offsets;  ///< first column of each component
};

/// Throws AlignmentError listing ids that differ between components.
StackedCoefficients stack_multivariate(const MultivariateFunctionalDataset& mfd);

struct FunctionalAAModel {
    AAModel model;                 ///< alpha, beta, rss in the L2 metric
    Matrix archetype_coefficients;  ///< k x sum(m_c), beta * coefficients
    std::vector<BasisSpec> bases;
    std::vector<Index> offsets;
};

struct FunctionalADAModel {
    ADAModel model;
    AAModel archetypes;  ///< the archetype fit that seeded BUILD
    std::vector<ADAModel> per_init;
    std::vector<std::string> ids;  ///< ids of the archetypoids, in order
};

FunctionalAAModel faa(const FunctionalDataset& fd, int k, const FitOptions& opts = {});
FunctionalAAModel faa(const MultivariateFunctionalDataset& mfd, int k, const FitOptions& opts = {});

FunctionalADAModel fada(const FunctionalDataset& fd, int k, const FitOptions& opts = {});
FunctionalADAModel fada(const MultivariateFunctionalDataset& mfd, int k,
                        const FitOptions& opts = {});

/// Pointwise standardization: evaluates every curve on grid_size equally
/// spaced points, subtracts the mean function, divides by the sample
/// (n - 1) standard deviation function and refits. Throws
/// DegenerateVarianceError if the standard deviation vanishes anywhere.
FunctionalDataset standardize(const FunctionalDataset& fd, int grid_size = 201);

struct KScanRow {
    int k = 0;
    std::vector<Index> indices;
    std::vector<std::string> ids;
    double rss = 0;
    CandidateInit init_used = CandidateInit::explicit_set;
};

std::vector<KScanRow> k_scan_archetypoids(const MultivariateFunctionalDataset& mfd,
                                          const std::vector<int>& ks, const FitOptions& opts = {});
std::vector<KScanRow> k_scan_archetypoids(const FunctionalDataset& fd, const std::vector<int>& ks,
                                          const FitOptions& opts = {});

/// Functional RSS sum_i a_i' W a_i for given alpha and beta (any basis).
double functional_rss(const MultivariateFunctionalDataset& mfd, const Matrix& alpha,
                      const Matrix& beta);

}  // namespace faa
