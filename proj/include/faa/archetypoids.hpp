#pragma once

// Archetypoid analysis: archetypes restricted to actual observations,
// found by a BUILD step seeded from an archetype fit and a SWAP local search.

#include "faa/archetypes.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace faa {

enum class CandidateInit { nearest, max_alpha, max_beta, explicit_set };

std::string to_string(CandidateInit init);

struct ADAModel {
    int k = 0;
    std::vector<Index> indices;  ///< 0-based observation indices, in archetypoid order
    Matrix alpha;                ///< n x k
    double rss = 0;
    CandidateInit init_used = CandidateInit::explicit_set;
    int swap_steps = 0;
    std::vector<double> rss_trace;  ///< RSS before the first and after each accepted swap
};

struct SwapOptions {
    SolverOptions solver;
    /// A swap is accepted only if it lowers RSS by more than rel_tol * RSS.
    double rel_tol = 1e-9;
};

/// BUILD candidates from a fitted archetype model. Duplicates are replaced
/// by the next best observation under the same criterion. With a metric the
/// nearest-observation distances use the same metric as the fit.
std::vector<Index> build_candidates(const Matrix& X, const AAModel& aa, CandidateInit which,
                                    const std::optional<Matrix>& metric = std::nullopt);

/// Best-improvement single-exchange search from `init`. Terminates at a set
/// where no exchange of one selected and one unselected observation lowers
/// RSS by more than rel_tol * RSS.
ADAModel swap_optimize(const Matrix& X, const std::vector<Index>& init,
                       const std::optional<Matrix>& metric = std::nullopt,
                       const SwapOptions& opts = {});

struct ArchetypoidFit {
    ADAModel best;
    AAModel archetypes;
    std::vector<ADAModel> per_init;  ///< nearest, max_alpha, max_beta
};

/// Runs fit_archetypes, the three BUILD initializations and SWAP from each;
/// keeps the lowest RSS (earliest initialization on ties).
ArchetypoidFit fit_archetypoids_detailed(const Matrix& X, int k, const FitOptions& opts = {},
                                         const std::optional<Matrix>& metric = std::nullopt);

ADAModel fit_archetypoids(const Matrix& X, int k, const FitOptions& opts = {},
                          const std::optional<Matrix>& metric = std::nullopt);

/// RSS and alpha for a fixed set of archetypoids.
ADAModel evaluate_archetypoids(const Matrix& X, const std::vector<Index>& indices,
                               const std::optional<Matrix>& metric = std::nullopt,
                               const SolverOptions& solver = {});

}  // namespace faa
