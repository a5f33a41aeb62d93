#include "faa/functional.hpp"

#include "faa/errors.hpp"

#include <cmath>
#include <sstream>

namespace faa {

void validate(const FunctionalDataset& fd) {
    if (fd.coefficients.cols() != fd.basis.size())
        throw DataError("functional dataset '" + fd.variable +
                        "': coefficient columns do not match basis size");
    if (static_cast<Index>(fd.ids.size()) != fd.coefficients.rows())
        throw DataError("functional dataset '" + fd.variable + "': id count does not match rows");
    if (!fd.coefficients.allFinite())
        throw DataError("functional dataset '" + fd.variable + "': non-finite coefficients");
}

FunctionalDataset smooth_curves(const BasisSpec& basis, const std::vector<SampledCurve>& curves,
                                std::string variable) {
    FunctionalDataset fd{basis, Matrix(static_cast<Index>(curves.size()), basis.size()), {}, std::move(variable)};
    for (std::size_t i = 0; i < curves.size(); ++i) {
        fd.coefficients.row(static_cast<Index>(i)) = fit_coefficients(basis, curves[i]).transpose();
        fd.ids.push_back(curves[i].id);
    }
    return fd;
}

StackedCoefficients stack_multivariate(const MultivariateFunctionalDataset& mfd) {
    if (mfd.components.empty()) throw ArgumentError("stack_multivariate: no components");
    const auto& ref = mfd.components.front();
    for (const auto& c : mfd.components) {
        validate(c);
        if (c.ids != ref.ids) {
            std::ostringstream os;
            os << "component '" << c.variable << "' is not aligned with '" << ref.variable
               << "':";
            const std::size_t n = std::max(c.ids.size(), ref.ids.size());
            int listed = 0;
            for (std::size_t i = 0; i < n && listed < 10; ++i) {
                const std::string a = i < ref.ids.size() ? ref.ids[i] : "<missing>";
                const std::string b = i < c.ids.size() ? c.ids[i] : "<missing>";
                if (a != b) {
                    os << " [" << i << "] " << a << " vs " << b << ";";
                    ++listed;
                }
            }
            throw AlignmentError(os.str());
        }
    }

    Index total = 0;
    StackedCoefficients out;
    for (const auto& c : mfd.components) {
        out.offsets.push_back(total);
        total += c.basis.size();
    }
    const Index n = ref.count();
    out.coefficients = Matrix::Zero(n, total);
    out.gram = Matrix::Zero(total, total);
    for (std::size_t i = 0; i < mfd.components.size(); ++i) {
        const auto& c = mfd.components[i];
        const Index m = c.basis.size();
        out.coefficients.middleCols(out.offsets[i], m) = c.coefficients;
        out.gram.block(out.offsets[i], out.offsets[i], m, m) = gram_matrix(c.basis).values;
    }
    return out;
}

namespace {

MultivariateFunctionalDataset single(const FunctionalDataset& fd) { return {{fd}}; }

void reject_column_standardization(const FitOptions& opts) {
    if (opts.standardize)
        throw ArgumentError(
            "column standardization does not apply to basis coefficients; use functional "
            "standardize");
}

}  // namespace

FunctionalAAModel faa(const MultivariateFunctionalDataset& mfd, int k, const FitOptions& opts) {
    reject_column_standardization(opts);
    const StackedCoefficients stacked = stack_multivariate(mfd);
    const Matrix L = cholesky_spd(stacked.gram);

    FunctionalAAModel out;
    out.model = fit_archetypes(stacked.coefficients * L, k, opts);
    out.model.archetypes = out.model.beta * stacked.coefficients;
    out.archetype_coefficients = out.model.archetypes;
    for (const auto& c : mfd.components) out.bases.push_back(c.basis);
    out.offsets = stacked.offsets;
    return out;
}

FunctionalAAModel faa(const FunctionalDataset& fd, int k, const FitOptions& opts) {
    return faa(single(fd), k, opts);
}

FunctionalADAModel fada(const MultivariateFunctionalDataset& mfd, int k, const FitOptions& opts) {
    reject_column_standardization(opts);
    const StackedCoefficients stacked = stack_multivariate(mfd);
    const Matrix L = cholesky_spd(stacked.gram);

    ArchetypoidFit fit = fit_archetypoids_detailed(stacked.coefficients * L, k, opts);
    FunctionalADAModel out;
    out.model = std::move(fit.best);
    out.archetypes = std::move(fit.archetypes);
    out.archetypes.archetypes = out.archetypes.beta * stacked.coefficients;
    out.per_init = std::move(fit.per_init);
    for (Index i : out.model.indices) out.ids.push_back(mfd.components.front().ids[i]);
    return out;
}

FunctionalADAModel fada(const FunctionalDataset& fd, int k, const FitOptions& opts) {
    return fada(single(fd), k, opts);
}

FunctionalDataset standardize(const FunctionalDataset& fd, int grid_size) {
    validate(fd);
    const Index n = fd.count();
    if (n < 2) throw ArgumentError("standardize: at least two curves are required");
    if (grid_size < fd.basis.size())
        throw ArgumentError("standardize: grid_size must be at least the basis size");

    const auto grid = linspace(fd.basis.lower(), fd.basis.upper(), grid_size);
    Matrix values = fd.basis.design(grid) * fd.coefficients.transpose();  // grid x n
    const Vector mean = values.rowwise().mean();
    values.colwise() -= mean;
    const Vector sd = (values.rowwise().squaredNorm() / static_cast<double>(n - 1)).cwiseSqrt();
    for (Index g = 0; g < sd.size(); ++g) {
        if (!(sd[g] >= 1e-12)) {
            std::ostringstream os;
            os.precision(17);
            os << "standardize: degenerate variance in '" << fd.variable << "' at t = " << grid[g];
            throw DegenerateVarianceError(os.str(), grid[g]);
        }
    }
    values.array().colwise() /= sd.array();

    FunctionalDataset out = fd;
    out.coefficients = fit_coefficients_on_grid(fd.basis, grid, values).transpose();
    return out;
}

std::vector<KScanRow> k_scan_archetypoids(const MultivariateFunctionalDataset& mfd,
                                          const std::vector<int>& ks, const FitOptions& opts) {
    std::vector<KScanRow> rows;
    for (int k : ks) {
        const FunctionalADAModel m = fada(mfd, k, opts);
        rows.push_back({k, m.model.indices, m.ids, m.model.rss, m.model.init_used});
    }
    return rows;
}

std::vector<KScanRow> k_scan_archetypoids(const FunctionalDataset& fd, const std::vector<int>& ks,
                                          const FitOptions& opts) {
    return k_scan_archetypoids(single(fd), ks, opts);
}

double functional_rss(const MultivariateFunctionalDataset& mfd, const Matrix& alpha,
                      const Matrix& beta) {
    const StackedCoefficients stacked = stack_multivariate(mfd);
    return rss(stacked.coefficients, alpha, beta * stacked.coefficients, stacked.gram);
}

}  // namespace faa
