#include "faa/cli.hpp"

#include "faa/errors.hpp"
#include "faa/svg.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <unistd.h>

namespace faa {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kCommands = {"fit-aa", "fit-ada", "fit-faa", "fit-fada", "elbow", "render"};

}  // namespace

bool is_functional(const std::string& c) {
    return c == "fit-faa" || c == "fit-fada" || c == "faa" || c == "fada";
}

json to_json(const RunConfig& c) {
    json j;
    j["command"] = c.command;
    j["inputs"] = c.inputs;
    j["format"] = c.format;
    j["basis"] = c.basis;
    j["nbasis"] = c.nbasis;
    j["order"] = c.order;
    j["domain"] = c.domain;
    j["period"] = c.period ? json(*c.period) : json(nullptr);
    j["knots"] = c.knots;
    j["k"] = c.k;
    j["k_min"] = c.k_min;
    j["k_max"] = c.k_max;
    j["method"] = c.method;
    j["restarts"] = c.restarts;
    j["max_iter"] = c.max_iter;
    j["tol"] = c.tol;
    j["huge_weight"] = c.huge_weight;
    j["seed"] = c.seed;
    j["standardize"] = c.standardize;
    j["standardize_grid"] = c.standardize_grid;
    j["grid"] = c.grid;
    j["out"] = c.out;
    j["models"] = c.models;
    j["variable"] = c.variable;
    return j;
}

namespace {

template <class T>
void read_field(const json& j, const char* key, T& field, std::vector<std::string>& errors,
                const char* expected) {
    const auto it = j.find(key);
    if (it == j.end()) return;
    try {
        if constexpr (std::is_same_v<T, std::string>) {
            if (!it->is_string()) throw std::invalid_argument(key);
        } else if constexpr (std::is_same_v<T, bool>) {
            if (!it->is_boolean()) throw std::invalid_argument(key);
        } else if constexpr (std::is_integral_v<T>) {
            if (!it->is_number_integer() || (std::is_unsigned_v<T> && it->get<std::int64_t>() < 0 &&
                                             !it->is_number_unsigned()))
                throw std::invalid_argument(key);
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!it->is_number()) throw std::invalid_argument(key);
        }
        field = it->get<T>();
    } catch (const std::exception&) {
        errors.push_back(std::string("config field '") + key + "': expected " + expected);
    }
}

}  // namespace

RunConfig config_from_json(const json& j0, RunConfig c, std::vector<std::string>& errors) {
    const json& j = j0.is_object() && j0.contains("config") && j0["config"].is_object() ? j0["config"] : j0;
    if (!j.is_object()) {
        errors.push_back("configuration must be a JSON object");
        return c;
    }
    static const std::set<std::string> known = {
        "command", "inputs",  "format",   "basis",    "nbasis",      "order",       "domain",
        "period",  "knots",   "k",        "k_min",    "k_max",       "method",      "restarts",
        "max_iter", "tol",    "huge_weight", "seed",  "standardize", "standardize_grid", "grid",
        "out",     "models",  "variable"};
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) errors.push_back("unknown config field '" + key + "'");

    read_field(j, "command", c.command, errors, "a string");
    read_field(j, "inputs", c.inputs, errors, "a list of paths");
    read_field(j, "format", c.format, errors, "a string");
    read_field(j, "basis", c.basis, errors, "a string");
    read_field(j, "nbasis", c.nbasis, errors, "an integer");
    read_field(j, "order", c.order, errors, "an integer");
    read_field(j, "domain", c.domain, errors, "a list of two numbers");
    if (const auto it = j.find("period"); it != j.end()) {
        if (it->is_null()) c.period.reset();
        else if (it->is_number()) c.period = it->get<double>();
        else errors.push_back("config field 'period': expected a number or null");
    }
    read_field(j, "knots", c.knots, errors, "a list of numbers");
    read_field(j, "k", c.k, errors, "an integer");
    read_field(j, "k_min", c.k_min, errors, "an integer");
    read_field(j, "k_max", c.k_max, errors, "an integer");
    read_field(j, "method", c.method, errors, "a string");
    read_field(j, "restarts", c.restarts, errors, "an integer");
    read_field(j, "max_iter", c.max_iter, errors, "an integer");
    read_field(j, "tol", c.tol, errors, "a number");
    read_field(j, "huge_weight", c.huge_weight, errors, "a number");
    read_field(j, "seed", c.seed, errors, "a non-negative integer");
    read_field(j, "standardize", c.standardize, errors, "true or false");
    read_field(j, "standardize_grid", c.standardize_grid, errors, "an integer");
    read_field(j, "grid", c.grid, errors, "an integer");
    read_field(j, "out", c.out, errors, "a path");
    read_field(j, "models", c.models, errors, "a list of paths");
    read_field(j, "variable", c.variable, errors, "a string");
    return c;
}

std::vector<std::string> validate(const RunConfig& c) {
    std::vector<std::string> e;
    const bool known_command = std::find(kCommands.begin(), kCommands.end(), c.command) != kCommands.end();
    if (c.command.empty()) e.push_back("no command given (one of fit-aa, fit-ada, fit-faa, fit-fada, elbow, render)");
    else if (!known_command) e.push_back("unknown command '" + c.command + "'");

    const bool elbow = c.command == "elbow";
    const bool render = c.command == "render";
    if (elbow && c.method != "aa" && c.method != "ada" && c.method != "faa" && c.method != "fada")
        e.push_back("method must be aa, ada, faa or fada");
    const bool functional = is_functional(c.command) || (elbow && is_functional(c.method));
    const bool matrix = c.command == "fit-aa" || c.command == "fit-ada" ||
                        (elbow && (c.method == "aa" || c.method == "ada"));

    if (c.inputs.empty() && !(render && !c.models.empty())) e.push_back("at least one input file is required");
    if (matrix && c.inputs.size() > 1) e.push_back("matrix commands take exactly one input file");
    if (c.format != "long" && c.format != "wide") e.push_back("format must be long or wide");
    if (c.basis != "fourier" && c.basis != "bspline") e.push_back("basis must be fourier or bspline");
    if (functional && c.nbasis <= 0 && c.knots.empty()) e.push_back("nbasis must be positive for functional commands");
    if (c.nbasis < 0) e.push_back("nbasis must not be negative");
    if (c.basis == "bspline" && c.order < 1) e.push_back("order must be at least 1");
    if (c.basis == "fourier" && !c.knots.empty()) e.push_back("knots apply to bspline bases only");
    if (!c.domain.empty() && (c.domain.size() != 2 || !(c.domain[0] < c.domain[1])))
        e.push_back("domain must be two numbers a < b");
    if (c.period && !(*c.period > 0)) e.push_back("period must be positive");
    if (c.period && c.basis != "fourier") e.push_back("period applies to fourier bases only");
    if ((c.command.rfind("fit-", 0) == 0) && c.k < 1) e.push_back("k must be at least 1");
    if (elbow && c.k_min < 1) e.push_back("k_min must be at least 1");
    if (elbow && c.k_max < c.k_min) e.push_back("k_max must be at least k_min");
    if (c.restarts < 1) e.push_back("restarts must be at least 1");
    if (c.max_iter < 1) e.push_back("max_iter must be at least 1");
    if (!(c.tol > 0) || !std::isfinite(c.tol)) e.push_back("tol must be a positive number");
    if (!(c.huge_weight > 0) || !std::isfinite(c.huge_weight)) e.push_back("huge_weight must be a positive number");
    if (c.standardize_grid < 2) e.push_back("standardize_grid must be at least 2");
    if (c.grid < 2) e.push_back("grid must be at least 2");
    if (c.out.empty()) e.push_back("output directory must not be empty");
    return e;
}

namespace {

// Files are written into a sibling staging directory and moved into place
// only once every output exists.
class OutputStage {
public:
    explicit OutputStage(const std::string& out) : final_(fs::path(out).lexically_normal()) {
        if (final_.filename().empty()) final_ = final_.parent_path();
        const fs::path parent = final_.has_parent_path() ? final_.parent_path() : fs::path(".");
        staging_ = parent / ("." + final_.filename().string() + ".tmp-" + std::to_string(::getpid()));
        fs::remove_all(staging_);
        fs::create_directories(staging_);
    }
    OutputStage(const OutputStage&) = delete;
    OutputStage& operator=(const OutputStage&) = delete;
    ~OutputStage() {
        std::error_code ec;
        fs::remove_all(staging_, ec);
    }

    fs::path path(const std::string& name) {
        names_.push_back(name);
        return staging_ / name;
    }

    void text(const std::string& name, const std::string& content) {
        std::ofstream out(path(name), std::ios::binary);
        out << content;
        if (!out) throw DataError("cannot write '" + name + "'");
    }

    void commit() {
        fs::create_directories(final_);
        for (const auto& name : names_) fs::rename(staging_ / name, final_ / name);
    }

private:
    fs::path final_, staging_;
    std::vector<std::string> names_;
};

FitOptions fit_options(const RunConfig& c) {
    FitOptions o;
    o.restarts = c.restarts;
    o.max_outer_iters = c.max_iter;
    o.rel_tol = c.tol;
    o.seed = c.seed;
    o.solver.huge_weight = c.huge_weight;
    return o;
}

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j) {
    const auto rows = static_cast<Index>(j.size());
    const auto cols = rows ? static_cast<Index>(j[0].size()) : 0;
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        if (static_cast<Index>(j[i].size()) != cols) throw DataError("model file: ragged matrix");
        for (Index c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
    }
    return m;
}

json basis_json(const BasisSpec& b) {
    json j{{"kind", to_string(b.kind())}, {"lower", b.lower()}, {"upper", b.upper()}, {"size", b.size()}};
    if (b.kind() == BasisKind::fourier) {
        j["period"] = b.period();
    } else {
        j["order"] = b.order();
        j["interior_knots"] = b.interior_knots();
    }
    return j;
}

BasisSpec basis_from_json(const json& j) {
    const double a = j.at("lower").get<double>(), b = j.at("upper").get<double>();
    if (basis_kind_from_string(j.at("kind").get<std::string>()) == BasisKind::fourier)
        return BasisSpec::fourier(a, b, j.at("size").get<int>(), j.at("period").get<double>());
    return BasisSpec::bspline_with_knots(a, b, j.at("interior_knots").get<std::vector<double>>(),
                                         j.at("order").get<int>());
}

CsvRows alpha_rows(const std::vector<std::string>& ids, const std::vector<std::string>& labels,
                   const Matrix& alpha) {
    CsvRows rows;
    std::vector<std::string> header{"id"};
    header.insert(header.end(), labels.begin(), labels.end());
    rows.push_back(std::move(header));
    for (Index i = 0; i < alpha.rows(); ++i) {
        std::vector<std::string> row{ids[i]};
        for (Index j = 0; j < alpha.cols(); ++j) row.push_back(format_number(alpha(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

CsvRows beta_rows(const std::vector<std::string>& ids, const std::vector<std::string>& labels,
                  const Matrix& beta) {
    CsvRows rows;
    std::vector<std::string> header{"archetype"};
    header.insert(header.end(), ids.begin(), ids.end());
    rows.push_back(std::move(header));
    for (Index j = 0; j < beta.rows(); ++j) {
        std::vector<std::string> row{labels[j]};
        for (Index i = 0; i < beta.cols(); ++i) row.push_back(format_number(beta(j, i)));
        rows.push_back(std::move(row));
    }
    return rows;
}

CsvRows archetypoid_rows(const std::vector<Index>& indices, const std::vector<std::string>& ids) {
    CsvRows rows{{"archetypoid", "index", "id"}};
    for (std::size_t j = 0; j < indices.size(); ++j)
        rows.push_back({std::to_string(j + 1), std::to_string(indices[j]), ids[indices[j]]});
    return rows;
}

std::vector<std::string> numbered(int k) {
    std::vector<std::string> out;
    for (int j = 1; j <= k; ++j) out.push_back("A" + std::to_string(j));
    return out;
}

std::vector<std::string> pick(const std::vector<std::string>& ids, const std::vector<Index>& idx) {
    std::vector<std::string> out;
    for (Index i : idx) out.push_back(ids[i]);
    return out;
}

Matrix indicator(const std::vector<Index>& idx, Index n) {
    Matrix b = Matrix::Zero(static_cast<Index>(idx.size()), n);
    for (std::size_t j = 0; j < idx.size(); ++j) b(static_cast<Index>(j), idx[j]) = 1.0;
    return b;
}

std::string join(const std::vector<std::string>& parts, const char* sep = ", ") {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
    return out;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

// ---- data loading -----------------------------------------------------------

std::vector<VariableCurves> load_curves(const RunConfig& c) {
    const InputFormat format = input_format_from_string(c.format);
    std::vector<VariableCurves> all;
    for (const auto& path : c.inputs) {
        for (auto& v : ingest(path, format)) {
            for (const auto& seen : all)
                if (seen.variable == v.variable)
                    throw DataError("variable '" + v.variable + "' appears in more than one input");
            all.push_back(std::move(v));
        }
    }
    return all;
}

std::pair<double, double> data_range(const std::vector<VariableCurves>& vars) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& v : vars)
        for (const auto& c : v.curves)
            for (double t : c.t) {
                lo = std::min(lo, t);
                hi = std::max(hi, t);
            }
    if (!(lo < hi)) throw DataError("the data do not span an interval; give --domain");
    return {lo, hi};
}

BasisSpec make_basis(const RunConfig& c) {
    const double a = c.domain.at(0), b = c.domain.at(1);
    if (c.basis == "fourier") return BasisSpec::fourier(a, b, c.nbasis, c.period);
    if (!c.knots.empty()) return BasisSpec::bspline_with_knots(a, b, c.knots, c.order);
    return BasisSpec::bspline(a, b, c.nbasis, c.order);
}

// Inputs made absolute and the domain resolved, so a model.json re-runs
// from anywhere with the same basis.
RunConfig effective(const RunConfig& c, const std::vector<VariableCurves>& vars) {
    RunConfig e = c;
    for (auto& p : e.inputs) p = fs::absolute(p).lexically_normal().string();
    for (auto& p : e.models) p = fs::absolute(p).lexically_normal().string();
    if (e.domain.empty() && (e.nbasis > 0 || !e.knots.empty())) {
        const auto [a, b] = data_range(vars);
        e.domain = {a, b};
    }
    return e;
}

struct FunctionalData {
    MultivariateFunctionalDataset raw, fit;
};

FunctionalData smooth_all(const RunConfig& c, const std::vector<VariableCurves>& vars) {
    const BasisSpec basis = make_basis(c);
    FunctionalData d;
    for (const auto& v : vars) {
        d.raw.components.push_back(smooth_curves(basis, v.curves, v.variable));
        d.fit.components.push_back(c.standardize ? standardize(d.raw.components.back(), c.standardize_grid)
                                                 : d.raw.components.back());
    }
    stack_multivariate(d.raw);  // alignment check before any fitting
    return d;
}

json variables_json(const MultivariateFunctionalDataset& mfd) {
    json vars = json::array();
    Index offset = 0;
    for (const auto& c : mfd.components) {
        vars.push_back({{"name", c.variable}, {"offset", offset}, {"basis", basis_json(c.basis)}});
        offset += c.basis.size();
    }
    return vars;
}

CsvRows functional_curve_rows(const MultivariateFunctionalDataset& mfd, const Matrix& coef,
                              const std::vector<std::string>& labels, int grid) {
    CsvRows rows{{"variable", "archetype", "t", "value"}};
    Index offset = 0;
    for (const auto& c : mfd.components) {
        const auto ts = linspace(c.basis.lower(), c.basis.upper(), grid);
        for (Index j = 0; j < coef.rows(); ++j) {
            const Vector b = coef.row(j).segment(offset, c.basis.size()).transpose();
            const auto ys = evaluate_curve(c.basis, b, ts);
            for (std::size_t g = 0; g < ts.size(); ++g)
                rows.push_back({c.variable, labels[j], format_number(ts[g]), format_number(ys[g])});
        }
        offset += c.basis.size();
    }
    return rows;
}

json sweep_json(const AAModel& m) {
    json out{{"k", m.k},
             {"rss", m.rss},
             {"iterations", m.iterations},
             {"converged", m.converged},
             {"restart", m.restart},
             {"restart_rss", m.restart_rss}};
    return out;
}

json record(const std::string& command, const RunConfig& eff, const std::vector<std::string>& ids) {
    return json{{"format", "faa-model"}, {"version", 1}, {"command", command}, {"config", to_json(eff)},
                {"data", {{"n", ids.size()}, {"ids", ids}}}};
}

// ---- commands ---------------------------------------------------------------

std::string fit_functional(const RunConfig& c) {
    const auto vars = load_curves(c);
    const RunConfig eff = effective(c, vars);
    const FunctionalData d = smooth_all(eff, vars);
    const auto& ids = d.raw.components.front().ids;
    const Matrix raw_coef = stack_multivariate(d.raw).coefficients;
    const FitOptions opts = fit_options(eff);

    json model = record(c.command, eff, ids);
    model["data"]["variables"] = variables_json(d.raw);
    OutputStage stage(c.out);
    std::ostringstream summary;

    if (c.command == "fit-faa") {
        const FunctionalAAModel m = faa(d.fit, c.k, opts);
        const auto labels = numbered(c.k);
        const Matrix arch_raw = m.model.beta * raw_coef;
        const double rss_raw = c.standardize ? functional_rss(d.raw, m.model.alpha, m.model.beta) : m.model.rss;
        write_csv(stage.path("alpha.csv"), alpha_rows(ids, labels, m.model.alpha));
        write_csv(stage.path("beta.csv"), beta_rows(ids, labels, m.model.beta));
        write_csv(stage.path("archetype_curves.csv"), functional_curve_rows(d.raw, arch_raw, labels, c.grid));
        model["result"] = sweep_json(m.model);
        model["result"]["rss_raw"] = rss_raw;
        model["result"]["alpha"] = matrix_json(m.model.alpha);
        model["result"]["beta"] = matrix_json(m.model.beta);
        model["result"]["archetype_coefficients"] = matrix_json(arch_raw);
        summary << "fit-faa k=" << c.k << " rss=" << fmt(m.model.rss);
        if (c.standardize) summary << " rss_raw=" << fmt(rss_raw);
    } else {
        const FunctionalADAModel m = fada(d.fit, c.k, opts);
        const Matrix B = indicator(m.model.indices, static_cast<Index>(ids.size()));
        const double rss_raw = c.standardize ? functional_rss(d.raw, m.model.alpha, B) : m.model.rss;
        write_csv(stage.path("alpha.csv"), alpha_rows(ids, m.ids, m.model.alpha));
        write_csv(stage.path("archetypoids.csv"), archetypoid_rows(m.model.indices, ids));
        write_csv(stage.path("archetype_curves.csv"), functional_curve_rows(d.raw, B * raw_coef, m.ids, c.grid));
        json per_init = json::array();
        for (const auto& p : m.per_init)
            per_init.push_back({{"init", to_string(p.init_used)}, {"indices", p.indices}, {"rss", p.rss},
                                {"swap_steps", p.swap_steps}});
        model["result"] = {{"k", c.k},
                           {"rss", m.model.rss},
                           {"rss_raw", rss_raw},
                           {"indices", m.model.indices},
                           {"ids", m.ids},
                           {"init_used", to_string(m.model.init_used)},
                           {"swap_steps", m.model.swap_steps},
                           {"rss_trace", m.model.rss_trace},
                           {"per_init", per_init},
                           {"archetype_fit", sweep_json(m.archetypes)},
                           {"alpha", matrix_json(m.model.alpha)}};
        summary << "fit-fada k=" << c.k << " rss=" << fmt(m.model.rss);
        if (c.standardize) summary << " rss_raw=" << fmt(rss_raw);
        summary << " archetypoids: " << join(m.ids);
    }
    stage.text("model.json", model.dump(2) + "\n");
    stage.commit();
    return summary.str();
}

std::string fit_matrix(const RunConfig& c) {
    const LabeledMatrix X = read_data_matrix(c.inputs.front());
    const RunConfig eff = effective(c, {});
    FitOptions opts = fit_options(eff);
    opts.standardize = c.standardize;

    json model = record(c.command, eff, X.ids);
    model["data"]["columns"] = X.columns;
    OutputStage stage(c.out);
    std::ostringstream summary;

    auto archetype_rows = [&](const Matrix& Z, const std::vector<std::string>& labels) {
        CsvRows rows;
        std::vector<std::string> header{"archetype"};
        header.insert(header.end(), X.columns.begin(), X.columns.end());
        rows.push_back(std::move(header));
        for (Index j = 0; j < Z.rows(); ++j) {
            std::vector<std::string> row{labels[j]};
            for (Index m = 0; m < Z.cols(); ++m) row.push_back(format_number(Z(j, m)));
            rows.push_back(std::move(row));
        }
        return rows;
    };

    if (c.command == "fit-aa") {
        const AAModel m = fit_archetypes(X.values, c.k, opts);
        const auto labels = numbered(c.k);
        const double rss_raw = rss(X.values, m.alpha, m.archetypes);
        write_csv(stage.path("alpha.csv"), alpha_rows(X.ids, labels, m.alpha));
        write_csv(stage.path("beta.csv"), beta_rows(X.ids, labels, m.beta));
        write_csv(stage.path("archetype_curves.csv"), archetype_rows(m.archetypes, labels));
        model["result"] = sweep_json(m);
        model["result"]["rss_raw"] = rss_raw;
        model["result"]["alpha"] = matrix_json(m.alpha);
        model["result"]["beta"] = matrix_json(m.beta);
        model["result"]["archetypes"] = matrix_json(m.archetypes);
        summary << "fit-aa k=" << c.k << " rss=" << fmt(m.rss);
        if (c.standardize) summary << " rss_raw=" << fmt(rss_raw);
    } else {
        const ArchetypoidFit fit = fit_archetypoids_detailed(X.values, c.k, opts);
        const ADAModel& m = fit.best;
        const auto names = pick(X.ids, m.indices);
        const Matrix Z = indicator(m.indices, X.values.rows()) * X.values;
        const double rss_raw = rss(X.values, m.alpha, Z);
        write_csv(stage.path("alpha.csv"), alpha_rows(X.ids, names, m.alpha));
        write_csv(stage.path("archetypoids.csv"), archetypoid_rows(m.indices, X.ids));
        write_csv(stage.path("archetype_curves.csv"), archetype_rows(Z, names));
        model["result"] = {{"k", c.k},
                           {"rss", m.rss},
                           {"rss_raw", rss_raw},
                           {"indices", m.indices},
                           {"ids", names},
                           {"init_used", to_string(m.init_used)},
                           {"swap_steps", m.swap_steps},
                           {"rss_trace", m.rss_trace},
                           {"archetype_fit", sweep_json(fit.archetypes)},
                           {"alpha", matrix_json(m.alpha)}};
        summary << "fit-ada k=" << c.k << " rss=" << fmt(m.rss) << " archetypoids: " << join(names);
    }
    stage.text("model.json", model.dump(2) + "\n");
    stage.commit();
    return summary.str();
}

std::string run_elbow(const RunConfig& c) {
    std::vector<int> ks;
    for (int k = c.k_min; k <= c.k_max; ++k) ks.push_back(k);
    FitOptions opts = fit_options(c);
    ElbowReport report;
    std::string title;

    auto scan_ada = [&](const Matrix& X) {
        for (int k : ks) {
            ElbowRow row{k, 0.0, true, opts.restarts, {}};
            try {
                row.rss = fit_archetypoids(X, k, opts).rss;
            } catch (const NumericalError& e) {
                row.converged = false;
                row.error = e.what();
            }
            report.push_back(row);
        }
    };

    if (is_functional(c.method)) {
        const auto vars = load_curves(c);
        const RunConfig eff = effective(c, vars);
        const FunctionalData d = smooth_all(eff, vars);
        const StackedCoefficients s = stack_multivariate(d.fit);
        const Matrix Y = s.coefficients * cholesky_spd(s.gram);
        if (c.k_max > Y.rows()) throw ArgumentError("k_max exceeds the number of curves");
        if (c.method == "faa") report = elbow_scan(Y, ks, opts);
        else scan_ada(Y);
        std::vector<std::string> names;
        for (const auto& v : vars) names.push_back(v.variable);
        title = c.method + " RSS by k: " + join(names);
    } else {
        const LabeledMatrix X = read_data_matrix(c.inputs.front());
        opts.standardize = c.standardize;
        if (c.k_max > X.values.rows()) throw ArgumentError("k_max exceeds the number of rows");
        if (c.method == "aa") report = elbow_scan(X.values, ks, opts);
        else scan_ada(X.values);
        title = c.method + " RSS by k: " + fs::path(c.inputs.front()).stem().string();
    }

    CsvRows rows{{"k", "rss", "converged", "restarts_used", "error"}};
    std::vector<int> plot_k;
    std::vector<double> plot_rss;
    for (const auto& r : report) {
        const bool ok = r.error.empty();
        rows.push_back({std::to_string(r.k), ok ? format_number(r.rss) : "", r.converged ? "true" : "false",
                        std::to_string(r.restarts_used), r.error});
        if (ok) {
            plot_k.push_back(r.k);
            plot_rss.push_back(r.rss);
        }
    }
    OutputStage stage(c.out);
    write_csv(stage.path("elbow.csv"), rows);
    stage.text("elbow.svg", render_elbow_svg(plot_k, plot_rss, title));
    stage.commit();

    std::ostringstream summary;
    summary << "elbow " << c.method << " k=" << c.k_min << ".." << c.k_max << ":";
    for (const auto& r : report) summary << ' ' << r.k << '=' << (r.error.empty() ? fmt(r.rss) : "failed");
    return summary.str();
}

json load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("model file '" + path + "' not found");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw DataError("model file '" + path + "' is not valid JSON: " + e.what());
    }
}

std::string run_render(const RunConfig& c0) {
    std::vector<json> models;
    for (const auto& p : c0.models) models.push_back(load_model(p));

    // Inputs and basis come from the first model unless given explicitly.
    RunConfig c = c0;
    if (!models.empty() && models.front().contains("config")) {
        std::vector<std::string> errors;
        const RunConfig m = config_from_json(models.front(), RunConfig{}, errors);
        if (c.inputs.empty()) {
            c.inputs = m.inputs;
            c.format = m.format;
        }
        if (c.nbasis == 0 && c.knots.empty()) {
            c.basis = m.basis;
            c.nbasis = m.nbasis;
            c.order = m.order;
            c.domain = m.domain;
            c.period = m.period;
            c.knots = m.knots;
        }
    }
    if (c.inputs.empty()) throw ArgumentError("render needs an input file");

    const auto vars = load_curves(c);
    const std::string variable = c.variable.empty() ? vars.front().variable : c.variable;
    const auto vit = std::find_if(vars.begin(), vars.end(), [&](const auto& v) { return v.variable == variable; });
    if (vit == vars.end()) throw DataError("variable '" + variable + "' is not in the inputs");

    const bool smooth = c.nbasis > 0 || !c.knots.empty();
    std::map<std::string, PlotCurve> by_id;
    std::vector<PlotCurve> curves;
    if (smooth) {
        const RunConfig eff = effective(c, {*vit});
        const BasisSpec basis = make_basis(eff);
        const FunctionalDataset fd = smooth_curves(basis, vit->curves, variable);
        const auto ts = linspace(basis.lower(), basis.upper(), c.grid);
        for (Index i = 0; i < fd.count(); ++i) {
            const Vector b = fd.coefficients.row(i).transpose();
            curves.push_back({ts, evaluate_curve(basis, b, ts), CurveStyle::data, fd.ids[i]});
        }
    } else {
        for (const auto& sc : vit->curves) curves.push_back({sc.t, sc.y, CurveStyle::data, sc.id});
    }
    for (const auto& pc : curves) by_id.emplace(pc.label, pc);

    for (std::size_t mi = 0; mi < models.size(); ++mi) {
        const json& m = models[mi];
        const std::string command = m.value("command", "");
        if (!m.contains("result")) throw DataError("model file '" + c0.models[mi] + "' has no result");
        const json& r = m["result"];
        if (command == "fit-faa") {
            const Matrix coef = matrix_from_json(r.at("archetype_coefficients"));
            bool found = false;
            for (const auto& v : m.at("data").at("variables")) {
                if (v.at("name").get<std::string>() != variable) continue;
                found = true;
                const BasisSpec basis = basis_from_json(v.at("basis"));
                const Index offset = v.at("offset").get<Index>();
                const auto ts = linspace(basis.lower(), basis.upper(), c.grid);
                for (Index j = 0; j < coef.rows(); ++j) {
                    const Vector b = coef.row(j).segment(offset, basis.size()).transpose();
                    curves.push_back({ts, evaluate_curve(basis, b, ts), CurveStyle::archetype,
                                      "A" + std::to_string(j + 1)});
                }
            }
            if (!found) throw DataError("model file '" + c0.models[mi] + "' has no variable '" + variable + "'");
        } else if (command == "fit-fada") {
            for (const auto& id : r.at("ids")) {
                const auto it = by_id.find(id.get<std::string>());
                if (it == by_id.end())
                    throw DataError("archetypoid '" + id.get<std::string>() + "' is not in the data");
                PlotCurve pc = it->second;
                pc.style = CurveStyle::archetypoid;
                curves.push_back(std::move(pc));
            }
        } else {
            throw ArgumentError("model file '" + c0.models[mi] + "' is not a functional fit (" + command + ")");
        }
    }

    OutputStage stage(c.out);
    stage.text("curves.svg", render_curves_svg(curves, variable, "t"));
    stage.commit();
    return "render " + variable + ": " + std::to_string(curves.size()) + " paths";
}

}  // namespace

std::string run(const RunConfig& c) {
    if (const auto errors = validate(c); !errors.empty()) throw ArgumentError(join(errors, "; "));
    if (c.command == "fit-faa" || c.command == "fit-fada") return fit_functional(c);
    if (c.command == "fit-aa" || c.command == "fit-ada") return fit_matrix(c);
    if (c.command == "elbow") return run_elbow(c);
    return run_render(c);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Functional archetype and archetypoid analysis.\n"
                 "Commands: fit-aa, fit-ada, fit-faa, fit-fada, elbow, render."};
    app.name("faa");

    RunConfig flags;
    std::string config_path;
    double period = 0;
    std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> bound;
    auto bind = [&]<class T>(CLI::Option* opt, T RunConfig::*member) {
        bound.emplace_back(opt, [&flags, member](RunConfig& c) { c.*member = flags.*member; });
        return opt;
    };

    bind(app.add_option("command", flags.command, "Command to run (may come from --config)"), &RunConfig::command);
    app.add_option("--config", config_path, "JSON configuration or a previous model.json");
    bind(app.add_option("-i,--input", flags.inputs, "Input CSV file(s)"), &RunConfig::inputs);
    bind(app.add_option("--format", flags.format, "long or wide (default wide)"), &RunConfig::format);
    bind(app.add_option("--basis", flags.basis, "fourier or bspline (default bspline)"), &RunConfig::basis);
    bind(app.add_option("--nbasis", flags.nbasis, "Number of basis functions"), &RunConfig::nbasis);
    bind(app.add_option("--order", flags.order, "B-spline order (default 4, cubic)"), &RunConfig::order);
    bind(app.add_option("--domain", flags.domain, "Domain a b (default: data range)")->expected(2),
         &RunConfig::domain);
    auto* period_opt = app.add_option("--period", period, "Fourier period (default b - a)");
    bind(app.add_option("--knots", flags.knots, "Interior B-spline knots")->delimiter(','), &RunConfig::knots);
    bind(app.add_option("-k", flags.k, "Number of archetypes or archetypoids"), &RunConfig::k);
    bind(app.add_option("--k-min", flags.k_min, "Elbow: first k (default 1)"), &RunConfig::k_min);
    bind(app.add_option("--k-max", flags.k_max, "Elbow: last k"), &RunConfig::k_max);
    bind(app.add_option("--method", flags.method, "Elbow: aa, ada, faa or fada (default faa)"), &RunConfig::method);
    bind(app.add_option("--restarts", flags.restarts, "Random restarts (default 10)"), &RunConfig::restarts);
    bind(app.add_option("--max-iter", flags.max_iter, "Alternating sweeps per restart (default 100)"),
         &RunConfig::max_iter);
    bind(app.add_option("--tol", flags.tol, "Relative RSS tolerance (default 1e-6)"), &RunConfig::tol);
    bind(app.add_option("--huge-weight", flags.huge_weight, "Sum-to-one penalty weight (default 200)"),
         &RunConfig::huge_weight);
    bind(app.add_option("--seed", flags.seed, "Random seed (default 0)"), &RunConfig::seed);
    bind(app.add_flag("--standardize,!--no-standardize", flags.standardize, "Standardize before fitting"),
         &RunConfig::standardize);
    bind(app.add_option("--standardize-grid", flags.standardize_grid, "Grid for functional standardization"),
         &RunConfig::standardize_grid);
    bind(app.add_option("--grid", flags.grid, "Points per output curve (default 101)"), &RunConfig::grid);
    bind(app.add_option("-o,--out", flags.out, "Output directory (default out)"), &RunConfig::out);
    bind(app.add_option("--model", flags.models, "Render: fitted model.json file(s)"), &RunConfig::models);
    bind(app.add_option("--variable", flags.variable, "Render: variable to draw"), &RunConfig::variable);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 1;
    }

    std::vector<std::string> errors;
    RunConfig cfg;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            err << "error: cannot read config '" << config_path << "'\n";
            return 1;
        }
        try {
            cfg = config_from_json(json::parse(in), cfg, errors);
        } catch (const json::exception& e) {
            err << "error: config '" << config_path << "' is not valid JSON: " << e.what() << '\n';
            return 1;
        }
    }
    for (auto& [opt, apply] : bound)
        if (opt->count() > 0) apply(cfg);
    if (period_opt->count() > 0) cfg.period = period;

    for (auto& e : validate(cfg)) errors.push_back(std::move(e));
    if (!errors.empty()) {
        for (const auto& e : errors) err << "error: " << e << '\n';
        err << "run 'faa --help' for usage\n";
        return 1;
    }

    try {
        out << run(cfg) << '\n';
        return 0;
    } catch (const ArgumentError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << '\n';
        return 3;
    } catch (const fs::filesystem_error& e) {
        err << "data error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace faa
