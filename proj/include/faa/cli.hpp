#pragma once

// Command-line front end: configuration, fitting commands and file outputs.

#include "faa/functional.hpp"
#include "faa/io.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace faa {

struct RunConfig {
    std::string command;  ///< fit-aa, fit-ada, fit-faa, fit-fada, elbow, render
    std::vector<std::string> inputs;
    std::string format = "wide";  ///< long or wide

    std::string basis = "bspline";  ///< fourier or bspline
    int nbasis = 0;
    int order = 4;
    std::vector<double> domain;  ///< {a, b}; data range if empty
    std::optional<double> period;
    std::vector<double> knots;  ///< explicit interior knots (B-splines)

    int k = 0;
    int k_min = 1, k_max = 0;
    std::string method = "faa";  ///< elbow: aa, ada, faa or fada

    int restarts = 10;
    int max_iter = 100;
    double tol = 1e-6;
    double huge_weight = 200;
    std::uint64_t seed = 0;
    bool standardize = false;
    int standardize_grid = 201;

    int grid = 101;  ///< points for archetype_curves.csv and rendering
    std::string out = "out";
    std::vector<std::string> models;  ///< render: fitted model.json files
    std::string variable;             ///< render: which variable to draw
};

nlohmann::json to_json(const RunConfig& cfg);

/// Reads the fields present in `j` over `base`. A model.json record is
/// accepted too (its "config" member is used). Type errors and unknown keys
/// are appended to `errors`.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base, std::vector<std::string>& errors);

/// Every problem with the configuration; empty if it is usable.
std::vector<std::string> validate(const RunConfig& cfg);

bool is_functional(const std::string& command_or_method);

/// Runs a validated configuration, writing outputs into cfg.out. Throws the
/// library's exceptions on failure; nothing is left in cfg.out in that case.
/// Returns a one-line summary.
std::string run(const RunConfig& cfg);

/// Exit codes: 0 success, 1 usage, 2 data, 3 numerical.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace faa
