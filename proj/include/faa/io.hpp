#pragma once

// CSV ingestion of sampled curves and data matrices, and CSV writing.

#include "faa/basis.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace faa {

using CsvRows = std::vector<std::vector<std::string>>;

/// RFC 4180 style: comma separated, optional double quotes, "" escapes.
/// Throws DataError with the line number on an unterminated quote.
CsvRows parse_csv(const std::string& text);
CsvRows read_csv(const std::filesystem::path& path);

std::string csv_field(const std::string& value);
std::string format_number(double value);
void write_csv(const std::filesystem::path& path, const CsvRows& rows);

enum class InputFormat { long_format, wide };

InputFormat input_format_from_string(const std::string& name);

struct VariableCurves {
    std::string variable;
    std::vector<SampledCurve> curves;
};

/// Long files have columns (id, variable, t, value), with an optional header.
/// Wide files have a header "id, t1, t2, ..." and one row per curve; empty
/// cells are missing observations. In wide files the variable is named by
/// `wide_variable`, or the file stem if that is empty. Variables and ids keep
/// their order of first appearance.
std::vector<VariableCurves> ingest(const std::filesystem::path& path, InputFormat format,
                                   const std::string& wide_variable = {});

struct LabeledMatrix {
    std::vector<std::string> ids;
    std::vector<std::string> columns;
    Matrix values;
};

/// Plain data matrix: header "id, var1, ..., varm", no missing cells.
LabeledMatrix read_data_matrix(const std::filesystem::path& path);

}  // namespace faa
