#include "faa/io.hpp"

#include "faa/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

namespace faa {

CsvRows parse_csv(const std::string& text) {
    CsvRows rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false, field_started = false;
    int line = 1, quote_line = 0;

    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_row = [&] {
        end_field();
        if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
        row.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                if (ch == '\n') ++line;
                field.push_back(ch);
            }
            continue;
        }
        switch (ch) {
            case '"':
                if (!field_started || field.empty()) {
                    quoted = true;
                    quote_line = line;
                } else {
                    field.push_back(ch);
                }
                field_started = true;
                break;
            case ',': end_field(); break;
            case '\r': break;
            case '\n':
                end_row();
                ++line;
                break;
            default:
                field.push_back(ch);
                field_started = true;
        }
    }
    if (quoted) throw DataError("csv: unterminated quote starting on line " + std::to_string(quote_line));
    if (field_started || !row.empty()) end_row();
    return rows;
}

CsvRows read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    if (text.rfind("\xEF\xBB\xBF", 0) == 0) text.erase(0, 3);
    return parse_csv(text);
}

std::string csv_field(const std::string& value) {
    if (value.find_first_of(",\"\n\r") == std::string::npos) return value;
    std::string out = "\"";
    for (char ch : value) {
        if (ch == '"') out.push_back('"');
        out.push_back(ch);
    }
    out.push_back('"');
    return out;
}

std::string format_number(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void write_csv(const std::filesystem::path& path, const CsvRows& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << csv_field(row[i]);
        }
        out << '\n';
    }
    if (!out) throw DataError("write failed for '" + path.string() + "'");
}

InputFormat input_format_from_string(const std::string& name) {
    if (name == "long") return InputFormat::long_format;
    if (name == "wide") return InputFormat::wide;
    throw ArgumentError("unknown input format '" + name + "' (expected long or wide)");
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::optional<double> parse_number(const std::string& raw) {
    const std::string s = trim(raw);
    if (s.empty()) return std::nullopt;
    double v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::string join_lines(const std::vector<int>& lines) {
    std::string out;
    for (std::size_t i = 0; i < lines.size() && i < 20; ++i) {
        if (i) out += ", ";
        out += std::to_string(lines[i]);
    }
    if (lines.size() > 20) out += ", ...";
    return out;
}

void finish_curve(SampledCurve& c, const std::string& variable) {
    if (c.t.empty())
        throw DataError("curve '" + c.id + "' of variable '" + variable + "' has no observations");
    std::vector<std::size_t> order(c.t.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return c.t[a] < c.t[b]; });
    SampledCurve sorted{c.id, {}, {}};
    for (auto i : order) {
        if (!sorted.t.empty() && sorted.t.back() == c.t[i])
            throw DataError("curve '" + c.id + "' of variable '" + variable +
                            "' repeats argument " + format_number(c.t[i]));
        sorted.t.push_back(c.t[i]);
        sorted.y.push_back(c.y[i]);
    }
    c = std::move(sorted);
}

std::vector<VariableCurves> ingest_wide(const CsvRows& rows, const std::string& variable) {
    if (rows.empty()) throw DataError("wide file is empty");
    const auto& header = rows.front();
    if (header.size() < 2) throw DataError("wide file header needs an id column and argument columns");
    std::vector<double> ts;
    for (std::size_t j = 1; j < header.size(); ++j) {
        const auto t = parse_number(header[j]);
        if (!t) throw DataError("wide file line 1: argument '" + header[j] + "' is not a number");
        ts.push_back(*t);
    }

    VariableCurves out{variable, {}};
    std::vector<int> bad;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        const int line = static_cast<int>(r) + 1;
        if (row.size() != header.size()) {
            bad.push_back(line);
            continue;
        }
        SampledCurve c{trim(row[0]), {}, {}};
        bool ok = true;
        for (std::size_t j = 1; j < row.size(); ++j) {
            if (trim(row[j]).empty()) continue;
            const auto v = parse_number(row[j]);
            if (!v) {
                ok = false;
                break;
            }
            c.t.push_back(ts[j - 1]);
            c.y.push_back(*v);
        }
        if (!ok) {
            bad.push_back(line);
            continue;
        }
        out.curves.push_back(std::move(c));
    }
    if (!bad.empty()) throw DataError("unparsable rows at lines " + join_lines(bad));
    for (auto& c : out.curves) finish_curve(c, variable);
    return {std::move(out)};
}

std::vector<VariableCurves> ingest_long(const CsvRows& rows) {
    std::vector<VariableCurves> out;
    std::map<std::string, std::size_t> var_pos;
    std::vector<std::map<std::string, std::size_t>> id_pos;
    std::vector<int> bad;

    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        const int line = static_cast<int>(r) + 1;
        if (row.size() != 4) {
            bad.push_back(line);
            continue;
        }
        const auto t = parse_number(row[2]);
        if (!t) {
            if (r == 0) continue;  // header
            bad.push_back(line);
            continue;
        }
        if (trim(row[3]).empty()) continue;  // missing observation
        const auto v = parse_number(row[3]);
        if (!v) {
            bad.push_back(line);
            continue;
        }
        const std::string id = trim(row[0]), var = trim(row[1]);
        auto [vit, vnew] = var_pos.try_emplace(var, out.size());
        if (vnew) {
            out.push_back({var, {}});
            id_pos.emplace_back();
        }
        auto& curves = out[vit->second].curves;
        auto [iit, inew] = id_pos[vit->second].try_emplace(id, curves.size());
        if (inew) curves.push_back({id, {}, {}});
        curves[iit->second].t.push_back(*t);
        curves[iit->second].y.push_back(*v);
    }
    if (!bad.empty()) throw DataError("unparsable rows at lines " + join_lines(bad));
    if (out.empty()) throw DataError("long file contains no observations");
    for (auto& vc : out)
        for (auto& c : vc.curves) finish_curve(c, vc.variable);
    return out;
}

}  // namespace

std::vector<VariableCurves> ingest(const std::filesystem::path& path, InputFormat format,
                                   const std::string& wide_variable) {
    const CsvRows rows = read_csv(path);
    try {
        if (format == InputFormat::wide)
            return ingest_wide(rows, wide_variable.empty() ? path.stem().string() : wide_variable);
        return ingest_long(rows);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

LabeledMatrix read_data_matrix(const std::filesystem::path& path) {
    const CsvRows rows = read_csv(path);
    if (rows.size() < 2) throw DataError(path.string() + ": needs a header and at least one row");
    LabeledMatrix out;
    const auto& header = rows.front();
    if (header.size() < 2) throw DataError(path.string() + ": needs an id column and data columns");
    out.columns.assign(header.begin() + 1, header.end());
    out.values.resize(static_cast<Index>(rows.size() - 1), static_cast<Index>(header.size() - 1));
    std::vector<int> bad;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        bool ok = row.size() == header.size();
        for (std::size_t j = 1; ok && j < row.size(); ++j) {
            const auto v = parse_number(row[j]);
            if (!v) ok = false;
            else out.values(static_cast<Index>(r - 1), static_cast<Index>(j - 1)) = *v;
        }
        if (!ok) bad.push_back(static_cast<int>(r) + 1);
        out.ids.push_back(row.empty() ? std::string{} : trim(row[0]));
    }
    if (!bad.empty()) throw DataError(path.string() + ": unparsable rows at lines " + join_lines(bad));
    return out;
}

}  // namespace faa
