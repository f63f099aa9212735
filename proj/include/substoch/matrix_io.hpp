#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "substoch/matrix.hpp"

namespace substoch::io {

enum class MatrixFormat { JsonExact, CsvFloat };

inline const char* format_name(MatrixFormat f) { return f == MatrixFormat::JsonExact ? "json" : "csv"; }

/// A square matrix read from disk. CSV decimals are also kept as exact
/// rationals (0.1 -> 1/10), so either backend can run on either format.
struct MatrixFile {
    MatrixFormat format = MatrixFormat::JsonExact;
    Matrix<Rational> exact;
    Matrix<double> floating;

    Index dim() const noexcept { return exact.rows(); }
};

namespace detail {

inline Error parse_error(const std::string& what, std::size_t line, std::size_t column)
{
    return Error(Errc::ParseError, "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what,
                 line, column);
}

inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte_offset)
{
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < byte_offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

} // namespace detail

/// JsonExact: {"n": int, "entries": [[int | "p/q", ...], ...]}. A bare array
/// of rows is accepted as well. Entry errors report the 1-based (row, col).
inline MatrixFile parse_json_exact(std::string_view text)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        const auto [line, column] = detail::line_column(text, e.byte == 0 ? 0 : e.byte - 1);
        throw detail::parse_error("malformed JSON", line, column);
    }

    const nlohmann::json* rows = &doc;
    std::optional<std::int64_t> declared_n;
    if (doc.is_object()) {
        if (!doc.contains("entries")) {
            throw Error(Errc::ParseError, "JSON object has no \"entries\" field");
        }
        rows = &doc["entries"];
        if (doc.contains("n")) {
            if (!doc["n"].is_number_integer()) {
                throw Error(Errc::ParseError, "\"n\" must be an integer");
            }
            declared_n = doc["n"].get<std::int64_t>();
        }
    }
    if (!rows->is_array() || rows->empty()) {
        throw Error(Errc::ParseError, "entries must be a non-empty array of rows");
    }
    const Index n = rows->size();
    if (declared_n && *declared_n != static_cast<std::int64_t>(n)) {
        throw Error(Errc::ParseError,
                    "\"n\" is " + std::to_string(*declared_n) + " but entries has " + std::to_string(n) + " rows");
    }

    MatrixFile file;
    file.format = MatrixFormat::JsonExact;
    file.exact = Matrix<Rational>(n, n);
    for (Index i = 0; i < n; ++i) {
        const auto& row = (*rows)[i];
        if (!row.is_array() || row.size() != n) {
            throw Error(Errc::ParseError, "row " + std::to_string(i + 1) + " does not have " + std::to_string(n)
                                              + " entries (matrix must be square)",
                        i + 1);
        }
        for (Index j = 0; j < n; ++j) {
            const auto& v = row[j];
            try {
                if (v.is_number_integer()) {
                    file.exact.raw(i, j) = v.is_number_unsigned()
                                               ? Rational(mpz_class(std::to_string(v.get<std::uint64_t>())))
                                               : Rational(mpz_class(std::to_string(v.get<std::int64_t>())));
                } else if (v.is_string()) {
                    file.exact.raw(i, j) = parse_rational(v.get<std::string>());
                } else {
                    throw Error(Errc::ParseError, "entries must be integers or \"p/q\" strings");
                }
            } catch (const Error& e) {
                throw Error(Errc::ParseError,
                            "entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "): " + e.what(), i + 1,
                            j + 1);
            }
        }
    }
    file.floating = convert<double>(file.exact);
    return file;
}

/// CsvFloat: one row per line, comma separated decimals. Blank lines and
/// lines starting with '#' are skipped.
inline MatrixFile parse_csv(std::string_view text)
{
    std::vector<std::vector<double>> float_rows;
    std::vector<std::vector<Rational>> exact_rows;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        const std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        ++line_no;
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        if (detail::trim(line).empty() || detail::trim(line).front() == '#') {
            continue;
        }
        std::vector<double> frow;
        std::vector<Rational> erow;
        std::size_t start = 0;
        for (;;) {
            const std::size_t comma = line.find(',', start);
            const std::string_view raw = line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                                              : comma - start);
            const std::string_view token = detail::trim(raw);
            const std::size_t column = start + static_cast<std::size_t>(token.data() - raw.data()) + 1;
            if (token.empty()) {
                throw detail::parse_error("empty field", line_no, column);
            }
            try {
                frow.push_back(parse_double(token));
                erow.push_back(parse_rational(token));
            } catch (const Error&) {
                throw detail::parse_error("not a decimal number: '" + std::string(token) + "'", line_no, column);
            }
            if (comma == std::string_view::npos) {
                break;
            }
            start = comma + 1;
        }
        if (!float_rows.empty() && frow.size() != float_rows.front().size()) {
            throw detail::parse_error("row has " + std::to_string(frow.size()) + " fields, expected "
                                          + std::to_string(float_rows.front().size()),
                                      line_no, 1);
        }
        float_rows.push_back(std::move(frow));
        exact_rows.push_back(std::move(erow));
    }
    if (float_rows.empty()) {
        throw Error(Errc::ParseError, "CSV contains no rows");
    }
    const Index n = float_rows.size();
    if (float_rows.front().size() != n) {
        throw Error(Errc::ParseError, "matrix must be square, got " + std::to_string(n) + "x"
                                          + std::to_string(float_rows.front().size()));
    }
    MatrixFile file;
    file.format = MatrixFormat::CsvFloat;
    file.exact = Matrix<Rational>(n, n);
    file.floating = Matrix<double>(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            file.exact.raw(i, j) = exact_rows[i][j];
            file.floating.raw(i, j) = float_rows[i][j];
        }
    }
    return file;
}

inline std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(Errc::IoError, "cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline MatrixFormat detect_format(const std::filesystem::path& path, std::string_view text)
{
    const std::string ext = path.extension().string();
    if (ext == ".json") {
        return MatrixFormat::JsonExact;
    }
    if (ext == ".csv") {
        return MatrixFormat::CsvFloat;
    }
    const std::string_view body = detail::trim(text);
    return (!body.empty() && (body.front() == '{' || body.front() == '[')) ? MatrixFormat::JsonExact
                                                                            : MatrixFormat::CsvFloat;
}

inline MatrixFile parse_matrix(std::string_view text, MatrixFormat format)
{
    return format == MatrixFormat::JsonExact ? parse_json_exact(text) : parse_csv(text);
}

/// JsonExact rendering: integers bare, other rationals as "p/q" strings, one
/// row per line. The output is a pure function of the matrix.
inline std::string write_json_exact(const Matrix<Rational>& m)
{
    auto entry = [](const Rational& x) {
        if (x.get_den() == 1 && x.get_num().fits_slong_p()) {
            return x.get_num().get_str();
        }
        return "\"" + ScalarTraits<Rational>::to_string(x) + "\"";
    };
    std::string s = "{\n  \"n\": " + std::to_string(m.rows()) + ",\n  \"entries\": [\n";
    for (Index i = 0; i < m.rows(); ++i) {
        s += "    [";
        for (Index j = 0; j < m.cols(); ++j) {
            if (j > 0) {
                s += ", ";
            }
            s += entry(m.raw(i, j));
        }
        s += i + 1 < m.rows() ? "],\n" : "]\n";
    }
    s += "  ]\n}\n";
    return s;
}

/// FNV-1a 64-bit digest of the raw input bytes, for report provenance.
inline std::string digest(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace substoch::io
