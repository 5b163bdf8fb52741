#pragma once

// Plain-text matrix format: first line "N", then N rows of N space-separated
// values printed in shortest round-trip form.

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>

#include "adaptsync/linalg.hpp"

namespace adaptsync {

/// Shortest decimal representation that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline bool parse_double(std::string_view text, double& out) {
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
    return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

inline void write_matrix(std::ostream& os, const Matrix& m) {
    require_square(m, "matrix");
    os << m.rows() << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) os << ' ';
            os << format_double(m(i, j));
        }
        os << '\n';
    }
}

inline Matrix read_matrix(std::istream& is) {
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(is, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.find_first_not_of(" \t") != std::string::npos) return true;
        }
        return false;
    };

    if (!next_line()) throw ParseError(line_no, "empty input, expected node count");
    std::istringstream header(line);
    std::string token;
    header >> token;
    std::string extra;
    long long n_ll = 0;
    {
        const auto res = std::from_chars(token.data(), token.data() + token.size(), n_ll);
        if (res.ec != std::errc() || res.ptr != token.data() + token.size() || n_ll <= 0 ||
            (header >> extra)) {
            throw ParseError(line_no, "expected a positive node count, got '" + line + "'");
        }
    }
    const auto n = static_cast<Eigen::Index>(n_ll);
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!next_line()) {
            throw ParseError(line_no, "expected " + std::to_string(n) + " rows, found " + std::to_string(i));
        }
        std::istringstream row(line);
        Eigen::Index j = 0;
        while (row >> token) {
            if (j >= n) throw ParseError(line_no, "row has more than " + std::to_string(n) + " values");
            double v = 0.0;
            if (!parse_double(token, v)) throw ParseError(line_no, "invalid number '" + token + "'");
            m(i, j++) = v;
        }
        if (j != n) {
            throw ParseError(line_no, "row has " + std::to_string(j) + " values, expected " + std::to_string(n));
        }
    }
    if (next_line()) throw ParseError(line_no, "unexpected trailing content");
    return m;
}

inline Matrix read_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(0, "cannot open matrix file '" + path + "'");
    return read_matrix(in);
}

inline void write_matrix_file(const std::string& path, const Matrix& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write matrix file '" + path + "'");
    write_matrix(out, m);
}

} // namespace adaptsync
