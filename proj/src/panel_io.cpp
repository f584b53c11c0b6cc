#include "wavemix/panel_io.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

namespace wavemix::panel_io {

namespace {

bool parse_field(const std::string& field, double& out) {
    const char* begin = field.c_str();
    char* end = nullptr;
    errno = 0;
    out = std::strtod(begin, &end);
    if (end == begin || errno == ERANGE) return false;
    while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
    return *end == '\0';
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string strip(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::vector<double>> read_panel_csv(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    bool first_content_line = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (strip(line).empty()) continue;
        const auto fields = split_csv_line(line);
        std::vector<double> row;
        row.reserve(fields.size());
        bool ok = true;
        for (const auto& f : fields) {
            double v = 0.0;
            const std::string s = strip(f);
            if (s.empty() || !parse_field(s, v)) {
                ok = false;
                break;
            }
            if (!std::isfinite(v)) {
                throw InputError("non-finite value '" + s + "'", line_no);
            }
            row.push_back(v);
        }
        if (!ok) {
            if (first_content_line) {
                // single header row allowed
                first_content_line = false;
                continue;
            }
            throw InputError("non-numeric field in CSV row", line_no);
        }
        first_content_line = false;
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw InputError("row has " + std::to_string(row.size()) + " values, expected " +
                                 std::to_string(rows.front().size()),
                             line_no);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw InputError("no data rows found");
    }
    return rows;
}

std::vector<std::vector<double>> read_panel_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open '" + path + "'");
    }
    return read_panel_csv(in);
}

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

void write_row_csv(std::ostream& out, std::span<const double> row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out << ',';
        out << format_double(row[i]);
    }
    out << '\n';
}

void write_matrix_csv(std::ostream& out, const std::vector<std::vector<double>>& rows) {
    for (const auto& r : rows) write_row_csv(out, r);
}

}  // namespace wavemix::panel_io
