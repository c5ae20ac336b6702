#include "hhc/csv.hpp"
#include "hhc/errors.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace hhc {

int CsvTable::column(const std::string& name) const {
    for (std::size_t j = 0; j < header.size(); ++j)
        if (header[j] == name) return static_cast<int>(j);
    return -1;
}

const std::string& CsvTable::cell(std::size_t row, int col) const {
    static const std::string empty;
    if (col < 0 || row >= rows.size()) return empty;
    const auto& r = rows[row];
    if (static_cast<std::size_t>(col) >= r.size()) return empty;
    return r[static_cast<std::size_t>(col)];
}

namespace {

std::vector<std::string> parse_line(const std::string& line, std::istream& in, bool* more) {
    std::vector<std::string> fields;
    std::string cur;
    bool in_quotes = false;
    std::string text = line;
    std::size_t i = 0;
    while (true) {
        if (i >= text.size()) {
            if (in_quotes) {
                // quoted field continues over a newline
                std::string next;
                if (!std::getline(in, next)) throw InputError("unterminated quoted CSV field");
                cur.push_back('\n');
                text = next;
                i = 0;
                continue;
            }
            break;
        }
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c == '\r') {
            // tolerate CRLF
        } else {
            cur.push_back(c);
        }
        ++i;
    }
    fields.push_back(cur);
    *more = false;
    return fields;
}

} // namespace

CsvTable read_csv(std::istream& in) {
    CsvTable t;
    std::string line;
    bool more = false;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!have_header && line.empty()) continue;
        auto fields = parse_line(line, in, &more);
        if (!have_header) {
            t.header = std::move(fields);
            have_header = true;
        } else {
            if (fields.size() == 1 && fields[0].empty()) continue; // blank line
            t.rows.push_back(std::move(fields));
        }
    }
    if (!have_header) throw InputError("empty CSV: missing header row");
    return t;
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file: " + path);
    return read_csv(in);
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        out << csv_escape(fields[i]);
    }
    out << '\n';
}

std::string format_double(double v) {
    char buf[40];
    // %.17g round-trips; trim to shorter forms when exact
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        if (back == v) return buf;
    }
    return buf;
}

} // namespace hhc
