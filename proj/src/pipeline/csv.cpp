#include "akisub/pipeline/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "akisub/error.hpp"

namespace akisub::pipeline {

namespace {

void write_field(std::ostream& out, const std::string& f) {
    if (f.find_first_of(",\"\n\r") == std::string::npos) {
        out << f;
        return;
    }
    out << '"';
    for (char c : f) {
        if (c == '"') out << '"';
        out << c;
    }
    out << '"';
}

void write_row(std::ostream& out, const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out << ',';
        write_field(out, row[i]);
    }
    out << '\n';
}

// Returns false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line) {
    fields.clear();
    if (in.peek() == std::char_traits<char>::eof()) return false;
    std::string cur;
    bool quoted = false;
    char c;
    while (in.get(c)) {
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    cur += '"';
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') ++line;
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (c == '\n') {
            ++line;
            break;
        } else if (c != '\r') {
            cur += c;
        }
    }
    if (quoted) throw ParseError("unterminated quoted field near line " + std::to_string(line));
    fields.push_back(std::move(cur));
    return true;
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw SchemaError("table has no column '" + name + "'");
}

void write_csv(const CsvTable& table, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    write_row(out, table.header);
    for (const auto& r : table.rows) {
        if (r.size() != table.header.size()) throw DimensionError("row width differs from header in " + path.string());
        write_row(out, r);
    }
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path.string() + "'");
    CsvTable t;
    std::size_t line = 1;
    if (!read_record(in, t.header, line)) throw ParseError(path.string() + ": empty file");
    std::vector<std::string> fields;
    while (read_record(in, fields, line)) {
        if (fields.size() != t.header.size())
            throw ParseError(path.string() + " line " + std::to_string(line - 1) + ": expected " +
                             std::to_string(t.header.size()) + " fields, found " + std::to_string(fields.size()));
        t.rows.push_back(fields);
    }
    return t;
}

std::string format_double(double value) {
    if (std::isnan(value)) return "";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
    if (text.empty()) return std::numeric_limits<double>::quiet_NaN();
    if (text == "inf") return std::numeric_limits<double>::infinity();
    if (text == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw ParseError("not a number: '" + text + "'");
    return v;
}

}  // namespace akisub::pipeline
