#include "nlfront/csv.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace nlfront {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void CsvWriter::header(std::initializer_list<std::string_view> names) {
    for (auto n : names) cell(n);
    end_row();
}

void CsvWriter::sep() {
    if (row_open_) os_ << ',';
    row_open_ = true;
}

CsvWriter& CsvWriter::cell(std::string_view text) {
    sep();
    if (text.find_first_of(",\"\n") == std::string_view::npos) {
        os_ << text;
        return *this;
    }
    os_ << '"';
    for (char c : text) {
        if (c == '"') os_ << '"';
        os_ << c;
    }
    os_ << '"';
    return *this;
}

CsvWriter& CsvWriter::cell(double v) {
    sep();
    os_ << format_double(v);
    return *this;
}

CsvWriter& CsvWriter::cell(long long v) {
    sep();
    os_ << v;
    return *this;
}

CsvWriter& CsvWriter::cell(const std::optional<double>& v) {
    if (v) return cell(*v);
    sep();
    return *this;
}

void CsvWriter::end_row() {
    os_ << '\n';
    row_open_ = false;
}

}  // namespace nlfront
