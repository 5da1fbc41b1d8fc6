#include "gkpsim/io.hpp"

#include <charconv>
#include <cmath>
#include <numbers>

#include "gkpsim/errors.hpp"
#include "gkpsim/exact_linalg.hpp"

namespace gkpsim {

std::string format_real(double x)
{
    if (x == 0) return "0";  // folds -0
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

namespace {

double parse_plain(const std::string& s, const std::string& whole)
{
    if (s.find('/') != std::string::npos) {
        try {
            return parse_rational(s).convert_to<double>();
        } catch (const ValidationError&) {
            throw ValidationError("real_literal", "cannot parse '" + whole + "'");
        }
    }
    double v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw ValidationError("real_literal", "cannot parse '" + whole + "'");
    return v;
}

}  // namespace

double parse_real(const std::string& text)
{
    std::string s;
    for (char ch : text)
        if (ch != ' ') s += ch;
    if (s.empty()) throw ValidationError("real_literal", "empty number");
    const auto pos = s.find("pi");
    if (pos == std::string::npos) return parse_plain(s, text);
    std::string coef = s.substr(0, pos) + s.substr(pos + 2);
    std::string clean;
    for (char ch : coef)
        if (ch != '*') clean += ch;
    if (clean.empty() || clean[0] == '/') clean = "1" + clean;
    else if (clean[0] == '-' && (clean.size() == 1 || clean[1] == '/')) clean.insert(1, "1");
    return parse_plain(clean, text) * std::numbers::pi;
}

CsvTable::CsvTable(std::vector<std::string> header) : columns_(header.size())
{
    add(header);
}

void CsvTable::add(const std::vector<std::string>& row)
{
    if (row.size() != columns_) throw DimensionError("csv row has the wrong number of columns");
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) text_ += ',';
        text_ += row[i];
    }
    text_ += '\n';
}

std::string CsvTable::str() const { return text_; }

}  // namespace gkpsim
