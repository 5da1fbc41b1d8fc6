#pragma once

#include <string>
#include <vector>

namespace gkpsim {

// 17 significant digits, '.' decimal point regardless of locale.
std::string format_real(double x);

// Real literal: decimal, "p/q", or a multiple of pi such as "pi/4", "3*pi/2", "-2pi".
double parse_real(const std::string& text);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);
    void add(const std::vector<std::string>& row);
    std::string str() const;

private:
    std::size_t columns_;
    std::string text_;
};

}  // namespace gkpsim
