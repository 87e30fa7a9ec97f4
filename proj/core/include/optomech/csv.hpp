#pragma once

#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "optomech/classical.hpp"
#include "optomech/linear.hpp"

namespace optomech::csv {

// Numbers are written in scientific notation with 12 significant digits
// ("%.11e"), '.' decimal separator, "nan"/"inf"/"-inf" for non-finite values.
// Records end in CRLF; fields with ',', '"' or line breaks are quoted.
inline constexpr int kSignificantDigits = 12;

std::string format_number(double v);
std::string quote(std::string_view field);

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    void header(std::initializer_list<std::string_view> names);
    void header(const std::vector<std::string>& names);

    Writer& field(std::string_view text);
    Writer& field(double value);
    Writer& field(long long value);
    void end_row();

private:
    std::ostream& out_;
    bool first_ = true;
};

// Columns: t, Re a1, Im a1, Re a2, Im a2, x1, p1, x2, p2.
void write_trajectory(std::ostream& out, const Trajectory& traj);

// Square matrix dump with the fluctuation ordering as header and row labels.
void write_matrix(std::ostream& out, const Matrix8& m);

}  // namespace optomech::csv
