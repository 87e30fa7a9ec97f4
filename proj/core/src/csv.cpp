#include "optomech/csv.hpp"

#include <charconv>
#include <cmath>

namespace optomech::csv {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::scientific, kSignificantDigits - 1);
    return std::string(buf, res.ptr);
}

std::string quote(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void Writer::header(std::initializer_list<std::string_view> names) {
    for (auto n : names) field(n);
    end_row();
}

void Writer::header(const std::vector<std::string>& names) {
    for (const auto& n : names) field(std::string_view(n));
    end_row();
}

Writer& Writer::field(std::string_view text) {
    if (!first_) out_ << ',';
    out_ << quote(text);
    first_ = false;
    return *this;
}

Writer& Writer::field(double value) { return field(std::string_view(format_number(value))); }

Writer& Writer::field(long long value) { return field(std::string_view(std::to_string(value))); }

void Writer::end_row() {
    out_ << "\r\n";
    first_ = true;
}

void write_trajectory(std::ostream& out, const Trajectory& traj) {
    Writer w(out);
    w.header({"t", "Re a1", "Im a1", "Re a2", "Im a2", "x1", "p1", "x2", "p2"});
    for (std::size_t i = 0; i < traj.size(); ++i) {
        w.field(traj.time(i));
        for (double v : traj.samples[i].pack()) w.field(v);
        w.end_row();
    }
}

void write_matrix(std::ostream& out, const Matrix8& m) {
    Writer w(out);
    const auto& labels = canonical_labels();
    w.field(std::string_view("row"));
    for (const auto& l : labels) w.field(std::string_view(l));
    w.end_row();
    for (int i = 0; i < 8; ++i) {
        w.field(std::string_view(labels[static_cast<std::size_t>(i)]));
        for (int j = 0; j < 8; ++j) w.field(m(i, j));
        w.end_row();
    }
}

}  // namespace optomech::csv
